//! Weibull multi-parameter regression: hazard `λγt^(γ-1)` with
//! `log λ = xᵀβ` and `log γ = zᵀα`, fitted by censored maximum likelihood.

use crate::data::{ColumnLabel, Component, Dataset, DesignMatrices, ModelSpec, Column};
use crate::error::{MprError, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;
use serde::Serialize;
use std::collections::BTreeMap;

/// Regression coefficients; flattened order is always `β` then `α`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theta<T> {
    pub beta: Vec<T>,
    pub alpha: Vec<T>,
}

impl<T: Scalar> Theta<T> {
    pub fn new(beta: Vec<T>, alpha: Vec<T>) -> Self {
        Self { beta, alpha }
    }

    pub fn zeros(scale_len: usize, shape_len: usize) -> Self {
        Self {
            beta: vec![T::zero(); scale_len],
            alpha: vec![T::zero(); shape_len],
        }
    }

    pub fn len(&self) -> usize {
        self.beta.len() + self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_vec(&self) -> Vec<T> {
        self.beta.iter().chain(&self.alpha).copied().collect()
    }

    pub fn from_vec(v: &[T], scale_len: usize) -> Self {
        Self {
            beta: v[..scale_len].to_vec(),
            alpha: v[scale_len..].to_vec(),
        }
    }

    fn check(&self, d: &DesignMatrices<T>) -> Result<()> {
        if self.beta.len() != d.x.ncols() || self.alpha.len() != d.z.ncols() {
            return Err(MprError::Dimension(format!(
                "theta has ({}, {}) coefficients, design has ({}, {}) columns",
                self.beta.len(),
                self.alpha.len(),
                d.x.ncols(),
                d.z.ncols()
            )));
        }
        if self.beta.iter().chain(&self.alpha).any(|v| !v.is_finite()) {
            return Err(MprError::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(())
    }
}

/// Per-subject quantities shared by the likelihood and its derivatives.
struct SubjectTerms<T> {
    eta_scale: T,
    eta_shape: T,
    /// `γ log t`
    shape_log_t: T,
    /// cumulative hazard `λ t^γ`
    cum_hazard: T,
    log_t: T,
}

fn subject_terms<T: Scalar>(theta: &Theta<T>, d: &DesignMatrices<T>) -> Result<Vec<SubjectTerms<T>>> {
    theta.check(d)?;
    let ln_max = T::max_value().ln();
    (0..d.n())
        .map(|i| {
            let eta_scale = dot(d.x.row(i), &theta.beta);
            let eta_shape = dot(d.z.row(i), &theta.alpha);
            let log_t = d.time[i].ln();
            if !(eta_shape <= ln_max) {
                return Err(MprError::Overflow { subject: i });
            }
            let shape_log_t = eta_shape.exp() * log_t;
            let log_cum = eta_scale + shape_log_t;
            if !(log_cum <= ln_max) {
                return Err(MprError::Overflow { subject: i });
            }
            Ok(SubjectTerms {
                eta_scale,
                eta_shape,
                shape_log_t,
                cum_hazard: log_cum.exp(),
                log_t,
            })
        })
        .collect()
}

fn indicator<T: Scalar>(event: bool) -> T {
    if event {
        T::one()
    } else {
        T::zero()
    }
}

/// Censored Weibull log-likelihood
/// `Σ δᵢ[xᵢᵀβ + zᵢᵀα + (γᵢ - 1) log tᵢ] - λᵢ tᵢ^γᵢ`.
pub fn log_likelihood<T: Scalar>(theta: &Theta<T>, d: &DesignMatrices<T>) -> Result<T> {
    let terms = subject_terms(theta, d)?;
    let mut ll = T::zero();
    for (s, &event) in terms.iter().zip(&d.status) {
        if event {
            ll = ll + s.eta_scale + s.eta_shape + s.shape_log_t - s.log_t;
        }
        ll = ll - s.cum_hazard;
    }
    if !ll.is_finite() {
        return Err(MprError::Overflow { subject: 0 });
    }
    Ok(ll)
}

/// Gradient of [`log_likelihood`], `β` block first.
pub fn score<T: Scalar>(theta: &Theta<T>, d: &DesignMatrices<T>) -> Result<Vec<T>> {
    let terms = subject_terms(theta, d)?;
    let (kx, kz) = (d.x.ncols(), d.z.ncols());
    let mut g = vec![T::zero(); kx + kz];
    for (i, s) in terms.iter().enumerate() {
        let delta: T = indicator(d.status[i]);
        let resid = delta - s.cum_hazard;
        let wz = delta + s.shape_log_t * resid;
        for (j, &xv) in d.x.row(i).iter().enumerate() {
            g[j] = g[j] + xv * resid;
        }
        for (j, &zv) in d.z.row(i).iter().enumerate() {
            g[kx + j] = g[kx + j] + zv * wz;
        }
    }
    Ok(g)
}

/// Negative Hessian of [`log_likelihood`], assembled in `(β, α)` blocks.
pub fn observed_information<T: Scalar>(theta: &Theta<T>, d: &DesignMatrices<T>) -> Result<Matrix<T>> {
    let terms = subject_terms(theta, d)?;
    let (kx, kz) = (d.x.ncols(), d.z.ncols());
    let k = kx + kz;
    let mut info = Matrix::zeros(k, k);
    for (i, s) in terms.iter().enumerate() {
        let delta: T = indicator(d.status[i]);
        let w_bb = s.cum_hazard;
        let w_ba = s.cum_hazard * s.shape_log_t;
        let w_aa = s.cum_hazard * s.shape_log_t * s.shape_log_t
            - s.shape_log_t * (delta - s.cum_hazard);
        let (x, z) = (d.x.row(i), d.z.row(i));
        for a in 0..kx {
            for b in 0..=a {
                info[(a, b)] = info[(a, b)] + w_bb * x[a] * x[b];
            }
        }
        for a in 0..kz {
            for b in 0..kx {
                info[(kx + a, b)] = info[(kx + a, b)] + w_ba * z[a] * x[b];
            }
            for b in 0..=a {
                info[(kx + a, kx + b)] = info[(kx + a, kx + b)] + w_aa * z[a] * z[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            info[(b, a)] = info[(a, b)];
        }
    }
    Ok(info)
}

#[derive(Debug, Clone)]
pub struct FitOptions<T> {
    pub max_iter: usize,
    /// Absolute bound on the largest score component.
    pub tol_grad: T,
    /// Bound on `|Δℓ| / max(|ℓ|, 1)` between successive iterates.
    pub tol_rel_loglik: T,
    pub start: Option<Theta<T>>,
    /// Parameters (flattened index) held at their starting value.
    pub fixed: Vec<usize>,
}

impl<T: Scalar> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol_grad: T::lit(1e-8).max(T::lit(1e4) * T::epsilon()),
            tol_rel_loglik: T::lit(1e-10).max(T::lit(10.0) * T::epsilon()),
            start: None,
            fixed: Vec::new(),
        }
    }
}

impl<T: Scalar> FitOptions<T> {
    pub fn with_start(mut self, start: Theta<T>) -> Self {
        self.start = Some(start);
        self
    }

    pub fn with_fixed(mut self, fixed: Vec<usize>) -> Self {
        self.fixed = fixed;
        self
    }
}

/// Exponential-model start: `α = 0`, `β₀ = log(events / total time)`.
pub fn default_start<T: Scalar>(d: &DesignMatrices<T>) -> Theta<T> {
    let events = T::from_count(d.status.iter().filter(|&&s| s).count());
    let exposure: T = d.time.iter().copied().sum();
    let mut theta = Theta::zeros(d.x.ncols(), d.z.ncols());
    if events > T::zero() && exposure > T::zero() {
        theta.beta[0] = (events / exposure).ln();
    }
    theta
}

#[derive(Debug, Clone, Serialize)]
pub struct FittedModel<T> {
    pub theta: Theta<T>,
    pub loglik: T,
    /// Inverse observed information over the free parameters; rows and
    /// columns of fixed parameters are zero.
    pub covariance: Matrix<T>,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub converged: bool,
    pub iterations: usize,
    pub max_abs_score: T,
    pub x_labels: Vec<ColumnLabel>,
    pub z_labels: Vec<ColumnLabel>,
    pub spec: ModelSpec,
    pub fixed: Vec<usize>,
}

impl<T: Scalar> FittedModel<T> {
    /// Number of estimated parameters `k`.
    pub fn n_params(&self) -> usize {
        self.p + self.q + 2 - self.fixed.len()
    }

    pub fn aic(&self) -> T {
        T::lit(-2.0) * self.loglik + T::lit(2.0) * T::from_count(self.n_params())
    }

    pub fn bic(&self) -> T {
        T::lit(-2.0) * self.loglik + T::from_count(self.n_params()) * T::from_count(self.n).ln()
    }

    pub fn std_errors(&self) -> Vec<T> {
        self.covariance
            .diagonal()
            .into_iter()
            .map(|v| v.max(T::zero()).sqrt())
            .collect()
    }

    pub fn labels(&self, component: Component) -> &[ColumnLabel] {
        match component {
            Component::Scale => &self.x_labels,
            Component::Shape => &self.z_labels,
        }
    }

    /// Flattened index of the coefficient whose label prints as `label`.
    pub fn index_of(&self, component: Component, label: &str) -> Option<usize> {
        let pos = self.labels(component).iter().position(|l| l.to_string() == label)?;
        Some(match component {
            Component::Scale => pos,
            Component::Shape => self.x_labels.len() + pos,
        })
    }

    /// Flattened indices of every column of `term` in `component`.
    pub fn term_indices(&self, component: Component, term: &str) -> Vec<usize> {
        let offset = match component {
            Component::Scale => 0,
            Component::Shape => self.x_labels.len(),
        };
        self.labels(component)
            .iter()
            .enumerate()
            .filter(|(_, l)| l.belongs_to(term))
            .map(|(j, _)| offset + j)
            .collect()
    }

    pub fn coefficient(&self, index: usize) -> T {
        self.theta.to_vec()[index]
    }

    /// Design rows for a covariate profile. Absent terms take the value 0
    /// (numeric) or the reference level (categorical).
    pub fn rows_for_profile(&self, profile: &CovariateProfile) -> Result<(Vec<T>, Vec<T>)> {
        Ok((
            profile_row(&self.x_labels, profile)?,
            profile_row(&self.z_labels, profile)?,
        ))
    }

    pub fn lambda_gamma(&self, x_row: &[T], z_row: &[T]) -> Result<(T, T)> {
        if x_row.len() != self.x_labels.len() || z_row.len() != self.z_labels.len() {
            return Err(MprError::Dimension(format!(
                "covariate rows of length ({}, {}) for design labels of length ({}, {})",
                x_row.len(),
                z_row.len(),
                self.x_labels.len(),
                self.z_labels.len()
            )));
        }
        Ok((
            dot(x_row, &self.theta.beta).exp(),
            dot(z_row, &self.theta.alpha).exp(),
        ))
    }
}

/// Covariate values used to evaluate a fitted model at a single profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CovariateProfile(pub BTreeMap<String, ProfileValue>);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProfileValue {
    Numeric(f64),
    Level(String),
}

impl CovariateProfile {
    pub fn reference() -> Self {
        Self::default()
    }

    pub fn set(mut self, name: &str, value: ProfileValue) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    /// Profile of subject `row` of `ds`.
    pub fn from_row(ds: &Dataset, row: usize) -> Self {
        let mut m = BTreeMap::new();
        for name in ds.covariate_names() {
            let v = match ds.column(name).expect("named column") {
                Column::Numeric(v) => ProfileValue::Numeric(v[row]),
                Column::Categorical { levels, codes } => ProfileValue::Level(levels[codes[row]].clone()),
            };
            m.insert(name.clone(), v);
        }
        Self(m)
    }
}

fn profile_row<T: Scalar>(labels: &[ColumnLabel], profile: &CovariateProfile) -> Result<Vec<T>> {
    labels
        .iter()
        .map(|l| {
            let Some(term) = &l.term else {
                return Ok(T::one());
            };
            match (profile.0.get(term), &l.level) {
                (None, _) => Ok(T::zero()),
                (Some(ProfileValue::Numeric(v)), None) => Ok(T::lit(*v)),
                (Some(ProfileValue::Level(given)), Some(level)) => {
                    Ok(if given == level { T::one() } else { T::zero() })
                }
                _ => Err(MprError::Dimension(format!(
                    "profile value for `{term}` does not match column `{l}`"
                ))),
            }
        })
        .collect()
}

fn free_indices(k: usize, fixed: &[usize]) -> Vec<usize> {
    (0..k).filter(|j| !fixed.contains(j)).collect()
}

/// Newton direction on the free block; Levenberg inflation when the
/// information is not positive definite, then the gradient itself.
fn newton_direction<T: Scalar>(info: &Matrix<T>, grad: &[T]) -> Vec<T> {
    if let Ok(ch) = info.cholesky() {
        return ch.solve(grad);
    }
    let mut mu = T::lit(1e-8);
    for _ in 0..20 {
        let mut inflated = info.clone();
        for i in 0..grad.len() {
            inflated[(i, i)] = inflated[(i, i)] + mu;
        }
        if let Ok(ch) = inflated.cholesky() {
            return ch.solve(grad);
        }
        mu = mu * T::lit(10.0);
    }
    grad.to_vec()
}

/// Maximum likelihood fit by Newton-Raphson with step halving.
///
/// Convergence requires both `max |score| < tol_grad` and a relative
/// log-likelihood change below `tol_rel_loglik`. Hitting `max_iter` returns
/// the last iterate with `converged == false`.
pub fn fit<T: Scalar>(d: &DesignMatrices<T>, options: &FitOptions<T>) -> Result<FittedModel<T>> {
    let k = d.n_params();
    let kx = d.x.ncols();
    if options.fixed.iter().any(|&j| j >= k) {
        return Err(MprError::InvalidArgument("fixed index out of range".into()));
    }
    let free = free_indices(k, &options.fixed);
    let mut theta = match &options.start {
        Some(s) => {
            s.check(d)?;
            s.clone()
        }
        None => default_start(d),
    };
    let mut ll = log_likelihood(&theta, d)?;
    let mut rel_change = T::infinity();
    let mut converged = false;
    let mut iterations = 0;
    let slack = T::lit(10.0) * T::epsilon();

    loop {
        let grad = score(&theta, d)?;
        let grad_free: Vec<T> = free.iter().map(|&j| grad[j]).collect();
        let max_grad = grad_free.iter().fold(T::zero(), |m, g| m.max(g.abs()));
        if max_grad < options.tol_grad && rel_change < options.tol_rel_loglik {
            converged = true;
            break;
        }
        if iterations >= options.max_iter {
            break;
        }
        iterations += 1;

        let info = observed_information(&theta, d)?.select(&free, &free);
        let dir = newton_direction(&info, &grad_free);
        let current = theta.to_vec();
        let magnitude = ll.abs().max(T::one());
        let predicted = grad_free.iter().zip(&dir).map(|(&g, &s)| g * s).sum::<T>() / T::lit(2.0);
        // Once the predicted gain is at rounding level, the summed
        // log-likelihood can no longer rank the steps.
        let floor = if predicted <= T::lit(100.0) * T::epsilon() * magnitude {
            ll - T::lit(1e4) * T::epsilon() * magnitude
        } else {
            ll - slack * magnitude
        };
        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..=30 {
            let mut cand = current.clone();
            for (&j, &dj) in free.iter().zip(&dir) {
                cand[j] = cand[j] + step * dj;
            }
            let cand = Theta::from_vec(&cand, kx);
            if let Ok(l) = log_likelihood(&cand, d) {
                if l >= floor {
                    accepted = Some((cand, l));
                    break;
                }
            }
            step = step / T::lit(2.0);
        }
        match accepted {
            Some((cand, l)) => {
                rel_change = (l - ll).abs() / ll.abs().max(T::one());
                theta = cand;
                ll = l;
            }
            None => {
                let stalled = score(&theta, d)?;
                let g = free.iter().fold(T::zero(), |m, &j| m.max(stalled[j].abs()));
                converged = g < options.tol_grad;
                break;
            }
        }
    }

    let grad = score(&theta, d)?;
    let max_abs_score = free.iter().fold(T::zero(), |m, &j| m.max(grad[j].abs()));
    let info = observed_information(&theta, d)?.select(&free, &free);
    let inv = info.inverse_spd().map_err(|_| MprError::SingularInformation)?;
    let mut covariance = Matrix::zeros(k, k);
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            covariance[(i, j)] = inv[(a, b)];
        }
    }
    if covariance.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(MprError::SingularInformation);
    }
    Ok(FittedModel {
        theta,
        loglik: ll,
        covariance,
        n: d.n(),
        p: d.p(),
        q: d.q(),
        converged,
        iterations,
        max_abs_score,
        x_labels: d.x_labels.clone(),
        z_labels: d.z_labels.clone(),
        spec: d.spec.clone(),
        fixed: options.fixed.clone(),
    })
}

/// Weibull survivor function `exp(-λ t^γ)`.
pub fn weibull_survivor<T: Scalar>(lambda: T, gamma: T, t: T) -> T {
    if t <= T::zero() {
        return T::one();
    }
    (-(lambda * t.powf(gamma))).exp()
}

/// Weibull hazard `λ γ t^(γ-1)`; singular at `t = 0` when `γ < 1`.
pub fn weibull_hazard<T: Scalar>(lambda: T, gamma: T, t: T) -> Result<T> {
    if t < T::zero() {
        return Err(MprError::InvalidArgument("negative time".into()));
    }
    if t == T::zero() {
        return if gamma < T::one() {
            Err(MprError::SingularHazard)
        } else if gamma == T::one() {
            Ok(lambda)
        } else {
            Ok(T::zero())
        };
    }
    Ok(lambda * gamma * t.powf(gamma - T::one()))
}

/// Model-based survivor curve `S(t | x, z)` on `times`.
pub fn predict_survivor<T: Scalar>(
    fit: &FittedModel<T>,
    x_row: &[T],
    z_row: &[T],
    times: &[T],
) -> Result<Vec<T>> {
    let (lambda, gamma) = fit.lambda_gamma(x_row, z_row)?;
    times
        .iter()
        .map(|&t| {
            if t < T::zero() {
                Err(MprError::InvalidArgument("negative time".into()))
            } else {
                Ok(weibull_survivor(lambda, gamma, t))
            }
        })
        .collect()
}

/// Model-based hazard curve `λ(t | x, z)` on `times`.
pub fn predict_hazard<T: Scalar>(
    fit: &FittedModel<T>,
    x_row: &[T],
    z_row: &[T],
    times: &[T],
) -> Result<Vec<T>> {
    let (lambda, gamma) = fit.lambda_gamma(x_row, z_row)?;
    times.iter().map(|&t| weibull_hazard(lambda, gamma, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(t: f64, event: bool) -> DesignMatrices<f64> {
        DesignMatrices::from_matrices(
            Matrix::from_rows(&[vec![1.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0]]).unwrap(),
            vec![t],
            vec![event],
        )
        .unwrap()
    }

    fn pair() -> DesignMatrices<f64> {
        DesignMatrices::from_matrices(
            Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap(),
            vec![1.0, 2.0],
            vec![true, false],
        )
        .unwrap()
    }

    #[test]
    fn loglik_hand_values() {
        let th = Theta::zeros(1, 1);
        assert_eq!(log_likelihood(&th, &single(1.0, true)).unwrap(), -1.0);
        assert_eq!(log_likelihood(&th, &single(2.0, false)).unwrap(), -2.0);
        assert_eq!(log_likelihood(&th, &pair()).unwrap(), -3.0);
    }

    #[test]
    fn score_and_information_hand_values() {
        let th = Theta::zeros(1, 1);
        let d = single(1.0, true);
        assert_eq!(score(&th, &d).unwrap(), vec![0.0, 1.0]);
        let info = observed_information(&th, &d).unwrap();
        // ∂²ℓ/∂β₀² = -λt^γ = -1
        assert_eq!(info[(0, 0)], 1.0);
        assert_eq!(info.max_abs_asymmetry(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let th = Theta::zeros(2, 1);
        assert!(matches!(log_likelihood(&th, &pair()), Err(MprError::Dimension(_))));
    }

    #[test]
    fn overflow_names_subject() {
        let d = DesignMatrices::from_matrices(
            Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap(),
            vec![1.0, 1e6],
            vec![true, true],
        )
        .unwrap();
        let th = Theta::new(vec![0.0], vec![5.0]);
        assert_eq!(log_likelihood(&th, &d), Err(MprError::Overflow { subject: 1 }));
    }

    #[test]
    fn survivor_and_hazard_special_cases() {
        assert!((weibull_survivor(1.0, 1.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(weibull_hazard(2.0, 1.0, 7.5).unwrap(), 2.0);
        assert_eq!(weibull_hazard(1.0, 2.0, 3.0).unwrap(), 6.0);
        assert_eq!(weibull_hazard(1.0, 0.5, 0.0), Err(MprError::SingularHazard));
        assert_eq!(weibull_survivor(0.3, 1.4, 0.0), 1.0);
    }

    #[test]
    fn hazard_monotonicity_follows_shape() {
        let grid: Vec<f64> = (1..50).map(|i| i as f64 * 0.1).collect();
        let h = |g: f64| grid.iter().map(|&t| weibull_hazard(0.7, g, t).unwrap()).collect::<Vec<_>>();
        assert!(h(1.5).windows(2).all(|w| w[1] > w[0]));
        assert!(h(0.6).windows(2).all(|w| w[1] < w[0]));
        assert!(h(1.0).windows(2).all(|w| w[1] == w[0]));
    }

    #[test]
    fn fixed_parameters_stay_put() {
        let d = DesignMatrices::from_matrices(
            Matrix::from_rows(&vec![vec![1.0]; 4]).unwrap(),
            Matrix::from_rows(&vec![vec![1.0]; 4]).unwrap(),
            vec![0.5, 1.0, 2.0, 3.0],
            vec![true, true, false, true],
        )
        .unwrap();
        let f = fit(&d, &FitOptions::default().with_fixed(vec![1])).unwrap();
        assert!(f.converged);
        assert_eq!(f.theta.alpha[0], 0.0);
        // exponential MLE: events / exposure
        assert!((f.theta.beta[0] - (3.0f64 / 6.5).ln()).abs() < 1e-10);
        assert_eq!(f.n_params(), 1);
        assert_eq!(f.covariance[(1, 1)], 0.0);
    }

    #[test]
    fn max_iter_zero_reports_not_converged() {
        let d = pair();
        let opts = FitOptions {
            max_iter: 0,
            ..FitOptions::default()
        };
        let f = fit(&d, &opts.with_fixed(vec![1])).unwrap();
        // start is already the exponential MLE but no step was taken
        assert!(!f.converged);
        assert_eq!(f.iterations, 0);
    }

    #[test]
    fn profile_rows_follow_labels() {
        let labels = vec![
            ColumnLabel::intercept(),
            ColumnLabel { term: Some("trt".into()), level: Some("S".into()) },
            ColumnLabel { term: Some("age".into()), level: None },
        ];
        let prof = CovariateProfile::reference()
            .set("trt", ProfileValue::Level("S".into()))
            .set("age", ProfileValue::Numeric(2.5));
        assert_eq!(profile_row::<f64>(&labels, &prof).unwrap(), vec![1.0, 1.0, 2.5]);
        let bad = CovariateProfile::reference().set("age", ProfileValue::Level("x".into()));
        assert!(profile_row::<f64>(&labels, &bad).is_err());
    }
}
