//! Wald and likelihood-ratio tests, joint confidence ellipses and
//! information criteria for fitted models.

use crate::data::Component;
use crate::error::{MprError, Result};
use crate::linalg::{dot, symmetric_eigen_2x2, Matrix};
use crate::model::FittedModel;
use crate::scalar::Scalar;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

pub use crate::special::{chi_square_quantile, chi_square_sf};

/// Statistics in `(-LRT_TOLERANCE, 0)` are clamped to zero.
pub const LRT_TOLERANCE: f64 = 1e-8;

pub const DEFAULT_ELLIPSE_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    WaldSingle,
    WaldJoint,
    LikelihoodRatio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult<T> {
    pub statistic: T,
    pub df: usize,
    pub p_value: T,
    pub kind: TestKind,
}

impl<T: Scalar> TestResult<T> {
    fn chi_square(statistic: T, df: usize, kind: TestKind) -> Result<Self> {
        let p_value = if df == 0 {
            T::one()
        } else {
            chi_square_sf(statistic, df)?
        };
        Ok(Self {
            statistic,
            df,
            p_value,
            kind,
        })
    }
}

/// A covariate effect: a whole term, or a single level of a factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct EffectKey {
    pub covariate: String,
    pub level: Option<String>,
}

impl EffectKey {
    pub fn term(covariate: &str) -> Self {
        Self {
            covariate: covariate.to_string(),
            level: None,
        }
    }

    pub fn level(covariate: &str, level: &str) -> Self {
        Self {
            covariate: covariate.to_string(),
            level: Some(level.to_string()),
        }
    }
}

impl fmt::Display for EffectKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.level {
            Some(l) => write!(f, "{}[{}]", self.covariate, l),
            None => f.write_str(&self.covariate),
        }
    }
}

impl FromStr for EffectKey {
    type Err = MprError;

    /// Parses `name` or `name[level]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.find('[') {
            Some(open) if s.ends_with(']') => Ok(Self::level(&s[..open], &s[open + 1..s.len() - 1])),
            Some(_) => Err(MprError::InvalidArgument(format!("malformed effect `{s}`"))),
            None if s.is_empty() => Err(MprError::InvalidArgument("empty effect name".into())),
            None => Ok(Self::term(s)),
        }
    }
}

/// Flattened coefficient indices of `effect` in one component.
pub fn effect_indices<T: Scalar>(fit: &FittedModel<T>, component: Component, effect: &EffectKey) -> Vec<usize> {
    let offset = match component {
        Component::Scale => 0,
        Component::Shape => fit.x_labels.len(),
    };
    fit.labels(component)
        .iter()
        .enumerate()
        .filter(|(_, l)| {
            l.belongs_to(&effect.covariate)
                && (effect.level.is_none() || l.level == effect.level)
        })
        .map(|(j, _)| offset + j)
        .collect()
}

/// Scale and shape indices of `effect`, paired column by column.
pub fn paired_indices<T: Scalar>(fit: &FittedModel<T>, effect: &EffectKey) -> Result<(Vec<usize>, Vec<usize>)> {
    let scale = effect_indices(fit, Component::Scale, effect);
    let shape = effect_indices(fit, Component::Shape, effect);
    let kx = fit.x_labels.len();
    let paired = !scale.is_empty()
        && scale.len() == shape.len()
        && scale
            .iter()
            .zip(&shape)
            .all(|(&s, &h)| fit.x_labels[s] == fit.z_labels[h - kx]);
    if !paired {
        return Err(MprError::NotInBothComponents(effect.to_string()));
    }
    Ok((scale, shape))
}

/// Wald test of a single coefficient being zero: `(θ̂ⱼ / seⱼ)²` on 1 df.
pub fn wald_single<T: Scalar>(fit: &FittedModel<T>, component: Component, label: &str) -> Result<TestResult<T>> {
    let j = fit
        .index_of(component, label)
        .ok_or_else(|| MprError::UnknownCoefficient(format!("{component}:{label}")))?;
    let est = fit.coefficient(j);
    let var = fit.covariance[(j, j)];
    if !(var > T::zero()) {
        return Err(MprError::SingularInformation);
    }
    TestResult::chi_square(est * est / var, 1, TestKind::WaldSingle)
}

/// Joint Wald test that every scale and shape coefficient of `effect` is
/// zero. A binary covariate gives the 2-df test; an `L`-level factor uses
/// the full `2(L-1)` block.
pub fn wald_joint<T: Scalar>(fit: &FittedModel<T>, effect: &EffectKey) -> Result<TestResult<T>> {
    let (scale, shape) = paired_indices(fit, effect)?;
    let idx: Vec<usize> = scale.into_iter().chain(shape).collect();
    let theta = fit.theta.to_vec();
    let est: Vec<T> = idx.iter().map(|&j| theta[j]).collect();
    let sub = fit.covariance.select(&idx, &idx);
    let chol = sub.cholesky().map_err(|_| MprError::SingularInformation)?;
    let stat = dot(&est, &chol.solve(&est)).max(T::zero());
    TestResult::chi_square(stat, idx.len(), TestKind::WaldJoint)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ellipse<T> {
    /// `(β̂_c, α̂_c)`
    pub center: [T; 2],
    pub boundary: Vec<[T; 2]>,
    pub level: T,
    /// χ²₂ quantile the boundary's quadratic form equals.
    pub quantile: T,
    /// 2×2 covariance block of `(β̂_c, α̂_c)`.
    pub covariance: [[T; 2]; 2],
}

impl<T: Scalar> Ellipse<T> {
    /// Quadratic form `(v - center)ᵀ Σ⁻¹ (v - center)`.
    pub fn quadratic_form(&self, point: [T; 2]) -> T {
        let [[a, b], [_, d]] = self.covariance;
        let det = a * d - b * b;
        let (u, v) = (point[0] - self.center[0], point[1] - self.center[1]);
        (d * u * u - (b + b) * u * v + a * v * v) / det
    }

    pub fn contains(&self, point: [T; 2]) -> bool {
        self.quadratic_form(point) <= self.quantile
    }

    /// Two-column `beta,alpha` CSV of the boundary.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("beta,alpha\n");
        for p in &self.boundary {
            s.push_str(&format!("{},{}\n", p[0], p[1]));
        }
        s
    }
}

/// Joint confidence ellipse for the scale and shape coefficient of a single
/// binary or numeric effect, traced through the eigenvectors of its 2×2
/// covariance block.
pub fn confidence_ellipse<T: Scalar>(
    fit: &FittedModel<T>,
    effect: &EffectKey,
    level: T,
    n_points: usize,
) -> Result<Ellipse<T>> {
    if !(level > T::zero() && level < T::one()) {
        return Err(MprError::InvalidArgument(format!("level {level} outside (0, 1)")));
    }
    if n_points < 3 {
        return Err(MprError::InvalidArgument("an ellipse needs at least 3 points".into()));
    }
    let (scale, shape) = paired_indices(fit, effect)?;
    if scale.len() != 1 {
        return Err(MprError::NotScalarEffect(effect.to_string()));
    }
    let idx = [scale[0], shape[0]];
    let sub = fit.covariance.select(&idx, &idx);
    sub.cholesky().map_err(|_| MprError::NotPositiveDefinite)?;
    let (vals, vecs) = symmetric_eigen_2x2(&sub);
    if !(vals[1] > T::zero()) {
        return Err(MprError::NotPositiveDefinite);
    }
    let quantile = chi_square_quantile(level, 2)?;
    let radius = quantile.sqrt();
    let center = [fit.coefficient(idx[0]), fit.coefficient(idx[1])];
    let tau = T::lit(2.0 * std::f64::consts::PI);
    let boundary = (1..=n_points)
        .map(|k| {
            let phi = tau * T::from_count(k) / T::from_count(n_points);
            let (c, s) = (phi.cos() * vals[0].sqrt(), phi.sin() * vals[1].sqrt());
            [
                center[0] + radius * (vecs[0][0] * c + vecs[0][1] * s),
                center[1] + radius * (vecs[1][0] * c + vecs[1][1] * s),
            ]
        })
        .collect();
    Ok(Ellipse {
        center,
        boundary,
        level,
        quantile,
        covariance: [[sub[(0, 0)], sub[(0, 1)]], [sub[(1, 0)], sub[(1, 1)]]],
    })
}

fn labels_nested<T: Scalar>(reduced: &FittedModel<T>, full: &FittedModel<T>) -> bool {
    reduced.x_labels.iter().all(|l| full.x_labels.contains(l))
        && reduced.z_labels.iter().all(|l| full.z_labels.contains(l))
        && reduced.n == full.n
}

/// Likelihood ratio test `2(ℓ_full - ℓ_reduced)` for nested, converged fits.
pub fn likelihood_ratio_test<T: Scalar>(full: &FittedModel<T>, reduced: &FittedModel<T>) -> Result<TestResult<T>> {
    if !full.converged || !reduced.converged {
        return Err(MprError::NotConverged);
    }
    if !labels_nested(reduced, full) || reduced.n_params() > full.n_params() {
        return Err(MprError::NotNested);
    }
    lrt_from_logliks(full.loglik, reduced.loglik, full.n_params() - reduced.n_params())
}

/// Likelihood ratio test from the two maximised log-likelihoods.
pub fn lrt_from_logliks<T: Scalar>(loglik_full: T, loglik_reduced: T, df: usize) -> Result<TestResult<T>> {
    let mut stat = T::lit(2.0) * (loglik_full - loglik_reduced);
    if stat < T::zero() {
        if stat < -T::lit(LRT_TOLERANCE) {
            return Err(MprError::NegativeLrStatistic(stat.as_f64()));
        }
        log::warn!("likelihood ratio statistic {stat} clamped to zero");
        stat = T::zero();
    }
    TestResult::chi_square(stat, df, TestKind::LikelihoodRatio)
}

/// `(AIC, BIC) = (-2ℓ + 2k, -2ℓ + k log n)`.
pub fn information_criteria<T: Scalar>(loglik: T, k: usize, n: usize) -> Result<(T, T)> {
    if k == 0 || n == 0 {
        return Err(MprError::InvalidArgument(
            "information criteria need k >= 1 and n >= 1".into(),
        ));
    }
    let m2ll = T::lit(-2.0) * loglik;
    let k = T::from_count(k);
    Ok((m2ll + T::lit(2.0) * k, m2ll + k * T::from_count(n).ln()))
}

/// Covariance block for the given flattened indices.
pub fn covariance_block<T: Scalar>(fit: &FittedModel<T>, idx: &[usize]) -> Matrix<T> {
    fit.covariance.select(idx, idx)
}
