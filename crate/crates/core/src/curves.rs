//! Time-dependent hazard ratios, crossing times and the Kaplan-Meier estimator.

use crate::data::{encode_with_labels, Component, Dataset};
use crate::error::{MprError, Result};
use crate::inference::{effect_indices, EffectKey};
use crate::linalg::{dot, quadratic_form};
use crate::model::{CovariateProfile, FittedModel};
use crate::scalar::Scalar;
use crate::special::normal_two_sided_critical;
use serde::Serialize;

pub const DEFAULT_GRID_POINTS: usize = 100;

/// `HR(t) = exp(β_c + α_c) · t^(exp(z̃ᵀα)(exp(α_c) - 1))`.
pub fn hazard_ratio_at<T: Scalar>(beta_c: T, alpha_c: T, z_tilde_alpha: T, t: T) -> T {
    log_hazard_ratio_at(beta_c, alpha_c, z_tilde_alpha, t).exp()
}

fn log_hazard_ratio_at<T: Scalar>(beta_c: T, alpha_c: T, z_tilde_alpha: T, t: T) -> T {
    let slope = z_tilde_alpha.exp() * (alpha_c.exp() - T::one());
    if slope == T::zero() {
        return beta_c + alpha_c;
    }
    beta_c + alpha_c + slope * t.ln()
}

/// Time at which the hazard ratio crosses one; `None` when `α_c = 0`.
pub fn crossing_time_from<T: Scalar>(beta_c: T, alpha_c: T, z_tilde_alpha: T) -> Option<T> {
    if alpha_c == T::zero() {
        return None;
    }
    let denom = z_tilde_alpha.exp() * (T::one() - alpha_c.exp());
    let tc = ((beta_c + alpha_c) / denom).exp();
    (tc.is_finite() && tc > T::zero()).then_some(tc)
}

/// How the other shape covariates `z̃` were fixed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ZTildePolicy {
    Profile(CovariateProfile),
    EmpiricalAverage { rows: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HazardRatioCurve<T> {
    pub effect: EffectKey,
    pub times: Vec<T>,
    pub hr: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub level: T,
    pub z_tilde_policy: ZTildePolicy,
    pub crossing_time: Option<T>,
}

impl<T: Scalar> HazardRatioCurve<T> {
    /// Tidy `time,estimate,lower,upper` CSV.
    pub fn to_csv(&self) -> String {
        tidy_csv(&self.times, &self.hr, &self.lower, &self.upper)
    }
}

pub fn tidy_csv<T: Scalar>(times: &[T], est: &[T], lower: &[T], upper: &[T]) -> String {
    let mut s = String::from("time,estimate,lower,upper\n");
    for i in 0..times.len() {
        s.push_str(&format!("{},{},{},{}\n", times[i], est[i], lower[i], upper[i]));
    }
    s
}

/// Location of the effect's coefficients in the flattened parameter vector.
struct EffectSlots {
    beta: usize,
    alpha: Option<usize>,
    /// Shape columns belonging to the covariate (zeroed in `z̃`).
    shape_cols: Vec<usize>,
}

fn effect_slots<T: Scalar>(fit: &FittedModel<T>, effect: &EffectKey) -> Result<EffectSlots> {
    let scale = effect_indices(fit, Component::Scale, effect);
    let beta = match scale.as_slice() {
        [] => return Err(MprError::NotInScale(effect.to_string())),
        [j] => *j,
        _ => return Err(MprError::NotScalarEffect(effect.to_string())),
    };
    let shape = effect_indices(fit, Component::Shape, effect);
    let alpha = match shape.as_slice() {
        [] => None,
        [j] => Some(*j),
        _ => return Err(MprError::NotScalarEffect(effect.to_string())),
    };
    let kx = fit.x_labels.len();
    let shape_cols = fit
        .term_indices(Component::Shape, &effect.covariate)
        .into_iter()
        .map(|j| j - kx)
        .collect();
    Ok(EffectSlots {
        beta,
        alpha,
        shape_cols,
    })
}

fn z_tilde_row<T: Scalar>(mut z_row: Vec<T>, slots: &EffectSlots) -> Vec<T> {
    for &j in &slots.shape_cols {
        z_row[j] = T::zero();
    }
    z_row
}

/// Log hazard ratio and its gradient with respect to the flattened θ.
fn log_hr_with_gradient<T: Scalar>(
    fit: &FittedModel<T>,
    slots: &EffectSlots,
    z_tilde: &[T],
    t: T,
) -> (T, Vec<T>) {
    let theta = fit.theta.to_vec();
    let kx = fit.x_labels.len();
    let beta_c = theta[slots.beta];
    let alpha_c = slots.alpha.map_or(T::zero(), |j| theta[j]);
    let zta = dot(z_tilde, &fit.theta.alpha);
    let log_t = t.ln();
    let e_z = zta.exp();
    let value = log_hazard_ratio_at(beta_c, alpha_c, zta, t);
    let mut grad = vec![T::zero(); theta.len()];
    grad[slots.beta] = T::one();
    let slope = e_z * (alpha_c.exp() - T::one());
    if slope != T::zero() {
        for (j, &zj) in z_tilde.iter().enumerate() {
            grad[kx + j] = zj * slope * log_t;
        }
    }
    if let Some(j) = slots.alpha {
        grad[j] = T::one() + e_z * alpha_c.exp() * log_t;
    }
    (value, grad)
}

fn check_times<T: Scalar>(times: &[T]) -> Result<()> {
    if times.is_empty() || times.iter().any(|&t| !(t > T::zero())) {
        return Err(MprError::InvalidArgument("time grid must be non-empty and positive".into()));
    }
    Ok(())
}

/// Hazard ratio of a binary/dummy effect at a fixed shape profile, with a
/// delta-method band computed on the log scale.
pub fn hazard_ratio<T: Scalar>(
    fit: &FittedModel<T>,
    effect: &EffectKey,
    profile: &CovariateProfile,
    times: &[T],
    level: T,
) -> Result<HazardRatioCurve<T>> {
    check_times(times)?;
    let slots = effect_slots(fit, effect)?;
    let (_, z_row) = fit.rows_for_profile(profile)?;
    let z_tilde = z_tilde_row(z_row, &slots);
    let crit = normal_two_sided_critical(level)?;
    let mut curve = HazardRatioCurve {
        effect: effect.clone(),
        times: times.to_vec(),
        hr: Vec::with_capacity(times.len()),
        lower: Vec::with_capacity(times.len()),
        upper: Vec::with_capacity(times.len()),
        level,
        z_tilde_policy: ZTildePolicy::Profile(profile.clone()),
        crossing_time: None,
    };
    for &t in times {
        let (g, grad) = log_hr_with_gradient(fit, &slots, &z_tilde, t);
        let se = quadratic_form(&fit.covariance, &grad).max(T::zero()).sqrt();
        curve.hr.push(g.exp());
        curve.lower.push((g - crit * se).exp());
        curve.upper.push((g + crit * se).exp());
    }
    let theta = fit.theta.to_vec();
    curve.crossing_time = crossing_time_from(
        theta[slots.beta],
        slots.alpha.map_or(T::zero(), |j| theta[j]),
        dot(&z_tilde, &fit.theta.alpha),
    );
    Ok(curve)
}

/// Crossing time of the effect's hazard ratio at a shape profile.
pub fn crossing_time<T: Scalar>(fit: &FittedModel<T>, effect: &EffectKey, profile: &CovariateProfile) -> Result<Option<T>> {
    let slots = effect_slots(fit, effect)?;
    let (_, z_row) = fit.rows_for_profile(profile)?;
    let z_tilde = z_tilde_row(z_row, &slots);
    let theta = fit.theta.to_vec();
    Ok(crossing_time_from(
        theta[slots.beta],
        slots.alpha.map_or(T::zero(), |j| theta[j]),
        dot(&z_tilde, &fit.theta.alpha),
    ))
}

/// Hazard ratio averaged pointwise over the empirical distribution of `z̃`
/// in `ds`; the band applies the delta method to the log of the average.
pub fn hazard_ratio_averaged<T: Scalar>(
    fit: &FittedModel<T>,
    effect: &EffectKey,
    ds: &Dataset,
    times: &[T],
    level: T,
) -> Result<HazardRatioCurve<T>> {
    check_times(times)?;
    if ds.n() == 0 {
        return Err(MprError::EmptyData);
    }
    let slots = effect_slots(fit, effect)?;
    let z = encode_with_labels::<T>(ds, &fit.z_labels)?;
    let rows: Vec<Vec<T>> = (0..z.nrows())
        .map(|i| z_tilde_row(z.row(i).to_vec(), &slots))
        .collect();
    let crit = normal_two_sided_critical(level)?;
    let n = T::from_count(rows.len());
    let mut curve = HazardRatioCurve {
        effect: effect.clone(),
        times: times.to_vec(),
        hr: Vec::with_capacity(times.len()),
        lower: Vec::with_capacity(times.len()),
        upper: Vec::with_capacity(times.len()),
        level,
        z_tilde_policy: ZTildePolicy::EmpiricalAverage { rows: rows.len() },
        crossing_time: None,
    };
    let k = fit.theta.len();
    for &t in times {
        let mut mean = T::zero();
        let mut grad_sum = vec![T::zero(); k];
        for row in &rows {
            let (g, grad) = log_hr_with_gradient(fit, &slots, row, t);
            let hr = g.exp();
            mean = mean + hr;
            for (acc, gj) in grad_sum.iter_mut().zip(grad) {
                *acc = *acc + hr * gj;
            }
        }
        mean = mean / n;
        // ∇ log(mean) = Σ hrᵢ ∇gᵢ / (n · mean)
        let grad: Vec<T> = grad_sum.into_iter().map(|v| v / (n * mean)).collect();
        let se = quadratic_form(&fit.covariance, &grad).max(T::zero()).sqrt();
        let g = mean.ln();
        curve.hr.push(mean);
        curve.lower.push((g - crit * se).exp());
        curve.upper.push((g + crit * se).exp());
    }
    Ok(curve)
}

/// Evenly spaced grid from the earliest to the latest event time.
pub fn default_time_grid(ds: &Dataset, points: usize) -> Vec<f64> {
    let events = ds
        .time()
        .iter()
        .zip(ds.status())
        .filter(|(_, &s)| s)
        .map(|(&t, _)| t);
    let (lo, hi) = events.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
    if points <= 1 || lo == hi {
        return vec![lo];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KMCurve<T> {
    /// Distinct event times, ascending.
    pub event_times: Vec<T>,
    pub survival: Vec<T>,
    pub at_risk: Vec<usize>,
    pub n_events: Vec<usize>,
}

impl<T: Scalar> KMCurve<T> {
    /// Step-function value `Ŝ(t)`.
    pub fn survival_at(&self, t: T) -> T {
        let k = self.event_times.partition_point(|&e| e <= t);
        if k == 0 {
            T::one()
        } else {
            self.survival[k - 1]
        }
    }

    /// `time,survival,at_risk,events` CSV, starting from `(0, 1)`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("time,survival,at_risk,events\n");
        let n0 = self.at_risk.first().copied().unwrap_or(0);
        s.push_str(&format!("0,1,{n0},0\n"));
        for i in 0..self.event_times.len() {
            s.push_str(&format!(
                "{},{},{},{}\n",
                self.event_times[i], self.survival[i], self.at_risk[i], self.n_events[i]
            ));
        }
        s
    }
}

/// Product-limit estimator. At tied times, events are counted before
/// censorings, so subjects censored at `t` are still at risk at `t`.
pub fn kaplan_meier<T: Scalar>(time: &[T], status: &[bool]) -> Result<KMCurve<T>> {
    if time.is_empty() {
        return Err(MprError::EmptyData);
    }
    if time.len() != status.len() {
        return Err(MprError::Dimension("time and status lengths differ".into()));
    }
    if time.iter().any(|&t| !(t > T::zero())) {
        return Err(MprError::InvalidArgument("times must be positive".into()));
    }
    let mut order: Vec<usize> = (0..time.len()).collect();
    order.sort_by(|&a, &b| time[a].partial_cmp(&time[b]).expect("finite times"));
    let mut curve = KMCurve {
        event_times: Vec::new(),
        survival: Vec::new(),
        at_risk: Vec::new(),
        n_events: Vec::new(),
    };
    let mut s = T::one();
    let mut at_risk = time.len();
    let mut i = 0;
    while i < order.len() {
        let t = time[order[i]];
        let mut j = i;
        let mut deaths = 0;
        while j < order.len() && time[order[j]] == t {
            deaths += usize::from(status[order[j]]);
            j += 1;
        }
        if deaths > 0 {
            s = s * (T::one() - T::from_count(deaths) / T::from_count(at_risk));
            curve.event_times.push(t);
            curve.survival.push(s);
            curve.at_risk.push(at_risk);
            curve.n_events.push(deaths);
        }
        at_risk -= j - i;
        i = j;
    }
    Ok(curve)
}
