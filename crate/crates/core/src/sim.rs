//! Simulation from the Weibull MPR model: event times, calibrated
//! exponential censoring, and the coefficient-correlation and
//! selection-frequency studies.

use crate::data::{Column, Dataset, ModelSpec};
use crate::error::{MprError, Result};
use crate::linalg::{dot, Matrix};
use crate::model::FitOptions;
use crate::selection::{fit_spec, step_mpr, CandidateSet, Criterion, SelectionOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Draws used to calibrate the censoring rate.
pub const PILOT_DRAWS: usize = 100_000;
/// Largest censoring proportion accepted by the calibration.
pub const MAX_CENSORING: f64 = 0.95;
/// Fraction of failed replicates above which a study aborts.
pub const MAX_FAILURE_FRACTION: f64 = 0.05;

const PILOT_STREAM: u64 = u64::MAX;
const VALIDATION_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CovariateLaw {
    /// Independent Bernoulli(`p`) binaries.
    Bernoulli { p: f64 },
}

impl Default for CovariateLaw {
    fn default() -> Self {
        CovariateLaw::Bernoulli { p: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimDesign {
    /// Scale coefficients, intercept first.
    pub beta_true: Vec<f64>,
    /// Shape coefficients, intercept first.
    pub alpha_true: Vec<f64>,
    #[serde(default)]
    pub covariate_law: CovariateLaw,
    pub n: usize,
    pub target_censoring: f64,
    pub replicates: usize,
    pub seed: u64,
}

pub const SELECTION_BETA: [f64; 11] = [-1.5, -1.0, 1.0, 0.5, -0.5, 0.0, 0.0, -0.8, 0.5, 0.0, 0.0];
pub const SELECTION_ALPHA: [f64; 11] = [0.5, 0.4, -0.4, 0.2, -0.2, 0.4, -0.2, 0.0, 0.0, 0.0, 0.0];
pub const CORRELATION_BETA: [f64; 3] = [-3.0, -0.2, -2.3];
pub const CORRELATION_ALPHA: [f64; 3] = [-0.2, 0.1, 0.5];

/// The nine `(n, censoring)` scenarios of the selection-frequency study.
pub const SELECTION_SCENARIOS: [(usize, f64); 9] = [
    (100, 0.8),
    (100, 0.5),
    (100, 0.2),
    (500, 0.8),
    (500, 0.5),
    (500, 0.2),
    (1000, 0.8),
    (1000, 0.5),
    (1000, 0.2),
];

impl SimDesign {
    /// Ten binary covariates: four in both components, two shape-only,
    /// two scale-only and two without effect.
    pub fn selection_study(n: usize, target_censoring: f64, replicates: usize, seed: u64) -> Self {
        Self {
            beta_true: SELECTION_BETA.to_vec(),
            alpha_true: SELECTION_ALPHA.to_vec(),
            covariate_law: CovariateLaw::default(),
            n,
            target_censoring,
            replicates,
            seed,
        }
    }

    /// Two binary covariates, n = 1000.
    pub fn correlation_study(target_censoring: f64, replicates: usize, seed: u64) -> Self {
        Self {
            beta_true: CORRELATION_BETA.to_vec(),
            alpha_true: CORRELATION_ALPHA.to_vec(),
            covariate_law: CovariateLaw::default(),
            n: 1000,
            target_censoring,
            replicates,
            seed,
        }
    }

    pub fn n_covariates(&self) -> usize {
        self.beta_true.len().saturating_sub(1)
    }

    pub fn covariate_names(&self) -> Vec<String> {
        (1..=self.n_covariates()).map(|k| format!("x{k}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta_true.is_empty() || self.beta_true.len() != self.alpha_true.len() {
            return Err(MprError::InvalidArgument(
                "beta_true and alpha_true need equal, non-zero lengths".into(),
            ));
        }
        if self.beta_true.iter().chain(&self.alpha_true).any(|v| !v.is_finite()) {
            return Err(MprError::InvalidArgument("non-finite true coefficient".into()));
        }
        if self.n == 0 {
            return Err(MprError::InvalidArgument("n must be positive".into()));
        }
        if !(0.0..=MAX_CENSORING).contains(&self.target_censoring) {
            return Err(MprError::InvalidArgument(format!(
                "target censoring {} outside [0, {}]",
                self.target_censoring, MAX_CENSORING
            )));
        }
        let CovariateLaw::Bernoulli { p } = self.covariate_law;
        if !(0.0..=1.0).contains(&p) {
            return Err(MprError::InvalidArgument(format!("Bernoulli p = {p}")));
        }
        Ok(())
    }
}

/// Independent random stream for `(seed, stream)`; replicate `j` uses stream `j`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.gen();
        if u > 0.0 {
            return u;
        }
    }
}

/// Inverse-transform draw: `S(T) = U` gives `T = (-log U / λ)^(1/γ)`.
pub fn event_time_from_uniform(lambda: f64, gamma: f64, u: f64) -> f64 {
    (-u.ln() / lambda).powf(1.0 / gamma)
}

/// Event times for design rows (intercept column included) under the given coefficients.
pub fn generate_event_times<R: Rng>(
    x: &Matrix<f64>,
    z: &Matrix<f64>,
    beta: &[f64],
    alpha: &[f64],
    rng: &mut R,
) -> Result<Vec<f64>> {
    if x.ncols() != beta.len() || z.ncols() != alpha.len() || x.nrows() != z.nrows() {
        return Err(MprError::Dimension("design and coefficients disagree".into()));
    }
    (0..x.nrows())
        .map(|i| {
            let lambda = dot(x.row(i), beta).exp();
            let gamma = dot(z.row(i), alpha).exp();
            loop {
                let t = event_time_from_uniform(lambda, gamma, open_unit(rng));
                if t > 0.0 && t.is_finite() {
                    return Ok(t);
                }
            }
        })
        .collect()
}

/// Covariate draws with a leading intercept column.
fn generate_design<R: Rng>(design: &SimDesign, n: usize, rng: &mut R) -> Matrix<f64> {
    let k = design.n_covariates();
    let CovariateLaw::Bernoulli { p } = design.covariate_law;
    let mut data = Vec::with_capacity(n * (k + 1));
    for _ in 0..n {
        data.push(1.0);
        for _ in 0..k {
            data.push(if rng.gen::<f64>() < p { 1.0 } else { 0.0 });
        }
    }
    Matrix::from_row_major(n, k + 1, data).expect("consistent shape")
}

fn draw_times<R: Rng>(design: &SimDesign, n: usize, rng: &mut R) -> Result<(Matrix<f64>, Vec<f64>)> {
    let x = generate_design(design, n, rng);
    let t = generate_event_times(&x, &x, &design.beta_true, &design.alpha_true, rng)?;
    Ok((x, t))
}

/// Expected censored fraction `E[1 - exp(-r T)]` over a sample of event times.
fn expected_censoring(times: &[f64], rate: f64) -> f64 {
    times.iter().map(|&t| -(-rate * t).exp_m1()).sum::<f64>() / times.len() as f64
}

/// Rate `r` of independent Exp(`r`) censoring reaching the target proportion,
/// found by bisection against a fixed-seed pilot sample.
pub fn calibrate_censoring(design: &SimDesign) -> Result<f64> {
    design.validate()?;
    if design.target_censoring == 0.0 {
        return Ok(0.0);
    }
    let mut rng = stream_rng(design.seed, PILOT_STREAM);
    let (_, times) = draw_times(design, PILOT_DRAWS, &mut rng)?;
    rate_for_target(&times, design.target_censoring)
}

/// Censoring rate hitting `target` in expectation for the given event times.
pub fn rate_for_target(times: &[f64], target: f64) -> Result<f64> {
    let mean_t = times.iter().sum::<f64>() / times.len() as f64;
    let mut lo = 0.0f64;
    let mut hi = 1.0 / mean_t;
    let mut doublings = 0;
    while expected_censoring(times, hi) < target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 2000 || !hi.is_finite() {
            return Err(MprError::UnreachableCensoring(target));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if expected_censoring(times, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Realised censored proportion on a fresh validation sample of `draws` subjects.
pub fn validation_censoring(design: &SimDesign, rate: f64, draws: usize) -> Result<f64> {
    let mut rng = stream_rng(design.seed, VALIDATION_STREAM);
    let (_, times) = draw_times(design, draws, &mut rng)?;
    let censored = times
        .iter()
        .filter(|&&t| rate > 0.0 && -open_unit(&mut rng).ln() / rate < t)
        .count();
    Ok(censored as f64 / draws as f64)
}

/// One simulated dataset: numeric 0/1 columns `x1..xk`, observed time
/// `min(T, C)` and event status `T <= C`.
pub fn simulate_dataset<R: Rng>(design: &SimDesign, rate: f64, rng: &mut R) -> Result<Dataset> {
    let (x, times) = draw_times(design, design.n, rng)?;
    let mut time = Vec::with_capacity(design.n);
    let mut status = Vec::with_capacity(design.n);
    for &t in &times {
        let c = if rate > 0.0 {
            -open_unit(rng).ln() / rate
        } else {
            f64::INFINITY
        };
        if t <= c {
            time.push(t);
            status.push(true);
        } else {
            time.push(c);
            status.push(false);
        }
    }
    let columns = design
        .covariate_names()
        .into_iter()
        .enumerate()
        .map(|(k, name)| (name, Column::Numeric(x.column(k + 1))))
        .collect();
    Dataset::new(time, status, columns)
}

/// Dataset for replicate `j` of `design`.
pub fn simulate_replicate(design: &SimDesign, rate: f64, replicate: usize) -> Result<Dataset> {
    simulate_dataset(design, rate, &mut stream_rng(design.seed, replicate as u64))
}

fn censored_fraction(ds: &Dataset) -> f64 {
    1.0 - ds.n_events() as f64 / ds.n() as f64
}

fn check_failures(dropped: usize, total: usize) -> Result<()> {
    if dropped as f64 > MAX_FAILURE_FRACTION * total as f64 {
        return Err(MprError::TooManyFailures { dropped, total });
    }
    Ok(())
}

/// Pearson correlation matrix of the columns of `rows`.
pub fn correlation_matrix(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = rows.first().map_or(0, Vec::len);
    let n = rows.len() as f64;
    let means: Vec<f64> = (0..k).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let mut cov = vec![vec![0.0; k]; k];
    for r in rows {
        for a in 0..k {
            for b in 0..k {
                cov[a][b] += (r[a] - means[a]) * (r[b] - means[b]);
            }
        }
    }
    (0..k)
        .map(|a| (0..k).map(|b| cov[a][b] / (cov[a][a] * cov[b][b]).sqrt()).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub design: SimDesign,
    pub censoring_rate: f64,
    /// `β₀..β_k, α₀..α_k`
    pub labels: Vec<String>,
    /// One row of estimates per retained replicate, replicate order.
    pub estimates: Vec<Vec<f64>>,
    pub standard_errors: Vec<Vec<f64>>,
    pub replicate_ids: Vec<usize>,
    /// Correlation of all coefficients, intercepts included.
    pub correlation: Vec<Vec<f64>>,
    pub dropped: usize,
    pub mean_censoring: f64,
}

impl CorrelationReport {
    fn covariate_positions(&self) -> Vec<usize> {
        let k = self.design.n_covariates();
        (1..=k).chain(k + 2..=2 * k + 1).collect()
    }

    /// Labels of the coefficients reported without intercepts.
    pub fn covariate_labels(&self) -> Vec<String> {
        self.covariate_positions().iter().map(|&j| self.labels[j].clone()).collect()
    }

    /// Correlation matrix without the intercepts: `β₁..β_k, α₁..α_k`.
    pub fn covariate_correlation(&self) -> Vec<Vec<f64>> {
        let pos = self.covariate_positions();
        pos.iter()
            .map(|&a| pos.iter().map(|&b| self.correlation[a][b]).collect())
            .collect()
    }

    pub fn mean_estimates(&self) -> Vec<f64> {
        column_means(&self.estimates)
    }

    pub fn mean_standard_errors(&self) -> Vec<f64> {
        column_means(&self.standard_errors)
    }

    /// Empirical standard deviation of each coefficient across replicates.
    pub fn empirical_sd(&self) -> Vec<f64> {
        let means = self.mean_estimates();
        let n = self.estimates.len() as f64;
        (0..means.len())
            .map(|j| {
                (self.estimates.iter().map(|r| (r[j] - means[j]).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            })
            .collect()
    }

    /// Correlation matrix (intercepts excluded) as CSV with a label column.
    pub fn to_csv(&self) -> String {
        let labels = self.covariate_labels();
        let mut s = format!("coefficient,{}\n", labels.join(","));
        for (l, row) in labels.iter().zip(self.covariate_correlation()) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "{l},{}", cells.join(","));
        }
        s
    }
}

fn column_means(rows: &[Vec<f64>]) -> Vec<f64> {
    let k = rows.first().map_or(0, Vec::len);
    let n = rows.len() as f64;
    (0..k).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect()
}

/// Fits the full model (every covariate in both components) to each
/// replicate and summarises the estimates' correlation.
pub fn run_correlation_study(design: &SimDesign) -> Result<CorrelationReport> {
    design.validate()?;
    let rate = calibrate_censoring(design)?;
    let names = design.covariate_names();
    let spec = ModelSpec::new(names.clone(), names.clone());
    let options = FitOptions::default();
    let outcomes: Vec<(usize, Option<(Vec<f64>, Vec<f64>)>, f64)> = (0..design.replicates)
        .into_par_iter()
        .map(|j| -> Result<_> {
            let ds = simulate_replicate(design, rate, j)?;
            let cens = censored_fraction(&ds);
            match fit_spec(&ds, &spec, None, &options) {
                Ok(f) => Ok((j, Some((f.theta.to_vec(), f.std_errors())), cens)),
                Err(e) => {
                    log::warn!("replicate {j} dropped: {e}");
                    Ok((j, None, cens))
                }
            }
        })
        .collect::<Result<_>>()?;
    let dropped = outcomes.iter().filter(|o| o.1.is_none()).count();
    check_failures(dropped, design.replicates)?;
    let mean_censoring = outcomes.iter().map(|o| o.2).sum::<f64>() / outcomes.len().max(1) as f64;
    let mut estimates = Vec::new();
    let mut standard_errors = Vec::new();
    let mut replicate_ids = Vec::new();
    for (j, res, _) in outcomes {
        if let Some((est, se)) = res {
            estimates.push(est);
            standard_errors.push(se);
            replicate_ids.push(j);
        }
    }
    let k = design.n_covariates();
    let labels = (0..=k)
        .map(|j| format!("beta{j}"))
        .chain((0..=k).map(|j| format!("alpha{j}")))
        .collect();
    Ok(CorrelationReport {
        design: design.clone(),
        censoring_rate: rate,
        labels,
        correlation: correlation_matrix(&estimates),
        estimates,
        standard_errors,
        replicate_ids,
        dropped,
        mean_censoring,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencyReport {
    pub design: SimDesign,
    pub criterion: Criterion,
    pub censoring_rate: f64,
    pub covariates: Vec<String>,
    /// `π̂(x_k ∈ x)`
    pub scale_frequency: Vec<f64>,
    /// `π̂(x_k ∈ z)`
    pub shape_frequency: Vec<f64>,
    pub replicates_used: usize,
    pub dropped: usize,
    /// `(seed, stream)` per replicate for exact reruns.
    pub replicate_streams: Vec<(u64, u64)>,
    pub mean_censoring: f64,
    /// Per-replicate selected sets, replicate order.
    pub selections: Vec<(Vec<String>, Vec<String>)>,
}

impl FrequencyReport {
    pub fn frequency(&self, covariate: &str) -> Option<(f64, f64)> {
        let j = self.covariates.iter().position(|c| c == covariate)?;
        Some((self.scale_frequency[j], self.shape_frequency[j]))
    }

    /// One row per covariate.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,target_censoring,criterion,covariate,scale_frequency,shape_frequency\n");
        let crit = match self.criterion {
            Criterion::Aic => "aic".to_string(),
            Criterion::Bic => "bic".to_string(),
            Criterion::Lrt { alpha } => format!("lrt{alpha}"),
        };
        for (j, c) in self.covariates.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                self.design.n,
                self.design.target_censoring,
                crit,
                c,
                self.scale_frequency[j],
                self.shape_frequency[j]
            );
        }
        s
    }
}

/// Selection frequencies from stagewise selection starting at the null model.
pub fn run_selection_study(design: &SimDesign, criterion: Criterion) -> Result<FrequencyReport> {
    run_selection_study_with(design, criterion, &SelectionOptions::default())
}

pub fn run_selection_study_with(
    design: &SimDesign,
    criterion: Criterion,
    options: &SelectionOptions,
) -> Result<FrequencyReport> {
    design.validate()?;
    let rate = calibrate_censoring(design)?;
    let names = design.covariate_names();
    let candidates = CandidateSet::new(names.clone())?;
    let outcomes: Vec<(Option<(Vec<String>, Vec<String>)>, f64)> = (0..design.replicates)
        .into_par_iter()
        .map(|j| -> Result<_> {
            let ds = simulate_replicate(design, rate, j)?;
            let cens = censored_fraction(&ds);
            match step_mpr(&ds, &candidates, criterion, options) {
                Ok(trace) => Ok((
                    Some((trace.final_spec.scale_terms, trace.final_spec.shape_terms)),
                    cens,
                )),
                Err(e) => {
                    log::warn!("replicate {j} dropped: {e}");
                    Ok((None, cens))
                }
            }
        })
        .collect::<Result<_>>()?;
    let dropped = outcomes.iter().filter(|o| o.0.is_none()).count();
    check_failures(dropped, design.replicates)?;
    let selections: Vec<(Vec<String>, Vec<String>)> = outcomes.iter().filter_map(|o| o.0.clone()).collect();
    let used = selections.len();
    let freq = |pick: &dyn Fn(&(Vec<String>, Vec<String>)) -> &Vec<String>| -> Vec<f64> {
        names
            .iter()
            .map(|c| selections.iter().filter(|s| pick(s).contains(c)).count() as f64 / used.max(1) as f64)
            .collect()
    };
    let scale_frequency = freq(&|s| &s.0);
    let shape_frequency = freq(&|s| &s.1);
    Ok(FrequencyReport {
        design: design.clone(),
        criterion,
        censoring_rate: rate,
        covariates: names,
        scale_frequency,
        shape_frequency,
        replicates_used: used,
        dropped,
        replicate_streams: (0..design.replicates as u64).map(|j| (design.seed, j)).collect(),
        mean_censoring: outcomes.iter().map(|o| o.1).sum::<f64>() / outcomes.len().max(1) as f64,
        selections,
    })
}

/// A synthetic cohort shaped like a registry lung-cancer dataset: 855
/// subjects, nine categorical covariates (several with a `Missing` level)
/// and about 21% right-censoring. Times are in months.
pub fn synthetic_lung_dataset(seed: u64) -> Result<Dataset> {
    struct Factor {
        name: &'static str,
        levels: &'static [&'static str],
        probs: &'static [f64],
        missing: f64,
        scale: &'static [f64],
        shape: &'static [f64],
    }
    const FACTORS: [Factor; 9] = [
        Factor {
            name: "treatment",
            levels: &["Palliative", "Surgery", "Chemo", "Radio", "C+R"],
            probs: &[0.42, 0.10, 0.09, 0.28, 0.11],
            missing: 0.0,
            scale: &[0.0, -3.91, -0.50, -1.26, -4.06],
            shape: &[0.0, 0.59, 0.07, 0.34, 0.97],
        },
        Factor {
            name: "age_group",
            levels: &["<65", "65-74", "75+"],
            probs: &[0.35, 0.38, 0.27],
            missing: 0.0,
            scale: &[0.0, 0.05, 0.15],
            shape: &[0.0, 0.0, -0.05],
        },
        Factor {
            name: "who_status",
            levels: &["0-1", "2", "3-4"],
            probs: &[0.45, 0.30, 0.25],
            missing: 0.06,
            scale: &[0.0, 0.45, 0.95],
            shape: &[0.0, 0.0, 0.0],
        },
        Factor {
            name: "sex",
            levels: &["Male", "Female"],
            probs: &[0.62, 0.38],
            missing: 0.0,
            scale: &[0.0, -0.03],
            shape: &[0.0, 0.0],
        },
        Factor {
            name: "smoker",
            levels: &["Current", "Ex", "Never"],
            probs: &[0.50, 0.38, 0.12],
            missing: 0.05,
            scale: &[0.0, -0.10, -0.20],
            shape: &[0.0, 0.05, 0.10],
        },
        Factor {
            name: "cell_type",
            levels: &["NonSmall", "Small", "Other"],
            probs: &[0.60, 0.22, 0.18],
            missing: 0.08,
            scale: &[0.0, 0.30, 0.15],
            shape: &[0.0, 0.0, 0.0],
        },
        Factor {
            name: "metastases",
            levels: &["No", "Yes"],
            probs: &[0.55, 0.45],
            missing: 0.07,
            scale: &[0.0, 0.65],
            shape: &[0.0, -0.12],
        },
        Factor {
            name: "sodium",
            levels: &["Normal", "Low"],
            probs: &[0.80, 0.20],
            missing: 0.10,
            scale: &[0.0, 0.35],
            shape: &[0.0, 0.0],
        },
        Factor {
            name: "albumen",
            levels: &["Normal", "Low"],
            probs: &[0.75, 0.25],
            missing: 0.10,
            scale: &[0.0, 0.45],
            shape: &[0.0, -0.08],
        },
    ];
    const N: usize = 855;
    const TARGET_CENSORING: f64 = 0.213;
    let mut rng = stream_rng(seed, 0);
    let mut codes: Vec<Vec<usize>> = vec![Vec::with_capacity(N); FACTORS.len()];
    let mut times = Vec::with_capacity(N);
    for _ in 0..N {
        let mut eta_scale = -1.28;
        let mut eta_shape = -0.19;
        for (f, factor) in FACTORS.iter().enumerate() {
            let code = if factor.missing > 0.0 && rng.gen::<f64>() < factor.missing {
                factor.levels.len()
            } else {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut pick = factor.levels.len() - 1;
                for (l, &p) in factor.probs.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        pick = l;
                        break;
                    }
                }
                pick
            };
            if code < factor.levels.len() {
                eta_scale += factor.scale[code];
                eta_shape += factor.shape[code];
            }
            codes[f].push(code);
        }
        times.push(event_time_from_uniform(eta_scale.exp(), f64::exp(eta_shape), open_unit(&mut rng)));
    }
    let rate = rate_for_target(&times, TARGET_CENSORING)?;
    let mut time = Vec::with_capacity(N);
    let mut status = Vec::with_capacity(N);
    for &t in &times {
        let c = -open_unit(&mut rng).ln() / rate;
        let obs = t.min(c);
        // record to 0.01 months, never zero
        time.push(((obs * 100.0).ceil() / 100.0).max(0.01));
        status.push(t <= c);
    }
    let columns = FACTORS
        .iter()
        .zip(codes)
        .map(|(factor, codes)| {
            let mut levels: Vec<String> = factor.levels.iter().map(|s| s.to_string()).collect();
            if factor.missing > 0.0 {
                levels.push(crate::data::MISSING_LEVEL.to_string());
            }
            (factor.name.to_string(), Column::Categorical { levels, codes })
        })
        .collect();
    Dataset::new(time, status, columns)
}
