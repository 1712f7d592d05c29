//! Stagewise variable selection over the scale/shape model lattice.
//!
//! Each iteration fits every legal single move from the current model
//! (add or drop a covariate in the scale, the shape, or both at once) and
//! accepts the best one that improves the criterion. Factors enter and
//! leave as whole dummy blocks.

use crate::data::{encode_design, Dataset, ModelSpec};
use crate::error::{MprError, Result};
use crate::inference::{likelihood_ratio_test, TestResult};
use crate::model::{fit, FitOptions, FittedModel, Theta};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt::{self, Write as _};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Bic,
    /// Nested likelihood ratio tests at the given significance level.
    Lrt { alpha: f64 },
}

impl Criterion {
    pub const DEFAULT_LRT_ALPHA: f64 = 0.05;

    /// Value reported in traces: AIC, BIC, or the deviance `-2ℓ` for LRT.
    pub fn value(&self, f: &FittedModel<f64>) -> f64 {
        match self {
            Criterion::Aic => f.aic(),
            Criterion::Bic => f.bic(),
            Criterion::Lrt { .. } => -2.0 * f.loglik,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Criterion::Aic => f.write_str("AIC"),
            Criterion::Bic => f.write_str("BIC"),
            Criterion::Lrt { alpha } => write!(f, "LRT(alpha = {alpha})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Directions {
    ForwardOnly,
    Stagewise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// Component(s) a move acts on; ordering is the tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveComponent {
    Scale,
    Shape,
    Both,
}

impl fmt::Display for MoveComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            MoveComponent::Scale => "scale",
            MoveComponent::Shape => "shape",
            MoveComponent::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Move {
    pub direction: Direction,
    pub component: MoveComponent,
    pub covariate: String,
}

/// Covariates eligible for selection, in tie-break order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateSet {
    pub covariates: Vec<String>,
}

impl CandidateSet {
    pub fn new<S: Into<String>>(covariates: impl IntoIterator<Item = S>) -> Result<Self> {
        let covariates: Vec<String> = covariates.into_iter().map(Into::into).collect();
        if covariates.is_empty() {
            return Err(MprError::InvalidArgument("candidate set is empty".into()));
        }
        for (i, c) in covariates.iter().enumerate() {
            if covariates[..i].contains(c) {
                return Err(MprError::DuplicateColumn(c.clone()));
            }
        }
        Ok(Self { covariates })
    }

    pub fn len(&self) -> usize {
        self.covariates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covariates.is_empty()
    }

    /// Hard bound on accepted steps.
    pub fn iteration_bound(&self) -> usize {
        2 * self.len() * 3
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        for c in &self.covariates {
            if ds.column(c).is_none() {
                return Err(MprError::UnknownTerm(c.clone()));
            }
        }
        Ok(())
    }
}

/// All single moves legal from `spec`, in tie-break order.
pub fn legal_moves(spec: &ModelSpec, candidates: &CandidateSet, directions: Directions, scale_only: bool) -> Vec<Move> {
    let mut moves = Vec::new();
    for c in &candidates.covariates {
        let in_x = spec.scale_terms.contains(c);
        let in_z = spec.shape_terms.contains(c);
        for component in [MoveComponent::Scale, MoveComponent::Shape, MoveComponent::Both] {
            if scale_only && component != MoveComponent::Scale {
                continue;
            }
            let (fwd, bwd) = match component {
                MoveComponent::Scale => (!in_x, in_x),
                MoveComponent::Shape => (!in_z, in_z),
                MoveComponent::Both => (!in_x && !in_z, in_x && in_z),
            };
            if fwd {
                moves.push(Move {
                    direction: Direction::Forward,
                    component,
                    covariate: c.clone(),
                });
            }
            if bwd && directions == Directions::Stagewise {
                moves.push(Move {
                    direction: Direction::Backward,
                    component,
                    covariate: c.clone(),
                });
            }
        }
    }
    moves
}

/// Keeps non-candidate terms first, then candidates in candidate order.
fn canonical(terms: Vec<String>, candidates: &CandidateSet) -> Vec<String> {
    let mut out: Vec<String> = terms
        .iter()
        .filter(|t| !candidates.covariates.contains(t))
        .cloned()
        .collect();
    out.extend(
        candidates
            .covariates
            .iter()
            .filter(|c| terms.contains(c))
            .cloned(),
    );
    out
}

/// Model specification after applying `mv` to `spec`.
pub fn apply_move(spec: &ModelSpec, mv: &Move, candidates: &CandidateSet) -> ModelSpec {
    let mut next = spec.clone();
    let edit = |terms: &mut Vec<String>| match mv.direction {
        Direction::Forward => {
            if !terms.contains(&mv.covariate) {
                terms.push(mv.covariate.clone());
            }
        }
        Direction::Backward => terms.retain(|t| t != &mv.covariate),
    };
    if mv.component != MoveComponent::Shape {
        edit(&mut next.scale_terms);
    }
    if mv.component != MoveComponent::Scale {
        edit(&mut next.shape_terms);
    }
    next.scale_terms = canonical(next.scale_terms, candidates);
    next.shape_terms = canonical(next.shape_terms, candidates);
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Better,
    NotBetter,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub verdict: Verdict,
    /// Positive when the candidate improves: criterion decrease for AIC/BIC,
    /// distance of the p-value from the level for LRT.
    pub margin: f64,
    pub test: Option<TestResult<f64>>,
}

/// Whether `candidate` improves on `current`. Information criteria need a
/// strict decrease. For LRT a larger candidate must be significant and a
/// smaller one must not lose a significant effect.
pub fn compare_models(current: &FittedModel<f64>, candidate: &FittedModel<f64>, criterion: Criterion) -> Result<Comparison> {
    if !current.converged || !candidate.converged {
        return Err(MprError::NotConverged);
    }
    let (margin, test) = match criterion {
        Criterion::Aic | Criterion::Bic => (criterion.value(current) - criterion.value(candidate), None),
        Criterion::Lrt { alpha } => {
            if candidate.n_params() > current.n_params() {
                let t = likelihood_ratio_test(candidate, current)?;
                (alpha - t.p_value, Some(t))
            } else if candidate.n_params() < current.n_params() {
                let t = likelihood_ratio_test(current, candidate)?;
                (t.p_value - alpha, Some(t))
            } else {
                return Err(MprError::NotNested);
            }
        }
    };
    Ok(Comparison {
        verdict: if margin > 0.0 {
            Verdict::Better
        } else {
            Verdict::NotBetter
        },
        margin,
        test,
    })
}

#[derive(Debug, Clone)]
pub struct SelectionOptions {
    pub directions: Directions,
    /// Starting model; the null model `M(∅, ∅)` by default.
    pub start: ModelSpec,
    /// Restrict moves to the scale component (proportional-hazards search).
    pub scale_only: bool,
    /// Initialise candidate fits from the current coefficients.
    pub warm_start: bool,
    pub fit_options: FitOptions<f64>,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        Self {
            directions: Directions::Stagewise,
            start: ModelSpec::null(),
            scale_only: false,
            warm_start: true,
            fit_options: FitOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionStep {
    pub iteration: usize,
    pub direction: Direction,
    pub component: MoveComponent,
    pub covariate: String,
    pub criterion_before: f64,
    pub criterion_after: f64,
    pub margin: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedMove {
    pub iteration: usize,
    pub mv: Move,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelectionTrace {
    pub criterion: Criterion,
    pub directions: Directions,
    pub steps: Vec<SelectionStep>,
    pub skipped: Vec<SkippedMove>,
    pub final_spec: ModelSpec,
    pub final_fit: FittedModel<f64>,
}

impl SelectionTrace {
    pub fn accepted(&self) -> impl Iterator<Item = &SelectionStep> {
        self.steps.iter().filter(|s| s.accepted)
    }

    /// Human-readable step-by-step log.
    pub fn to_log(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "criterion: {}  mode: {:?}", self.criterion, self.directions);
        let _ = writeln!(
            s,
            "{:>4}  {:<8}  {:<5}  {:<20}  {:>12}  {:>12}  {:>10}  {}",
            "iter", "dir", "comp", "covariate", "before", "after", "margin", "accepted"
        );
        for st in &self.steps {
            let _ = writeln!(
                s,
                "{:>4}  {:<8}  {:<5}  {:<20}  {:>12.4}  {:>12.4}  {:>10.4}  {}",
                st.iteration,
                format!("{:?}", st.direction).to_lowercase(),
                st.component,
                st.covariate,
                st.criterion_before,
                st.criterion_after,
                st.margin,
                if st.accepted { "*" } else { "" }
            );
        }
        for sk in &self.skipped {
            let _ = writeln!(
                s,
                "skipped (iteration {}): {:?} {} {}: {}",
                sk.iteration, sk.mv.direction, sk.mv.component, sk.mv.covariate, sk.reason
            );
        }
        let _ = writeln!(s, "final model: {}", self.final_spec);
        s
    }
}

/// Starting coefficients for `spec`'s design taken from `from` by label.
fn warm_theta(from: &FittedModel<f64>, x: &[crate::data::ColumnLabel], z: &[crate::data::ColumnLabel]) -> Theta<f64> {
    let pick = |labels: &[crate::data::ColumnLabel], src_labels: &[crate::data::ColumnLabel], src: &[f64]| {
        labels
            .iter()
            .map(|l| src_labels.iter().position(|s| s == l).map_or(0.0, |j| src[j]))
            .collect::<Vec<_>>()
    };
    Theta::new(
        pick(x, &from.x_labels, &from.theta.beta),
        pick(z, &from.z_labels, &from.theta.alpha),
    )
}

/// Fits `spec`, optionally warm-started from `from`.
pub fn fit_spec(ds: &Dataset, spec: &ModelSpec, from: Option<&FittedModel<f64>>, options: &FitOptions<f64>) -> Result<FittedModel<f64>> {
    let design = encode_design::<f64>(ds, spec)?;
    let mut opts = options.clone();
    if let Some(prev) = from {
        opts.start = Some(warm_theta(prev, &design.x_labels, &design.z_labels));
    }
    let f = fit(&design, &opts)?;
    if !f.converged {
        return Err(MprError::NotConverged);
    }
    Ok(f)
}

/// Stagewise (or forward-only) selection from `options.start`.
pub fn step_mpr(
    ds: &Dataset,
    candidates: &CandidateSet,
    criterion: Criterion,
    options: &SelectionOptions,
) -> Result<SelectionTrace> {
    candidates.validate(ds)?;
    let mut spec = options.start.clone();
    spec.scale_terms = canonical(spec.scale_terms, candidates);
    spec.shape_terms = canonical(spec.shape_terms, candidates);
    let mut current = fit_spec(ds, &spec, None, &options.fit_options)?;
    let mut steps = Vec::new();
    let mut skipped = Vec::new();
    let bound = candidates.iteration_bound();

    for iteration in 1.. {
        if iteration > bound + 1 {
            return Err(MprError::SelectionBound(bound));
        }
        let moves = legal_moves(&spec, candidates, options.directions, options.scale_only);
        let evaluated: Vec<(Move, ModelSpec, Result<FittedModel<f64>>)> = moves
            .into_par_iter()
            .map(|mv| {
                let next = apply_move(&spec, &mv, candidates);
                let from = options.warm_start.then_some(&current);
                let res = fit_spec(ds, &next, from, &options.fit_options);
                (mv, next, res)
            })
            .collect();

        let before = criterion.value(&current);
        let mut best: Option<(usize, f64, ModelSpec, FittedModel<f64>)> = None;
        for (mv, next, res) in evaluated {
            let cand = match res.and_then(|f| compare_models(&current, &f, criterion).map(|c| (f, c))) {
                Ok(x) => x,
                Err(e) => {
                    log::warn!("skipping {:?} {} {}: {e}", mv.direction, mv.component, mv.covariate);
                    skipped.push(SkippedMove {
                        iteration,
                        mv,
                        reason: e.to_string(),
                    });
                    continue;
                }
            };
            let (f, cmp) = cand;
            steps.push(SelectionStep {
                iteration,
                direction: mv.direction,
                component: mv.component,
                covariate: mv.covariate,
                criterion_before: before,
                criterion_after: criterion.value(&f),
                margin: cmp.margin,
                accepted: false,
            });
            let improves = cmp.verdict == Verdict::Better;
            if improves && best.as_ref().is_none_or(|b| cmp.margin > b.1) {
                best = Some((steps.len() - 1, cmp.margin, next, f));
            }
        }
        match best {
            Some((idx, _, next, f)) => {
                steps[idx].accepted = true;
                spec = next;
                current = f;
            }
            None => break,
        }
    }

    Ok(SelectionTrace {
        criterion,
        directions: options.directions,
        steps,
        skipped,
        final_spec: spec,
        final_fit: current,
    })
}

/// Re-fits every legal move from the final model without warm starts and
/// reports whether none of them improves the criterion.
pub fn is_local_optimum(
    ds: &Dataset,
    trace: &SelectionTrace,
    candidates: &CandidateSet,
    options: &SelectionOptions,
) -> Result<bool> {
    let current = fit_spec(ds, &trace.final_spec, None, &options.fit_options)?;
    for mv in legal_moves(&trace.final_spec, candidates, options.directions, options.scale_only) {
        let next = apply_move(&trace.final_spec, &mv, candidates);
        let Ok(f) = fit_spec(ds, &next, None, &options.fit_options) else {
            continue;
        };
        if compare_models(&current, &f, trace.criterion)?.verdict == Verdict::Better {
            return Ok(false);
        }
    }
    Ok(true)
}
