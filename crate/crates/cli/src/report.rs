use crate::error::{CliError, Context};
use mpr_core::inference::TestResult;
use mpr_core::{wald_joint, wald_single, Column, Component, Dataset, EffectKey, FittedModel64};
use serde::Serialize;
use std::fmt::Write as _;

#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRow {
    pub component: Component,
    pub label: String,
    pub estimate: f64,
    /// Zero for coefficients held fixed.
    pub std_error: f64,
    pub z: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JointRow {
    pub effect: String,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

impl JointRow {
    fn new(effect: &EffectKey, t: TestResult<f64>) -> Self {
        Self {
            effect: effect.to_string(),
            statistic: t.statistic,
            df: t.df,
            p_value: t.p_value,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub name: String,
    pub spec: String,
    pub n: usize,
    pub events: usize,
    pub parameters: usize,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub max_abs_score: f64,
    pub coefficients: Vec<CoefficientRow>,
    /// Joint Wald tests of `β_c = α_c = 0` for covariates in both components.
    pub joint_tests: Vec<JointRow>,
}

impl ModelReport {
    pub fn new(name: &str, fit: &FittedModel64, ds: &Dataset) -> Result<Self, CliError> {
        let se = fit.std_errors();
        let mut coefficients = Vec::new();
        for (component, labels, offset) in [
            (Component::Scale, &fit.x_labels, 0),
            (Component::Shape, &fit.z_labels, fit.x_labels.len()),
        ] {
            for (j, label) in labels.iter().enumerate() {
                let idx = offset + j;
                let test = if se[idx] > 0.0 {
                    Some(wald_single(fit, component, &label.to_string()).context("Wald test")?)
                } else {
                    None
                };
                coefficients.push(CoefficientRow {
                    component,
                    label: label.to_string(),
                    estimate: fit.coefficient(idx),
                    std_error: se[idx],
                    z: test.as_ref().map(|_| fit.coefficient(idx) / se[idx]),
                    p_value: test.as_ref().map(|t| t.p_value),
                });
            }
        }
        let mut joint_tests = Vec::new();
        for term in fit.spec.scale_terms.iter().filter(|t| fit.spec.shape_terms.contains(t)) {
            let key = EffectKey::term(term);
            joint_tests.push(JointRow::new(&key, wald_joint(fit, &key).context("joint Wald test")?));
            if let Some(Column::Categorical { .. }) = ds.column(term) {
                for label in fit.x_labels.iter().filter(|l| l.belongs_to(term)) {
                    if let Some(level) = &label.level {
                        let key = EffectKey::level(term, level);
                        joint_tests.push(JointRow::new(&key, wald_joint(fit, &key).context("joint Wald test")?));
                    }
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            spec: fit.spec.to_string(),
            n: fit.n,
            events: ds.n_events(),
            parameters: fit.n_params(),
            loglik: fit.loglik,
            aic: fit.aic(),
            bic: fit.bic(),
            converged: fit.converged,
            iterations: fit.iterations,
            max_abs_score: fit.max_abs_score,
            coefficients,
            joint_tests,
        })
    }

    fn cell(&self, component: Component, label: &str) -> Option<String> {
        self.coefficients
            .iter()
            .find(|c| c.component == component && c.label == label)
            .map(|c| {
                if c.std_error > 0.0 {
                    format!("{:.3} ({:.3})", c.estimate, c.std_error)
                } else {
                    format!("{:.3} (fixed)", c.estimate)
                }
            })
    }
}

fn render(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|j| rows.iter().filter_map(|r| r.get(j)).map(|c| c.chars().count()).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    for (i, r) in rows.iter().enumerate() {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(j, c)| {
                if j == 0 {
                    format!("{c:<w$}", w = widths[j])
                } else {
                    format!("{c:>w$}", w = widths[j])
                }
            })
            .collect();
        let _ = writeln!(s, "{}", line.join("  ").trim_end());
        if i == 0 {
            let _ = writeln!(s, "{}", "-".repeat(widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1)));
        }
    }
    s
}

/// Side-by-side coefficient table with one scale and one shape column per
/// model, followed by log-likelihood and information criteria.
pub fn coefficient_table(models: &[&ModelReport]) -> String {
    let mut labels: Vec<String> = Vec::new();
    for m in models {
        for c in &m.coefficients {
            if !labels.contains(&c.label) {
                labels.push(c.label.clone());
            }
        }
    }
    let mut rows = vec![std::iter::once("Covariate".to_string())
        .chain(models.iter().flat_map(|m| [format!("{} scale (SE)", m.name), format!("{} shape (SE)", m.name)]))
        .collect::<Vec<_>>()];
    for l in &labels {
        let mut row = vec![l.clone()];
        for m in models {
            row.push(m.cell(Component::Scale, l).unwrap_or_else(|| "-".into()));
            row.push(m.cell(Component::Shape, l).unwrap_or_else(|| "-".into()));
        }
        rows.push(row);
    }
    for (name, get) in [
        ("log-likelihood", (|m: &ModelReport| m.loglik) as fn(&ModelReport) -> f64),
        ("AIC", |m| m.aic),
        ("BIC", |m| m.bic),
    ] {
        let mut row = vec![name.to_string()];
        for m in models {
            row.push(format!("{:.1}", get(m)));
            row.push(String::new());
        }
        rows.push(row);
    }
    render(&rows)
}

pub fn joint_table(m: &ModelReport) -> String {
    if m.joint_tests.is_empty() {
        return String::new();
    }
    let mut rows = vec![vec!["Effect".into(), "chi-square".into(), "df".into(), "p-value".into()]];
    for j in &m.joint_tests {
        rows.push(vec![
            j.effect.clone(),
            format!("{:.2}", j.statistic),
            j.df.to_string(),
            format_p(j.p_value),
        ]);
    }
    render(&rows)
}

pub fn format_p(p: f64) -> String {
    if p < 1e-4 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    }
}

pub fn summary_line(m: &ModelReport) -> String {
    format!(
        "{}: {}  n = {}, events = {}, k = {}, converged = {} ({} iterations, max |score| = {:.2e})",
        m.name, m.spec, m.n, m.events, m.parameters, m.converged, m.iterations, m.max_abs_score
    )
}

/// Selected-component markers per candidate covariate.
pub fn selection_table(candidates: &[String], scale: &[String], shape: &[String]) -> String {
    let mut rows = vec![vec!["Covariate".to_string(), "scale".into(), "shape".into()]];
    for c in candidates {
        let mark = |set: &[String]| if set.contains(c) { "x".to_string() } else { String::new() };
        rows.push(vec![c.clone(), mark(scale), mark(shape)]);
    }
    render(&rows)
}
