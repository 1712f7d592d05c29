use crate::error::{CliError, Context};
use crate::input::{csv_text, load_dataset, model_spec, output_dir, profile, slug, write_file};
use crate::report::{coefficient_table, format_p, joint_table, selection_table, summary_line, ModelReport};
use crate::{CriterionArg, FitArgs, HrArgs, KmArgs, StepArgs};
use mpr_core::curves::default_time_grid;
use mpr_core::model::weibull_survivor;
use mpr_core::selection::{SelectionStep, SkippedMove};
use mpr_core::{
    confidence_ellipse, encode_design, hazard_ratio, hazard_ratio_averaged, kaplan_meier, likelihood_ratio_test,
    step_mpr, CandidateSet, Column, Criterion, Dataset, Directions, EffectKey, FitOptions, FittedModel64, ModelSpec,
    SelectionOptions,
};
use serde::Serialize;
use std::fmt::Write as _;

fn check_level(level: f64, flag: &str) -> Result<(), CliError> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{flag} must lie in (0, 1), got {level}")))
    }
}

fn fit_model(ds: &Dataset, spec: &ModelSpec) -> Result<FittedModel64, CliError> {
    fit_model_with(ds, spec, &FitOptions::default())
}

fn fit_model_with(ds: &Dataset, spec: &ModelSpec, options: &FitOptions<f64>) -> Result<FittedModel64, CliError> {
    let design = encode_design::<f64>(ds, spec).context(format!("building design for {spec}"))?;
    let model = mpr_core::fit(&design, options).context(format!("fitting {spec}"))?;
    if !model.converged {
        log::warn!("{spec} did not converge (max |score| = {:.2e})", model.max_abs_score);
    }
    Ok(model)
}

fn require_converged(model: &FittedModel64) -> Result<(), CliError> {
    if model.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "{} did not converge after {} iterations (max |score| = {:.2e})",
            model.spec, model.iterations, model.max_abs_score
        )))
    }
}

fn parse_effect(s: &str) -> Result<EffectKey, CliError> {
    s.parse().map_err(|e| CliError::Usage(format!("{e}")))
}

#[derive(Serialize)]
struct LrtRow {
    full: String,
    reduced: String,
    statistic: f64,
    df: usize,
    p_value: f64,
}

#[derive(Serialize)]
struct EllipseRow {
    effect: String,
    file: String,
    level: f64,
    center: [f64; 2],
    covariance: [[f64; 2]; 2],
}

#[derive(Serialize)]
struct FitOutput {
    models: Vec<ModelReport>,
    lrt_against_ph: Option<LrtRow>,
    ellipses: Vec<EllipseRow>,
}

pub fn fit(a: &FitArgs) -> Result<(), CliError> {
    check_level(a.level, "level")?;
    let effects: Vec<EffectKey> = a.ellipses.iter().map(|e| parse_effect(e)).collect::<Result<_, _>>()?;
    let ds = load_dataset(&a.data)?;
    let spec = model_spec(&a.model, &ds)?;
    let out = output_dir(&a.out.out)?;
    let options = FitOptions {
        max_iter: a.max_iter,
        ..FitOptions::default()
    };
    let model = fit_model_with(&ds, &spec, &options)?;
    let name = if spec.shape_terms.is_empty() { "PH" } else { "MPR" };

    let mut models = Vec::new();
    let mut fits = Vec::new();
    let mut lrt = None;
    if a.compare_ph && !spec.shape_terms.is_empty() {
        let ph_spec = ModelSpec {
            shape_terms: Vec::new(),
            ..spec.clone()
        };
        let ph = fit_model_with(&ds, &ph_spec, &options)?;
        models.push(ModelReport::new("PH", &ph, &ds)?);
        if model.converged && ph.converged {
            let t = likelihood_ratio_test(&model, &ph).context("likelihood ratio test")?;
            lrt = Some(LrtRow {
                full: spec.to_string(),
                reduced: ph_spec.to_string(),
                statistic: t.statistic,
                df: t.df,
                p_value: t.p_value,
            });
        }
        fits.push(ph);
    }
    models.push(ModelReport::new(name, &model, &ds)?);

    let mut ellipses = Vec::new();
    for (raw, key) in a.ellipses.iter().zip(&effects) {
        let e = confidence_ellipse(&model, key, a.level, a.ellipse_points).context(format!("ellipse for {raw}"))?;
        let file = format!("ellipse_{}.csv", slug(raw));
        write_file(&out, &file, &e.to_csv())?;
        ellipses.push(EllipseRow {
            effect: key.to_string(),
            file,
            level: a.level,
            center: e.center,
            covariance: e.covariance,
        });
    }

    let mut text = String::new();
    for m in &models {
        let _ = writeln!(text, "{}", summary_line(m));
    }
    let _ = writeln!(text, "\n{}", coefficient_table(&models.iter().collect::<Vec<_>>()));
    let main = models.last().expect("main model");
    let joint = joint_table(main);
    if !joint.is_empty() {
        let _ = writeln!(text, "Joint Wald tests (scale and shape effect both zero)\n{joint}");
    }
    if let Some(l) = &lrt {
        let _ = writeln!(
            text,
            "LRT {} vs {}: statistic {:.2} on {} df, p = {}",
            l.full,
            l.reduced,
            l.statistic,
            l.df,
            format_p(l.p_value)
        );
    }
    for e in &ellipses {
        let _ = writeln!(text, "{:.0}% ellipse for {} written to {}", e.level * 100.0, e.effect, e.file);
    }
    write_file(&out, "report.txt", &text)?;
    let json = serde_json::to_string_pretty(&FitOutput {
        models,
        lrt_against_ph: lrt,
        ellipses,
    })
    .expect("report serialises");
    write_file(&out, "report.json", &json)?;
    print!("{text}");
    for f in fits.iter().chain(std::iter::once(&model)) {
        require_converged(f)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct StepOutput<'a> {
    criterion: String,
    directions: Directions,
    candidates: &'a [String],
    steps: &'a [SelectionStep],
    skipped: &'a [SkippedMove],
    final_spec: &'a ModelSpec,
    final_model: ModelReport,
}

pub fn step(a: &StepArgs) -> Result<(), CliError> {
    let criterion = match a.criterion {
        CriterionArg::Aic => Criterion::Aic,
        CriterionArg::Bic => Criterion::Bic,
        CriterionArg::Lrt => {
            check_level(a.alpha, "alpha")?;
            Criterion::Lrt { alpha: a.alpha }
        }
    };
    let ds = load_dataset(&a.data)?;
    let names: Vec<String> = if a.candidates.is_empty() {
        ds.covariate_names().to_vec()
    } else {
        a.candidates.iter().map(|s| s.trim().to_string()).collect()
    };
    let candidates = CandidateSet::new(names.clone()).context("candidate set")?;
    let out = output_dir(&a.out.out)?;
    let options = SelectionOptions {
        directions: if a.forward_only {
            Directions::ForwardOnly
        } else {
            Directions::Stagewise
        },
        scale_only: a.scale_only,
        warm_start: !a.cold_start,
        ..SelectionOptions::default()
    };
    let trace = step_mpr(&ds, &candidates, criterion, &options).context("stagewise selection")?;
    write_file(&out, "trace.log", &trace.to_log())?;
    let report = ModelReport::new("selected", &trace.final_fit, &ds)?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "criterion {criterion}, {} accepted step(s); final model {}\n",
        trace.accepted().count(),
        trace.final_spec
    );
    let _ = writeln!(
        text,
        "{}",
        selection_table(&names, &trace.final_spec.scale_terms, &trace.final_spec.shape_terms)
    );
    let _ = writeln!(text, "{}\n", summary_line(&report));
    let _ = writeln!(text, "{}", coefficient_table(&[&report]));
    let joint = joint_table(&report);
    if !joint.is_empty() {
        let _ = writeln!(text, "Joint Wald tests (scale and shape effect both zero)\n{joint}");
    }
    write_file(&out, "report.txt", &text)?;
    let json = serde_json::to_string_pretty(&StepOutput {
        criterion: criterion.to_string(),
        directions: trace.directions,
        candidates: &names,
        steps: &trace.steps,
        skipped: &trace.skipped,
        final_spec: &trace.final_spec,
        final_model: report,
    })
    .expect("report serialises");
    write_file(&out, "report.json", &json)?;
    print!("{text}");
    Ok(())
}

fn time_grid(ds: &Dataset, points: usize, t_max: Option<f64>) -> Result<Vec<f64>, CliError> {
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let grid = default_time_grid(ds, points);
    match t_max {
        None => Ok(grid),
        Some(hi) if hi > grid[0] => {
            let lo = grid[0];
            Ok((0..points)
                .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
                .collect())
        }
        Some(hi) => Err(CliError::Usage(format!("--t-max {hi} is not beyond the first event time {}", grid[0]))),
    }
}

#[derive(Serialize)]
struct HrSummary {
    effect: String,
    file: String,
    policy: &'static str,
    crossing_time: Option<f64>,
    hr_first: f64,
    hr_last: f64,
}

pub fn hr(a: &HrArgs) -> Result<(), CliError> {
    check_level(a.level, "level")?;
    let effects: Vec<EffectKey> = a.effects.iter().map(|e| parse_effect(e)).collect::<Result<_, _>>()?;
    let ds = load_dataset(&a.data)?;
    let spec = model_spec(&a.model, &ds)?;
    let at = profile(&a.at, &ds)?;
    let times = time_grid(&ds, a.points, a.t_max)?;
    let out = output_dir(&a.out.out)?;
    let model = fit_model(&ds, &spec)?;
    require_converged(&model)?;

    let mut summary = Vec::new();
    for (raw, key) in a.effects.iter().zip(&effects) {
        let (curve, policy) = if a.average {
            (hazard_ratio_averaged(&model, key, &ds, &times, a.level), "average")
        } else {
            (hazard_ratio(&model, key, &at, &times, a.level), "profile")
        };
        let curve = curve.context(format!("hazard ratio for {raw}"))?;
        let crossing = mpr_core::crossing_time(&model, key, &at).context(format!("crossing time for {raw}"))?;
        let file = format!("hr_{}.csv", slug(raw));
        write_file(&out, &file, &curve.to_csv())?;
        summary.push(HrSummary {
            effect: key.to_string(),
            file,
            policy,
            crossing_time: crossing,
            hr_first: curve.hr[0],
            hr_last: *curve.hr.last().expect("non-empty grid"),
        });
    }
    let mut rows = Vec::new();
    for s in &summary {
        let tc = s.crossing_time.map(|t| t.to_string()).unwrap_or_default();
        rows.push(vec![s.effect.clone(), s.policy.into(), tc, s.hr_first.to_string(), s.hr_last.to_string()]);
        let tc_text = s
            .crossing_time
            .map_or_else(|| "none".to_string(), |t| format!("{t:.3}"));
        println!(
            "{}: HR {:.3} at t = {:.3} to {:.3} at t = {:.3}; crossing time {} -> {}",
            s.effect,
            s.hr_first,
            times[0],
            s.hr_last,
            times[times.len() - 1],
            tc_text,
            s.file
        );
    }
    let csv = csv_text(&["effect", "policy", "crossing_time", "hr_first", "hr_last"], &rows);
    write_file(&out, "hr_summary.csv", &csv)?;
    write_file(
        &out,
        "hr_summary.json",
        &serde_json::to_string_pretty(&summary).expect("summary serialises"),
    )?;
    Ok(())
}

pub fn km(a: &KmArgs) -> Result<(), CliError> {
    let ds = load_dataset(&a.data)?;
    let out = output_dir(&a.out.out)?;
    let groups: Vec<(String, Vec<usize>)> = match &a.by {
        None => vec![("all".to_string(), (0..ds.n()).collect())],
        Some(name) => match ds.column(name) {
            Some(Column::Categorical { levels, codes }) => levels
                .iter()
                .enumerate()
                .map(|(l, level)| {
                    let rows = codes.iter().enumerate().filter(|(_, &c)| c == l).map(|(i, _)| i).collect();
                    (level.clone(), rows)
                })
                .collect(),
            Some(Column::Numeric(_)) => {
                return Err(CliError::Usage(format!("--by {name}: grouping needs a categorical column")))
            }
            None => return Err(CliError::Usage(format!("--by: unknown covariate `{name}`"))),
        },
    };

    let overlay_model = if a.overlay {
        let spec = model_spec(&a.model, &ds)?;
        let design = encode_design::<f64>(&ds, &spec).context(format!("building design for {spec}"))?;
        let model = fit_model(&ds, &spec)?;
        require_converged(&model)?;
        Some((design, model))
    } else {
        None
    };

    let mut km_rows = Vec::new();
    let mut overlay_rows = Vec::new();
    for (group, rows) in &groups {
        if rows.is_empty() {
            continue;
        }
        let t: Vec<f64> = rows.iter().map(|&i| ds.time()[i]).collect();
        let s: Vec<bool> = rows.iter().map(|&i| ds.status()[i]).collect();
        let curve = kaplan_meier(&t, &s).context(format!("Kaplan-Meier for {group}"))?;
        km_rows.push(vec![group.clone(), "0".into(), "1".into(), rows.len().to_string(), "0".into()]);
        for k in 0..curve.event_times.len() {
            km_rows.push(vec![
                group.clone(),
                curve.event_times[k].to_string(),
                curve.survival[k].to_string(),
                curve.at_risk[k].to_string(),
                curve.n_events[k].to_string(),
            ]);
        }
        if let Some((design, model)) = &overlay_model {
            let params: Vec<(f64, f64)> = rows
                .iter()
                .map(|&i| model.lambda_gamma(design.x.row(i), design.z.row(i)))
                .collect::<Result<_, _>>()
                .context("model survivor")?;
            for (k, &tk) in curve.event_times.iter().enumerate() {
                let avg = params.iter().map(|&(l, g)| weibull_survivor(l, g, tk)).sum::<f64>() / params.len() as f64;
                overlay_rows.push(vec![group.clone(), tk.to_string(), curve.survival[k].to_string(), avg.to_string()]);
            }
        }
        println!(
            "{group}: n = {}, events = {}, final survival {:.4}",
            rows.len(),
            s.iter().filter(|&&e| e).count(),
            curve.survival.last().copied().unwrap_or(1.0)
        );
    }
    write_file(&out, "km.csv", &csv_text(&["group", "time", "survival", "at_risk", "events"], &km_rows))?;
    if overlay_model.is_some() {
        write_file(&out, "km_overlay.csv", &csv_text(&["group", "time", "km", "model"], &overlay_rows))?;
    }
    Ok(())
}
