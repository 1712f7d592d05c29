use crate::error::{CliError, Context};
use crate::input::{output_dir, write_file};
use crate::{CriterionArg, SimulateArgs, Study};
use mpr_core::sim::{run_selection_study_with, CorrelationReport, CovariateLaw, FrequencyReport};
use mpr_core::{run_correlation_study, Criterion, SelectionOptions, SimDesign};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub n: usize,
    pub censoring: f64,
}

/// Study configuration, read from TOML or assembled from flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub study: Study,
    #[serde(default = "default_criteria")]
    pub criteria: Vec<CriterionArg>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// `(n, censoring)` pairs overriding the design's own; all share the seed.
    #[serde(default)]
    pub scenarios: Vec<Scenario>,
    pub design: SimDesign,
}

fn default_criteria() -> Vec<CriterionArg> {
    vec![CriterionArg::Aic]
}

fn default_alpha() -> f64 {
    Criterion::DEFAULT_LRT_ALPHA
}

impl SimConfig {
    pub fn from_args(a: &SimulateArgs) -> Self {
        let design = match a.study {
            Study::Selection => SimDesign::selection_study(a.n.unwrap_or(500), a.censoring, a.replicates, a.seed),
            Study::Correlation => {
                let mut d = SimDesign::correlation_study(a.censoring, a.replicates, a.seed);
                if let Some(n) = a.n {
                    d.n = n;
                }
                d
            }
        };
        Self {
            study: a.study,
            criteria: if a.criteria.is_empty() {
                default_criteria()
            } else {
                a.criteria.clone()
            },
            alpha: a.alpha,
            scenarios: Vec::new(),
            design,
        }
    }

    fn scenario_designs(&self) -> Vec<SimDesign> {
        if self.scenarios.is_empty() {
            return vec![self.design.clone()];
        }
        self.scenarios
            .iter()
            .map(|s| SimDesign {
                n: s.n,
                target_censoring: s.censoring,
                ..self.design.clone()
            })
            .collect()
    }

    fn criterion(&self, c: CriterionArg) -> Criterion {
        match c {
            CriterionArg::Aic => Criterion::Aic,
            CriterionArg::Bic => Criterion::Bic,
            CriterionArg::Lrt => Criterion::Lrt { alpha: self.alpha },
        }
    }
}

#[derive(Serialize)]
struct ScenarioManifest {
    n: usize,
    target_censoring: f64,
    criterion: Option<String>,
    censoring_rate: f64,
    mean_censoring: f64,
    replicates: usize,
    used: usize,
    dropped: usize,
    seed: u64,
    /// Replicate `j` draws from stream `j` of the seed.
    streams: String,
}

#[derive(Serialize)]
struct Manifest {
    tool: String,
    study: Study,
    seed: u64,
    covariate_law: CovariateLaw,
    censoring: &'static str,
    config_file: &'static str,
    scenarios: Vec<ScenarioManifest>,
    outputs: Vec<String>,
    wall_time_seconds: f64,
}

pub fn run(a: &SimulateArgs) -> Result<(), CliError> {
    let config = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            toml::from_str::<SimConfig>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => SimConfig::from_args(a),
    };
    for d in config.scenario_designs() {
        d.validate().context("simulation design")?;
    }
    if config.criteria.is_empty() {
        return Err(CliError::Usage("at least one criterion is required".into()));
    }
    let out = output_dir(&a.out.out)?;
    let started = Instant::now();
    let mut scenarios = Vec::new();
    let mut outputs = Vec::new();

    match config.study {
        Study::Selection => {
            let mut csv = String::new();
            for design in config.scenario_designs() {
                for &c in &config.criteria {
                    let criterion = config.criterion(c);
                    log::info!("selection study n = {}, censoring {}, {criterion}", design.n, design.target_censoring);
                    let report = run_selection_study_with(&design, criterion, &SelectionOptions::default())
                        .context("selection study")?;
                    append_frequencies(&mut csv, &report);
                    print_frequencies(&report);
                    scenarios.push(ScenarioManifest {
                        n: design.n,
                        target_censoring: design.target_censoring,
                        criterion: Some(criterion.to_string()),
                        censoring_rate: report.censoring_rate,
                        mean_censoring: report.mean_censoring,
                        replicates: design.replicates,
                        used: report.replicates_used,
                        dropped: report.dropped,
                        seed: design.seed,
                        streams: format!("0..{}", design.replicates),
                    });
                }
            }
            write_file(&out, "frequencies.csv", &csv)?;
            outputs.push("frequencies.csv".into());
        }
        Study::Correlation => {
            let mut corr = String::new();
            let mut est = String::new();
            let mut summary = String::from("n,target_censoring,coefficient,truth,mean,empirical_sd,mean_se\n");
            for design in config.scenario_designs() {
                log::info!("correlation study n = {}, censoring {}", design.n, design.target_censoring);
                let report = run_correlation_study(&design).context("correlation study")?;
                append_correlation(&mut corr, &mut est, &mut summary, &report);
                println!(
                    "n = {}, censoring {}: {} fits ({} dropped)\n{}",
                    design.n,
                    design.target_censoring,
                    report.estimates.len(),
                    report.dropped,
                    report.to_csv()
                );
                scenarios.push(ScenarioManifest {
                    n: design.n,
                    target_censoring: design.target_censoring,
                    criterion: None,
                    censoring_rate: report.censoring_rate,
                    mean_censoring: report.mean_censoring,
                    replicates: design.replicates,
                    used: report.estimates.len(),
                    dropped: report.dropped,
                    seed: design.seed,
                    streams: format!("0..{}", design.replicates),
                });
            }
            write_file(&out, "correlation.csv", &corr)?;
            write_file(&out, "estimates.csv", &est)?;
            write_file(&out, "summary.csv", &summary)?;
            outputs.extend(["correlation.csv", "estimates.csv", "summary.csv"].map(String::from));
        }
    }

    let echo = toml::to_string(&config).map_err(|e| CliError::Usage(format!("serialising config: {e}")))?;
    write_file(&out, "config.toml", &echo)?;
    let manifest = Manifest {
        tool: format!("mpr {}", env!("CARGO_PKG_VERSION")),
        study: config.study,
        seed: config.design.seed,
        covariate_law: config.design.covariate_law,
        censoring: "independent exponential, rate calibrated to the target",
        config_file: "config.toml",
        scenarios,
        outputs,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    write_file(
        &out,
        "manifest.json",
        &serde_json::to_string_pretty(&manifest).expect("manifest serialises"),
    )?;
    Ok(())
}

fn append_frequencies(csv: &mut String, report: &FrequencyReport) {
    let body = report.to_csv();
    if csv.is_empty() {
        csv.push_str(&body);
    } else {
        csv.push_str(body.split_once('\n').map_or("", |(_, rest)| rest));
    }
}

fn print_frequencies(report: &FrequencyReport) {
    println!(
        "n = {}, censoring {}, {} ({} used, {} dropped)",
        report.design.n, report.design.target_censoring, report.criterion, report.replicates_used, report.dropped
    );
    for (j, c) in report.covariates.iter().enumerate() {
        println!(
            "  {c:<4} scale {:.2}  shape {:.2}",
            report.scale_frequency[j], report.shape_frequency[j]
        );
    }
}

fn append_correlation(corr: &mut String, est: &mut String, summary: &mut String, report: &CorrelationReport) {
    let (n, p) = (report.design.n, report.design.target_censoring);
    let labels = report.covariate_labels();
    if corr.is_empty() {
        let _ = writeln!(corr, "n,target_censoring,coefficient,{}", labels.join(","));
        let _ = writeln!(est, "n,target_censoring,replicate,{}", report.labels.join(","));
    }
    for (l, row) in labels.iter().zip(report.covariate_correlation()) {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        let _ = writeln!(corr, "{n},{p},{l},{}", cells.join(","));
    }
    for (j, row) in report.replicate_ids.iter().zip(&report.estimates) {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        let _ = writeln!(est, "{n},{p},{j},{}", cells.join(","));
    }
    let truth: Vec<f64> = report.design.beta_true.iter().chain(&report.design.alpha_true).copied().collect();
    let (mean, sd, se) = (report.mean_estimates(), report.empirical_sd(), report.mean_standard_errors());
    for (k, l) in report.labels.iter().enumerate() {
        let _ = writeln!(summary, "{n},{p},{l},{},{},{},{}", truth[k], mean[k], sd[k], se[k]);
    }
}
