//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --release -p mpr-cli --test acceptance`.

use mpr_core::data::read_table;
use mpr_core::inference::{chi_square_quantile, information_criteria, lrt_from_logliks};
use mpr_core::selection::fit_spec;
use mpr_core::sim::{generate_event_times, simulate_replicate, stream_rng};
use mpr_core::{
    confidence_ellipse, crossing_time_from, hazard_ratio, hazard_ratio_at, log_likelihood, observed_information,
    run_correlation_study, run_selection_study, score, step_mpr, CandidateSet, CovariateProfile, Criterion,
    Dataset, DesignMatrices, EffectKey, FitOptions, Matrix, ModelSpec, SelectionOptions, SimDesign, Theta,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Rounds to the one-decimal precision of published values.
fn one_decimal(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

fn c1_information_criteria() -> Outcome {
    let cases = [(-1938.1, 10, 3896.2, 3943.8), (-1960.8, 6, 3933.5, 3962.0)];
    let mut detail = Vec::new();
    for (ll, k, aic_pub, bic_pub) in cases {
        let (aic, bic) = information_criteria(ll, k, 855).map_err(|e| e.to_string())?;
        for (name, got, want) in [("AIC", aic, aic_pub), ("BIC", bic, bic_pub)] {
            let shown = one_decimal(got);
            ensure(
                (shown - want).abs() <= 0.1 + 1e-9,
                format!("{name}(k={k}) = {got:.3} (shown {shown:.1}) vs {want}"),
            )?;
            detail.push(format!("{name}={shown:.1}"));
        }
    }
    Ok(detail.join(" "))
}

fn c2_lrt() -> Outcome {
    let t = lrt_from_logliks(-1938.1, -1960.8, 4).map_err(|e| e.to_string())?;
    ensure((t.statistic - 45.4f64).abs() < 1e-9, format!("statistic {}", t.statistic))?;
    ensure(t.p_value < 1e-8, format!("p = {:e}", t.p_value))?;
    Ok(format!("statistic {:.1} on 4 df, p = {:.2e}", t.statistic, t.p_value))
}

fn binary_dataset(seed: u64, n: usize, beta: &[f64], alpha: &[f64], censoring: f64) -> Dataset {
    let design = SimDesign {
        beta_true: beta.to_vec(),
        alpha_true: alpha.to_vec(),
        covariate_law: Default::default(),
        n,
        target_censoring: 0.0,
        replicates: 1,
        seed,
    };
    simulate_replicate(&design, censoring, 0).unwrap()
}

fn c3_ph_reduction() -> Outcome {
    let mut r = stream_rng(303, 0);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let beta = [-0.5, r.gen_range(-1.0..1.0)];
        let alpha = [r.gen_range(-0.3..0.3), r.gen_range(-0.3..0.3)];
        let ds = binary_dataset(1000 + i, 150, &beta, &alpha, 0.2);
        let spec = ModelSpec::new(["x1"], ["x1"]);
        let m = fit_spec(&ds, &spec, None, &FitOptions::default().with_fixed(vec![3])).map_err(|e| e.to_string())?;
        let times: Vec<f64> = (1..=25).map(|k| 0.2 * k as f64).collect();
        let curve = hazard_ratio(&m, &EffectKey::term("x1"), &CovariateProfile::reference(), &times, 0.95)
            .map_err(|e| e.to_string())?;
        let target = m.theta.beta[1].exp();
        for hr in curve.hr {
            worst = worst.max((hr - target).abs() / target);
        }
    }
    ensure(worst <= 4.0 * f64::EPSILON, format!("max relative deviation {worst:e}"))?;
    Ok(format!("50 fits, max relative deviation from exp(beta_c) {worst:.1e}"))
}

fn c4_crossing_time() -> Outcome {
    let mut r = stream_rng(404, 0);
    let (mut worst_hr, mut worst_root) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let beta = r.gen_range(-2.0..2.0);
        let alpha = loop {
            let a: f64 = r.gen_range(-1.0..1.0);
            if a.abs() > 0.05 {
                break a;
            }
        };
        let zta = r.gen_range(-0.5..0.5);
        let tc = crossing_time_from(beta, alpha, zta).ok_or("no crossing with alpha_c != 0")?;
        worst_hr = worst_hr.max((hazard_ratio_at(beta, alpha, zta, tc) - 1.0).abs());
        // bisection on log t of log HR
        let f = |u: f64| hazard_ratio_at(beta, alpha, zta, u.exp()).ln();
        let (mut lo, mut hi) = (-200.0f64, 200.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid).signum() == f(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = (0.5 * (lo + hi)).exp();
        worst_root = worst_root.max(((tc - root) / root).abs());
    }
    ensure(worst_hr < 1e-10, format!("|HR(t_c) - 1| up to {worst_hr:e}"))?;
    ensure(worst_root < 1e-8, format!("relative gap to bisection {worst_root:e}"))?;
    Ok(format!("|HR(t_c)-1| <= {worst_hr:.1e}, bisection gap <= {worst_root:.1e}"))
}

fn random_problem(r: &mut ChaCha8Rng, n: usize, p: usize, q: usize) -> (DesignMatrices<f64>, Theta<f64>) {
    let mut xs = Vec::with_capacity(n * p);
    for _ in 0..n {
        xs.push(1.0);
        for _ in 1..p {
            xs.push(r.gen_range(-1.0..1.0));
        }
    }
    let x = Matrix::from_row_major(n, p, xs).unwrap();
    let z = x.select(&(0..n).collect::<Vec<_>>(), &(0..q).collect::<Vec<_>>());
    let beta: Vec<f64> = (0..p).map(|_| r.gen_range(-1.0..1.0)).collect();
    let alpha: Vec<f64> = (0..q).map(|_| r.gen_range(-0.5..0.5)).collect();
    let t = generate_event_times(&x, &z, &beta, &alpha, r).unwrap();
    let mut status: Vec<bool> = (0..n).map(|_| r.gen::<f64>() > 0.3).collect();
    status[0] = true;
    let time = t.iter().zip(&status).map(|(&ti, &e)| if e { ti } else { ti * r.gen_range(0.05..1.0) }).collect();
    let theta = Theta::new(
        beta.iter().map(|b| b + r.gen_range(-0.2..0.2)).collect(),
        alpha.iter().map(|a| a + r.gen_range(-0.2..0.2)).collect(),
    );
    (DesignMatrices::from_matrices(x, z, time, status).unwrap(), theta)
}

fn c5_derivatives() -> Outcome {
    let mut r = stream_rng(505, 0);
    let mut worst = 0.0f64;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1.0);
    for pair in 0..20 {
        let (p, q) = [(1, 1), (2, 2), (3, 2), (3, 3), (4, 2)][pair % 5];
        let (d, theta) = random_problem(&mut r, 50, p, q);
        let g = score(&theta, &d).map_err(|e| e.to_string())?;
        let info = observed_information(&theta, &d).map_err(|e| e.to_string())?;
        let v = theta.to_vec();
        let h = 1e-5;
        let at = |j: usize, s: f64| {
            let mut w = v.clone();
            w[j] += s;
            Theta::from_vec(&w, p)
        };
        for j in 0..v.len() {
            let fd = (log_likelihood(&at(j, h), &d).unwrap() - log_likelihood(&at(j, -h), &d).unwrap()) / (2.0 * h);
            worst = worst.max(rel(g[j], fd));
            let (gu, gd) = (score(&at(j, h), &d).unwrap(), score(&at(j, -h), &d).unwrap());
            for i in 0..v.len() {
                worst = worst.max(rel(info[(i, j)], -(gu[i] - gd[i]) / (2.0 * h)));
            }
        }
    }
    ensure(worst < 1e-5, format!("worst relative error {worst:e}"))?;
    Ok(format!("20 pairs, worst relative error {worst:.1e}"))
}

fn c6_consistency() -> Outcome {
    let design = SimDesign::correlation_study(0.2, 200, 606);
    let report = run_correlation_study(&design).map_err(|e| e.to_string())?;
    let truth = [-3.0, -0.2, -2.3, -0.2, 0.1, 0.5];
    let (mean, sd, se) = (report.mean_estimates(), report.empirical_sd(), report.mean_standard_errors());
    let mut worst_bias = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for k in 0..6 {
        worst_bias = worst_bias.max((mean[k] - truth[k]).abs());
        worst_ratio = worst_ratio.max((sd[k] / se[k] - 1.0).abs());
    }
    ensure(worst_bias < 0.05, format!("max |mean - truth| = {worst_bias:.4} (means {mean:.3?})"))?;
    ensure(worst_ratio < 0.2, format!("max |SD/SE - 1| = {worst_ratio:.3}"))?;
    Ok(format!(
        "{} fits ({} dropped), max |bias| {worst_bias:.3}, max |SD/SE - 1| {worst_ratio:.3}",
        report.estimates.len(),
        report.dropped
    ))
}

fn c7_correlation_structure() -> Outcome {
    let mut detail = Vec::new();
    for (i, p) in [0.2, 0.5, 0.8].into_iter().enumerate() {
        let report =
            run_correlation_study(&SimDesign::correlation_study(p, 100, 707 + i as u64)).map_err(|e| e.to_string())?;
        // order: beta1, beta2, alpha1, alpha2
        let c = report.covariate_correlation();
        let same = c[0][2].abs().min(c[1][3].abs());
        let cross = [c[0][1], c[0][3], c[1][2], c[2][3]].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        ensure(same > cross, format!("censoring {p}: same-covariate {same:.3} vs cross {cross:.3}"))?;
        detail.push(format!("{p}: {same:.2}>{cross:.2}"));
    }
    Ok(detail.join(", "))
}

fn c8_selection_frequencies() -> Outcome {
    let design = SimDesign::selection_study(500, 0.5, 100, 808);
    let aic = run_selection_study(&design, Criterion::Aic).map_err(|e| e.to_string())?;
    let bic = run_selection_study(&design, Criterion::Bic).map_err(|e| e.to_string())?;
    let freq = |r: &mpr_core::FrequencyReport, c: &str| r.frequency(c).unwrap();
    for c in ["x1", "x2", "x7"] {
        let f = freq(&aic, c).0;
        ensure(f >= 0.95, format!("{c} scale frequency {f:.2}"))?;
    }
    for c in ["x1", "x2", "x5"] {
        let f = freq(&aic, c).1;
        ensure(f >= 0.95, format!("{c} shape frequency {f:.2}"))?;
    }
    let mut nulls = Vec::new();
    for c in ["x9", "x10"] {
        let (s, z) = freq(&aic, c);
        for f in [s, z] {
            ensure((0.08..=0.35).contains(&f), format!("AIC null frequency {c} = {f:.2}"))?;
        }
        nulls.push((s, z, freq(&bic, c)));
    }
    let aic_null = nulls.iter().map(|n| n.0 + n.1).sum::<f64>() / 4.0;
    let bic_null = nulls.iter().map(|n| n.2 .0 + n.2 .1).sum::<f64>() / 4.0;
    ensure(bic_null < aic_null, format!("BIC null {bic_null:.3} vs AIC null {aic_null:.3}"))?;
    Ok(format!(
        "strong effects >= 0.95; AIC null {:.2?}; mean null AIC {aic_null:.3} > BIC {bic_null:.3}",
        nulls.iter().map(|n| (n.0, n.1)).collect::<Vec<_>>()
    ))
}

fn c9_selection_oracle() -> Outcome {
    let candidates = CandidateSet::new(["x1", "x2"]).map_err(|e| e.to_string())?;
    let subsets: [&[&str]; 4] = [&[], &["x1"], &["x2"], &["x1", "x2"]];
    let mut non_null = 0;
    for seed in 0..20u64 {
        let ds = binary_dataset(900 + seed, 250, &[-0.5, 0.45, 0.0], &[0.1, 0.0, 0.3], 0.4);
        let fits: Vec<_> = subsets
            .iter()
            .flat_map(|x| subsets.iter().map(move |z| ModelSpec::new(x.iter().copied(), z.iter().copied())))
            .map(|spec| fit_spec(&ds, &spec, None, &FitOptions::default()).map(|f| (spec, f)))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for criterion in [Criterion::Aic, Criterion::Bic] {
            let (best, _) = fits
                .iter()
                .min_by(|a, b| criterion.value(&a.1).partial_cmp(&criterion.value(&b.1)).unwrap())
                .unwrap();
            let trace = step_mpr(&ds, &candidates, criterion, &SelectionOptions::default()).map_err(|e| e.to_string())?;
            let key = |v: &[String]| {
                let mut v = v.to_vec();
                v.sort();
                v
            };
            ensure(
                key(&trace.final_spec.scale_terms) == key(&best.scale_terms)
                    && key(&trace.final_spec.shape_terms) == key(&best.shape_terms),
                format!("seed {seed} {criterion}: step {} vs lattice {}", trace.final_spec, best),
            )?;
            if *best != ModelSpec::null() {
                non_null += 1;
            }
        }
    }
    Ok(format!("40/40 runs match the 16-model lattice optimum ({non_null} non-null)"))
}

fn c10_chi_square() -> Outcome {
    let sf2 = mpr_core::chi_square_sf(5.991f64, 2).map_err(|e| e.to_string())?;
    let sf1 = mpr_core::chi_square_sf(3.841f64, 1).map_err(|e| e.to_string())?;
    let closed2 = (-5.991f64 / 2.0).exp();
    let closed1 = statrs::function::erf::erfc((3.841f64 / 2.0).sqrt());
    ensure((sf2 - 0.05).abs() <= 1e-4, format!("SF(5.991, 2) = {sf2}"))?;
    ensure((sf1 - 0.05).abs() <= 1e-4, format!("SF(3.841, 1) = {sf1}"))?;
    ensure((sf2 - closed2).abs() < 1e-9, format!("df 2 closed form {closed2} vs {sf2}"))?;
    ensure((sf1 - closed1).abs() < 1e-9, format!("df 1 closed form {closed1} vs {sf1}"))?;
    Ok(format!("SF(5.991,2) = {sf2:.6}, SF(3.841,1) = {sf1:.6}"))
}

fn c11_duality() -> Outcome {
    let (mut outside, mut agree) = (0, 0);
    let q = chi_square_quantile(0.95f64, 2).map_err(|e| e.to_string())?;
    for seed in 0..50u64 {
        let ds = binary_dataset(1100 + seed, 200, &[-0.5, 0.2], &[0.1, 0.15], 0.3);
        let m = fit_spec(&ds, &ModelSpec::new(["x1"], ["x1"]), None, &FitOptions::default()).map_err(|e| e.to_string())?;
        let effect = EffectKey::term("x1");
        let p = mpr_core::wald_joint(&m, &effect).map_err(|e| e.to_string())?.p_value;
        let e = confidence_ellipse(&m, &effect, 0.95, 100).map_err(|e| e.to_string())?;
        let origin_outside = !e.contains([0.0, 0.0]);
        ensure(origin_outside == (p < 0.05), format!("seed {seed}: p = {p}, Q(0) = {} vs {q}", e.quadratic_form([0.0, 0.0])))?;
        agree += 1;
        outside += usize::from(origin_outside);
    }
    Ok(format!("{agree}/50 agree ({outside} with the origin outside)"))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_mpr")).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    } else {
        Err(format!("mpr {} exited {:?}: {}", args[0], out.status.code(), String::from_utf8_lossy(&out.stderr)))
    }
}

fn c12_pipeline() -> Outcome {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_lung.csv");
    let input = data.to_str().unwrap();
    let text = std::fs::read_to_string(&data).map_err(|e| e.to_string())?;
    let ds = mpr_core::parse_dataset(&text, "time", "status", &Default::default()).map_err(|e| e.to_string())?;
    let censored = 1.0 - ds.n_events() as f64 / ds.n() as f64;
    ensure(ds.n() == 855 && ds.covariate_names().len() == 9, "bundled data shape")?;
    ensure((censored - 0.21).abs() < 0.02, format!("censoring {censored:.3}"))?;

    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let out = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let all = ds.covariate_names().join(",");
    run_cli(&[
        "fit", "--input", input, "--scale", "treatment", "--shape", "treatment", "--compare-ph", "--ellipse",
        "treatment[Surgery]", "--ellipse", "treatment[C+R]", "--out", &out("fit"),
    ])?;
    run_cli(&["fit", "--input", input, "--scale", &all, "--shape", &all, "--out", &out("full")])?;
    run_cli(&["step", "--input", input, "--criterion", "bic", "--out", &out("step")])?;
    run_cli(&[
        "hr", "--input", input, "--scale", "treatment", "--shape", "treatment", "--effect", "treatment[Surgery]",
        "--effect", "treatment[Chemo]", "--effect", "treatment[Radio]", "--effect", "treatment[C+R]", "--out",
        &out("hr"),
    ])?;
    run_cli(&[
        "km", "--input", input, "--by", "treatment", "--overlay", "--scale", "treatment", "--shape", "treatment",
        "--out", &out("km"),
    ])?;
    let report = std::fs::read_to_string(dir.path().join("fit/report.json")).map_err(|e| e.to_string())?;
    ensure(report.contains("joint_tests") && report.contains("lrt_against_ph"), "fit report content")?;
    let mut csvs = 0;
    for sub in ["fit", "step", "hr", "km"] {
        for entry in std::fs::read_dir(dir.path().join(sub)).map_err(|e| e.to_string())? {
            let p = entry.map_err(|e| e.to_string())?.path();
            if p.extension().is_some_and(|e| e == "csv") {
                read_table(&std::fs::read_to_string(&p).map_err(|e| e.to_string())?)
                    .map_err(|e| format!("{}: {e}", p.display()))?;
                csvs += 1;
            }
        }
    }
    Ok(format!("fit, full fit, step, hr, km ran; {csvs} CSV artefacts re-parse; censoring {censored:.3}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("information-criterion arithmetic", c1_information_criteria),
        ("LRT consistency", c2_lrt),
        ("PH reduction", c3_ph_reduction),
        ("crossing-time identity", c4_crossing_time),
        ("derivative correctness", c5_derivatives),
        ("estimator consistency and SE calibration", c6_consistency),
        ("correlation structure", c7_correlation_structure),
        ("selection frequencies", c8_selection_frequencies),
        ("selection-oracle equivalence", c9_selection_oracle),
        ("chi-square utilities", c10_chi_square),
        ("joint test / ellipse duality", c11_duality),
        ("end-to-end pipeline on bundled data", c12_pipeline),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {id:>2}  {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {id:>2}  {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criterion/criteria failed");
        ExitCode::FAILURE
    }
}
