mod common;

use common::{binary_dataset, random_problem, rng};
use mpr_core::data::encode_design;
use mpr_core::model::default_start;
use mpr_core::{
    fit, log_likelihood, Column, Dataset, DesignMatrices, FitOptions, Matrix, ModelSpec, MprError, Theta,
};

/// Nelder-Mead minimiser used only as an independent reference.
fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], step: f64, iters: usize) -> Vec<f64> {
    let k = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..k {
        let mut v = start.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    for _ in 0..iters {
        let mut order: Vec<usize> = (0..=k).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let centroid: Vec<f64> = (0..k).map(|j| simplex[..k].iter().map(|v| v[j]).sum::<f64>() / k as f64).collect();
        let along = |c: f64| -> Vec<f64> { (0..k).map(|j| centroid[j] + c * (simplex[k][j] - centroid[j])).collect() };
        let refl = along(-1.0);
        let fr = f(&refl);
        if fr < vals[0] {
            let exp = along(-2.0);
            let fe = f(&exp);
            if fe < fr {
                simplex[k] = exp;
                vals[k] = fe;
            } else {
                simplex[k] = refl;
                vals[k] = fr;
            }
        } else if fr < vals[k - 1] {
            simplex[k] = refl;
            vals[k] = fr;
        } else {
            let con = along(0.5);
            let fc = f(&con);
            if fc < vals[k] {
                simplex[k] = con;
                vals[k] = fc;
            } else {
                for i in 1..=k {
                    simplex[i] = (0..k).map(|j| simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j])).collect();
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }
    let best = (0..=k).min_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap()).unwrap();
    simplex[best].clone()
}

#[test]
fn intercept_only_fit_matches_direct_search() {
    let mut r = rng(2);
    let (d, _) = random_problem(&mut r, 200, 1, 1);
    let m = fit(&d, &FitOptions::default()).unwrap();
    assert!(m.converged);
    let nll = |v: &[f64]| -log_likelihood(&Theta::new(vec![v[0]], vec![v[1]]), &d).unwrap();
    let reference = nelder_mead(nll, &[0.0, 0.0], 0.5, 2000);
    assert!((m.theta.beta[0] - reference[0]).abs() < 1e-6);
    assert!((m.theta.alpha[0] - reference[1]).abs() < 1e-6);
    assert!(m.max_abs_score < 1e-8);
}

#[test]
fn fixed_unit_shape_gives_exponential_rate() {
    let mut r = rng(3);
    let (d, _) = random_problem(&mut r, 150, 1, 1);
    let m = fit(&d, &FitOptions::default().with_fixed(vec![1])).unwrap();
    let events = d.status.iter().filter(|&&s| s).count() as f64;
    let exposure: f64 = d.time.iter().sum();
    assert!((m.theta.beta[0] - (events / exposure).ln()).abs() < 1e-10);
    assert_eq!(m.theta.alpha[0], 0.0);
    assert_eq!(m.std_errors()[1], 0.0);
}

#[test]
fn fit_recovers_generating_values() {
    let mut r = rng(4);
    let ds = binary_dataset(&mut r, 4000, &[-1.0, 0.7], &[0.2, -0.3], 0.1);
    let d = encode_design::<f64>(&ds, &ModelSpec::new(["c1"], ["c1"])).unwrap();
    let m = fit(&d, &FitOptions::default()).unwrap();
    let se = m.std_errors();
    for (est, (truth, s)) in m.theta.to_vec().iter().zip([-1.0, 0.7, 0.2, -0.3].iter().zip(se)) {
        assert!((est - truth).abs() < 4.0 * s, "{est} vs {truth} (se {s})");
    }
}

#[test]
fn default_start_uses_crude_rate() {
    let mut r = rng(8);
    let (d, _) = random_problem(&mut r, 40, 3, 2);
    let s = default_start(&d);
    assert!(s.alpha.iter().all(|&a| a == 0.0));
    assert!(s.beta[1..].iter().all(|&b| b == 0.0));
}

fn factor_dataset() -> Dataset {
    let mut r = rng(9);
    let base = binary_dataset(&mut r, 300, &[-0.5, 0.8], &[0.1, 0.3], 0.2);
    let cells: Vec<&str> = (0..300).map(|i| ["A", "B", "C"][i % 3]).collect();
    let Column::Numeric(c1) = base.column("c1").unwrap().clone() else { unreachable!() };
    Dataset::new(
        base.time().to_vec(),
        base.status().to_vec(),
        vec![
            ("c1".into(), Column::Numeric(c1)),
            ("grp".into(), Column::categorical_from_cells(&cells)),
        ],
    )
    .unwrap()
}

#[test]
fn reference_level_does_not_change_the_likelihood() {
    let ds = factor_dataset();
    let spec = ModelSpec::new(["c1", "grp"], ["grp"]);
    let a = fit(&encode_design::<f64>(&ds, &spec).unwrap(), &FitOptions::default()).unwrap();
    let b = fit(
        &encode_design::<f64>(&ds, &spec.clone().with_reference("grp", "C")).unwrap(),
        &FitOptions::default(),
    )
    .unwrap();
    assert!((a.loglik - b.loglik).abs() < 1e-8);
    // C vs A in one coding is the negation of A vs C in the other
    let ca = a.theta.beta[a.index_of(mpr_core::Component::Scale, "grp[C]").unwrap()];
    let ac = b.theta.beta[b.index_of(mpr_core::Component::Scale, "grp[A]").unwrap()];
    assert!((ca + ac).abs() < 1e-6);
}

#[test]
fn collinear_columns_are_reported() {
    let ds = factor_dataset();
    let Column::Numeric(c1) = ds.column("c1").unwrap().clone() else { unreachable!() };
    let twice: Vec<f64> = c1.iter().map(|v| 2.0 * v).collect();
    let ds = Dataset::new(
        ds.time().to_vec(),
        ds.status().to_vec(),
        vec![("c1".into(), Column::Numeric(c1)), ("c1x2".into(), Column::Numeric(twice))],
    )
    .unwrap();
    match encode_design::<f64>(&ds, &ModelSpec::new(["c1", "c1x2"], Vec::<&str>::new())) {
        Err(MprError::RankDeficient { columns, .. }) => assert!(columns.iter().any(|c| c.contains("c1"))),
        other => panic!("expected rank deficiency, got {other:?}"),
    }
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let mut r = rng(10);
    let (d, _) = random_problem(&mut r, 100, 2, 2);
    let opts = FitOptions { max_iter: 1, ..FitOptions::default() };
    let m = fit(&d, &opts).unwrap();
    assert!(!m.converged);
    assert_eq!(m.iterations, 1);
}

#[test]
fn single_precision_fit_agrees() {
    let mut r = rng(11);
    let (d, _) = random_problem(&mut r, 300, 2, 2);
    let m64 = fit(&d, &FitOptions::default()).unwrap();
    let d32 = DesignMatrices::<f32>::from_matrices(
        d.x.map(|v| v as f32),
        d.z.map(|v| v as f32),
        d.time.iter().map(|&v| v as f32).collect(),
        d.status.clone(),
    )
    .unwrap();
    let m32 = fit(&d32, &FitOptions::default()).unwrap();
    for (a, b) in m64.theta.to_vec().iter().zip(m32.theta.to_vec()) {
        assert!((a - b as f64).abs() < 1e-3, "{a} vs {b}");
    }
}

#[test]
fn huge_linear_predictor_is_an_overflow_error() {
    let x = Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
    let d = DesignMatrices::from_matrices(x.clone(), x, vec![1e10, 2.0], vec![true, false]).unwrap();
    let theta = Theta::new(vec![0.0], vec![5.0]);
    assert!(matches!(log_likelihood(&theta, &d), Err(MprError::Overflow { .. })));
}
