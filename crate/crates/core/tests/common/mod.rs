#![allow(dead_code)]

use mpr_core::sim::{generate_event_times, stream_rng};
use mpr_core::{Column, Dataset, DesignMatrices, Matrix, Theta};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    stream_rng(seed, 0)
}

/// Random design with `p` scale and `q` shape columns (intercepts included,
/// the shape block reusing the leading scale covariates), times drawn from
/// the model at `theta` and roughly 30% uniform censoring.
pub fn random_problem(rng: &mut ChaCha8Rng, n: usize, p: usize, q: usize) -> (DesignMatrices<f64>, Theta<f64>) {
    assert!(q <= p);
    let mut xs = Vec::with_capacity(n * p);
    for _ in 0..n {
        xs.push(1.0);
        for _ in 1..p {
            xs.push(rng.gen_range(-1.0..1.0));
        }
    }
    let x = Matrix::from_row_major(n, p, xs).unwrap();
    let zcols: Vec<usize> = (0..q).collect();
    let rows: Vec<usize> = (0..n).collect();
    let z = x.select(&rows, &zcols);
    let beta: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let alpha: Vec<f64> = (0..q).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let t = generate_event_times(&x, &z, &beta, &alpha, rng).unwrap();
    let mut time = Vec::with_capacity(n);
    let mut status = Vec::with_capacity(n);
    for ti in t {
        if rng.gen::<f64>() < 0.3 {
            time.push(ti * rng.gen_range(0.05..1.0));
            status.push(false);
        } else {
            time.push(ti);
            status.push(true);
        }
    }
    status[0] = true;
    let d = DesignMatrices::from_matrices(x, z, time, status).unwrap();
    (d, Theta::new(beta, alpha))
}

/// Dataset with binary numeric covariates `c1..ck`, simulated from the model.
pub fn binary_dataset(rng: &mut ChaCha8Rng, n: usize, beta: &[f64], alpha: &[f64], censor_rate: f64) -> Dataset {
    let k = beta.len() - 1;
    let mut xs = Vec::with_capacity(n * (k + 1));
    for _ in 0..n {
        xs.push(1.0);
        for _ in 0..k {
            xs.push(if rng.gen::<bool>() { 1.0 } else { 0.0 });
        }
    }
    let x = Matrix::from_row_major(n, k + 1, xs).unwrap();
    let t = generate_event_times(&x, &x, beta, alpha, rng).unwrap();
    let mut time = Vec::with_capacity(n);
    let mut status = Vec::with_capacity(n);
    for ti in t {
        let c = if censor_rate > 0.0 {
            -(1.0 - rng.gen::<f64>()).ln() / censor_rate
        } else {
            f64::INFINITY
        };
        time.push(ti.min(c));
        status.push(ti <= c);
    }
    let columns = (1..=k)
        .map(|j| (format!("c{j}"), Column::Numeric(x.column(j))))
        .collect();
    Dataset::new(time, status, columns).unwrap()
}
