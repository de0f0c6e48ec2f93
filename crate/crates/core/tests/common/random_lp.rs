//! Seeded random instances.

use galp_core::{CscMatrix, StandardLp};
use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m×n` with entries in `[-1, 1]`, about 30% zeros, and a unit-ish
/// diagonal so that the rows stay independent.
pub fn dense_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<f64>> {
    let mut a: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        0.0
                    } else {
                        rng.gen_range(-1.0..1.0)
                    }
                })
                .collect()
        })
        .collect();
    for (i, row) in a.iter_mut().enumerate() {
        let j = i % n;
        row[j] = rng.gen_range(1.0..2.0);
    }
    a
}

/// Feasible instance (`b = A·x0` for an interior `x0`), random cost, a
/// fraction of columns bounded above.
pub fn random_lp(rng: &mut ChaCha8Rng, m: usize, n: usize, bounded_frac: f64) -> StandardLp {
    random_lp_with_point(rng, m, n, bounded_frac).0
}

/// [`random_lp`] together with the strictly interior `x0` behind `b`.
pub fn random_lp_with_point(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    bounded_frac: f64,
) -> (StandardLp, Vec<f64>) {
    let a = dense_matrix(rng, m, n);
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
    let upper: Vec<f64> = x0
        .iter()
        .map(|x| {
            if rng.gen_bool(bounded_frac) {
                x + rng.gen_range(0.5..3.0)
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let b = a
        .iter()
        .map(|row| row.iter().zip(&x0).map(|(a, x)| a * x).sum())
        .collect();
    let c = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (
        StandardLp::new(CscMatrix::from_dense(&a), b, c, upper).unwrap(),
        x0,
    )
}

/// A point strictly inside the box, away from its faces.
pub fn interior_point(rng: &mut ChaCha8Rng, lp: &StandardLp) -> Vec<f64> {
    lp.upper
        .iter()
        .map(|&u| {
            if u.is_finite() {
                u * rng.gen_range(0.05..0.95)
            } else {
                rng.gen_range(0.05..5.0)
            }
        })
        .collect()
}

/// Instance built around a chosen nondegenerate primal-dual pair, so the
/// optimum is unique and strictly complementary.
pub struct Planted {
    pub lp: StandardLp,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub basis: Vec<usize>,
}

pub fn planted_lp(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Planted {
    loop {
        let a = dense_matrix(rng, m, n);
        let basis: Vec<usize> = sample(rng, n, m).into_vec();
        let bmat = DMatrix::from_fn(m, m, |i, q| a[i][basis[q]]);
        let sv = bmat.singular_values();
        if sv.min() < 0.05 {
            continue;
        }
        let mut x = vec![0.0; n];
        let mut s = vec![0.0; n];
        for j in 0..n {
            if basis.contains(&j) {
                x[j] = rng.gen_range(1.0..3.0);
            } else {
                s[j] = rng.gen_range(1.0..2.0);
            }
        }
        let y: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c: Vec<f64> = (0..n)
            .map(|j| (0..m).map(|i| a[i][j] * y[i]).sum::<f64>() + s[j])
            .collect();
        let b: Vec<f64> = a
            .iter()
            .map(|row| row.iter().zip(&x).map(|(a, x)| a * x).sum())
            .collect();
        // Inactive upper bounds on a third of the columns.
        let upper: Vec<f64> = x
            .iter()
            .map(|xj| {
                if rng.gen_bool(0.3) {
                    xj + rng.gen_range(1.0..3.0)
                } else {
                    f64::INFINITY
                }
            })
            .collect();
        let lp = StandardLp::new(CscMatrix::from_dense(&a), b, c, upper).unwrap();
        return Planted { lp, x, y, s, basis };
    }
}
