//! Dense reference computations.

use nalgebra::{DMatrix, DVector};

pub fn to_matrix(a: &[Vec<f64>]) -> DMatrix<f64> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    DMatrix::from_fn(m, n, |i, j| a[i][j])
}

/// `−H^{−1/2}·(I − H^{−1/2}Aᵗ(AH⁻¹Aᵗ)⁻¹AH^{−1/2})·H^{−1/2}·c`, built as
/// explicit matrices.
pub fn projector_descent(a: &[Vec<f64>], h: &[f64], c: &[f64]) -> Vec<f64> {
    let a = to_matrix(a);
    let n = h.len();
    let d = DMatrix::from_diagonal(&DVector::from_iterator(n, h.iter().map(|h| h.powf(-0.5))));
    let k = &a * &d;
    let kkt = &k * k.transpose();
    let inv = kkt.try_inverse().expect("A H⁻¹ Aᵗ singular");
    let p = DMatrix::<f64>::identity(n, n) - k.transpose() * inv * &k;
    let c = DVector::from_column_slice(c);
    let v = -(&d * p * &d * c);
    v.iter().copied().collect()
}

/// LU solve.
pub fn gauss_solve(m: &[Vec<f64>], r: &[f64]) -> Vec<f64> {
    let x = to_matrix(m)
        .lu()
        .solve(&DVector::from_column_slice(r))
        .expect("singular");
    x.iter().copied().collect()
}

/// Triple loop `Σ_j A_ij·dinv_j·A_kj`.
pub fn normal_triple_loop(a: &[Vec<f64>], dinv: &[f64]) -> Vec<Vec<f64>> {
    let m = a.len();
    let mut out = vec![vec![0.0; m]; m];
    for i in 0..m {
        for k in 0..m {
            for (j, d) in dinv.iter().enumerate() {
                out[i][k] += a[i][j] * d * a[k][j];
            }
        }
    }
    out
}

/// Central difference of `f` in coordinate `j` with step `1e-6·(1+|x_j|)`.
pub fn central_difference(f: impl Fn(&[f64]) -> f64, x: &[f64], j: usize) -> f64 {
    let h = 1e-6 * (1.0 + x[j].abs());
    let mut p = x.to_vec();
    let mut q = x.to_vec();
    p[j] += h;
    q[j] -= h;
    (f(&p) - f(&q)) / (2.0 * h)
}
