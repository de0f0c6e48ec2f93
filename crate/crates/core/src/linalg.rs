//! Normal-equations kernel: assemble `A·diag(dinv)·Aᵗ`, factor it by dense
//! Cholesky and solve.

use thiserror::Error;

use crate::model::CscMatrix;

/// Diagonal shifts tried in order, as multiples of the matrix diagonal.
pub const REGULARIZATION_LADDER: [f64; 5] = [0.0, 1e-12, 1e-10, 1e-8, 1e-6];

/// Pivots at or below this value reject the current shift.
pub const PIVOT_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("non-finite scaling entry {value} at column {index}")]
    NonFiniteInput { index: usize, value: f64 },
    #[error("Cholesky factorization failed at pivot {pivot} even with the largest regularization")]
    FactorizationFailed { pivot: usize },
}

/// Symmetric `m×m` matrix stored dense, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl NormalMatrix {
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        Self {
            dim,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.data[i * self.dim + k]
    }

    pub fn mul_vec(&self, z: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.dim.max(1))
            .take(self.dim)
            .map(|row| row.iter().zip(z).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// `A·diag(dinv)·Aᵗ`. Only the lower triangle is accumulated; the upper one is
/// a copy, so the result is exactly symmetric.
pub fn assemble_normal(a: &CscMatrix, dinv: &[f64]) -> Result<NormalMatrix, LinalgError> {
    assert_eq!(dinv.len(), a.ncols());
    let m = a.nrows();
    let mut data = vec![0.0; m * m];
    let mut col: Vec<(usize, f64)> = Vec::new();
    for (j, &dj) in dinv.iter().enumerate() {
        if !dj.is_finite() || dj < 0.0 {
            return Err(LinalgError::NonFiniteInput {
                index: j,
                value: dj,
            });
        }
        if dj == 0.0 {
            continue;
        }
        col.clear();
        col.extend(a.column(j));
        for (p, &(ip, vp)) in col.iter().enumerate() {
            let scaled = vp * dj;
            for &(iq, vq) in &col[..=p] {
                data[ip * m + iq] += scaled * vq;
            }
        }
    }
    for i in 0..m {
        for k in 0..i {
            data[k * m + i] = data[i * m + k];
        }
    }
    Ok(NormalMatrix { dim: m, data })
}

/// Lower-triangular `L` with `M + ρ·diag(M) ≈ L·Lᵗ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<f64>,
    regularization: f64,
}

impl CholeskyFactor {
    /// Identity factor of size `dim`.
    pub fn identity(dim: usize) -> Self {
        let mut lower = vec![0.0; dim * dim];
        for i in 0..dim {
            lower[i * dim + i] = 1.0;
        }
        Self {
            dim,
            lower,
            regularization: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The shift `ρ` that was needed.
    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.lower[i * self.dim + k]
    }

    /// Forward then back substitution.
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim;
        assert_eq!(rhs.len(), n);
        let l = &self.lower;
        let mut z = rhs.to_vec();
        for i in 0..n {
            let row = &l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&z[..i]).map(|(a, b)| a * b).sum();
            z[i] = (z[i] - s) / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in i + 1..n {
                s -= l[k * n + i] * z[k];
            }
            z[i] = s / l[i * n + i];
        }
        z
    }
}

fn try_cholesky(m: &NormalMatrix, shift: &[f64]) -> Result<Vec<f64>, usize> {
    let n = m.dim;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m.get(j, j) + shift[j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > PIVOT_FLOOR) {
            return Err(j);
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = m.get(i, j);
            let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
            s -= ri.iter().zip(rj).map(|(a, b)| a * b).sum::<f64>();
            l[i * n + j] = s / d;
        }
    }
    Ok(l)
}

/// Cholesky of `M + ρ·diag(M)` for the smallest `ρ` on the ladder that keeps
/// every pivot above [`PIVOT_FLOOR`]. Zero diagonal entries are shifted by
/// `ρ·max_k M_kk` instead.
pub fn factor(m: &NormalMatrix) -> Result<CholeskyFactor, LinalgError> {
    let n = m.dim;
    let max_diag = (0..n).map(|i| m.get(i, i)).fold(0.0, f64::max);
    let base: Vec<f64> = (0..n)
        .map(|i| {
            let d = m.get(i, i);
            if d > 0.0 {
                d
            } else if max_diag > 0.0 {
                max_diag
            } else {
                1.0
            }
        })
        .collect();
    let mut last_pivot = 0;
    for &rho in &REGULARIZATION_LADDER {
        let shift: Vec<f64> = base.iter().map(|d| rho * d).collect();
        match try_cholesky(m, &shift) {
            Ok(lower) => {
                return Ok(CholeskyFactor {
                    dim: n,
                    lower,
                    regularization: rho,
                })
            }
            Err(pivot) => last_pivot = pivot,
        }
    }
    Err(LinalgError::FactorizationFailed { pivot: last_pivot })
}
