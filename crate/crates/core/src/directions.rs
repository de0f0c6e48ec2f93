//! Search directions at an interior point.
//!
//! Every direction here is a projection against the same operator
//! `A·H⁻¹·Aᵗ`, so one [`ScaledSystem`] (diagonals plus Cholesky factor) is
//! built per iterate and shared.

use crate::gauge::{scaling_diagonals, GaugeParams, ScalingDiagonals};
use crate::linalg::{assemble_normal, factor, CholeskyFactor};
use crate::model::{dot, StandardLp};
use crate::SolveError;

/// `H`, `H⁻¹` and the factor of `A·H⁻¹·Aᵗ` at one point.
#[derive(Debug, Clone)]
pub struct ScaledSystem {
    pub diagonals: ScalingDiagonals,
    pub h_inv: Vec<f64>,
    pub factor: CholeskyFactor,
}

impl ScaledSystem {
    pub fn build(lp: &StandardLp, x: &[f64], p: &GaugeParams) -> Result<Self, SolveError> {
        let diagonals = scaling_diagonals(x, p)?;
        let h_inv = diagonals.h_inverse();
        let normal = assemble_normal(&lp.a, &h_inv)?;
        let factor = factor(&normal)?;
        Ok(Self {
            diagonals,
            h_inv,
            factor,
        })
    }

    /// `H⁻¹·Aᵗ·(A·H⁻¹·Aᵗ)⁻¹·rhs`
    fn lift(&self, lp: &StandardLp, rhs: &[f64]) -> Vec<f64> {
        let z = self.factor.solve(rhs);
        lp.a.tr_mul_vec(&z)
            .iter()
            .zip(&self.h_inv)
            .map(|(v, hi)| v * hi)
            .collect()
    }

    /// `(A·H⁻¹·Aᵗ)⁻¹·A·H⁻¹·v`
    fn multiplier(&self, lp: &StandardLp, v: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = v.iter().zip(&self.h_inv).map(|(a, b)| a * b).collect();
        self.factor.solve(&lp.a.mul_vec(&scaled))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub d: Vec<f64>,
    /// Multiplier of the projection.
    pub y: Vec<f64>,
    /// `c − Aᵗy`
    pub s: Vec<f64>,
}

/// Everything computed at one iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionBundle {
    pub d: Vec<f64>,
    pub dx: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub reprojected: bool,
}

/// Affine-scaling direction `d = −H^{−1/2}·P·H^{−1/2}·c`, computed as
/// `y = (A·H⁻¹·Aᵗ)⁻¹·A·H⁻¹·c`, `s = c − Aᵗy`, `d = −H⁻¹·s`.
pub fn descent_direction(lp: &StandardLp, sys: &ScaledSystem) -> Descent {
    let y = sys.multiplier(lp, &lp.c);
    let aty = lp.a.tr_mul_vec(&y);
    let s: Vec<f64> = lp.c.iter().zip(&aty).map(|(c, v)| c - v).collect();
    let d = s.iter().zip(&sys.h_inv).map(|(s, hi)| -s * hi).collect();
    Descent { d, y, s }
}

/// Residual-canceling direction `dx = H⁻¹·Aᵗ·(A·H⁻¹·Aᵗ)⁻¹·(b − Ax)`, so that
/// `A·dx = b − Ax`.
pub fn feasibility_direction(lp: &StandardLp, x: &[f64], sys: &ScaledSystem) -> Vec<f64> {
    let ax = lp.a.mul_vec(x);
    let residual: Vec<f64> = lp.b.iter().zip(&ax).map(|(b, v)| b - v).collect();
    if residual.iter().all(|r| *r == 0.0) {
        return vec![0.0; x.len()];
    }
    sys.lift(lp, &residual)
}

/// Projects `d` once more onto `ker A` in the `H` metric:
/// `d − H⁻¹·Aᵗ·(A·H⁻¹·Aᵗ)⁻¹·A·d`.
pub fn reproject(lp: &StandardLp, sys: &ScaledSystem, d: &[f64]) -> Vec<f64> {
    let ad = lp.a.mul_vec(d);
    let correction = sys.lift(lp, &ad);
    d.iter().zip(&correction).map(|(d, c)| d - c).collect()
}

/// Newton step `d(μ)` on `min F_{r,μ}(x) s.t. Ax = b`, i.e. the solution of
/// `μ(1−r)H·d + (c − μ·g) + Aᵗy = 0`, `A·d = 0`.
pub fn newton_direction(
    lp: &StandardLp,
    x: &[f64],
    mu: f64,
    p: &GaugeParams,
) -> Result<Vec<f64>, SolveError> {
    assert!(mu > 0.0, "mu must be positive");
    let sys = ScaledSystem::build(lp, x, p)?;
    let grad: Vec<f64> =
        lp.c.iter()
            .zip(&sys.diagonals.g)
            .map(|(c, g)| c - mu * g)
            .collect();
    let y = sys.multiplier(lp, &grad);
    let aty = lp.a.tr_mul_vec(&y);
    let scale = mu * (1.0 - p.r());
    Ok(grad
        .iter()
        .zip(&aty)
        .zip(&sys.h_inv)
        .map(|((g, v), hi)| -(g - v) * hi / scale)
        .collect())
}

/// Largest `t` keeping `x + t·dir` inside `0 <= x <= upper`, optionally capped.
/// Returns `+inf` when nothing limits the step.
pub fn max_step(x: &[f64], upper: &[f64], dir: &[f64], cap: Option<f64>) -> f64 {
    let mut t = cap.unwrap_or(f64::INFINITY);
    for ((&xj, &uj), &dj) in x.iter().zip(upper).zip(dir) {
        if dj < 0.0 {
            t = t.min(-xj / dj);
        } else if dj > 0.0 && uj.is_finite() {
            t = t.min((uj - xj) / dj);
        }
    }
    t
}

/// Directions `dx` and `d` at `x` from one factorization.
pub fn direction_bundle(
    lp: &StandardLp,
    x: &[f64],
    sys: &ScaledSystem,
    reproject_descent: bool,
) -> DirectionBundle {
    let dx = feasibility_direction(lp, x, sys);
    let Descent { mut d, y, s } = descent_direction(lp, sys);
    if reproject_descent {
        d = reproject(lp, sys, &d);
    }
    DirectionBundle {
        d,
        dx,
        y,
        s,
        reprojected: reproject_descent,
    }
}

/// `<c, d>`; non-positive for any descent direction.
pub fn directional_cost(lp: &StandardLp, d: &[f64]) -> f64 {
    dot(&lp.c, d)
}
