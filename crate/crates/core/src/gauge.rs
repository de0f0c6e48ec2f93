//! Concave gauge `ξ_r`, the penalty `g_r = −(1/r)·ξ_r^r` built on it, and the
//! diagonal scalings `G` (gradient part) and `H` (curvature part) that drive
//! the affine-scaling directions.
//!
//! With a bounded set `I`, every `j ∈ I` contributes the slack `u_j − x_j`
//! as an extra coordinate of the gauge. At `r = 0` the gauge is the
//! normalized geometric mean and `G`, `H` reduce to the logarithmic-barrier
//! derivatives.

use thiserror::Error;

/// Clamp range for `|h_j|` and `|g_j|`.
pub const DIAGONAL_FLOOR: f64 = 1e-32;
pub const DIAGONAL_CEILING: f64 = 1e32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    #[error("r = {0} is outside [0, 1)")]
    InvalidR(f64),
    #[error("the penalty value is undefined at r = 0")]
    RZeroUnsupported,
    #[error("point is not strictly interior at coordinate {index} (x = {value})")]
    NotInterior { index: usize, value: f64 },
    #[error("length mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeParams {
    r: f64,
    upper: Vec<f64>,
}

impl GaugeParams {
    /// `upper[j] = +inf` marks `j` as unbounded.
    pub fn new(r: f64, upper: Vec<f64>) -> Result<Self, GaugeError> {
        if !(0.0..1.0).contains(&r) {
            return Err(GaugeError::InvalidR(r));
        }
        Ok(Self { r, upper })
    }

    pub fn unbounded(r: f64, n: usize) -> Result<Self, GaugeError> {
        Self::new(r, vec![f64::INFINITY; n])
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn num_bounded(&self) -> usize {
        self.upper.iter().filter(|u| u.is_finite()).count()
    }

    fn check_len(&self, x: &[f64]) -> Result<(), GaugeError> {
        if x.len() == self.upper.len() {
            Ok(())
        } else {
            Err(GaugeError::Dimension(format!(
                "x has {} entries, bounds have {}",
                x.len(),
                self.upper.len()
            )))
        }
    }

    /// All gauge coordinates (`x_j`, then `u_j − x_j` for `j ∈ I`), or `None`
    /// when one of them is negative.
    fn coordinates<'a>(&'a self, x: &'a [f64]) -> Option<impl Iterator<Item = f64> + 'a> {
        let slacks = x
            .iter()
            .zip(&self.upper)
            .filter(|(_, u)| u.is_finite())
            .map(|(x, u)| u - x);
        let inside = x.iter().all(|&v| v >= 0.0) && slacks.clone().all(|s| s >= 0.0);
        inside.then(|| x.iter().copied().chain(slacks))
    }
}

/// `ξ_r(x)`; `−inf` outside the box.
pub fn xi_r(x: &[f64], p: &GaugeParams) -> f64 {
    if p.check_len(x).is_err() {
        return f64::NEG_INFINITY;
    }
    let Some(coords) = p.coordinates(x) else {
        return f64::NEG_INFINITY;
    };
    if p.r == 0.0 {
        // (Π coords)^{1/(n+n_I)} through logs to stay in range.
        let mut count = 0usize;
        let mut log_sum = 0.0;
        for v in coords {
            count += 1;
            if v == 0.0 {
                return 0.0;
            }
            log_sum += v.ln();
        }
        if count == 0 {
            return 0.0;
        }
        (log_sum / count as f64).exp()
    } else {
        coords.map(|v| v.powf(p.r)).sum::<f64>().powf(1.0 / p.r)
    }
}

/// `g_r(x) = −(1/r)·Σ coords^r`; `+inf` outside the box.
pub fn penalty(x: &[f64], p: &GaugeParams) -> Result<f64, GaugeError> {
    if p.r == 0.0 {
        return Err(GaugeError::RZeroUnsupported);
    }
    p.check_len(x)?;
    Ok(match p.coordinates(x) {
        Some(coords) => -coords.map(|v| v.powf(p.r)).sum::<f64>() / p.r,
        None => f64::INFINITY,
    })
}

/// `F_{r,μ}(x) = <c,x> + μ·g_r(x)`.
pub fn penalized_objective(
    x: &[f64],
    c: &[f64],
    mu: f64,
    p: &GaugeParams,
) -> Result<f64, GaugeError> {
    let g = penalty(x, p)?;
    if g.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(x.iter().zip(c).map(|(a, b)| a * b).sum::<f64>() + mu * g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingDiagonals {
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    /// Entries that hit the clamp range.
    pub clamps: usize,
}

impl ScalingDiagonals {
    /// `1 / h`
    pub fn h_inverse(&self) -> Vec<f64> {
        self.h.iter().map(|h| 1.0 / h).collect()
    }
}

fn clamp_magnitude(v: f64, clamps: &mut usize) -> f64 {
    let a = v.abs();
    if a > DIAGONAL_CEILING {
        *clamps += 1;
        DIAGONAL_CEILING.copysign(v)
    } else {
        v
    }
}

/// Checks `0 < x_j` and `x_j < u_j`.
pub fn check_interior(x: &[f64], upper: &[f64]) -> Result<(), GaugeError> {
    for (index, (&v, &u)) in x.iter().zip(upper).enumerate() {
        if !(v > 0.0) || !(v < u) || !v.is_finite() {
            return Err(GaugeError::NotInterior { index, value: v });
        }
    }
    Ok(())
}

/// `g_j = x_j^{r−1} − (u_j−x_j)^{r−1}` and `h_j = x_j^{r−2} + (u_j−x_j)^{r−2}`,
/// the slack terms present only for bounded `j`. `h` is clamped into
/// `[DIAGONAL_FLOOR, DIAGONAL_CEILING]` and `|g|` to `DIAGONAL_CEILING`.
pub fn scaling_diagonals(x: &[f64], p: &GaugeParams) -> Result<ScalingDiagonals, GaugeError> {
    p.check_len(x)?;
    check_interior(x, &p.upper)?;
    let (e1, e2) = (p.r - 1.0, p.r - 2.0);
    let mut clamps = 0;
    let mut g = Vec::with_capacity(x.len());
    let mut h = Vec::with_capacity(x.len());
    for (&xj, &uj) in x.iter().zip(&p.upper) {
        let (mut gj, mut hj) = (xj.powf(e1), xj.powf(e2));
        if uj.is_finite() {
            let sj = uj - xj;
            gj -= sj.powf(e1);
            hj += sj.powf(e2);
        }
        g.push(clamp_magnitude(gj, &mut clamps));
        let hj = if hj < DIAGONAL_FLOOR {
            clamps += 1;
            DIAGONAL_FLOOR
        } else {
            clamp_magnitude(hj, &mut clamps)
        };
        h.push(hj);
    }
    Ok(ScalingDiagonals { g, h, clamps })
}

/// `∇F_{r,μ}(x) = c − μ·g`.
pub fn penalty_gradient(
    x: &[f64],
    c: &[f64],
    mu: f64,
    p: &GaugeParams,
) -> Result<Vec<f64>, GaugeError> {
    let diag = scaling_diagonals(x, p)?;
    Ok(c.iter().zip(&diag.g).map(|(c, g)| c - mu * g).collect())
}

/// Diagonal of `∇²F_{r,μ}(x) = μ(1−r)·H`.
pub fn penalty_hessian_diag(x: &[f64], mu: f64, p: &GaugeParams) -> Result<Vec<f64>, GaugeError> {
    let diag = scaling_diagonals(x, p)?;
    let scale = mu * (1.0 - p.r);
    Ok(diag.h.iter().map(|h| scale * h).collect())
}
