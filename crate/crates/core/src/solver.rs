//! The main loop: starting point, alternating feasibility and descent moves,
//! dual recovery and the stopping test.

use crate::directions::{direction_bundle, directional_cost, max_step, ScaledSystem};
use crate::gauge::{check_interior, GaugeParams};
use crate::linalg::{assemble_normal, factor};
use crate::model::{dot, norm_inf, objective, primal_infeasibility, StandardLp};
use crate::SolveError;

/// Iterates growing past this norm while the objective keeps falling are
/// taken as a ray along which the problem is unbounded.
pub const DIVERGENCE_NORM: f64 = 1e20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StartPolicy {
    /// Pick between the two candidates.
    #[default]
    Auto,
    /// Column-norm heuristic.
    X1,
    /// Shifted minimum-norm solution of `Ax = b`.
    X2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Gauge exponent, `0 <= r < 1`.
    pub r: f64,
    pub epsilon: f64,
    pub max_iterations: usize,
    pub step_aggressive: f64,
    pub step_conservative: f64,
    /// Reproject `d` once the gap drops below this...
    pub reproject_gap: f64,
    /// ...or once more than this many iterations have run.
    pub reproject_after: usize,
    pub start: StartPolicy,
    /// Tolerated negativity of `s`, relative to `1 + ‖c‖∞`.
    pub dual_safeguard: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            r: 0.2,
            epsilon: 1e-8,
            max_iterations: 300,
            step_aggressive: 0.95,
            step_conservative: 0.65,
            reproject_gap: 1e-3,
            reproject_after: 20,
            start: StartPolicy::Auto,
            dual_safeguard: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn with_r(r: f64) -> Self {
        Self {
            r,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        let bad = |msg: String| Err(SolveError::InvalidConfig(msg));
        if !(0.0..1.0).contains(&self.r) {
            return bad(format!("r = {} is outside [0, 1)", self.r));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon = {} must be positive", self.epsilon));
        }
        if !(0.0 < self.step_conservative
            && self.step_conservative < self.step_aggressive
            && self.step_aggressive < 1.0)
        {
            return bad(format!(
                "step factors must satisfy 0 < {} < {} < 1",
                self.step_conservative, self.step_aggressive
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    IterationLimit,
    Unbounded,
    NumericalFailure,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::IterationLimit => "iteration-limit",
            Self::Unbounded => "unbounded",
            Self::NumericalFailure => "numerical-failure",
        }
    }
}

/// Dual estimates `(y, w, s)` with `s = c − Aᵗy + w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Duals {
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub s: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub s: Vec<f64>,
    pub rf: f64,
    pub rgap: f64,
    pub iteration: usize,
    pub clamps: usize,
    pub regularization: f64,
}

/// One row of the per-iteration trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    pub rf: f64,
    pub rgap: f64,
    pub step_feasibility: f64,
    pub step_descent: f64,
    /// `<c, x>` and `Rf` between the feasibility and the descent move.
    pub objective_mid: f64,
    pub rf_mid: f64,
    pub min_x: f64,
    /// `min_{j ∈ I} (u_j − x_j)`, `+inf` when `I` is empty.
    pub min_upper_gap: f64,
    pub clamps: usize,
    pub regularization: f64,
    pub reprojected: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: Status,
    pub iterations: usize,
    /// Standard-form objective `<c, x>`.
    pub objective: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub s: Vec<f64>,
    pub rf: f64,
    pub rgap: f64,
    pub trace: Vec<TraceRecord>,
    pub message: Option<String>,
}

impl SolveReport {
    /// Objective with a constant offset added back.
    pub fn objective_with_offset(&self, offset: f64) -> f64 {
        self.objective + offset
    }
}

/// `x¹_j = min(n/‖A_j‖, 0.9·u_j)` if `c_j < 0`, else `min(n/‖A_j‖, 0.1·u_j)`.
/// Empty columns use a unit norm.
pub fn starting_point_x1(lp: &StandardLp) -> Vec<f64> {
    let n = lp.n() as f64;
    (0..lp.n())
        .map(|j| {
            let norm = lp.a.column_norm(j);
            let base = n / if norm > 0.0 { norm } else { 1.0 };
            let frac = if lp.c[j] < 0.0 { 0.9 } else { 0.1 };
            base.min(frac * lp.upper[j])
        })
        .collect()
}

/// Minimum-norm solution `x̂ = Aᵗ(AAᵗ)⁻¹b` shifted by
/// `δ = max(−1.5·min x̂, 0.01·(1 + ‖x̂‖∞))`, then pulled into
/// `[0.01·u_j, 0.99·u_j]` on bounded columns.
pub fn starting_point_x2(lp: &StandardLp) -> Result<Vec<f64>, SolveError> {
    let ones = vec![1.0; lp.n()];
    let f = factor(&assemble_normal(&lp.a, &ones)?)?;
    let x_hat = lp.a.tr_mul_vec(&f.solve(&lp.b));
    let min = x_hat.iter().copied().fold(f64::INFINITY, f64::min);
    let delta = (-1.5 * min).max(0.01 * (1.0 + norm_inf(&x_hat)));
    Ok(x_hat
        .iter()
        .zip(&lp.upper)
        .map(|(&v, &u)| {
            let v = v + delta;
            if u.is_finite() {
                v.clamp(0.01 * u, 0.99 * u)
            } else {
                v
            }
        })
        .collect())
}

fn min_entry(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `x²` if `min x² > min x¹` or `min x¹ < 1`, otherwise `x¹`.
pub fn choose_start(x1: Vec<f64>, x2: Vec<f64>) -> Vec<f64> {
    let (m1, m2) = (min_entry(&x1), min_entry(&x2));
    if m2 > m1 || m1 < 1.0 {
        x2
    } else {
        x1
    }
}

/// `y = (A·H⁻¹·Aᵗ)⁻¹·A·H⁻¹·c`, `w_I = −U_I⁻¹·X_I·(c − Aᵗy)_I` (zero off `I`),
/// `s = c − Aᵗy + w`.
pub fn recover_duals(lp: &StandardLp, x: &[f64], sys: &ScaledSystem) -> Duals {
    let desc = crate::directions::descent_direction(lp, sys);
    duals_from_reduced(lp, x, desc.y, desc.s)
}

fn duals_from_reduced(lp: &StandardLp, x: &[f64], y: Vec<f64>, reduced: Vec<f64>) -> Duals {
    let w: Vec<f64> = reduced
        .iter()
        .zip(x)
        .zip(&lp.upper)
        .map(|((r, x), u)| if u.is_finite() { -x * r / u } else { 0.0 })
        .collect();
    let s = reduced.iter().zip(&w).map(|(r, w)| r + w).collect();
    Duals { y, w, s }
}

/// `(<c,x> − <b,y> + <u_I,w_I>) / (|<c,x>| + 1)`
pub fn relative_gap(lp: &StandardLp, x: &[f64], y: &[f64], w: &[f64]) -> f64 {
    let cx = objective(lp, x);
    let uw: f64 = lp
        .upper
        .iter()
        .zip(w)
        .filter(|(u, _)| u.is_finite())
        .map(|(u, w)| u * w)
        .sum();
    (cx - dot(&lp.b, y) + uw) / (cx.abs() + 1.0)
}

/// Duals, `Rf` and `Rgap` at a starting point.
pub fn initial_state(
    lp: &StandardLp,
    params: &GaugeParams,
    x: Vec<f64>,
) -> Result<IterateState, SolveError> {
    let sys = ScaledSystem::build(lp, &x, params)?;
    let Duals { y, w, s } = recover_duals(lp, &x, &sys);
    Ok(IterateState {
        rf: primal_infeasibility(lp, &x),
        rgap: relative_gap(lp, &x, &y, &w),
        clamps: sys.diagonals.clamps,
        regularization: sys.factor.regularization(),
        x,
        y,
        w,
        s,
        iteration: 0,
    })
}

/// One feasibility move followed by one descent move, both from the
/// directions at the incoming `x`. The returned duals come from that same
/// factorization, so they lag the returned `x` by one move.
pub fn iterate_once(
    lp: &StandardLp,
    cfg: &SolverConfig,
    params: &GaugeParams,
    state: &IterateState,
) -> Result<(IterateState, TraceRecord), SolveError> {
    let x = &state.x;
    let sys = ScaledSystem::build(lp, x, params)?;
    let reprojected = state.rgap < cfg.reproject_gap || state.iteration > cfg.reproject_after;
    let bundle = direction_bundle(lp, x, &sys, reprojected);

    let feasible = state.rf <= cfg.epsilon;
    let (feas_factor, desc_factor) = if feasible {
        (cfg.step_conservative, cfg.step_aggressive)
    } else {
        (cfg.step_aggressive, cfg.step_conservative)
    };

    let step_feasibility = feas_factor * max_step(x, &lp.upper, &bundle.dx, Some(1.0));
    let moved: Vec<f64> = x
        .iter()
        .zip(&bundle.dx)
        .map(|(x, d)| x + step_feasibility * d)
        .collect();

    let t_max = max_step(&moved, &lp.upper, &bundle.d, None);
    let step_descent = if t_max.is_finite() {
        desc_factor * t_max
    } else if directional_cost(lp, &bundle.d) < 0.0 {
        return Err(SolveError::Unbounded);
    } else {
        0.0
    };
    let next: Vec<f64> = moved
        .iter()
        .zip(&bundle.d)
        .map(|(x, d)| x + step_descent * d)
        .collect();
    check_interior(&next, &lp.upper)?;
    if norm_inf(&next) > DIVERGENCE_NORM && objective(lp, &next) < objective(lp, x) {
        return Err(SolveError::Unbounded);
    }

    let Duals { y, w, s } = duals_from_reduced(lp, x, bundle.y, bundle.s);
    let rf = primal_infeasibility(lp, &next);
    let rgap = relative_gap(lp, &next, &y, &w);
    if !rf.is_finite() || !rgap.is_finite() {
        return Err(SolveError::NonFinite(format!("rf = {rf}, rgap = {rgap}")));
    }

    let record = TraceRecord {
        iteration: state.iteration + 1,
        objective: objective(lp, &next),
        rf,
        rgap,
        step_feasibility,
        step_descent,
        objective_mid: objective(lp, &moved),
        rf_mid: primal_infeasibility(lp, &moved),
        min_x: min_entry(&next),
        min_upper_gap: next
            .iter()
            .zip(&lp.upper)
            .filter(|(_, u)| u.is_finite())
            .map(|(x, u)| u - x)
            .fold(f64::INFINITY, f64::min),
        clamps: sys.diagonals.clamps,
        regularization: sys.factor.regularization(),
        reprojected,
    };
    let state = IterateState {
        x: next,
        y,
        w,
        s,
        rf,
        rgap,
        iteration: state.iteration + 1,
        clamps: sys.diagonals.clamps,
        regularization: sys.factor.regularization(),
    };
    Ok((state, record))
}

/// `Rf ≤ ε`, `|Rgap| ≤ ε` and `min s ≥ −safeguard·(1 + ‖c‖∞)`.
///
/// A negative gap means the lagged duals overshoot the primal objective,
/// which only happens while they are still dual infeasible.
pub fn is_converged(lp: &StandardLp, cfg: &SolverConfig, state: &IterateState) -> bool {
    let floor = -cfg.dual_safeguard * (1.0 + norm_inf(&lp.c));
    state.rf <= cfg.epsilon && state.rgap.abs() <= cfg.epsilon && min_entry(&state.s) >= floor
}

/// Starting point for the configured policy.
pub fn starting_point(lp: &StandardLp, policy: StartPolicy) -> Result<Vec<f64>, SolveError> {
    match policy {
        StartPolicy::X1 => Ok(starting_point_x1(lp)),
        StartPolicy::X2 => starting_point_x2(lp),
        StartPolicy::Auto => {
            let x1 = starting_point_x1(lp);
            Ok(match starting_point_x2(lp) {
                Ok(x2) => choose_start(x1, x2),
                Err(_) => x1,
            })
        }
    }
}

fn report(
    lp: &StandardLp,
    status: Status,
    state: IterateState,
    trace: Vec<TraceRecord>,
    message: Option<String>,
) -> SolveReport {
    SolveReport {
        status,
        iterations: state.iteration,
        objective: objective(lp, &state.x),
        x: state.x,
        y: state.y,
        w: state.w,
        s: state.s,
        rf: state.rf,
        rgap: state.rgap,
        trace,
        message,
    }
}

fn failure(lp: &StandardLp, status: Status, err: SolveError) -> SolveReport {
    SolveReport {
        status,
        iterations: 0,
        objective: f64::NAN,
        x: vec![f64::NAN; lp.n()],
        y: vec![f64::NAN; lp.m()],
        w: vec![f64::NAN; lp.n()],
        s: vec![f64::NAN; lp.n()],
        rf: f64::NAN,
        rgap: f64::NAN,
        trace: Vec::new(),
        message: Some(err.to_string()),
    }
}

/// Runs the method to completion. Failures become statuses.
pub fn solve(lp: &StandardLp, cfg: &SolverConfig) -> SolveReport {
    if let Err(e) = cfg.validate() {
        return failure(lp, Status::NumericalFailure, e);
    }
    let params = match GaugeParams::new(cfg.r, lp.upper.clone()) {
        Ok(p) => p,
        Err(e) => return failure(lp, Status::NumericalFailure, e.into()),
    };
    let mut state = match starting_point(lp, cfg.start).and_then(|x| initial_state(lp, &params, x))
    {
        Ok(s) => s,
        Err(e) => return failure(lp, Status::NumericalFailure, e),
    };
    let mut trace = Vec::new();
    loop {
        if is_converged(lp, cfg, &state) {
            return report(lp, Status::Optimal, state, trace, None);
        }
        if state.iteration >= cfg.max_iterations {
            return report(lp, Status::IterationLimit, state, trace, None);
        }
        match iterate_once(lp, cfg, &params, &state) {
            Ok((next, record)) => {
                state = next;
                trace.push(record);
            }
            Err(SolveError::Unbounded) => {
                return report(
                    lp,
                    Status::Unbounded,
                    state,
                    trace,
                    Some(SolveError::Unbounded.to_string()),
                )
            }
            Err(e) => {
                return report(
                    lp,
                    Status::NumericalFailure,
                    state,
                    trace,
                    Some(e.to_string()),
                )
            }
        }
    }
}
