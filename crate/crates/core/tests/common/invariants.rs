//! Invariant checks shared by the property tests and the acceptance run.
//! Each returns `Err` with a description of the first violation.

use galp_core::{
    descent_direction, feasibility_direction, newton_direction, penalized_objective,
    penalty_gradient, penalty_hessian_diag, primal_infeasibility, reproject, scaling_diagonals,
    solve, starting_point, GaugeParams, ScaledSystem, SolveReport, SolverConfig, StandardLp,
};

use super::oracle::{central_difference, projector_descent};

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn fail(msg: String) -> Result<(), String> {
    Err(msg)
}

/// Interiority of every iterate, monotone objective over descent moves,
/// `(1−t)` residual contraction over feasibility moves, and determinism.
pub fn solve_trace(lp: &StandardLp, cfg: &SolverConfig) -> Result<SolveReport, String> {
    let report = solve(lp, cfg);
    let x0 = starting_point(lp, cfg.start).map_err(|e| e.to_string())?;
    let mut rf_prev = primal_infeasibility(lp, &x0);
    for rec in &report.trace {
        let k = rec.iteration;
        if !(rec.min_x > 0.0) || !(rec.min_upper_gap > 0.0) {
            return Err(format!(
                "iterate {k} left the open box: min x {}, min u−x {}",
                rec.min_x, rec.min_upper_gap
            ));
        }
        if rec.objective > rec.objective_mid + 1e-13 * (1.0 + rec.objective_mid.abs()) {
            return Err(format!(
                "descent move {k} raised the objective: {} -> {}",
                rec.objective_mid, rec.objective
            ));
        }
        let expected = (1.0 - rec.step_feasibility) * rf_prev;
        if (rec.rf_mid - expected).abs() > 1e-8 * rf_prev + 1e-13 {
            return Err(format!(
                "feasibility move {k}: Rf {} but (1−t)·Rf_prev = {expected}",
                rec.rf_mid
            ));
        }
        if rec.rf_mid > rf_prev + 1e-13 {
            return Err(format!(
                "feasibility move {k} increased Rf: {rf_prev} -> {}",
                rec.rf_mid
            ));
        }
        rf_prev = rec.rf;
    }
    let again = solve(lp, cfg);
    if again != report && !(report.objective.is_nan() && again.status == report.status) {
        return Err("two identical solves produced different reports".into());
    }
    Ok(report)
}

/// `‖b − A(x + t·dx)‖∞ = (1−t)·‖b − Ax‖∞` to relative `1e-8`.
pub fn residual_contraction(lp: &StandardLp, x: &[f64], r: f64, t: f64) -> Result<(), String> {
    let p = GaugeParams::new(r, lp.upper.clone()).unwrap();
    let sys = ScaledSystem::build(lp, x, &p).map_err(|e| e.to_string())?;
    let dx = feasibility_direction(lp, x, &sys);
    let before = primal_infeasibility(lp, x);
    let moved: Vec<f64> = x.iter().zip(&dx).map(|(x, d)| x + t * d).collect();
    let after = primal_infeasibility(lp, &moved);
    let scale = 1.0 + lp.a.norm_inf() * norm_inf(x);
    if (after - (1.0 - t) * before).abs() > 1e-8 * before + 1e-15 * scale {
        return fail(format!("t = {t}: Rf {after} vs (1−t)·{before}"));
    }
    Ok(())
}

/// Gradient against central differences of `F`, Hessian diagonal against
/// central differences of the gradient, both to relative `1e-6`.
pub fn finite_differences(x: &[f64], c: &[f64], mu: f64, p: &GaugeParams) -> Result<(), String> {
    let grad = penalty_gradient(x, c, mu, p).map_err(|e| e.to_string())?;
    let hess = penalty_hessian_diag(x, mu, p).map_err(|e| e.to_string())?;
    for j in 0..x.len() {
        let fd = central_difference(|z| penalized_objective(z, c, mu, p).unwrap(), x, j);
        if (fd - grad[j]).abs() > 1e-6 * grad[j].abs().max(1.0) {
            return fail(format!(
                "gradient[{j}] = {} but difference quotient {fd}",
                grad[j]
            ));
        }
        let fd2 = central_difference(|z| penalty_gradient(z, c, mu, p).unwrap()[j], x, j);
        if (fd2 - hess[j]).abs() > 1e-6 * hess[j].abs().max(1.0) {
            return fail(format!(
                "hessian[{j}] = {} but difference quotient {fd2}",
                hess[j]
            ));
        }
    }
    Ok(())
}

/// `‖Ad‖∞ ≤ 1e-6·(1 + ‖A‖∞‖d‖∞)`, not worse after reprojection, and
/// `<c,d> ≤ 0` with equality only when `s = 0`.
pub fn kernel_and_descent(lp: &StandardLp, x: &[f64], r: f64) -> Result<(), String> {
    let p = GaugeParams::new(r, lp.upper.clone()).unwrap();
    let sys = ScaledSystem::build(lp, x, &p).map_err(|e| e.to_string())?;
    let desc = descent_direction(lp, &sys);
    let scale = 1.0 + lp.a.norm_inf() * norm_inf(&desc.d);
    let ad = norm_inf(&lp.a.mul_vec(&desc.d));
    if ad > 1e-6 * scale {
        return fail(format!("‖Ad‖∞ = {ad} exceeds 1e-6·{scale}"));
    }
    let again = reproject(lp, &sys, &desc.d);
    let ad2 = norm_inf(&lp.a.mul_vec(&again));
    if ad2 > ad.max(1e-15 * scale) {
        return fail(format!("reprojection raised ‖Ad‖∞ from {ad} to {ad2}"));
    }
    let cd: f64 = lp.c.iter().zip(&desc.d).map(|(a, b)| a * b).sum();
    if cd > 0.0 {
        return fail(format!("<c,d> = {cd} > 0"));
    }
    if cd == 0.0 && desc.s.iter().any(|v| *v != 0.0) {
        return fail("<c,d> = 0 with s ≠ 0".into());
    }
    Ok(())
}

/// Diagonals and descent direction at `r = 1e-6` against `r = 0`, relative `1e-4`.
pub fn r_continuity(lp: &StandardLp, x: &[f64]) -> Result<(), String> {
    let p0 = GaugeParams::new(0.0, lp.upper.clone()).unwrap();
    let p1 = GaugeParams::new(1e-6, lp.upper.clone()).unwrap();
    let d0 = scaling_diagonals(x, &p0).map_err(|e| e.to_string())?;
    let d1 = scaling_diagonals(x, &p1).map_err(|e| e.to_string())?;
    for j in 0..x.len() {
        if (d1.h[j] - d0.h[j]).abs() > 1e-4 * d0.h[j] {
            return fail(format!("h[{j}]: {} vs {}", d1.h[j], d0.h[j]));
        }
        // g can cancel between its two terms; compare against their size.
        let mut terms = 1.0 / x[j];
        if lp.upper[j].is_finite() {
            terms += 1.0 / (lp.upper[j] - x[j]);
        }
        if (d1.g[j] - d0.g[j]).abs() > 1e-4 * terms {
            return fail(format!("g[{j}]: {} vs {}", d1.g[j], d0.g[j]));
        }
    }
    let s0 = ScaledSystem::build(lp, x, &p0).map_err(|e| e.to_string())?;
    let s1 = ScaledSystem::build(lp, x, &p1).map_err(|e| e.to_string())?;
    let (a, b) = (descent_direction(lp, &s0).d, descent_direction(lp, &s1).d);
    let diff = a
        .iter()
        .zip(&b)
        .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
    if diff > 1e-4 * norm_inf(&a) {
        return fail(format!(
            "descent direction moved by {diff} (‖d‖∞ = {})",
            norm_inf(&a)
        ));
    }
    Ok(())
}

/// Largest deviation of `descent_direction` from the explicit projector
/// formula, relative to `1 + ‖d‖∞`.
pub fn projector_deviation(lp: &StandardLp, x: &[f64], r: f64) -> Result<f64, String> {
    let p = GaugeParams::new(r, lp.upper.clone()).unwrap();
    let sys = ScaledSystem::build(lp, x, &p).map_err(|e| e.to_string())?;
    let d = descent_direction(lp, &sys).d;
    let want = projector_descent(&lp.a.to_dense(), &sys.diagonals.h, &lp.c);
    let diff = d
        .iter()
        .zip(&want)
        .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
    Ok(diff / (1.0 + norm_inf(&want)))
}

/// `v(μ) = μ(1−r)·d(μ) − d` is linear in `μ`; returns the deviation of
/// `v(0.1)` from the chord through `v(0.01)` and `v(1)`, relative to
/// `1 + ‖v(1)‖∞`.
pub fn newton_collinearity(lp: &StandardLp, x: &[f64], r: f64) -> Result<f64, String> {
    let p = GaugeParams::new(r, lp.upper.clone()).unwrap();
    let sys = ScaledSystem::build(lp, x, &p).map_err(|e| e.to_string())?;
    let d = descent_direction(lp, &sys).d;
    let v = |mu: f64| -> Result<Vec<f64>, String> {
        let dm = newton_direction(lp, x, mu, &p).map_err(|e| e.to_string())?;
        Ok(dm
            .iter()
            .zip(&d)
            .map(|(a, b)| mu * (1.0 - r) * a - b)
            .collect())
    };
    let (v1, v01, v001) = (v(1.0)?, v(0.1)?, v(0.01)?);
    let lam = (0.1 - 0.01) / (1.0 - 0.01);
    let dev = (0..d.len()).fold(0.0f64, |m, j| {
        let chord = v001[j] + lam * (v1[j] - v001[j]);
        m.max((v01[j] - chord).abs())
    });
    Ok(dev / (1.0 + norm_inf(&v1)))
}
