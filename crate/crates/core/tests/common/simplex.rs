//! Dense two-phase tableau simplex. Upper bounds become
//! explicit rows `x_j + t_j = u_j`. The final basic solution is recomputed
//! from the original data by LU for accuracy.

use nalgebra::{DMatrix, DVector};

const TOL: f64 = 1e-9;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub enum SimplexOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
    PivotLimit,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced costs; last entry is minus the objective.
    z: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self) -> usize {
        self.z.len() - 1
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<f64>| {
            let f = row[col];
            if f != 0.0 {
                for (v, pr) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
                row[col] = 0.0;
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.z);
        self.basis[r] = col;
    }

    /// Dantzig pricing; after a run of degenerate pivots, Bland's rule
    /// until progress resumes.
    fn run(&mut self, allowed: usize) -> Result<(), SimplexOutcome> {
        let rhs = self.rhs();
        let mut degenerate_run = 0usize;
        for _ in 0..MAX_PIVOTS {
            let bland = degenerate_run > 50;
            let col = if bland {
                (0..allowed).find(|&j| self.z[j] < -TOL)
            } else {
                (0..allowed)
                    .filter(|&j| self.z[j] < -TOL)
                    .min_by(|&a, &b| self.z[a].total_cmp(&self.z[b]))
            };
            let Some(col) = col else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[col] > TOL {
                    let ratio = row[rhs].max(0.0) / row[col];
                    let better = match best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < br - TOL
                                || (ratio <= br + TOL
                                    && if bland {
                                        self.basis[i] < self.basis[bi]
                                    } else {
                                        row[col] > self.rows[bi][col]
                                    })
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return Err(SimplexOutcome::Unbounded),
                Some((r, ratio)) => {
                    degenerate_run = if ratio <= TOL { degenerate_run + 1 } else { 0 };
                    self.pivot(r, col);
                }
            }
        }
        Err(SimplexOutcome::PivotLimit)
    }
}

/// `min <c,x>` s.t. `Ax = b`, `0 <= x <= upper` (`+inf` for none).
pub fn solve_dense(a: &[Vec<f64>], b: &[f64], c: &[f64], upper: &[f64]) -> SimplexOutcome {
    let n = c.len();
    let bounded: Vec<usize> = (0..n).filter(|&j| upper[j].is_finite()).collect();
    let nv = n + bounded.len();
    let mut eq_rows: Vec<Vec<f64>> = Vec::new();
    let mut eq_rhs: Vec<f64> = Vec::new();
    for (row, &bi) in a.iter().zip(b) {
        let mut r = row.clone();
        r.resize(nv, 0.0);
        eq_rows.push(r);
        eq_rhs.push(bi);
    }
    for (k, &j) in bounded.iter().enumerate() {
        let mut r = vec![0.0; nv];
        r[j] = 1.0;
        r[n + k] = 1.0;
        eq_rows.push(r);
        eq_rhs.push(upper[j]);
    }
    let mm = eq_rows.len();
    let width = nv + mm + 1;
    let mut rows = Vec::with_capacity(mm);
    for (i, (r, &bi)) in eq_rows.iter().zip(&eq_rhs).enumerate() {
        let sign = if bi < 0.0 { -1.0 } else { 1.0 };
        let mut t = vec![0.0; width];
        for (v, a) in t.iter_mut().zip(r) {
            *v = sign * a;
        }
        t[nv + i] = 1.0;
        t[width - 1] = sign * bi;
        rows.push(t);
    }
    let mut z = vec![0.0; width];
    for row in &rows {
        for j in 0..nv {
            z[j] -= row[j];
        }
        z[width - 1] -= row[width - 1];
    }
    let mut tab = Tableau {
        rows,
        z,
        basis: (nv..nv + mm).collect(),
    };
    if let Err(e) = tab.run(nv) {
        return e;
    }
    let scale = 1.0 + eq_rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if -tab.z[width - 1] > 1e-7 * scale {
        return SimplexOutcome::Infeasible;
    }
    // Drive artificials out; drop redundant rows.
    let mut row_ids: Vec<usize> = (0..mm).collect();
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= nv {
            match (0..nv).find(|&j| tab.rows[i][j].abs() > 1e-9) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    row_ids.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let cost: Vec<f64> = (0..nv).map(|j| if j < n { c[j] } else { 0.0 }).collect();
    let mut z = vec![0.0; width];
    z[..nv].copy_from_slice(&cost);
    for (row, &bj) in tab.rows.iter().zip(&tab.basis) {
        let cb = cost[bj];
        if cb != 0.0 {
            for (zj, v) in z.iter_mut().zip(row) {
                *zj -= cb * v;
            }
        }
    }
    for j in nv..width - 1 {
        z[j] = 0.0;
    }
    tab.z = z;
    if let Err(e) = tab.run(nv) {
        return e;
    }

    // Recompute x_B from the original equations of the rows that survived.
    let basis = tab.basis.clone();
    let k = basis.len();
    let mut x_full = vec![0.0; nv];
    let bmat = DMatrix::from_fn(k, k, |p, q| eq_rows[row_ids[p]][basis[q]]);
    let rhs = DVector::from_iterator(k, row_ids.iter().map(|&i| eq_rhs[i]));
    let solved = if k == 0 {
        Some(DVector::zeros(0))
    } else {
        bmat.lu().solve(&rhs)
    };
    let xb = match solved {
        Some(v) => v,
        None => DVector::from_iterator(k, tab.rows.iter().map(|r| r[width - 1])),
    };
    for (q, &j) in basis.iter().enumerate() {
        x_full[j] = xb[q];
    }
    let x: Vec<f64> = x_full[..n].to_vec();
    let objective = x.iter().zip(c).map(|(a, b)| a * b).sum();
    SimplexOutcome::Optimal { x, objective }
}

pub fn solve_lp(lp: &galp_core::StandardLp) -> SimplexOutcome {
    solve_dense(&lp.a.to_dense(), &lp.b, &lp.c, &lp.upper)
}
