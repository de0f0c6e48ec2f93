//! Standard-form LP `min <c,x>  s.t.  Ax = b, 0 <= x, x_j <= u_j (j in I)`
//! and the reformulation from raw MPS data.

use std::collections::HashMap;

use thiserror::Error;

use crate::mps::{BoundKind, RawMps, RowKind};

/// Magnitudes at or beyond this are read as infinite bounds.
pub const INFINITE_BOUND: f64 = 1e30;

/// Compressed sparse column matrix without explicit zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    /// Builds from per-column `(row, value)` lists. Zeros are dropped and
    /// repeated rows within a column are summed.
    pub fn from_columns(nrows: usize, columns: &[Vec<(usize, f64)>]) -> Self {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for col in columns {
            let mut entries = col.clone();
            entries.sort_by_key(|&(i, _)| i);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
            for (i, v) in entries {
                assert!(i < nrows, "row index {i} out of range for {nrows} rows");
                match merged.last_mut() {
                    Some((last, acc)) if *last == i => *acc += v,
                    _ => merged.push((i, v)),
                }
            }
            for (i, v) in merged {
                if v != 0.0 {
                    row_idx.push(i);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Self {
            nrows,
            ncols: columns.len(),
            col_ptr,
            row_idx,
            values,
        }
    }

    /// Dense row-major input, mainly for tests and small examples.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let columns: Vec<Vec<(usize, f64)>> = (0..ncols)
            .map(|j| (0..nrows).map(|i| (i, rows[i][j])).collect())
            .collect();
        Self::from_columns(nrows, &columns)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(row, value)` pairs of column `j`, rows ascending.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        self.column(j).map(|(_, v)| v * v).sum::<f64>().sqrt()
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut out = vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (i, v) in self.column(j) {
                    out[i] += v * xj;
                }
            }
        }
        out
    }

    /// `Aᵗ y`
    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.nrows);
        (0..self.ncols)
            .map(|j| self.column(j).map(|(i, v)| v * y[i]).sum())
            .collect()
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0_f64; self.nrows];
        for (&i, &v) in self.row_idx.iter().zip(&self.values) {
            rows[i] += v.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for j in 0..self.ncols {
            for (i, v) in self.column(j) {
                out[i][j] = v;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("variable `{name}` has lower bound {lower} above upper bound {upper}")]
    InfeasibleBounds {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("unsupported bound on `{name}`: {reason}")]
    UnsupportedBound { name: String, reason: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("upper bound of column {index} must be positive, got {value}")]
    NonPositiveUpper { index: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    pub name: String,
    pub a: CscMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    /// `+inf` for columns outside the bounded set.
    pub upper: Vec<f64>,
}

impl StandardLp {
    pub fn new(
        a: CscMatrix,
        b: Vec<f64>,
        c: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self, ModelError> {
        if b.len() != a.nrows() {
            return Err(ModelError::Dimension(format!(
                "b has {} entries for {} rows",
                b.len(),
                a.nrows()
            )));
        }
        if c.len() != a.ncols() || upper.len() != a.ncols() {
            return Err(ModelError::Dimension(format!(
                "c/upper have {}/{} entries for {} columns",
                c.len(),
                upper.len(),
                a.ncols()
            )));
        }
        if let Some((index, &value)) = upper.iter().enumerate().find(|(_, u)| !(**u > 0.0)) {
            return Err(ModelError::NonPositiveUpper { index, value });
        }
        Ok(Self {
            name: String::new(),
            a,
            b,
            c,
            upper,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// Indices with a finite upper bound.
    pub fn bounded(&self) -> impl Iterator<Item = usize> + '_ {
        self.upper
            .iter()
            .enumerate()
            .filter(|(_, u)| u.is_finite())
            .map(|(j, _)| j)
    }

    pub fn num_bounded(&self) -> usize {
        self.bounded().count()
    }
}

/// `‖Ax − b‖∞ / (‖b‖∞ + 1)`
pub fn primal_infeasibility(lp: &StandardLp, x: &[f64]) -> f64 {
    let ax = lp.a.mul_vec(x);
    let residual = ax
        .iter()
        .zip(&lp.b)
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max);
    residual / (norm_inf(&lp.b) + 1.0)
}

/// Standard-form objective `<c, x>`.
pub fn objective(lp: &StandardLp, x: &[f64]) -> f64 {
    dot(&lp.c, x)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}

/// How an original variable is represented in standard form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariableKind {
    /// `x = x'`
    Direct { index: usize },
    /// `x = lower + x'`
    Shifted { index: usize, lower: f64 },
    /// `x = upper − x'` (lower bound −∞, finite upper)
    Mirrored { index: usize, upper: f64 },
    /// `x = x⁺ − x⁻`
    Split { pos: usize, neg: usize },
    /// Substituted out.
    Fixed { value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableMap {
    pub names: Vec<String>,
    pub kinds: Vec<VariableKind>,
    /// `(constraint row, standard column)` for each slack or surplus.
    pub slacks: Vec<(usize, usize)>,
    /// Names of the constraint rows, in standard-form order.
    pub row_names: Vec<String>,
    /// Constant added to `<c,x>` to get the original objective.
    pub offset: f64,
}

impl VariableMap {
    /// Original variable values from a standard-form point.
    pub fn map_back(&self, x: &[f64]) -> Vec<f64> {
        self.kinds
            .iter()
            .map(|kind| match *kind {
                VariableKind::Direct { index } => x[index],
                VariableKind::Shifted { index, lower } => lower + x[index],
                VariableKind::Mirrored { index, upper } => upper - x[index],
                VariableKind::Split { pos, neg } => x[pos] - x[neg],
                VariableKind::Fixed { value } => value,
            })
            .collect()
    }

    /// Objective in the original space.
    pub fn objective(&self, lp: &StandardLp, x: &[f64]) -> f64 {
        objective(lp, x) + self.offset
    }
}

/// Resolved `[lower, upper]` for each column from the BOUNDS section.
fn column_bounds(raw: &RawMps, names: &[&str]) -> Result<Vec<(f64, f64)>, ModelError> {
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(j, n)| (*n, j)).collect();
    let mut bounds = vec![(0.0, f64::INFINITY); names.len()];
    let finite = |v: f64| {
        if v >= INFINITE_BOUND {
            f64::INFINITY
        } else if v <= -INFINITE_BOUND {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    for entry in &raw.bounds {
        let j = index[entry.column.as_str()];
        let value = entry.value.map(finite);
        let (lo, up) = &mut bounds[j];
        match (entry.kind, value) {
            (BoundKind::Up, Some(v)) => *up = v,
            (BoundKind::Lo, Some(v)) => *lo = v,
            (BoundKind::Fx, Some(v)) => {
                if !v.is_finite() {
                    return Err(ModelError::UnsupportedBound {
                        name: entry.column.clone(),
                        reason: "infinite FX value".into(),
                    });
                }
                *lo = v;
                *up = v;
            }
            (BoundKind::Fr, _) => {
                *lo = f64::NEG_INFINITY;
                *up = f64::INFINITY;
            }
            (BoundKind::Mi, _) => *lo = f64::NEG_INFINITY,
            (BoundKind::Pl, _) => *up = f64::INFINITY,
            (kind, None) => {
                return Err(ModelError::UnsupportedBound {
                    name: entry.column.clone(),
                    reason: format!("{} bound without a value", kind.as_str()),
                })
            }
        }
    }
    Ok(bounds)
}

/// Rewrites raw MPS data into standard form.
///
/// Inequality rows get a slack (L) or surplus (G) column; a RANGES entry turns
/// that column into an upper-bounded one. Finite lower bounds are shifted out,
/// `[-inf, u]` variables are mirrored, free variables are split and fixed ones
/// substituted. Free rows other than the objective are dropped.
pub fn to_standard_form(raw: &RawMps) -> Result<(StandardLp, VariableMap), ModelError> {
    let row_names: Vec<&str> = raw
        .rows
        .iter()
        .filter(|(_, k)| *k != RowKind::N)
        .map(|(n, _)| n.as_str())
        .collect();
    let row_of: HashMap<&str, usize> = row_names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let kinds: HashMap<&str, RowKind> = raw.rows.iter().map(|(n, k)| (n.as_str(), *k)).collect();
    let m = row_names.len();

    let names = raw.column_names();
    let col_of: HashMap<&str, usize> = names.iter().enumerate().map(|(j, n)| (*n, j)).collect();
    let mut orig_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); names.len()];
    let mut orig_cost = vec![0.0; names.len()];
    for coef in &raw.columns {
        let j = col_of[coef.column.as_str()];
        if coef.row == raw.objective {
            orig_cost[j] = coef.value;
        } else if let Some(&i) = row_of.get(coef.row.as_str()) {
            orig_cols[j].push((i, coef.value));
        }
    }

    let mut b = vec![0.0; m];
    let mut offset = 0.0;
    for (row, v) in &raw.rhs {
        if *row == raw.objective {
            // MPS convention: an RHS on the objective is minus its constant.
            offset -= v;
        } else if let Some(&i) = row_of.get(row.as_str()) {
            b[i] = *v;
        }
    }
    let mut range = vec![None; m];
    for (row, v) in &raw.ranges {
        if let Some(&i) = row_of.get(row.as_str()) {
            range[i] = Some(*v);
        }
    }

    let bounds = column_bounds(raw, &names)?;
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut cost = Vec::new();
    let mut upper = Vec::new();
    let mut var_kinds = Vec::with_capacity(names.len());

    let subtract = |b: &mut [f64], col: &[(usize, f64)], scale: f64| {
        for &(i, v) in col {
            b[i] -= v * scale;
        }
    };

    for (j, name) in names.iter().enumerate() {
        let (lo, up) = bounds[j];
        let col = &orig_cols[j];
        if lo > up {
            return Err(ModelError::InfeasibleBounds {
                name: name.to_string(),
                lower: lo,
                upper: up,
            });
        }
        let kind = if lo == up {
            subtract(&mut b, col, lo);
            offset += orig_cost[j] * lo;
            VariableKind::Fixed { value: lo }
        } else if lo.is_finite() {
            let index = columns.len();
            columns.push(col.clone());
            cost.push(orig_cost[j]);
            upper.push(up - lo);
            if lo != 0.0 {
                subtract(&mut b, col, lo);
                offset += orig_cost[j] * lo;
                VariableKind::Shifted { index, lower: lo }
            } else {
                VariableKind::Direct { index }
            }
        } else if up.is_finite() {
            let index = columns.len();
            columns.push(col.iter().map(|&(i, v)| (i, -v)).collect());
            cost.push(-orig_cost[j]);
            upper.push(f64::INFINITY);
            subtract(&mut b, col, up);
            offset += orig_cost[j] * up;
            VariableKind::Mirrored { index, upper: up }
        } else {
            let pos = columns.len();
            columns.push(col.clone());
            columns.push(col.iter().map(|&(i, v)| (i, -v)).collect());
            cost.extend([orig_cost[j], -orig_cost[j]]);
            upper.extend([f64::INFINITY, f64::INFINITY]);
            VariableKind::Split { pos, neg: pos + 1 }
        };
        var_kinds.push(kind);
    }

    let mut slacks = Vec::new();
    for (i, name) in row_names.iter().enumerate() {
        let r = range[i].filter(|r| *r != 0.0);
        // Sign of the slack column and its upper bound.
        let slack = match (kinds[name], r) {
            (RowKind::E, None) => None,
            (RowKind::E, Some(r)) if r > 0.0 => Some((-1.0, r)),
            (RowKind::E, Some(r)) => Some((1.0, -r)),
            (RowKind::L, r) => Some((1.0, r.map_or(f64::INFINITY, f64::abs))),
            (RowKind::G, r) => Some((-1.0, r.map_or(f64::INFINITY, f64::abs))),
            (RowKind::N, _) => unreachable!("free rows were filtered out"),
        };
        // A zero range on an L/G row pins it to equality.
        let slack = if range[i] == Some(0.0) { None } else { slack };
        if let Some((sign, ub)) = slack {
            slacks.push((i, columns.len()));
            columns.push(vec![(i, sign)]);
            cost.push(0.0);
            upper.push(ub);
        }
    }

    let a = CscMatrix::from_columns(m, &columns);
    let lp = StandardLp::new(a, b, cost, upper)?.with_name(raw.name.clone());
    let map = VariableMap {
        names: names.iter().map(|s| s.to_string()).collect(),
        kinds: var_kinds,
        slacks,
        row_names: row_names.iter().map(|s| s.to_string()).collect(),
        offset,
    };
    Ok((lp, map))
}
