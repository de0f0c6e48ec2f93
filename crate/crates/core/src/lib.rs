//! Primal affine-scaling interior point method for linear programs, driven by
//! the concave-gauge penalty family `g_r`, `0 <= r < 1`.
//!
//! `r = 0` is the classical affine-scaling method (logarithmic-barrier
//! scaling `H = X⁻²`); `r > 0` uses the weaker scaling `H = X^{r−2}` of a
//! differential barrier that stays finite on the boundary.
//!
//! ```
//! use galp_core::{parse_mps_str, solve, to_standard_form, SolverConfig, Status};
//!
//! let raw = parse_mps_str("\
//! NAME          DEMO
//! ROWS
//!  N  COST
//!  E  R1
//! COLUMNS
//!     X1        COST      1.0   R1        1.0
//!     X2        R1        1.0
//! RHS
//!     RHS       R1        1.0
//! ENDATA
//! ").unwrap();
//! let (lp, map) = to_standard_form(&raw).unwrap();
//! let report = solve(&lp, &SolverConfig::default());
//! assert_eq!(report.status, Status::Optimal);
//! assert!(report.objective_with_offset(map.offset).abs() < 1e-8);
//! ```

pub mod directions;
pub mod gauge;
pub mod linalg;
pub mod model;
pub mod mps;
pub mod solver;

use thiserror::Error;

pub use directions::{
    descent_direction, direction_bundle, feasibility_direction, max_step, newton_direction,
    reproject, Descent, DirectionBundle, ScaledSystem,
};
pub use gauge::{
    penalized_objective, penalty, penalty_gradient, penalty_hessian_diag, scaling_diagonals, xi_r,
    GaugeError, GaugeParams, ScalingDiagonals,
};
pub use linalg::{assemble_normal, factor, CholeskyFactor, LinalgError, NormalMatrix};
pub use model::{
    objective, primal_infeasibility, to_standard_form, CscMatrix, ModelError, StandardLp,
    VariableKind, VariableMap,
};
pub use mps::{
    parse_mps, parse_mps_str, write_mps, BoundEntry, BoundKind, Coefficient, MpsError, RawMps,
    RowKind,
};
pub use solver::{
    choose_start, initial_state, is_converged, iterate_once, recover_duals, relative_gap, solve,
    starting_point, starting_point_x1, starting_point_x2, Duals, IterateState, SolveReport,
    SolverConfig, StartPolicy, Status, TraceRecord,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("objective is unbounded below along the descent direction")]
    Unbounded,
    #[error("non-finite iterate: {0}")]
    NonFinite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
