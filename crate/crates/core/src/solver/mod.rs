//! ADMM-FP for mixed-integer quadratic programs over hybrid zonotopes, and
//! the convex ADMM used for relaxations and warm starts.

mod admm_fp;
mod binflip;
mod convex;
mod cycle;
mod iterate;
mod kkt;
mod objective;
mod params;
mod polish;
mod prepared;

pub use admm_fp::{admm_fp, admm_fp_observed, IterationEvent};
pub use binflip::{binflip, FlipMode};
pub use convex::{solve_convex_qp, warm_start_from_point, warm_start_result};
pub use cycle::{detect_cycle, CycleBuffer};
pub use iterate::{phase1_step, phase2_step, project_mibox, IterateState, MiBox};
pub use kkt::{build_kkt, full_rank_constraints, kkt_matrix, AffineProjector};
pub use objective::{condense_objective, set_objective, CondensedObjective};
pub use params::{SolverParams, SolverResult, Status};
