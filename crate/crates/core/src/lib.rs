//! Hybrid-zonotope reachability for piecewise-affine systems and the
//! ADMM-FP heuristic for the mixed-integer planning problems it produces.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix it to `f64`.

pub mod error;
pub mod kernel;
pub mod reach;
pub mod scalar;
pub mod sets;
pub mod solver;
pub mod unions;

pub use error::{Error, Result};
pub use scalar::Real;
pub use sets::{Form, SetComplexity};

pub type SparseMatrix = kernel::SparseMatrix<f64>;
pub type HybridZonotope = sets::HybridZonotope<f64>;
pub type PwaMode = reach::PwaMode<f64>;
pub type PwaSystem = reach::PwaSystem<f64>;
pub type CostSpec = reach::CostSpec<f64>;
pub type LiftedPlanningProblem = reach::LiftedPlanningProblem<f64>;
pub type SolverParams = solver::SolverParams<f64>;
pub type SolverResult = solver::SolverResult<f64>;
