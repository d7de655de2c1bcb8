//! Sparse linear algebra, factorizations, a dense LP solver and seeded randomness.

pub mod ldl;
pub mod lp;
pub mod rank;
pub mod rng;
pub mod sparse;

pub use ldl::{factorize_sym, solve_sym, FactorOptions, SymFactorization};
pub use lp::{solve_lp, LinearProgram, LpSolution, LpStatus};
pub use rank::{independent_rows, remove_redundant_rows};
pub use rng::{rand_uniform, RngStream};
pub use sparse::SparseMatrix;
