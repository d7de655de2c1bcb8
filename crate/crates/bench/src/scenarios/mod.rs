//! Benchmark scenarios.

pub mod behavior;
pub mod geometry;
pub mod random_milp;
pub mod reach_avoid;
pub mod two_equilibrium;
