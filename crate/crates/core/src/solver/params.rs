use std::time::Duration;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tuning parameters for [`admm_fp`](super::admm_fp) and
/// [`solve_convex_qp`](super::solve_convex_qp).
#[derive(Clone, Debug, PartialEq)]
pub struct SolverParams<T> {
    /// ADMM penalty.
    pub rho: T,
    /// Primal convergence tolerance on `‖ξ − ζ‖∞`.
    pub eps_p: T,
    /// Stall length (iterations without a new best residual) that triggers a restart.
    pub k_restart: usize,
    pub k_ph1: usize,
    pub k_ph2: usize,
    /// Length of the residual buffer used for cycle detection.
    pub l_buf: usize,
    pub eps_buf: T,
    /// Dual tolerance of the convex solver.
    pub eps_d: T,
    /// Iteration cap of the convex solver.
    pub k_qp: usize,
    pub t_max: Option<Duration>,
    pub seed: u64,
    /// Treat `r_p ≤ ε_p` as converged only once the continuous factors,
    /// re-projected with the binaries held fixed, meet the equality
    /// constraints to 1e-6. Rejected candidates trigger a restart.
    pub polish: bool,
}

impl<T: Real> Default for SolverParams<T> {
    fn default() -> Self {
        Self {
            rho: T::lit(10.0),
            eps_p: T::lit(1e-3),
            k_restart: 5000,
            k_ph1: 10_000,
            k_ph2: 90_000,
            l_buf: 20,
            eps_buf: T::lit(1e-3),
            eps_d: T::lit(1e-2),
            k_qp: 10_000,
            t_max: None,
            seed: 0,
            polish: true,
        }
    }
}

impl<T: Real> SolverParams<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        if !positive(self.rho) {
            return Err(Error::InvalidArgument(format!("rho must be positive, got {}", self.rho)));
        }
        if !positive(self.eps_p) {
            return Err(Error::InvalidArgument(format!("eps_p must be positive, got {}", self.eps_p)));
        }
        if !(self.eps_d > T::zero()) || !(self.eps_buf >= T::zero()) {
            return Err(Error::InvalidArgument("eps_d must be positive and eps_buf nonnegative".into()));
        }
        Ok(())
    }
}

/// How a solve ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    IterLimit,
    TimeLimit,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::IterLimit => "iter_limit",
            Status::TimeLimit => "time_limit",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverResult<T> {
    /// Set-space point `Gζ + c`.
    pub z: Vec<T>,
    pub xi: Vec<T>,
    pub zeta: Vec<T>,
    pub u: Vec<T>,
    /// Last primal residual `‖ξ − ζ‖∞` computed before termination.
    pub r_p: T,
    pub status: Status,
    /// Total iterations over both phases.
    pub iterations: usize,
    pub phase1_iterations: usize,
    pub wall_time: Duration,
    /// `½ zᵀPz + qᵀz` at the returned point.
    pub objective: T,
    /// Iterations spent in the internal convex warm start (0 when an initial point was given).
    pub warm_start_iterations: usize,
    pub perturbations: usize,
    pub restarts: usize,
    /// Candidates with `r_p ≤ ε_p` turned down by the polish check; each
    /// also counts as a restart.
    pub rejections: usize,
    /// Whether the returned `ζ` was replaced by its polished version.
    pub polished: bool,
    /// Human-readable note about anything unusual, such as an unconverged warm start.
    pub diagnostic: Option<String>,
}

impl<T: Real> SolverResult<T> {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }
}
