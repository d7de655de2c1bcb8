use std::time::Instant;

use crate::error::{dim_err, Result};
use crate::kernel::SparseMatrix;
use crate::scalar::{norm_inf, Real};
use crate::sets::{convex_relaxation, HybridZonotope};

use super::iterate::{convex_step, IterateState};
use super::objective::set_objective;
use super::params::{SolverParams, SolverResult, Status};
use super::prepared::Prepared;

pub(crate) struct ConvexRun<T> {
    pub state: IterateState<T>,
    pub status: Status,
    pub iterations: usize,
}

/// ADMM on the convex relaxation with box projection; stops when
/// `r_p ≤ ε_p` and `ρ‖ζ⁺ − ζ‖∞ ≤ ε_d`.
pub(crate) fn run_convex<T: Real>(
    prep: &Prepared<T>,
    params: &SolverParams<T>,
    init: Option<(Vec<T>, Vec<T>)>,
    deadline: Option<Instant>,
) -> Result<ConvexRun<T>> {
    let n = prep.mibox.len();
    let (zeta, u) = match init {
        Some((z, u)) => {
            if z.len() != n || u.len() != n {
                return dim_err(format!("initial iterates have lengths {} and {}, expected {n}", z.len(), u.len()));
            }
            (z, u)
        }
        None => (prep.box_center(), vec![T::zero(); n]),
    };
    let mut state = IterateState::new(zeta, u);
    for k in 0..params.k_qp {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(ConvexRun { state, status: Status::TimeLimit, iterations: k });
        }
        let next = convex_step(&state, &prep.kkt, &prep.obj.q, &prep.b, params.rho, &prep.mibox)?;
        let dz: Vec<T> = next.zeta.iter().zip(&state.zeta).map(|(&a, &b)| a - b).collect();
        let r_d = params.rho * norm_inf(&dz);
        state = next;
        if state.r_p <= params.eps_p && r_d <= params.eps_d {
            return Ok(ConvexRun { state, status: Status::Converged, iterations: k + 1 });
        }
    }
    Ok(ConvexRun { state, status: Status::IterLimit, iterations: params.k_qp })
}

/// Minimizes `½zᵀPz + qᵀz` over the convex relaxation of `z`.
///
/// Binary factors, if any, are treated as continuous. The final `(ζ, u)`
/// can seed [`admm_fp`](super::admm_fp).
pub fn solve_convex_qp<T: Real>(
    z: &HybridZonotope<T>,
    p: &SparseMatrix<T>,
    q: &[T],
    params: &SolverParams<T>,
    init: Option<(Vec<T>, Vec<T>)>,
) -> Result<SolverResult<T>> {
    params.validate()?;
    let start = Instant::now();
    let cr = convex_relaxation(z);
    let prep = Prepared::new(&cr, p, q, params.rho)?;
    let run = run_convex(&prep, params, init, params.t_max.map(|t| start + t))?;
    let zpt = prep.point(&run.state.zeta);
    let objective = set_objective(p, q, &zpt);
    Ok(SolverResult {
        z: zpt,
        xi: run.state.xi,
        zeta: run.state.zeta,
        u: run.state.u,
        r_p: run.state.r_p,
        status: run.status,
        iterations: run.iterations,
        phase1_iterations: run.iterations,
        wall_time: start.elapsed(),
        objective,
        warm_start_iterations: 0,
        perturbations: 0,
        restarts: 0,
        rejections: 0,
        polished: false,
        diagnostic: None,
    })
}

/// Initial iterates from the projection of `z_star` onto the convex
/// relaxation of `z`, i.e. `min ‖Gξ + c − z*‖²` in factor space.
pub fn warm_start_from_point<T: Real>(
    z: &HybridZonotope<T>,
    z_star: &[T],
    params: &SolverParams<T>,
) -> Result<(Vec<T>, Vec<T>)> {
    let r = warm_start_result(z, z_star, params)?;
    Ok((r.zeta, r.u))
}

/// Like [`warm_start_from_point`], returning the full solver result.
pub fn warm_start_result<T: Real>(z: &HybridZonotope<T>, z_star: &[T], params: &SolverParams<T>) -> Result<SolverResult<T>> {
    if z_star.len() != z.dim() {
        return dim_err(format!("warm-start point of length {} for a set of dimension {}", z_star.len(), z.dim()));
    }
    let q: Vec<T> = z_star.iter().map(|&v| -v).collect();
    solve_convex_qp(z, &SparseMatrix::identity(z.dim()), &q, params, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::Form;

    fn tight() -> SolverParams<f64> {
        SolverParams { eps_p: 1e-8, eps_d: 1e-8, k_qp: 100_000, rho: 1.0, ..SolverParams::default() }
    }

    #[test]
    fn minimum_norm_on_segment() {
        let z = HybridZonotope::zonotope(SparseMatrix::identity(1), vec![0.0], Form::Canonical).unwrap();
        let r = solve_convex_qp::<f64>(&z, &SparseMatrix::identity(1), &[0.0], &SolverParams::default(), None).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!(r.z[0].abs() < 1e-6);
    }

    #[test]
    fn box_projection() {
        let z = HybridZonotope::constrained_zonotope(
            SparseMatrix::identity(2),
            vec![0.0, 0.0],
            SparseMatrix::zeros(0, 2),
            vec![],
            Form::Canonical,
        )
        .unwrap();
        let (zeta, _) = warm_start_from_point(&z, &[2.0, 2.0], &tight()).unwrap();
        assert!((zeta[0] - 1.0).abs() < 1e-4 && (zeta[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn equality_constrained_projection() {
        // segment ξ1 = ξ2 in the unit square; projecting (1, 0) gives (0.5, 0.5)
        let z = HybridZonotope::constrained_zonotope(
            SparseMatrix::identity(2),
            vec![0.0, 0.0],
            SparseMatrix::from_dense(&[vec![1.0, -1.0]]).unwrap(),
            vec![0.0],
            Form::Canonical,
        )
        .unwrap();
        let r = warm_start_result(&z, &[1.0, 0.0], &tight()).unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!((r.z[0] - 0.5).abs() < 1e-6 && (r.z[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn infeasible_relaxation_hits_iteration_limit() {
        let z = HybridZonotope::constrained_zonotope(
            SparseMatrix::identity(1),
            vec![0.0],
            SparseMatrix::identity(1),
            vec![3.0],
            Form::Canonical,
        )
        .unwrap();
        let params = SolverParams { k_qp: 200, ..SolverParams::default() };
        let r = solve_convex_qp(&z, &SparseMatrix::zeros(1, 1), &[0.0], &params, None).unwrap();
        assert_eq!(r.status, Status::IterLimit);
    }
}
