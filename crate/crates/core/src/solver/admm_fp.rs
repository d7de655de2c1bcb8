use std::collections::HashSet;
use std::time::Instant;

use crate::error::{dim_err, Result};
use crate::kernel::{RngStream, SparseMatrix};
use crate::scalar::Real;
use crate::sets::HybridZonotope;

use super::binflip::{binflip, FlipMode};
use super::convex::run_convex;
use super::cycle::{detect_cycle, CycleBuffer};
use super::iterate::{phase1_step, phase2_step, IterateState};
use super::objective::set_objective;
use super::polish::Polisher;
use super::params::{SolverParams, SolverResult, Status};
use super::prepared::Prepared;

/// Snapshot handed to an observer after every ADMM-FP iteration.
#[derive(Debug)]
pub struct IterationEvent<'a, T> {
    /// Iteration index over both phases, starting at 0.
    pub iteration: usize,
    pub phase: u8,
    pub xi: &'a [T],
    /// `ζ` as produced by the projection, before any flip.
    pub zeta_projected: &'a [T],
    /// `ζ` carried into the next iteration.
    pub zeta: &'a [T],
    pub u_prev: &'a [T],
    pub u: &'a [T],
    pub r_p: T,
    pub flip: Option<FlipMode>,
    /// Entries of the cycle buffer after this iteration.
    pub buffer_len: usize,
}

/// ADMM-FP heuristic for `min ½zᵀPz + qᵀz` over the hybrid zonotope `z`.
///
/// Without `init`, the iterates start from the convex relaxation's
/// solution. Returns `z = Gζ + c` at termination. With
/// [`SolverParams::polish`], a candidate with `r_p ≤ ε_p` is accepted only
/// if its binary pattern admits an exactly feasible continuous part;
/// otherwise its binaries are flipped as on a restart and the iterations
/// go on.
pub fn admm_fp<T: Real>(
    z: &HybridZonotope<T>,
    p: &SparseMatrix<T>,
    q: &[T],
    params: &SolverParams<T>,
    init: Option<(Vec<T>, Vec<T>)>,
) -> Result<SolverResult<T>> {
    admm_fp_observed(z, p, q, params, init, |_| {})
}

/// [`admm_fp`] with a per-iteration observer.
pub fn admm_fp_observed<T: Real, F>(
    z: &HybridZonotope<T>,
    p: &SparseMatrix<T>,
    q: &[T],
    params: &SolverParams<T>,
    init: Option<(Vec<T>, Vec<T>)>,
    mut observer: F,
) -> Result<SolverResult<T>>
where
    F: FnMut(&IterationEvent<'_, T>),
{
    params.validate()?;
    let start = Instant::now();
    let deadline = params.t_max.map(|t| start + t);
    let prep = Prepared::new(z, p, q, params.rho)?;
    let n = prep.mibox.len();
    let mut diagnostic = None;
    let mut warm_start_iterations = 0;
    let (zeta0, u0) = match init {
        Some((zeta, u)) => {
            if zeta.len() != n || u.len() != n {
                return dim_err(format!("initial iterates have lengths {} and {}, expected {n}", zeta.len(), u.len()));
            }
            (zeta, u)
        }
        None => {
            let run = run_convex(&prep, params, None, deadline)?;
            warm_start_iterations = run.iterations;
            if run.status != Status::Converged {
                diagnostic = Some(format!(
                    "convex relaxation stopped with {} after {} iterations (r_p = {})",
                    run.status, run.iterations, run.state.r_p
                ));
            }
            (run.state.zeta, run.state.u)
        }
    };

    let mut rng = RngStream::new(params.seed);
    let mut buf = CycleBuffer::new(params.l_buf);
    let mut state = IterateState::new(zeta0, u0);
    let mut k_max = params.k_ph1;
    let (mut r_best, mut k_r) = (T::infinity(), 0usize);
    let (mut total, mut phase1_iterations) = (0usize, 0usize);
    let (mut perturbations, mut restarts, mut rejections) = (0usize, 0usize, 0usize);
    if k_max == 0 {
        state.phase = 2;
        k_max = params.k_ph2;
    }

    let mut polished = false;
    let mut infeasible: HashSet<Vec<bool>> = HashSet::new();
    let mut polisher = None;
    let mid = (prep.mibox.form.lower::<T>() + prep.mibox.form.upper::<T>()) * T::lit(0.5);
    let status = loop {
        if state.k >= k_max {
            break Status::IterLimit;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break Status::TimeLimit;
        }
        let u_prev = std::mem::take(&mut state.u);
        let prev = IterateState { u: u_prev, ..state.clone() };
        let mut next = if prev.phase == 1 {
            phase1_step(&prev, &prep.kkt, &prep.obj.q, &prep.b, params.rho, &prep.mibox)?
        } else {
            phase2_step(&prev, &prep.proj, &prep.mibox)?
        };
        if next.phase == 1 {
            phase1_iterations += 1;
        }
        total += 1;
        let projected = next.zeta.clone();
        let mut flip = None;
        let mut converged = next.r_p <= params.eps_p;
        let mut rejected = false;
        if converged && params.polish {
            let pattern: Vec<bool> = next.zeta[prep.mibox.n_gc..].iter().map(|&v| v > mid).collect();
            let repair = if infeasible.contains(&pattern) {
                None
            } else {
                if polisher.is_none() {
                    polisher = Some(Polisher::new(z)?);
                }
                polisher.as_ref().expect("just built").polish(&next.zeta)?
            };
            match repair {
                Some(p) => {
                    polished = p != next.zeta;
                    next.zeta = p;
                }
                None => {
                    infeasible.insert(pattern);
                    (converged, rejected) = (false, true);
                }
            }
        }
        if rejected {
            // an infeasible pattern is handled like a stall
            next.zeta = binflip(&next.xi, &next.zeta, &prep.mibox, FlipMode::Restart, &mut rng).0;
            buf.clear();
            restarts += 1;
            rejections += 1;
            flip = Some(FlipMode::Restart);
            (k_r, r_best) = (0, next.r_p);
        } else if !converged {
            if detect_cycle(&mut buf, next.r_p, params.eps_buf) {
                next.zeta = binflip(&next.xi, &next.zeta, &prep.mibox, FlipMode::Perturb, &mut rng).0;
                buf.clear();
                perturbations += 1;
                flip = Some(FlipMode::Perturb);
            }
            if next.r_p < r_best {
                (k_r, r_best) = (0, next.r_p);
            } else {
                k_r += 1;
            }
            if k_r >= params.k_restart {
                next.zeta = binflip(&next.xi, &next.zeta, &prep.mibox, FlipMode::Restart, &mut rng).0;
                buf.clear();
                restarts += 1;
                flip = Some(FlipMode::Restart);
                (k_r, r_best) = (0, next.r_p);
            }
        }
        if !converged && next.k == k_max && next.phase == 1 {
            next.phase = 2;
            next.k = 0;
            k_max = params.k_ph2;
            buf.clear();
        }
        observer(&IterationEvent {
            iteration: total - 1,
            phase: prev.phase,
            xi: &next.xi,
            zeta_projected: &projected,
            zeta: &next.zeta,
            u_prev: &prev.u,
            u: &next.u,
            r_p: next.r_p,
            flip,
            buffer_len: buf.len(),
        });
        state = next;
        if converged {
            break Status::Converged;
        }
    };

    let zpt = prep.point(&state.zeta);
    let objective = set_objective(&prep.p, &prep.q, &zpt);
    Ok(SolverResult {
        z: zpt,
        xi: state.xi,
        zeta: state.zeta,
        u: state.u,
        r_p: state.r_p,
        status,
        iterations: total,
        phase1_iterations,
        wall_time: start.elapsed(),
        objective,
        warm_start_iterations,
        perturbations,
        restarts,
        rejections,
        polished,
        diagnostic,
    })
}
