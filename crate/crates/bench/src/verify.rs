//! Independent feasibility checks of solver output. Everything here works
//! from plain matrices and geometric constraint descriptions; no solver
//! residual code is reused.

use hzplan::reach::LiftedLayout;
use hzplan::sets::Form;
use hzplan::{HybridZonotope, SparseMatrix};

use crate::scenarios::behavior::{self, Behavior, Lane};
use crate::scenarios::reach_avoid::ReachAvoid;

fn dense_apply(m: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.rows()];
    for (i, j, v) in m.triplets() {
        out[i] += v * x[j];
    }
    out
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Equality tolerance for a returned factor vector.
pub const FACTOR_TOL: f64 = 1e-6;

/// Outcome of a factor-space check.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorCheck {
    /// `‖Aζ − b‖∞` at the returned factors.
    pub constraint_residual: f64,
    /// `‖Aξ − b‖∞` at the affine iterate.
    pub affine_residual: f64,
    /// `‖ξ − ζ‖∞`.
    pub split_gap: f64,
    /// `ζ` in the factor box with exactly integral binaries.
    pub in_box: bool,
}

impl FactorCheck {
    /// `ζ` is a member of the mixed-integer feasible set up to `tol`.
    pub fn passes(&self, tol: f64) -> bool {
        self.in_box && self.constraint_residual <= tol
    }
}

/// Checks `ζ` against the equality constraints and the mixed-integer box,
/// and reports how far the affine iterate `ξ` is from it.
pub fn check_factors(z: &HybridZonotope, xi: &[f64], zeta: &[f64]) -> FactorCheck {
    let a = z.constraints();
    let constraint_residual = max_abs_diff(&dense_apply(&a, zeta), z.b());
    let affine_residual = max_abs_diff(&dense_apply(&a, xi), z.b());
    let split_gap = max_abs_diff(xi, zeta);
    let (lo, hi) = match z.form() {
        Form::Canonical => (-1.0, 1.0),
        Form::ZeroOne => (0.0, 1.0),
    };
    let in_box = zeta.len() == z.n_g()
        && zeta[..z.n_gc()].iter().all(|&v| (lo..=hi).contains(&v))
        && zeta[z.n_gc()..].iter().all(|&v| v == lo || v == hi);
    FactorCheck { constraint_residual, affine_residual, split_gap, in_box }
}

/// Outcome of a trajectory check.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryCheck {
    /// Largest `‖x_{k+1} − (A x_k + B u_k + f)‖∞` over the stages.
    pub dynamics_residual: f64,
    pub violations: Vec<String>,
}

impl TrajectoryCheck {
    pub fn passes(&self, dynamics_tol: f64) -> bool {
        self.violations.is_empty() && self.dynamics_residual <= dynamics_tol
    }

    fn fail(&mut self, msg: String) {
        self.violations.push(msg);
    }
}

fn split(layout: &LiftedLayout, z: &[f64]) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let stride = layout.n_x + layout.n_u;
    let xs = (0..=layout.horizon).map(|k| z[k * stride..k * stride + layout.n_x].to_vec()).collect();
    let us = (0..layout.horizon).map(|k| z[k * stride + layout.n_x..(k + 1) * stride].to_vec()).collect();
    (xs, us)
}

/// Dynamics, state, input, free-space and terminal checks for a reach-avoid plan.
pub fn check_reach_avoid(ra: &ReachAvoid, z: &[f64], tol: f64) -> TrajectoryCheck {
    let mut out = TrajectoryCheck::default();
    let (xs, us) = split(&ra.problem.layout, z);
    let x0_err = max_abs_diff(&xs[0], &ra.x0);
    if x0_err > tol {
        out.fail(format!("initial state off by {x0_err:e}"));
    }
    for k in 0..ra.horizon {
        let mut pred = dense_apply(&ra.a, &xs[k]);
        for (p, v) in pred.iter_mut().zip(dense_apply(&ra.b, &us[k])) {
            *p += v;
        }
        out.dynamics_residual = out.dynamics_residual.max(max_abs_diff(&pred, &xs[k + 1]));
        if !ra.input_bound.contains(&us[k], tol) {
            out.fail(format!("input {k} outside its bound"));
        }
        let x = &xs[k + 1];
        if !ra.position_bound.contains(&x[..2], tol) || !ra.velocity_bound.contains(&x[2..], tol) {
            out.fail(format!("state {} outside its bound", k + 1));
        }
        if !ra.free_space.contains(&x[..2], tol) {
            out.fail(format!("position {} ({:.4}, {:.4}) not in free space", k + 1, x[0], x[1]));
        }
    }
    let xn = &xs[ra.horizon];
    if !ra.terminal_position.contains(&xn[..2], tol) || !ra.terminal_velocity.contains(&xn[2..], tol) {
        out.fail("terminal state outside the terminal set".into());
    }
    out
}

/// Active lane-tracking mode of each stage, chosen by the smaller dynamics residual.
pub fn behavior_modes(z: &[f64], layout: &LiftedLayout) -> Vec<(Lane, f64)> {
    let (xs, us) = split(layout, z);
    let modes = behavior::modes();
    (0..layout.horizon)
        .map(|k| {
            modes
                .iter()
                .map(|m| {
                    let mut pred = dense_apply(&m.a, &xs[k]);
                    for ((p, v), f) in pred.iter_mut().zip(dense_apply(&m.b, &us[k])).zip(&m.f) {
                        *p += v + f;
                    }
                    (m.lane, max_abs_diff(&pred, &xs[k + 1]))
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("two modes")
        })
        .collect()
}

/// Mode-domain membership, dynamics, bounds and free-space checks for a behavior plan.
pub fn check_behavior(bh: &Behavior, z: &[f64], tol: f64) -> TrajectoryCheck {
    let mut out = TrajectoryCheck::default();
    let layout = &bh.problem.layout;
    let (xs, us) = split(layout, z);
    let x0_err = max_abs_diff(&xs[0], &bh.x0);
    if x0_err > tol {
        out.fail(format!("initial state off by {x0_err:e}"));
    }
    let t = behavior::heading_ratio();
    let (pos, vel, inp) = (behavior::position_bound(), behavior::velocity_bound(), behavior::input_bound());
    for (k, (lane, r)) in behavior_modes(z, layout).into_iter().enumerate() {
        out.dynamics_residual = out.dynamics_residual.max(r);
        let (x, u) = (&xs[k], &us[k]);
        let (sd, dd) = (x[2], x[3]);
        let lateral = match lane {
            Lane::Right => dd,
            Lane::Left => -dd,
        };
        let in_domain = pos.contains(&x[..2], tol)
            && sd >= -tol
            && sd <= behavior::V_MAX + tol
            && lateral >= -tol
            && lateral <= t * sd + tol
            && inp.contains(u, tol);
        if !in_domain {
            out.fail(format!("stage {k} outside the {lane:?} mode domain"));
        }
        let next = &xs[k + 1];
        if !bh.free_space[k].iter().any(|b| b.contains(&next[..2], tol)) {
            out.fail(format!("position {} ({:.3}, {:.3}) not in free space", k + 1, next[0], next[1]));
        }
        if !vel.contains(&next[2..], tol) || !pos.contains(&next[..2], tol) {
            out.fail(format!("state {} outside its bound", k + 1));
        }
    }
    out
}
