//! Two-lane combined behavior and motion planning in road coordinates
//! `(s, d, ṡ, ḋ)`, with `d > 0` in the right lane.

use hzplan::kernel::RngStream;
use hzplan::reach::{constrain_graph, system_graph, LiftedBuilder};
use hzplan::sets::{cartesian_product, convert_form, Form};
use hzplan::unions::{union_zonotope, UnionKind};
use hzplan::{CostSpec, HybridZonotope, LiftedPlanningProblem, PwaMode, PwaSystem, Result, SolverParams, SparseMatrix};
use std::time::Duration;

use super::geometry::{dense, double_integrator, Aabb};

pub const K_D: f64 = 0.213;
pub const K_DDOT: f64 = 0.653;
pub const D_RIGHT: f64 = 0.255;
pub const D_LEFT: f64 = -0.255;
pub const D_MAX: f64 = 0.51;
pub const S_MAX: f64 = 10.5;
pub const V_MAX: f64 = 1.0;
pub const S_ACC: f64 = 1.0;
pub const D_ACC: f64 = 0.01;
pub const DT: f64 = 1.0;
pub const HORIZON: usize = 15;
pub const V_REF: f64 = 0.5;
/// Half-length of the lane segment blocked around an obstacle vehicle.
pub const BLOAT: f64 = 0.5;
pub const X0: [f64; 4] = [0.0, D_RIGHT, V_REF, 0.0];

/// `tan 30°`, the lateral-to-longitudinal speed ratio bound.
pub fn heading_ratio() -> f64 {
    (30f64).to_radians().tan()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Lane {
    Right,
    Left,
}

impl Lane {
    pub fn d_range(self) -> (f64, f64) {
        match self {
            Lane::Right => (0.0, D_MAX),
            Lane::Left => (-D_MAX, 0.0),
        }
    }
}

/// Obstacle vehicle keeping its lane at constant speed.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Vehicle {
    pub lane: Lane,
    pub s0: f64,
    pub speed: f64,
}

impl Vehicle {
    pub fn position(&self, k: usize) -> f64 {
        self.s0 + self.speed * DT * k as f64
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Scenario {
    pub vehicles: Vec<Vehicle>,
}

impl Scenario {
    /// A slow vehicle ahead in the right lane and a faster one in the left lane.
    pub fn fixed() -> Self {
        Self {
            vehicles: vec![
                Vehicle { lane: Lane::Right, s0: 2.0, speed: 0.1 },
                Vehicle { lane: Lane::Left, s0: 3.0, speed: 0.3 },
            ],
        }
    }

    /// One vehicle per lane, start uniform on `[0, v_max Δt N]`, speed normal (0.2, 0.1).
    pub fn random(seed: u64) -> Self {
        let mut rng = RngStream::new(seed);
        let vehicles = [Lane::Right, Lane::Left]
            .into_iter()
            .map(|lane| {
                let s0 = rng.uniform(0.0, V_MAX * DT * HORIZON as f64).expect("valid interval");
                let speed = rng.normal(0.2, 0.1);
                Vehicle { lane, s0, speed }
            })
            .collect();
        Self { vehicles }
    }

    /// Free lane segments at step `k` as boxes in `(s, d)`.
    pub fn free_space(&self, k: usize) -> Vec<Aabb> {
        let mut out = Vec::new();
        for lane in [Lane::Right, Lane::Left] {
            let mut blocked: Vec<(f64, f64)> = self
                .vehicles
                .iter()
                .filter(|v| v.lane == lane)
                .map(|v| (v.position(k) - BLOAT, v.position(k) + BLOAT))
                .collect();
            blocked.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (dlo, dhi) = lane.d_range();
            let mut s = 0.0;
            for (lo, hi) in blocked {
                if lo > s {
                    out.push(Aabb::new(vec![s, dlo], vec![lo.min(S_MAX), dhi]));
                }
                s = s.max(hi);
                if s >= S_MAX {
                    break;
                }
            }
            if s < S_MAX {
                out.push(Aabb::new(vec![s, dlo], vec![S_MAX, dhi]));
            }
        }
        out.retain(|b| b.hi[0] > b.lo[0]);
        out
    }
}

/// Closed-loop lane-tracking mode data.
#[derive(Clone, Debug)]
pub struct ModeData {
    pub lane: Lane,
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub f: Vec<f64>,
}

/// `A − BK`, `B` and the feedforward offsets for both lanes.
pub fn modes() -> Vec<ModeData> {
    let (a, b) = double_integrator(DT);
    let k = dense(&[vec![0.0; 4], vec![0.0, K_D, 0.0, K_DDOT]]);
    let acl = a.add(&b.matmul(&k).unwrap().scale(-1.0)).unwrap();
    [(Lane::Right, D_RIGHT), (Lane::Left, D_LEFT)]
        .into_iter()
        .map(|(lane, d)| {
            let f = b.mul_vec(&k.mul_vec(&[0.0, d, 0.0, 0.0]));
            ModeData { lane, a: acl.clone(), b: b.clone(), f }
        })
        .collect()
}

/// `{(ṡ, ḋ) : 0 ≤ ṡ ≤ v_max, 0 ≤ ±ḋ ≤ tan30° ṡ}` as a constrained zonotope
/// with one slack factor.
fn velocity_domain(lane: Lane) -> Result<HybridZonotope> {
    let t = heading_ratio();
    let sign = if lane == Lane::Right { 1.0 } else { -1.0 };
    HybridZonotope::constrained_zonotope(
        SparseMatrix::from_triplets(2, 3, [(0, 0, V_MAX), (1, 1, sign * t * V_MAX)])?,
        vec![0.0, 0.0],
        dense(&[vec![-1.0, 1.0, 1.0]]),
        vec![0.0],
        Form::ZeroOne,
    )
}

pub fn position_bound() -> Aabb {
    Aabb::new(vec![0.0, -D_MAX], vec![S_MAX, D_MAX])
}

pub fn velocity_bound() -> Aabb {
    let t = heading_ratio();
    Aabb::new(vec![0.0, -t * V_MAX], vec![V_MAX, t * V_MAX])
}

pub fn input_bound() -> Aabb {
    Aabb::new(vec![-S_ACC, -D_ACC], vec![S_ACC, D_ACC])
}

pub fn system() -> Result<PwaSystem> {
    let form = Form::ZeroOne;
    let pos = position_bound().to_set(form)?;
    let u = input_bound().to_set(form)?;
    let pwa = modes()
        .into_iter()
        .map(|m| {
            let dom = cartesian_product(&cartesian_product(&pos, &velocity_domain(m.lane)?)?, &u)?;
            PwaMode::new(m.a, m.b, m.f, dom)
        })
        .collect::<Result<Vec<_>>>()?;
    let s_bar = cartesian_product(&pos, &velocity_bound().to_set(form)?)?;
    PwaSystem::new(pwa, s_bar, Some(u))
}

/// Parameters tuned for this problem family.
pub fn solver_params(seed: u64) -> SolverParams {
    SolverParams {
        rho: 100.0,
        eps_p: 0.01,
        k_restart: 1000,
        k_ph1: 5000,
        eps_d: 0.1,
        t_max: Some(Duration::from_secs(1)),
        seed,
        ..SolverParams::default()
    }
}

/// A built instance.
#[derive(Clone, Debug)]
pub struct Behavior {
    pub scenario: Scenario,
    pub problem: LiftedPlanningProblem,
    pub x0: Vec<f64>,
    /// Free boxes for `x₁ … x_N`.
    pub free_space: Vec<Vec<Aabb>>,
}

/// Reference: right-lane centre at `V_REF` from `s₀`.
pub fn reference() -> Vec<Vec<f64>> {
    (1..=HORIZON).map(|k| vec![X0[0] + V_REF * DT * k as f64, D_RIGHT, V_REF, 0.0]).collect()
}

pub fn build(scenario: Scenario) -> Result<Behavior> {
    let sys = system()?;
    let psi = system_graph(&sys, UnionKind::Condensed)?;
    let form = psi.form();
    let v_bar = velocity_bound().to_set(form)?;
    let x0 = HybridZonotope::point(X0.to_vec(), form);
    let mut builder = LiftedBuilder::new(&x0, &sys.state_bound, sys.input_bound.as_ref(), form)?;
    let mut free_space = Vec::with_capacity(HORIZON);
    for k in 0..HORIZON {
        let boxes = scenario.free_space(k + 1);
        if boxes.is_empty() {
            return Err(hzplan::Error::InvalidArgument(format!("road fully blocked at step {}", k + 1)));
        }
        let sets = boxes.iter().map(|b| b.to_set(Form::ZeroOne)).collect::<Result<Vec<_>>>()?;
        let p = convert_form(&union_zonotope(&sets, None)?, form);
        let psi_k = constrain_graph(&psi, &cartesian_product(&p, &v_bar)?)?;
        builder.step(&psi_k)?;
        free_space.push(boxes);
    }
    let cost = CostSpec::new(
        SparseMatrix::from_diag(&[0.5, 0.5, 0.0, 0.0]),
        SparseMatrix::identity(2).scale(10.0),
        SparseMatrix::identity(4).scale(10.0),
        reference(),
    )?;
    Ok(Behavior { scenario, problem: builder.finish(&cost)?, x0: X0.to_vec(), free_space })
}
