//! Double-integrator reach-avoid planning through a free space built from
//! axis-aligned corridor boxes.

use std::collections::VecDeque;

use hzplan::kernel::RngStream;
use hzplan::reach::{constrain_graph, mode_graph, LiftedBuilder};
use hzplan::sets::{cartesian_product, Form};
use hzplan::unions::union_zonotope;
use hzplan::{CostSpec, HybridZonotope, LiftedPlanningProblem, PwaMode, Result, SparseMatrix};

use super::geometry::{double_integrator, polygon_set, Aabb, Polygon};

pub const X_RANGE: (f64, f64) = (0.0, 10.0);
pub const Y_RANGE: (f64, f64) = (-5.0, 5.0);
/// Grid cells per axis used to place obstacles.
pub const GRID: usize = 5;
pub const OBSTACLES: usize = 3;
pub const X0: [f64; 4] = [0.1, 0.0, 0.1, 0.0];
pub const X_REF: [f64; 4] = [10.0, 0.0, 0.0, 0.0];
pub const V_MAX: f64 = 1.0;
pub const A_MAX: f64 = 0.1 * std::f64::consts::FRAC_PI_2;

/// Free space as a union of boxes over a grid with blocked cells.
#[derive(Clone, Debug, PartialEq)]
pub struct FreeSpace {
    pub blocked: Vec<(usize, usize)>,
    pub boxes: Vec<Aabb>,
}

fn cell_of(x: f64, y: f64) -> (usize, usize) {
    let w = (X_RANGE.1 - X_RANGE.0) / GRID as f64;
    let h = (Y_RANGE.1 - Y_RANGE.0) / GRID as f64;
    let i = (((x - X_RANGE.0) / w) as usize).min(GRID - 1);
    let j = (((y - Y_RANGE.0) / h) as usize).min(GRID - 1);
    (i, j)
}

impl FreeSpace {
    /// Whole rectangle, no obstacles.
    pub fn open() -> Self {
        Self::from_blocked(Vec::new())
    }

    /// `OBSTACLES` distinct blocked cells, avoiding the start and goal cells
    /// and keeping start and goal connected.
    pub fn random(rng: &mut RngStream) -> Self {
        let start = cell_of(X0[0], X0[1]);
        let goal = cell_of(X_REF[0], X_REF[1]);
        loop {
            let mut blocked: Vec<(usize, usize)> = Vec::new();
            while blocked.len() < OBSTACLES {
                let cell = (rng.below(GRID), rng.below(GRID));
                if cell != start && cell != goal && !blocked.contains(&cell) {
                    blocked.push(cell);
                }
            }
            if connected(&blocked, start, goal) {
                return Self::from_blocked(blocked);
            }
        }
    }

    /// Maximal horizontal runs of free cells, then merged vertically when
    /// consecutive rows have runs with identical extent.
    pub fn from_blocked(blocked: Vec<(usize, usize)>) -> Self {
        let w = (X_RANGE.1 - X_RANGE.0) / GRID as f64;
        let h = (Y_RANGE.1 - Y_RANGE.0) / GRID as f64;
        // (i_start, i_end, j_start, j_end) in cells, end exclusive
        let mut runs: Vec<(usize, usize, usize, usize)> = Vec::new();
        for j in 0..GRID {
            let mut i = 0;
            while i < GRID {
                if blocked.contains(&(i, j)) {
                    i += 1;
                    continue;
                }
                let s = i;
                while i < GRID && !blocked.contains(&(i, j)) {
                    i += 1;
                }
                match runs.iter_mut().find(|r| r.0 == s && r.1 == i && r.3 == j) {
                    Some(r) => r.3 = j + 1,
                    None => runs.push((s, i, j, j + 1)),
                }
            }
        }
        let boxes = runs
            .into_iter()
            .map(|(i0, i1, j0, j1)| {
                Aabb::new(
                    vec![X_RANGE.0 + w * i0 as f64, Y_RANGE.0 + h * j0 as f64],
                    vec![X_RANGE.0 + w * i1 as f64, Y_RANGE.0 + h * j1 as f64],
                )
            })
            .collect();
        Self { blocked, boxes }
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        self.boxes.iter().any(|b| b.contains(p, tol))
    }

    pub fn to_set(&self) -> Result<HybridZonotope> {
        let sets = self.boxes.iter().map(|b| b.to_set(Form::ZeroOne)).collect::<Result<Vec<_>>>()?;
        union_zonotope(&sets, None)
    }
}

fn connected(blocked: &[(usize, usize)], start: (usize, usize), goal: (usize, usize)) -> bool {
    let mut seen = vec![false; GRID * GRID];
    let mut queue = VecDeque::from([start]);
    seen[start.0 * GRID + start.1] = true;
    while let Some((i, j)) = queue.pop_front() {
        if (i, j) == goal {
            return true;
        }
        let nbrs = [(i.wrapping_sub(1), j), (i + 1, j), (i, j.wrapping_sub(1)), (i, j + 1)];
        for (a, b) in nbrs {
            if a < GRID && b < GRID && !seen[a * GRID + b] && !blocked.contains(&(a, b)) {
                seen[a * GRID + b] = true;
                queue.push_back((a, b));
            }
        }
    }
    false
}

/// A built instance together with the plain constraint data for verification.
#[derive(Clone, Debug)]
pub struct ReachAvoid {
    pub problem: LiftedPlanningProblem,
    pub free_space: FreeSpace,
    pub dt: f64,
    pub horizon: usize,
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub x0: Vec<f64>,
    pub position_bound: Aabb,
    pub velocity_bound: Polygon,
    pub input_bound: Polygon,
    pub terminal_position: Polygon,
    pub terminal_velocity: Polygon,
}

/// `Δt = 2/f_s`, `N = 10 f_s`.
pub fn build(f_s: usize, free_space: FreeSpace) -> Result<ReachAvoid> {
    if f_s == 0 {
        return Err(hzplan::Error::InvalidArgument("sampling factor must be at least 1".into()));
    }
    let dt = 2.0 / f_s as f64;
    let horizon = 10 * f_s;
    let (a, b) = double_integrator(dt);
    let form = Form::ZeroOne;
    let pos = Aabb::new(vec![X_RANGE.0, Y_RANGE.0], vec![X_RANGE.1, Y_RANGE.1]);
    let s_bar = cartesian_product(&pos.to_set(form)?, &polygon_set(V_MAX, 4, [0.0, 0.0], form)?)?;
    let u_bar = polygon_set(A_MAX, 4, [0.0, 0.0], form)?;
    let domain = cartesian_product(&s_bar, &u_bar)?;
    let psi = mode_graph(&PwaMode::new(a.clone(), b.clone(), vec![0.0; 4], domain)?)?;
    let terminal = cartesian_product(
        &polygon_set(1.0, 6, [X_REF[0], X_REF[1]], form)?,
        &polygon_set(0.01, 6, [X_REF[2], X_REF[3]], form)?,
    )?;
    let psi_last = constrain_graph(&psi, &terminal)?;
    let free = free_space.to_set()?;
    let sel = SparseMatrix::from_dense(&[vec![1.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0]])?;

    let x0 = HybridZonotope::point(X0.to_vec(), form);
    let mut builder = LiftedBuilder::new(&x0, &s_bar, Some(&u_bar), form)?;
    for k in 0..horizon {
        builder.step(if k + 1 == horizon { &psi_last } else { &psi })?;
        builder.constrain_last_state(&sel, &free)?;
    }
    let nf = horizon as f64;
    let cost = CostSpec::new(
        SparseMatrix::from_diag(&[0.1 / nf, 0.1 / nf, 0.0, 0.0]),
        SparseMatrix::identity(2).scale(10.0 / nf),
        SparseMatrix::from_diag(&[1.0, 1.0, 0.0, 0.0]),
        vec![X_REF.to_vec(); horizon],
    )?;
    Ok(ReachAvoid {
        problem: builder.finish(&cost)?,
        free_space,
        dt,
        horizon,
        a,
        b,
        x0: X0.to_vec(),
        position_bound: pos,
        velocity_bound: Polygon::regular(V_MAX, 4, [0.0, 0.0]),
        input_bound: Polygon::regular(A_MAX, 4, [0.0, 0.0]),
        terminal_position: Polygon::regular(1.0, 6, [X_REF[0], X_REF[1]]),
        terminal_velocity: Polygon::regular(0.01, 6, [X_REF[2], X_REF[3]]),
    })
}

/// Instance for `seed`: random free space, `f_s` sampling factor.
pub fn random(f_s: usize, seed: u64) -> Result<ReachAvoid> {
    build(f_s, FreeSpace::random(&mut RngStream::new(seed)))
}
