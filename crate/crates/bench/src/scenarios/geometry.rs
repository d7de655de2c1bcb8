//! Plain geometric descriptions of scenario constraints, kept apart from
//! the set representations so the verifier can check them independently.

use hzplan::sets::{regular_polygon_zonotope, Form};
use hzplan::{HybridZonotope, Result, SparseMatrix};
use serde::{Deserialize, Serialize};

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Aabb {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bounds");
        Self { lo, hi }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.lo.len() && x.iter().zip(&self.lo).zip(&self.hi).all(|((&v, &l), &h)| v >= l - tol && v <= h + tol)
    }

    pub fn to_set(&self, form: Form) -> Result<HybridZonotope> {
        HybridZonotope::from_box(&self.lo, &self.hi, form)
    }
}

/// Centrally symmetric planar polygon `{ c + Σ λ_j g_j : |λ_j| ≤ 1 }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub center: [f64; 2],
    pub generators: Vec<[f64; 2]>,
}

impl Polygon {
    /// Regular `sides`-gon of circumradius `r` about `center`.
    pub fn regular(r: f64, sides: usize, center: [f64; 2]) -> Self {
        let step = std::f64::consts::PI / sides as f64;
        let len = r * step.sin();
        let generators = (0..sides / 2)
            .map(|j| {
                let th = (2 * j + 1) as f64 * step;
                [len * th.cos(), len * th.sin()]
            })
            .collect();
        Self { center, generators }
    }

    /// Membership through the facet inequalities of the zonotope.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        self.generators.iter().all(|g| {
            let a = [-g[1], g[0]];
            let norm = (a[0] * a[0] + a[1] * a[1]).sqrt();
            let bound: f64 = self.generators.iter().map(|h| (a[0] * h[0] + a[1] * h[1]).abs()).sum();
            (a[0] * d[0] + a[1] * d[1]).abs() <= bound + tol * norm
        })
    }
}

/// Regular polygon as a set, centred at `center`.
pub fn polygon_set(r: f64, sides: usize, center: [f64; 2], form: Form) -> Result<HybridZonotope> {
    let base = regular_polygon_zonotope(r, sides, form)?;
    let shift = HybridZonotope::point(center.to_vec(), form);
    hzplan::sets::minkowski_sum(&base, &shift)
}

/// Dense literal helper.
pub fn dense(rows: &[Vec<f64>]) -> SparseMatrix {
    SparseMatrix::from_dense(rows).expect("rectangular literal")
}

/// Double integrator in the plane with state `(p₁, p₂, v₁, v₂)`.
pub fn double_integrator(dt: f64) -> (SparseMatrix, SparseMatrix) {
    let h = 0.5 * dt * dt;
    let a = dense(&[
        vec![1.0, 0.0, dt, 0.0],
        vec![0.0, 1.0, 0.0, dt],
        vec![0.0, 0.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
    ]);
    let b = dense(&[vec![h, 0.0], vec![0.0, h], vec![dt, 0.0], vec![0.0, dt]]);
    (a, b)
}
