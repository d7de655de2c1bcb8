use crate::error::{dim_err, Result};
use crate::kernel::SymFactorization;
use crate::scalar::{norm_inf, Real};
use crate::sets::Form;

use super::kkt::AffineProjector;

/// Layout of the mixed-integer factor box: `n_gc` continuous factors
/// followed by `n_gb` binaries, all over the form's interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MiBox {
    pub n_gc: usize,
    pub n_gb: usize,
    pub form: Form,
}

impl MiBox {
    pub fn new(n_gc: usize, n_gb: usize, form: Form) -> Self {
        Self { n_gc, n_gb, form }
    }

    /// The same box with every factor treated as continuous.
    pub fn relaxed(self) -> Self {
        Self { n_gc: self.n_gc + self.n_gb, n_gb: 0, form: self.form }
    }

    pub fn len(&self) -> usize {
        self.n_gc + self.n_gb
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn project<T: Real>(&self, v: &[T]) -> Vec<T> {
        project_mibox(v, self.n_gc, self.n_gb, self.form)
    }

    /// Whether `v` lies exactly in the box with integral binaries.
    pub fn contains<T: Real>(&self, v: &[T]) -> bool {
        let (lo, hi) = (self.form.lower::<T>(), self.form.upper::<T>());
        v.len() == self.len()
            && v[..self.n_gc].iter().all(|&x| x >= lo && x <= hi)
            && v[self.n_gc..].iter().all(|&x| x == lo || x == hi)
    }
}

/// Clamps continuous entries to the form's interval and snaps binaries to
/// the nearer endpoint, ties going to the upper one.
pub fn project_mibox<T: Real>(v: &[T], n_gc: usize, n_gb: usize, form: Form) -> Vec<T> {
    assert_eq!(v.len(), n_gc + n_gb, "factor vector length");
    let (lo, hi) = (form.lower::<T>(), form.upper::<T>());
    let mid = (lo + hi) * T::lit(0.5);
    v.iter()
        .enumerate()
        .map(|(j, &x)| {
            if j < n_gc {
                x.max(lo).min(hi)
            } else if x >= mid {
                hi
            } else {
                lo
            }
        })
        .collect()
}

/// ADMM iterates.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateState<T> {
    pub xi: Vec<T>,
    pub zeta: Vec<T>,
    pub u: Vec<T>,
    pub r_p: T,
    /// Iterations taken within the current phase.
    pub k: usize,
    pub phase: u8,
}

impl<T: Real> IterateState<T> {
    /// `ξ₀ = ζ₀ = ζ*`, `u₀ = u*`, infinite residual.
    pub fn new(zeta: Vec<T>, u: Vec<T>) -> Self {
        Self { xi: zeta.clone(), zeta, u, r_p: T::infinity(), k: 0, phase: 1 }
    }

    fn advance(&self, xi: Vec<T>, mibox: &MiBox) -> Self {
        let v: Vec<T> = xi.iter().zip(&self.u).map(|(&x, &u)| x + u).collect();
        let zeta = mibox.project(&v);
        let u: Vec<T> = self.u.iter().zip(&xi).zip(&zeta).map(|((&u, &x), &z)| u + (x - z)).collect();
        let diff: Vec<T> = xi.iter().zip(&zeta).map(|(&x, &z)| x - z).collect();
        Self { r_p: norm_inf(&diff), xi, zeta, u, k: self.k + 1, phase: self.phase }
    }

    fn zeta_minus_u(&self) -> Vec<T> {
        self.zeta.iter().zip(&self.u).map(|(&z, &u)| z - u).collect()
    }
}

/// One objective-aware iteration: `ξ⁺` from the KKT system, then the
/// box projection and the scaled dual update.
pub fn phase1_step<T: Real>(
    state: &IterateState<T>,
    kkt: &SymFactorization<T>,
    q_tilde: &[T],
    b: &[T],
    rho: T,
    mibox: &MiBox,
) -> Result<IterateState<T>> {
    let n = mibox.len();
    if state.zeta.len() != n || q_tilde.len() != n || kkt.dim() != n + b.len() {
        return dim_err("phase-1 step operands disagree in size");
    }
    let mut rhs: Vec<T> = state.zeta_minus_u().iter().zip(q_tilde).map(|(&v, &q)| rho * v - q).collect();
    rhs.extend_from_slice(b);
    let mut sol = kkt.solve(&rhs)?;
    sol.truncate(n);
    Ok(state.advance(sol, mibox))
}

/// One feasibility-only iteration: `ξ⁺ = π_A(ζ − u)`.
pub fn phase2_step<T: Real>(state: &IterateState<T>, proj: &AffineProjector<T>, mibox: &MiBox) -> Result<IterateState<T>> {
    let xi = proj.project(&state.zeta_minus_u())?;
    if xi.len() != mibox.len() {
        return dim_err("phase-2 step operands disagree in size");
    }
    Ok(state.advance(xi, mibox))
}

/// Convex variant of [`phase1_step`] used by the relaxation solver.
pub(crate) fn convex_step<T: Real>(
    state: &IterateState<T>,
    kkt: &SymFactorization<T>,
    q_tilde: &[T],
    b: &[T],
    rho: T,
    mibox: &MiBox,
) -> Result<IterateState<T>> {
    phase1_step(state, kkt, q_tilde, b, rho, &mibox.relaxed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::SparseMatrix;
    use crate::solver::kkt::build_kkt;

    #[test]
    fn projection_examples() {
        assert_eq!(project_mibox(&[0.4, 0.4], 1, 1, Form::Canonical), vec![0.4, 1.0]);
        assert_eq!(project_mibox(&[0.0], 0, 1, Form::Canonical), vec![1.0]);
        assert_eq!(project_mibox(&[1.7, -0.2, 0.49], 1, 2, Form::ZeroOne), vec![1.0, 0.0, 0.0]);
        assert_eq!(project_mibox(&[0.5], 0, 1, Form::ZeroOne), vec![1.0]);
    }

    #[test]
    fn phase1_fixed_point() {
        // min ½‖ξ‖² − (0.3, −0.2)ᵀξ over ξ1 + ξ2 = 0.1 has its optimum (0.3, −0.2) inside the box
        let p = SparseMatrix::identity(2);
        let q = vec![-0.3, 0.2];
        let a = SparseMatrix::from_dense(&[vec![1.0, 1.0]]).unwrap();
        let b = vec![0.1];
        let rho = 10.0;
        let kkt = build_kkt(&p, &a, rho).unwrap();
        let mibox = MiBox::new(2, 0, Form::Canonical);
        let xi: Vec<f64> = vec![0.3, -0.2];
        let s = IterateState { xi: xi.clone(), zeta: xi.clone(), u: vec![0.0; 2], r_p: 0.0, k: 0, phase: 1 };
        let s2 = phase1_step(&s, &kkt, &q, &b, rho, &mibox).unwrap();
        for i in 0..2 {
            assert!((s2.xi[i] - xi[i]).abs() < 1e-10);
            assert!((s2.zeta[i] - xi[i]).abs() < 1e-10);
            assert!(s2.u[i].abs() < 1e-10);
        }
    }

    #[test]
    fn phase1_matches_dense_step() {
        // 1 continuous + 1 binary, canonical
        let p = SparseMatrix::from_dense(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let q = vec![0.3, -0.7];
        let a = SparseMatrix::from_dense(&[vec![1.0, -2.0]]).unwrap();
        let b = vec![0.4];
        let rho = 3.0;
        let kkt = build_kkt(&p, &a, rho).unwrap();
        let mibox = MiBox::new(1, 1, Form::Canonical);
        let s = IterateState { xi: vec![0.0, 0.0], zeta: vec![0.2, -1.0], u: vec![0.1, 0.05], r_p: 1.0, k: 0, phase: 1 };
        let s2 = phase1_step(&s, &kkt, &q, &b, rho, &mibox).unwrap();

        // dense oracle by Cramer's rule on the 3x3 KKT system
        let m = [[2.0 + rho, 0.5, 1.0], [0.5, 1.0 + rho, -2.0], [1.0, -2.0, 0.0]];
        let rhs = [-0.3 + rho * (0.2 - 0.1), 0.7 + rho * (-1.0 - 0.05), 0.4];
        let det = |m: &[[f64; 3]; 3]| {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let d = det(&m);
        let xi: Vec<f64> = (0..2)
            .map(|col| {
                let mut mc = m;
                for r in 0..3 {
                    mc[r][col] = rhs[r];
                }
                det(&mc) / d
            })
            .collect();
        let v = [xi[0] + 0.1, xi[1] + 0.05];
        let zeta = [v[0].clamp(-1.0, 1.0), if v[1] >= 0.0 { 1.0 } else { -1.0 }];
        for i in 0..2 {
            assert!((s2.xi[i] - xi[i]).abs() < 1e-12);
            assert!((s2.zeta[i] - zeta[i]).abs() < 1e-12);
            assert_eq!(s2.u[i], s.u[i] + (s2.xi[i] - s2.zeta[i]));
        }
        assert_eq!(s2.zeta[1], zeta[1]);
        assert!((1.0 * s2.xi[0] - 2.0 * s2.xi[1] - 0.4).abs() < 1e-10);
    }

    #[test]
    fn phase2_projection() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 0.0]]).unwrap();
        let pr = AffineProjector::new(a, vec![0.0]).unwrap();
        let mibox = MiBox::new(2, 0, Form::Canonical);
        let s = IterateState { xi: vec![0.0; 2], zeta: vec![3.0, 4.0], u: vec![0.0; 2], r_p: 1.0, k: 0, phase: 2 };
        let s2 = phase2_step(&s, &pr, &mibox).unwrap();
        assert_eq!(s2.xi, vec![0.0, 4.0]);
        assert_eq!(s2.zeta, vec![0.0, 1.0]);
    }
}
