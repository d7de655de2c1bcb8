//! Graph-of-function reachability for piecewise-affine systems and the
//! lifted planning problem built from it.
//!
//! State/input ordering in a graph set is `(x, u, x⁺)`. The lifted vector is
//! `(x₀, u₀, x₁, u₁, …, u_{N−1}, x_N)`.

use std::ops::Range;

use crate::error::{dim_err, Error, Result};
use crate::kernel::SparseMatrix;
use crate::scalar::Real;
use crate::sets::{affine_map, cartesian_product, convert_form, generalized_intersection, minkowski_sum, Form, HybridZonotope};
use crate::unions::{union, UnionKind};

/// One affine mode `x⁺ = A x + B u + f`, active on `domain ⊂ (x, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PwaMode<T> {
    pub a: SparseMatrix<T>,
    pub b: SparseMatrix<T>,
    pub f: Vec<T>,
    pub domain: HybridZonotope<T>,
}

impl<T: Real> PwaMode<T> {
    pub fn new(a: SparseMatrix<T>, b: SparseMatrix<T>, f: Vec<T>, domain: HybridZonotope<T>) -> Result<Self> {
        let nx = a.rows();
        if a.cols() != nx || b.rows() != nx || f.len() != nx || domain.dim() != nx + b.cols() {
            return dim_err(format!(
                "mode with A {:?}, B {:?}, f {} and domain of dimension {}",
                a.shape(),
                b.shape(),
                f.len(),
                domain.dim()
            ));
        }
        Ok(Self { a, b, f, domain })
    }

    pub fn n_x(&self) -> usize {
        self.a.rows()
    }

    pub fn n_u(&self) -> usize {
        self.b.cols()
    }

    /// `A x + B u + f`.
    pub fn apply(&self, x: &[T], u: &[T]) -> Vec<T> {
        let ax = self.a.mul_vec(x);
        let bu = self.b.mul_vec(u);
        ax.iter().zip(&bu).zip(&self.f).map(|((&p, &q), &r)| p + q + r).collect()
    }
}

/// Piecewise-affine system with state and input bounds.
///
/// The union of mode domains must be separable as `S × U` (a caller
/// obligation, not checked).
#[derive(Clone, Debug, PartialEq)]
pub struct PwaSystem<T> {
    pub modes: Vec<PwaMode<T>>,
    pub n_x: usize,
    pub n_u: usize,
    /// Bound `S̄` on every state.
    pub state_bound: HybridZonotope<T>,
    /// Bound `Ū` on every input; `None` for autonomous systems.
    pub input_bound: Option<HybridZonotope<T>>,
}

impl<T: Real> PwaSystem<T> {
    pub fn new(modes: Vec<PwaMode<T>>, state_bound: HybridZonotope<T>, input_bound: Option<HybridZonotope<T>>) -> Result<Self> {
        let first = modes.first().ok_or(Error::EmptyUnion)?;
        let (n_x, n_u) = (first.n_x(), first.n_u());
        if modes.iter().any(|m| m.n_x() != n_x || m.n_u() != n_u) {
            return dim_err("modes disagree on state or input dimension");
        }
        if state_bound.dim() != n_x {
            return dim_err("state bound dimension");
        }
        match (&input_bound, n_u) {
            (None, 0) => {}
            (Some(u), _) if u.dim() == n_u && n_u > 0 => {}
            _ => return dim_err("input bound must be given exactly when the system has inputs"),
        }
        Ok(Self { modes, n_x, n_u, state_bound, input_bound })
    }
}

/// Graph `{(x, u, A x + B u + f) : (x, u) ∈ domain}` of one mode.
pub fn mode_graph<T: Real>(mode: &PwaMode<T>) -> Result<HybridZonotope<T>> {
    let (nx, nu) = (mode.n_x(), mode.n_u());
    let ab = SparseMatrix::hstack(&[&mode.a, &mode.b])?;
    let r = SparseMatrix::vstack(&[&SparseMatrix::identity(nx + nu), &ab])?;
    let image = affine_map(&r, &mode.domain, &vec![T::zero(); 2 * nx + nu])?;
    let mut offset = vec![T::zero(); nx + nu];
    offset.extend_from_slice(&mode.f);
    minkowski_sum(&image, &HybridZonotope::point(offset, mode.domain.form()))
}

/// Union of all mode graphs.
pub fn system_graph<T: Real>(sys: &PwaSystem<T>, kind: UnionKind) -> Result<HybridZonotope<T>> {
    let graphs = sys.modes.iter().map(mode_graph).collect::<Result<Vec<_>>>()?;
    if kind == UnionKind::Zonotope {
        if let Some(i) = graphs.iter().position(|g| !g.is_zonotope()) {
            return Err(Error::ZonotopeUnionInapplicable(i));
        }
    }
    union(&graphs, kind)
}

fn selector<T: Real>(rows: usize, cols: usize, start: usize) -> SparseMatrix<T> {
    SparseMatrix::from_triplets_unchecked(rows, cols, (0..rows).map(|i| (i, start + i, T::one())))
}

/// `Ψ ∩_{[0 0 I]} F`: restricts successor states to `f_next`.
pub fn constrain_graph<T: Real>(psi: &HybridZonotope<T>, f_next: &HybridZonotope<T>) -> Result<HybridZonotope<T>> {
    let nx = f_next.dim();
    if psi.dim() < 2 * nx {
        return dim_err("constraint set larger than the graph's state block");
    }
    generalized_intersection(psi, f_next, &selector(nx, psi.dim(), psi.dim() - nx))
}

/// One step of the forward reachable-set recursion.
pub fn reach_step<T: Real>(
    x_k: &HybridZonotope<T>,
    psi: &HybridZonotope<T>,
    u_bar: Option<&HybridZonotope<T>>,
) -> Result<HybridZonotope<T>> {
    let nx = x_k.dim();
    if psi.dim() < 2 * nx {
        return dim_err("graph dimension smaller than twice the state dimension");
    }
    let nu = psi.dim() - 2 * nx;
    let xu = match (u_bar, nu) {
        (_, 0) => x_k.clone(),
        (Some(u), _) if u.dim() == nu => cartesian_product(x_k, u)?,
        _ => return dim_err("input bound missing or of the wrong dimension"),
    };
    let joined = generalized_intersection(psi, &xu, &selector(nx + nu, psi.dim(), 0))?;
    affine_map(&selector(nx, psi.dim(), nx + nu), &joined, &vec![T::zero(); nx])
}

/// One step of the lifted recursion: `(Z_k × Ū × S̄) ∩_{[0 … 0 I]} Ψ̃`.
pub fn lifted_step<T: Real>(
    z_k: &HybridZonotope<T>,
    psi_tilde: &HybridZonotope<T>,
    s_bar: &HybridZonotope<T>,
    u_bar: Option<&HybridZonotope<T>>,
) -> Result<HybridZonotope<T>> {
    let nx = s_bar.dim();
    let nu = u_bar.map_or(0, HybridZonotope::dim);
    if psi_tilde.dim() != 2 * nx + nu || z_k.dim() < nx {
        return dim_err(format!("lifted step with graph dimension {} for n_x = {nx}, n_u = {nu}", psi_tilde.dim()));
    }
    let mut ext = z_k.clone();
    if let Some(u) = u_bar {
        ext = cartesian_product(&ext, u)?;
    }
    ext = cartesian_product(&ext, s_bar)?;
    let start = ext.dim() - psi_tilde.dim();
    generalized_intersection(&ext, psi_tilde, &selector(psi_tilde.dim(), ext.dim(), start))
}

/// Reachable sets `X₁ … X_steps` from `x0`.
pub fn reachable_sets<T: Real>(
    sys: &PwaSystem<T>,
    x0: &HybridZonotope<T>,
    steps: usize,
    kind: UnionKind,
) -> Result<Vec<HybridZonotope<T>>> {
    let psi = system_graph(sys, kind)?;
    let form = psi.form();
    let u_bar = sys.input_bound.as_ref().map(|u| convert_form(u, form));
    let mut x = convert_form(x0, form);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        x = reach_step(&x, &psi, u_bar.as_ref())?;
        out.push(x.clone());
    }
    Ok(out)
}

/// Quadratic tracking cost.
#[derive(Clone, Debug, PartialEq)]
pub struct CostSpec<T> {
    pub q: SparseMatrix<T>,
    pub r: SparseMatrix<T>,
    pub q_n: SparseMatrix<T>,
    /// Reference states `x₁ʳ … x_Nʳ`.
    pub x_ref: Vec<Vec<T>>,
}

impl<T: Real> CostSpec<T> {
    pub fn new(q: SparseMatrix<T>, r: SparseMatrix<T>, q_n: SparseMatrix<T>, x_ref: Vec<Vec<T>>) -> Result<Self> {
        for (name, m) in [("Q", &q), ("R", &r), ("Q_N", &q_n)] {
            if !is_psd(m) {
                return Err(Error::InvalidArgument(format!("{name} is not symmetric positive semidefinite")));
            }
        }
        if q.rows() != q_n.rows() {
            return dim_err("Q and Q_N sizes differ");
        }
        if x_ref.iter().any(|x| x.len() != q.rows()) {
            return dim_err("reference state length");
        }
        Ok(Self { q, r, q_n, x_ref })
    }
}

/// Symmetry plus a nonnegative-pivot test with diagonal pivoting.
fn is_psd<T: Real>(m: &SparseMatrix<T>) -> bool {
    let scale = T::one().max(m.max_abs());
    if !m.is_symmetric(T::lit(1e-12) * scale) {
        return false;
    }
    let n = m.rows();
    let mut a = m.to_dense();
    let tol = T::lit(1e-10) * scale;
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let (pos, &p) = active.iter().enumerate().max_by(|x, y| a[*x.1][*x.1].partial_cmp(&a[*y.1][*y.1]).expect("finite")).expect("nonempty");
        let d = a[p][p];
        if d < -tol {
            return false;
        }
        if d <= tol {
            // the remaining block must vanish
            return active.iter().all(|&i| active.iter().all(|&j| a[i][j].abs() <= tol));
        }
        active.swap_remove(pos);
        for &i in &active {
            for &j in &active {
                a[i][j] = a[i][j] - a[i][p] * a[p][j] / d;
            }
        }
    }
    true
}

/// Stage-wise index map of the lifted vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LiftedLayout {
    pub n_x: usize,
    pub n_u: usize,
    pub horizon: usize,
}

/// Role of a lifted coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    State,
    Input,
}

impl LiftedLayout {
    pub fn dim(&self) -> usize {
        (self.horizon + 1) * self.n_x + self.horizon * self.n_u
    }

    pub fn state(&self, k: usize) -> Range<usize> {
        let s = k * (self.n_x + self.n_u);
        s..s + self.n_x
    }

    pub fn input(&self, k: usize) -> Range<usize> {
        let s = k * (self.n_x + self.n_u) + self.n_x;
        s..s + self.n_u
    }

    /// `(stage, role, component)` of lifted coordinate `i`.
    pub fn locate(&self, i: usize) -> (usize, Role, usize) {
        let stride = self.n_x + self.n_u;
        let (k, off) = (i / stride, i % stride);
        if off < self.n_x {
            (k, Role::State, off)
        } else {
            (k, Role::Input, off - self.n_x)
        }
    }

    /// Splits a lifted vector into states `x₀…x_N` and inputs `u₀…u_{N−1}`.
    pub fn split<T: Real>(&self, z: &[T]) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
        let xs = (0..=self.horizon).map(|k| z[self.state(k)].to_vec()).collect();
        let us = (0..self.horizon).map(|k| z[self.input(k)].to_vec()).collect();
        (xs, us)
    }
}

/// The lifted mixed-integer planning problem `min ½zᵀPz + qᵀz, z ∈ Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiftedPlanningProblem<T> {
    pub z: HybridZonotope<T>,
    pub p: SparseMatrix<T>,
    pub q: Vec<T>,
    pub horizon: usize,
    pub layout: LiftedLayout,
}

/// Incremental construction of the lifted set, one stage at a time.
///
/// Extra per-stage constraints (obstacle avoidance, for instance) can be
/// applied to the newest state between steps.
#[derive(Clone, Debug)]
pub struct LiftedBuilder<T> {
    z: HybridZonotope<T>,
    s_bar: HybridZonotope<T>,
    u_bar: Option<HybridZonotope<T>>,
    n_x: usize,
    n_u: usize,
    steps: usize,
}

impl<T: Real> LiftedBuilder<T> {
    /// Starts from `Z₀ = X₀`; all sets are converted to `form`.
    pub fn new(x0: &HybridZonotope<T>, s_bar: &HybridZonotope<T>, u_bar: Option<&HybridZonotope<T>>, form: Form) -> Result<Self> {
        if x0.dim() != s_bar.dim() {
            return dim_err("initial set and state bound dimensions differ");
        }
        Ok(Self {
            z: convert_form(x0, form),
            s_bar: convert_form(s_bar, form),
            u_bar: u_bar.map(|u| convert_form(u, form)),
            n_x: x0.dim(),
            n_u: u_bar.map_or(0, HybridZonotope::dim),
            steps: 0,
        })
    }

    /// Appends one stage using the (state-constrained) graph `psi_tilde`.
    pub fn step(&mut self, psi_tilde: &HybridZonotope<T>) -> Result<()> {
        let psi = convert_form(psi_tilde, self.z.form());
        self.z = lifted_step(&self.z, &psi, &self.s_bar, self.u_bar.as_ref())?;
        self.steps += 1;
        Ok(())
    }

    /// Restricts `sel · x_k` of the newest state to `set`.
    pub fn constrain_last_state(&mut self, sel: &SparseMatrix<T>, set: &HybridZonotope<T>) -> Result<()> {
        if sel.cols() != self.n_x || sel.rows() != set.dim() {
            return dim_err("state selector shape");
        }
        let start = self.z.dim() - self.n_x;
        let r = SparseMatrix::hstack(&[&SparseMatrix::zeros(sel.rows(), start), sel])?;
        self.z = generalized_intersection(&self.z, &convert_form(set, self.z.form()), &r)?;
        Ok(())
    }

    pub fn set(&self) -> &HybridZonotope<T> {
        &self.z
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Attaches the quadratic cost and returns the planning problem.
    pub fn finish(self, cost: &CostSpec<T>) -> Result<LiftedPlanningProblem<T>> {
        let n = self.steps;
        if n == 0 {
            return Err(Error::HorizonZero);
        }
        if cost.q.rows() != self.n_x || cost.r.rows() != self.n_u || cost.x_ref.len() != n {
            return dim_err("cost matrices or reference length do not match the problem");
        }
        let mut blocks: Vec<&SparseMatrix<T>> = vec![&cost.q];
        let mut q = vec![T::zero(); self.n_x];
        for k in 1..=n {
            let qk = if k == n { &cost.q_n } else { &cost.q };
            blocks.push(&cost.r);
            blocks.push(qk);
            q.extend(std::iter::repeat_n(T::zero(), self.n_u));
            q.extend(qk.mul_vec(&cost.x_ref[k - 1]).into_iter().map(|v| -v));
        }
        let p = SparseMatrix::block_diag(&blocks);
        let layout = LiftedLayout { n_x: self.n_x, n_u: self.n_u, horizon: n };
        debug_assert_eq!(layout.dim(), self.z.dim());
        Ok(LiftedPlanningProblem { z: self.z, p, q, horizon: n, layout })
    }
}

/// Builds the lifted planning problem of a time-invariant system.
///
/// `f[k]` constrains `x_{k+1}`; `None` leaves that stage unconstrained.
pub fn build_problem<T: Real>(
    sys: &PwaSystem<T>,
    x0: &HybridZonotope<T>,
    f: &[Option<HybridZonotope<T>>],
    cost: &CostSpec<T>,
    kind: UnionKind,
) -> Result<LiftedPlanningProblem<T>> {
    if f.is_empty() {
        return Err(Error::HorizonZero);
    }
    let psi = system_graph(sys, kind)?;
    let form = psi.form();
    let mut builder = LiftedBuilder::new(x0, &sys.state_bound, sys.input_bound.as_ref(), form)?;
    for fk in f {
        let psi_k = match fk {
            Some(set) => constrain_graph(&psi, &convert_form(set, form))?,
            None => psi.clone(),
        };
        builder.step(&psi_k)?;
    }
    builder.finish(cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{complexity, contains_point};

    fn identity_system() -> PwaSystem<f64> {
        let dom = HybridZonotope::from_box(&[-1.0, -1.0], &[1.0, 1.0], Form::ZeroOne).unwrap();
        let mode = PwaMode::new(SparseMatrix::identity(1), SparseMatrix::zeros(1, 1), vec![0.0], dom).unwrap();
        let s = HybridZonotope::from_box(&[-1.0], &[1.0], Form::ZeroOne).unwrap();
        PwaSystem::new(vec![mode], s.clone(), Some(s)).unwrap()
    }

    #[test]
    fn identity_graph_repeats_state() {
        let sys = identity_system();
        let g = mode_graph(&sys.modes[0]).unwrap();
        assert_eq!(g.dim(), 3);
        for xi in [[0.0, 0.0], [0.3, 0.9], [1.0, 0.25]] {
            let p = g.point_at(&xi);
            assert_eq!(p[0], p[2]);
        }
    }

    #[test]
    fn single_mode_union_matches_graph() {
        let sys = identity_system();
        let psi = system_graph(&sys, UnionKind::Condensed).unwrap();
        assert!(contains_point(&psi, &[0.5, -0.2, 0.5], 1e-9).unwrap());
        assert!(!contains_point(&psi, &[0.5, -0.2, 0.4], 1e-9).unwrap());
    }

    #[test]
    fn horizon_one_cost_assembly() {
        let sys = identity_system();
        let x0 = HybridZonotope::from_box(&[-0.5], &[0.5], Form::ZeroOne).unwrap();
        let eye = SparseMatrix::identity(1);
        let cost = CostSpec::new(eye.clone(), eye.clone(), eye.clone(), vec![vec![0.0]]).unwrap();
        let p = build_problem(&sys, &x0, &[None], &cost, UnionKind::Sharp).unwrap();
        assert_eq!(p.p, SparseMatrix::identity(3));
        assert_eq!(p.q, vec![0.0; 3]);
        let psi = system_graph(&sys, UnionKind::Sharp).unwrap();
        let one = lifted_step(&convert_form(&x0, Form::ZeroOne), &psi, &sys.state_bound, sys.input_bound.as_ref()).unwrap();
        assert_eq!(p.z, one);
        assert_eq!(build_problem(&sys, &x0, &[], &cost, UnionKind::Sharp), Err(Error::HorizonZero));
    }

    #[test]
    fn zonotope_union_needs_plain_graphs() {
        let mut sys = identity_system();
        let dom = &sys.modes[0].domain;
        let cz = generalized_intersection(dom, dom, &SparseMatrix::identity(2)).unwrap();
        sys.modes[0].domain = cz;
        assert_eq!(system_graph(&sys, UnionKind::Zonotope), Err(Error::ZonotopeUnionInapplicable(0)));
    }

    #[test]
    fn constraint_counts() {
        let sys = identity_system();
        let psi = system_graph(&sys, UnionKind::Condensed).unwrap();
        let f = HybridZonotope::from_box(&[-0.5], &[0.5], Form::ZeroOne).unwrap();
        let c = constrain_graph(&psi, &f).unwrap();
        assert_eq!(complexity(&c).n_c, complexity(&psi).n_c + f.n_c() + 1);
    }

    #[test]
    fn psd_check() {
        assert!(is_psd(&SparseMatrix::<f64>::from_diag(&[1.0, 0.0, 2.0])));
        assert!(!is_psd(&SparseMatrix::<f64>::from_diag(&[1.0, -1e-3])));
        assert!(!is_psd(&SparseMatrix::<f64>::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()));
        assert!(is_psd(&SparseMatrix::<f64>::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap()));
        assert!(!is_psd(&SparseMatrix::<f64>::from_dense(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap()));
    }

    #[test]
    fn layout_indices() {
        let l = LiftedLayout { n_x: 2, n_u: 1, horizon: 3 };
        assert_eq!(l.dim(), 11);
        assert_eq!(l.state(1), 3..5);
        assert_eq!(l.input(2), 8..9);
        assert_eq!(l.locate(9), (3, Role::State, 0));
        assert_eq!(l.locate(5), (1, Role::Input, 0));
    }
}
