//! Two-equilibrium PWA system on `[−2, 2] × [−1, 3]`, split at `x₁ = 0`.

use hzplan::reach::{build_problem, constrain_graph, reach_step, system_graph};
use hzplan::sets::{convert_form, Form};
use hzplan::unions::UnionKind;
use hzplan::{CostSpec, HybridZonotope, PwaMode, PwaSystem, Result, SparseMatrix};

fn dense(rows: &[Vec<f64>]) -> SparseMatrix {
    SparseMatrix::from_dense(rows).expect("rectangular literal")
}

/// Mode 1 on the left half-box, mode 2 on the right. The right half-box is
/// the mirror image of the left one under `x₁ → −x₁`, matching the system's
/// own mirror symmetry.
pub fn system() -> PwaSystem {
    let left = HybridZonotope::zonotope(dense(&[vec![2.0, 0.0], vec![0.0, 4.0]]), vec![-2.0, -1.0], Form::ZeroOne).unwrap();
    let right = HybridZonotope::zonotope(dense(&[vec![-2.0, 0.0], vec![0.0, 4.0]]), vec![2.0, -1.0], Form::ZeroOne).unwrap();
    let m1 = PwaMode::new(dense(&[vec![0.75, 0.25], vec![-0.25, 0.75]]), SparseMatrix::zeros(2, 0), vec![-0.25, -0.25], left)
        .unwrap();
    let m2 = PwaMode::new(dense(&[vec![0.75, -0.25], vec![0.25, 0.75]]), SparseMatrix::zeros(2, 0), vec![0.25, -0.25], right)
        .unwrap();
    PwaSystem::new(vec![m1, m2], state_bound(), None).unwrap()
}

/// `S̄ = [−2, 2] × [−1, 3]`.
pub fn state_bound() -> HybridZonotope {
    HybridZonotope::zonotope(dense(&[vec![2.0, 0.0], vec![0.0, 2.0]]), vec![0.0, 1.0], Form::Canonical).unwrap()
}

pub fn initial_set() -> HybridZonotope {
    HybridZonotope::zonotope(dense(&[vec![0.25, -0.19], vec![0.19, 0.25]]), vec![-1.31, 2.55], Form::Canonical).unwrap()
}

/// The reachable set `X_steps` or, with `lifted`, the lifted set `Z_steps`.
/// With `constrained`, every successor state is restricted to `S̄`.
pub fn build(steps: usize, kind: UnionKind, lifted: bool, constrained: bool) -> Result<HybridZonotope> {
    if steps == 0 {
        return Err(hzplan::Error::HorizonZero);
    }
    let sys = system();
    if lifted {
        let f: Vec<_> = (0..steps).map(|_| constrained.then(state_bound)).collect();
        let cost = CostSpec::new(SparseMatrix::identity(2), SparseMatrix::zeros(0, 0), SparseMatrix::identity(2), vec![vec![0.0; 2]; steps])?;
        return Ok(build_problem(&sys, &initial_set(), &f, &cost, kind)?.z);
    }
    let mut psi = system_graph(&sys, kind)?;
    if constrained {
        psi = constrain_graph(&psi, &convert_form(&state_bound(), psi.form()))?;
    }
    let mut x = convert_form(&initial_set(), psi.form());
    for _ in 0..steps {
        x = reach_step(&x, &psi, None)?;
    }
    Ok(x)
}
