use hzplan::kernel::SparseMatrix;
use hzplan::reach::{build_problem, reachable_sets, CostSpec, PwaMode, PwaSystem};
use hzplan::sets::{contains_point, Form, HybridZonotope};
use hzplan::unions::UnionKind;

fn dense(rows: &[Vec<f64>]) -> SparseMatrix<f64> {
    SparseMatrix::from_dense(rows).unwrap()
}

fn two_equilibrium() -> PwaSystem<f64> {
    let left = HybridZonotope::zonotope(dense(&[vec![2.0, 0.0], vec![0.0, 4.0]]), vec![-2.0, -1.0], Form::ZeroOne).unwrap();
    let right = HybridZonotope::zonotope(dense(&[vec![-2.0, 0.0], vec![0.0, 4.0]]), vec![2.0, -1.0], Form::ZeroOne).unwrap();
    let m1 = PwaMode::new(dense(&[vec![0.75, 0.25], vec![-0.25, 0.75]]), SparseMatrix::zeros(2, 0), vec![-0.25, -0.25], left).unwrap();
    let m2 = PwaMode::new(dense(&[vec![0.75, -0.25], vec![0.25, 0.75]]), SparseMatrix::zeros(2, 0), vec![0.25, -0.25], right).unwrap();
    let s = HybridZonotope::zonotope(dense(&[vec![2.0, 0.0], vec![0.0, 2.0]]), vec![0.0, 1.0], Form::Canonical).unwrap();
    PwaSystem::new(vec![m1, m2], s, None).unwrap()
}

fn step(sys: &PwaSystem<f64>, x: &[f64]) -> Vec<f64> {
    let mode = if x[0] <= 0.0 { &sys.modes[0] } else { &sys.modes[1] };
    mode.apply(x, &[])
}

fn initial_points(per_axis: usize) -> Vec<Vec<f64>> {
    let g = [[0.25, -0.19], [0.19, 0.25]];
    let c = [-1.31, 2.55];
    let t = |i: usize| -1.0 + 2.0 * i as f64 / (per_axis - 1) as f64;
    let mut out = Vec::new();
    for i in 0..per_axis {
        for j in 0..per_axis {
            let (a, b) = (t(i), t(j));
            out.push(vec![c[0] + g[0][0] * a + g[0][1] * b, c[1] + g[1][0] * a + g[1][1] * b]);
        }
    }
    out
}

#[test]
fn simulated_trajectories_stay_in_reachable_sets() {
    let sys = two_equilibrium();
    let x0 = HybridZonotope::zonotope(dense(&[vec![0.25, -0.19], vec![0.19, 0.25]]), vec![-1.31, 2.55], Form::Canonical).unwrap();
    let steps = 3;
    for kind in [UnionKind::Condensed, UnionKind::Sharp] {
        let sets = reachable_sets(&sys, &x0, steps, kind).unwrap();
        let cost = CostSpec::new(SparseMatrix::identity(2), SparseMatrix::zeros(0, 0), SparseMatrix::identity(2), vec![vec![0.0; 2]; steps])
            .unwrap();
        let lifted = build_problem(&sys, &x0, &vec![None; steps], &cost, kind).unwrap();
        for p in initial_points(4) {
            let mut traj = p.clone();
            let mut x = p;
            for set in &sets {
                x = step(&sys, &x);
                assert!(contains_point(set, &x, 1e-6).unwrap(), "{kind:?} {x:?}");
                traj.extend_from_slice(&x);
            }
            assert!(contains_point(&lifted.z, &traj, 1e-6).unwrap());
        }
    }
}

#[test]
fn reachable_set_excludes_unreachable_point() {
    let sys = two_equilibrium();
    let x0 = HybridZonotope::zonotope(dense(&[vec![0.1, 0.0], vec![0.0, 0.1]]), vec![-1.0, 1.0], Form::Canonical).unwrap();
    let x1 = &reachable_sets(&sys, &x0, 1, UnionKind::Condensed).unwrap()[0];
    let image = step(&sys, &[-1.0, 1.0]);
    assert!(contains_point(x1, &image, 1e-9).unwrap());
    assert!(!contains_point(x1, &[1.5, -0.5], 1e-6).unwrap());
}

#[test]
fn lifted_layout_stacks_states() {
    let sys = two_equilibrium();
    let x0 = HybridZonotope::point(vec![-1.0, 1.0], Form::Canonical);
    let cost = CostSpec::new(SparseMatrix::identity(2), SparseMatrix::zeros(0, 0), SparseMatrix::identity(2), vec![vec![0.0; 2]; 2]).unwrap();
    let pr = build_problem(&sys, &x0, &[None, None], &cost, UnionKind::Sharp).unwrap();
    assert_eq!(pr.layout.dim(), 6);
    let x1 = step(&sys, &[-1.0, 1.0]);
    let x2 = step(&sys, &x1);
    let traj = [vec![-1.0, 1.0], x1, x2].concat();
    assert!(contains_point(&pr.z, &traj, 1e-9).unwrap());
    let (xs, us) = pr.layout.split(&traj);
    assert_eq!(xs.len(), 3);
    assert!(us.iter().all(Vec::is_empty));
}
