mod common;

use common::{dense_random, random_hz, uniform};
use hzplan::kernel::{RngStream, SparseMatrix};
use hzplan::sets::{contains_point, interval_hull, support_convex_relaxation, Form, HybridZonotope};
use hzplan::unions::{lift_witness, union, union_condensed, union_sharp, union_zonotope, UnionKind};
use proptest::prelude::*;

fn pair(rng: &mut RngStream) -> Vec<(HybridZonotope<f64>, Vec<f64>)> {
    let n = 1 + rng.below(3);
    (0..2)
        .map(|_| {
            let n_gc = 1 + rng.below(3);
            let n_gb = rng.below(3);
            let n_c = rng.below(n_gc.min(2));
            random_hz(rng, n, n_gc, n_gb, n_c, Form::ZeroOne)
        })
        .collect()
}

fn random_zonotope(rng: &mut RngStream, n: usize) -> HybridZonotope<f64> {
    let ng = 1 + rng.below(3);
    let c = (0..n).map(|_| uniform(rng, -2.0, 2.0)).collect();
    HybridZonotope::zonotope(dense_random(rng, n, ng), c, Form::ZeroOne).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lifted_witnesses_are_admissible(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let sets = pair(&mut rng);
        let zs: Vec<_> = sets.iter().map(|(z, _)| z.clone()).collect();
        for kind in [UnionKind::Sharp, UnionKind::Condensed] {
            let u = union(&zs, kind).unwrap();
            for (i, (z, xi)) in sets.iter().enumerate() {
                let w = lift_witness(&zs, kind, i, xi).unwrap();
                prop_assert!(u.is_witness(&w, 1e-9));
                let (a, b) = (u.point_at(&w), z.point_at(xi));
                prop_assert!(common::dist_inf(&a, &b) < 1e-9);
            }
        }
    }

    #[test]
    fn membership_matches_constituents(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let sets = pair(&mut rng);
        let zs: Vec<_> = sets.iter().map(|(z, _)| z.clone()).collect();
        let sharp = union_sharp(&zs).unwrap();
        let cond = union_condensed(&zs).unwrap();
        let n = zs[0].dim();
        let mut points: Vec<Vec<f64>> = sets.iter().map(|(z, xi)| z.point_at(xi)).collect();
        for _ in 0..6 {
            points.push((0..n).map(|_| uniform(&mut rng, -3.0, 3.0)).collect());
        }
        for x in &points {
            let want = zs.iter().any(|z| contains_point(z, x, 1e-6).unwrap());
            prop_assert_eq!(contains_point(&sharp, x, 1e-6).unwrap(), want);
            prop_assert_eq!(contains_point(&cond, x, 1e-6).unwrap(), want);
        }
    }

    #[test]
    fn zonotope_union_relaxation_is_hull(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let n = 2;
        let zs: Vec<_> = (0..2 + rng.below(2)).map(|_| random_zonotope(&mut rng, n)).collect();
        let u = union_zonotope(&zs, None).unwrap();
        for _ in 0..8 {
            let d: Vec<f64> = (0..n).map(|_| rng.normal(0.0, 1.0)).collect();
            let got = support_convex_relaxation(&u, &d).unwrap().unwrap();
            let want = zs.iter().map(|z| support_convex_relaxation(z, &d).unwrap().unwrap()).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
    }
}

#[test]
fn two_segments_exclude_the_gap() {
    let a = HybridZonotope::from_box(&[0.0], &[1.0], Form::ZeroOne).unwrap();
    let b = HybridZonotope::from_box(&[2.0], &[3.0], Form::ZeroOne).unwrap();
    for kind in [UnionKind::Sharp, UnionKind::Condensed, UnionKind::Zonotope] {
        let u = union(&[a.clone(), b.clone()], kind).unwrap();
        assert!(contains_point(&u, &[0.5], 1e-9).unwrap(), "{kind:?}");
        assert!(contains_point(&u, &[2.5], 1e-9).unwrap(), "{kind:?}");
        assert!(!contains_point(&u, &[1.5], 1e-9).unwrap(), "{kind:?}");
        let (lo, hi) = interval_hull(&u);
        assert!(lo[0] <= 0.0 && hi[0] >= 3.0);
    }
}

#[test]
fn shared_generators_are_counted_once() {
    let g = SparseMatrix::identity(2);
    let a = HybridZonotope::zonotope(g.clone(), vec![0.0, 0.0], Form::ZeroOne).unwrap();
    let b = HybridZonotope::zonotope(g, vec![3.0, 0.0], Form::ZeroOne).unwrap();
    let u = union_zonotope(&[a, b], None).unwrap();
    assert_eq!(u.n_gb(), 2);
    assert!(contains_point(&u, &[3.5, 0.5], 1e-9).unwrap());
    assert!(!contains_point(&u, &[2.0, 0.5], 1e-9).unwrap());
}

#[test]
fn canonical_inputs_are_rejected() {
    let a = HybridZonotope::from_box(&[0.0], &[1.0], Form::Canonical).unwrap();
    assert!(union_sharp(&[a]).is_err());
    assert!(union_condensed::<f64>(&[]).is_err());
}
