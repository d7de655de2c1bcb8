mod common;

use common::{dense_random, form_of, random_hz, uniform};
use hzplan::kernel::RngStream;
use hzplan::sets::{
    affine_map, cartesian_product, contains_point, convert_form, convex_relaxation, generalized_intersection, interval_hull,
    minkowski_sum, Form, HybridZonotope,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn small(rng: &mut RngStream, n: usize, form: Form) -> (HybridZonotope<f64>, Vec<f64>) {
    let n_gc = 1 + rng.below(4);
    let n_gb = rng.below(3);
    let n_c = rng.below(n_gc.min(3));
    let (z, xi) = random_hz(rng, n, n_gc, n_gb, n_c, form);
    let x = z.point_at(&xi);
    (z, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn affine_image_keeps_members(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let form = form_of(&mut rng);
        let (z, x) = small(&mut rng, 3, form);
        let m = 1 + rng.below(3);
        let r = dense_random(&mut rng, m, 3);
        let s: Vec<f64> = (0..m).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
        let y: Vec<f64> = r.mul_vec(&x).iter().zip(&s).map(|(a, b)| a + b).collect();
        prop_assert!(contains_point(&affine_map(&r, &z, &s).unwrap(), &y, TOL).unwrap());
    }

    #[test]
    fn sum_and_product_keep_members(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let form = form_of(&mut rng);
        let (z1, x1) = small(&mut rng, 2, form);
        let (z2, x2) = small(&mut rng, 2, form);
        let sum: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a + b).collect();
        prop_assert!(contains_point(&minkowski_sum(&z1, &z2).unwrap(), &sum, TOL).unwrap());
        let prod = [x1.clone(), x2.clone()].concat();
        prop_assert!(contains_point(&cartesian_product(&z1, &z2).unwrap(), &prod, TOL).unwrap());
    }

    #[test]
    fn intersection_keeps_common_members(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let form = form_of(&mut rng);
        let (z1, x1) = small(&mut rng, 3, form);
        let (z2, x2) = small(&mut rng, 2, form);
        let r = dense_random(&mut rng, 2, 3);
        // shift Z2 so that R x1 is one of its members
        let shift: Vec<f64> = r.mul_vec(&x1).iter().zip(&x2).map(|(a, b)| a - b).collect();
        let z2 = minkowski_sum(&z2, &HybridZonotope::point(shift, form)).unwrap();
        let meet = generalized_intersection(&z1, &z2, &r).unwrap();
        prop_assert!(contains_point(&meet, &x1, TOL).unwrap());
    }

    #[test]
    fn relaxation_and_conversion_keep_members(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let form = form_of(&mut rng);
        let (z, x) = small(&mut rng, 3, form);
        prop_assert!(contains_point(&convex_relaxation(&z), &x, TOL).unwrap());
        let other = if form == Form::Canonical { Form::ZeroOne } else { Form::Canonical };
        let conv = convert_form(&z, other);
        prop_assert_eq!(conv.form(), other);
        prop_assert!(contains_point(&conv, &x, TOL).unwrap());
        prop_assert_eq!(convert_form(&conv, form).form(), form);
    }

    #[test]
    fn interval_hull_bounds_members(seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let form = form_of(&mut rng);
        let (z, x) = small(&mut rng, 3, form);
        let (lo, hi) = interval_hull(&z);
        for i in 0..3 {
            prop_assert!(lo[i] - TOL <= x[i] && x[i] <= hi[i] + TOL);
        }
    }
}

#[test]
fn intersection_excludes_points_outside_either_set() {
    let form = Form::Canonical;
    let a = HybridZonotope::from_box(&[0.0, 0.0], &[2.0, 2.0], form).unwrap();
    let b = HybridZonotope::from_box(&[1.0, 1.0], &[3.0, 3.0], form).unwrap();
    let eye = hzplan::kernel::SparseMatrix::identity(2);
    let meet = generalized_intersection(&a, &b, &eye).unwrap();
    assert!(contains_point(&meet, &[1.5, 1.5], TOL).unwrap());
    assert!(!contains_point(&meet, &[0.5, 1.5], 1e-6).unwrap());
    assert!(!contains_point(&meet, &[2.5, 2.5], 1e-6).unwrap());
}

#[test]
fn conversion_preserves_non_membership() {
    let z = HybridZonotope::from_box(&[-1.0], &[1.0], Form::ZeroOne).unwrap();
    let c = convert_form(&z, Form::Canonical);
    assert!(contains_point(&c, &[1.0], TOL).unwrap());
    assert!(!contains_point(&c, &[1.1], 1e-6).unwrap());
}
