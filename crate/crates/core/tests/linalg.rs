mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use pseudospectra::linalg::*;
use pseudospectra::Exec;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn jacobi_reference_agrees_on_a_diagonal() {
    let a = RealMatrix::diagonal(&[3.0, -1.0, 0.5]).unwrap();
    let sv = jacobi_singular_values(real_columns(&a));
    assert_eq!(sv, vec![3.0, 1.0, 0.5]);
}

#[test]
fn smin_matches_reference_on_banded_8x8() {
    let a = random_band(8, 2, 11);
    let z = c(0.3, 0.7);
    let got = smin_at(&a, z).unwrap();
    let want = oracle_smin(&a, z);
    assert!((got - want).abs() <= 1e-10 * frobenius(&shifted_columns(&a, z)).max(1.0), "{got} vs {want}");
}

#[test]
fn eigenvalue_sum_is_trace() {
    for seed in 0..5 {
        let a = random_band(8, 3, seed);
        let trace: f64 = (0..8).map(|i| a.get(i, i)).sum();
        let sum: Complex64 = eigenvalues(&a).unwrap().iter().sum();
        assert!((sum.re - trace).abs() < 1e-8 && sum.im.abs() < 1e-8, "{sum} vs {trace}");
    }
}

#[test]
fn real_matrices_have_conjugate_pairs() {
    let a = random_band(12, 3, 5);
    let ev = eigenvalues(&a).unwrap();
    for l in &ev {
        assert!(ev.iter().any(|m| (m - l.conj()).norm() < 1e-9));
    }
}

#[test]
fn full_field_of_identity_is_distance_to_one() {
    let a = RealMatrix::identity(2).unwrap();
    let grid = make_grid(0.0, 2.0, -1.0, 1.0, 3, 3).unwrap();
    let f = full_pseudospectrum(&a, &grid, &Exec::serial()).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let z = grid.point(i, j);
            assert!((f.get(i, j).unwrap() - (z - 1.0).norm()).abs() < 1e-14);
        }
    }
}

#[test]
fn full_field_equals_pointwise_loop_for_any_worker_count() {
    let a = random_band(16, 3, 21);
    let grid = make_grid(-3.0, 3.0, -3.0, 3.0, 20, 20).unwrap();
    let serial = full_pseudospectrum(&a, &grid, &Exec::serial()).unwrap();
    let parallel = full_pseudospectrum(&a, &grid, &Exec::with_threads(3)).unwrap();
    for k in 0..grid.len() {
        let direct = smin_at(&a, grid.point_at(k)).unwrap();
        assert_eq!(serial.values()[k].unwrap().to_bits(), direct.to_bits());
        assert_eq!(parallel.values()[k].unwrap().to_bits(), direct.to_bits());
    }
}

#[test]
fn one_point_axis_is_rejected() {
    assert!(make_grid(0.0, 1.0, 0.0, 1.0, 1, 5).is_err());
    assert!(make_grid(1.0, 0.0, 0.0, 1.0, 5, 5).is_err());
}

#[test]
fn identity_sensitive_zone_is_the_near_points() {
    // grid includes z = 1 exactly
    let grid = make_grid(0.0, 2.0, -1.0, 1.0, 41, 21).unwrap();
    let a = RealMatrix::identity(3).unwrap();
    let f = full_pseudospectrum(&a, &grid, &Exec::serial()).unwrap();
    let mask = sensitive_zone(&f, 0.01);
    let expected = BinaryMask::from_fn(21, 41, |i, j| (grid.point(i, j) - 1.0).norm() <= 0.01);
    assert_eq!(mask, expected);
    assert_eq!(mask.count(), 1);
}

#[test]
fn restricted_field_matches_full_field_inside_region() {
    let a = random_band(10, 2, 3);
    let grid = make_grid(-2.0, 2.0, -2.0, 2.0, 12, 12).unwrap();
    let region = BinaryMask::from_fn(12, 12, |i, j| (i * 7 + j * 3) % 5 == 0);
    let full = full_pseudospectrum(&a, &grid, &Exec::serial()).unwrap();
    let part = restricted_pseudospectrum(&a, &grid, &region, &Exec::serial()).unwrap();
    for k in 0..grid.len() {
        match part.values()[k] {
            Some(v) => assert_eq!(v.to_bits(), full.values()[k].unwrap().to_bits()),
            None => assert!(!region.bits()[k]),
        }
    }
    assert_eq!(part.evaluated_count(), region.count());
}

#[test]
fn dilation_examples() {
    let mut m = BinaryMask::empty(5, 5);
    m.set(2, 2, true);
    let d = dilate(&m, 3).unwrap();
    assert_eq!(d, BinaryMask::from_fn(5, 5, |i, j| (1..=3).contains(&i) && (1..=3).contains(&j)));

    assert_eq!(dilate(&BinaryMask::empty(5, 5), 3).unwrap().count(), 0);

    let mut corner = BinaryMask::empty(7, 7);
    corner.set(0, 0, true);
    let d = dilate(&corner, 5).unwrap();
    assert_eq!(d, BinaryMask::from_fn(7, 7, |i, j| i <= 2 && j <= 2));

    assert!(dilate(&m, 4).is_err());
}

fn mask_strategy() -> impl Strategy<Value = BinaryMask> {
    prop::collection::vec(prop::bool::weighted(0.1), 8 * 9).prop_map(|bits| BinaryMask::new(8, 9, bits).unwrap())
}

/// Dilation by scanning every square, written independently of the library.
fn dilate_by_scan(m: &BinaryMask, k: usize) -> BinaryMask {
    let r = (k / 2) as isize;
    BinaryMask::from_fn(m.ny(), m.nx(), |i, j| {
        (-r..=r).any(|di| {
            (-r..=r).any(|dj| {
                let (y, x) = (i as isize + di, j as isize + dj);
                y >= 0 && x >= 0 && (y as usize) < m.ny() && (x as usize) < m.nx() && m.get(y as usize, x as usize)
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilation_is_extensive_monotone_and_matches_scan(a in mask_strategy(), b in mask_strategy(), k in prop::sample::select(vec![1usize, 3, 5, 7])) {
        let da = dilate(&a, k).unwrap();
        prop_assert!(a.is_subset_of(&da));
        prop_assert_eq!(&da, &dilate_by_scan(&a, k));
        let union = BinaryMask::from_fn(8, 9, |i, j| a.get(i, j) || b.get(i, j));
        prop_assert!(da.is_subset_of(&dilate(&union, k).unwrap()));
    }

    #[test]
    fn sensitive_zone_grows_with_eps(values in prop::collection::vec(prop::option::weighted(0.9, 0.0..0.05f64), 16), e1 in 0.001..0.05f64, e2 in 0.001..0.05f64) {
        let grid = make_grid(0.0, 1.0, 0.0, 1.0, 4, 4).unwrap();
        let f = SigmaField::new(grid, values.clone()).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(sensitive_zone(&f, lo).is_subset_of(&sensitive_zone(&f, hi)));
        for (k, v) in values.iter().enumerate() {
            prop_assert_eq!(sensitive_zone(&f, hi).bits()[k], matches!(v, Some(x) if *x <= hi));
        }
    }

    #[test]
    fn shift_covariance(seed in 0u64..1000, shift in -2.0..2.0f64, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let a = random_band(8, 2, seed);
        let z = c(re, im);
        let base = smin_at(&a, z).unwrap();
        let moved = smin_at(&a.add_identity(shift), z + shift).unwrap();
        prop_assert!((base - moved).abs() < 1e-10, "{} vs {}", base, moved);
    }

    #[test]
    fn symmetric_smin_is_distance_to_spectrum(seed in 0u64..1000, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let a = random_symmetric(6, seed);
        let z = c(re, im);
        let d = eigenvalues(&a).unwrap().iter().map(|l| (z - l).norm()).fold(f64::INFINITY, f64::min);
        prop_assert!((smin_at(&a, z).unwrap() - d).abs() < 1e-8);
    }

    #[test]
    fn band_matrices_match_the_jacobi_reference(seed in 0u64..10_000, n in 2usize..12, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let a = random_band(n, 1 + (seed as usize % 3).min(n - 1), seed);
        let z = c(re, im);
        let want = oracle_smin(&a, z);
        let tol = 1e-10 * frobenius(&shifted_columns(&a, z)).max(1.0);
        prop_assert!((smin_at(&a, z).unwrap() - want).abs() <= tol);
    }
}
