mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use pseudospectra::features::*;
use pseudospectra::linalg::{eigen_decomposition, eigenvalues, RealMatrix};
use pseudospectra::matrix_gen::{random_banded, GenSpec};
use pseudospectra::seed;
use rand_distr::{Distribution, StandardNormal};

fn pop_stats(v: &[f64]) -> (f64, f64) {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64;
    (m, var.sqrt())
}

fn lg(x: f64) -> f64 {
    if x.is_nan() {
        16.0
    } else {
        x.log10().min(16.0)
    }
}

/// Each table formula evaluated directly. Eigenpairs come from the library;
/// singular values and linear solves use the reference routines.
fn reference_features(a: &RealMatrix, probe_base: u64) -> [f64; 30] {
    let n = a.n();
    let entries: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a.get(i, j)).collect();
    let fro = entries.iter().map(|v| v * v).sum::<f64>().sqrt();
    let den = fro + 1e-12;
    let (lam, vecs) = eigen_decomposition(a).unwrap();
    let sv = jacobi_singular_values(real_columns(a));
    let (s1, sn) = (sv[0], sv[n - 1]);

    let re: Vec<f64> = lam.iter().map(|l| l.re).collect();
    let im: Vec<f64> = lam.iter().map(|l| l.im).collect();
    let ab: Vec<f64> = lam.iter().map(|l| l.norm()).collect();
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut f = [0.0; 30];
    let (m, s) = pop_stats(&re);
    f[0] = m;
    f[1] = s;
    f[2] = min(&re);
    f[3] = max(&re);
    let (m, s) = pop_stats(&im);
    f[4] = m;
    f[5] = s;
    f[6] = min(&im);
    f[7] = max(&im);
    f[8] = max(&ab);
    f[9] = min(&ab);

    let mut skew = 0.0;
    for i in 0..n {
        for j in 0..n {
            skew += (a.get(i, j) - a.get(j, i)).powi(2);
        }
    }
    let skew = skew.sqrt();
    f[10] = skew / den;
    f[11] = skew / den;
    f[12] = lg(s1 / sn + 1e-12);
    f[13] = s1 / den;
    f[14] = (0..n).map(|j| (0..n).map(|i| a.get(i, j).abs()).sum::<f64>()).fold(0.0, f64::max) / den;
    f[15] = (0..n).map(|i| (0..n).map(|j| a.get(i, j).abs()).sum::<f64>()).fold(0.0, f64::max) / den;
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).abs()).collect();
    let (m, s) = pop_stats(&diag);
    f[16] = m;
    f[17] = s;
    let off: Vec<f64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| if i == j { 0.0 } else { a.get(i, j).abs() }).collect();
    let (m, s) = pop_stats(&off);
    f[18] = m;
    f[19] = s;
    f[20] = entries.iter().filter(|v| v.abs() > 1e-10).count() as f64 / (n * n) as f64;
    let sq: Vec<f64> = entries.iter().map(|v| (v / den).powi(2)).collect();
    let (m, s) = pop_stats(&sq);
    f[21] = m;
    f[22] = s;

    let vcols: CMat = (0..n)
        .map(|j| {
            let col: Vec<Complex64> = (0..n).map(|i| vecs[(i, j)]).collect();
            let norm = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            col.into_iter().map(|v| v / norm).collect()
        })
        .collect();
    let vsv = jacobi_singular_values(vcols);
    f[23] = lg(vsv[0] / vsv[n - 1] + 1e-12);
    f[24] = (skew / den + 1e-12).log10();
    f[25] = (s1 - sn) / (s1 + 1e-12);
    f[26] = (max(&ab) - min(&ab)) / (max(&ab) + 1e-12);

    let center: Complex64 = lam.iter().sum::<Complex64>() / n as f64;
    for (k, d) in [0.5, 1.0, 2.0].iter().enumerate() {
        let mut rng = seed::rng(probe_seed(probe_base, k));
        let b: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let z = center + d;
        let m: Vec<Vec<Complex64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { z - a.get(i, j) } else { Complex64::new(-a.get(i, j), 0.0) }).collect())
            .collect();
        let x = solve(m, b.iter().map(|v| Complex64::new(*v, 0.0)).collect());
        let xn = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let bn = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        f[27 + k] = lg(xn / bn);
    }
    f
}

#[test]
fn banded_64_matches_reference_formulas() {
    for s in [1u64, 2, 3] {
        let g = random_banded(&GenSpec { seed: s, ..GenSpec::default() }).unwrap();
        let got = global_features(&g.matrix, 99).unwrap();
        let want = reference_features(&g.matrix, 99);
        for k in 0..30 {
            assert!(got.values[k].is_finite(), "f{} not finite", k + 1);
            // log10 kappa(V) itself carries relative rounding of order eps * kappa(V).
            let tol = if k == 23 { 1e-8 + 1e-16 * 10f64.powf(want[23]) } else { 1e-8 };
            assert!((got.values[k] - want[k]).abs() < tol, "f{}: {} vs {}", k + 1, got.values[k], want[k]);
        }
    }
}

#[test]
fn identity_examples() {
    let f = global_features(&RealMatrix::identity(4).unwrap(), 0).unwrap().values;
    assert!((f[0] - 1.0).abs() < 1e-12);
    for k in [1, 4, 5, 6, 7, 10, 11, 25, 26] {
        assert!(f[k].abs() < 1e-12, "f{} = {}", k + 1, f[k]);
    }
    assert!((f[8] - 1.0).abs() < 1e-12 && (f[9] - 1.0).abs() < 1e-12);
    assert_eq!(f[20], 0.25);
    assert!((f[12] - (1.0f64 + 1e-12).log10()).abs() < 1e-15);
}

#[test]
fn diag_one_two_examples() {
    let f = global_features(&RealMatrix::diagonal(&[1.0, 2.0]).unwrap(), 0).unwrap().values;
    assert!((f[8] - 2.0).abs() < 1e-12 && (f[9] - 1.0).abs() < 1e-12);
    assert!((f[26] - 1.0 / (2.0 + 1e-12)).abs() < 1e-12);
    assert!((f[25] - 1.0 / (2.0 + 1e-12)).abs() < 1e-12);
}

#[test]
fn symmetric_matrices_have_zero_skew_features() {
    let f = global_features(&random_symmetric(10, 4), 0).unwrap().values;
    assert_eq!((f[10], f[11]), (0.0, 0.0));
    assert_eq!(f[24], (1e-12f64).log10());
}

#[test]
fn resolvent_probe_examples() {
    let zero = RealMatrix::zeros(2).unwrap();
    assert!((resolvent_probe(&zero, 2.0, 5).unwrap() - 0.5f64.log10()).abs() < 1e-12);
    let id = RealMatrix::identity(3).unwrap();
    assert!(resolvent_probe(&id, 1.0, 5).unwrap().abs() < 1e-12);
}

#[test]
fn resolvent_probe_matches_direct_solve() {
    let g = random_banded(&GenSpec { n: 16, seed: 8, ..GenSpec::default() }).unwrap();
    let a = &g.matrix;
    let got = resolvent_probe(a, 0.5, 1234).unwrap();
    let lam = eigenvalues(a).unwrap();
    let z = lam.iter().sum::<Complex64>() / 16.0 + 0.5;
    let mut rng = seed::rng(1234);
    let b: Vec<f64> = (0..16).map(|_| StandardNormal.sample(&mut rng)).collect();
    let m = (0..16).map(|i| (0..16).map(|j| if i == j { z - a.get(i, j) } else { Complex64::new(-a.get(i, j), 0.0) }).collect()).collect();
    let x = solve(m, b.iter().map(|v| Complex64::new(*v, 0.0)).collect());
    let ratio = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() / b.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((got - ratio.log10()).abs() < 1e-8);
}

#[test]
fn point_feature_examples() {
    let zero = [Complex64::new(0.0, 0.0)];
    assert_eq!(point_features(Complex64::new(3.0, 4.0), &zero), [5.0, 5.0, 5.0]);
    let pair = [Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)];
    assert_eq!(point_features(Complex64::new(0.0, 0.0), &pair), [1.0, 0.0, 1.0]);
}

#[test]
fn point_features_match_enumeration() {
    let a = random_band(8, 2, 17);
    let lam = eigenvalues(&a).unwrap();
    let center = lam.iter().sum::<Complex64>() / 8.0;
    for k in 0..25 {
        let z = Complex64::new(-2.0 + 0.17 * k as f64, 1.5 - 0.11 * k as f64);
        let d: Vec<f64> = lam.iter().map(|l| (z - l).norm()).collect();
        let g = point_features(z, &lam);
        assert!((g[0] - d.iter().cloned().fold(f64::INFINITY, f64::min)).abs() < 1e-12);
        assert!((g[1] - (z - center).norm()).abs() < 1e-12);
        assert!((g[2] - d.iter().sum::<f64>() / 8.0).abs() < 1e-12);
        assert!(g[0] <= g[2]);
    }
}

#[test]
fn assembled_vector_is_global_then_point() {
    let a = random_band(12, 3, 2);
    let gf = global_features(&a, 7).unwrap();
    let z1 = Complex64::new(0.5, -0.25);
    let z2 = Complex64::new(-1.0, 2.0);
    let (v1, v2) = (gf.assemble(z1), gf.assemble(z2));
    assert_eq!(v1.as_slice().len(), 33);
    for k in 0..30 {
        assert_eq!(v1.0[k].to_bits(), v2.0[k].to_bits());
        assert_eq!(v1.0[k].to_bits(), gf.values[k].to_bits());
    }
    assert_eq!(&v1.0[30..], &point_features(z1, &eigenvalues(&a).unwrap()));
}

#[test]
fn features_are_deterministic() {
    let a = random_band(16, 2, 9);
    let x = global_features(&a, 3).unwrap().values;
    let y = global_features(&a, 3).unwrap().values;
    assert_eq!(x.map(f64::to_bits), y.map(f64::to_bits));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scale_behaviour(seed in 0u64..500, c in 0.1..10.0f64) {
        let a = random_band(10, 2, seed);
        prop_assume!(a.frobenius_norm() > 0.0);
        let f = global_features(&a, 1).unwrap().values;
        let g = global_features(&a.scaled(c), 1).unwrap().values;
        for k in [10, 11, 13, 14, 15, 21, 22] {
            prop_assert!((f[k] - g[k]).abs() < 1e-9, "f{}: {} vs {}", k + 1, f[k], g[k]);
        }
        prop_assert_eq!(f[20], g[20]);
        // rounding in the spectrum and in sigma_min grows with the conditioning
        let tol = 1e-9 + 1e-13 * 10f64.powf(f[12].max(f[23]));
        let spread = 1e-13 * c * a.frobenius_norm() * 10f64.powf(f[23]);
        for k in [12, 25, 26] {
            prop_assert!((f[k] - g[k]).abs() < tol * f[k].abs().max(1.0), "f{}: {} vs {}", k + 1, f[k], g[k]);
        }
        for k in [0, 1, 2, 3, 4, 5, 6, 7, 8, 9] {
            prop_assert!((c * f[k] - g[k]).abs() < 1e-8 * (1.0 + c * f[k].abs()) + spread, "f{}: {} vs {}", k + 1, c * f[k], g[k]);
        }
    }
}
