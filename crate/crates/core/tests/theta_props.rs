use std::f64::consts::PI;

use bsq_core::theta::DEFAULT_EPS;
use bsq_core::{
    bpu_matrix, bs_points, theta_series, theta_value, HalfFormNormalization, Level,
    ModularParameter, ThetaCharacteristic,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn lvl(k: u32) -> Level {
    Level::new(k).unwrap()
}

fn taus() -> [ModularParameter; 2] {
    [
        ModularParameter::default(),
        ModularParameter::new(Complex64::new(0.3, 1.1)).unwrap(),
    ]
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn quasi_periodicity_on_random_samples() {
    let mut rng = StdRng::seed_from_u64(0x7e7a);
    let i = Complex64::new(0.0, 1.0);
    for tau in taus() {
        let t = tau.get();
        for _ in 0..100 {
            let k = rng.gen_range(1..=6u32);
            let ch = ThetaCharacteristic::new(lvl(k), rng.gen_range(0..k)).unwrap();
            let z = Complex64::new(rng.gen_range(0.0..1.0), rng.gen_range(-0.5..0.5) * t.im);
            let kf = f64::from(k);
            let base = theta_value(ch, z, tau, DEFAULT_EPS).unwrap();

            let shifted = theta_value(ch, z + 1.0, tau, DEFAULT_EPS).unwrap();
            let factor = (2.0 * PI * i * kf * ch.w()).exp();
            assert!(
                rel(shifted, factor * base) < 10.0 * DEFAULT_EPS,
                "z+1 k={k} z={z}"
            );

            let shifted = theta_value(ch, z + t, tau, DEFAULT_EPS).unwrap();
            let factor = (-PI * i * kf * t - 2.0 * PI * i * kf * z).exp();
            assert!(
                rel(shifted, factor * base) < 10.0 * DEFAULT_EPS,
                "z+tau k={k} z={z}"
            );
        }
    }
}

#[test]
fn quasi_periodicity_at_the_documented_point() {
    let ch = ThetaCharacteristic::new(lvl(3), 1).unwrap();
    let z = Complex64::new(0.17, 0.05);
    let tau = ModularParameter::default();
    let i = Complex64::new(0.0, 1.0);
    let base = theta_value(ch, z, tau, DEFAULT_EPS).unwrap();
    let plus_one = theta_value(ch, z + 1.0, tau, DEFAULT_EPS).unwrap();
    assert!(rel(plus_one, (2.0 * PI * i * 3.0 / 3.0).exp() * base) < 10.0 * DEFAULT_EPS);
    let plus_tau = theta_value(ch, z + i, tau, DEFAULT_EPS).unwrap();
    let factor = (-PI * i * 3.0 * i - 2.0 * PI * i * 3.0 * z).exp();
    assert!(rel(plus_tau, factor * base) < 10.0 * DEFAULT_EPS);
}

/// At tau = i the matrix factors as diag(A) * DFT with
/// A_r = sum_n exp(-pi (kn + r)^2 / k), so its singular values are sqrt(k) A_r.
fn oracle_singular_values(k: u32) -> Vec<f64> {
    let kf = f64::from(k);
    let mut sv: Vec<f64> = (0..k)
        .map(|r| {
            let a: f64 = (-40i64..=40)
                .map(|n| {
                    let x = kf * n as f64 + f64::from(r);
                    (-PI * x * x / kf).exp()
                })
                .sum();
            kf.sqrt() * a
        })
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[test]
fn bpu_matrix_is_full_rank_and_matches_oracle() {
    for k in 1..=12 {
        let m = bpu_matrix(
            lvl(k),
            ModularParameter::default(),
            DEFAULT_EPS,
            HalfFormNormalization::default(),
        )
        .unwrap();
        let sv = m.singular_values();
        let oracle = oracle_singular_values(k);
        for (s, o) in sv.iter().zip(&oracle) {
            assert!((s - o).abs() < 1e-12 * o.max(1.0), "k={k}: {s} vs {o}");
        }
        assert!(m.smallest_singular_value() > 1e3 * DEFAULT_EPS, "k={k}");
        assert_eq!(m.rank(1e3 * DEFAULT_EPS), k as usize);
    }
}

#[test]
fn two_by_two_determinant() {
    let m = bpu_matrix(
        lvl(2),
        ModularParameter::default(),
        DEFAULT_EPS,
        HalfFormNormalization::default(),
    )
    .unwrap();
    assert!(m.determinant().norm() > 1e3 * DEFAULT_EPS);
    assert_eq!(m.rank(1e3 * DEFAULT_EPS), 2);
}

#[test]
fn normalization_scales_determinant_only() {
    for tau in taus() {
        for k in 1..=5 {
            let lambda = 2.5;
            let one =
                bpu_matrix(lvl(k), tau, DEFAULT_EPS, HalfFormNormalization::default()).unwrap();
            let scaled = bpu_matrix(
                lvl(k),
                tau,
                DEFAULT_EPS,
                HalfFormNormalization::new(lambda).unwrap(),
            )
            .unwrap();
            let ratio = scaled.determinant().norm() / one.determinant().norm();
            assert!((ratio / lambda.powi(k as i32) - 1.0).abs() < 1e-10, "k={k}");
            assert_eq!(scaled.rank(1e-9), one.rank(1e-9));
            for j in 0..k as usize {
                for (a, b) in one
                    .projective_column(j)
                    .iter()
                    .zip(scaled.projective_column(j))
                {
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn halving_eps_stays_within_the_claimed_bound() {
    for tau in taus() {
        for k in 1..=8 {
            let coarse =
                bpu_matrix(lvl(k), tau, DEFAULT_EPS, HalfFormNormalization::default()).unwrap();
            let fine = bpu_matrix(
                lvl(k),
                tau,
                DEFAULT_EPS / 2.0,
                HalfFormNormalization::default(),
            )
            .unwrap();
            for (idx, (a, b)) in coarse.entries.iter().zip(fine.entries.iter()).enumerate() {
                assert!(
                    (a - b).norm() <= coarse.truncation_bounds[idx],
                    "k={k} entry {idx}"
                );
            }
        }
    }
}

#[test]
fn truncation_bound_is_honest_against_a_wide_window() {
    // a loose eps keeps the window small; compare with a much tighter one
    let tau = ModularParameter::new(Complex64::new(0.3, 1.1)).unwrap();
    for k in 1..=4 {
        for r in 0..k {
            let ch = ThetaCharacteristic::new(lvl(k), r).unwrap();
            let z = Complex64::new(0.21, 0.1);
            let loose = theta_series(ch, z, tau, 1e-4).unwrap();
            let tight = theta_series(ch, z, tau, 1e-15).unwrap();
            assert!(loose.window <= tight.window);
            assert!((loose.value - tight.value).norm() <= loose.truncation_bound + 1e-15);
        }
    }
}

#[test]
fn bs_points_are_closed_under_order_k_translation() {
    for k in 1..=12 {
        let pts: Vec<u32> = bs_points(lvl(k)).iter().map(|p| p.numerator).collect();
        let mut moved: Vec<u32> = pts.iter().map(|j| (j + 1) % k).collect();
        moved.sort_unstable();
        assert_eq!(moved, pts);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }
}
