use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};
use statrs::function::beta::beta_reg;

use tlv_core::analytics::special::chi_square_sf;
use tlv_core::analytics::*;

const PS: [f64; 5] = [0.01, 0.05, 0.1, 0.3, 0.5];

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[test]
fn flip_prob_matches_repeated_convolution() {
    for p0 in [0.0, 0.02, 0.1, 0.37, 0.5] {
        let mut p = 0.0;
        for t in 0..60 {
            assert!((flip_prob(p0, t) - p).abs() < 1e-14, "p0={p0} t={t}");
            p = p * (1.0 - p0) + (1.0 - p) * p0;
        }
    }
}

#[test]
fn both_failure_routes_agree_in_log_space() {
    for len in (3..=1001u64).step_by(2) {
        for p in PS {
            let a = ln_logical_fail_prob_with(len, p, FailMethod::DirectSum).unwrap();
            let b = ln_logical_fail_prob_with(len, p, FailMethod::IncompleteBeta).unwrap();
            // Equal logs to 1e-10 absolute means equal values to 1e-10 relative.
            assert!((a - b).abs() < 1e-10, "L={len} p={p}: {a} vs {b}");
        }
    }
}

#[test]
fn failure_matches_independent_binomial_tail() {
    for len in [3u64, 11, 51, 101, 201] {
        for p in [0.05, 0.1, 0.3, 0.45] {
            let tail = Binomial::new(p, len).unwrap().sf(len / 2);
            assert!(
                rel(logical_fail_prob(len, p).unwrap(), tail) < 1e-9,
                "L={len} p={p}"
            );
        }
    }
}

#[test]
fn even_length_counts_half_the_ties() {
    for len in [2u64, 4, 10, 50] {
        for p in [0.1, 0.3] {
            let b = Binomial::new(p, len).unwrap();
            use statrs::distribution::Discrete;
            let expect = b.sf(len / 2) + 0.5 * b.pmf(len / 2);
            for m in [FailMethod::DirectSum, FailMethod::IncompleteBeta] {
                assert!(rel(logical_fail_prob_with(len, p, m).unwrap(), expect) < 1e-9);
            }
        }
    }
}

#[test]
fn incomplete_beta_matches_reference() {
    for (x, a, b) in [
        (0.3, 2.0, 2.0),
        (0.1, 5.5, 3.0),
        (0.7, 10.0, 20.0),
        (0.49, 300.0, 300.0),
        (0.9, 1.5, 0.5),
    ] {
        assert!(
            rel(reg_incomplete_beta(x, a, b), beta_reg(a, b, x)) < 1e-10,
            "x={x} a={a} b={b}"
        );
    }
}

#[test]
fn chi_square_tail_matches_reference() {
    for dof in [1.0, 3.0, 10.0, 40.0] {
        let d = ChiSquared::new(dof).unwrap();
        for x in [0.5, 2.0, 10.0, 35.0, 80.0] {
            assert!(
                (chi_square_sf(x, dof) - d.sf(x)).abs() < 1e-10,
                "dof={dof} x={x}"
            );
        }
    }
}

#[test]
fn mixing_limit() {
    let p = logical_fail_prob(1001, flip_prob(0.05, 1001)).unwrap();
    assert!((0.48..=0.5).contains(&p));
    for p0 in [0.05, 0.1, 0.3, 0.5] {
        let p = logical_fail_prob(1001, flip_prob(p0, 1001)).unwrap();
        assert!((p - 0.5).abs() <= 0.02);
    }
}

#[test]
fn closed_form_upper_bound_dominates() {
    for len in (1..=1001u64).step_by(2) {
        for p in [0.001, 0.01, 0.1, 0.3, 0.5] {
            let exact = logical_fail_prob(len, p).unwrap();
            let bound = logical_fail_upper_bound(len, p).unwrap();
            assert!(
                exact <= bound * (1.0 + 1e-12),
                "L={len} p={p}: {exact} > {bound}"
            );
        }
    }
}

#[test]
fn decay_time_scales_as_inverse_twice_failure() {
    // T = 1 / ln(1/(1-2P)) tends to 1/(2P) as P -> 0.
    for len in [21u64, 51, 101] {
        let p = logical_fail_prob(len, 0.05).unwrap();
        let t = decay_time(len, 0.05).unwrap();
        assert!((t * 2.0 * p - 1.0).abs() < 2.0 * p + 1e-9);
    }
    for len in [5u64, 25, 75] {
        for p0 in [0.05, 0.2] {
            let b = logical_fail_upper_bound(len, p0).unwrap();
            if b < 0.5 {
                assert!(decay_time(len, p0).unwrap() >= (1.0 - 2.0 * b) / (2.0 * b));
            }
        }
    }
}

#[test]
fn survival_decreases_to_half() {
    let mut prev = 1.0;
    for t in 0..200 {
        let s = stabilized_survival(7, 0.2, t).unwrap();
        assert!(s <= prev && s >= 0.5);
        prev = s;
    }
}

#[test]
fn lightcone_monotonicity() {
    for p0 in [0.05, 0.3, 0.5] {
        for d in [0u64, 1, 5, 20] {
            let mut prev = 1.0;
            for len in [1u64, 10, 100, 1000] {
                let v = lightcone_bound(len, d, p0).unwrap();
                assert!(v > 0.0 && v <= prev);
                prev = v;
                assert!(lightcone_bound(len, d + 1, p0).unwrap() >= v);
            }
        }
    }
}

#[test]
fn log_depth_regime_threshold() {
    // Finite-L bound with 2D+1 = kappa ln L on both sides of the critical rate.
    let kappa = 1.0;
    let pc = log_depth_critical_rate(kappa);
    assert!((pc - 1.0 / (1.0 + std::f64::consts::E)).abs() < 1e-15);
    let at = |p0: f64, len: u64| {
        let d = ((kappa * (len as f64).ln() - 1.0) / 2.0).round() as u64;
        lightcone_bound(len, d, p0).unwrap()
    };
    assert!(at(0.2, 1 << 40) > at(0.2, 1 << 20) * 0.99);
    assert!(at(0.35, 1 << 40) < 1e-3);
}

#[test]
fn sparse_bounds_behave() {
    let tlv = sparse_params(4, 1, 1e-12).unwrap();
    let b0 = survival_bound_finite(1000, 0, &tlv);
    assert_eq!(b0.clamped, 1.0);
    assert_eq!(b0.raw, 1000.0);
    let len = 1_000_000u64;
    let sat = len / 8;
    assert_eq!(
        survival_bound_finite(len, sat, &tlv),
        survival_bound_finite(len, sat + 1000, &tlv)
    );
    let mut prev = f64::INFINITY;
    for t in [1u64, 10, 100, 1000, 10_000] {
        let b = survival_bound_finite(len, t, &tlv).raw;
        assert!(b <= prev);
        prev = b;
    }
    let b = survival_bound_finite(len, 1000, &tlv);
    assert!(b.raw < 1.0);
    assert!(survival_bound_finite(4 * len, 2000, &tlv).raw < b.raw);

    // At the threshold the exponent vanishes.
    let crit = sparse_params(4, 1, 1.0 / 313_600.0).unwrap();
    assert!(crit.gamma.abs() < 1e-12);
    let d = decode_failure_bound(1e4, 0.5, &crit).unwrap();
    assert!((d.raw - 17.0 * 1e4).abs() < 1e-6);
    assert_eq!(d.clamped, 1.0);
}

#[test]
fn decode_failure_bound_has_decreasing_tail() {
    let p = sparse_params(4, 1, 1e-7).unwrap();
    let grid: Vec<f64> = (6..=36).map(|e| 10f64.powf(e as f64 / 2.0)).collect();
    let vals: Vec<f64> = grid
        .iter()
        .map(|&l| decode_failure_bound(l, 0.5, &p).unwrap().raw)
        .collect();
    let start = strictly_decreasing_tail(&vals).unwrap();
    assert!(start < vals.len() - 2);
    for (&l, &v) in grid.iter().zip(&vals) {
        let t = l.powf(0.5).floor() as u64;
        if l < 1e15 {
            assert!(v >= survival_bound_finite(l as u64, t, &p).raw * (1.0 - 1e-12));
        }
    }
}

fn mirrored_window(rng: &mut ChaCha8Rng, half: i64, p0: f64) -> Vec<i64> {
    let mut x = Vec::new();
    for i in 1..=half {
        if rng.random_bool(p0) {
            x.push(i);
            x.push(1 - i);
        }
    }
    x.sort_unstable();
    x
}

#[test]
fn decomposition_is_independent_and_complete() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for p0 in [0.01, 0.1, 0.3] {
        for _ in 0..3_400 {
            let x = mirrored_window(&mut rng, 40, p0);
            let f = sparse_decompose(&x, 8).unwrap();
            f.check_independence().unwrap();
            f.check_completeness(&x).unwrap();
            let covered: usize = f.clusters.iter().map(|c| c.sites.len()).sum();
            assert_eq!(covered, x.len());
            for c in &f.clusters {
                assert_eq!(c.diameter().max(1), c.level);
            }
        }
    }
}

#[test]
fn uncovered_fraction_is_non_increasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..500 {
        let x = mirrored_window(&mut rng, 64, 0.1);
        let f = sparse_decompose(&x, 8).unwrap();
        let mut prev = x.len();
        for l in 1..=f.max_level() {
            let n = f.uncovered_at(&x, l).len();
            assert!(n <= prev);
            prev = n;
        }
        assert_eq!(prev, 0);
    }
}

proptest! {
    #[test]
    fn decomposition_invariants_on_arbitrary_sets(mut sites in proptest::collection::vec(-60i64..60, 0..25), k in 1u64..10) {
        sites.sort_unstable();
        sites.dedup();
        let f = sparse_decompose(&sites, k).unwrap();
        prop_assert!(f.check_independence().is_ok());
        prop_assert!(f.check_completeness(&sites).is_ok());
    }

    #[test]
    fn failure_probability_monotone_in_p(len in 1u64..300, a in 0.0f64..0.5, b in 0.0f64..0.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(logical_fail_prob(len, lo).unwrap() <= logical_fail_prob(len, hi).unwrap() * (1.0 + 1e-12));
    }
}
