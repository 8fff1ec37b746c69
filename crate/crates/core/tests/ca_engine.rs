use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tlv_core::bits::{BitString, ChainState};
use tlv_core::ca::*;

fn all_states(len: usize) -> impl Iterator<Item = ChainState> {
    (0u64..(1 << len)).map(move |v| ChainState::from_bits(BitString::from_u64(len, v)))
}

fn random_state(rng: &mut ChaCha8Rng, len: usize, p: f64) -> ChainState {
    let bits: Vec<bool> = (0..len).map(|_| rng.random_bool(p)).collect();
    ChainState::from_bools(&bits)
}

fn window(padding: usize) -> BoundaryMode {
    BoundaryMode::OpenWindow {
        padding,
        background: false,
    }
}

#[test]
fn packed_step_matches_per_site_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sets = [
        RuleSet::tlv_mirrored(),
        RuleSet::tlv(BoundaryMode::Periodic),
        RuleSet::tlv(BoundaryMode::OpenWindow {
            padding: 100,
            background: true,
        }),
        RuleSet::gkl(BoundaryMode::Periodic).unwrap(),
        RuleSet::gkl(window(100)).unwrap(),
    ];
    for rules in sets {
        for len in [2, 4, 6, 10, 62, 64, 66, 128, 130, 200] {
            for _ in 0..20 {
                let x = random_state(&mut rng, len, 0.4);
                assert_eq!(
                    step(&x, &rules).unwrap(),
                    step_scalar(&x, &rules).unwrap(),
                    "{rules:?} L={len}"
                );
            }
        }
    }
}

#[test]
fn homogeneous_states_are_fixed() {
    let rules = RuleSet::tlv_mirrored();
    assert!(step(&ChainState::zeros(20), &rules).unwrap().is_zero());
    assert!(step(&ChainState::ones(20), &rules).unwrap().is_all_ones());
    assert!(evolve(&ChainState::zeros(20), &rules, 100)
        .unwrap()
        .is_zero());
    let x = ChainState::from_ones(20, &[3, 4]);
    assert_eq!(evolve(&x, &rules, 0).unwrap(), x);
}

#[test]
fn central_three_cluster_erased_within_three_steps() {
    let rules = RuleSet::tlv_mirrored();
    let x = ChainState::from_ones(20, &[9, 10, 11]);
    assert!(evolve(&x, &rules, 3).unwrap().is_zero());
}

#[test]
fn single_error_on_first_site_gone_after_two_steps() {
    let x = ChainState::from_ones(20, &[0]);
    assert!(evolve(&x, &RuleSet::tlv_mirrored(), 2).unwrap().is_zero());
}

#[test]
fn open_window_rejects_acausal_evolution() {
    let rules = RuleSet::tlv(window(8));
    let x = ChainState::zeros(20);
    assert!(evolve(&x, &rules, 2).is_ok());
    assert!(matches!(
        evolve(&x, &rules, 3),
        Err(tlv_core::Error::CausalityViolation { .. })
    ));
}

#[test]
fn tlv_self_dual_exhaustive() {
    for len in (2..=16).step_by(2) {
        let rules = RuleSet::tlv_mirrored();
        let mut s = Stepper::new(rules, len).unwrap();
        for x in all_states(len) {
            assert_eq!(s.step(&x.complement()), s.step(&x).complement());
        }
    }
    for len in [3, 5, 9, 15] {
        let rules = RuleSet::tlv(window(4));
        let mut s = Stepper::new(rules, len).unwrap();
        // A zero background is not self-dual; compare against a one background.
        let dual = RuleSet::tlv(BoundaryMode::OpenWindow {
            padding: 4,
            background: true,
        });
        let mut d = Stepper::new(dual, len).unwrap();
        for x in all_states(len) {
            assert_eq!(d.step(&x.complement()), s.step(&x).complement());
        }
    }
}

#[test]
fn tlv_self_dual_random_long_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rules = RuleSet::tlv_mirrored();
    let mut s = Stepper::new(rules, 200).unwrap();
    for _ in 0..10_000 {
        let x = random_state(&mut rng, 200, 0.5);
        assert_eq!(s.step(&x.complement()), s.step(&x).complement());
    }
}

#[test]
fn gkl_is_not_self_dual() {
    let rules = RuleSet::gkl(BoundaryMode::Periodic).unwrap();
    let witness = all_states(8)
        .find(|x| step(&x.complement(), &rules).unwrap() != step(x, &rules).unwrap().complement());
    let x = witness.expect("GKL must break complement symmetry");
    assert_ne!(
        step(&x.complement(), &rules).unwrap(),
        step(&x, &rules).unwrap().complement()
    );
}

fn subset(a: &ChainState, b: &ChainState) -> bool {
    a.words().iter().zip(b.words()).all(|(x, y)| x & !y == 0)
}

#[test]
fn tlv_monotone_exhaustive() {
    for len in [8, 10, 12, 14] {
        let mut s = Stepper::new(RuleSet::tlv_mirrored(), len).unwrap();
        let images: Vec<ChainState> = all_states(len).map(|x| s.step(&x)).collect();
        for v in 0usize..(1 << len) {
            // Covering relations suffice: add one bit at a time.
            for b in 0..len {
                if v >> b & 1 == 0 {
                    assert!(subset(&images[v], &images[v | 1 << b]));
                }
            }
        }
    }
}

#[test]
fn tlv_monotone_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut s = Stepper::new(RuleSet::tlv_mirrored(), 200).unwrap();
    for _ in 0..2_000 {
        let x = random_state(&mut rng, 200, 0.3);
        let extra = random_state(&mut rng, 200, 0.2);
        let y = ChainState::from_bits(BitString::from_bools(
            &x.iter()
                .zip(extra.iter())
                .map(|(a, b)| a | b)
                .collect::<Vec<_>>(),
        ));
        assert!(subset(&s.step(&x), &s.step(&y)));
    }
}

/// Reflection about the bond between cells `s` and `s + 1` of a periodic chain.
fn invert(x: &ChainState, s: usize) -> ChainState {
    let len = x.len();
    let bits: Vec<bool> = (0..len)
        .map(|j| x.get((2 * s + 1 + 2 * len - j) % len))
        .collect();
    ChainState::from_bools(&bits)
}

#[test]
fn bond_inversion_commutes_with_tlv() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rules = RuleSet::tlv(BoundaryMode::Periodic);
    for len in [10, 12, 64, 100] {
        for _ in 0..200 {
            let x = random_state(&mut rng, len, 0.5);
            let s = rng.random_range(0..len);
            assert_eq!(
                step(&invert(&x, s), &rules).unwrap(),
                invert(&step(&x, &rules).unwrap(), s)
            );
            // Invariant states stay invariant.
            let sym = ChainState::from_bools(
                &x.iter()
                    .zip(invert(&x, s).iter())
                    .map(|(a, b)| a & b)
                    .collect::<Vec<_>>(),
            );
            assert_eq!(invert(&sym, s), sym);
            let next = step(&sym, &rules).unwrap();
            assert_eq!(invert(&next, s), next);
        }
    }
}

#[test]
fn mirrored_chain_matches_half_infinite_chain() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rules = RuleSet::tlv_mirrored();
    for len in [16, 40, 100] {
        let tmax = (len / 8) as u64;
        let pad = 4 * tmax as usize + 2;
        for _ in 0..100 {
            let x = random_state(&mut rng, len, 0.3);
            let tail = random_state(&mut rng, len, 0.3);
            let half: Vec<bool> = x.iter().chain(tail.iter()).collect();
            let mut full: Vec<bool> = vec![false; pad];
            full.extend(half.iter().rev());
            full.extend(half.iter());
            full.extend(vec![false; pad]);
            let origin = pad + half.len();
            assert_eq!(origin % 2, 0);
            let wrules = RuleSet::tlv(window(pad));
            let mut a = x.clone();
            let mut b = ChainState::from_bools(&full);
            for _ in 0..tmax {
                a = step(&a, &rules).unwrap();
                b = step(&b, &wrules).unwrap();
                for j in 0..len / 2 {
                    assert_eq!(a.get(j), b.get(origin + j));
                }
            }
        }
    }
}

#[test]
fn fixed_point_census() {
    let mirrored = RuleSet::tlv_mirrored();
    let periodic = RuleSet::tlv(BoundaryMode::Periodic);
    let fp = enumerate_fixed_points(12, &mirrored).unwrap();
    assert_eq!(fp.len(), 2);
    assert!(fp.iter().any(|x| x.is_zero()) && fp.iter().any(|x| x.is_all_ones()));
    assert_eq!(enumerate_fixed_points(12, &periodic).unwrap().len(), 6);
    assert_eq!(enumerate_fixed_points(10, &periodic).unwrap().len(), 4);
    // Long chains: pattern search agrees with the short-chain structure.
    assert_eq!(enumerate_fixed_points(40, &periodic).unwrap().len(), 6);
    assert_eq!(enumerate_fixed_points(42, &periodic).unwrap().len(), 4);
    assert_eq!(enumerate_fixed_points(40, &mirrored).unwrap().len(), 2);
}

#[test]
fn eroder_table_respects_bounds() {
    let table = measure_eroder(RuleFamily::Tlv, 64).unwrap();
    assert_eq!(table.rows[0].t_dec, 0);
    assert!(table.rows[1].t_dec <= 1);
    assert!(table.rows[4].t_dec <= 4);
    table.check_bounds().unwrap();
}

#[test]
fn classify_basic_outcomes() {
    let rules = RuleSet::tlv_mirrored();
    let o = classify_evolution(&ChainState::zeros(12), &rules, 10).unwrap();
    assert_eq!(
        o,
        EvolutionOutcome {
            terminal: Terminal::CleanZero,
            steps_taken: 0
        }
    );
    let x = ChainState::from_ones(12, &[5, 6]);
    let o = classify_evolution(&x, &rules, 100).unwrap();
    assert_eq!(o.terminal, Terminal::CleanZero);
    let o = classify_evolution(&x.complement(), &rules, 100).unwrap();
    assert_eq!(o.terminal, Terminal::CleanOne);
    assert!(classify_evolution(&x, &rules, 0).is_err());
}

#[test]
fn cycles_found_near_half_density_and_are_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let rules = RuleSet::tlv_mirrored();
    let mut found = 0;
    for _ in 0..3000 {
        let x = random_state(&mut rng, 50, 0.5);
        let o = classify_evolution(&x, &rules, default_cap(50)).unwrap();
        assert_ne!(o.terminal, Terminal::Timeout);
        if let Terminal::Cycle { period, entry } = o.terminal {
            found += 1;
            let inside = evolve(&x, &rules, entry).unwrap();
            let again = classify_evolution(&inside, &rules, default_cap(50)).unwrap();
            assert_eq!(again.terminal, Terminal::Cycle { period, entry: 0 });
            assert_eq!(evolve(&inside, &rules, period).unwrap(), inside);
            if period > 1 {
                assert_ne!(evolve(&inside, &rules, 1).unwrap(), inside);
            }
        }
    }
    assert!(found > 0, "no cycles seen at half density");
}

#[test]
fn timeout_reported_when_cap_too_small() {
    let x = ChainState::from_ones(40, &(10..30).collect::<Vec<_>>());
    let o = classify_evolution(&x, &RuleSet::tlv_mirrored(), 2).unwrap();
    assert_eq!(
        o,
        EvolutionOutcome {
            terminal: Terminal::Timeout,
            steps_taken: 2
        }
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn finite_size_eroder_near_mirrors(
        half in 45usize..250,
        span in 1usize..12,
        pos_frac in 0.0f64..1.0,
        fill in proptest::collection::vec(any::<bool>(), 12),
    ) {
        let len = 2 * half;
        let l = span.min(len / 45).max(1);
        let start = ((len - l) as f64 * pos_frac) as usize;
        let mut ones = vec![start, start + l - 1];
        for k in 1..l.saturating_sub(1) {
            if fill[k] {
                ones.push(start + k);
            }
        }
        let x = ChainState::from_ones(len, &ones);
        let y = evolve(&x, &RuleSet::tlv_mirrored(), 2 * l as u64).unwrap();
        prop_assert!(y.is_zero(), "cluster {:?} survived", ones);
    }

    #[test]
    fn evolve_composes(bits in proptest::collection::vec(any::<bool>(), 2..80), a in 0u64..6, b in 0u64..6) {
        let mut bits = bits;
        if bits.len() % 2 == 1 {
            bits.pop();
        }
        prop_assume!(bits.len() >= 2);
        let rules = RuleSet::tlv_mirrored();
        let x = ChainState::from_bools(&bits);
        let lhs = evolve(&evolve(&x, &rules, a).unwrap(), &rules, b).unwrap();
        prop_assert_eq!(lhs, evolve(&x, &rules, a + b).unwrap());
    }
}
