use num_traits::{One, Zero};
use proptest::prelude::*;
use uncrossing::functions::{make_requirement, make_table, verify_skew_supermodular, FunctionOracle, RequirementMatrix};
use uncrossing::game::{blue_random, play, replay, GameConfig, GameState, NaiveRed};
use uncrossing::ground::{canonical_corner_pairs, canonicalize, corner_pairs, Bipartition, Family, GroundSet, Subset};
use uncrossing::redstrategy::paper_red_strategy;
use uncrossing::uncross::{objective, uncross_naive, uncross_strategic, DualSolution, UncrossRun};
use uncrossing::Rational;

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn ground(n: usize) -> GroundSet {
    GroundSet::new(n).unwrap()
}

/// Proper nonempty subset bits of an `n`-element ground set.
fn proper(n: usize) -> impl Strategy<Value = u64> {
    1u64..((1u64 << n) - 1)
}

fn requirement(n: usize, values: &[u8]) -> FunctionOracle {
    let mut r = RequirementMatrix::zeros(n);
    let mut it = values.iter();
    for i in 1..=n {
        for j in i + 1..=n {
            r.set(i, j, q(*it.next().unwrap() as i64));
        }
    }
    make_requirement(r, ground(n)).unwrap()
}

/// `(n, requirement values, family side bits)`
fn game_instance(max_n: usize, max_m: usize) -> impl Strategy<Value = (usize, Vec<u8>, Vec<u64>)> {
    (4..=max_n).prop_flat_map(move |n| {
        (
            Just(n),
            prop::collection::vec(0u8..4, n * (n - 1) / 2),
            prop::collection::vec(proper(n), 0..=max_m),
        )
    })
}

fn family_of(n: usize, bits: &[u64]) -> Family {
    let g = ground(n);
    Family::new(g, bits.iter().map(|&b| Bipartition::from_bits(b, g).unwrap()).collect()).unwrap()
}

fn dual_of(n: usize, bits: &[u64], weights: &[u32]) -> DualSolution {
    let g = ground(n);
    DualSolution::new(
        g,
        bits.iter()
            .zip(weights)
            .map(|(&b, &w)| (Bipartition::from_bits(b, g).unwrap(), q(w as i64))),
    )
    .unwrap()
}

fn check_run(lam: &DualSolution, f: &FunctionOracle, run: &UncrossRun) -> Result<(), TestCaseError> {
    let n = lam.ground().size();
    for w in run.history.windows(2) {
        prop_assert!(objective(&w[1], f) >= objective(&w[0], f));
        for i in 1..=n {
            for j in i + 1..=n {
                prop_assert!(w[1].separation_mass(i, j) <= w[0].separation_mass(i, j));
            }
        }
    }
    prop_assert!(run.result.is_laminar());
    prop_assert_eq!(run.history.first().unwrap(), lam);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonicalize_is_idempotent_and_complement_blind(n in 2usize..=12, seed in any::<u64>()) {
        let g = ground(n);
        let bits = seed % ((1u64 << n) - 2) + 1;
        let s = Subset::from_bits(bits, g);
        let b = canonicalize(s).unwrap();
        prop_assert_eq!(canonicalize(b.side()).unwrap(), b);
        prop_assert_eq!(canonicalize(s.complement()).unwrap(), b);
        prop_assert!(b.side().contains(1));
    }

    #[test]
    fn corner_pair_set_ignores_representatives(n in 4usize..=9, a in any::<u64>(), b in any::<u64>()) {
        let g = ground(n);
        let span = (1u64 << n) - 2;
        let x = Subset::from_bits(a % span + 1, g);
        let y = Subset::from_bits(b % span + 1, g);
        if let Ok(base) = corner_pairs(x, y) {
            let base = base.as_set();
            for (xr, yr) in [(x.complement(), y), (x, y.complement()), (x.complement(), y.complement()), (y, x)] {
                prop_assert_eq!(corner_pairs(xr, yr).unwrap().as_set(), base);
            }
            let xb = canonicalize(x).unwrap();
            let yb = canonicalize(y).unwrap();
            prop_assert_eq!(canonical_corner_pairs(&xb, &yb).unwrap().as_set(), base);
        }
    }

    #[test]
    fn oracles_are_complement_symmetric((n, vals, _) in game_instance(8, 0), bits in any::<u64>()) {
        let f = requirement(n, &vals);
        let s = Subset::from_bits(bits % ((1u64 << n) - 2) + 1, f.ground());
        prop_assert_eq!(f.peek_side(s), f.peek_side(s.complement()));
    }

    #[test]
    fn requirement_functions_verify((n, vals, _) in game_instance(7, 0)) {
        let f = requirement(n, &vals);
        prop_assert!(verify_skew_supermodular(&f).unwrap().is_none());
    }

    #[test]
    fn verifier_matches_pairwise_definition(
        n in 4usize..=5,
        entries in prop::collection::vec((any::<u64>(), 0i64..6, 1i64..4), 0..8),
    ) {
        let g = ground(n);
        let values: Vec<(Subset, Rational)> = entries
            .iter()
            .map(|&(b, p, d)| (Subset::from_bits(b % ((1u64 << n) - 2) + 1, g), Rational::new(p.into(), d.into())))
            .collect();
        let f = make_table(values, g, false).unwrap();
        let full = g.full_mask();
        let val = |bits: u64| f.peek_side(Subset::from_bits(bits, g));
        let mut ok = true;
        for x in 1..full {
            for y in 1..full {
                let quads = [x & y, x & !y & full, y & !x & full, !(x | y) & full];
                if quads.iter().all(|&q| q != 0) {
                    let lhs = val(x) + val(y);
                    if lhs > val(x & y) + val(x | y) && lhs > val(x & !y & full) + val(y & !x & full) {
                        ok = false;
                    }
                }
            }
        }
        let found = verify_skew_supermodular(&f).unwrap();
        prop_assert_eq!(found.is_none(), ok);
        if let Some(v) = found {
            prop_assert!(v.lhs > v.rhs);
            prop_assert_eq!(v.lhs, f.peek(&v.x) + f.peek(&v.y));
        }
    }

    #[test]
    fn game_steps_keep_structure((n, vals, bits) in game_instance(7, 7), seed in any::<u64>()) {
        let f = requirement(n, &vals);
        let f0 = family_of(n, &bits);
        let atoms0 = f0.atoms();
        let mut red = paper_red_strategy();
        let mut blue = blue_random(seed, false);
        let out = play(&f0, &f, &mut red, &mut blue, 8 * (n as u64).pow(3) * (f0.len() as u64).max(1), GameConfig::default()).unwrap();
        prop_assert!(out.won);
        let mut state = GameState::new(f0.deduplicated());
        for rec in &out.trace {
            let before_atoms = state.family.atoms();
            let retired_before = state.retired.clone();
            state = uncrossing::game::step(&state, &f, &rec.red, rec.blue, GameConfig::default()).unwrap();
            let after_atoms = state.family.atoms();
            // atoms only merge
            for class in before_atoms.classes() {
                let first = class.trailing_zeros() as usize + 1;
                let ids: Vec<usize> = (1..=n).filter(|&i| class >> (i - 1) & 1 == 1).collect();
                prop_assert!(ids.iter().all(|&i| after_atoms.same_class(first, i)));
            }
            // retired members stay retired and never cross active ones
            for m in retired_before.iter() {
                prop_assert!(state.retired.contains(m));
            }
            for m in state.retired.iter() {
                prop_assert!(!state.family.crosses_any(m));
            }
            // every member is a union of initial atoms
            for m in state.final_family().iter() {
                for class in atoms0.classes() {
                    let inside = m.bits() & class;
                    prop_assert!(inside == 0 || inside == *class);
                }
            }
        }
        prop_assert_eq!(state.final_family(), out.final_family);
    }

    #[test]
    fn play_is_deterministic_and_replayable((n, vals, bits) in game_instance(7, 6), seed in any::<u64>()) {
        let f = requirement(n, &vals);
        let f0 = family_of(n, &bits);
        let cap = 8 * (n as u64).pow(3) * (f0.len() as u64).max(1);
        let a = play(&f0, &f, &mut paper_red_strategy(), &mut blue_random(seed, true), cap, GameConfig { allow_none: true }).unwrap();
        let b = play(&f0, &f, &mut paper_red_strategy(), &mut blue_random(seed, true), cap, GameConfig { allow_none: true }).unwrap();
        prop_assert_eq!(&a, &b);
        let end = replay(&f0, &f, &a.trace, GameConfig { allow_none: true }).unwrap();
        prop_assert_eq!(end.final_family(), a.final_family);
        let c = play(&f0, &f, &mut NaiveRed, &mut blue_random(seed, false), cap, GameConfig::default()).unwrap();
        let d = play(&f0, &f, &mut NaiveRed, &mut blue_random(seed, false), cap, GameConfig::default()).unwrap();
        prop_assert_eq!(c, d);
    }

    #[test]
    fn uncrossing_steps_are_monotone(
        (n, vals, bits) in game_instance(7, 6),
        weights in prop::collection::vec(1u32..20, 6),
    ) {
        let f = requirement(n, &vals);
        let lam = dual_of(n, &bits, &weights);
        let strategic = uncross_strategic(&lam, &f).unwrap();
        check_run(&lam, &f, &strategic.run)?;
        let naive = uncross_naive(&lam, &f).unwrap();
        check_run(&lam, &f, &naive.run)?;
        for w in naive.run.history.windows(2) {
            prop_assert!(w[1].potential() < w[0].potential());
        }
        prop_assert!(Rational::from_integer(naive.run.steps().into()) <= naive.initial_potential);
    }

    #[test]
    fn strategic_uncrossing_ignores_scale(
        (n, vals, bits) in game_instance(6, 5),
        weights in prop::collection::vec(1u32..20, 5),
        num in 1i64..1000,
        den in 1i64..1000,
    ) {
        let f = requirement(n, &vals);
        let lam = dual_of(n, &bits, &weights);
        let scale = Rational::new(num.into(), den.into());
        let a = uncross_strategic(&lam, &f).unwrap();
        let b = uncross_strategic(&lam.scaled(&scale), &f).unwrap();
        prop_assert_eq!(a.run.supports(), b.run.supports());
        prop_assert_eq!(a.run.result.scaled(&scale), b.run.result);
    }

    #[test]
    fn dual_arithmetic(
        (n, _, bits) in game_instance(6, 5),
        weights in prop::collection::vec(1u32..20, 5),
    ) {
        let lam = dual_of(n, &bits, &weights);
        prop_assert_eq!(lam.scaled(&Rational::one()), lam.clone());
        prop_assert_eq!(lam.distance(&lam), Rational::zero());
        let half = Rational::new(1.into(), 2.into());
        let empty = DualSolution::empty(lam.ground());
        prop_assert_eq!(lam.toward(&empty, &half), lam.scaled(&half));
    }
}
