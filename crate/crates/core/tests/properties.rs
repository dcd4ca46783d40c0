//! Property tests for the submodule, seminorm and duality invariants,
//! driven by seeds into the oracle generators.

use proptest::prelude::*;
use tdlf::oracle::{brute_pairing, brute_seminorm, gen, sample_elements, Rng, SampleConfig};
use tdlf::{pairing, pseudo_polar, ExtInt, FieldKind, Membership, Series};

const P: u64 = 5;

fn samples(m: &tdlf::SubmoduleSpec, seed: u64, count: usize) -> Vec<Series> {
    sample_elements(m, P, &SampleConfig { seed, count, window: (-8, 8), precision: 8 })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn membership_is_monotone(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let f = gen::field(&mut rng);
        let a = gen::submodule(&mut rng, f);
        let b = a.sum(&gen::submodule(&mut rng, f)).unwrap();
        prop_assert!(a.is_subset_of(&b));
        for x in samples(&a, seed, 6) {
            prop_assert_eq!(b.membership(&x), Membership::In);
        }
    }

    #[test]
    fn compactoid_implies_bounded(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let f = gen::field(&mut rng);
        for m in [gen::submodule(&mut rng, f), gen::compactoid(&mut rng, f), gen::bounded(&mut rng, f)] {
            let c = m.classify();
            prop_assert!(!c.compactoid || c.bounded, "{:?}", m);
        }
    }

    #[test]
    fn bounded_modules_have_finite_seminorm_sup(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let f = gen::field(&mut rng);
        let m = gen::bounded(&mut rng, f);
        let n = gen::seminorm(&mut rng, f);
        let sup = n.sup_over_module(&m.seq);
        prop_assert!(sup.is_finite() || sup == ExtInt::NegInf, "sup {:?} for {:?}", sup, m);
        let mut best = ExtInt::NegInf;
        for x in samples(&m, seed, 8) {
            let e = n.eval_exponent(&x).unwrap();
            prop_assert!(e.exponent <= sup);
            if e.is_exact() {
                best = best.max(e.exponent);
            }
        }
        // the boundary monomials attain the sup when its argmax lies in the sampled window
        let in_window = (-8..=8)
            .filter_map(|i| n.seq.value_at(i).checked_sub(m.seq.value_at(i)).ok())
            .max();
        if let Some(w) = in_window {
            if w == sup && w.is_finite() {
                prop_assert_eq!(best, sup);
            }
        }
    }

    #[test]
    fn unbounded_modules_have_witnesses(seed in any::<u64>(), target in -5i64..40) {
        let mut rng = Rng::new(seed);
        let f = gen::field(&mut rng);
        let m = gen::unbounded(&mut rng, f);
        prop_assert!(!m.is_bounded());
        let w = m.unboundedness_witness(P, target).unwrap();
        prop_assert!(w.seminorm.is_admissible());
        for x in &w.elements {
            prop_assert_eq!(m.membership(x), Membership::In);
            prop_assert!(w.seminorm.eval_exponent(x).unwrap().exponent >= ExtInt::Finite(target));
        }
    }

    #[test]
    fn polarity_exchanges_classes(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let lattice = gen::open_lattice(&mut rng, FieldKind::MixedChar);
        prop_assert!(pseudo_polar(&lattice).is_compactoid());
        let c = gen::compactoid(&mut rng, FieldKind::MixedChar);
        prop_assert!(pseudo_polar(&c).is_open_lattice(), "{:?}", c);
        let m = gen::submodule(&mut rng, FieldKind::MixedChar);
        prop_assert_eq!(m.is_open_lattice(), pseudo_polar(&m).is_compactoid());
        prop_assert_eq!(m.is_compactoid(), pseudo_polar(&m).is_open_lattice());
    }

    #[test]
    fn pseudo_polar_reverses_inclusion(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let f = gen::field(&mut rng);
        let a = gen::submodule(&mut rng, f);
        let b = a.sum(&gen::submodule(&mut rng, f)).unwrap();
        prop_assert!(pseudo_polar(&b).is_subset_of(&pseudo_polar(&a)));
        for i in -30..=30 {
            prop_assert!(pseudo_polar(&b).seq.value_at(i) >= pseudo_polar(&a).seq.value_at(i));
        }
    }

    #[test]
    fn pseudo_polar_pairs_below_one(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let f = gen::field(&mut rng);
        let m = gen::submodule(&mut rng, f);
        let g = pseudo_polar(&m);
        let window = (-10, 10);
        let cfg = |seed| SampleConfig { seed, count: 6, window, precision: 8 };
        let xs = sample_elements(&g, P, &cfg(seed));
        let ys = sample_elements(&m, P, &cfg(seed ^ 1));
        for x in xs.iter().filter(|x| x.kind() == FieldKind::MixedChar || no_tail(x)) {
            for y in ys.iter().filter(|y| no_tail(y)) {
                let e = brute_pairing(x, y, window).unwrap().abs_exponent();
                prop_assert!(e.exponent <= ExtInt::Finite(-1), "{:?} · {:?}", x, y);
            }
        }
    }

    #[test]
    fn pairing_is_symmetric(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let f = gen::field(&mut rng);
        let lo = rng.range(-6, 2);
        let hi = lo + rng.range(0, 6);
        let x = gen::series(&mut rng, f, P, (lo, hi), 10, false);
        let y = gen::series(&mut rng, f, P, (-hi, -lo), 10, false);
        let xy = pairing(&x, &y, -40).unwrap();
        let yx = pairing(&y, &x, -40).unwrap();
        prop_assert_eq!(&xy, &yx);
        prop_assert_eq!(xy, brute_pairing(&x, &y, (-20, 20)).unwrap());
    }

    #[test]
    fn seminorm_matches_brute_force(seed in any::<u64>()) {
        let mut rng = Rng::new(seed);
        let f = gen::field(&mut rng);
        let n = gen::seminorm(&mut rng, f);
        let lo = rng.range(-8, 4);
        let hi = lo + rng.range(0, 6);
        let x = gen::series(&mut rng, f, P, (lo, hi), 10, false);
        let e = n.eval_exponent(&x).unwrap();
        if e.is_exact() {
            prop_assert_eq!(e.exponent, brute_seminorm(&n, &x, (-20, 20)));
        }
    }
}

/// True when every coefficient outside the stored window is known to be zero.
fn no_tail(x: &Series) -> bool {
    match x {
        Series::Equal(s) => s.trunc().is_none(),
        Series::Mixed(s) => s.left() == tdlf::LeftTail::Zero && s.right() == tdlf::RightTail::Zero,
    }
}
