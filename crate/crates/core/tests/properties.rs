//! Property tests for the spectrum layer: rearrangement and scaling laws,
//! serialization round-trips, and merge/counting additivity on randomly
//! generated weighted spectra.

use dixmier::spectrum::{Tail, WeightedSpectrum};
use proptest::prelude::*;

fn arb_atoms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec(
        (0.01f64..100.0, 0.05f64..5.0),
        1..40,
    )
}

/// A t strictly between breakpoints of the given spectrum.
fn interior_t(spectrum: &WeightedSpectrum, frac: f64) -> f64 {
    let cum = spectrum.cumulative_weights();
    let total = spectrum.total_weight();
    let t = frac * total;
    // nudge off any breakpoint
    for &c in cum {
        if (t - c).abs() < 1e-9 * total {
            return t + 2e-9 * total;
        }
    }
    t
}

proptest! {
    #[test]
    fn rearrangement_commutes_with_monotone_maps(atoms in arb_atoms(), frac in 0.01f64..0.99) {
        let spectrum = WeightedSpectrum::from_atoms(atoms).unwrap();
        let t = interior_t(&spectrum, frac);
        // nondecreasing right-continuous maps with f(0) >= 0
        let maps: [fn(f64) -> f64; 3] = [
            |x| x * x,
            |x| x.sqrt(),
            |x| x / (1.0 + x),
        ];
        for f in maps {
            let mapped = spectrum.map_values(f).unwrap();
            let lhs = mapped.mu(t).unwrap();
            let rhs = f(spectrum.mu(t).unwrap());
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()),
                "mu(f(T), {t}) = {lhs} vs f(mu(T, {t})) = {rhs}");
        }
    }

    #[test]
    fn mu_scales_homogeneously(atoms in arb_atoms(), lambda in -10.0f64..10.0, frac in 0.01f64..0.99) {
        prop_assume!(lambda.abs() > 1e-3);
        let spectrum = WeightedSpectrum::from_atoms(atoms).unwrap();
        let t = interior_t(&spectrum, frac);
        let scaled = spectrum.scale(lambda).unwrap();
        let lhs = scaled.mu(t).unwrap();
        let rhs = lambda.abs() * spectrum.mu(t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }

    #[test]
    fn wire_round_trip_is_exact(atoms in arb_atoms()) {
        let spectrum = WeightedSpectrum::from_atoms(atoms).unwrap();
        let json = spectrum.to_json();
        let back = WeightedSpectrum::from_json(&json).unwrap();
        prop_assert_eq!(back.len(), spectrum.len());
        for (a, b) in back.atoms().iter().zip(spectrum.atoms()) {
            prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
            prop_assert_eq!(a.weight.to_bits(), b.weight.to_bits());
        }
        prop_assert_eq!(back.to_json(), json);
    }

    #[test]
    fn merge_adds_mass_and_counting(a in arb_atoms(), b in arb_atoms(), lam_frac in 0.01f64..0.99) {
        let s1 = WeightedSpectrum::from_atoms(a).unwrap();
        let s2 = WeightedSpectrum::from_atoms(b).unwrap();
        let merged = s1.merge(&s2).unwrap();
        let total = s1.total_weight() + s2.total_weight();
        prop_assert!((merged.total_weight() - total).abs() <= 1e-10 * total);
        // counting is additive under direct sums; stay inside both
        // enumerations (beyond them counting refuses without a tail)
        let lambda = lam_frac * s1.max_value().min(s2.max_value());
        prop_assume!(lambda > 0.0);
        let n = merged.counting(lambda).unwrap();
        let n12 = s1.counting(lambda).unwrap() + s2.counting(lambda).unwrap();
        prop_assert!((n - n12).abs() <= 1e-10 * (1.0 + n12));
        // trace is additive too
        let tr = merged.enumerated_trace();
        let tr12 = s1.enumerated_trace() + s2.enumerated_trace();
        prop_assert!((tr - tr12).abs() <= 1e-10 * (1.0 + tr12.abs()));
    }

    #[test]
    fn sigma_is_concave_nondecreasing(atoms in arb_atoms(), f1 in 0.02f64..0.98, f2 in 0.02f64..0.98) {
        let spectrum = WeightedSpectrum::from_atoms(atoms).unwrap();
        let total = spectrum.total_weight();
        let (lo, hi) = if f1 < f2 { (f1, f2) } else { (f2, f1) };
        prop_assume!(hi - lo > 1e-6);
        let t1 = lo * total;
        let t2 = hi * total;
        let s1 = spectrum.sigma(t1).unwrap().value;
        let s2 = spectrum.sigma(t2).unwrap().value;
        prop_assert!(s2 >= s1 - 1e-12 * (1.0 + s1));
        // concavity: the midpoint value dominates the chord
        let mid = spectrum.sigma(0.5 * (t1 + t2)).unwrap().value;
        prop_assert!(mid >= 0.5 * (s1 + s2) - 1e-10 * (1.0 + s2));
    }

    #[test]
    fn pow_round_trips(atoms in arb_atoms(), frac in 0.01f64..0.99) {
        let spectrum = WeightedSpectrum::from_atoms(atoms).unwrap();
        let t = interior_t(&spectrum, frac);
        let back = spectrum.pow(-1.0).unwrap().pow(-1.0).unwrap();
        let lhs = back.mu(t).unwrap();
        let rhs = spectrum.mu(t).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
    }
}

#[test]
fn tail_direction_survives_round_trip() {
    let growth = WeightedSpectrum::from_atoms((1..=500).map(|k| (k as f64, 2.0)))
        .unwrap()
        .with_tail(Tail::growth(2.0, 1.0))
        .unwrap();
    let decay = growth.pow(-1.0).unwrap();
    for s in [&growth, &decay] {
        let back = WeightedSpectrum::from_json(&s.to_json()).unwrap();
        assert_eq!(
            std::mem::discriminant(&back.tail().unwrap()),
            std::mem::discriminant(&s.tail().unwrap())
        );
    }
}
