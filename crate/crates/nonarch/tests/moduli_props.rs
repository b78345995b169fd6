use nonarch::annulus::AnnulusType;
use nonarch::moduli::{count_forms, descended_radii, isomorphic, FractionalAnnulus};
use num_rational::Rational64;
use proptest::prelude::*;

const KINDS: [AnnulusType; 3] = [AnnulusType::Closed, AnnulusType::Open, AnnulusType::SemiOpen];

// Coordinate changes: X -> pi^n X shifts both radii by n; X -> pi^c / X sends
// (alpha, beta) to (c - beta, c - alpha) and swaps the boundary sides.
fn related_by_coordinates(v: &FractionalAnnulus, w: &FractionalAnnulus) -> bool {
    if v.kind != w.kind || v.modulus() != w.modulus() {
        return false;
    }
    let shift = (w.alpha - v.alpha).is_integer();
    let flip = v.kind != AnnulusType::SemiOpen && (w.alpha + v.beta).is_integer();
    shift || flip
}

fn annulus() -> impl Strategy<Value = FractionalAnnulus> {
    (-12i64..12, 1i64..7, 1i64..24, 1i64..7, 0usize..3).prop_map(|(an, ad, gn, gd, k)| {
        let alpha = Rational64::new(an, ad);
        FractionalAnnulus::new(alpha, alpha + Rational64::new(gn, gd), KINDS[k]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn isomorphism_matches_coordinate_changes(v in annulus(), w in annulus()) {
        prop_assert_eq!(isomorphic(&v, &w), related_by_coordinates(&v, &w));
    }

    #[test]
    fn isomorphism_is_an_equivalence(v in annulus(), n in -5i64..5, c in -5i64..5) {
        let shifted = FractionalAnnulus::new(v.alpha + n, v.beta + n, v.kind).unwrap();
        prop_assert!(isomorphic(&v, &v));
        prop_assert!(isomorphic(&v, &shifted) && isomorphic(&shifted, &v));
        let inv = v.inverted(c);
        prop_assert_eq!(isomorphic(&v, &inv), v.kind != AnnulusType::SemiOpen || (v.alpha + v.beta).is_integer());
        prop_assert!(isomorphic(&inv.inverted(c), &v));
    }

    #[test]
    fn normal_form_is_idempotent(v in annulus()) {
        let nf = v.normal_form();
        let rep = FractionalAnnulus::new(nf.alpha_class, nf.alpha_class + nf.modulus, v.kind).unwrap();
        prop_assert_eq!(rep.normal_form(), nf);
        prop_assert!(isomorphic(&rep, &v));
        prop_assert!(nf.alpha_class >= Rational64::from_integer(0) && nf.alpha_class < Rational64::from_integer(1));
    }

    #[test]
    fn base_change_scales_modulus(v in annulus(), d in 1i64..6) {
        prop_assert_eq!(v.base_change(d).modulus(), v.modulus() * d);
    }

    #[test]
    fn descended_radii_have_modulus_e_over_m(e in 1u64..30, m in 1u64..8, a in 0u64..8) {
        prop_assume!(a < m);
        let beta = ((e % m) + m - a) % m;
        for kind in KINDS {
            let v = descended_radii(e, m, a, beta, kind).unwrap();
            prop_assert_eq!(v.modulus(), Rational64::new(e as i64, m as i64));
        }
    }
}

#[test]
fn form_counts_by_type() {
    for e in 1..12u64 {
        for kind in KINDS {
            let semi = kind == AnnulusType::SemiOpen;
            let want2 = if semi { 2 } else if e % 2 == 0 { 3 } else { 1 };
            let want1 = if semi { 1 } else { 2 };
            assert_eq!(count_forms(kind, 2, e).unwrap(), want2, "{kind} rho=2 e={e}");
            assert_eq!(count_forms(kind, 1, e).unwrap(), want1, "{kind} rho=1 e={e}");
        }
    }
    assert!(count_forms(AnnulusType::Closed, 3, 4).is_err());
}
