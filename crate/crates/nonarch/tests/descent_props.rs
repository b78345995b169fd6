use nonarch::annulus::{AnnulusType, LaurentFunction};
use nonarch::descent::{descend, MonomialAction, NormalForm, VarImage};
use nonarch::dvr::{DvrElement, ExtensionSpec};
use nonarch::field::Field;
use nonarch::linearize::{linearize, verify_certificate, AnnulusAutomorphism, BranchBehavior};
use nonarch::moduli::{descended_radii, isomorphic};
use nonarch::presentation::{Presentation, VarKind, VariableDecl};
use num_rational::Rational64;
use proptest::prelude::*;

const KINDS: [AnnulusType; 3] = [AnnulusType::Closed, AnnulusType::Open, AnnulusType::SemiOpen];

fn model(f: &Field, m: usize, e: usize, kind: AnnulusType) -> Presentation {
    let (kx, ky) = match kind {
        AnnulusType::Closed => (VarKind::Restricted, VarKind::Restricted),
        AnnulusType::Open => (VarKind::Formal, VarKind::Formal),
        AnnulusType::SemiOpen => (VarKind::Restricted, VarKind::Formal),
    };
    Presentation::over_ramified(f, m, 40, vec![VariableDecl::new("X", kx), VariableDecl::new("Y", ky)])
        .with_relations(&[format!("X*Y - varpi^{e}").as_str()])
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // A diagonal action with characters (alpha, beta) descends to an annulus
    // of modulus e/m, whatever the characters.
    #[test]
    fn diagonal_descent_has_modulus_e_over_m(m in 2usize..6, e in 1usize..13, alpha in 0usize..6, k in 0usize..3) {
        prop_assume!(alpha < m);
        let beta = (e % m + m - alpha) % m;
        let kind = KINDS[k];
        let f = Field::prime(61).unwrap();
        let ext = ExtensionSpec::ramified(&f, m as u32).unwrap();
        let act = MonomialAction::for_extension(&ext, vec![
            VarImage { target: 0, character: alpha as i64, unit: f.one() },
            VarImage { target: 1, character: beta as i64, unit: f.one() },
        ]);
        let rep = descend(&model(&f, m, e, kind), &ext, &act).unwrap();
        prop_assert!(rep.flat);
        prop_assert_eq!(rep.verified, Some(true));
        match rep.normal_form {
            Some(NormalForm::FractionalAnnulus { annulus, .. }) => {
                prop_assert_eq!(annulus.modulus(), Rational64::new(e as i64, m as i64));
                let want = descended_radii(e as u64, m as u64, alpha as u64, beta as u64, kind).unwrap();
                prop_assert!(isomorphic(&annulus, &want), "{:?} vs {:?}", annulus, want);
            }
            other => prop_assert!(false, "unexpected normal form {:?}", other),
        }
    }

    // Conjugating a diagonal automorphism by a deep translation hides it; the
    // linearization recovers a coordinate in which it is diagonal again.
    #[test]
    fn linearization_undoes_translations(m in 2u32..5, e in 2usize..5, power in 0u32..4, depth in 3usize..6, c0 in 1u32..13, c1 in 0u32..13) {
        let f = Field::prime(13).unwrap();
        let like = LaurentFunction::monomial(&f, e, AnnulusType::Closed, 16, 40, 1);
        let zeta = f.root_of_unity(m as u64).unwrap();
        let c = f.pow(&zeta, (power % m) as i64);
        let s = AnnulusAutomorphism::linear(&like, m, &zeta, 0, &c).unwrap();
        let t = DvrElement::from_terms(&f, &[(e + depth, f.from_int(c0 as i64)), (e + depth + 1, f.from_int(c1 as i64))], 40);
        let d = s.conjugate_translation(&t).unwrap();
        let cert = linearize(&d, 24).unwrap();
        prop_assert_eq!(cert.branch, BranchBehavior::Fixes);
        prop_assert!(cert.verified_to_precision >= 24);
        prop_assert!(verify_certificate(&d, &cert).unwrap() >= 24);
        prop_assert!(f.is_one(&f.pow(&cert.u.residue(), m as i64)));
    }
}
