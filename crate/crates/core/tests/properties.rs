//! Randomised properties checked against the operator-level constructions.

use num_bigint::BigInt;
use proptest::prelude::*;

use sympovm::corpus::{rng, PovmSampler};
use sympovm::feasible::{is_feasible, SymPovm};
use sympovm::io::{FromJson, ToJson};
use sympovm::operators::{is_psd, partial_transpose, Arithmetic};
use sympovm::protocols::{isotropic_protocol, verify_protocol, werner_protocol};
use sympovm::scalar::Rational;
use sympovm::symmetry::{coeff_to_operator, pt_coefficient_map, twirl_coefficients, CoeffVector, Family, SymmetryKind};

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=12).prop_map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
}

fn kind() -> impl Strategy<Value = SymmetryKind> {
    prop_oneof![
        (2usize..=4).prop_map(|d| SymmetryKind::isotropic(d).unwrap()),
        (2usize..=4).prop_map(|d| SymmetryKind::werner(d).unwrap()),
        (2usize..=4).prop_map(|d| SymmetryKind::oo(d).unwrap()),
        Just(SymmetryKind::bell()),
    ]
}

fn coeff_vector() -> impl Strategy<Value = CoeffVector> {
    kind().prop_flat_map(|k| {
        prop::collection::vec(rational(), k.n_coeffs()).prop_map(move |c| CoeffVector::new(k, c).unwrap())
    })
}

fn sampled_povm(family: Family) -> impl Strategy<Value = SymPovm> {
    (2usize..=4, 2usize..=3, any::<u64>()).prop_map(move |(d, n, seed)| {
        let k = SymmetryKind::new(family, if family == Family::Bell { 2 } else { d }).unwrap();
        PovmSampler::new(k, n).unwrap().feasible(&mut rng(seed), 4)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn twirl_inverts_expansion(v in coeff_vector()) {
        prop_assert_eq!(twirl_coefficients(&coeff_to_operator(&v), v.kind).unwrap(), v);
    }

    #[test]
    fn coefficient_pt_matches_operator_pt(v in coeff_vector()) {
        let map = pt_coefficient_map(v.kind).unwrap();
        let image = map.apply(&v).unwrap();
        let op = partial_transpose(&coeff_to_operator(&v));
        let rebuilt = coeff_to_operator(&image);
        prop_assert_eq!(rebuilt.matrix(), op.matrix());
        prop_assert_eq!(image.is_nonnegative(), is_psd(op.matrix()).unwrap());
    }

    #[test]
    fn pt_twice_is_identity(v in coeff_vector()) {
        let once = pt_coefficient_map(v.kind).unwrap().apply(&v).unwrap();
        let twice = pt_coefficient_map(once.kind).unwrap().apply(&once).unwrap();
        prop_assert_eq!(twice, v);
    }

    #[test]
    fn sampled_povms_are_feasible_and_round_trip(
        p in prop_oneof![
            sampled_povm(Family::Isotropic),
            sampled_povm(Family::Werner),
            sampled_povm(Family::Bell),
            sampled_povm(Family::OO),
        ]
    ) {
        prop_assert!(is_feasible(&p).unwrap().feasible);
        prop_assert_eq!(SymPovm::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn protocols_realise_sampled_targets(
        p in prop_oneof![sampled_povm(Family::Isotropic), sampled_povm(Family::Werner)]
    ) {
        let protocol = match p.kind.family() {
            Family::Isotropic => isotropic_protocol(&p).unwrap(),
            _ => werner_protocol(&p).unwrap(),
        };
        prop_assert!(verify_protocol(&protocol, &p, Arithmetic::Exact).unwrap().ok());
    }
}
