mod common;

use std::sync::Arc;

use common::{grid, homogeneous, linear_derivation, ring, ring_elem, small_rational};
use fermat_core::derivation::{
    generator_dij, generator_epsilon, is_well_defined, verify_triangular_vanishing, Derivation,
};
use fermat_core::exactla::matrix_power;
use fermat_core::field::CycloNum;
use fermat_core::linearder::LinearDerivation;
use fermat_core::ring::{RingElem, RingSpec};
use proptest::prelude::*;

fn any_spec<S: Strategy>(
    f: impl Fn(Arc<RingSpec>) -> S + Clone,
) -> impl Strategy<Value = (Arc<RingSpec>, S::Value)> {
    (0usize..4).prop_flat_map(move |idx| {
        let spec = grid()[idx].clone();
        (Just(spec.clone()), f(spec))
    })
}

/// A generator `d_ij`, `ε`, or a random linear derivation.
fn derivation(spec: Arc<RingSpec>) -> impl Strategy<Value = Derivation> {
    let n = spec.n();
    let s1 = spec.clone();
    let s2 = spec.clone();
    prop_oneof![
        (0..n, 0..n)
            .prop_filter("distinct", |(i, j)| i != j)
            .prop_map(move |(i, j)| generator_dij(&s1, i.min(j), i.max(j)).unwrap()),
        Just(generator_epsilon(&s2)),
        linear_derivation(spec).prop_map(|d| d.derivation().clone()),
    ]
}

fn triple(
    spec: Arc<RingSpec>,
) -> impl Strategy<Value = (Derivation, RingElem, RingElem, CycloNum)> {
    (
        derivation(spec.clone()),
        ring_elem(spec.clone(), 3, 3),
        ring_elem(spec.clone(), 3, 3),
        common::cyclo(spec.field().clone()),
    )
}

fn linear_and_homogeneous(
    spec: Arc<RingSpec>,
) -> impl Strategy<Value = (LinearDerivation, u32, RingElem, CycloNum)> {
    (linear_derivation(spec.clone()), 1u32..=4, small_rational()).prop_flat_map(move |(d, k, a)| {
        let alpha = CycloNum::from_rational(spec.field(), a);
        (Just(d), Just(k), homogeneous(spec.clone(), k), Just(alpha))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn leibniz_and_linearity((_spec, (d, f, g, c)) in any_spec(triple)) {
        let lhs = d.apply(&(&f * &g)).unwrap();
        let rhs = &(&f * &d.apply(&g).unwrap()) + &(&d.apply(&f).unwrap() * &g);
        prop_assert_eq!(lhs, rhs);
        let comb = &f.scale(&c) + &g;
        let lin = &d.apply(&f).unwrap().scale(&c) + &d.apply(&g).unwrap();
        prop_assert_eq!(d.apply(&comb).unwrap(), lin);
    }

    #[test]
    fn linear_derivations_preserve_degree_and_commute_with_scalars(
        (spec, (d, k, f, alpha)) in any_spec(linear_and_homogeneous)
    ) {
        let image = d.apply(&f).unwrap();
        prop_assert!(image.is_zero() || image.homogeneous_degree() == Some(k));
        if spec.is_quadric() {
            let scalar = LinearDerivation::scalar(&spec, &alpha).unwrap();
            let ds = LinearDerivation::from_matrix(&spec, d.decompose().unwrap().skew).unwrap();
            let a = scalar.apply(&ds.apply(&f).unwrap()).unwrap();
            let b = ds.apply(&scalar.apply(&f).unwrap()).unwrap();
            prop_assert_eq!(a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn iterates_follow_matrix_powers((spec, d) in any_spec(linear_derivation)) {
        let n = spec.n();
        for s in 0..=5u32 {
            let power = matrix_power(d.matrix(), s).unwrap();
            for i in 0..n {
                let direct = d.derivation().compose_power(s, &RingElem::var(&spec, i)).unwrap();
                let expected = (0..n).fold(RingElem::zero(&spec), |acc, j| {
                    acc + RingElem::var(&spec, j).scale(&power[(i, j)])
                });
                prop_assert_eq!(direct, expected);
            }
        }
    }
}

#[test]
fn generators_are_well_defined() {
    for spec in grid()
        .into_iter()
        .chain([ring(&[2, 3, 3]), ring(&[5, 2, 4, 3])])
    {
        let n = spec.n();
        for i in 0..n {
            for j in i + 1..n {
                let d = generator_dij(&spec, i, j).unwrap();
                assert!(is_well_defined(&spec, d.images()).unwrap());
                assert!(d.is_certified());
            }
        }
        assert!(is_well_defined(&spec, generator_epsilon(&spec).images()).unwrap());
    }
}

#[test]
fn triangular_derivations_vanish() {
    assert!(verify_triangular_vanishing(&ring(&[2, 2, 2]), 2));
    assert!(verify_triangular_vanishing(&ring(&[3, 3, 3]), 2));
    assert!(verify_triangular_vanishing(&ring(&[2, 2, 2, 2]), 1));
    assert!(verify_triangular_vanishing(&ring(&[2, 2, 2, 2]), 2));
}
