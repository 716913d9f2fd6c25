mod common;

use std::sync::Arc;

use common::{field, linear_derivation};
use fermat_core::constants::{build_even_family, build_odd_family, family_conductor};
use fermat_core::exactla::{is_nilpotent, Matrix};
use fermat_core::field::{CycloNum, Rational};
use fermat_core::linearder::{linear_derivation_space, Classification, LinearDerivation};
use fermat_core::ring::RingSpec;
use proptest::prelude::*;

fn all_at_least_three() -> Vec<Arc<RingSpec>> {
    let mut out = Vec::new();
    for n in [3usize, 4] {
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let m: Vec<u32> = (0..n)
                .map(|i| 3 + (code / 3usize.pow(i as u32) % 3) as u32)
                .collect();
            out.push(RingSpec::new(m, field(4)).unwrap());
        }
    }
    out
}

#[test]
fn diagonal_classification_for_large_exponents() {
    for spec in all_at_least_three() {
        let basis = linear_derivation_space(&spec);
        assert_eq!(basis.len(), 1, "{spec}");
        let b = &basis[0];
        assert!(b.is_diagonal());
        // b = c * diag(1/m_i)
        let c = b[(0, 0)].scale(&Rational::from_integer(spec.exponent(0).into()));
        assert!(!c.is_zero());
        for i in 0..spec.n() {
            let expected = c.scale(&Rational::new(1.into(), spec.exponent(i).into()));
            assert_eq!(b[(i, i)], expected);
        }
        let d = LinearDerivation::from_matrix(&spec, b.clone()).unwrap();
        assert!(matches!(
            d.classify().unwrap(),
            Classification::Diagonal { .. }
        ));
        assert!(!d.is_locally_nilpotent());
    }
}

#[test]
fn quadric_space_is_scalar_plus_skew() {
    for n in 3..=5usize {
        let spec = RingSpec::uniform(n, 2, field(4)).unwrap();
        let basis = linear_derivation_space(&spec);
        assert_eq!(basis.len(), 1 + n * (n - 1) / 2);
        for b in basis {
            let d = LinearDerivation::from_matrix(&spec, b.clone()).unwrap();
            let dec = d.decompose().unwrap();
            assert!(dec.skew.is_skew_symmetric());
            let rebuilt = Matrix::scalar(spec.field(), n, &dec.alpha)
                .checked_add(&dec.skew)
                .unwrap();
            assert_eq!(rebuilt, b);
        }
    }
}

fn nilpotent_pool() -> Vec<LinearDerivation> {
    let mut pool = Vec::new();
    for n in [3usize, 5, 7] {
        pool.push(build_odd_family(n, &field(4)).unwrap());
    }
    for n in [4usize, 6] {
        pool.push(build_even_family(n, &field(family_conductor(n))).unwrap());
    }
    let f = field(4);
    let spec = RingSpec::uniform(3, 2, f.clone()).unwrap();
    pool.push(LinearDerivation::zero(&spec));
    // scaled family members stay nilpotent
    let odd = build_odd_family(3, &f).unwrap();
    let three = CycloNum::from_int(&f, 3);
    pool.push(LinearDerivation::from_matrix(&spec, odd.matrix().scale(&three)).unwrap());
    pool
}

#[test]
fn nilpotent_quadric_derivations_are_skew() {
    for d in nilpotent_pool() {
        let report = d.nilpotency();
        assert!(report.nilpotent);
        assert_eq!(report.skew_cross_check, Some(true));
        let dec = d.decompose().unwrap();
        assert!(dec.alpha.is_zero());
        assert!(is_nilpotent(&dec.skew).unwrap().nilpotent);
    }
}

fn spec_index() -> impl Strategy<Value = Arc<RingSpec>> {
    prop::sample::select(all_at_least_three())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn large_exponents_have_no_nonzero_lnd(d in spec_index().prop_flat_map(linear_derivation)) {
        prop_assert_eq!(d.is_locally_nilpotent(), d.matrix().is_zero());
    }

    #[test]
    fn quadric_nilpotency_agrees_with_skew_test(
        d in (3usize..=5).prop_flat_map(|n| linear_derivation(RingSpec::uniform(n, 2, field(4)).unwrap()))
    ) {
        let report = d.nilpotency();
        let dec = d.decompose().unwrap();
        let skew_test = dec.alpha.is_zero() && is_nilpotent(&dec.skew).unwrap().nilpotent;
        prop_assert_eq!(report.nilpotent, skew_test);
        prop_assert_eq!(report.skew_cross_check, Some(true));
    }
}
