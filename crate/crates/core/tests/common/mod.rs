#![allow(dead_code)]

use std::sync::Arc;

use fermat_core::exactla::Matrix;
use fermat_core::field::{CycloNum, FieldSpec, Rational};
use fermat_core::linearder::{linear_derivation_space, LinearDerivation};
use fermat_core::ring::{normal_form, Monomial, RingElem, RingSpec};
use proptest::prelude::*;

pub fn field(k: u32) -> Arc<FieldSpec> {
    FieldSpec::new(k).unwrap()
}

pub fn ring(m: &[u32]) -> Arc<RingSpec> {
    RingSpec::new(m.to_vec(), field(4)).unwrap()
}

pub fn grid() -> Vec<Arc<RingSpec>> {
    [&[2, 2, 2][..], &[3, 3, 3], &[2, 2, 2, 2], &[3, 4, 5]]
        .iter()
        .map(|m| ring(m))
        .collect()
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

pub fn cyclo(f: Arc<FieldSpec>) -> impl Strategy<Value = CycloNum> {
    let deg = f.degree();
    prop::collection::vec(small_rational(), deg).prop_map(move |c| CycloNum::from_coords(&f, c))
}

/// Random element built from arbitrary (not necessarily normal) monomials.
pub fn ring_elem(
    spec: Arc<RingSpec>,
    max_exp: u32,
    max_terms: usize,
) -> impl Strategy<Value = RingElem> {
    let n = spec.n();
    let terms = prop::collection::vec(
        (
            prop::collection::vec(0..=max_exp, n),
            cyclo(spec.field().clone()),
        ),
        0..=max_terms,
    );
    terms.prop_map(move |ts| {
        normal_form(&spec, ts.into_iter().map(|(e, c)| (Monomial::new(e), c))).unwrap()
    })
}

/// Homogeneous element of the given degree, possibly zero.
pub fn homogeneous(spec: Arc<RingSpec>, degree: u32) -> impl Strategy<Value = RingElem> {
    let basis = fermat_core::ring::vk_basis(&spec, degree);
    let len = basis.len();
    prop::collection::vec(cyclo(spec.field().clone()), len)
        .prop_map(move |c| RingElem::from_coordinates(&spec, &basis, &c))
}

/// Random combination of the solved basis of linear derivations.
pub fn linear_derivation(spec: Arc<RingSpec>) -> impl Strategy<Value = LinearDerivation> {
    let basis = linear_derivation_space(&spec);
    let len = basis.len();
    prop::collection::vec(small_rational(), len).prop_map(move |cs| {
        let mut m = Matrix::zeros(spec.field(), spec.n(), spec.n());
        for (b, c) in basis.iter().zip(&cs) {
            m = m
                .checked_add(&b.scale(&CycloNum::from_rational(spec.field(), c.clone())))
                .unwrap();
        }
        LinearDerivation::from_matrix(&spec, m).unwrap()
    })
}

/// Complex value of a field element at ζ = exp(2πi/k).
pub fn complex_value(x: &CycloNum) -> (f64, f64) {
    use num::ToPrimitive;
    let k = f64::from(x.field().conductor());
    x.coords()
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(re, im), (j, c)| {
            let t = std::f64::consts::TAU * j as f64 / k;
            let v = c.to_f64().unwrap();
            (re + v * t.cos(), im + v * t.sin())
        })
}

pub fn close(a: (f64, f64), b: (f64, f64)) -> bool {
    let scale = 1.0 + a.0.abs() + a.1.abs() + b.0.abs() + b.1.abs();
    (a.0 - b.0).abs() < 1e-9 * scale && (a.1 - b.1).abs() < 1e-9 * scale
}
