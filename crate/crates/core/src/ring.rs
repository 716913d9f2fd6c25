//! Elements of the Fermat ring B_n^m = K[X1..Xn]/(X1^m1 + ⋯ + Xn^mn).
//!
//! Every element is stored in its unique normal form: a polynomial whose
//! degree in the last variable is below `m_n`. Reduction rewrites
//! `x_n^{m_n} → −(x_1^{m_1} + ⋯ + x_{n−1}^{m_{n−1}})` until no monomial
//! exceeds that bound.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{Signed, Zero};
use thiserror::Error;

use crate::field::{CycloNum, FieldError, FieldSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("invalid ring: {0}")]
    InvalidSpec(String),
    #[error("ring mismatch: {left} vs {right}")]
    Mismatch { left: String, right: String },
    #[error("arity mismatch: expected {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Number of variables, the exponent vector `m`, and the coefficient field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingSpec {
    exponents: Vec<u32>,
    field: Arc<FieldSpec>,
}

impl RingSpec {
    pub fn new(exponents: Vec<u32>, field: Arc<FieldSpec>) -> Result<Arc<Self>, RingError> {
        if exponents.len() < 3 {
            return Err(RingError::InvalidSpec(format!(
                "need at least 3 variables, got {}",
                exponents.len()
            )));
        }
        if let Some(m) = exponents.iter().find(|&&m| m < 2) {
            return Err(RingError::InvalidSpec(format!(
                "every exponent must be at least 2, got {m}"
            )));
        }
        Ok(Arc::new(Self { exponents, field }))
    }

    /// `m = (m, …, m)` with `n` variables.
    pub fn uniform(n: usize, m: u32, field: Arc<FieldSpec>) -> Result<Arc<Self>, RingError> {
        Self::new(vec![m; n], field)
    }

    pub fn n(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exponents[i]
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// Common exponent when all `m_i` agree.
    pub fn uniform_exponent(&self) -> Option<u32> {
        let m = self.exponents[0];
        self.exponents.iter().all(|&e| e == m).then_some(m)
    }

    pub fn all_exponents_at_least(&self, bound: u32) -> bool {
        self.exponents.iter().all(|&m| m >= bound)
    }

    /// `m = (2, …, 2)`.
    pub fn is_quadric(&self) -> bool {
        self.uniform_exponent() == Some(2)
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m: Vec<String> = self.exponents.iter().map(u32::to_string).collect();
        write!(
            f,
            "n={};m={};field={}",
            self.n(),
            m.join(","),
            self.field.conductor()
        )
    }
}

fn same_ring(a: &Arc<RingSpec>, b: &Arc<RingSpec>) -> bool {
    Arc::ptr_eq(a, b) || (a.exponents == b.exponents && a.field.conductor() == b.field.conductor())
}

/// Exponent vector of a monomial `x_1^{i_1} ⋯ x_n^{i_n}`, ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn one(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Normal iff the exponent of the last variable is below `m_n`.
    pub fn is_normal(&self, spec: &RingSpec) -> bool {
        self.0
            .last()
            .is_some_and(|&e| e < *spec.exponents.last().unwrap())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate().filter(|(_, e)| **e > 0) {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// An element of B_n^m in normal form.
#[derive(Clone)]
pub struct RingElem {
    spec: Arc<RingSpec>,
    terms: BTreeMap<Monomial, CycloNum>,
}

fn accumulate(map: &mut BTreeMap<Monomial, CycloNum>, mono: Monomial, c: CycloNum) {
    match map.entry(mono) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get() + &c;
            *o.get_mut() = sum;
        }
    }
}

/// Reduces an arbitrary polynomial, given as a list of terms, to its normal
/// form in B_n^m.
pub fn normal_form<I>(spec: &Arc<RingSpec>, terms: I) -> Result<RingElem, RingError>
where
    I: IntoIterator<Item = (Monomial, CycloNum)>,
{
    let n = spec.n();
    let last = n - 1;
    let m_last = spec.exponents[last];
    let mut done: BTreeMap<Monomial, CycloNum> = BTreeMap::new();
    // Keyed by the last exponent so the largest is rewritten first and equal
    // monomials merge before they are expanded.
    let mut pending: BTreeMap<(u32, Monomial), CycloNum> = BTreeMap::new();
    for (mono, c) in terms {
        if mono.0.len() != n {
            return Err(RingError::Arity {
                expected: n,
                got: mono.0.len(),
            });
        }
        if c.field().conductor() != spec.field.conductor() {
            return Err(FieldError::Mismatch {
                left: spec.field.conductor(),
                right: c.field().conductor(),
            }
            .into());
        }
        if mono.0[last] < m_last {
            accumulate(&mut done, mono, c);
        } else {
            let key = (mono.0[last], mono);
            let slot = pending
                .entry(key)
                .or_insert_with(|| CycloNum::zero(&spec.field));
            *slot = &*slot + &c;
        }
    }
    while let Some(((_, mono), c)) = pending.pop_last() {
        if c.is_zero() {
            continue;
        }
        let neg = -&c;
        for j in 0..last {
            let mut e = mono.0.clone();
            e[last] -= m_last;
            e[j] += spec.exponents[j];
            let next = Monomial(e);
            if next.0[last] < m_last {
                accumulate(&mut done, next, neg.clone());
            } else {
                let key = (next.0[last], next);
                let slot = pending
                    .entry(key)
                    .or_insert_with(|| CycloNum::zero(&spec.field));
                *slot = &*slot + &neg;
            }
        }
    }
    done.retain(|_, c| !c.is_zero());
    Ok(RingElem {
        spec: Arc::clone(spec),
        terms: done,
    })
}

/// Normal monomials of total degree `k`, in descending lexicographic order.
/// They form a basis of the homogeneous component V_k.
pub fn vk_basis(spec: &RingSpec, k: u32) -> Vec<Monomial> {
    fn fill(spec: &RingSpec, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        let n = spec.n();
        if prefix.len() == n - 1 {
            if k < spec.exponents[n - 1] {
                let mut e = prefix.clone();
                e.push(k);
                out.push(Monomial(e));
            }
            return;
        }
        for e in (0..=k).rev() {
            prefix.push(e);
            fill(spec, k - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(spec, k, &mut Vec::with_capacity(spec.n()), &mut out);
    out
}

impl RingElem {
    pub fn zero(spec: &Arc<RingSpec>) -> Self {
        Self {
            spec: Arc::clone(spec),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(spec: &Arc<RingSpec>) -> Self {
        Self::constant(spec, CycloNum::one(&spec.field))
    }

    pub fn constant(spec: &Arc<RingSpec>, c: CycloNum) -> Self {
        Self::term(spec, Monomial::one(spec.n()), c)
    }

    /// The variable `x_{i+1}` (zero-based index).
    pub fn var(spec: &Arc<RingSpec>, i: usize) -> Self {
        Self::term(spec, Monomial::var(spec.n(), i), CycloNum::one(&spec.field))
    }

    /// `c · mono`, reduced to normal form.
    pub fn term(spec: &Arc<RingSpec>, mono: Monomial, c: CycloNum) -> Self {
        normal_form(spec, [(mono, c)]).expect("monomial arity matches ring")
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending lexicographic order of monomials.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &CycloNum)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, mono: &Monomial) -> Option<&CycloNum> {
        self.terms.get(mono)
    }

    /// Coefficient of `mono`, zero when absent.
    pub fn coefficient_or_zero(&self, mono: &Monomial) -> CycloNum {
        self.terms
            .get(mono)
            .cloned()
            .unwrap_or_else(|| CycloNum::zero(&self.spec.field))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    fn check(&self, other: &Self) -> Result<(), RingError> {
        if same_ring(&self.spec, &other.spec) {
            Ok(())
        } else {
            Err(RingError::Mismatch {
                left: self.spec.to_string(),
                right: other.spec.to_string(),
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Self {
            spec: Arc::clone(&self.spec),
            terms,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, RingError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let mut raw: BTreeMap<Monomial, CycloNum> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                accumulate(&mut raw, ma.mul(mb), ca * cb);
            }
        }
        normal_form(&self.spec, raw)
    }

    /// Structural equality of normal forms, which is equality in B_n^m.
    pub fn equals(&self, other: &Self) -> Result<bool, RingError> {
        self.check(other)?;
        Ok(self.terms == other.terms)
    }

    pub fn scale(&self, c: &CycloNum) -> Self {
        if c.is_zero() {
            return Self::zero(&self.spec);
        }
        Self {
            spec: Arc::clone(&self.spec),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.spec);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative of the normal representative with respect
    /// to `x_{i+1}`. Lowering an exponent keeps a monomial normal.
    pub fn partial_derivative(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[i] > 0)
            .map(|(m, c)| {
                let mut e = m.0.clone();
                let k = e[i];
                e[i] -= 1;
                (
                    Monomial(e),
                    c.scale(&crate::field::Rational::from_integer(k.into())),
                )
            })
            .collect();
        Self {
            spec: Arc::clone(&self.spec),
            terms,
        }
    }

    /// Splits into homogeneous components by total degree; zero yields an
    /// empty map.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, RingElem> {
        let mut out: BTreeMap<u32, RingElem> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Self::zero(&self.spec))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// The common degree of all terms; `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(Monomial::degree);
        let d = degrees.next()?;
        degrees.all(|e| e == d).then_some(d)
    }

    /// Coordinates against a duplicate-free monomial basis, or `None` if some
    /// term lies outside its span.
    pub fn coordinates(&self, basis: &[Monomial]) -> Option<Vec<CycloNum>> {
        let coords: Vec<CycloNum> = basis.iter().map(|m| self.coefficient_or_zero(m)).collect();
        let found = basis.iter().filter(|m| self.terms.contains_key(m)).count();
        (found == self.terms.len()).then_some(coords)
    }

    /// Inverse of [`RingElem::coordinates`].
    pub fn from_coordinates(spec: &Arc<RingSpec>, basis: &[Monomial], coords: &[CycloNum]) -> Self {
        normal_form(
            spec,
            basis
                .iter()
                .cloned()
                .zip(coords.iter().cloned())
                .filter(|(_, c)| !c.is_zero()),
        )
        .expect("basis monomials match ring arity")
    }
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.spec, &other.spec) && self.terms == other.terms
    }
}

impl Eq for RingElem {}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElem[{}]({self})", self.spec)
    }
}

/// Canonical form: descending lexicographic order, unit coefficients
/// suppressed, e.g. `x1^2*x3 - 2*x2`.
impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (mono, c)) in self.terms.iter().rev().enumerate() {
            let nonzero: Vec<usize> = (0..c.coords().len())
                .filter(|&j| !c.coords()[j].is_zero())
                .collect();
            let (negative, body) = if nonzero.len() == 1 {
                let negative = c.coords()[nonzero[0]].is_negative();
                let abs = if negative { -c } else { c.clone() };
                (
                    negative,
                    if abs.is_one() {
                        None
                    } else {
                        Some(abs.to_string())
                    },
                )
            } else {
                (false, Some(format!("({c})")))
            };
            match (idx, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let is_const = mono.degree() == 0;
            match (body, is_const) {
                (None, true) => f.write_str("1")?,
                (None, false) => write!(f, "{mono}")?,
                (Some(b), true) => f.write_str(&b)?,
                (Some(b), false) => write!(f, "{b}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        RingElem {
            spec: Arc::clone(&self.spec),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        -&self
    }
}

// Operator forms panic on mismatched rings; use `checked_*` to handle it.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&RingElem> for &RingElem {
            type Output = RingElem;
            fn $method(self, rhs: &RingElem) -> RingElem {
                self.$checked(rhs).expect("ring mismatch")
            }
        }
        impl $tr<RingElem> for RingElem {
            type Output = RingElem;
            fn $method(self, rhs: RingElem) -> RingElem {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&RingElem> for RingElem {
            type Output = RingElem;
            fn $method(self, rhs: &RingElem) -> RingElem {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: &[u32]) -> Arc<RingSpec> {
        RingSpec::new(m.to_vec(), FieldSpec::new(4).unwrap()).unwrap()
    }

    fn x(s: &Arc<RingSpec>, i: usize) -> RingElem {
        RingElem::var(s, i)
    }

    fn int(s: &Arc<RingSpec>, v: i64) -> RingElem {
        RingElem::constant(s, CycloNum::from_int(s.field(), v))
    }

    #[test]
    fn spec_validation() {
        let f = FieldSpec::new(4).unwrap();
        assert!(RingSpec::new(vec![2, 2], f.clone()).is_err());
        assert!(RingSpec::new(vec![2, 1, 2], f.clone()).is_err());
        assert_eq!(spec(&[3, 4, 5]).to_string(), "n=3;m=3,4,5;field=4");
    }

    #[test]
    fn relation_reduces_to_zero() {
        let s = spec(&[2, 2, 2]);
        let rel = x(&s, 0).pow(2) + x(&s, 1).pow(2) + x(&s, 2).pow(2);
        assert!(rel.is_zero());
        let x3sq = x(&s, 2).pow(2);
        assert_eq!(x3sq, -(x(&s, 0).pow(2)) - x(&s, 1).pow(2));
        assert_eq!(x3sq.to_string(), "-x1^2 - x2^2");
    }

    #[test]
    fn cube_of_last_variable() {
        let s = spec(&[2, 2, 2]);
        let raw = normal_form(
            &s,
            [(Monomial::new(vec![0, 0, 3]), CycloNum::one(s.field()))],
        )
        .unwrap();
        let expected = -(x(&s, 0).pow(2) * x(&s, 2)) - x(&s, 1).pow(2) * x(&s, 2);
        assert_eq!(raw, expected);
        assert_eq!(raw.to_string(), "-x1^2*x3 - x2^2*x3");
        // multiply back: x3 * x3^2 agrees with the reduced cube
        assert_eq!(x(&s, 2) * x(&s, 2).pow(2), raw);
    }

    #[test]
    fn high_powers_reduce_consistently() {
        let s = spec(&[3, 4, 5]);
        let raw = normal_form(
            &s,
            [(Monomial::new(vec![1, 0, 12]), CycloNum::one(s.field()))],
        )
        .unwrap();
        assert_eq!(raw, x(&s, 0) * x(&s, 2).pow(12));
        assert!(raw.terms().all(|(m, _)| m.is_normal(&s)));
    }

    #[test]
    fn addition_examples() {
        let s = spec(&[2, 2, 2]);
        let f = x(&s, 0) + x(&s, 1);
        assert_eq!(&f + &RingElem::zero(&s), f);
        assert!((&f + &-&f).is_zero());
        assert_eq!(&f + &x(&s, 1), x(&s, 0) + int(&s, 2) * x(&s, 1));
    }

    #[test]
    fn multiplication_examples() {
        let s = spec(&[3, 3, 3]);
        let f = (x(&s, 0) + x(&s, 1)) * (x(&s, 0) - x(&s, 1));
        assert_eq!(f, x(&s, 0).pow(2) - x(&s, 1).pow(2));
        assert_eq!(&f * &RingElem::one(&s), f);
    }

    #[test]
    fn equality_through_reduction() {
        let s = spec(&[2, 2, 2]);
        let lhs = (x(&s, 0) + x(&s, 2)).pow(2);
        let rhs =
            x(&s, 0).pow(2) + int(&s, 2) * x(&s, 0) * x(&s, 2) - x(&s, 0).pow(2) - x(&s, 1).pow(2);
        assert!(lhs.equals(&rhs).unwrap());
        assert!(!x(&s, 0).equals(&x(&s, 1)).unwrap());
        let other = spec(&[3, 3, 3]);
        assert!(matches!(
            x(&s, 0).equals(&x(&other, 0)),
            Err(RingError::Mismatch { .. })
        ));
    }

    #[test]
    fn homogeneous_split() {
        let s = spec(&[2, 2, 2]);
        assert!(RingElem::zero(&s).homogeneous_components().is_empty());
        let f = x(&s, 0) + x(&s, 0) * x(&s, 1);
        let comps = f.homogeneous_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[&1], x(&s, 0));
        assert_eq!(comps[&2], x(&s, 0) * x(&s, 1));
        let g = x(&s, 2).pow(2);
        assert_eq!(g.homogeneous_degree(), Some(2));
    }

    #[test]
    fn vk_bases() {
        let s = spec(&[2, 2, 2]);
        let b1 = vk_basis(&s, 1);
        assert_eq!(
            b1,
            vec![
                Monomial::var(3, 0),
                Monomial::var(3, 1),
                Monomial::var(3, 2)
            ]
        );
        let b2: Vec<String> = vk_basis(&s, 2).iter().map(ToString::to_string).collect();
        assert_eq!(b2, ["x1^2", "x1*x2", "x1*x3", "x2^2", "x2*x3"]);
        assert_eq!(vk_basis(&s, 0), vec![Monomial::one(3)]);
        for k in 1..10 {
            assert_eq!(vk_basis(&s, k).len() as u32, 2 * k + 1);
        }
    }

    #[test]
    fn display_with_field_coefficients() {
        let s = spec(&[2, 2, 2]);
        let f = s.field();
        let i = CycloNum::imaginary_unit(f).unwrap();
        let e = x(&s, 0).scale(&CycloNum::from_ratio(f, 2, 3)) * x(&s, 1) - x(&s, 2).scale(&i);
        assert_eq!(e.to_string(), "2/3*x1*x2 - w*x3");
        let g = x(&s, 0).scale(&(CycloNum::one(f) + i.clone())) + RingElem::constant(&s, -i);
        assert_eq!(g.to_string(), "(1 + w)*x1 - w");
    }
}
