//! Exact arithmetic in the cyclotomic field ℚ(ζ_k).
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^(φ(k)−1)` with
//! rational coordinates. Products are reduced modulo the cyclotomic
//! polynomial Φ_k, and inverses come from the extended Euclidean algorithm
//! over ℚ[X].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

/// Exact rational number in canonical form (positive denominator, reduced).
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("field mismatch: conductor {left} vs conductor {right}")]
    Mismatch { left: u32, right: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("unsupported element: {0}")]
    UnsupportedElement(String),
    #[error("invalid conductor {0}: must be at least 1")]
    InvalidConductor(u32),
}

/// Returns the coefficients of the `k`-th cyclotomic polynomial Φ_k in
/// ascending order of degree.
///
/// Φ_k is obtained by dividing `X^k − 1` by Φ_d for every proper divisor `d`
/// of `k`. Panics if `k == 0`.
pub fn cyclotomic_polynomial(k: u32) -> Vec<BigInt> {
    assert!(k >= 1, "cyclotomic polynomial of index 0 is undefined");
    let mut poly = vec![BigInt::zero(); k as usize + 1];
    poly[0] = -BigInt::one();
    poly[k as usize] = BigInt::one();
    for d in (1..k).filter(|d| k.is_multiple_of(*d)) {
        poly = exact_div_monic(&poly, &cyclotomic_polynomial(d));
    }
    poly
}

/// Divides `num` by the monic integer polynomial `den`, asserting the
/// remainder vanishes.
fn exact_div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dd = den.len() - 1;
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); num.len() - dd];
    for t in (dd..num.len()).rev() {
        let c = rem[t].clone();
        if c.is_zero() {
            continue;
        }
        quot[t - dd] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            rem[t - dd + j] -= &c * dj;
        }
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

fn euler_phi(k: u32) -> usize {
    (1..=k).filter(|&j| num::integer::gcd(j, k) == 1).count()
}

/// The field ℚ(ζ_k), identified by its conductor `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    conductor: u32,
    minimal_polynomial: Vec<BigInt>,
    degree: usize,
}

impl FieldSpec {
    pub fn new(conductor: u32) -> Result<Arc<Self>, FieldError> {
        if conductor == 0 {
            return Err(FieldError::InvalidConductor(conductor));
        }
        let minimal_polynomial = cyclotomic_polynomial(conductor);
        let degree = minimal_polynomial.len() - 1;
        debug_assert_eq!(degree, euler_phi(conductor));
        Ok(Arc::new(Self {
            conductor,
            minimal_polynomial,
            degree,
        }))
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Φ_k, ascending coefficients; monic of degree φ(k).
    pub fn minimal_polynomial(&self) -> &[BigInt] {
        &self.minimal_polynomial
    }

    /// The extension degree φ(k).
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Reduces a coefficient vector of arbitrary length modulo Φ_k.
    fn reduce(&self, mut coeffs: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree;
        for t in (d..coeffs.len()).rev() {
            let c = std::mem::replace(&mut coeffs[t], Rational::zero());
            if c.is_zero() {
                continue;
            }
            for (j, pj) in self.minimal_polynomial[..d].iter().enumerate() {
                if !pj.is_zero() {
                    coeffs[t - d + j] -= &c * Rational::from_integer(pj.clone());
                }
            }
        }
        coeffs.resize(d, Rational::zero());
        coeffs
    }
}

fn same_field(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || a.conductor == b.conductor
}

/// An element of ℚ(ζ_k) in power-basis coordinates.
#[derive(Clone)]
pub struct CycloNum {
    field: Arc<FieldSpec>,
    coords: Vec<Rational>,
}

impl CycloNum {
    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        Self {
            field: Arc::clone(field),
            coords: vec![Rational::zero(); field.degree],
        }
    }

    pub fn one(field: &Arc<FieldSpec>) -> Self {
        Self::from_rational(field, Rational::one())
    }

    pub fn from_rational(field: &Arc<FieldSpec>, value: Rational) -> Self {
        let mut z = Self::zero(field);
        z.coords[0] = value;
        z
    }

    pub fn from_int(field: &Arc<FieldSpec>, value: i64) -> Self {
        Self::from_rational(field, Rational::from_integer(value.into()))
    }

    /// `numer/denom`; panics on a zero denominator.
    pub fn from_ratio(field: &Arc<FieldSpec>, numer: i64, denom: i64) -> Self {
        Self::from_rational(field, Rational::new(numer.into(), denom.into()))
    }

    /// Builds an element from power-basis coordinates, reducing modulo Φ_k
    /// when more than φ(k) coordinates are given.
    pub fn from_coords(field: &Arc<FieldSpec>, coords: Vec<Rational>) -> Self {
        let coords = if coords.len() >= field.degree {
            field.reduce(coords)
        } else {
            let mut c = coords;
            c.resize(field.degree, Rational::zero());
            c
        };
        Self {
            field: Arc::clone(field),
            coords,
        }
    }

    /// The generator ζ_k.
    pub fn zeta(field: &Arc<FieldSpec>) -> Self {
        Self::zeta_pow(field, 1)
    }

    /// ζ_k^e for any integer exponent `e`.
    pub fn zeta_pow(field: &Arc<FieldSpec>, e: i64) -> Self {
        let k = i64::from(field.conductor);
        let e = e.rem_euclid(k) as usize;
        let mut coords = vec![Rational::zero(); e.max(field.degree) + 1];
        coords[e] = Rational::one();
        Self::from_coords(field, coords)
    }

    /// The element ζ^(k/4), a square root of −1. Requires `4 | k`.
    pub fn imaginary_unit(field: &Arc<FieldSpec>) -> Result<Self, FieldError> {
        if !field.conductor.is_multiple_of(4) {
            return Err(FieldError::UnsupportedElement(format!(
                "i is not in Q(zeta_{}): conductor must be divisible by 4",
                field.conductor
            )));
        }
        Ok(Self::zeta_pow(field, i64::from(field.conductor / 4)))
    }

    /// A primitive `order`-th root of unity ζ^(k/order). Requires `order | k`.
    pub fn root_of_unity(field: &Arc<FieldSpec>, order: u32) -> Result<Self, FieldError> {
        if order == 0 || !field.conductor.is_multiple_of(order) {
            return Err(FieldError::UnsupportedElement(format!(
                "no primitive {order}-th root of unity in Q(zeta_{})",
                field.conductor
            )));
        }
        Ok(Self::zeta_pow(field, i64::from(field.conductor / order)))
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(Zero::is_zero)
    }

    /// Returns the value as a rational if it lies in ℚ.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coords[1..]
            .iter()
            .all(Zero::is_zero)
            .then(|| &self.coords[0])
    }

    fn check(&self, other: &Self) -> Result<(), FieldError> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(FieldError::Mismatch {
                left: self.field.conductor,
                right: other.field.conductor,
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            field: Arc::clone(&self.field),
            coords,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            field: Arc::clone(&self.field),
            coords,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        let d = self.field.degree;
        if d == 1 {
            return Ok(Self {
                field: Arc::clone(&self.field),
                coords: vec![&self.coords[0] * &other.coords[0]],
            });
        }
        let mut prod = vec![Rational::zero(); 2 * d - 1];
        for (i, a) in self.coords.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
            for (j, b) in other
                .coords
                .iter()
                .enumerate()
                .filter(|(_, b)| !b.is_zero())
            {
                prod[i + j] += a * b;
            }
        }
        Ok(Self {
            field: Arc::clone(&self.field),
            coords: self.field.reduce(prod),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.check(other)?;
        self.checked_mul(&other.inv()?)
    }

    /// Multiplies every coordinate by a rational.
    pub fn scale(&self, r: &Rational) -> Self {
        Self {
            field: Arc::clone(&self.field),
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on the
    /// coordinate polynomial and Φ_k.
    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(&self.field, r.recip()));
        }
        let modulus: Vec<Rational> = self
            .field
            .minimal_polynomial
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect();
        let mut r0 = modulus;
        let mut r1 = trim(self.coords.clone());
        let mut s0: Vec<Rational> = Vec::new();
        let mut s1: Vec<Rational> = vec![Rational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // Φ_k is irreducible, so the gcd is a nonzero constant.
        debug_assert_eq!(r0.len(), 1);
        let scale = r0[0].recip();
        let coords = s0.into_iter().map(|c| c * &scale).collect();
        Ok(Self::from_coords(&self.field, coords))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

/// Division with remainder in ℚ[X]; `den` must be nonzero and trimmed.
fn poly_divrem(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut rem = trim(num.to_vec());
    if rem.len() < den.len() {
        return (Vec::new(), rem);
    }
    let lead_inv = den.last().expect("nonzero divisor").recip();
    let mut quot = vec![Rational::zero(); rem.len() - den.len() + 1];
    while rem.len() >= den.len() {
        let shift = rem.len() - den.len();
        let c = rem.last().unwrap() * &lead_inv;
        for (j, dj) in den.iter().enumerate() {
            rem[shift + j] -= &c * dj;
        }
        quot[shift] = c;
        rem = trim(rem);
    }
    (trim(quot), rem)
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.coords == other.coords
    }
}

impl Eq for CycloNum {}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloNum[k={}]({})", self.field.conductor, self)
    }
}

/// Canonical form: ascending powers of `w`, zero terms omitted, e.g.
/// `1/2 - 1/2*w`.
impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.is_negative();
            if first {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            first = false;
            let abs = c.abs();
            match j {
                0 => write!(f, "{abs}")?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{abs}*")?;
                    }
                    f.write_str("w")?;
                    if j > 1 {
                        write!(f, "^{j}")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum {
            field: Arc::clone(&self.field),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

// Operator forms panic on mismatched fields; the `checked_*` methods report it.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&CycloNum> for &CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: &CycloNum) -> CycloNum {
                self.$checked(rhs).expect("cyclotomic field mismatch")
            }
        }
        impl $tr<CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: CycloNum) -> CycloNum {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $method(self, rhs: &CycloNum) -> CycloNum {
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

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        for k in 1..=30 {
            assert_eq!(cyclotomic_polynomial(k).len() - 1, euler_phi(k), "k={k}");
        }
    }

    #[test]
    fn gaussian_arithmetic() {
        let f = FieldSpec::new(4).unwrap();
        let i = CycloNum::imaginary_unit(&f).unwrap();
        assert_eq!(&i * &i, CycloNum::from_int(&f, -1));
        let one = CycloNum::one(&f);
        assert_eq!(&i * &one, i);
        let a = &one + &i;
        let b = &one - &i;
        assert_eq!(&a * &b, CycloNum::from_int(&f, 2));
        assert_eq!(i.inv().unwrap(), -&i);
        assert_eq!(one.inv().unwrap(), one);
        let expected = (&one - &i).scale(&Rational::new(1.into(), 2.into()));
        assert_eq!(a.inv().unwrap(), expected);
        assert_eq!(expected.to_string(), "1/2 - 1/2*w");
    }

    #[test]
    fn imaginary_unit_per_conductor() {
        let f12 = FieldSpec::new(12).unwrap();
        let i = CycloNum::imaginary_unit(&f12).unwrap();
        assert_eq!(i, CycloNum::zeta_pow(&f12, 3));
        assert_eq!(i.pow(2), CycloNum::from_int(&f12, -1));
        let f6 = FieldSpec::new(6).unwrap();
        assert!(matches!(
            CycloNum::imaginary_unit(&f6),
            Err(FieldError::UnsupportedElement(_))
        ));
    }

    #[test]
    fn zero_has_no_inverse() {
        let f = FieldSpec::new(4).unwrap();
        assert_eq!(CycloNum::zero(&f).inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let a = CycloNum::one(&FieldSpec::new(4).unwrap());
        let b = CycloNum::one(&FieldSpec::new(3).unwrap());
        assert_eq!(
            a.checked_mul(&b),
            Err(FieldError::Mismatch { left: 4, right: 3 })
        );
        assert!(a.checked_add(&b).is_err());
    }

    #[test]
    fn zeta_is_primitive() {
        for k in [1u32, 2, 3, 4, 5, 6, 12, 20] {
            let f = FieldSpec::new(k).unwrap();
            let z = CycloNum::zeta(&f);
            assert!(z.pow(u64::from(k)).is_one(), "k={k}");
            for d in 1..k {
                assert!(!z.pow(u64::from(d)).is_one(), "k={k} d={d}");
            }
        }
    }

    #[test]
    fn display_forms() {
        let f = FieldSpec::new(12).unwrap();
        let z = CycloNum::zeta(&f);
        let x =
            CycloNum::from_ratio(&f, -2, 3) + z.pow(2).scale(&Rational::new(2.into(), 3.into()));
        assert_eq!(x.to_string(), "-2/3 + 2/3*w^2");
        assert_eq!((-z).to_string(), "-w");
        assert_eq!(CycloNum::zero(&f).to_string(), "0");
    }
}
