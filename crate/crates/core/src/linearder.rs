//! Linear derivations `d(x_i) = Σ_j a_ij x_j` and their associated
//! matrices `[a_ij]`.
//!
//! The space of valid matrices is computed by brute force: the n² entries
//! are unknowns and every coefficient of the normal form of
//! `Σ_i m_i x_i^{m_i−1} d(x_i)` must vanish. Classification then checks the
//! known shapes: diagonal `α/m_i` when every `m_i ≥ 3`, scalar plus
//! skew-symmetric when `m = (2, …, 2)`.

use std::sync::Arc;

use thiserror::Error;

use crate::derivation::{linear_form, relation_residue, Derivation, DerivationError};
use crate::exactla::{self, LinalgError, Matrix, Nilpotency};
use crate::field::{CycloNum, Rational};
use crate::ring::{normal_form, Monomial, RingElem, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("not a derivation of the quotient: relation residue {residue}")]
    NotADerivation { residue: RingElem },
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("inconsistent with the classification: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A certified linear derivation together with its associated matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearDerivation {
    matrix: Matrix,
    derivation: Derivation,
}

/// `d = α·I + S` with `S` skew-symmetric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub alpha: CycloNum,
    pub skew: Matrix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// All `m_i ≥ 3`: `a_ii = α/m_i`, off-diagonal entries zero.
    Diagonal { alpha: CycloNum },
    /// `m = (2, …, 2)`.
    ScalarPlusSkew(Decomposition),
    /// Mixed exponents; only the matrix is reported.
    Unclassified { matrix: Matrix },
}

/// Local nilpotency verdict with the quadric cross-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LndReport {
    pub nilpotent: bool,
    pub index: Option<u32>,
    /// For `m = (2, …, 2)`: whether "nilpotent" agrees with "nilpotent and
    /// skew-symmetric" for this matrix. `None` for other rings.
    pub skew_cross_check: Option<bool>,
}

fn images_of(spec: &Arc<RingSpec>, m: &Matrix) -> Vec<RingElem> {
    (0..spec.n()).map(|i| linear_form(spec, m.row(i))).collect()
}

impl LinearDerivation {
    /// Certifies `d(x_i) = Σ_j a_ij x_j`; a failing matrix is reported with
    /// its nonzero relation residue.
    pub fn from_matrix(spec: &Arc<RingSpec>, matrix: Matrix) -> Result<Self, LinearError> {
        let n = spec.n();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(LinearError::Shape(format!(
                "expected a {n}x{n} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if matrix.field().conductor() != spec.field().conductor() {
            return Err(LinearError::Shape(format!(
                "matrix over conductor {} for a ring over conductor {}",
                matrix.field().conductor(),
                spec.field().conductor()
            )));
        }
        let images = images_of(spec, &matrix);
        let residue = relation_residue(spec, &images)?;
        if !residue.is_zero() {
            return Err(LinearError::NotADerivation { residue });
        }
        let derivation = Derivation::new(spec, images)?;
        Ok(Self { matrix, derivation })
    }

    /// `d(x_i) = (α/m_i) x_i`, i.e. `α·ε`. Valid for every ring.
    pub fn diagonal(spec: &Arc<RingSpec>, alpha: &CycloNum) -> Self {
        let mut m = Matrix::zeros(spec.field(), spec.n(), spec.n());
        for i in 0..spec.n() {
            m[(i, i)] = alpha.scale(&Rational::new(1.into(), spec.exponent(i).into()));
        }
        Self::from_matrix(spec, m).expect("alpha times epsilon is a derivation")
    }

    /// `d(x_i) = α x_i`; a derivation only when all `m_i` agree (or α = 0).
    pub fn scalar(spec: &Arc<RingSpec>, alpha: &CycloNum) -> Result<Self, LinearError> {
        Self::from_matrix(spec, Matrix::scalar(spec.field(), spec.n(), alpha))
    }

    pub fn zero(spec: &Arc<RingSpec>) -> Self {
        Self::from_matrix(spec, Matrix::zeros(spec.field(), spec.n(), spec.n()))
            .expect("zero is a derivation")
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        self.derivation.spec()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    pub fn apply(&self, f: &RingElem) -> Result<RingElem, DerivationError> {
        self.derivation.apply(f)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LinearError> {
        Self::from_matrix(self.spec(), self.matrix.checked_add(&other.matrix)?)
    }

    pub fn classify(&self) -> Result<Classification, LinearError> {
        let spec = self.spec();
        if spec.all_exponents_at_least(3) {
            let alpha = self.matrix[(0, 0)].scale(&Rational::from_integer(spec.exponent(0).into()));
            for i in 0..spec.n() {
                for j in 0..spec.n() {
                    let expected = if i == j {
                        alpha.scale(&Rational::new(1.into(), spec.exponent(i).into()))
                    } else {
                        CycloNum::zero(spec.field())
                    };
                    if self.matrix[(i, j)] != expected {
                        return Err(LinearError::Inconsistent(format!(
                            "entry ({}, {}) is {}, expected {expected}",
                            i + 1,
                            j + 1,
                            self.matrix[(i, j)]
                        )));
                    }
                }
            }
            Ok(Classification::Diagonal { alpha })
        } else if spec.is_quadric() {
            Ok(Classification::ScalarPlusSkew(self.decompose()?))
        } else {
            Ok(Classification::Unclassified {
                matrix: self.matrix.clone(),
            })
        }
    }

    /// Unique split into scalar and skew-symmetric parts for `m = (2, …, 2)`.
    pub fn decompose(&self) -> Result<Decomposition, LinearError> {
        let spec = self.spec();
        if !spec.is_quadric() {
            return Err(LinearError::UnsupportedShape(format!(
                "scalar/skew decomposition needs m = (2, ..., 2), got {spec}"
            )));
        }
        let alpha = self.matrix[(0, 0)].clone();
        if let Some(i) = (0..spec.n()).find(|&i| self.matrix[(i, i)] != alpha) {
            return Err(LinearError::Inconsistent(format!(
                "diagonal entry {} differs from the first",
                i + 1
            )));
        }
        let skew = self
            .matrix
            .checked_sub(&Matrix::scalar(spec.field(), spec.n(), &alpha))?;
        if !skew.is_skew_symmetric() {
            return Err(LinearError::Inconsistent(
                "off-diagonal part is not skew-symmetric".into(),
            ));
        }
        Ok(Decomposition { alpha, skew })
    }

    pub fn nilpotency(&self) -> LndReport {
        let Nilpotency { nilpotent, index } =
            exactla::is_nilpotent(&self.matrix).expect("associated matrix is square");
        let skew_cross_check = self.spec().is_quadric().then(|| {
            let skew_and_nilpotent = self.matrix.is_skew_symmetric()
                && self.decompose().is_ok_and(|dec| {
                    dec.alpha.is_zero()
                        && exactla::is_nilpotent(&dec.skew).is_ok_and(|n| n.nilpotent)
                });
            nilpotent == skew_and_nilpotent
        });
        LndReport {
            nilpotent,
            index,
            skew_cross_check,
        }
    }

    /// A linear derivation is locally nilpotent iff its matrix is nilpotent.
    pub fn is_locally_nilpotent(&self) -> bool {
        self.nilpotency().nilpotent
    }
}

/// Certifies `m` and classifies it.
pub fn classify_matrix(spec: &Arc<RingSpec>, m: Matrix) -> Result<Classification, LinearError> {
    LinearDerivation::from_matrix(spec, m)?.classify()
}

/// Basis of the space of associated matrices of linear derivations of the
/// given ring, obtained by solving the relation constraints exactly.
pub fn linear_derivation_space(spec: &Arc<RingSpec>) -> Vec<Matrix> {
    let n = spec.n();
    let field = spec.field();
    // unknown a_ij at column i*n + j contributes m_i x_i^{m_i-1} x_j
    let columns: Vec<RingElem> = (0..n * n)
        .map(|u| {
            let (i, j) = (u / n, u % n);
            let mut e = vec![0; n];
            e[i] = spec.exponent(i) - 1;
            e[j] += 1;
            let c = CycloNum::from_int(field, spec.exponent(i).into());
            normal_form(spec, [(Monomial::new(e), c)]).expect("arity")
        })
        .collect();
    let mut rows: Vec<Monomial> = columns
        .iter()
        .flat_map(|c| c.terms().map(|(m, _)| m.clone()))
        .collect();
    rows.sort();
    rows.dedup();
    let mut system = Matrix::zeros(field, rows.len().max(1), n * n);
    for (col, residue) in columns.iter().enumerate() {
        for (mono, c) in residue.terms() {
            let row = rows.binary_search(mono).expect("row collected above");
            system[(row, col)] = c.clone();
        }
    }
    exactla::nullspace(&system)
        .into_iter()
        .map(|v| {
            let rows = v.chunks(n).map(<[CycloNum]>::to_vec).collect();
            Matrix::from_rows(field, rows).expect("square reshape")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    fn spec(m: &[u32]) -> Arc<RingSpec> {
        RingSpec::new(m.to_vec(), FieldSpec::new(4).unwrap()).unwrap()
    }

    fn q(s: &Arc<RingSpec>, n: i64, d: i64) -> CycloNum {
        CycloNum::from_ratio(s.field(), n, d)
    }

    #[test]
    fn space_dimensions() {
        let s = spec(&[3, 3, 3]);
        let basis = linear_derivation_space(&s);
        assert_eq!(basis.len(), 1);
        let b = &basis[0];
        assert!(b.is_diagonal());
        let scaled = b.scale(&b[(0, 0)].inv().unwrap());
        assert_eq!(scaled, Matrix::identity(s.field(), 3));
        assert_eq!(linear_derivation_space(&spec(&[2, 2, 2])).len(), 4);
        assert_eq!(linear_derivation_space(&spec(&[2, 2, 2, 2])).len(), 7);
    }

    #[test]
    fn classify_diagonal() {
        let s = spec(&[3, 4, 5]);
        let mut m = Matrix::zeros(s.field(), 3, 3);
        m[(0, 0)] = q(&s, 1, 3);
        m[(1, 1)] = q(&s, 1, 4);
        m[(2, 2)] = q(&s, 1, 5);
        assert_eq!(
            classify_matrix(&s, m).unwrap(),
            Classification::Diagonal { alpha: q(&s, 1, 1) }
        );
    }

    #[test]
    fn classify_scalar_plus_skew() {
        let s = spec(&[2, 2, 2]);
        let f = s.field();
        let m = Matrix::from_ints(f, &[&[1, 0, 0], &[0, 1, -1], &[0, 1, 1]]);
        let Classification::ScalarPlusSkew(dec) = classify_matrix(&s, m).unwrap() else {
            panic!("expected scalar plus skew");
        };
        assert!(dec.alpha.is_one());
        assert_eq!(
            dec.skew,
            Matrix::from_ints(f, &[&[0, 0, 0], &[0, 0, -1], &[0, 1, 0]])
        );
    }

    #[test]
    fn off_diagonal_rejected_for_cubics() {
        let s = spec(&[3, 3, 3]);
        let m = Matrix::from_ints(s.field(), &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let err = LinearDerivation::from_matrix(&s, m.clone()).unwrap_err();
        let LinearError::NotADerivation { residue } = err else {
            panic!("expected residue");
        };
        let x1 = RingElem::var(&s, 0);
        let x2 = RingElem::var(&s, 1);
        assert_eq!(residue, (x1.pow(2) * x2).scale(&q(&s, 3, 1)));
        assert!(classify_matrix(&s, m).is_err());
    }

    #[test]
    fn mixed_exponents_are_unclassified() {
        let s = spec(&[2, 3, 3]);
        let zero = LinearDerivation::zero(&s);
        assert!(matches!(
            zero.classify().unwrap(),
            Classification::Unclassified { .. }
        ));
    }

    #[test]
    fn decompositions() {
        let s = spec(&[2, 2, 2]);
        let f = s.field();
        let alpha = CycloNum::imaginary_unit(f).unwrap();
        let scalar = LinearDerivation::scalar(&s, &alpha).unwrap();
        let dec = scalar.decompose().unwrap();
        assert_eq!(dec.alpha, alpha);
        assert!(dec.skew.is_zero());
        let skew = Matrix::from_ints(f, &[&[0, 2, -1], &[-2, 0, 3], &[1, -3, 0]]);
        let dec = LinearDerivation::from_matrix(&s, skew.clone())
            .unwrap()
            .decompose()
            .unwrap();
        assert!(dec.alpha.is_zero());
        assert_eq!(dec.skew, skew);
        let cubic = spec(&[3, 3, 3]);
        assert!(matches!(
            LinearDerivation::zero(&cubic).decompose(),
            Err(LinearError::UnsupportedShape(_))
        ));
    }

    #[test]
    fn local_nilpotency() {
        let cubic = spec(&[3, 3, 3]);
        assert!(LinearDerivation::zero(&cubic).is_locally_nilpotent());
        assert!(!LinearDerivation::diagonal(&cubic, &q(&cubic, 1, 1)).is_locally_nilpotent());

        let s = spec(&[2, 2, 2]);
        let f = s.field();
        let i = CycloNum::imaginary_unit(f).unwrap();
        let z = CycloNum::zero(f);
        let one = CycloNum::one(f);
        let m = Matrix::from_rows(
            f,
            vec![
                vec![z.clone(), z.clone(), -&one],
                vec![z.clone(), z.clone(), -&i],
                vec![one, i, z],
            ],
        )
        .unwrap();
        let d = LinearDerivation::from_matrix(&s, m).unwrap();
        let report = d.nilpotency();
        assert!(report.nilpotent);
        assert_eq!(report.index, Some(3));
        assert_eq!(report.skew_cross_check, Some(true));
    }
}
