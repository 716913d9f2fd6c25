//! Derivations of B_n^m given by the images of the generators `x_i`.
//!
//! A tuple of images `(d(x_1), …, d(x_n))` defines a derivation of the
//! quotient exactly when it kills the defining relation, that is when
//! `Σ m_i x_i^{m_i−1} d(x_i)` has normal form zero.

use std::sync::Arc;

use thiserror::Error;

use crate::exactla::{self, Matrix};
use crate::field::{CycloNum, Rational};
use crate::ring::{normal_form, Monomial, RingElem, RingError, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("expected {expected} images, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("not a derivation of the quotient: relation residue {residue}")]
    NotADerivation { residue: RingElem },
    #[error("derivation must be certified before it can be applied")]
    CertificationRequired,
    #[error("index error: {0}")]
    Index(String),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// `Σ_i m_i x_i^{m_i−1} · images[i]` in normal form. Zero iff the images
/// define a derivation of B_n^m.
pub fn relation_residue(
    spec: &Arc<RingSpec>,
    images: &[RingElem],
) -> Result<RingElem, DerivationError> {
    if images.len() != spec.n() {
        return Err(DerivationError::Arity {
            expected: spec.n(),
            got: images.len(),
        });
    }
    let mut acc = RingElem::zero(spec);
    for (i, image) in images.iter().enumerate() {
        acc = acc.checked_add(&relation_gradient(spec, i).checked_mul(image)?)?;
    }
    Ok(acc)
}

/// `∂F/∂x_i = m_i x_i^{m_i−1}`.
fn relation_gradient(spec: &Arc<RingSpec>, i: usize) -> RingElem {
    let m = spec.exponent(i);
    let mut e = vec![0; spec.n()];
    e[i] = m - 1;
    RingElem::term(
        spec,
        Monomial::new(e),
        CycloNum::from_int(spec.field(), m.into()),
    )
}

pub fn is_well_defined(spec: &Arc<RingSpec>, images: &[RingElem]) -> Result<bool, DerivationError> {
    Ok(relation_residue(spec, images)?.is_zero())
}

/// A derivation of B_n^m. Application is only available once the images
/// have been certified to kill the relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    spec: Arc<RingSpec>,
    images: Vec<RingElem>,
    certified: bool,
}

impl Derivation {
    /// Wraps images without checking them.
    pub fn uncertified(
        spec: &Arc<RingSpec>,
        images: Vec<RingElem>,
    ) -> Result<Self, DerivationError> {
        if images.len() != spec.n() {
            return Err(DerivationError::Arity {
                expected: spec.n(),
                got: images.len(),
            });
        }
        Ok(Self {
            spec: Arc::clone(spec),
            images,
            certified: false,
        })
    }

    /// Builds and certifies; fails with the nonzero residue otherwise.
    pub fn new(spec: &Arc<RingSpec>, images: Vec<RingElem>) -> Result<Self, DerivationError> {
        Self::uncertified(spec, images)?.certify()
    }

    pub fn certify(mut self) -> Result<Self, DerivationError> {
        let residue = relation_residue(&self.spec, &self.images)?;
        if !residue.is_zero() {
            return Err(DerivationError::NotADerivation { residue });
        }
        self.certified = true;
        Ok(self)
    }

    pub fn zero(spec: &Arc<RingSpec>) -> Self {
        Self {
            spec: Arc::clone(spec),
            images: vec![RingElem::zero(spec); spec.n()],
            certified: true,
        }
    }

    pub fn spec(&self) -> &Arc<RingSpec> {
        &self.spec
    }

    pub fn images(&self) -> &[RingElem] {
        &self.images
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// `Σ_i ∂f/∂x_i · d(x_i)` on the normal representative of `f`.
    pub fn apply(&self, f: &RingElem) -> Result<RingElem, DerivationError> {
        if !self.certified {
            return Err(DerivationError::CertificationRequired);
        }
        let mut acc = RingElem::zero(&self.spec);
        for (i, image) in self.images.iter().enumerate() {
            if image.is_zero() {
                continue;
            }
            let partial = f.partial_derivative(i);
            if !partial.is_zero() {
                acc = acc.checked_add(&partial.checked_mul(image)?)?;
            }
        }
        Ok(acc)
    }

    /// `d^s(f)`.
    pub fn compose_power(&self, s: u32, f: &RingElem) -> Result<RingElem, DerivationError> {
        let mut cur = f.clone();
        for _ in 0..s {
            if cur.is_zero() {
                break;
            }
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    /// Pointwise sum of two derivations.
    pub fn checked_add(&self, other: &Self) -> Result<Self, DerivationError> {
        let images = self
            .images
            .iter()
            .zip(&other.images)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            spec: Arc::clone(&self.spec),
            images,
            certified: self.certified && other.certified,
        })
    }

    /// `c · d`.
    pub fn scale(&self, c: &CycloNum) -> Self {
        Self {
            spec: Arc::clone(&self.spec),
            images: self.images.iter().map(|g| g.scale(c)).collect(),
            certified: self.certified,
        }
    }
}

/// `d_ij = m_i x_i^{m_i−1} ∂/∂x_j − m_j x_j^{m_j−1} ∂/∂x_i`, zero-based
/// indices with `i < j`.
pub fn generator_dij(
    spec: &Arc<RingSpec>,
    i: usize,
    j: usize,
) -> Result<Derivation, DerivationError> {
    if i >= j || j >= spec.n() {
        return Err(DerivationError::Index(format!(
            "need 0 <= i < j < {}, got i={i}, j={j}",
            spec.n()
        )));
    }
    let mut images = vec![RingElem::zero(spec); spec.n()];
    images[i] = -relation_gradient(spec, j);
    images[j] = relation_gradient(spec, i);
    Derivation::new(spec, images)
}

/// `ε = Σ (1/m_i) x_i ∂/∂x_i`, the derivation induced by the Euler-type
/// operator that maps the relation to itself.
pub fn generator_epsilon(spec: &Arc<RingSpec>) -> Derivation {
    let images = (0..spec.n())
        .map(|i| {
            let c = CycloNum::from_rational(
                spec.field(),
                Rational::new(1.into(), spec.exponent(i).into()),
            );
            RingElem::var(spec, i).scale(&c)
        })
        .collect();
    Derivation::new(spec, images).expect("epsilon kills the relation")
}

/// Monomials in the first `vars` variables of total degree at most `bound`.
fn monomials_in_prefix(n: usize, vars: usize, bound: u32) -> Vec<Monomial> {
    fn fill(n: usize, vars: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if prefix.len() == vars {
            let mut e = prefix.clone();
            e.resize(n, 0);
            out.push(Monomial::new(e));
            return;
        }
        for k in 0..=budget {
            prefix.push(k);
            fill(n, vars, budget - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(n, vars, bound, &mut Vec::new(), &mut out);
    out
}

/// Dimension of the space of triangular derivations: `d(x_1)` constant and
/// `d(x_i)` a polynomial in `x_1, …, x_{i−1}` of degree at most
/// `degree_bound`, all satisfying the relation condition.
pub fn triangular_solution_dimension(spec: &Arc<RingSpec>, degree_bound: u32) -> usize {
    let n = spec.n();
    // unknown = (image index, monomial); x_1 gets only the constant monomial
    let mut unknowns: Vec<(usize, Monomial)> = vec![(0, Monomial::one(n))];
    for i in 1..n {
        unknowns.extend(
            monomials_in_prefix(n, i, degree_bound)
                .into_iter()
                .map(|m| (i, m)),
        );
    }
    let columns: Vec<RingElem> = unknowns
        .iter()
        .map(|(i, mono)| {
            let image = RingElem::term(spec, mono.clone(), CycloNum::one(spec.field()));
            relation_gradient(spec, *i) * image
        })
        .collect();
    let mut rows: Vec<Monomial> = columns
        .iter()
        .flat_map(|c| c.terms().map(|(m, _)| m.clone()))
        .collect();
    rows.sort();
    rows.dedup();
    let mut system = Matrix::zeros(spec.field(), rows.len().max(1), unknowns.len());
    for (col, residue) in columns.iter().enumerate() {
        for (mono, c) in residue.terms() {
            let row = rows.binary_search(mono).expect("row collected above");
            system[(row, col)] = c.clone();
        }
    }
    exactla::nullspace(&system).len()
}

/// Bounded check that the only triangular derivation is zero.
pub fn verify_triangular_vanishing(spec: &Arc<RingSpec>, degree_bound: u32) -> bool {
    triangular_solution_dimension(spec, degree_bound) == 0
}

/// Builds the raw polynomial `Σ_j a_j x_j` without reduction concerns.
pub(crate) fn linear_form(spec: &Arc<RingSpec>, coeffs: &[CycloNum]) -> RingElem {
    normal_form(
        spec,
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (Monomial::var(spec.n(), j), c.clone())),
    )
    .expect("linear form arity")
}
