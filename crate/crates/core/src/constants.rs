//! Rings of constants and Darboux elements of linear derivations.
//!
//! A linear derivation maps each homogeneous component V_k into itself, so
//! its kernel splits degree by degree: `ker(d) ∩ V_k` is the nullspace of
//! the finite matrix `[d|V_k]`. Everything here works on that finite
//! restriction and certifies results only up to an explicit degree bound.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::derivation::{linear_form, Derivation, DerivationError};
use crate::exactla::{self, modular, LinalgError, Matrix};
use crate::field::{CycloNum, FieldError, FieldSpec, Rational};
use crate::linearder::{LinearDerivation, LinearError};
use crate::ring::{normal_form, vk_basis, Monomial, RingElem, RingError, RingSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstantsError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("derivation does not preserve V_{0}")]
    NotInvariant(u32),
    #[error("eigenvalue check failed: {0}")]
    NotAnEigenvector(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
}

/// The matrix of a derivation restricted to V_k. Column `j` holds the
/// coordinates of `d(basis[j])`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VkMatrix {
    pub degree: u32,
    pub basis: Vec<Monomial>,
    pub matrix: Matrix,
}

/// Restricts any derivation to V_k, failing if some image leaves V_k.
pub fn restrict_derivation_to_vk(d: &Derivation, k: u32) -> Result<VkMatrix, ConstantsError> {
    let spec = d.spec();
    let basis = vk_basis(spec, k);
    let mut matrix = Matrix::zeros(spec.field(), basis.len(), basis.len());
    for (j, mono) in basis.iter().enumerate() {
        let image = d.apply(&RingElem::term(
            spec,
            mono.clone(),
            CycloNum::one(spec.field()),
        ))?;
        let coords = image
            .coordinates(&basis)
            .ok_or(ConstantsError::NotInvariant(k))?;
        for (i, c) in coords.into_iter().enumerate() {
            matrix[(i, j)] = c;
        }
    }
    Ok(VkMatrix {
        degree: k,
        basis,
        matrix,
    })
}

pub fn restrict_to_vk(d: &LinearDerivation, k: u32) -> VkMatrix {
    restrict_derivation_to_vk(d.derivation(), k).expect("linear derivations preserve V_k")
}

/// Action of the linear derivation `x_i ↦ Σ_j a_ij x_j` on the degree-`k`
/// forms of the free polynomial ring in `a.rows()` variables, in the basis of
/// monomials ordered descending lexicographically (`y^k, y^{k−1}z, …, z^k`
/// for two variables).
pub fn free_forms_action(a: &Matrix, k: u32) -> Result<Matrix, ConstantsError> {
    if !a.is_square() || a.rows() == 0 {
        return Err(ConstantsError::Shape(format!(
            "need a nonempty square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let r = a.rows();
    let mut basis = Vec::new();
    compositions(r, k, &mut Vec::new(), &mut basis);
    let index: BTreeMap<&[u32], usize> = basis
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_slice(), i))
        .collect();
    let field = a.field();
    let mut out = Matrix::zeros(field, basis.len(), basis.len());
    for (col, e) in basis.iter().enumerate() {
        // d(x^e) = Σ_i e_i x^{e - e_i} Σ_j a_ij x_j
        for i in (0..r).filter(|&i| e[i] > 0) {
            for j in 0..r {
                let a_ij = &a[(i, j)];
                if a_ij.is_zero() {
                    continue;
                }
                let mut t = e.clone();
                t[i] -= 1;
                t[j] += 1;
                let row = index[t.as_slice()];
                out[(row, col)] =
                    &out[(row, col)] + &a_ij.scale(&Rational::from_integer(e[i].into()));
            }
        }
    }
    Ok(out)
}

fn compositions(parts: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == parts {
        let mut e = prefix.clone();
        e.push(k);
        out.push(e);
        return;
    }
    for first in (0..=k).rev() {
        prefix.push(first);
        compositions(parts, k - first, prefix, out);
        prefix.pop();
    }
}

/// Degreewise kernel of a linear derivation, truncated at `max_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelReport {
    pub max_degree: u32,
    /// Basis of `ker(d) ∩ V_k` for `k = 1..=max_degree`.
    pub per_degree: BTreeMap<u32, Vec<RingElem>>,
    /// No nonconstant constant of degree at most `max_degree`.
    pub trivial: bool,
}

impl KernelReport {
    pub fn first_nontrivial_degree(&self) -> Option<u32> {
        self.per_degree
            .iter()
            .find(|(_, basis)| !basis.is_empty())
            .map(|(&k, _)| k)
    }
}

/// Basis of `ker(d) ∩ V_k`.
pub fn kernel_in_degree(d: &LinearDerivation, k: u32) -> Vec<RingElem> {
    let vk = restrict_to_vk(d, k);
    if modular::certifies_full_column_rank(&vk.matrix) {
        return Vec::new();
    }
    exactla::nullspace(&vk.matrix)
        .iter()
        .map(|v| RingElem::from_coordinates(d.spec(), &vk.basis, v))
        .collect()
}

pub fn kernel_up_to_degree(
    d: &LinearDerivation,
    max_degree: u32,
) -> Result<KernelReport, ConstantsError> {
    if max_degree < 1 {
        return Err(ConstantsError::Precondition(
            "maximum degree must be at least 1".into(),
        ));
    }
    let per_degree: BTreeMap<u32, Vec<RingElem>> = (1..=max_degree)
        .map(|k| (k, kernel_in_degree(d, k)))
        .collect();
    let trivial = per_degree.values().all(Vec::is_empty);
    Ok(KernelReport {
        max_degree,
        per_degree,
        trivial,
    })
}

/// `α · Σ_k i_k/m_k`, the eigenvalue of a monomial under `d(x_i) = (α/m_i) x_i`.
pub fn darboux_eigenvalue(spec: &RingSpec, alpha: &CycloNum, mono: &Monomial) -> CycloNum {
    let weight = mono
        .exponents()
        .iter()
        .zip(spec.exponents())
        .fold(Rational::from_integer(0.into()), |acc, (&i, &m)| {
            acc + Rational::new(i.into(), m.into())
        });
    alpha.scale(&weight)
}

/// A verified pair `d(b) = λ·b` with `b` nonzero and not invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DarbouxCertificate {
    element: RingElem,
    eigenvalue: CycloNum,
}

impl DarbouxCertificate {
    pub fn new(
        d: &Derivation,
        element: RingElem,
        eigenvalue: CycloNum,
    ) -> Result<Self, ConstantsError> {
        if element.is_zero() {
            return Err(ConstantsError::Precondition(
                "Darboux elements are nonzero".into(),
            ));
        }
        // nonzero constants are the units; anything with a positive-degree
        // term is not invertible
        if element.is_constant() {
            return Err(ConstantsError::Precondition(
                "Darboux elements are not invertible".into(),
            ));
        }
        let cert = Self {
            element,
            eigenvalue,
        };
        if !cert.verify(d)? {
            return Err(ConstantsError::NotAnEigenvector(format!(
                "d({}) != ({}) * ({})",
                cert.element, cert.eigenvalue, cert.element
            )));
        }
        Ok(cert)
    }

    /// Re-checks `d(b) = λ·b` by direct application.
    pub fn verify(&self, d: &Derivation) -> Result<bool, ConstantsError> {
        Ok(d.apply(&self.element)? == self.element.scale(&self.eigenvalue))
    }

    pub fn element(&self) -> &RingElem {
        &self.element
    }

    pub fn eigenvalue(&self) -> &CycloNum {
        &self.eigenvalue
    }
}

/// Certificate for `c·x^i` under the diagonal derivation `α·ε`.
pub fn monomial_certificate(
    spec: &Arc<RingSpec>,
    alpha: &CycloNum,
    mono: &Monomial,
) -> Result<DarbouxCertificate, ConstantsError> {
    if !mono.is_normal(spec) || mono.exponents().len() != spec.n() {
        return Err(ConstantsError::Shape(format!(
            "{mono} is not a normal monomial"
        )));
    }
    let d = LinearDerivation::diagonal(spec, alpha);
    let element = RingElem::term(spec, mono.clone(), CycloNum::one(spec.field()));
    DarbouxCertificate::new(
        d.derivation(),
        element,
        darboux_eigenvalue(spec, alpha, mono),
    )
}

/// For uniform `m`, every homogeneous `f` of degree `k` satisfies
/// `d(f) = (α k / m) f` under `d(x_i) = (α/m) x_i`. Returns that eigenvalue
/// after checking it by direct application; constants give 0.
pub fn homogeneous_eigenvalue(
    spec: &Arc<RingSpec>,
    alpha: &CycloNum,
    f: &RingElem,
) -> Result<CycloNum, ConstantsError> {
    let m = spec.uniform_exponent().ok_or_else(|| {
        ConstantsError::UnsupportedShape(format!("exponents must agree, got {spec}"))
    })?;
    let k = f.homogeneous_degree().ok_or_else(|| {
        ConstantsError::Shape(format!("{f} is not a nonzero homogeneous element"))
    })?;
    let lambda = alpha.scale(&Rational::new(k.into(), m.into()));
    let d = LinearDerivation::diagonal(spec, alpha);
    if d.apply(f)? != f.scale(&lambda) {
        return Err(ConstantsError::NotAnEigenvector(format!("{f}")));
    }
    Ok(lambda)
}

/// [`homogeneous_eigenvalue`] packaged as a certificate; fails on constants.
pub fn homogeneous_certificate(
    spec: &Arc<RingSpec>,
    alpha: &CycloNum,
    f: &RingElem,
) -> Result<DarbouxCertificate, ConstantsError> {
    let lambda = homogeneous_eigenvalue(spec, alpha, f)?;
    let d = LinearDerivation::diagonal(spec, alpha);
    DarbouxCertificate::new(d.derivation(), f.clone(), lambda)
}

/// The parameter α of a derivation of the form `d(x_i) = (α/m_i) x_i`.
pub fn diagonal_parameter(d: &LinearDerivation) -> Option<CycloNum> {
    let spec = d.spec();
    let alpha = d.matrix()[(0, 0)].scale(&Rational::from_integer(spec.exponent(0).into()));
    (LinearDerivation::diagonal(spec, &alpha).matrix() == d.matrix()).then_some(alpha)
}

/// Whether every monomial in the support of `f` has eigenvalue `lambda`
/// under the diagonal derivation `d`.
pub fn eigenvalue_uniqueness_check(
    d: &LinearDerivation,
    f: &RingElem,
    lambda: &CycloNum,
) -> Result<bool, ConstantsError> {
    let alpha = diagonal_parameter(d).ok_or_else(|| {
        ConstantsError::UnsupportedShape("derivation is not of the form (alpha/m_i) x_i".into())
    })?;
    if f.is_zero() {
        return Err(ConstantsError::Precondition(
            "Darboux elements are nonzero".into(),
        ));
    }
    Ok(f.terms()
        .all(|(mono, _)| darboux_eigenvalue(d.spec(), &alpha, mono) == *lambda))
}

fn require_skew(d_s: &LinearDerivation) -> Result<(), ConstantsError> {
    if !d_s.spec().is_quadric() {
        return Err(ConstantsError::UnsupportedShape(format!(
            "needs m = (2, ..., 2), got {}",
            d_s.spec()
        )));
    }
    if !d_s.matrix().is_skew_symmetric() {
        return Err(ConstantsError::Shape("matrix is not skew-symmetric".into()));
    }
    Ok(())
}

/// `d_s(f) = (λ − kα) f` for homogeneous `f` of degree `k`; this is
/// equivalent to `(d_α + d_s)(f) = λ f`.
pub fn shifted_eigen_check(
    d_s: &LinearDerivation,
    alpha: &CycloNum,
    f: &RingElem,
    lambda: &CycloNum,
) -> Result<bool, ConstantsError> {
    require_skew(d_s)?;
    let k = f.homogeneous_degree().ok_or_else(|| {
        ConstantsError::Shape(format!("{f} is not a nonzero homogeneous element"))
    })?;
    let shift = lambda - &alpha.scale(&Rational::from_integer(k.into()));
    Ok(d_s.apply(f)? == f.scale(&shift))
}

/// First degree `k ≤ max_degree` at which `−kα` is an eigenvalue of
/// `d_s|V_k`, decided by `det([d_s|V_k] + kα·I) = 0`.
pub fn alpha_rejection_degree(
    d_s: &LinearDerivation,
    max_degree: u32,
    alpha: &CycloNum,
) -> Result<Option<u32>, ConstantsError> {
    require_skew(d_s)?;
    if max_degree < 1 {
        return Err(ConstantsError::Precondition(
            "maximum degree must be at least 1".into(),
        ));
    }
    for k in 1..=max_degree {
        let vk = restrict_to_vk(d_s, k);
        let shift = alpha.scale(&Rational::from_integer(k.into()));
        let shifted =
            vk.matrix
                .checked_add(&Matrix::scalar(d_s.spec().field(), vk.basis.len(), &shift))?;
        if exactla::det(&shifted)?.is_zero() {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

/// First candidate α for which `d_α + d_s` has no nonconstant constants of
/// degree at most `max_degree`.
pub fn find_alpha(
    d_s: &LinearDerivation,
    max_degree: u32,
    candidates: &[CycloNum],
) -> Result<Option<CycloNum>, ConstantsError> {
    for alpha in candidates {
        if alpha_rejection_degree(d_s, max_degree, alpha)?.is_none() {
            return Ok(Some(alpha.clone()));
        }
    }
    Ok(None)
}

/// Smallest conductor holding the constants of the odd (`n` odd) or even
/// nilpotent family.
pub fn family_conductor(n: usize) -> u32 {
    if n % 2 == 1 {
        4
    } else {
        num::integer::lcm(4, n as u32 - 1)
    }
}

fn border_matrix(field: &Arc<FieldSpec>, column: &[CycloNum]) -> Matrix {
    let n = column.len() + 1;
    let mut m = Matrix::zeros(field, n, n);
    for (r, c) in column.iter().enumerate() {
        m[(r, n - 1)] = -c;
        m[(n - 1, r)] = c.clone();
    }
    m
}

fn finish_family(
    field: &Arc<FieldSpec>,
    n: usize,
    column: Vec<CycloNum>,
) -> Result<LinearDerivation, ConstantsError> {
    let spec = RingSpec::uniform(n, 2, Arc::clone(field))?;
    let m = border_matrix(field, &column);
    let cube = exactla::matrix_power(&m, 3)?;
    if !m.is_skew_symmetric() || !cube.is_zero() {
        return Err(ConstantsError::Precondition(
            "family matrix is not a skew cube-zero matrix".into(),
        ));
    }
    Ok(LinearDerivation::from_matrix(&spec, m)?)
}

/// Skew matrix on `B_n^2`, `n` odd, whose last column is
/// `(−1, −i, …, −1, −i, 0)ᵀ` and last row its negation.
pub fn build_odd_family(
    n: usize,
    field: &Arc<FieldSpec>,
) -> Result<LinearDerivation, ConstantsError> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(ConstantsError::Shape(format!(
            "odd family needs odd n >= 3, got {n}"
        )));
    }
    let i = CycloNum::imaginary_unit(field)?;
    let one = CycloNum::one(field);
    let column = (0..n - 1)
        .map(|r| if r % 2 == 0 { one.clone() } else { i.clone() })
        .collect();
    finish_family(field, n, column)
}

/// Skew matrix on `B_n^2`, `n` even, whose last column is
/// `(−1, −ε, …, −ε^{n−2}, 0)ᵀ` for a primitive `(n−1)`-th root of unity ε.
pub fn build_even_family(
    n: usize,
    field: &Arc<FieldSpec>,
) -> Result<LinearDerivation, ConstantsError> {
    if n < 4 || n % 2 == 1 {
        return Err(ConstantsError::Shape(format!(
            "even family needs even n >= 4, got {n}"
        )));
    }
    let eps = CycloNum::root_of_unity(field, n as u32 - 1)?;
    let column = (0..n - 1).map(|r| eps.pow(r as u64)).collect();
    finish_family(field, n, column)
}

/// `d = d_1 + d_s` on `B_3^2 = K[x, y, z]` with `d_s` the rotation
/// `y ↦ −z, z ↦ y`: matrix `[[1, 0, 0], [0, 1, −1], [0, 1, 1]]`.
pub fn rotation_example(field: &Arc<FieldSpec>) -> LinearDerivation {
    let spec = RingSpec::uniform(3, 2, Arc::clone(field)).expect("valid ring");
    let m = Matrix::from_ints(field, &[&[1, 0, 0], &[0, 1, -1], &[0, 1, 1]]);
    LinearDerivation::from_matrix(&spec, m).expect("scalar plus skew is a derivation")
}

/// Checks that `d_α + d_s` has no nonconstant constants up to `max_degree`,
/// for a locally nilpotent skew `d_s` and nonzero α.
pub fn verify_lnd_skew_implies_trivial(
    d_s: &LinearDerivation,
    alpha: &CycloNum,
    max_degree: u32,
) -> Result<bool, ConstantsError> {
    require_skew(d_s)?;
    if !d_s.is_locally_nilpotent() {
        return Err(ConstantsError::Precondition(
            "skew part is not locally nilpotent".into(),
        ));
    }
    if alpha.is_zero() {
        return Err(ConstantsError::Precondition("alpha must be nonzero".into()));
    }
    let d = LinearDerivation::scalar(d_s.spec(), alpha)?.checked_add(d_s)?;
    Ok(kernel_up_to_degree(&d, max_degree)?.trivial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    /// `X B² Xᵀ` for `B = [d_s]` with `B² ≠ 0`.
    SquareQuadraticForm,
    /// `Σ a_i x_i` with `a` a null vector of `Bᵀ`, when `B² = 0`.
    LinearNullVector,
    /// `X B² Xᵀ` vanished in the quotient (B² scalar); taken from the
    /// degree-2 kernel instead.
    DegreeTwoKernel,
}

/// A nonconstant element killed by the skew derivation `d_s`.
pub fn skew_kernel_witness(
    d_s: &LinearDerivation,
) -> Result<(RingElem, WitnessKind), ConstantsError> {
    require_skew(d_s)?;
    let spec = d_s.spec();
    let b = d_s.matrix();
    let b2 = b.checked_mul(b)?;
    let (witness, kind) = if !b2.is_zero() {
        let n = spec.n();
        let terms = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                (Monomial::new(e), b2[(i, j)].clone())
            });
        let form = normal_form(spec, terms)?;
        if form.is_zero() {
            let basis = kernel_in_degree(d_s, 2);
            let first = basis.into_iter().next().ok_or_else(|| {
                ConstantsError::Precondition("degree-2 kernel of a skew derivation is empty".into())
            })?;
            (first, WitnessKind::DegreeTwoKernel)
        } else {
            (form, WitnessKind::SquareQuadraticForm)
        }
    } else {
        let null = exactla::nullspace(&b.transpose());
        let v = null
            .first()
            .ok_or_else(|| ConstantsError::Precondition("B^2 = 0 but B^T is injective".into()))?;
        (linear_form(spec, v), WitnessKind::LinearNullVector)
    };
    if !d_s.apply(&witness)?.is_zero() || witness.is_constant() {
        return Err(ConstantsError::NotAnEigenvector(format!(
            "witness {witness} is not a constant"
        )));
    }
    Ok((witness, kind))
}
