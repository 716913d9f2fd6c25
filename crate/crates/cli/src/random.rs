//! Seeded random inputs for the verification suite.

use std::sync::Arc;

use fermat_core::exactla::Matrix;
use fermat_core::field::{CycloNum, FieldSpec, Rational};
use fermat_core::linearder::{linear_derivation_space, LinearDerivation};
use fermat_core::ring::{normal_form, vk_basis, Monomial, RingElem, RingSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn below(&mut self, bound: usize) -> usize {
        self.rng.gen_range(0..bound)
    }

    /// `p/q` with `|p| ≤ 6`, `1 ≤ q ≤ 4`.
    pub fn rational(&mut self) -> Rational {
        Rational::new(
            self.rng.gen_range(-6i64..=6).into(),
            self.rng.gen_range(1i64..=4).into(),
        )
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if r != Rational::from_integer(0.into()) {
                return r;
            }
        }
    }

    pub fn coefficient(&mut self, field: &Arc<FieldSpec>) -> CycloNum {
        let coords = (0..field.degree()).map(|_| self.rational()).collect();
        CycloNum::from_coords(field, coords)
    }

    /// Terms over arbitrary, not necessarily normal, monomials.
    pub fn raw_terms(
        &mut self,
        spec: &Arc<RingSpec>,
        max_exp: u32,
        max_terms: usize,
    ) -> Vec<(Monomial, CycloNum)> {
        let count = self.rng.gen_range(0..=max_terms);
        (0..count)
            .map(|_| {
                let e = (0..spec.n())
                    .map(|_| self.rng.gen_range(0..=max_exp))
                    .collect();
                (Monomial::new(e), self.coefficient(spec.field()))
            })
            .collect()
    }

    pub fn element(&mut self, spec: &Arc<RingSpec>, max_exp: u32, max_terms: usize) -> RingElem {
        let terms = self.raw_terms(spec, max_exp, max_terms);
        normal_form(spec, terms).expect("arity matches")
    }

    pub fn homogeneous(&mut self, spec: &Arc<RingSpec>, degree: u32) -> RingElem {
        let basis = vk_basis(spec, degree);
        let coords: Vec<CycloNum> = basis
            .iter()
            .map(|_| self.coefficient(spec.field()))
            .collect();
        RingElem::from_coordinates(spec, &basis, &coords)
    }

    /// Normal monomial of positive degree.
    pub fn normal_monomial(&mut self, spec: &Arc<RingSpec>, max_exp: u32) -> Monomial {
        let n = spec.n();
        loop {
            let mut e: Vec<u32> = (0..n - 1)
                .map(|_| self.rng.gen_range(0..=max_exp))
                .collect();
            e.push(self.rng.gen_range(0..spec.exponent(n - 1)));
            let m = Monomial::new(e);
            if m.degree() > 0 {
                return m;
            }
        }
    }

    /// Random rational combination of the solved basis of linear derivations.
    pub fn linear_derivation(&mut self, spec: &Arc<RingSpec>) -> LinearDerivation {
        let mut m = Matrix::zeros(spec.field(), spec.n(), spec.n());
        for b in linear_derivation_space(spec) {
            let c = CycloNum::from_rational(spec.field(), self.rational());
            m = m.checked_add(&b.scale(&c)).expect("same shape");
        }
        LinearDerivation::from_matrix(spec, m).expect("combinations of solutions are solutions")
    }
}
