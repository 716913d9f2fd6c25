//! The `verify` suite: every structural claim replayed on a grid of rings
//! and on the fixed worked examples, one PASS/FAIL/SKIP line per check.

use std::fmt::Write as _;
use std::sync::Arc;

use fermat_core::constants::{
    self, alpha_rejection_degree, build_even_family, build_odd_family, family_conductor,
    find_alpha, free_forms_action, kernel_up_to_degree, restrict_to_vk, rotation_example,
    shifted_eigen_check, skew_kernel_witness, verify_lnd_skew_implies_trivial, ConstantsError,
};
use fermat_core::derivation::{
    generator_dij, generator_epsilon, is_well_defined, verify_triangular_vanishing,
};
use fermat_core::exactla::{self, Matrix};
use fermat_core::field::{CycloNum, FieldSpec, Rational};
use fermat_core::linearder::{linear_derivation_space, LinearDerivation};
use fermat_core::parse::parse_ring_spec;
use fermat_core::ring::{normal_form, RingElem, RingSpec};

use crate::random::Sampler;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub max_degree: u32,
    pub grid: Vec<Arc<RingSpec>>,
    /// Degree bound of the triangular-derivation check.
    pub bound: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub results: Vec<CheckResult>,
}

impl SuiteReport {
    fn count(&self, s: Status) -> usize {
        self.results.iter().filter(|r| r.status == s).count()
    }

    pub fn passed(&self) -> usize {
        self.count(Status::Pass)
    }

    pub fn failed(&self) -> usize {
        self.count(Status::Fail)
    }

    pub fn skipped(&self) -> usize {
        self.count(Status::Skip)
    }

    pub fn render(&self) -> String {
        let width = self.results.iter().map(|r| r.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for r in &self.results {
            let tag = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = writeln!(out, "{tag} {:<width$}  {}", r.name, r.detail);
        }
        let _ = writeln!(
            out,
            "SUMMARY pass={} fail={} skip={}",
            self.passed(),
            self.failed(),
            self.skipped()
        );
        out
    }
}

pub const DEFAULT_GRID: [&str; 4] = [
    "n=3;m=2,2,2;field=4",
    "n=3;m=3,3,3;field=4",
    "n=4;m=2,2,2,2;field=4",
    "n=3;m=3,4,5;field=4",
];

pub fn default_grid() -> Vec<Arc<RingSpec>> {
    DEFAULT_GRID
        .iter()
        .map(|s| parse_ring_spec(s).expect("default grid parses"))
        .collect()
}

enum Verdict {
    Pass(String),
    Skip(String),
}

type Outcome = Result<Verdict, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn lift<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn large(cfg: &SuiteConfig) -> Vec<&Arc<RingSpec>> {
    cfg.grid
        .iter()
        .filter(|s| s.all_exponents_at_least(3))
        .collect()
}

fn quadrics(cfg: &SuiteConfig) -> Vec<&Arc<RingSpec>> {
    cfg.grid.iter().filter(|s| s.is_quadric()).collect()
}

fn field(k: u32) -> Arc<FieldSpec> {
    FieldSpec::new(k).expect("positive conductor")
}

fn int(f: &Arc<FieldSpec>, v: i64) -> CycloNum {
    CycloNum::from_int(f, v)
}

fn check_normal_form(cfg: &SuiteConfig, rng: &mut Sampler) -> Outcome {
    let per_spec = 100;
    for spec in &cfg.grid {
        let relation = (0..spec.n()).fold(RingElem::zero(spec), |acc, i| {
            acc + RingElem::var(spec, i).pow(spec.exponent(i))
        });
        ensure!(
            relation.is_zero(),
            "relation of {spec} reduces to {relation}"
        );
        for _ in 0..per_spec {
            let f = normal_form(spec, rng.raw_terms(spec, 7, 6)).map_err(lift)?;
            ensure!(
                f.terms().all(|(m, _)| m.is_normal(spec)),
                "non-normal output {f}"
            );
            let again =
                normal_form(spec, f.terms().map(|(m, c)| (m.clone(), c.clone()))).map_err(lift)?;
            ensure!(again == f, "normal form not idempotent on {f}");
        }
    }
    Ok(Verdict::Pass(format!(
        "{} specs, {} random inputs",
        cfg.grid.len(),
        cfg.grid.len() * per_spec
    )))
}

fn check_generators(cfg: &SuiteConfig, _: &mut Sampler) -> Outcome {
    let mut count = 0;
    for spec in &cfg.grid {
        let n = spec.n();
        for i in 0..n {
            for j in i + 1..n {
                let d = generator_dij(spec, i, j).map_err(lift)?;
                ensure!(
                    is_well_defined(spec, d.images()).map_err(lift)?,
                    "d{}{} on {spec}",
                    i + 1,
                    j + 1
                );
                count += 1;
            }
        }
        ensure!(
            is_well_defined(spec, generator_epsilon(spec).images()).map_err(lift)?,
            "eps on {spec}"
        );
        count += 1;
    }
    Ok(Verdict::Pass(format!("{count} generators certified")))
}

fn check_triangular(cfg: &SuiteConfig, _: &mut Sampler) -> Outcome {
    for spec in &cfg.grid {
        ensure!(
            verify_triangular_vanishing(spec, cfg.bound),
            "nonzero triangular derivation on {spec} with bound {}",
            cfg.bound
        );
    }
    Ok(Verdict::Pass(format!(
        "{} specs, degree bound {}",
        cfg.grid.len(),
        cfg.bound
    )))
}

fn check_linear_space(cfg: &SuiteConfig, _: &mut Sampler) -> Outcome {
    let mut checked = 0;
    for spec in &cfg.grid {
        let basis = linear_derivation_space(spec);
        if spec.all_exponents_at_least(3) {
            ensure!(basis.len() == 1, "dimension {} on {spec}", basis.len());
            let b = &basis[0];
            ensure!(b.is_diagonal(), "non-diagonal basis on {spec}");
            let c = b[(0, 0)].scale(&Rational::from_integer(spec.exponent(0).into()));
            for i in 0..spec.n() {
                let expected = c.scale(&Rational::new(1.into(), spec.exponent(i).into()));
                ensure!(
                    b[(i, i)] == expected,
                    "entry {i} not proportional to 1/m_i on {spec}"
                );
            }
            checked += 1;
        } else if spec.is_quadric() {
            let n = spec.n();
            ensure!(
                basis.len() == 1 + n * (n - 1) / 2,
                "dimension {} on {spec}",
                basis.len()
            );
            for b in basis {
                let d = LinearDerivation::from_matrix(spec, b).map_err(lift)?;
                let dec = d.decompose().map_err(lift)?;
                ensure!(dec.skew.is_skew_symmetric(), "skew part not skew on {spec}");
            }
            checked += 1;
        }
    }
    if checked == 0 {
        return Ok(Verdict::Skip("no all-m>=3 or quadric spec in grid".into()));
    }
    Ok(Verdict::Pass(format!("{checked} specs")))
}

fn check_power_identity(cfg: &SuiteConfig, rng: &mut Sampler) -> Outcome {
    let per_spec = 10;
    for spec in &cfg.grid {
        for _ in 0..per_spec {
            let d = rng.linear_derivation(spec);
            for s in 0..=5u32 {
                let power = exactla::matrix_power(d.matrix(), s).map_err(lift)?;
                for i in 0..spec.n() {
                    let direct = d
                        .derivation()
                        .compose_power(s, &RingElem::var(spec, i))
                        .map_err(lift)?;
                    let expected = (0..spec.n()).fold(RingElem::zero(spec), |acc, j| {
                        acc + RingElem::var(spec, j).scale(&power[(i, j)])
                    });
                    ensure!(
                        direct == expected,
                        "s={s} i={i} on {spec} with matrix {}",
                        d.matrix()
                    );
                }
            }
        }
    }
    Ok(Verdict::Pass(format!(
        "{} random derivations, s <= 5",
        cfg.grid.len() * per_spec
    )))
}

fn check_lnd_large(cfg: &SuiteConfig, rng: &mut Sampler) -> Outcome {
    let specs = large(cfg);
    if specs.is_empty() {
        return Ok(Verdict::Skip("no all-m>=3 spec in grid".into()));
    }
    for spec in &specs {
        ensure!(
            LinearDerivation::zero(spec).is_locally_nilpotent(),
            "zero derivation on {spec}"
        );
        for _ in 0..20 {
            let d = rng.linear_derivation(spec);
            ensure!(
                d.is_locally_nilpotent() == d.matrix().is_zero(),
                "matrix {} on {spec}",
                d.matrix()
            );
        }
    }
    Ok(Verdict::Pass(format!(
        "{} specs, only the zero matrix is nilpotent",
        specs.len()
    )))
}

fn family_for(n: usize, conductor: u32) -> Result<LinearDerivation, ConstantsError> {
    let f = field(num::integer::lcm(conductor, family_conductor(n)));
    if n % 2 == 1 {
        build_odd_family(n, &f)
    } else {
        build_even_family(n, &f)
    }
}

fn check_lnd_quadric(cfg: &SuiteConfig, rng: &mut Sampler) -> Outcome {
    let specs = quadrics(cfg);
    if specs.is_empty() {
        return Ok(Verdict::Skip("no quadric spec in grid".into()));
    }
    for spec in &specs {
        let family = family_for(spec.n(), spec.field().conductor()).map_err(lift)?;
        let mut pool = vec![family, LinearDerivation::zero(spec)];
        pool.extend((0..20).map(|_| rng.linear_derivation(spec)));
        for d in pool {
            let report = d.nilpotency();
            ensure!(
                report.skew_cross_check == Some(true),
                "cross-check disagrees on {}",
                d.matrix()
            );
            if report.nilpotent {
                let dec = d.decompose().map_err(lift)?;
                ensure!(
                    dec.alpha.is_zero(),
                    "nilpotent with nonzero scalar part {}",
                    d.matrix()
                );
            }
        }
    }
    Ok(Verdict::Pass(format!(
        "{} specs, nilpotent agrees with nilpotent-and-skew",
        specs.len()
    )))
}

fn check_darboux(cfg: &SuiteConfig, rng: &mut Sampler) -> Outcome {
    let specs = large(cfg);
    if specs.is_empty() {
        return Ok(Verdict::Skip("no all-m>=3 spec in grid".into()));
    }
    let mut certs = 0;
    let mut rejected = 0;
    for spec in &specs {
        for _ in 0..50 {
            let alpha = CycloNum::from_rational(spec.field(), rng.nonzero_rational());
            let mono = rng.normal_monomial(spec, 5);
            let cert = constants::monomial_certificate(spec, &alpha, &mono).map_err(lift)?;
            let d = LinearDerivation::diagonal(spec, &alpha);
            ensure!(
                cert.verify(d.derivation()).map_err(lift)?,
                "certificate for {mono} fails"
            );
            certs += 1;

            let other = rng.normal_monomial(spec, 5);
            let (la, lb) = (
                constants::darboux_eigenvalue(spec, &alpha, &mono),
                constants::darboux_eigenvalue(spec, &alpha, &other),
            );
            if la != lb {
                let one = CycloNum::one(spec.field());
                let f = RingElem::term(spec, mono.clone(), one.clone())
                    + RingElem::term(spec, other, one);
                ensure!(
                    !constants::eigenvalue_uniqueness_check(&d, &f, &la).map_err(lift)?,
                    "mixed support {f} accepted"
                );
                ensure!(
                    constants::DarbouxCertificate::new(d.derivation(), f.clone(), la).is_err(),
                    "mixed support {f} certified"
                );
                rejected += 1;
            }
        }
        if let Some(m) = spec.uniform_exponent() {
            for k in 1..=4u32 {
                let f = rng.homogeneous(spec, k);
                if f.is_zero() {
                    continue;
                }
                let alpha = CycloNum::from_rational(spec.field(), rng.nonzero_rational());
                let lambda = constants::homogeneous_eigenvalue(spec, &alpha, &f).map_err(lift)?;
                ensure!(
                    lambda == alpha.scale(&Rational::new(k.into(), m.into())),
                    "eigenvalue of degree-{k} element"
                );
                certs += 1;
            }
        }
    }
    Ok(Verdict::Pass(format!(
        "{certs} certificates re-verified, {rejected} mixed supports rejected"
    )))
}

fn check_diagonal_kernel(cfg: &SuiteConfig, rng: &mut Sampler) -> Outcome {
    let specs = large(cfg);
    if specs.is_empty() {
        return Ok(Verdict::Skip("no all-m>=3 spec in grid".into()));
    }
    for spec in &specs {
        for alpha in [
            CycloNum::one(spec.field()),
            CycloNum::from_rational(spec.field(), rng.nonzero_rational()),
        ] {
            let d = LinearDerivation::diagonal(spec, &alpha);
            let report = kernel_up_to_degree(&d, cfg.max_degree).map_err(lift)?;
            ensure!(report.trivial, "constant found on {spec} for alpha={alpha}");
        }
    }
    Ok(Verdict::Pass(format!(
        "{} specs, trivial through K={}",
        specs.len(),
        cfg.max_degree
    )))
}

fn skew_of(d: &LinearDerivation) -> Result<LinearDerivation, String> {
    let skew = d.decompose().map_err(lift)?.skew;
    LinearDerivation::from_matrix(d.spec(), skew).map_err(lift)
}

fn check_shifted(cfg: &SuiteConfig, rng: &mut Sampler) -> Outcome {
    let specs = quadrics(cfg);
    if specs.is_empty() {
        return Ok(Verdict::Skip("no quadric spec in grid".into()));
    }
    let mut cases = 0;
    let mut positives = 0;
    for spec in &specs {
        for _ in 0..30 {
            let ds = skew_of(&rng.linear_derivation(spec))?;
            let alpha = CycloNum::from_rational(spec.field(), rng.rational());
            let k = 1 + rng.below(3) as u32;
            // half the time use a constant of d_s so the equation can hold
            let f = if rng.below(2) == 0 {
                let (w, _) = skew_kernel_witness(&ds).map_err(lift)?;
                let k_w = w.homogeneous_degree().unwrap_or(1);
                (w, k_w)
            } else {
                (rng.homogeneous(spec, k), k)
            };
            let (f, k) = f;
            if f.is_zero() {
                continue;
            }
            let kalpha = alpha.scale(&Rational::from_integer(k.into()));
            for lambda in [
                kalpha.clone(),
                CycloNum::from_rational(spec.field(), rng.rational()),
                CycloNum::zero(spec.field()),
            ] {
                let d = LinearDerivation::scalar(spec, &alpha)
                    .map_err(lift)?
                    .checked_add(&ds)
                    .map_err(lift)?;
                let direct = d.apply(&f).map_err(lift)? == f.scale(&lambda);
                let shifted = shifted_eigen_check(&ds, &alpha, &f, &lambda).map_err(lift)?;
                ensure!(
                    direct == shifted,
                    "equivalence fails for {f}, lambda={lambda}"
                );
                positives += usize::from(direct);
                cases += 1;
            }
        }
    }
    Ok(Verdict::Pass(format!(
        "{cases} cases, {positives} eigen-relations confirmed"
    )))
}

fn check_skew_witness(cfg: &SuiteConfig, rng: &mut Sampler) -> Outcome {
    let specs = quadrics(cfg);
    if specs.is_empty() {
        return Ok(Verdict::Skip("no quadric spec in grid".into()));
    }
    let mut count = 0;
    for spec in &specs {
        let mut pool: Vec<LinearDerivation> = linear_derivation_space(spec)
            .into_iter()
            .filter(Matrix::is_skew_symmetric)
            .map(|b| LinearDerivation::from_matrix(spec, b))
            .collect::<Result<_, _>>()
            .map_err(lift)?;
        for _ in 0..5 {
            pool.push(skew_of(&rng.linear_derivation(spec))?);
        }
        for ds in pool {
            let report = kernel_up_to_degree(&ds, 2).map_err(lift)?;
            ensure!(
                !report.trivial,
                "no constant of degree <= 2 for {}",
                ds.matrix()
            );
            let (w, _) = skew_kernel_witness(&ds).map_err(lift)?;
            ensure!(
                ds.apply(&w).map_err(lift)?.is_zero() && !w.is_constant(),
                "bad witness {w}"
            );
            count += 1;
        }
    }
    Ok(Verdict::Pass(format!(
        "{count} skew derivations with nonconstant constants"
    )))
}

fn rotation_skew(f: &Arc<FieldSpec>) -> Result<LinearDerivation, String> {
    skew_of(&rotation_example(f))
}

fn check_alpha_search(cfg: &SuiteConfig, _: &mut Sampler) -> Outcome {
    let f = field(4);
    let ds = rotation_skew(&f)?;
    let candidates = [int(&f, 1), int(&f, 2), CycloNum::from_ratio(&f, 1, 2)];
    let found = find_alpha(&ds, cfg.max_degree, &candidates).map_err(lift)?;
    ensure!(found.is_some(), "no candidate passes");
    let i = CycloNum::imaginary_unit(&f).map_err(lift)?;
    let rejected = alpha_rejection_degree(&ds, cfg.max_degree, &i).map_err(lift)?;
    ensure!(
        rejected == Some(1),
        "candidate i rejected at {rejected:?}, expected k=1"
    );
    Ok(Verdict::Pass(format!(
        "alpha={} passes through K={}, alpha=i rejected at k=1",
        found.expect("checked"),
        cfg.max_degree
    )))
}

fn check_families(cfg: &SuiteConfig, _: &mut Sampler) -> Outcome {
    let mut sizes = Vec::new();
    for n in [3usize, 4, 5, 6, 7] {
        let ds = family_for(n, 1).map_err(lift)?;
        ensure!(ds.matrix().is_skew_symmetric(), "n={n} not skew");
        let cube = exactla::matrix_power(ds.matrix(), 3).map_err(lift)?;
        ensure!(cube.is_zero(), "n={n} cube nonzero");
        ensure!(ds.is_locally_nilpotent(), "n={n} not locally nilpotent");
        let one = CycloNum::one(ds.spec().field());
        ensure!(
            verify_lnd_skew_implies_trivial(&ds, &one, cfg.max_degree).map_err(lift)?,
            "n={n}: constant found"
        );
        sizes.push(format!("n={n}"));
    }
    Ok(Verdict::Pass(format!(
        "{} trivial through K={}",
        sizes.join(","),
        cfg.max_degree
    )))
}

fn check_rotation(cfg: &SuiteConfig, _: &mut Sampler) -> Outcome {
    let f = field(4);
    let d = rotation_example(&f);
    let block = Matrix::from_ints(&f, &[&[1, -1], &[1, 1]]);
    for k in 1..=10u32 {
        let planar = free_forms_action(&block, k).map_err(lift)?;
        // tridiagonal: k on the diagonal, -(k-j) below column j, j above it
        for row in 0..=k as usize {
            for col in 0..=k as usize {
                let expected = if row == col {
                    i64::from(k)
                } else if row == col + 1 {
                    col as i64 - i64::from(k)
                } else if col == row + 1 {
                    col as i64
                } else {
                    0
                };
                ensure!(
                    planar[(row, col)] == int(&f, expected),
                    "planar entry ({row},{col}) at k={k}"
                );
            }
        }
        ensure!(
            !exactla::det(&planar).map_err(lift)?.is_zero(),
            "planar determinant vanishes at k={k}"
        );
        let full = restrict_to_vk(&d, k);
        ensure!(
            !exactla::det(&full.matrix).map_err(lift)?.is_zero(),
            "determinant on V_{k} vanishes"
        );
    }
    let report = kernel_up_to_degree(&d, cfg.max_degree).map_err(lift)?;
    ensure!(report.trivial, "constant found for d");
    let ds = rotation_skew(&f)?;
    let x = RingElem::var(ds.spec(), 0);
    let low = kernel_up_to_degree(&ds, 2).map_err(lift)?;
    ensure!(
        low.per_degree[&1] == vec![x.clone()],
        "degree-1 constants of d_s"
    );
    let (w, _) = skew_kernel_witness(&ds).map_err(lift)?;
    ensure!(w == x.pow(2), "quadratic witness {w}");
    Ok(Verdict::Pass(format!(
        "det != 0 for k=1..10, trivial through K={}, d_s kills x and x^2",
        cfg.max_degree
    )))
}

fn check_non_nilpotent(cfg: &SuiteConfig, _: &mut Sampler) -> Outcome {
    let f = field(4);
    let ds = rotation_skew(&f)?;
    ensure!(
        !ds.is_locally_nilpotent(),
        "rotation unexpectedly nilpotent"
    );
    let one = CycloNum::one(&f);
    ensure!(
        matches!(
            verify_lnd_skew_implies_trivial(&ds, &one, cfg.max_degree),
            Err(ConstantsError::Precondition(_))
        ),
        "nilpotency precondition not enforced"
    );
    let d = rotation_example(&f);
    ensure!(
        kernel_up_to_degree(&d, cfg.max_degree)
            .map_err(lift)?
            .trivial,
        "constant found"
    );
    Ok(Verdict::Pass(format!(
        "d_s not nilpotent, d_1 + d_s still trivial through K={}",
        cfg.max_degree
    )))
}

type Check = fn(&SuiteConfig, &mut Sampler) -> Outcome;

pub const CHECK_NAMES: [&str; 15] = [
    "normal-form",
    "generators",
    "triangular-vanishing",
    "linear-space",
    "power-identity",
    "lnd-large-exponents",
    "lnd-quadric-skew",
    "darboux-certificates",
    "diagonal-kernel",
    "shifted-eigen-equivalence",
    "skew-kernel-witness",
    "alpha-search",
    "nilpotent-families",
    "rotation-determinants",
    "non-nilpotent-trivial-kernel",
];

const CHECKS: [Check; 15] = [
    check_normal_form,
    check_generators,
    check_triangular,
    check_linear_space,
    check_power_identity,
    check_lnd_large,
    check_lnd_quadric,
    check_darboux,
    check_diagonal_kernel,
    check_shifted,
    check_skew_witness,
    check_alpha_search,
    check_families,
    check_rotation,
    check_non_nilpotent,
];

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut rng = Sampler::new(cfg.seed);
    let results = CHECK_NAMES
        .iter()
        .zip(CHECKS)
        .map(|(&name, check)| {
            let (status, detail) = match check(cfg, &mut rng) {
                Ok(Verdict::Pass(d)) => (Status::Pass, d),
                Ok(Verdict::Skip(d)) => (Status::Skip, d),
                Err(d) => (Status::Fail, d),
            };
            CheckResult {
                name,
                status,
                detail,
            }
        })
        .collect();
    SuiteReport { results }
}
