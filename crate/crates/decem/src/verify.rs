//! Randomized verification of the operator identities.
//!
//! Each check runs a fixed number of seeded trials over a battery of
//! lattice sizes and records the worst residual it saw. Identities whose
//! operator coefficients are integers are exercised on integer-valued
//! random forms and must hold bit-exactly; the rest carry a 1e-12 absolute
//! tolerance. Reports are deterministic for a fixed seed (timings are kept
//! out of the serialized form).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::time::Instant;

use crate::calculus::{pairing, InnerProductDomain};
use crate::forms::DiscreteForm;
use crate::lattice::{volume_chain, CellIndex, CellSignature, Chain, LatticeTopology};
use crate::maxwell::{
    constitutive_dual, constitutive_primal, gauge_transform, h_degree, poynting_residual,
    poynting_residual_componentwise, potentials_to_fields, FieldRates, FieldState,
    PhysicalConstants, Potentials,
};

pub type StarFn<'a> = &'a dyn Fn(&DiscreteForm) -> DiscreteForm;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub lattices: Vec<String>,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing)]
    pub elapsed_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub trials_per_check: usize,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub lattices: Vec<LatticeTopology>,
    pub trials: usize,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        let dims: [&[usize]; 8] = [
            &[2, 2, 2],
            &[3, 3, 3],
            &[4, 4, 4],
            &[2, 3, 4],
            &[2, 2],
            &[4, 4],
            &[6, 6],
            &[3, 5],
        ];
        VerifyConfig {
            lattices: dims
                .iter()
                .map(|d| LatticeTopology::periodic(d).unwrap())
                .collect(),
            trials: 1000,
            seed: 7,
        }
    }
}

impl VerifyConfig {
    fn of_dim(&self, dim: usize) -> Vec<LatticeTopology> {
        self.lattices
            .iter()
            .filter(|t| t.dimension() == dim)
            .cloned()
            .collect()
    }
}

fn lattice_names(lattices: &[LatticeTopology]) -> Vec<String> {
    lattices
        .iter()
        .map(|t| {
            t.extents()
                .iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join("x")
        })
        .collect()
}

struct CheckRun<'a> {
    name: &'a str,
    lattices: Vec<LatticeTopology>,
    trials: usize,
    tolerance: f64,
}

impl CheckRun<'_> {
    fn execute(self, mut body: impl FnMut(&LatticeTopology, usize) -> f64) -> CheckResult {
        let start = Instant::now();
        let mut max_residual = 0.0f64;
        for trial in 0..self.trials {
            let topo = &self.lattices[trial % self.lattices.len()];
            max_residual = max_residual.max(body(topo, trial));
        }
        CheckResult {
            name: self.name.to_string(),
            lattices: lattice_names(&self.lattices),
            trials: self.trials,
            max_residual,
            tolerance: self.tolerance,
            pass: max_residual <= self.tolerance,
            elapsed_ms: start.elapsed().as_millis(),
        }
    }
}

fn random_degree(rng: &mut impl Rng, dim: usize) -> usize {
    rng.gen_range(0..=dim)
}

fn chain_norm(c: &Chain) -> f64 {
    c.terms().fold(0.0f64, |m, (_, _, v)| m.max(v.abs()))
}

fn random_chain(
    topo: &LatticeTopology,
    degree: usize,
    rng: &mut impl Rng,
    terms: usize,
) -> Chain {
    let sigs = CellSignature::all_of_degree(topo.dimension(), degree);
    let mut chain = Chain::zero(degree);
    for _ in 0..terms {
        let sig = sigs[rng.gen_range(0..sigs.len())];
        let coords: Vec<i64> = topo
            .extents()
            .iter()
            .map(|&n| rng.gen_range(0..n as i64))
            .collect();
        chain.add_term(
            sig,
            CellIndex::new(&coords, topo).unwrap(),
            rng.gen_range(-3..=3) as f64,
        );
    }
    chain
}

/// Run the full suite with the canonical operators.
pub fn run_verification(cfg: &VerifyConfig) -> VerificationReport {
    run_verification_with_star(cfg, &|f| f.star())
}

/// Run the suite with a replaceable Hodge star (the hook used by the
/// operator-mutation tests: a corrupted star must be caught and named).
pub fn run_verification_with_star(cfg: &VerifyConfig, star: StarFn) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let checks = vec![
        check_boundary_boundary(cfg, &mut rng),
        check_coboundary_coboundary(cfg, &mut rng),
        check_pairing_duality(cfg, &mut rng),
        check_leibniz(cfg, &mut rng),
        check_star_tables(cfg, star),
        check_star_commutation(cfg, &mut rng, star, 3),
        check_star_commutation(cfg, &mut rng, star, 2),
        check_star_inverse_roundtrip(cfg, &mut rng),
        check_codifferential_routes(cfg, &mut rng),
        check_adjointness_periodic(cfg, &mut rng),
        check_adjointness_with_boundary(cfg, &mut rng),
        check_inner_product_routes(cfg, &mut rng),
        check_laplacian_stencil(cfg, &mut rng),
        check_constitutive_roundtrip(cfg, &mut rng),
        check_gauge_invariance(cfg, &mut rng),
        check_poynting_forms(cfg, &mut rng),
    ];

    let pass = checks.iter().all(|c| c.pass);
    VerificationReport {
        seed: cfg.seed,
        trials_per_check: cfg.trials,
        pass,
        checks,
    }
}

/// `∂∂ = 0` on random chains, exact.
fn check_boundary_boundary(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "boundary_boundary_zero",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let dim = topo.dimension();
        let degree = rng.gen_range(2..=dim);
        let chain = random_chain(topo, degree, rng, 12);
        chain_norm(&chain.boundary(topo).boundary(topo))
    })
}

/// `dd = 0` on random integer forms, exact.
fn check_coboundary_coboundary(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "coboundary_coboundary_zero",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let degree = rng.gen_range(0..topo.dimension());
        let f = DiscreteForm::random_integer(topo, degree, rng, 9);
        f.coboundary().coboundary().norm_inf()
    })
}

/// `⟨a, dΩ⟩ = ⟨∂a, Ω⟩` on random chains and forms, exact.
fn check_pairing_duality(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "pairing_coboundary_duality",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let dim = topo.dimension();
        let degree = rng.gen_range(1..=dim);
        let f = DiscreteForm::random_integer(topo, degree - 1, rng, 9);
        let chain = random_chain(topo, degree, rng, 12);
        let lhs = pairing(&chain, &f.coboundary()).unwrap();
        let rhs = pairing(&chain.boundary(topo), &f).unwrap();
        (lhs - rhs).abs()
    })
}

/// Leibniz rule `d(Ω∪Φ) = dΩ∪Φ + (−1)^r Ω∪dΦ`, exact.
fn check_leibniz(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "leibniz_cup_rule",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let dim = topo.dimension();
        let r = rng.gen_range(0..dim);
        let q = rng.gen_range(0..dim - r);
        let omega = DiscreteForm::random_integer(topo, r, rng, 9);
        let phi = DiscreteForm::random_integer(topo, q, rng, 9);
        let lhs = omega.cup(&phi).unwrap().coboundary();
        let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
        let mut rhs = omega.coboundary().cup(&phi).unwrap();
        rhs.axpy(sign, &omega.cup(&phi.coboundary()).unwrap());
        lhs.max_abs_diff(&rhs)
    })
}

/// The star and inverse-star basis tables (fixed signs and shifts).
fn check_star_tables(cfg: &VerifyConfig, star: StarFn) -> CheckResult {
    let lattices = cfg.lattices.clone();
    let start = Instant::now();
    let mut max_residual = 0.0f64;
    let mut cases = 0usize;
    for topo in &lattices {
        let dim = topo.dimension();
        // star rule: basis of signature S at c maps to the complement at
        // c shifted forward along S, with the merge sign
        for degree in 0..=dim {
            for sig in CellSignature::all_of_degree(dim, degree) {
                let mut f = DiscreteForm::zero(topo, degree);
                let base = vec![0usize; dim];
                f.set(sig, &base, 1.0);
                let starred = star(&f);
                let out_sig = sig.complement(dim);
                let mut expected = DiscreteForm::zero(topo, dim - degree);
                let shifted: Vec<i64> = (0..dim)
                    .map(|a| if sig.contains(a) { 1 } else { 0 })
                    .collect();
                let sign = merge_sign_pub(sig, out_sig);
                let canon = topo.canonicalize(&shifted).unwrap();
                expected.set(out_sig, &canon, sign);
                max_residual = max_residual.max(starred.max_abs_diff(&expected));
                // inverse table: ∗⁻¹∗ must return the basis element
                max_residual = max_residual.max(starred.star_inverse().max_abs_diff(&f));
                cases += 1;
            }
        }
    }
    CheckResult {
        name: "star_basis_tables".to_string(),
        lattices: lattice_names(&lattices),
        trials: cases,
        max_residual,
        tolerance: 0.0,
        pass: max_residual == 0.0,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

fn merge_sign_pub(left: CellSignature, right: CellSignature) -> f64 {
    let mut inversions = 0;
    for l in left.axes() {
        for r in right.axes() {
            if l > r {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `d(∗∗A) = ∗∗dA` in 3D, `d(∗∗A) = −∗∗dA` in 2D; exact.
fn check_star_commutation(
    cfg: &VerifyConfig,
    rng: &mut ChaCha8Rng,
    star: StarFn,
    dim: usize,
) -> CheckResult {
    let name = if dim == 3 {
        "double_star_commutes_with_d_3d"
    } else {
        "double_star_anticommutes_with_d_2d"
    };
    let sign = if dim == 3 { 1.0 } else { -1.0 };
    CheckRun {
        name,
        lattices: cfg.of_dim(dim),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let degree = rng.gen_range(0..dim);
        let a = DiscreteForm::random_integer(topo, degree, rng, 9);
        let lhs = star(&star(&a)).coboundary();
        let rhs = star(&star(&a.coboundary())).scaled(sign);
        lhs.max_abs_diff(&rhs)
    })
}

/// `∗⁻¹∗ = ∗∗⁻¹ = id` on random real-valued forms, exact.
fn check_star_inverse_roundtrip(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "star_inverse_roundtrip",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let degree = random_degree(rng, topo.dimension());
        let f = DiscreteForm::random(topo, degree, rng);
        let a = f.star().star_inverse().max_abs_diff(&f);
        let b = f.star_inverse().star().max_abs_diff(&f);
        a.max(b)
    })
}

/// Stencil codifferential against the composed `(−1)^r ∗⁻¹ d ∗`, exact.
fn check_codifferential_routes(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "codifferential_explicit_vs_composed",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let degree = rng.gen_range(1..=topo.dimension());
        let f = DiscreteForm::random(topo, degree, rng);
        f.codifferential().max_abs_diff(&f.codifferential_composed())
    })
}

/// `(dΦ, Ω)_V = (Φ, δΩ)_V` on fully periodic lattices (∂V = 0), 1e-12.
fn check_adjointness_periodic(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "adjointness_periodic",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 1e-12,
    }
    .execute(|topo, _| {
        let dim = topo.dimension();
        let r = rng.gen_range(0..dim);
        let phi = DiscreteForm::random(topo, r, rng);
        let omega = DiscreteForm::random(topo, r + 1, rng);
        let dom = InnerProductDomain::full(topo);
        let lhs = phi.coboundary().inner(&omega, &dom).unwrap();
        let rhs = phi.inner(&omega.codifferential(), &dom).unwrap();
        (lhs - rhs).abs()
    })
}

/// The three-term identity `(dΦ, Ω)_V = ⟨∂V, Φ∪∗Ω⟩ + (Φ, δΩ)_V` over
/// sub-regions with a genuine boundary chain; exact on integer forms.
fn check_adjointness_with_boundary(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "adjointness_with_boundary_term",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let dim = topo.dimension();
        let ranges: Vec<std::ops::Range<usize>> = topo
            .extents()
            .iter()
            .map(|&n| {
                let start = rng.gen_range(0..n);
                let end = rng.gen_range(start + 1..=n);
                start..end
            })
            .collect();
        let region = volume_chain(topo, &ranges).unwrap();
        let dom = InnerProductDomain::new(region.clone(), topo).unwrap();
        let r = rng.gen_range(0..dim);
        let phi = DiscreteForm::random_integer(topo, r, rng, 9);
        let omega = DiscreteForm::random_integer(topo, r + 1, rng, 9);
        let lhs = phi.coboundary().inner(&omega, &dom).unwrap();
        let boundary =
            pairing(&region.boundary(topo), &phi.cup(&omega.star()).unwrap()).unwrap();
        let rhs = boundary + phi.inner(&omega.codifferential(), &dom).unwrap();
        (lhs - rhs).abs()
    })
}

/// Pointwise inner product against the literal `⟨V, f ∪ ∗g⟩`, exact.
fn check_inner_product_routes(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "inner_product_cup_route",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let degree = random_degree(rng, topo.dimension());
        let f = DiscreteForm::random_integer(topo, degree, rng, 9);
        let g = DiscreteForm::random_integer(topo, degree, rng, 9);
        let dom = InnerProductDomain::full(topo);
        let a = f.inner(&g, &dom).unwrap();
        let b = f.inner_via_cup(&g, &dom).unwrap();
        (a - b).abs()
    })
}

/// `Δ = dδ + δd` against the independent per-component stencil
/// `−Σ(Δ_a)² f(σ_a)`, exact on 0- and 1-forms.
fn check_laplacian_stencil(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "laplacian_vs_stencil",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let dim = topo.dimension();
        let degree = rng.gen_range(0..=1);
        let f = DiscreteForm::random_integer(topo, degree, rng, 9);
        let lap = f.laplacian();
        let mut worst = 0.0f64;
        for s in f.signatures() {
            for ix in topo.cells() {
                let c: Vec<i64> = topo.coords_of(ix).iter().map(|&u| u as i64).collect();
                let mut expected = 0.0;
                for axis in 0..dim {
                    let mut fwd = c.clone();
                    fwd[axis] += 1;
                    let mut back = c.clone();
                    back[axis] -= 1;
                    expected -= f.value(s, &fwd) - 2.0 * f.value(s, &c) + f.value(s, &back);
                }
                worst = worst.max((lap.component(s)[ix] - expected).abs());
            }
        }
        worst
    })
}

/// `constitutive_dual ∘ constitutive_primal = id` on periodic lattices;
/// exact with power-of-two constants.
fn check_constitutive_roundtrip(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    let k = PhysicalConstants::new(0.5, 4.0).expect("valid constants");
    CheckRun {
        name: "constitutive_roundtrip",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let dim = topo.dimension();
        let e = DiscreteForm::random(topo, 1, rng);
        let h = DiscreteForm::random(topo, h_degree(dim), rng);
        let (d, b) = constitutive_primal(&e, &h, &k).unwrap();
        let (e2, h2) = constitutive_dual(&d, &b, &k).unwrap();
        e.max_abs_diff(&e2).max(h.max_abs_diff(&h2))
    })
}

/// E and B are unchanged by gauge transformations, exactly.
fn check_gauge_invariance(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "gauge_invariance",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let a = DiscreteForm::random_integer(topo, 1, rng, 9);
        let phi = DiscreteForm::random_integer(topo, 0, rng, 9);
        let a_dot = DiscreteForm::random_integer(topo, 1, rng, 9);
        let psi = DiscreteForm::random_integer(topo, 0, rng, 9);
        let psi_dot = DiscreteForm::random_integer(topo, 0, rng, 9);
        let p = Potentials::new(a, phi).unwrap();
        let (e, b) = potentials_to_fields(&p, &a_dot);
        let p2 = gauge_transform(&p, &psi, &psi_dot);
        let a2_dot = &a_dot + &psi_dot.coboundary();
        let (e2, b2) = potentials_to_fields(&p2, &a2_dot);
        e.max_abs_diff(&e2).max(b.max_abs_diff(&b2))
    })
}

/// Cup-product form of the energy balance against its componentwise
/// expansion, exact on integer fields.
fn check_poynting_forms(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> CheckResult {
    CheckRun {
        name: "poynting_cup_vs_componentwise",
        lattices: cfg.lattices.clone(),
        trials: cfg.trials,
        tolerance: 0.0,
    }
    .execute(|topo, _| {
        let dim = topo.dimension();
        let d_deg = crate::maxwell::d_degree(dim);
        let state = FieldState {
            t: 0.0,
            e: DiscreteForm::random_integer(topo, 1, rng, 9),
            h: DiscreteForm::random_integer(topo, h_degree(dim), rng, 9),
            d: DiscreteForm::random_integer(topo, d_deg, rng, 9),
            b: DiscreteForm::random_integer(topo, 2, rng, 9),
        };
        let rates = FieldRates {
            e_dot: DiscreteForm::random_integer(topo, 1, rng, 9),
            h_dot: DiscreteForm::random_integer(topo, h_degree(dim), rng, 9),
            d_dot: DiscreteForm::random_integer(topo, d_deg, rng, 9),
            b_dot: DiscreteForm::random_integer(topo, 2, rng, 9),
        };
        let j = DiscreteForm::random_integer(topo, d_deg, rng, 9);
        let via_cup = poynting_residual(&state, &rates, &j).unwrap();
        let via_comp = poynting_residual_componentwise(&state, &rates, &j);
        via_cup.max_abs_diff(&via_comp)
    })
}
