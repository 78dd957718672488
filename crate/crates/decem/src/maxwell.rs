//! The semi-discrete Maxwell system: space discretized as forms, time left
//! continuous.
//!
//! Field degrees by lattice dimension:
//!
//! | field | 3D | 2D |
//! |-------|----|----|
//! | E (electric intensity)   | 1-form | 1-form |
//! | H (magnetic intensity)   | 1-form | 0-form |
//! | D (electric flux)        | 2-form | 1-form |
//! | B (magnetic flux)        | 2-form | 2-form |
//! | J (current density)      | 2-form | 1-form |
//! | Q (charge density)       | 3-form | 2-form |
//!
//! The evolution equations are `dB/dt = −dE` and `dD/dt = dH − J`, closed by
//! the constitutive relations. Because the discrete `∗∗` is a shift rather
//! than the identity, the two classical ways of writing the constitutive
//! relations split into inequivalent discrete sets:
//!
//! - the primal set `D = ε₀∗E`, `B = μ₀∗H` ([`constitutive_primal`]), which
//!   the simulation enforces;
//! - the starred dual set `∗D = ε₀E`, `∗B = μ₀H`
//!   ([`constitutive_star_dual`]), which enters the energy-balance analysis.
//!
//! The simulation recovers intensities from fluxes by exactly inverting the
//! primal set with `∗⁻¹` ([`constitutive_dual`]); on a periodic lattice the
//! round trip is the identity. The energy balance (Poynting identity) uses
//! both sets and therefore holds as an identity only on states satisfying
//! both — e.g. spatially constant fields; [`poynting_residual`] reports the
//! defect instead of asserting it away.

use thiserror::Error;

use crate::calculus::CalculusError;
use crate::forms::DiscreteForm;
use crate::lattice::{CellSignature, LatticeTopology};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaxwellError {
    #[error("{field} must be a {expected}-form, got degree {got}")]
    BadDegree {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("fields live on different lattices")]
    TopologyMismatch,
    #[error("physical constants must be positive, got eps0={eps0}, mu0={mu0}")]
    BadConstants { eps0: f64, mu0: f64 },
    #[error("speed of light {c} inconsistent with 1/sqrt(mu0*eps0) = {expected}")]
    InconsistentC { c: f64, expected: f64 },
    #[error("wave residual needs at least 3 samples, got {0}")]
    TooFewSamples(usize),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// Vacuum permittivity, permeability and the derived light speed.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhysicalConstants {
    pub eps0: f64,
    pub mu0: f64,
    pub c: f64,
}

impl PhysicalConstants {
    /// Natural units: ε₀ = μ₀ = c = 1. The default throughout.
    pub fn natural() -> Self {
        PhysicalConstants {
            eps0: 1.0,
            mu0: 1.0,
            c: 1.0,
        }
    }

    pub fn new(eps0: f64, mu0: f64) -> Result<Self, MaxwellError> {
        if !(eps0 > 0.0 && mu0 > 0.0) {
            return Err(MaxwellError::BadConstants { eps0, mu0 });
        }
        Ok(PhysicalConstants {
            eps0,
            mu0,
            c: 1.0 / (mu0 * eps0).sqrt(),
        })
    }

    /// Like [`Self::new`] but with an explicitly supplied light speed,
    /// checked against `1/sqrt(μ₀ε₀)` to relative 1e-12.
    pub fn with_c(eps0: f64, mu0: f64, c: f64) -> Result<Self, MaxwellError> {
        let k = Self::new(eps0, mu0)?;
        if ((c - k.c) / k.c).abs() > 1e-12 {
            return Err(MaxwellError::InconsistentC { c, expected: k.c });
        }
        Ok(PhysicalConstants { eps0, mu0, c })
    }

    /// SI vacuum values.
    pub fn si() -> Self {
        PhysicalConstants::new(8.8541878128e-12, 1.25663706212e-6).expect("positive")
    }
}

/// Degree of the magnetic intensity H for a lattice dimension.
pub fn h_degree(dim: usize) -> usize {
    dim - 2
}

/// Degree of the electric flux D (and of the current J).
pub fn d_degree(dim: usize) -> usize {
    dim - 1
}

fn expect_degree(
    field: &'static str,
    form: &DiscreteForm,
    expected: usize,
) -> Result<(), MaxwellError> {
    if form.degree() != expected {
        return Err(MaxwellError::BadDegree {
            field,
            expected,
            got: form.degree(),
        });
    }
    Ok(())
}

/// Primal constitutive set: `D = ε₀ ∗E`, `B = μ₀ ∗H`.
pub fn constitutive_primal(
    e: &DiscreteForm,
    h: &DiscreteForm,
    k: &PhysicalConstants,
) -> Result<(DiscreteForm, DiscreteForm), MaxwellError> {
    if e.topology() != h.topology() {
        return Err(MaxwellError::TopologyMismatch);
    }
    let dim = e.dimension();
    expect_degree("E", e, 1)?;
    expect_degree("H", h, h_degree(dim))?;
    Ok((e.star().scaled(k.eps0), h.star().scaled(k.mu0)))
}

/// Exact inverse of the primal set: `E = ∗⁻¹D/ε₀`, `H = ∗⁻¹B/μ₀`.
///
/// On a periodic lattice `constitutive_dual(constitutive_primal(E, H))`
/// is the identity; this is the recovery the evolution uses.
pub fn constitutive_dual(
    d: &DiscreteForm,
    b: &DiscreteForm,
    k: &PhysicalConstants,
) -> Result<(DiscreteForm, DiscreteForm), MaxwellError> {
    if d.topology() != b.topology() {
        return Err(MaxwellError::TopologyMismatch);
    }
    let dim = d.dimension();
    expect_degree("D", d, d_degree(dim))?;
    expect_degree("B", b, 2)?;
    Ok((
        d.star_inverse().scaled(1.0 / k.eps0),
        b.star_inverse().scaled(1.0 / k.mu0),
    ))
}

/// The starred dual constitutive set, `E = ∗D/ε₀`, `H = ∗B/μ₀`.
///
/// Not the inverse of the primal set: substituting one into the other
/// leaves the index shift of `∗∗`. Exposed because the discrete energy
/// balance invokes both sets.
pub fn constitutive_star_dual(
    d: &DiscreteForm,
    b: &DiscreteForm,
    k: &PhysicalConstants,
) -> Result<(DiscreteForm, DiscreteForm), MaxwellError> {
    if d.topology() != b.topology() {
        return Err(MaxwellError::TopologyMismatch);
    }
    let dim = d.dimension();
    expect_degree("D", d, d_degree(dim))?;
    expect_degree("B", b, 2)?;
    Ok((
        d.star().scaled(1.0 / k.eps0),
        b.star().scaled(1.0 / k.mu0),
    ))
}

/// The Maxwell unknowns at one time instant, kept mutually consistent under
/// the primal constitutive set.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub e: DiscreteForm,
    pub h: DiscreteForm,
    pub d: DiscreteForm,
    pub b: DiscreteForm,
}

impl FieldState {
    /// Build from intensities; fluxes follow from the primal set.
    pub fn from_intensities(
        t: f64,
        e: DiscreteForm,
        h: DiscreteForm,
        k: &PhysicalConstants,
    ) -> Result<Self, MaxwellError> {
        let (d, b) = constitutive_primal(&e, &h, k)?;
        Ok(FieldState { t, e, h, d, b })
    }

    /// Build from fluxes; intensities recovered by the exact inverse.
    pub fn from_fluxes(
        t: f64,
        d: DiscreteForm,
        b: DiscreteForm,
        k: &PhysicalConstants,
    ) -> Result<Self, MaxwellError> {
        let (e, h) = constitutive_dual(&d, &b, k)?;
        Ok(FieldState { t, e, h, d, b })
    }

    pub fn topology(&self) -> &LatticeTopology {
        self.e.topology()
    }

    /// Field energy `(E, E)_V + (H, H)_V` over the full lattice.
    pub fn energy(&self) -> f64 {
        let dom = crate::calculus::InnerProductDomain::full(self.topology());
        self.e.inner(&self.e, &dom).unwrap() + self.h.inner(&self.h, &dom).unwrap()
    }
}

/// A time-dependent source form.
#[derive(Debug, Clone)]
pub enum SourceTerm {
    Zero,
    Constant(DiscreteForm),
    /// `amplitude · sin(ω t)`
    Sinusoid { amplitude: DiscreteForm, omega: f64 },
}

impl SourceTerm {
    pub fn at(&self, topo: &LatticeTopology, degree: usize, t: f64) -> DiscreteForm {
        match self {
            SourceTerm::Zero => DiscreteForm::zero(topo, degree),
            SourceTerm::Constant(f) => f.clone(),
            SourceTerm::Sinusoid { amplitude, omega } => amplitude.scaled((omega * t).sin()),
        }
    }

    /// Closed-form time derivative.
    pub fn dot_at(&self, topo: &LatticeTopology, degree: usize, t: f64) -> DiscreteForm {
        match self {
            SourceTerm::Zero | SourceTerm::Constant(_) => DiscreteForm::zero(topo, degree),
            SourceTerm::Sinusoid { amplitude, omega } => {
                amplitude.scaled(omega * (omega * t).cos())
            }
        }
    }
}

/// Current and charge sources.
#[derive(Debug, Clone)]
pub struct Sources {
    pub current: SourceTerm,
    pub charge: SourceTerm,
}

impl Sources {
    /// No charges, no currents.
    pub fn free_space() -> Self {
        Sources {
            current: SourceTerm::Zero,
            charge: SourceTerm::Zero,
        }
    }

    pub fn current_at(&self, topo: &LatticeTopology, t: f64) -> DiscreteForm {
        self.current.at(topo, d_degree(topo.dimension()), t)
    }

    pub fn current_dot_at(&self, topo: &LatticeTopology, t: f64) -> DiscreteForm {
        self.current.dot_at(topo, d_degree(topo.dimension()), t)
    }

    pub fn charge_at(&self, topo: &LatticeTopology, t: f64) -> DiscreteForm {
        self.charge.at(topo, topo.dimension(), t)
    }
}

/// Time derivatives of the fluxes prescribed by the evolution equations.
#[derive(Debug, Clone)]
pub struct FluxRates {
    pub d_dot: DiscreteForm,
    pub b_dot: DiscreteForm,
}

/// The semi-discrete Maxwell right-hand side:
/// `dB/dt = −dE`, `dD/dt = dH − J(t)`.
pub fn maxwell_rhs(
    state: &FieldState,
    sources: &Sources,
    _k: &PhysicalConstants,
) -> FluxRates {
    let j = sources.current_at(state.topology(), state.t);
    FluxRates {
        d_dot: &state.h.coboundary() - &j,
        b_dot: -&state.e.coboundary(),
    }
}

/// Time derivatives of all four fields: the flux rates plus the intensity
/// rates obtained by differentiating the exact recovery map.
#[derive(Debug, Clone)]
pub struct FieldRates {
    pub e_dot: DiscreteForm,
    pub h_dot: DiscreteForm,
    pub d_dot: DiscreteForm,
    pub b_dot: DiscreteForm,
}

pub fn field_rates(state: &FieldState, sources: &Sources, k: &PhysicalConstants) -> FieldRates {
    let FluxRates { d_dot, b_dot } = maxwell_rhs(state, sources, k);
    let e_dot = d_dot.star_inverse().scaled(1.0 / k.eps0);
    let h_dot = b_dot.star_inverse().scaled(1.0 / k.mu0);
    FieldRates {
        e_dot,
        h_dot,
        d_dot,
        b_dot,
    }
}

/// Gauss-law residuals `(dD − Q, dB)`, both top forms.
///
/// In 2D the magnetic residual vanishes identically (the coboundary of a
/// top form is zero).
pub fn gauss_residual(state: &FieldState, sources: &Sources) -> (DiscreteForm, DiscreteForm) {
    let q = sources.charge_at(state.topology(), state.t);
    let electric = &state.d.coboundary() - &q;
    let magnetic = state.b.coboundary();
    (electric, magnetic)
}

/// Energy-balance (Poynting) residual via cup products:
///
/// `d(E∪H) + ½ d/dt(E∪D + B∪H) + E∪J`,
///
/// with the time derivative expanded bilinearly through `rates`. Zero on
/// states satisfying the evolution equations together with both
/// constitutive sets; reported, not asserted, elsewhere.
pub fn poynting_residual(
    state: &FieldState,
    rates: &FieldRates,
    j: &DiscreteForm,
) -> Result<DiscreteForm, MaxwellError> {
    let mut res = state.e.cup(&state.h)?.coboundary();
    res.axpy(0.5, &rates.e_dot.cup(&state.d)?);
    res.axpy(0.5, &state.e.cup(&rates.d_dot)?);
    res.axpy(0.5, &rates.b_dot.cup(&state.h)?);
    res.axpy(0.5, &state.b.cup(&rates.h_dot)?);
    res.axpy(1.0, &state.e.cup(j)?);
    Ok(res)
}

/// The same residual evaluated through the expanded componentwise stencils
/// (independent of the generic cup machinery). Agrees with
/// [`poynting_residual`] exactly.
pub fn poynting_residual_componentwise(
    state: &FieldState,
    rates: &FieldRates,
    j: &DiscreteForm,
) -> DiscreteForm {
    let topo = state.topology().clone();
    let dim = topo.dimension();
    let mut out = DiscreteForm::zero(&topo, dim);
    let top = CellSignature::SCALAR.complement(dim);
    let e = &state.e;
    let h = &state.h;
    let d = &state.d;
    let b = &state.b;
    let (e1, e2) = (CellSignature::from_axes(&[0]), CellSignature::from_axes(&[1]));
    if dim == 3 {
        let e3 = CellSignature::from_axes(&[2]);
        let (e12, e13, e23) = (
            CellSignature::from_axes(&[0, 1]),
            CellSignature::from_axes(&[0, 2]),
            CellSignature::from_axes(&[1, 2]),
        );
        let val = |f: &DiscreteForm, s: CellSignature, c: &[i64; 3]| f.value(s, &c[..]);
        // products entering the flux, energy and source blocks
        let eh12 = |c: &[i64; 3], e: &DiscreteForm, h: &DiscreteForm| {
            val(e, e1, c) * val(h, e2, &[c[0] + 1, c[1], c[2]])
                - val(e, e2, c) * val(h, e1, &[c[0], c[1] + 1, c[2]])
        };
        let eh13 = |c: &[i64; 3], e: &DiscreteForm, h: &DiscreteForm| {
            val(e, e1, c) * val(h, e3, &[c[0] + 1, c[1], c[2]])
                - val(e, e3, c) * val(h, e1, &[c[0], c[1], c[2] + 1])
        };
        let eh23 = |c: &[i64; 3], e: &DiscreteForm, h: &DiscreteForm| {
            val(e, e2, c) * val(h, e3, &[c[0], c[1] + 1, c[2]])
                - val(e, e3, c) * val(h, e2, &[c[0], c[1], c[2] + 1])
        };
        let ed = |c: &[i64; 3], e: &DiscreteForm, d: &DiscreteForm| {
            val(e, e1, c) * val(d, e23, &[c[0] + 1, c[1], c[2]])
                - val(e, e2, c) * val(d, e13, &[c[0], c[1] + 1, c[2]])
                + val(e, e3, c) * val(d, e12, &[c[0], c[1], c[2] + 1])
        };
        let bh = |c: &[i64; 3], b: &DiscreteForm, h: &DiscreteForm| {
            val(b, e12, c) * val(h, e3, &[c[0] + 1, c[1] + 1, c[2]])
                - val(b, e13, c) * val(h, e2, &[c[0] + 1, c[1], c[2] + 1])
                + val(b, e23, c) * val(h, e1, &[c[0], c[1] + 1, c[2] + 1])
        };
        for ix in topo.cells() {
            let cu = topo.coords_of(ix);
            let c = [cu[0] as i64, cu[1] as i64, cu[2] as i64];
            let cp = |axis: usize| {
                let mut d = c;
                d[axis] += 1;
                d
            };
            let flux = (eh23(&cp(0), e, h) - eh23(&c, e, h))
                - (eh13(&cp(1), e, h) - eh13(&c, e, h))
                + (eh12(&cp(2), e, h) - eh12(&c, e, h));
            let energy_e = ed(&c, &rates.e_dot, d) + ed(&c, e, &rates.d_dot);
            let energy_h = bh(&c, &rates.b_dot, h) + bh(&c, b, &rates.h_dot);
            let source = ed(&c, e, j);
            out.component_mut(top)[ix] = flux + 0.5 * energy_e + 0.5 * energy_h + source;
        }
    } else {
        let x = CellSignature::SCALAR;
        let v = top;
        let val = |f: &DiscreteForm, s: CellSignature, c: &[i64; 2]| f.value(s, &c[..]);
        let eh1 = |c: &[i64; 2], e: &DiscreteForm, h: &DiscreteForm| {
            val(e, e1, c) * val(h, x, &[c[0] + 1, c[1]])
        };
        let eh2 = |c: &[i64; 2], e: &DiscreteForm, h: &DiscreteForm| {
            val(e, e2, c) * val(h, x, &[c[0], c[1] + 1])
        };
        let ed = |c: &[i64; 2], e: &DiscreteForm, d: &DiscreteForm| {
            val(e, e1, c) * val(d, e2, &[c[0] + 1, c[1]])
                - val(e, e2, c) * val(d, e1, &[c[0], c[1] + 1])
        };
        let bh = |c: &[i64; 2], b: &DiscreteForm, h: &DiscreteForm| {
            val(b, v, c) * val(h, x, &[c[0] + 1, c[1] + 1])
        };
        for ix in topo.cells() {
            let cu = topo.coords_of(ix);
            let c = [cu[0] as i64, cu[1] as i64];
            let flux = (eh2(&[c[0] + 1, c[1]], e, h) - eh2(&c, e, h))
                - (eh1(&[c[0], c[1] + 1], e, h) - eh1(&c, e, h));
            let energy_e = ed(&c, &rates.e_dot, d) + ed(&c, e, &rates.d_dot);
            let energy_h = bh(&c, &rates.b_dot, h) + bh(&c, b, &rates.h_dot);
            let source = ed(&c, e, j);
            out.component_mut(top)[ix] = flux + 0.5 * energy_e + 0.5 * energy_h + source;
        }
    }
    out
}

/// Residual of the wave equation for E.
///
/// Eliminating H from the curl equations under the primal constitutive set
/// and the source-free Gauss law gives `ΔE = δdE = ∓((1/c²) ∗∗Ë + μ₀ ∗J̇)`,
/// where the overall sign tracks the commutation `d∗∗ = ±∗∗d` (plus in 3D,
/// minus in 2D). The residual returned is
///
/// - 3D: `ΔE + (1/c²) ∗∗Ë + μ₀ ∗J̇`
/// - 2D: `ΔE − (1/c²) ∗∗Ë − μ₀ ∗J̇`
///
/// and vanishes on solutions of the curl equations with `Q = 0`.
pub fn wave_residual_e(
    e: &DiscreteForm,
    e_ddot: &DiscreteForm,
    j_dot: Option<&DiscreteForm>,
    k: &PhysicalConstants,
) -> DiscreteForm {
    let sign = if e.dimension() == 3 { 1.0 } else { -1.0 };
    let mut res = e.laplacian();
    res.axpy(sign / (k.c * k.c), &e_ddot.star().star());
    if let Some(jd) = j_dot {
        res.axpy(sign * k.mu0, &jd.star());
    }
    res
}

/// Wave residual along a sampled E trajectory with uniform step `dt`;
/// second derivatives are central differences, so residuals exist at the
/// interior samples only. `j_dots`, when given, holds `dJ/dt` at every
/// sample.
pub fn wave_residual_e_series(
    es: &[DiscreteForm],
    dt: f64,
    j_dots: Option<&[DiscreteForm]>,
    k: &PhysicalConstants,
) -> Result<Vec<DiscreteForm>, MaxwellError> {
    if es.len() < 3 {
        return Err(MaxwellError::TooFewSamples(es.len()));
    }
    let mut out = Vec::with_capacity(es.len() - 2);
    for i in 1..es.len() - 1 {
        let mut ddot = &(&es[i + 1] - &es[i]) - &(&es[i] - &es[i - 1]);
        ddot.scale(1.0 / (dt * dt));
        let jd = j_dots.map(|j| &j[i]);
        out.push(wave_residual_e(&es[i], &ddot, jd, k));
    }
    Ok(out)
}

/// Electromagnetic potentials: a 1-form A and a 0-form Φ.
#[derive(Debug, Clone, PartialEq)]
pub struct Potentials {
    pub a: DiscreteForm,
    pub phi: DiscreteForm,
}

impl Potentials {
    pub fn new(a: DiscreteForm, phi: DiscreteForm) -> Result<Self, MaxwellError> {
        if a.topology() != phi.topology() {
            return Err(MaxwellError::TopologyMismatch);
        }
        expect_degree("A", &a, 1)?;
        expect_degree("Phi", &phi, 0)?;
        Ok(Potentials { a, phi })
    }
}

/// Fields from potentials: `E = −dΦ − Ȧ`, `B = dA`.
pub fn potentials_to_fields(p: &Potentials, a_dot: &DiscreteForm) -> (DiscreteForm, DiscreteForm) {
    let e = &(-&p.phi.coboundary()) - a_dot;
    let b = p.a.coboundary();
    (e, b)
}

/// Gauge transformation `A' = A + dΨ`, `Φ' = Φ − Ψ̇`. Leaves E and B
/// unchanged.
pub fn gauge_transform(p: &Potentials, psi: &DiscreteForm, psi_dot: &DiscreteForm) -> Potentials {
    Potentials {
        a: &p.a + &psi.coboundary(),
        phi: &p.phi - psi_dot,
    }
}

/// Lorentz-gauge residual `−δA + (1/c²) Φ̇`.
pub fn lorentz_residual(
    p: &Potentials,
    phi_dot: &DiscreteForm,
    k: &PhysicalConstants,
) -> DiscreteForm {
    let mut res = -&p.a.codifferential();
    res.axpy(1.0 / (k.c * k.c), phi_dot);
    res
}

/// Residuals of the potential wave equations under the Lorentz gauge:
///
/// `(ΔA + Ä/c² − μ₀ ∗⁻¹J,  ΔΦ + Φ̈/c² − (1/ε₀) ∗⁻¹Q)`.
pub fn wave_residual_potentials(
    p: &Potentials,
    a_ddot: &DiscreteForm,
    phi_ddot: &DiscreteForm,
    j: &DiscreteForm,
    q: &DiscreteForm,
    k: &PhysicalConstants,
) -> (DiscreteForm, DiscreteForm) {
    let c2 = k.c * k.c;
    let mut res_a = p.a.laplacian();
    res_a.axpy(1.0 / c2, a_ddot);
    res_a.axpy(-k.mu0, &j.star_inverse());
    let mut res_phi = p.phi.laplacian();
    res_phi.axpy(1.0 / c2, phi_ddot);
    res_phi.axpy(-1.0 / k.eps0, &q.star_inverse());
    (res_a, res_phi)
}

/// Flattened ODE view of the Maxwell system with `(D, B)` as the state.
pub struct MaxwellSystem {
    pub topo: LatticeTopology,
    pub constants: PhysicalConstants,
    pub sources: Sources,
}

impl MaxwellSystem {
    pub fn new(topo: LatticeTopology, constants: PhysicalConstants, sources: Sources) -> Self {
        MaxwellSystem {
            topo,
            constants,
            sources,
        }
    }

    fn d_len(&self) -> usize {
        let dim = self.topo.dimension();
        CellSignature::all_of_degree(dim, d_degree(dim)).len() * self.topo.cell_count()
    }

    pub fn state_len(&self) -> usize {
        let dim = self.topo.dimension();
        let b_len = CellSignature::all_of_degree(dim, 2).len() * self.topo.cell_count();
        self.d_len() + b_len
    }

    pub fn pack(&self, d: &DiscreteForm, b: &DiscreteForm) -> Vec<f64> {
        let mut y = d.flatten();
        y.extend(b.flatten());
        y
    }

    pub fn unpack(&self, y: &[f64]) -> (DiscreteForm, DiscreteForm) {
        let dim = self.topo.dimension();
        let split = self.d_len();
        let d = DiscreteForm::from_flat(&self.topo, d_degree(dim), &y[..split])
            .expect("state length fixed by construction");
        let b = DiscreteForm::from_flat(&self.topo, 2, &y[split..])
            .expect("state length fixed by construction");
        (d, b)
    }

    pub fn state_at(&self, t: f64, y: &[f64]) -> FieldState {
        let (d, b) = self.unpack(y);
        FieldState::from_fluxes(t, d, b, &self.constants).expect("degrees fixed by construction")
    }

    pub fn rhs(&self, t: f64, y: &[f64]) -> Vec<f64> {
        let state = self.state_at(t, y);
        let rates = maxwell_rhs(&state, &self.sources, &self.constants);
        self.pack(&rates.d_dot, &rates.b_dot)
    }
}
