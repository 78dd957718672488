//! Scenario files: lattice, constants, initial data, sources and run
//! parameters, all as JSON.

use serde::Deserialize;
use std::path::Path;

use decem::forms::{DiscreteForm, FormPayload};
use decem::lattice::LatticeTopology;
use decem::maxwell::{d_degree, h_degree, FieldState, PhysicalConstants, SourceTerm, Sources};
use decem::torus::{analytic_solution, build_torus_system, eigenstructure, lift};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub constants: Option<ConstantsSpec>,
    pub initial: InitialSpec,
    #[serde(default)]
    pub sources: Option<SourcesSpec>,
    pub run: RunSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub extents: Vec<usize>,
    /// Per-axis periodicity; defaults to fully periodic.
    #[serde(default)]
    pub periodic: Option<Vec<bool>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    pub eps0: f64,
    pub mu0: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Intensities E und H as form payloads.
    Fields { e: FormPayload, h: FormPayload },
    /// Fluxes D and B as form payloads.
    Fluxes { d: FormPayload, b: FormPayload },
    /// Reduced 9-component torus state (2×2 fully periodic 2D only).
    TorusState { x0: Vec<f64> },
    /// Mode coefficients c1..c9 of the torus general solution.
    TorusModes { coefficients: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourcesSpec {
    #[serde(default)]
    pub current: Option<SourceSpec>,
    #[serde(default)]
    pub charge: Option<SourceSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Zero,
    Constant { value: FormPayload },
    /// `amplitude · sin(omega t)` with per-component amplitudes.
    Sinusoid { omega: f64, amplitude: FormPayload },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub t_end: f64,
    pub dt: f64,
    #[serde(default)]
    pub csv: Option<std::path::PathBuf>,
    #[serde(default)]
    pub diagnostics: Option<std::path::PathBuf>,
}

/// A validated, ready-to-run scenario.
pub struct Scenario {
    pub topo: LatticeTopology,
    pub constants: PhysicalConstants,
    pub initial: FieldState,
    pub sources: Sources,
    pub t_end: f64,
    pub dt: f64,
    pub csv: Option<std::path::PathBuf>,
    pub diagnostics: Option<std::path::PathBuf>,
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    validate(file)
}

fn form_from_payload(
    payload: &FormPayload,
    topo: &LatticeTopology,
    what: &str,
    expected_degree: usize,
) -> Result<DiscreteForm, CliError> {
    let form = DiscreteForm::from_payload(payload)
        .map_err(|e| CliError::Validation(format!("{what}: {e}")))?;
    if form.topology() != topo {
        return Err(CliError::Validation(format!(
            "{what}: lattice mismatch with the scenario lattice"
        )));
    }
    if form.degree() != expected_degree {
        return Err(CliError::Validation(format!(
            "{what}: expected a {expected_degree}-form, got degree {}",
            form.degree()
        )));
    }
    Ok(form)
}

fn source_from_spec(
    spec: Option<&SourceSpec>,
    topo: &LatticeTopology,
    what: &str,
    degree: usize,
) -> Result<SourceTerm, CliError> {
    match spec {
        None | Some(SourceSpec::Zero) => Ok(SourceTerm::Zero),
        Some(SourceSpec::Constant { value }) => Ok(SourceTerm::Constant(form_from_payload(
            value, topo, what, degree,
        )?)),
        Some(SourceSpec::Sinusoid { omega, amplitude }) => Ok(SourceTerm::Sinusoid {
            amplitude: form_from_payload(amplitude, topo, what, degree)?,
            omega: *omega,
        }),
    }
}

fn validate(file: ScenarioFile) -> Result<Scenario, CliError> {
    let periodic = file
        .lattice
        .periodic
        .clone()
        .unwrap_or_else(|| vec![true; file.lattice.extents.len()]);
    let topo = LatticeTopology::new(&file.lattice.extents, &periodic)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    // the flux evolution relies on the exact ∗⁻¹ recovery, which needs
    // wrap-around; truncated windows are a calculus-level feature only
    if !topo.is_fully_periodic() {
        return Err(CliError::Validation(
            "simulation lattices must be periodic on every axis".into(),
        ));
    }
    let constants = match &file.constants {
        None => PhysicalConstants::natural(),
        Some(c) => PhysicalConstants::new(c.eps0, c.mu0)
            .map_err(|e| CliError::Validation(e.to_string()))?,
    };
    if file.run.dt.is_nan() || file.run.dt <= 0.0 {
        return Err(CliError::Validation(format!(
            "run.dt must be positive, got {}",
            file.run.dt
        )));
    }
    if file.run.t_end < 0.0 {
        return Err(CliError::Validation(format!(
            "run.t_end must be non-negative, got {}",
            file.run.t_end
        )));
    }
    let dim = topo.dimension();
    let initial = match &file.initial {
        InitialSpec::Fields { e, h } => {
            let e = form_from_payload(e, &topo, "initial.e", 1)?;
            let h = form_from_payload(h, &topo, "initial.h", h_degree(dim))?;
            FieldState::from_intensities(0.0, e, h, &constants)
                .map_err(|e| CliError::Validation(e.to_string()))?
        }
        InitialSpec::Fluxes { d, b } => {
            let d = form_from_payload(d, &topo, "initial.d", d_degree(dim))?;
            let b = form_from_payload(b, &topo, "initial.b", 2)?;
            FieldState::from_fluxes(0.0, d, b, &constants)
                .map_err(|e| CliError::Validation(e.to_string()))?
        }
        InitialSpec::TorusState { x0 } => torus_initial(&topo, &constants, x0, false)?,
        InitialSpec::TorusModes { coefficients } => {
            torus_initial(&topo, &constants, coefficients, true)?
        }
    };
    let sources = Sources {
        current: source_from_spec(
            file.sources.as_ref().and_then(|s| s.current.as_ref()),
            &topo,
            "sources.current",
            d_degree(dim),
        )?,
        charge: source_from_spec(
            file.sources.as_ref().and_then(|s| s.charge.as_ref()),
            &topo,
            "sources.charge",
            dim,
        )?,
    };
    Ok(Scenario {
        topo,
        constants,
        initial,
        sources,
        t_end: file.run.t_end,
        dt: file.run.dt,
        csv: file.run.csv,
        diagnostics: file.run.diagnostics,
    })
}

fn torus_initial(
    topo: &LatticeTopology,
    constants: &PhysicalConstants,
    values: &[f64],
    as_modes: bool,
) -> Result<FieldState, CliError> {
    if *topo != LatticeTopology::torus_2x2() {
        return Err(CliError::Validation(
            "torus initial data requires the 2x2 fully periodic 2D lattice".into(),
        ));
    }
    if values.len() != 9 {
        return Err(CliError::Validation(format!(
            "torus initial data needs 9 components, got {}",
            values.len()
        )));
    }
    let mut x0 = [0.0; 9];
    x0.copy_from_slice(values);
    let reduced = if as_modes {
        let sys = build_torus_system().map_err(|e| CliError::Check(e.to_string()))?;
        let es = eigenstructure(&sys).map_err(|e| CliError::Check(e.to_string()))?;
        let sol = analytic_solution(&sys, &es, x0).map_err(|e| CliError::Check(e.to_string()))?;
        sol.evaluate(0.0)
    } else {
        x0
    };
    let full = lift(&reduced);
    let (e, h) = decem::torus::eh_to_forms(&full);
    FieldState::from_intensities(0.0, e, h, constants)
        .map_err(|e| CliError::Validation(e.to_string()))
}

/// Reduced-coordinate initial vector from a CLI spec: "random", "h1".."h9"
/// or nine comma-separated numbers.
pub fn parse_x0(spec: &str, seed: u64, basis: &[[f64; 9]; 9]) -> Result<[f64; 9], CliError> {
    if spec == "random" {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut x0 = [0.0; 9];
        for v in x0.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        return Ok(x0);
    }
    if let Some(rest) = spec.strip_prefix('h') {
        let i: usize = rest
            .parse()
            .map_err(|_| CliError::Parse(format!("bad basis vector spec `{spec}`")))?;
        if !(1..=9).contains(&i) {
            return Err(CliError::Parse(format!("basis vector index {i} out of 1..9")));
        }
        return Ok(basis[i - 1]);
    }
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 9 {
        return Err(CliError::Parse(format!(
            "expected 9 comma-separated numbers, got {}",
            parts.len()
        )));
    }
    let mut x0 = [0.0; 9];
    for (i, p) in parts.iter().enumerate() {
        x0[i] = p
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("bad number `{p}` in x0")))?;
    }
    Ok(x0)
}
