//! `decem simulate`: integrate a scenario and export component time series
//! plus per-step residual diagnostics.

use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

use decem::forms::DiscreteForm;
use decem::lattice::{CellSignature, LatticeTopology};
use decem::maxwell::{field_rates, gauss_residual, poynting_residual, MaxwellSystem};

use crate::scenario::{self, Scenario};
use crate::CliError;

/// Column labels of a form, one per (signature, cell), 1-based.
///
/// On the 2×2 fully periodic plane the labels collapse to the compact torus
/// names (`E1_21`, `H_12`, …); elsewhere coordinates stay underscore
/// separated (`E1_2_1`).
pub fn component_labels(prefix: &str, topo: &LatticeTopology, degree: usize) -> Vec<String> {
    let dim = topo.dimension();
    let torus_style = *topo == LatticeTopology::torus_2x2();
    let mut labels = Vec::new();
    for sig in CellSignature::all_of_degree(dim, degree) {
        let axes: String = sig.axes().iter().map(|a| (a + 1).to_string()).collect();
        for ix in topo.cells() {
            let coords = topo.coords_of(ix);
            let cell: Vec<String> = coords.iter().map(|&c| (c + 1).to_string()).collect();
            let cell = if torus_style {
                cell.join("")
            } else {
                cell.join("_")
            };
            labels.push(format!("{prefix}{axes}_{cell}"));
        }
    }
    labels
}

/// Torus scenarios write columns in the established component order
/// (E1_11 … E2_21, H_11 … H_22) rather than raw storage order.
fn torus_order(topo: &LatticeTopology, e_len: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    if *topo != LatticeTopology::torus_2x2() {
        return None;
    }
    // map the flattened storage order to the torus label order
    let e_sigs = CellSignature::all_of_degree(2, 1);
    let flat_pos = |sig: CellSignature, cell: [usize; 2]| -> usize {
        let slot = e_sigs.iter().position(|&s| s == sig).unwrap();
        slot * topo.cell_count() + topo.linear_index(&cell)
    };
    let e1 = CellSignature::from_axes(&[0]);
    let e2 = CellSignature::from_axes(&[1]);
    let e_order = vec![
        flat_pos(e1, [0, 0]),
        flat_pos(e1, [1, 0]),
        flat_pos(e2, [0, 1]),
        flat_pos(e2, [0, 0]),
        flat_pos(e1, [0, 1]),
        flat_pos(e1, [1, 1]),
        flat_pos(e2, [1, 1]),
        flat_pos(e2, [1, 0]),
    ];
    debug_assert!(e_order.iter().all(|&p| p < e_len));
    let h_order = vec![
        topo.linear_index(&[0, 0]),
        topo.linear_index(&[1, 0]),
        topo.linear_index(&[0, 1]),
        topo.linear_index(&[1, 1]),
    ];
    Some((e_order, h_order))
}

#[derive(Serialize)]
struct DiagnosticsEntry {
    t: f64,
    gauss_electric_norm: f64,
    gauss_magnetic_norm: f64,
    poynting_residual_norm: f64,
    energy: f64,
}

pub fn run(
    path: &Path,
    csv_override: Option<PathBuf>,
    diagnostics_override: Option<PathBuf>,
    plot_data: Option<PathBuf>,
) -> Result<(), CliError> {
    let scenario = scenario::load(path)?;
    let csv_path = csv_override.or_else(|| scenario.csv.clone());
    let diag_path = diagnostics_override.or_else(|| scenario.diagnostics.clone());
    let outputs = simulate(&scenario)?;

    if let Some(p) = &csv_path {
        write_csv(p, &outputs)?;
        println!("trajectory: {}", p.display());
    }
    if let Some(p) = &diag_path {
        let json = serde_json::to_string_pretty(&outputs.diagnostics)
            .expect("diagnostics serialize cleanly");
        std::fs::write(p, json)?;
        println!("diagnostics: {}", p.display());
    }
    if let Some(p) = &plot_data {
        write_plot_data(p, &outputs)?;
        println!("plot data: {}", p.display());
    }
    let last = outputs
        .diagnostics
        .last()
        .expect("at least the initial snapshot");
    println!(
        "final t = {}: energy {:.6e}, gauss residuals (E {:.3e}, B {:.3e})",
        last.t, last.energy, last.gauss_electric_norm, last.gauss_magnetic_norm
    );
    Ok(())
}

struct SimOutputs {
    header: Vec<String>,
    rows: Vec<Vec<f64>>, // t followed by the labelled components
    diagnostics: Vec<DiagnosticsEntry>,
}

fn simulate(scenario: &Scenario) -> Result<SimOutputs, CliError> {
    let topo = &scenario.topo;
    let dim = topo.dimension();
    let sys = MaxwellSystem::new(
        topo.clone(),
        scenario.constants,
        scenario.sources.clone(),
    );
    let e_labels = component_labels("E", topo, 1);
    let h_labels = component_labels("H", topo, decem::maxwell::h_degree(dim));
    let order = torus_order(topo, e_labels.len());
    let mut header = vec!["t".to_string()];
    match &order {
        Some((e_order, h_order)) => {
            header.extend(e_order.iter().map(|&i| e_labels[i].clone()));
            header.extend(h_order.iter().map(|&i| h_labels[i].clone()));
        }
        None => {
            header.extend(e_labels.iter().cloned());
            header.extend(h_labels.iter().cloned());
        }
    }

    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    let y0 = sys.pack(&scenario.initial.d, &scenario.initial.b);
    let constants = scenario.constants;
    let sources = scenario.sources.clone();
    let mut rhs = |t: f64, y: &[f64]| sys.rhs(t, y);
    let observe = |t: f64, y: &[f64]| {
        let state = sys.state_at(t, y);
        let mut row = vec![t];
        let e_flat = state.e.flatten();
        let h_flat = state.h.flatten();
        match &order {
            Some((e_order, h_order)) => {
                row.extend(e_order.iter().map(|&i| e_flat[i]));
                row.extend(h_order.iter().map(|&i| h_flat[i]));
            }
            None => {
                row.extend(e_flat);
                row.extend(h_flat);
            }
        }
        rows.push(row);
        let (ge, gb) = gauss_residual(&state, &sources);
        let rates = field_rates(&state, &sources, &constants);
        let j = sources.current_at(state.topology(), t);
        let poynting = poynting_residual(&state, &rates, &j)
            .expect("degrees validated at load time");
        diagnostics.push(DiagnosticsEntry {
            t,
            gauss_electric_norm: ge.norm_inf(),
            gauss_magnetic_norm: gb.norm_inf(),
            poynting_residual_norm: poynting.norm_inf(),
            energy: energy_of(&state.e, &state.h),
        });
    };
    decem::integrate::integrate_observed(&mut rhs, &y0, scenario.t_end, scenario.dt, observe)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(SimOutputs {
        header,
        rows,
        diagnostics,
    })
}

fn energy_of(e: &DiscreteForm, h: &DiscreteForm) -> f64 {
    let dom = decem::calculus::InnerProductDomain::full(e.topology());
    e.inner(e, &dom).unwrap() + h.inner(h, &dom).unwrap()
}

fn write_csv(path: &Path, out: &SimOutputs) -> Result<(), CliError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "{}", out.header.join(","))?;
    for row in &out.rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

fn write_plot_data(path: &Path, out: &SimOutputs) -> Result<(), CliError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "t,series,value")?;
    for row in &out.rows {
        for (label, value) in out.header[1..].iter().zip(&row[1..]) {
            writeln!(w, "{:.17e},{label},{value:.17e}", row[0])?;
        }
    }
    Ok(())
}
