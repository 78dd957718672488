//! `decem torus`: export the matrices, the eigen report, and an
//! analytic / matrix-exponential / RK4 trajectory comparison.

use std::io::Write;
use std::path::Path;

use decem::integrate::integrate;
use decem::torus::{
    analytic_solution, build_torus_system, constraint_reduce, eigenstructure, fit_constants,
    m2_rhs, matrix_exponential_propagate, EigenReport, MatricesReport, REDUCED_LABELS,
};

use crate::scenario::parse_x0;
use crate::CliError;

pub fn run(t_end: f64, dt: f64, x0_spec: &str, seed: u64, out_dir: &Path) -> Result<(), CliError> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(CliError::Validation(format!("--dt must be positive, got {dt}")));
    }
    if t_end.is_nan() || t_end < 0.0 {
        return Err(CliError::Validation(format!(
            "--t-end must be non-negative, got {t_end}"
        )));
    }
    std::fs::create_dir_all(out_dir)?;

    let sys = build_torus_system().map_err(|e| CliError::Check(e.to_string()))?;
    let reduction = constraint_reduce(&sys).map_err(|e| CliError::Check(e.to_string()))?;
    let es = eigenstructure(&sys).map_err(|e| CliError::Check(e.to_string()))?;

    let matrices = MatricesReport::new(&sys, &reduction);
    let matrices_path = out_dir.join("matrices.json");
    std::fs::write(
        &matrices_path,
        serde_json::to_string_pretty(&matrices).expect("matrices serialize"),
    )?;

    let eigen = EigenReport::new(&es);
    let eigen_path = out_dir.join("eigen_report.json");
    std::fs::write(
        &eigen_path,
        serde_json::to_string_pretty(&eigen).expect("eigen report serializes"),
    )?;

    let x0 = parse_x0(x0_spec, seed, &es.basis)?;
    let coefficients = fit_constants(&es, &x0).map_err(|e| CliError::Check(e.to_string()))?;
    let sol =
        analytic_solution(&sys, &es, coefficients).map_err(|e| CliError::Check(e.to_string()))?;

    let rhs = m2_rhs(&sys);
    let mut f = |t: f64, y: &[f64]| rhs(t, y);
    let trajectory =
        integrate(&mut f, &x0, t_end, dt).map_err(|e| CliError::Validation(e.to_string()))?;

    // sample at most ~200 rows
    let stride = (trajectory.len() / 200).max(1);
    let comparison_path = out_dir.join("comparison.csv");
    let mut w = std::io::BufWriter::new(std::fs::File::create(&comparison_path)?);
    let mut header = vec!["t".to_string()];
    for label in REDUCED_LABELS {
        header.push(format!("analytic_{label}"));
    }
    for label in REDUCED_LABELS {
        header.push(format!("expm_{label}"));
    }
    for label in REDUCED_LABELS {
        header.push(format!("rk4_{label}"));
    }
    header.push("err_analytic_vs_expm".into());
    header.push("err_rk4_vs_expm".into());
    writeln!(w, "{}", header.join(","))?;

    let mut max_analytic_err = 0.0f64;
    let mut max_rk4_err = 0.0f64;
    for (i, (&t, y)) in trajectory
        .times
        .iter()
        .zip(&trajectory.states)
        .enumerate()
    {
        if i % stride != 0 && i + 1 != trajectory.len() {
            continue;
        }
        let analytic = sol.evaluate(t);
        let oracle = matrix_exponential_propagate(&sys, &x0, t);
        let err_a = analytic
            .iter()
            .zip(oracle.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let err_r = y
            .iter()
            .zip(oracle.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        max_analytic_err = max_analytic_err.max(err_a);
        max_rk4_err = max_rk4_err.max(err_r);
        let mut row = vec![format!("{t:.6}")];
        row.extend(analytic.iter().map(|v| format!("{v:.17e}")));
        row.extend(oracle.iter().map(|v| format!("{v:.17e}")));
        row.extend(y.iter().map(|v| format!("{v:.17e}")));
        row.push(format!("{err_a:.3e}"));
        row.push(format!("{err_r:.3e}"));
        writeln!(w, "{}", row.join(","))?;
    }
    drop(w);

    println!("matrices: {}", matrices_path.display());
    println!("eigen report: {}", eigen_path.display());
    println!("comparison: {}", comparison_path.display());
    println!(
        "rank(M1) = {}; charpoly (ascending) = {:?}",
        reduction.rank, es.charpoly
    );
    println!(
        "oscillatory pair: ω = {:.12}, sign = {}, separable cos/sin form fundamental: {}",
        es.omega, es.complex_sign, es.separable_osc_form_is_fundamental
    );
    println!(
        "max |analytic − expm| = {max_analytic_err:.3e}, max |rk4 − expm| = {max_rk4_err:.3e}"
    );
    if max_analytic_err > 1e-8 {
        return Err(CliError::Check(format!(
            "analytic solution disagrees with the matrix exponential: {max_analytic_err:e} > 1e-8"
        )));
    }
    Ok(())
}
