//! `decem verify`: the randomized operator-identity suite as a command.

use std::path::PathBuf;

use decem::lattice::LatticeTopology;
use decem::verify::{run_verification, VerifyConfig};

use crate::CliError;

fn parse_sizes(spec: &str) -> Result<Vec<LatticeTopology>, CliError> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let extents: Result<Vec<usize>, _> =
            part.trim().split('x').map(|p| p.parse::<usize>()).collect();
        let extents =
            extents.map_err(|_| CliError::Parse(format!("bad lattice size `{part}`")))?;
        let topo = LatticeTopology::periodic(&extents)
            .map_err(|e| CliError::Parse(format!("bad lattice size `{part}`: {e}")))?;
        out.push(topo);
    }
    if out.is_empty() {
        return Err(CliError::Parse("no lattice sizes given".into()));
    }
    Ok(out)
}

pub fn run(
    sizes: Option<&str>,
    trials: usize,
    seed: u64,
    report_path: Option<PathBuf>,
) -> Result<(), CliError> {
    if trials < 1 {
        return Err(CliError::Validation("--trials must be at least 1".into()));
    }
    let mut cfg = VerifyConfig {
        trials,
        seed,
        ..VerifyConfig::default()
    };
    if let Some(spec) = sizes {
        cfg.lattices = parse_sizes(spec)?;
    }
    let report = run_verification(&cfg);
    println!(
        "{:<38} {:>7} {:>13} {:>9} {:>7} {:>8}",
        "check", "trials", "max residual", "tol", "result", "ms"
    );
    for c in &report.checks {
        println!(
            "{:<38} {:>7} {:>13.3e} {:>9.1e} {:>7} {:>8}",
            c.name,
            c.trials,
            c.max_residual,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" },
            c.elapsed_ms
        );
    }
    if let Some(path) = report_path {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(&path, json)?;
        println!("report: {}", path.display());
    }
    if report.pass {
        println!("all {} checks passed (seed {})", report.checks.len(), seed);
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "failed checks: {}",
            report.failed_checks().join(", ")
        )))
    }
}
