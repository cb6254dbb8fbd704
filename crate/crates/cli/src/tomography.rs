//! Dump dense density-matrix reconstructions of the target and the final
//! generated state from a completed run. Simulator-only diagnostic.

use std::io::Write;
use std::path::Path;

use advq_core::circuits::{build_layered, make_target, LayerSpec};
use advq_core::qstate::StateVector;

use crate::error::{CliError, Result};
use crate::experiment::{read_manifest, read_rep_params};
use crate::svg;

fn abs_density(state: &StateVector) -> Vec<Vec<f64>> {
    let amps = state.amplitudes();
    let dim = amps.len();
    (0..dim)
        .map(|i| (0..dim).map(|j| (amps[i] * amps[j].conj()).norm()).collect())
        .collect()
}

fn matrix_csv(m: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.9}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn write(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(CliError::io(path))?;
    f.write_all(contents.as_bytes()).map_err(CliError::io(path))
}

/// Rebuild the target and generated states of repetition `rep` from the run
/// artifacts and write |rho| entry matrices as CSV (and optionally SVG).
pub fn dump_tomography(run_dir: &Path, rep: usize, emit_svg: bool) -> Result<()> {
    let manifest = read_manifest(run_dir)?;
    let params = read_rep_params(run_dir, rep)?;
    let game = &manifest.config.game;
    if game.num_qubits > 8 {
        return Err(CliError::Config(format!(
            "tomography dump is capped at 8 qubits, run has {}",
            game.num_qubits
        )));
    }

    let target = make_target(params.seeds.target, game.num_qubits, game.target_layers)
        .map_err(CliError::from)?;
    let gen = build_layered(&LayerSpec::new(game.num_qubits, game.gen_layers)?, 0)?;
    if params.gen_params.len() != gen.num_params() {
        return Err(CliError::MissingArtifact(format!(
            "stored generator parameters ({}) do not match the circuit ({})",
            params.gen_params.len(),
            gen.num_params()
        )));
    }
    let generated = gen.run_from_zero(&params.gen_params, game.num_qubits)?;

    let rho_t = abs_density(&target.state);
    let rho_g = abs_density(&generated);
    write(&run_dir.join("rho_target_abs.csv"), &matrix_csv(&rho_t))?;
    write(
        &run_dir.join(format!("rho_generated_rep{rep:03}_abs.csv")),
        &matrix_csv(&rho_g),
    )?;

    if emit_svg {
        write(
            &run_dir.join("rho_target_abs.svg"),
            &svg::density_heatmap(&rho_t, "target |rho| entries"),
        )?;
        write(
            &run_dir.join(format!("rho_generated_rep{rep:03}_abs.svg")),
            &svg::density_heatmap(&rho_g, "generated |rho| entries"),
        )?;
    }
    Ok(())
}
