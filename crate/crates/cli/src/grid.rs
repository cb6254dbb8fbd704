//! Complexity-grid study: one experiment per (generator layers,
//! discriminator layers) cell, reporting the mean final trace distance.

use std::io::Write;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::experiment::{run_experiment, ExperimentSummary};
use crate::svg;

pub struct GridCell {
    pub gen_layers: usize,
    pub disc_layers: usize,
    pub mean_final: f64,
    pub std_final: f64,
}

pub struct GridSummary {
    pub cells: Vec<GridCell>,
    pub summaries: Vec<ExperimentSummary>,
}

pub fn run_complexity_grid(base: &ExperimentConfig) -> Result<GridSummary> {
    base.validate()?;
    let dir = &base.output_dir;
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;

    let mut cells = Vec::new();
    let mut summaries = Vec::new();
    for &cg in &base.grid_gen_layers {
        for &cd in &base.grid_disc_layers {
            let mut cell_config = base.clone();
            cell_config.game.gen_layers = cg;
            cell_config.game.disc_layers = cd;
            cell_config.output_dir = dir.join(format!("cell_cg{cg}_cd{cd}"));
            cell_config.emit_svg = false;
            let summary = run_experiment(&cell_config)?;
            let finals = summary.final_trace_dists();
            let n = finals.len() as f64;
            let mean = finals.iter().sum::<f64>() / n;
            let std = (finals.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n).sqrt();
            cells.push(GridCell { gen_layers: cg, disc_layers: cd, mean_final: mean, std_final: std });
            summaries.push(summary);
        }
    }

    let mut csv = String::from("c_g,c_d,trace_dist_mean,trace_dist_std\n");
    for c in &cells {
        csv.push_str(&format!(
            "{},{},{:.9},{:.9}\n",
            c.gen_layers, c.disc_layers, c.mean_final, c.std_final
        ));
    }
    let csv_path = dir.join("grid.csv");
    let mut f = std::fs::File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    f.write_all(csv.as_bytes()).map_err(CliError::io(&csv_path))?;

    if base.emit_svg {
        let values: Vec<Vec<f64>> = base
            .grid_gen_layers
            .iter()
            .map(|&cg| {
                base.grid_disc_layers
                    .iter()
                    .map(|&cd| {
                        cells
                            .iter()
                            .find(|c| c.gen_layers == cg && c.disc_layers == cd)
                            .map_or(f64::NAN, |c| c.mean_final)
                    })
                    .collect()
            })
            .collect();
        let heat = svg::grid_heatmap(&base.grid_gen_layers, &base.grid_disc_layers, &values);
        let heat_path = dir.join("grid.svg");
        let mut f = std::fs::File::create(&heat_path).map_err(CliError::io(&heat_path))?;
        f.write_all(heat.as_bytes()).map_err(CliError::io(&heat_path))?;
    }

    Ok(GridSummary { cells, summaries })
}
