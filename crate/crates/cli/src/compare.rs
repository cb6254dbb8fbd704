//! Optimizer comparison: run the same targets and initializations under
//! iRprop-minus and two gradient-descent-with-momentum step sizes.

use std::io::Write;

use advq_core::optim::{IRpropConfig, OptimizerSpec};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::experiment::{run_experiment, ExperimentSummary};
use crate::svg;

pub struct OptimizerRun {
    pub label: String,
    pub summary: ExperimentSummary,
    pub mean_final: f64,
}

pub fn run_optimizer_comparison(base: &ExperimentConfig) -> Result<Vec<OptimizerRun>> {
    base.validate()?;
    let dir = &base.output_dir;
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;

    let mut variants: Vec<(String, OptimizerSpec)> = vec![(
        "irprop".to_string(),
        OptimizerSpec::Irprop { config: IRpropConfig::experiment_defaults() },
    )];
    for &epsilon in &base.gdm_epsilons {
        variants.push((format!("gdm-{epsilon}"), OptimizerSpec::Gdm { epsilon, mu: base.gdm_mu }));
    }

    let mut runs = Vec::new();
    for (label, optimizer) in variants {
        let mut config = base.clone();
        config.game.optimizer = optimizer;
        config.output_dir = dir.join(&label);
        config.emit_svg = false;
        let summary = run_experiment(&config)?;
        let mean_final = summary.mean_final_trace_dist();
        runs.push(OptimizerRun { label, summary, mean_final });
    }

    let mut csv = String::from("optimizer,rep,final_trace_dist\n");
    for run in &runs {
        for (rep, d) in run.summary.final_trace_dists().iter().enumerate() {
            csv.push_str(&format!("{},{rep},{d:.9}\n", run.label));
        }
    }
    let csv_path = dir.join("comparison.csv");
    let mut f = std::fs::File::create(&csv_path).map_err(CliError::io(&csv_path))?;
    f.write_all(csv.as_bytes()).map_err(CliError::io(&csv_path))?;

    if base.emit_svg {
        let series: Vec<(String, Vec<(f64, f64)>)> = runs
            .iter()
            .map(|r| (r.label.clone(), svg::mean_distance_series(&r.summary.outcomes)))
            .collect();
        let chart = svg::comparison_curves(&series);
        let chart_path = dir.join("comparison.svg");
        let mut f = std::fs::File::create(&chart_path).map_err(CliError::io(&chart_path))?;
        f.write_all(chart.as_bytes()).map_err(CliError::io(&chart_path))?;
    }

    Ok(runs)
}
