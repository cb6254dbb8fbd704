//! Seeded repetitions of one game configuration, with CSV metrics, an
//! aggregate, and a reproducibility manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use advq_core::adversarial::{train, MetricsRow, Seeds, StopReason, TrainResult};
use advq_core::optim::OptimizerSpec;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::svg;

pub const METRICS_HEADER: &str = "iter,value_est,bee_est,bee_exact,trace_dist,wall_ms";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepRecord {
    pub rep: usize,
    pub seeds: Seeds,
    pub stop_reason: StopReason,
    pub final_iter: usize,
    pub final_trace_dist: f64,
    /// SHA-256 over the deterministic metrics columns (wall_ms excluded,
    /// since timing differs between otherwise identical reruns).
    pub metrics_sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub config: ExperimentConfig,
    pub reps: Vec<RepRecord>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct RepOutcome {
    pub rep: usize,
    pub seeds: Seeds,
    pub result: TrainResult,
}

#[derive(Clone, Debug)]
pub struct ExperimentSummary {
    pub outcomes: Vec<RepOutcome>,
    pub manifest: Manifest,
}

impl ExperimentSummary {
    pub fn final_trace_dists(&self) -> Vec<f64> {
        self.outcomes
            .iter()
            .map(|o| o.result.metrics.last().map_or(f64::NAN, |m| m.trace_dist))
            .collect()
    }

    pub fn mean_final_trace_dist(&self) -> f64 {
        let d = self.final_trace_dists();
        d.iter().sum::<f64>() / d.len() as f64
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(METRICS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{:.9},{:.9},{:.9},{:.9},{}\n",
            r.iter, r.value_est, r.bee_est, r.bee_exact, r.trace_dist, r.wall_ms
        ));
    }
    out
}

/// The deterministic projection hashed into the manifest: every column
/// except wall_ms.
pub fn metrics_deterministic_projection(csv: &str) -> String {
    let mut out = String::with_capacity(csv.len());
    for line in csv.lines() {
        match line.rsplit_once(',') {
            Some((head, _wall)) => out.push_str(head),
            None => out.push_str(line),
        }
        out.push('\n');
    }
    out
}

pub fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(CliError::io(path))?;
    f.write_all(contents.as_bytes()).map_err(CliError::io(path))
}

#[derive(Serialize, Deserialize)]
pub struct RepParams {
    pub rep: usize,
    pub seeds: Seeds,
    pub gen_params: Vec<f64>,
    pub disc_params: Vec<f64>,
}

fn aggregate_csv(outcomes: &[RepOutcome]) -> String {
    let max_len = outcomes.iter().map(|o| o.result.metrics.len()).max().unwrap_or(0);
    let mut out = String::new();
    out.push_str("iter,value_est_mean,value_est_std,bee_est_mean,bee_est_std,bee_exact_mean,bee_exact_std,trace_dist_mean,trace_dist_std,wall_ms_mean,wall_ms_std\n");
    for i in 0..max_len {
        let rows: Vec<&MetricsRow> = outcomes.iter().filter_map(|o| o.result.metrics.get(i)).collect();
        if rows.is_empty() {
            continue;
        }
        let stat = |f: &dyn Fn(&MetricsRow) -> f64| -> (f64, f64) {
            let n = rows.len() as f64;
            let mean = rows.iter().map(|r| f(r)).sum::<f64>() / n;
            let var = rows.iter().map(|r| (f(r) - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        };
        let iter = rows[0].iter;
        let (vm, vs) = stat(&|r| r.value_est);
        let (bm, bs) = stat(&|r| r.bee_est);
        let (xm, xs) = stat(&|r| r.bee_exact);
        let (tm, ts) = stat(&|r| r.trace_dist);
        let (wm, ws) = stat(&|r| r.wall_ms as f64);
        out.push_str(&format!(
            "{iter},{vm:.9},{vs:.9},{bm:.9},{bs:.9},{xm:.9},{xs:.9},{tm:.9},{ts:.9},{wm:.3},{ws:.3}\n"
        ));
    }
    out
}

/// Run `repetitions` independent trainings and write all artifacts into
/// `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let started = unix_now();

    let mut outcomes: Vec<RepOutcome> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            let game = config.game_for_rep(rep);
            let seeds = game.seeds;
            let result = train(&game).map_err(CliError::from)?;
            Ok(RepOutcome { rep, seeds, result })
        })
        .collect::<Result<Vec<_>>>()?;
    outcomes.sort_by_key(|o| o.rep);

    let mut reps = Vec::with_capacity(outcomes.len());
    for outcome in &outcomes {
        let csv = metrics_csv(&outcome.result.metrics);
        let csv_path = dir.join(format!("rep_{:03}.csv", outcome.rep));
        write_file(&csv_path, &csv)?;

        let params = RepParams {
            rep: outcome.rep,
            seeds: outcome.seeds,
            gen_params: outcome.result.gen_params.clone(),
            disc_params: outcome.result.disc_params.clone(),
        };
        let params_path = dir.join(format!("rep_{:03}_params.json", outcome.rep));
        let params_json = serde_json::to_string_pretty(&params)
            .map_err(|e| CliError::Config(format!("serialize params: {e}")))?;
        write_file(&params_path, &params_json)?;

        let last = outcome.result.metrics.last();
        reps.push(RepRecord {
            rep: outcome.rep,
            seeds: outcome.seeds,
            stop_reason: outcome.result.stop_reason,
            final_iter: last.map_or(0, |m| m.iter),
            final_trace_dist: last.map_or(f64::NAN, |m| m.trace_dist),
            metrics_sha256: sha256_hex(&metrics_deterministic_projection(&csv)),
        });
    }

    write_file(&dir.join("aggregate.csv"), &aggregate_csv(&outcomes))?;

    if config.emit_svg {
        let chart = svg::learning_curves(&outcomes);
        write_file(&dir.join("curves.svg"), &chart)?;
    }

    let mut notes = vec![format!(
        "seeds per repetition derive from the base seeds; rep r uses seeds.for_repetition(r)"
    )];
    if matches!(config.game.optimizer, OptimizerSpec::Gdm { .. }) || !config.gdm_epsilons.is_empty() {
        notes.push(format!(
            "gdm momentum mu = {} is an implementation default, not a published value",
            config.gdm_mu
        ));
    }
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: unix_now(),
        config: config.clone(),
        reps,
        notes,
    };
    let manifest_json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Config(format!("serialize manifest: {e}")))?;
    write_file(&dir.join("manifest.json"), &manifest_json)?;

    Ok(ExperimentSummary { outcomes, manifest })
}

pub fn read_manifest(run_dir: &Path) -> Result<Manifest> {
    let path = run_dir.join("manifest.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|_| CliError::MissingArtifact(format!("{} not found", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::MissingArtifact(format!("manifest unreadable: {e}")))
}

pub fn read_rep_params(run_dir: &Path, rep: usize) -> Result<RepParams> {
    let path = run_dir.join(format!("rep_{rep:03}_params.json"));
    let text = std::fs::read_to_string(&path)
        .map_err(|_| CliError::MissingArtifact(format!("{} not found", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::MissingArtifact(format!("params unreadable: {e}")))
}

/// Output directory helper used by the study subcommands.
pub fn subdir(base: &Path, name: &str) -> PathBuf {
    base.join(name)
}
