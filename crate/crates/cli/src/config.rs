//! Experiment configuration: presets, flat key=value config files, and CLI
//! overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use advq_core::adversarial::{GameConfig, Seeds, StopConfig};
use advq_core::optim::{IRpropConfig, OptimizerSpec};

use crate::error::{CliError, Result};

/// Momentum used for the GDM baselines. Not derived from any published
/// value; recorded in every manifest.
pub const GDM_DEFAULT_MU: f64 = 0.9;

/// Inner optimizer steps per turn used by the four-qubit presets. One
/// generator step against a discriminator turn long enough to keep the
/// labeling near its best response; see the manifest notes.
pub const PRESET_GEN_STEPS: usize = 1;
pub const PRESET_DISC_STEPS: usize = 15;

/// Steps per turn for the six-qubit study presets, traded down for breadth.
pub const STUDY_DISC_STEPS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Fig2Left,
    Fig2Center,
    Fig2Right,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "fig2-left" => Ok(Preset::Fig2Left),
            "fig2-center" => Ok(Preset::Fig2Center),
            "fig2-right" => Ok(Preset::Fig2Right),
            "fig3" => Ok(Preset::Fig3),
            "fig4" => Ok(Preset::Fig4),
            "fig5" => Ok(Preset::Fig5),
            "fig6" => Ok(Preset::Fig6),
            other => Err(CliError::Config(format!(
                "unknown preset '{other}' (expected fig2-left, fig2-center, fig2-right, fig3, fig4, fig5, fig6)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig2Left => "fig2-left",
            Preset::Fig2Center => "fig2-center",
            Preset::Fig2Right => "fig2-right",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
        }
    }

    /// Layer counts (target, generator, discriminator) for single-run
    /// presets; the grid and optimizer-study presets carry their own.
    fn layers(&self) -> (usize, usize, usize) {
        match self {
            Preset::Fig2Left => (2, 2, 1),
            Preset::Fig2Center | Preset::Fig3 => (2, 1, 2),
            Preset::Fig2Right | Preset::Fig4 => (2, 2, 2),
            Preset::Fig5 | Preset::Fig6 => (3, 3, 3),
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, Preset::Fig5)
    }

    pub fn is_comparison(&self) -> bool {
        matches!(self, Preset::Fig6)
    }

    /// Fully expanded experiment configuration. `full` switches the study
    /// presets from desk scale to the published scale.
    pub fn expand(&self, master_seed: u64, full: bool) -> ExperimentConfig {
        let (c_t, c_g, c_d) = self.layers();
        let (num_qubits, max_iters, reps, stop, disc_steps) = match self {
            Preset::Fig5 | Preset::Fig6 => {
                let reps = if *self == Preset::Fig6 { 5 } else if full { 5 } else { 3 };
                (6, 600, reps, None, STUDY_DISC_STEPS)
            }
            _ => (4, 300, 10, Some(StopConfig::default()), PRESET_DISC_STEPS),
        };
        ExperimentConfig {
            game: GameConfig {
                num_qubits,
                target_layers: c_t,
                gen_layers: c_g,
                disc_layers: c_d,
                prior_target: 0.5,
                shots: 100,
                max_iters,
                gen_steps_per_iter: PRESET_GEN_STEPS,
                disc_steps_per_iter: disc_steps,
                gen_common_random: true,
                disc_common_random: true,
                optimizer: OptimizerSpec::Irprop { config: IRpropConfig::experiment_defaults() },
                stop,
                seeds: Seeds::from_master(master_seed),
            },
            repetitions: reps,
            output_dir: PathBuf::from("out"),
            emit_svg: false,
            preset: Some(*self),
            master_seed: Some(master_seed),
            grid_gen_layers: if full { vec![2, 3, 4] } else { vec![2, 3] },
            grid_disc_layers: if full { vec![2, 3, 4] } else { vec![2, 3] },
            gdm_epsilons: vec![0.01, 0.001],
            gdm_mu: GDM_DEFAULT_MU,
        }
    }
}

/// Everything needed to run one experiment (plus the grid / comparison
/// parameters used by the study subcommands).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub game: GameConfig,
    pub repetitions: usize,
    pub output_dir: PathBuf,
    pub emit_svg: bool,
    pub preset: Option<Preset>,
    pub master_seed: Option<u64>,
    pub grid_gen_layers: Vec<usize>,
    pub grid_disc_layers: Vec<usize>,
    pub gdm_epsilons: Vec<f64>,
    pub gdm_mu: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Preset::Fig2Right.expand(1, false)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(CliError::Config("repetitions must be at least 1".into()));
        }
        if self.grid_gen_layers.is_empty() || self.grid_disc_layers.is_empty() {
            return Err(CliError::Config("grid layer lists must not be empty".into()));
        }
        self.game.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    /// Game config for repetition `rep`: same shape, derived seeds.
    pub fn game_for_rep(&self, rep: usize) -> GameConfig {
        let mut game = self.game.clone();
        game.seeds = self.game.seeds.for_repetition(rep as u64);
        game
    }
}

/// Flat `key = value` config file. Unknown keys are rejected so typos fail
/// loudly. `#` starts a comment.
pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "{}:{}: expected 'key = value', got '{raw}'",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

pub const CONFIG_KEYS: &[&str] = &[
    "n", "c_t", "c_g", "c_d", "prior_t", "shots", "max_iters", "gen_steps", "disc_steps",
    "gen_crn", "disc_crn", "optimizer", "gdm_epsilon", "gdm_mu", "irprop_delta_init",
    "irprop_delta_min", "irprop_delta_max", "irprop_eta_plus", "irprop_eta_minus",
    "stop_enabled", "stop_window", "stop_epsilon", "stop_min_iters", "reps", "out", "svg",
    "seed", "grid_c_g", "grid_c_d",
];

fn parse_as<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| CliError::Config(format!("invalid value '{value}' for key '{key}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(CliError::Config(format!("invalid boolean '{value}' for key '{key}'"))),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|v| parse_as::<usize>(key, v.trim()))
        .collect()
}

/// Apply config-file entries on top of a base configuration. The
/// `optimizer` key is applied first so the optimizer-specific keys can
/// refine it regardless of file order.
pub fn apply_file(config: &mut ExperimentConfig, entries: &BTreeMap<String, String>) -> Result<()> {
    let mut ordered: Vec<(&String, &String)> = entries.iter().collect();
    ordered.sort_by_key(|(k, _)| (k.as_str() != "optimizer", k.as_str().to_string()));
    for (key, value) in ordered {
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "unknown config key '{key}' (known keys: {})",
                CONFIG_KEYS.join(", ")
            )));
        }
        let game = &mut config.game;
        match key.as_str() {
            "n" => game.num_qubits = parse_as(key, value)?,
            "c_t" => game.target_layers = parse_as(key, value)?,
            "c_g" => game.gen_layers = parse_as(key, value)?,
            "c_d" => game.disc_layers = parse_as(key, value)?,
            "prior_t" => game.prior_target = parse_as(key, value)?,
            "shots" => game.shots = parse_as(key, value)?,
            "max_iters" => game.max_iters = parse_as(key, value)?,
            "gen_steps" => game.gen_steps_per_iter = parse_as(key, value)?,
            "disc_steps" => game.disc_steps_per_iter = parse_as(key, value)?,
            "gen_crn" => game.gen_common_random = parse_bool(key, value)?,
            "disc_crn" => game.disc_common_random = parse_bool(key, value)?,
            "optimizer" => match value.as_str() {
                "irprop" => {
                    game.optimizer = OptimizerSpec::Irprop { config: current_irprop(&game.optimizer) };
                }
                "gdm" => {
                    game.optimizer = OptimizerSpec::Gdm { epsilon: 0.01, mu: config.gdm_mu };
                }
                "explorative-rprop" => game.optimizer = OptimizerSpec::ExplorativeRprop,
                other => return Err(CliError::Config(format!("unknown optimizer '{other}'"))),
            },
            "gdm_epsilon" => {
                let eps: f64 = parse_as(key, value)?;
                if let OptimizerSpec::Gdm { mu, .. } = game.optimizer {
                    game.optimizer = OptimizerSpec::Gdm { epsilon: eps, mu };
                } else {
                    return Err(CliError::Config("gdm_epsilon requires optimizer = gdm".into()));
                }
            }
            "gdm_mu" => {
                let mu: f64 = parse_as(key, value)?;
                config.gdm_mu = mu;
                if let OptimizerSpec::Gdm { epsilon, .. } = game.optimizer {
                    game.optimizer = OptimizerSpec::Gdm { epsilon, mu };
                }
            }
            "irprop_delta_init" | "irprop_delta_min" | "irprop_delta_max" | "irprop_eta_plus"
            | "irprop_eta_minus" => {
                let mut c = current_irprop(&game.optimizer);
                let v: f64 = parse_as(key, value)?;
                match key.as_str() {
                    "irprop_delta_init" => c.delta_init = v,
                    "irprop_delta_min" => c.delta_min = v,
                    "irprop_delta_max" => c.delta_max = v,
                    "irprop_eta_plus" => c.eta_plus = v,
                    _ => c.eta_minus = v,
                }
                game.optimizer = OptimizerSpec::Irprop { config: c };
            }
            "stop_enabled" => {
                if parse_bool(key, value)? {
                    if game.stop.is_none() {
                        game.stop = Some(StopConfig::default());
                    }
                } else {
                    game.stop = None;
                }
            }
            "stop_window" => {
                let stop = game.stop.get_or_insert_with(StopConfig::default);
                stop.window = parse_as(key, value)?;
            }
            "stop_epsilon" => {
                let stop = game.stop.get_or_insert_with(StopConfig::default);
                stop.epsilon_ln2 = parse_as(key, value)?;
            }
            "stop_min_iters" => {
                let stop = game.stop.get_or_insert_with(StopConfig::default);
                stop.min_iters = parse_as(key, value)?;
            }
            "reps" => config.repetitions = parse_as(key, value)?,
            "out" => config.output_dir = PathBuf::from(value),
            "svg" => config.emit_svg = parse_bool(key, value)?,
            "seed" => {
                let seed: u64 = parse_as(key, value)?;
                config.master_seed = Some(seed);
                config.game.seeds = Seeds::from_master(seed);
            }
            "grid_c_g" => config.grid_gen_layers = parse_list(key, value)?,
            "grid_c_d" => config.grid_disc_layers = parse_list(key, value)?,
            _ => unreachable!("key list covered above"),
        }
    }
    Ok(())
}

fn current_irprop(spec: &OptimizerSpec) -> IRpropConfig {
    match spec {
        OptimizerSpec::Irprop { config } => *config,
        _ => IRpropConfig::experiment_defaults(),
    }
}
