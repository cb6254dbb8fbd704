//! The minimax training loop: alternating generator descent and
//! discriminator ascent on the value function, entanglement-entropy based
//! stopping, and per-iteration metrics.

use std::f64::consts::LN_2;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::circuits::{build_layered, make_target, random_params, Circuit, LayerSpec};
use crate::error::{Error, Result};
use crate::grad::{disc_gradient, gen_gradient, value_estimate, EvalMode, GradientRequest, Priors};
use crate::measure::{bee_estimate, bee_exact, ShotPlan};
use crate::optim::{Ascending, Optimizer, OptimizerSpec};
use crate::qstate::{trace_distance_pure, StateVector};
use crate::streams::{tags, StreamKey};

/// Seeds for the three independent sources of randomness in a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub target: u64,
    pub init: u64,
    pub shots: u64,
}

impl Seeds {
    /// Expand one master seed into the three roles.
    pub fn from_master(seed: u64) -> Self {
        let key = StreamKey::root(seed);
        Seeds {
            target: key.child(tags::REP_TARGET).value(),
            init: key.child(tags::REP_INIT).value(),
            shots: key.child(tags::REP_SHOTS).value(),
        }
    }

    /// Seeds for repetition `rep`, derived deterministically from this base.
    #[must_use]
    pub fn for_repetition(&self, rep: u64) -> Self {
        Seeds {
            target: StreamKey::root(self.target).child(rep).value(),
            init: StreamKey::root(self.init).child(rep).value(),
            shots: StreamKey::root(self.shots).child(rep).value(),
        }
    }
}

/// Detect convergence of the entanglement-entropy estimate to ln 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopConfig {
    /// Number of trailing estimates that must sit near ln 2.
    pub window: usize,
    /// Allowed distance from ln 2, in nats.
    pub epsilon_ln2: f64,
    /// Earliest iteration at which stopping is considered.
    pub min_iters: usize,
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig { window: 20, epsilon_ln2: 0.05, min_iters: 50 }
    }
}

impl StopConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 2 || self.epsilon_ln2 <= 0.0 {
            return Err(Error::InvalidConfig(format!("invalid stop config: {self:?}")));
        }
        Ok(())
    }
}

/// Full configuration of one adversarial game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    /// Target register size n; the discriminator acts on n + 1 qubits.
    pub num_qubits: usize,
    pub target_layers: usize,
    pub gen_layers: usize,
    pub disc_layers: usize,
    /// Prior probability of presenting the target state; P(g) = 1 - P(t).
    pub prior_target: f64,
    /// Shots per probability estimate.
    pub shots: u32,
    pub max_iters: usize,
    pub gen_steps_per_iter: usize,
    pub disc_steps_per_iter: usize,
    pub optimizer: OptimizerSpec,
    /// Estimate the two shifted probabilities of each generator parameter
    /// from one shared random stream instead of two fresh ones. Cuts the
    /// variance of the difference, making its sign reliable whenever the
    /// shift response clears the single-stream resolution; below it the
    /// difference collapses to zero and the parameter holds still.
    #[serde(default)]
    pub gen_common_random: bool,
    /// Same coupling for the discriminator's estimates.
    #[serde(default)]
    pub disc_common_random: bool,
    /// None disables early stopping; the run goes to `max_iters`.
    pub stop: Option<StopConfig>,
    pub seeds: Seeds,
}

impl GameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_qubits < 2 {
            return Err(Error::InvalidConfig("need at least 2 target qubits for the layered layout".into()));
        }
        if self.target_layers < 1 || self.gen_layers < 1 || self.disc_layers < 1 {
            return Err(Error::InvalidConfig("layer counts must be at least 1".into()));
        }
        if self.gen_steps_per_iter < 1 || self.disc_steps_per_iter < 1 {
            return Err(Error::InvalidConfig("steps per iteration must be at least 1".into()));
        }
        if self.shots < 1 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.prior_target) {
            return Err(Error::InvalidConfig(format!("prior_target {} outside [0, 1]", self.prior_target)));
        }
        if let Some(stop) = &self.stop {
            stop.validate()?;
        }
        Ok(())
    }
}

/// One logged iteration. `bee_exact` and `trace_dist` are simulator-only
/// oracle data, never visible to the players.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub iter: usize,
    pub value_est: f64,
    pub bee_est: f64,
    pub bee_exact: f64,
    pub trace_dist: f64,
    pub wall_ms: u64,
}

impl MetricsRow {
    /// Equality on the deterministic columns (everything except timing).
    pub fn same_values(&self, other: &MetricsRow) -> bool {
        self.iter == other.iter
            && self.value_est == other.value_est
            && self.bee_est == other.bee_est
            && self.bee_exact == other.bee_exact
            && self.trace_dist == other.trace_dist
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StopReason {
    BeeConverged { iter: usize },
    MaxIters,
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    pub gen_params: Vec<f64>,
    pub disc_params: Vec<f64>,
    pub metrics: Vec<MetricsRow>,
    pub stop_reason: StopReason,
    /// Oracle copy of the hidden target state, for diagnostics only.
    pub target_state: StateVector,
}

/// True when the trailing `window` entries of `bee_history` all lie within
/// `epsilon_ln2` of ln 2 and the least-squares slope over the window is
/// flatter than `epsilon_ln2 / window`, provided `iter >= min_iters`.
pub fn should_stop(bee_history: &[f64], stop: &StopConfig, iter: usize) -> bool {
    if iter < stop.min_iters || bee_history.len() < stop.window {
        return false;
    }
    let window = &bee_history[bee_history.len() - stop.window..];
    if window.iter().any(|b| (b - LN_2).abs() > stop.epsilon_ln2) {
        return false;
    }
    let n = window.len() as f64;
    let x_mean = (n - 1.0) / 2.0;
    let y_mean = window.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, y) in window.iter().enumerate() {
        let dx = i as f64 - x_mean;
        num += dx * (y - y_mean);
        den += dx * dx;
    }
    let slope = num / den;
    slope.abs() < stop.epsilon_ln2 / stop.window as f64
}

/// Exact trace distance between the target and the state the generator
/// currently prepares. Returns the generated state as well so callers can
/// inspect it. Diagnostic only; unavailable to the players.
pub fn evaluate_exact(target: &StateVector, gen: &Circuit, gen_params: &[f64]) -> Result<(f64, StateVector)> {
    let generated = gen.run_from_zero(gen_params, gen.num_qubits())?;
    let distance = trace_distance_pure(target, &generated)?;
    Ok((distance, generated))
}

/// The game state: circuits, parameters, optimizer states, and metrics.
pub struct Trainer {
    config: GameConfig,
    target: StateVector,
    gen: Circuit,
    disc: Circuit,
    gen_params: Vec<f64>,
    disc_params: Vec<f64>,
    gen_opt: Box<dyn Optimizer + Send>,
    disc_opt: Ascending<Box<dyn Optimizer + Send>>,
    priors: Priors,
    shot_root: StreamKey,
    iter: usize,
    bee_history: Vec<f64>,
}

impl Trainer {
    pub fn new(config: &GameConfig) -> Result<Self> {
        config.validate()?;
        let target = make_target(config.seeds.target, config.num_qubits, config.target_layers)?;
        let gen = build_layered(&LayerSpec::new(config.num_qubits, config.gen_layers)?, 0)?;
        let disc = build_layered(&LayerSpec::new(config.num_qubits + 1, config.disc_layers)?, 0)?;
        let init = StreamKey::root(config.seeds.init);
        let gen_params = random_params(&gen, init.child(tags::INIT_GEN));
        let disc_params = random_params(&disc, init.child(tags::INIT_DISC));
        let gen_opt = config.optimizer.build(gen_params.len())?;
        let disc_opt = Ascending(config.optimizer.build(disc_params.len())?);
        let priors = Priors::new(config.prior_target)?;
        Ok(Trainer {
            config: config.clone(),
            // only the prepared state crosses this boundary; the circuit and
            // parameters that made it stay hidden from the players
            target: target.state,
            gen,
            disc,
            gen_params,
            disc_params,
            gen_opt,
            disc_opt,
            priors,
            shot_root: StreamKey::root(config.seeds.shots),
            iter: 0,
            bee_history: Vec::new(),
        })
    }

    pub fn gen_params(&self) -> &[f64] {
        &self.gen_params
    }

    pub fn disc_params(&self) -> &[f64] {
        &self.disc_params
    }

    pub fn target_state(&self) -> &StateVector {
        &self.target
    }

    pub fn gen_circuit(&self) -> &Circuit {
        &self.gen
    }

    pub fn disc_circuit(&self) -> &Circuit {
        &self.disc
    }

    pub fn iteration(&self) -> usize {
        self.iter
    }

    fn request<'a>(
        &self,
        gen_params: &'a [f64],
        disc_params: &'a [f64],
        key: StreamKey,
        common_random: bool,
    ) -> Result<GradientRequest<'a>> {
        let mut req = GradientRequest::new(
            gen_params,
            disc_params,
            self.priors,
            ShotPlan::with_key(self.config.shots, key)?,
            EvalMode::Sampled,
        );
        req.common_random = common_random;
        Ok(req)
    }

    /// Generator turn: `gen_steps_per_iter` descent steps with the
    /// discriminator frozen.
    pub fn generator_phase(&mut self) -> Result<()> {
        let phase_key = self.shot_root.child(self.iter as u64).child(tags::GEN_PHASE);
        for step in 0..self.config.gen_steps_per_iter {
            let req = self.request(
                &self.gen_params,
                &self.disc_params,
                phase_key.child(step as u64),
                self.config.gen_common_random,
            )?;
            let grad = gen_gradient(&self.target, &self.gen, &self.disc, &req)?;
            self.gen_opt.step(&mut self.gen_params, &grad.values)?;
        }
        Ok(())
    }

    /// Discriminator turn: `disc_steps_per_iter` ascent steps with the
    /// generator frozen, using the just-updated generator parameters.
    pub fn discriminator_phase(&mut self) -> Result<()> {
        let phase_key = self.shot_root.child(self.iter as u64).child(tags::DISC_PHASE);
        for step in 0..self.config.disc_steps_per_iter {
            let req = self.request(
                &self.gen_params,
                &self.disc_params,
                phase_key.child(step as u64),
                self.config.disc_common_random,
            )?;
            let grad = disc_gradient(&self.target, &self.gen, &self.disc, &req)?;
            self.disc_opt.step(&mut self.disc_params, &grad.values)?;
        }
        Ok(())
    }

    fn record(&mut self, wall_ms: u64) -> Result<MetricsRow> {
        let iter_key = self.shot_root.child(self.iter as u64);
        let req = self.request(&self.gen_params, &self.disc_params, iter_key.child(tags::METRIC_VALUE), false)?;
        let value_est = value_estimate(&self.target, &self.gen, &self.disc, &req)?;

        // BEE is evaluated on the generated branch D(G|0> (x) |0>); the
        // ancilla is the discriminator's last qubit.
        let mut branch = StateVector::zero(self.disc.num_qubits())?;
        self.gen.apply(&self.gen_params, &mut branch)?;
        self.disc.apply(&self.disc_params, &mut branch)?;
        let ancilla = self.disc.num_qubits() - 1;
        let bee_plan = ShotPlan::with_key(self.config.shots, iter_key.child(tags::METRIC_BEE))?;
        let bee_est = bee_estimate(&branch, ancilla, &bee_plan)?;
        let bee_ex = bee_exact(&branch, ancilla)?;

        let (trace_dist, _) = evaluate_exact(&self.target, &self.gen, &self.gen_params)?;

        let row = MetricsRow { iter: self.iter, value_est, bee_est, bee_exact: bee_ex, trace_dist, wall_ms };
        self.bee_history.push(bee_est);
        Ok(row)
    }

    /// One full iteration: generator turn, discriminator turn, metrics.
    pub fn run_iteration(&mut self) -> Result<MetricsRow> {
        self.iter += 1;
        let started = Instant::now();
        self.generator_phase()?;
        self.discriminator_phase()?;
        let wall_ms = started.elapsed().as_millis() as u64;
        self.record(wall_ms)
    }

    /// Run to the stopping rule or `max_iters`. Row 0 snapshots the
    /// freshly initialized game; rows 1..=k follow the k-th iteration.
    pub fn run(mut self) -> Result<TrainResult> {
        let mut metrics = Vec::with_capacity(self.config.max_iters + 1);
        let mut stop_reason = StopReason::MaxIters;
        if self.config.max_iters > 0 {
            metrics.push(self.record(0)?);
            for _ in 0..self.config.max_iters {
                let row = self.run_iteration()?;
                metrics.push(row);
                if let Some(stop) = &self.config.stop {
                    if should_stop(&self.bee_history, stop, self.iter) {
                        stop_reason = StopReason::BeeConverged { iter: self.iter };
                        break;
                    }
                }
            }
        }
        Ok(TrainResult {
            gen_params: self.gen_params,
            disc_params: self.disc_params,
            metrics,
            stop_reason,
            target_state: self.target,
        })
    }
}

/// Run one adversarial game from scratch.
pub fn train(config: &GameConfig) -> Result<TrainResult> {
    Trainer::new(config)?.run()
}
