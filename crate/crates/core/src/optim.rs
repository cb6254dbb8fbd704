//! Sign-based and momentum optimizers: iRprop-minus, gradient descent with
//! momentum, and an ascent adapter for the maximizing player.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// sgn with sgn(0) = 0, as the update rule requires.
fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// iRprop-minus hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IRpropConfig {
    pub delta_init: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub eta_plus: f64,
    pub eta_minus: f64,
}

impl IRpropConfig {
    /// Step-size bounds used throughout the experiments, with the canonical
    /// Rprop growth/shrink factors.
    pub fn experiment_defaults() -> Self {
        IRpropConfig {
            delta_init: 1.5e-3 * PI,
            delta_min: 1e-6 * PI,
            delta_max: 6e-3 * PI,
            eta_plus: 1.2,
            eta_minus: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.delta_min > 0.0
            && self.delta_min <= self.delta_init
            && self.delta_init <= self.delta_max
            && self.eta_minus > 0.0
            && self.eta_minus < 1.0
            && self.eta_plus > 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid iRprop config: {self:?}")))
        }
    }
}

impl Default for IRpropConfig {
    fn default() -> Self {
        Self::experiment_defaults()
    }
}

/// A step rule consuming a gradient of an error function to be minimized.
pub trait Optimizer {
    fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()>;
}

/// iRprop-minus: per-parameter step sizes adapted by gradient-sign agreement.
/// On a sign flip the derivative is zeroed so the parameter is not updated,
/// but its step size still shrinks.
#[derive(Clone, Debug)]
pub struct IRprop {
    config: IRpropConfig,
    step_sizes: Vec<f64>,
    prev_grads: Vec<f64>,
}

impl IRprop {
    pub fn new(config: IRpropConfig, num_params: usize) -> Result<Self> {
        config.validate()?;
        Ok(IRprop {
            config,
            step_sizes: vec![config.delta_init; num_params],
            prev_grads: vec![0.0; num_params],
        })
    }

    pub fn step_sizes(&self) -> &[f64] {
        &self.step_sizes
    }

    pub fn prev_grads(&self) -> &[f64] {
        &self.prev_grads
    }
}

impl Optimizer for IRprop {
    fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.step_sizes.len() || grads.len() != self.step_sizes.len() {
            return Err(Error::LengthMismatch { left: params.len(), right: grads.len() });
        }
        for i in 0..params.len() {
            let mut g = grads[i];
            let agreement = self.prev_grads[i] * g;
            if agreement > 0.0 {
                self.step_sizes[i] = (self.config.eta_plus * self.step_sizes[i]).min(self.config.delta_max);
            } else if agreement < 0.0 {
                self.step_sizes[i] = (self.config.eta_minus * self.step_sizes[i]).max(self.config.delta_min);
                g = 0.0;
            }
            params[i] -= sgn(g) * self.step_sizes[i];
            self.prev_grads[i] = g;
        }
        Ok(())
    }
}

/// Gradient descent with momentum: delta = -epsilon * grad + mu * delta_prev.
#[derive(Clone, Debug)]
pub struct Gdm {
    epsilon: f64,
    mu: f64,
    prev_delta: Vec<f64>,
}

impl Gdm {
    pub fn new(epsilon: f64, mu: f64, num_params: usize) -> Result<Self> {
        if epsilon <= 0.0 || !(0.0..1.0).contains(&mu) {
            return Err(Error::InvalidConfig(format!("invalid GDM config: epsilon={epsilon}, mu={mu}")));
        }
        Ok(Gdm { epsilon, mu, prev_delta: vec![0.0; num_params] })
    }

    pub fn prev_delta(&self) -> &[f64] {
        &self.prev_delta
    }
}

impl Optimizer for Gdm {
    fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.prev_delta.len() || grads.len() != self.prev_delta.len() {
            return Err(Error::LengthMismatch { left: params.len(), right: grads.len() });
        }
        for i in 0..params.len() {
            let delta = -self.epsilon * grads[i] + self.mu * self.prev_delta[i];
            params[i] += delta;
            self.prev_delta[i] = delta;
        }
        Ok(())
    }
}

/// Turns a descent rule into an ascent rule by negating the gradient before
/// delegating. Wrapping twice restores descent.
#[derive(Clone, Debug)]
pub struct Ascending<O>(pub O);

impl<O: Optimizer> Optimizer for Ascending<O> {
    fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        let negated: Vec<f64> = grads.iter().map(|g| -g).collect();
        self.0.step(params, &negated)
    }
}

/// Selectable optimizer for experiment configs. The explorative Rprop
/// variant is reserved and not implemented.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OptimizerSpec {
    Irprop { config: IRpropConfig },
    Gdm { epsilon: f64, mu: f64 },
    ExplorativeRprop,
}

impl OptimizerSpec {
    pub fn irprop_default() -> Self {
        OptimizerSpec::Irprop { config: IRpropConfig::experiment_defaults() }
    }

    pub fn build(&self, num_params: usize) -> Result<Box<dyn Optimizer + Send>> {
        match self {
            OptimizerSpec::Irprop { config } => Ok(Box::new(IRprop::new(*config, num_params)?)),
            OptimizerSpec::Gdm { epsilon, mu } => Ok(Box::new(Gdm::new(*epsilon, *mu, num_params)?)),
            OptimizerSpec::ExplorativeRprop => Err(Error::NotImplemented("explorative Rprop")),
        }
    }
}

impl Optimizer for Box<dyn Optimizer + Send> {
    fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        self.as_mut().step(params, grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_config() -> IRpropConfig {
        IRpropConfig { delta_init: 0.1, delta_min: 1e-6, delta_max: 1.0, eta_plus: 1.2, eta_minus: 0.5 }
    }

    #[test]
    fn zero_gradient_leaves_everything_unchanged() {
        let mut opt = IRprop::new(test_config(), 3).unwrap();
        let mut params = vec![0.5, -0.3, 0.0];
        let before = params.clone();
        opt.step(&mut params, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(params, before);
        assert!(opt.step_sizes().iter().all(|d| (*d - 0.1).abs() < 1e-15));
    }

    #[test]
    fn sign_agreement_grows_step() {
        let mut opt = IRprop::new(test_config(), 1).unwrap();
        let mut params = vec![0.0];
        opt.step(&mut params, &[1.0]).unwrap();
        assert!((params[0] + 0.1).abs() < 1e-15);
        opt.step(&mut params, &[1.0]).unwrap();
        assert!((params[0] + 0.22).abs() < 1e-15);
        assert!((opt.step_sizes()[0] - 0.12).abs() < 1e-15);
    }

    #[test]
    fn sign_flip_shrinks_step_and_skips_update() {
        let mut opt = IRprop::new(test_config(), 1).unwrap();
        let mut params = vec![0.0];
        opt.step(&mut params, &[1.0]).unwrap();
        let after_first = params[0];
        opt.step(&mut params, &[-1.0]).unwrap();
        // parameter not moved, step size halved, derivative zeroed
        assert_eq!(params[0], after_first);
        assert!((opt.step_sizes()[0] - 0.05).abs() < 1e-15);
        assert_eq!(opt.prev_grads()[0], 0.0);
        // after the zeroing, the next call lands in the "else" branch
        opt.step(&mut params, &[-1.0]).unwrap();
        assert!((params[0] - (after_first + 0.05)).abs() < 1e-15);
        assert!((opt.step_sizes()[0] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn step_sizes_stay_clamped() {
        let mut opt = IRprop::new(test_config(), 1).unwrap();
        let mut params = vec![0.0];
        for i in 0..50 {
            let g = if i % 2 == 0 { 1.0 } else { -1.0 };
            opt.step(&mut params, &[g]).unwrap();
            let d = opt.step_sizes()[0];
            assert!((1e-6..=1.0).contains(&d));
        }
        for _ in 0..120 {
            opt.step(&mut params, &[1.0]).unwrap();
            assert!(opt.step_sizes()[0] <= 1.0);
        }
        assert!((opt.step_sizes()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn displacement_is_exactly_step_size_or_zero() {
        let mut opt = IRprop::new(test_config(), 1).unwrap();
        let mut params = vec![0.3];
        let mut prev = params[0];
        let grads = [0.7, -0.2, 0.0, 1.5, 1.5, -0.1];
        for g in grads {
            opt.step(&mut params, &[g]).unwrap();
            let moved = (params[0] - prev).abs();
            // the displacement is the freshly adapted step size, or nothing
            let d = opt.step_sizes()[0];
            assert!(moved == 0.0 || (moved - d).abs() < 1e-15, "moved {moved}, step size {d}");
            prev = params[0];
        }
    }

    #[test]
    fn quadratic_smoke_test_with_experiment_defaults() {
        let mut opt = IRprop::new(IRpropConfig::experiment_defaults(), 1).unwrap();
        let mut w = vec![1.0];
        for _ in 0..200 {
            let grad = 2.0 * w[0];
            opt.step(&mut w, &[grad]).unwrap();
        }
        assert!(w[0].abs() < 1e-3, "w = {}", w[0]);
    }

    #[test]
    fn gdm_examples() {
        // mu = 0 is plain gradient descent
        let mut opt = Gdm::new(0.1, 0.0, 2).unwrap();
        let mut params = vec![1.0, -1.0];
        opt.step(&mut params, &[0.5, -0.5]).unwrap();
        assert!((params[0] - 0.95).abs() < 1e-15 && (params[1] + 0.95).abs() < 1e-15);

        // constant gradient with momentum: -eps*g then -(1.5)*eps*g
        let mut opt = Gdm::new(0.1, 0.5, 1).unwrap();
        let mut params = vec![0.0];
        opt.step(&mut params, &[1.0]).unwrap();
        assert!((params[0] + 0.1).abs() < 1e-15);
        opt.step(&mut params, &[1.0]).unwrap();
        assert!((params[0] + 0.25).abs() < 1e-15);

        // zero gradient coasts on momentum
        let mut opt = Gdm::new(0.1, 0.5, 1).unwrap();
        let mut params = vec![0.0];
        opt.step(&mut params, &[1.0]).unwrap();
        opt.step(&mut params, &[0.0]).unwrap();
        assert!((params[0] + 0.15).abs() < 1e-15);
    }

    #[test]
    fn gdm_rejects_bad_hyperparameters() {
        assert!(Gdm::new(0.0, 0.5, 1).is_err());
        assert!(Gdm::new(0.1, 1.0, 1).is_err());
    }

    #[test]
    fn ascent_adapter_flips_direction() {
        let mut descend = Gdm::new(0.1, 0.0, 1).unwrap();
        let mut ascend = Ascending(Gdm::new(0.1, 0.0, 1).unwrap());
        let mut double = Ascending(Ascending(Gdm::new(0.1, 0.0, 1).unwrap()));

        let mut wd = vec![0.0];
        let mut wa = vec![0.0];
        let mut wdd = vec![0.0];
        descend.step(&mut wd, &[1.0]).unwrap();
        ascend.step(&mut wa, &[1.0]).unwrap();
        double.step(&mut wdd, &[1.0]).unwrap();
        assert!(wd[0] < 0.0);
        assert!(wa[0] > 0.0);
        assert_eq!(wd[0], wdd[0]);
    }

    #[test]
    fn explorative_variant_is_a_stub() {
        match OptimizerSpec::ExplorativeRprop.build(4) {
            Err(Error::NotImplemented(_)) => {}
            Err(other) => panic!("unexpected error: {other}"),
            Ok(_) => panic!("expected the stub to fail"),
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let mut opt = IRprop::new(test_config(), 2).unwrap();
        let mut params = vec![0.0, 0.0];
        assert!(opt.step(&mut params, &[1.0]).is_err());
        let mut opt = Gdm::new(0.1, 0.0, 2).unwrap();
        assert!(opt.step(&mut params, &[1.0]).is_err());
    }
}
