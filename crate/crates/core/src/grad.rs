//! Parameter-shift gradient estimators for the two-player value function.
//!
//! The value function compares the ancilla-zero probability of the
//! discriminator on the target branch against the generated branch. Because
//! every rotation generator squares to the identity, shifting one parameter
//! by +/- pi/2 yields the exact partial derivative up to the fixed 1/2
//! prefactor; sampled mode replaces exact probabilities with shot estimates.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::Circuit;
use crate::error::{Error, Result};
use crate::measure::{prob_zero_exact, sample_zero, ShotPlan};
use crate::qstate::StateVector;
use crate::streams::tags;
use crate::streams::StreamKey;

/// Prior probabilities of being handed the target or the generated state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Priors {
    target: f64,
    generated: f64,
}

impl Priors {
    pub fn new(p_target: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_target) || !p_target.is_finite() {
            return Err(Error::InvalidPriors { t: p_target, g: 1.0 - p_target });
        }
        Ok(Priors { target: p_target, generated: 1.0 - p_target })
    }

    pub fn equal() -> Self {
        Priors { target: 0.5, generated: 0.5 }
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    pub fn generated(&self) -> f64 {
        self.generated
    }

    pub fn is_equal(&self) -> bool {
        (self.target - 0.5).abs() < 1e-12
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Shot-based estimation, the path experiments run on.
    Sampled,
    /// Exact probabilities; reserved for tests and oracles.
    Exact,
}

/// Everything a gradient evaluation needs besides the circuits and target.
#[derive(Clone, Copy, Debug)]
pub struct GradientRequest<'a> {
    pub gen_params: &'a [f64],
    pub disc_params: &'a [f64],
    pub priors: Priors,
    pub plan: ShotPlan,
    pub mode: EvalMode,
    /// Reuse one stream for the + and - shift of a parameter (common random
    /// numbers). Off by default: fresh streams match hardware behavior.
    pub common_random: bool,
}

impl<'a> GradientRequest<'a> {
    pub fn new(gen_params: &'a [f64], disc_params: &'a [f64], priors: Priors, plan: ShotPlan, mode: EvalMode) -> Self {
        GradientRequest { gen_params, disc_params, priors, plan, mode, common_random: false }
    }
}

/// A gradient vector plus the number of circuit executions it cost.
#[derive(Clone, Debug)]
pub struct Gradient {
    pub values: Vec<f64>,
    pub executions: usize,
}

fn check_shapes(target: &StateVector, gen: &Circuit, disc: &Circuit, req: &GradientRequest) -> Result<()> {
    if target.num_qubits() != gen.num_qubits() {
        return Err(Error::DimensionMismatch { left: target.num_qubits(), right: gen.num_qubits() });
    }
    if disc.num_qubits() < gen.num_qubits() {
        return Err(Error::DimensionMismatch { left: disc.num_qubits(), right: gen.num_qubits() });
    }
    if req.gen_params.len() != gen.num_params() {
        return Err(Error::ParamCountMismatch { expected: gen.num_params(), got: req.gen_params.len() });
    }
    if req.disc_params.len() != disc.num_params() {
        return Err(Error::ParamCountMismatch { expected: disc.num_params(), got: req.disc_params.len() });
    }
    Ok(())
}

/// The measured qubit: the last qubit of the discriminator register.
fn ancilla(disc: &Circuit) -> usize {
    disc.num_qubits() - 1
}

fn generated_branch(gen: &Circuit, gen_params: &[f64], disc: &Circuit, disc_params: &[f64]) -> Result<StateVector> {
    let mut state = StateVector::zero(disc.num_qubits())?;
    gen.apply(gen_params, &mut state)?;
    disc.apply(disc_params, &mut state)?;
    Ok(state)
}

fn target_branch(target: &StateVector, disc: &Circuit, disc_params: &[f64]) -> Result<StateVector> {
    let mut state = target.tensor_zero(disc.num_qubits() - target.num_qubits())?;
    disc.apply(disc_params, &mut state)?;
    Ok(state)
}

fn probe(state: &StateVector, q: usize, mode: EvalMode, shots: u32, key: StreamKey) -> Result<f64> {
    match mode {
        EvalMode::Exact => prob_zero_exact(state, q),
        EvalMode::Sampled => Ok(sample_zero(state, q, &ShotPlan::with_key(shots, key)?)?.mean),
    }
}

/// Estimate of the value function
/// `V = P(t) p0(D on target (x) |0>) - P(g) p0(D G |0...0>)`.
pub fn value_estimate(target: &StateVector, gen: &Circuit, disc: &Circuit, req: &GradientRequest) -> Result<f64> {
    check_shapes(target, gen, disc, req)?;
    let q = ancilla(disc);
    let key = req.plan.key().child(tags::VALUE);
    let t_state = target_branch(target, disc, req.disc_params)?;
    let p_t = probe(&t_state, q, req.mode, req.plan.shots(), key.child(tags::BRANCH_TARGET))?;
    let g_state = generated_branch(gen, req.gen_params, disc, req.disc_params)?;
    let p_g = probe(&g_state, q, req.mode, req.plan.shots(), key.child(tags::BRANCH_GENERATED))?;
    Ok(req.priors.target() * p_t - req.priors.generated() * p_g)
}

/// Partial derivatives of V with respect to the generator parameters:
/// `dV/dtheta_l = -(P(g)/2) (p0[D G_{l+}] - p0[D G_{l-}])`,
/// two circuit executions per parameter. The target branch does not depend
/// on theta and drops out.
pub fn gen_gradient(target: &StateVector, gen: &Circuit, disc: &Circuit, req: &GradientRequest) -> Result<Gradient> {
    check_shapes(target, gen, disc, req)?;
    let q = ancilla(disc);
    let base = req.plan.key().child(tags::GEN_GRAD);
    let values: Result<Vec<f64>> = (0..req.gen_params.len())
        .into_par_iter()
        .map(|l| {
            let key = base.child(l as u64);
            let mut shifted = req.gen_params.to_vec();

            shifted[l] = req.gen_params[l] + FRAC_PI_2;
            let s_plus = generated_branch(gen, &shifted, disc, req.disc_params)?;
            let k_plus = if req.common_random { key } else { key.child(tags::SHIFT_PLUS) };
            let p_plus = probe(&s_plus, q, req.mode, req.plan.shots(), k_plus)?;

            shifted[l] = req.gen_params[l] - FRAC_PI_2;
            let s_minus = generated_branch(gen, &shifted, disc, req.disc_params)?;
            let k_minus = if req.common_random { key } else { key.child(tags::SHIFT_MINUS) };
            let p_minus = probe(&s_minus, q, req.mode, req.plan.shots(), k_minus)?;

            Ok(-req.priors.generated() / 2.0 * (p_plus - p_minus))
        })
        .collect();
    Ok(Gradient { values: values?, executions: 2 * req.gen_params.len() })
}

/// Partial derivatives of V with respect to the discriminator parameters:
/// both branches are re-executed with phi_k shifted by +/- pi/2, four
/// circuit executions per parameter.
pub fn disc_gradient(target: &StateVector, gen: &Circuit, disc: &Circuit, req: &GradientRequest) -> Result<Gradient> {
    check_shapes(target, gen, disc, req)?;
    let q = ancilla(disc);
    let base = req.plan.key().child(tags::DISC_GRAD);
    let values: Result<Vec<f64>> = (0..req.disc_params.len())
        .into_par_iter()
        .map(|k| {
            let key = base.child(k as u64);
            let mut shifted = req.disc_params.to_vec();
            let mut branch_diff = |branch_tag: u64| -> Result<f64> {
                let branch_key = key.child(branch_tag);
                let mut p = [0.0f64; 2];
                for (slot, (offset, sign_tag)) in
                    [(FRAC_PI_2, tags::SHIFT_PLUS), (-FRAC_PI_2, tags::SHIFT_MINUS)].iter().enumerate()
                {
                    shifted[k] = req.disc_params[k] + offset;
                    let state = if branch_tag == tags::BRANCH_TARGET {
                        target_branch(target, disc, &shifted)?
                    } else {
                        generated_branch(gen, req.gen_params, disc, &shifted)?
                    };
                    let skey = if req.common_random { branch_key } else { branch_key.child(*sign_tag) };
                    p[slot] = probe(&state, q, req.mode, req.plan.shots(), skey)?;
                }
                Ok(p[0] - p[1])
            };
            let d_target = branch_diff(tags::BRANCH_TARGET)?;
            let d_generated = branch_diff(tags::BRANCH_GENERATED)?;
            Ok(req.priors.target() / 2.0 * d_target - req.priors.generated() / 2.0 * d_generated)
        })
        .collect();
    Ok(Gradient { values: values?, executions: 4 * req.disc_params.len() })
}

/// Verify the shift identity `dV/dw = (V(w + pi/2) - V(w - pi/2)) / 2` for
/// every generator and discriminator parameter, exactly. Returns true when
/// the largest deviation is below 1e-9.
pub fn pi_shift_identity_check(target: &StateVector, gen: &Circuit, disc: &Circuit, req: &GradientRequest) -> Result<bool> {
    let exact_req = GradientRequest { mode: EvalMode::Exact, ..*req };
    let gen_grad = gen_gradient(target, gen, disc, &exact_req)?;
    let disc_grad = disc_gradient(target, gen, disc, &exact_req)?;
    let mut worst = 0.0f64;

    let mut theta = exact_req.gen_params.to_vec();
    for l in 0..theta.len() {
        let original = theta[l];
        theta[l] = original + FRAC_PI_2;
        let v_plus = value_estimate(target, gen, disc, &GradientRequest { gen_params: &theta, ..exact_req })?;
        theta[l] = original - FRAC_PI_2;
        let v_minus = value_estimate(target, gen, disc, &GradientRequest { gen_params: &theta, ..exact_req })?;
        theta[l] = original;
        worst = worst.max((gen_grad.values[l] - 0.5 * (v_plus - v_minus)).abs());
    }

    let mut phi = exact_req.disc_params.to_vec();
    for k in 0..phi.len() {
        let original = phi[k];
        phi[k] = original + FRAC_PI_2;
        let v_plus = value_estimate(target, gen, disc, &GradientRequest { disc_params: &phi, ..exact_req })?;
        phi[k] = original - FRAC_PI_2;
        let v_minus = value_estimate(target, gen, disc, &GradientRequest { disc_params: &phi, ..exact_req })?;
        phi[k] = original;
        worst = worst.max((disc_grad.values[k] - 0.5 * (v_plus - v_minus)).abs());
    }

    Ok(worst < 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_layered, make_target, random_params, Circuit, Gate, LayerSpec, Pauli, PauliString};

    fn ry_circuit(q: usize, num_qubits: usize) -> Circuit {
        Circuit::new(
            num_qubits,
            vec![Gate::Rotation {
                generator: PauliString::single(Pauli::Y).unwrap(),
                qubits: vec![q],
                param_index: 0,
            }],
        )
        .unwrap()
    }

    fn exact_request<'a>(gen_params: &'a [f64], disc_params: &'a [f64], priors: Priors) -> GradientRequest<'a> {
        GradientRequest::new(gen_params, disc_params, priors, ShotPlan::new(100, 1).unwrap(), EvalMode::Exact)
    }

    #[test]
    fn priors_validation() {
        assert!(Priors::new(-0.1).is_err());
        assert!(Priors::new(1.1).is_err());
        let p = Priors::new(0.3).unwrap();
        assert!((p.target() + p.generated() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn value_with_identity_discriminator() {
        // The ancilla stays |0> on both branches, so V = P(t) - P(g).
        let target = make_target(3, 2, 1).unwrap();
        let gen = build_layered(&LayerSpec::new(2, 1).unwrap(), 0).unwrap();
        let disc = Circuit::empty(3);
        let theta = random_params(&gen, StreamKey::root(8));
        for p_t in [0.5, 0.25, 0.9] {
            let req = exact_request(&theta, &[], Priors::new(p_t).unwrap());
            let v = value_estimate(&target.state, &gen, &disc, &req).unwrap();
            assert!((v - (2.0 * p_t - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn value_cancels_when_generated_equals_target() {
        let gen = build_layered(&LayerSpec::new(2, 1).unwrap(), 0).unwrap();
        let theta = random_params(&gen, StreamKey::root(17));
        let target_state = gen.run_from_zero(&theta, 2).unwrap();
        let disc = build_layered(&LayerSpec::new(3, 1).unwrap(), 0).unwrap();
        let phi = random_params(&disc, StreamKey::root(18));
        let req = exact_request(&theta, &phi, Priors::equal());
        let v = value_estimate(&target_state, &gen, &disc, &req).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn value_is_bounded_for_equal_priors() {
        for seed in 0..5u64 {
            let target = make_target(seed, 3, 1).unwrap();
            let gen = build_layered(&LayerSpec::new(3, 1).unwrap(), 0).unwrap();
            let disc = build_layered(&LayerSpec::new(4, 1).unwrap(), 0).unwrap();
            let theta = random_params(&gen, StreamKey::root(seed + 100));
            let phi = random_params(&disc, StreamKey::root(seed + 200));
            let req = exact_request(&theta, &phi, Priors::equal());
            let v = value_estimate(&target.state, &gen, &disc, &req).unwrap();
            assert!((-0.5..=0.5).contains(&v));
        }
    }

    #[test]
    fn single_qubit_toy_gradient() {
        // G = Ry(theta) on one qubit, D = empty on the same register, so the
        // measured qubit is the rotated one: p0 = cos^2(theta/2) and
        // dV/dtheta = P(g)/2 * sin(theta).
        let target = StateVector::zero(1).unwrap();
        let gen = ry_circuit(0, 1);
        let disc = Circuit::empty(1);
        for theta in [0.0, FRAC_PI_2, 1.1, -2.3] {
            let params = [theta];
            let req = exact_request(&params, &[], Priors::equal());
            let grad = gen_gradient(&target, &gen, &disc, &req).unwrap();
            assert_eq!(grad.executions, 2);
            assert!((grad.values[0] - 0.25 * theta.sin()).abs() < 1e-12, "theta = {theta}");
        }
        let params = [FRAC_PI_2];
        let req = exact_request(&params, &[], Priors::equal());
        let grad = gen_gradient(&target, &gen, &disc, &req).unwrap();
        assert!((grad.values[0] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn gradient_vanishes_when_rotation_does_not_reach_ancilla() {
        // D = identity on 2 qubits: the ancilla (qubit 1) never feels theta.
        let target = StateVector::zero(1).unwrap();
        let gen = ry_circuit(0, 1);
        let disc = Circuit::empty(2);
        let params = [1.234];
        let req = exact_request(&params, &[], Priors::equal());
        let grad = gen_gradient(&target, &gen, &disc, &req).unwrap();
        assert!(grad.values[0].abs() < 1e-15);
    }

    #[test]
    fn disc_gradient_vanishes_when_branches_match() {
        let gen = build_layered(&LayerSpec::new(2, 1).unwrap(), 0).unwrap();
        let theta = random_params(&gen, StreamKey::root(5));
        let target_state = gen.run_from_zero(&theta, 2).unwrap();
        let disc = build_layered(&LayerSpec::new(3, 1).unwrap(), 0).unwrap();
        let phi = random_params(&disc, StreamKey::root(6));
        let req = exact_request(&theta, &phi, Priors::equal());
        let grad = disc_gradient(&target_state, &gen, &disc, &req).unwrap();
        assert_eq!(grad.executions, 4 * phi.len());
        assert!(grad.values.iter().all(|g| g.abs() < 1e-12));
    }

    fn finite_difference<'a>(
        target: &StateVector,
        gen: &Circuit,
        disc: &Circuit,
        req: &GradientRequest<'a>,
        wrt_gen: bool,
    ) -> Vec<f64> {
        let h = 1e-5;
        let n = if wrt_gen { req.gen_params.len() } else { req.disc_params.len() };
        (0..n)
            .map(|i| {
                let mut plus = if wrt_gen { req.gen_params.to_vec() } else { req.disc_params.to_vec() };
                let mut minus = plus.clone();
                plus[i] += h;
                minus[i] -= h;
                let (v_plus, v_minus) = if wrt_gen {
                    (
                        value_estimate(target, gen, disc, &GradientRequest { gen_params: &plus, ..*req }).unwrap(),
                        value_estimate(target, gen, disc, &GradientRequest { gen_params: &minus, ..*req }).unwrap(),
                    )
                } else {
                    (
                        value_estimate(target, gen, disc, &GradientRequest { disc_params: &plus, ..*req }).unwrap(),
                        value_estimate(target, gen, disc, &GradientRequest { disc_params: &minus, ..*req }).unwrap(),
                    )
                };
                (v_plus - v_minus) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn exact_gradients_match_finite_differences() {
        let target = make_target(77, 3, 1).unwrap();
        let gen = build_layered(&LayerSpec::new(3, 1).unwrap(), 0).unwrap();
        let disc = build_layered(&LayerSpec::new(4, 1).unwrap(), 0).unwrap();
        let theta = random_params(&gen, StreamKey::root(700));
        let phi = random_params(&disc, StreamKey::root(701));
        let req = exact_request(&theta, &phi, Priors::equal());

        let g = gen_gradient(&target.state, &gen, &disc, &req).unwrap();
        let fd = finite_difference(&target.state, &gen, &disc, &req, true);
        let worst = g.values.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        assert!(worst < 1e-5, "generator worst deviation {worst}");

        let d = disc_gradient(&target.state, &gen, &disc, &req).unwrap();
        let fd = finite_difference(&target.state, &gen, &disc, &req, false);
        let worst = d.values.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
        assert!(worst < 1e-5, "discriminator worst deviation {worst}");
    }

    #[test]
    fn pi_shift_identity_holds() {
        for (seed, n) in [(1u64, 2usize), (2, 3)] {
            let target = make_target(seed, n, 1).unwrap();
            let gen = build_layered(&LayerSpec::new(n, 1).unwrap(), 0).unwrap();
            let disc = build_layered(&LayerSpec::new(n + 1, 1).unwrap(), 0).unwrap();
            let theta = random_params(&gen, StreamKey::root(seed + 10));
            let phi = random_params(&disc, StreamKey::root(seed + 20));
            let req = exact_request(&theta, &phi, Priors::equal());
            assert!(pi_shift_identity_check(&target.state, &gen, &disc, &req).unwrap());
        }
        // all-zero parameters
        let target = make_target(9, 2, 1).unwrap();
        let gen = build_layered(&LayerSpec::new(2, 1).unwrap(), 0).unwrap();
        let disc = build_layered(&LayerSpec::new(3, 1).unwrap(), 0).unwrap();
        let theta = vec![0.0; gen.num_params()];
        let phi = vec![0.0; disc.num_params()];
        let req = exact_request(&theta, &phi, Priors::equal());
        assert!(pi_shift_identity_check(&target.state, &gen, &disc, &req).unwrap());
    }

    #[test]
    fn gradient_magnitudes_are_bounded_by_priors() {
        let target = make_target(13, 2, 1).unwrap();
        let gen = build_layered(&LayerSpec::new(2, 1).unwrap(), 0).unwrap();
        let disc = build_layered(&LayerSpec::new(3, 1).unwrap(), 0).unwrap();
        let theta = random_params(&gen, StreamKey::root(50));
        let phi = random_params(&disc, StreamKey::root(51));
        for p_t in [0.2, 0.5, 0.8] {
            let priors = Priors::new(p_t).unwrap();
            let req = exact_request(&theta, &phi, priors);
            let g = gen_gradient(&target.state, &gen, &disc, &req).unwrap();
            assert!(g.values.iter().all(|v| v.abs() <= priors.generated() / 2.0 + 1e-12));
            let d = disc_gradient(&target.state, &gen, &disc, &req).unwrap();
            assert!(d.values.iter().all(|v| v.abs() <= 0.5 + 1e-12));
        }
    }

    #[test]
    fn sampled_gradients_are_deterministic_given_plan() {
        let target = make_target(21, 2, 1).unwrap();
        let gen = build_layered(&LayerSpec::new(2, 1).unwrap(), 0).unwrap();
        let disc = build_layered(&LayerSpec::new(3, 1).unwrap(), 0).unwrap();
        let theta = random_params(&gen, StreamKey::root(60));
        let phi = random_params(&disc, StreamKey::root(61));
        let plan = ShotPlan::new(100, 33).unwrap();
        let req = GradientRequest::new(&theta, &phi, Priors::equal(), plan, EvalMode::Sampled);
        let a = gen_gradient(&target.state, &gen, &disc, &req).unwrap();
        let b = gen_gradient(&target.state, &gen, &disc, &req).unwrap();
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn qubit_count_mismatch_is_rejected() {
        let target = make_target(1, 3, 1).unwrap();
        let gen = build_layered(&LayerSpec::new(2, 1).unwrap(), 0).unwrap();
        let disc = build_layered(&LayerSpec::new(3, 1).unwrap(), 0).unwrap();
        let theta = vec![0.0; gen.num_params()];
        let phi = vec![0.0; disc.num_params()];
        let req = exact_request(&theta, &phi, Priors::equal());
        assert!(value_estimate(&target.state, &gen, &disc, &req).is_err());
    }
}
