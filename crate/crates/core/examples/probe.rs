//! Scratch probe for alternation dynamics. Not part of the deliverable.

use advq_core::adversarial::evaluate_exact;
use advq_core::circuits::{build_layered, make_target, random_params, LayerSpec};
use advq_core::grad::{disc_gradient, gen_gradient, value_estimate, EvalMode, GradientRequest, Priors};
use advq_core::measure::{bee_exact, ShotPlan};
use advq_core::optim::{Ascending, IRprop, IRpropConfig, Optimizer};
use advq_core::qstate::StateVector;
use advq_core::streams::StreamKey;

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let get = |i: usize, default: u64| args.get(i).copied().unwrap_or(default);
    let seed = get(0, 1);
    let n = get(1, 4) as usize;
    let iters = get(2, 300) as usize;
    let mode = if get(3, 0) == 1 { EvalMode::Exact } else { EvalMode::Sampled };
    let gen_steps = get(4, 1) as usize;
    let disc_steps = get(5, 1) as usize;
    let shots = get(6, 100) as u32;
    let gen_crn = get(7, 0) == 1;
    let disc_crn = get(10, get(7, 0)) == 1;
    let eta_plus = get(8, 120) as f64 / 100.0;
    let eta_minus = get(9, 50) as f64 / 100.0;
    let plant = get(11, 0) == 1;

    let target = make_target(StreamKey::root(seed).child(1).value(), n, 2).unwrap();
    let gen = build_layered(&LayerSpec::new(n, 2).unwrap(), 0).unwrap();
    let disc = build_layered(&LayerSpec::new(n + 1, 2).unwrap(), 0).unwrap();
    let mut theta = random_params(&gen, StreamKey::root(seed).child(2));
    let target = if plant {
        let state = gen.run_from_zero(&theta, n).unwrap();
        advq_core::circuits::PreparedTarget { circuit: target.circuit, params: target.params, state }
    } else {
        target
    };
    let mut phi = random_params(&disc, StreamKey::root(seed).child(3));
    let mut cfg = IRpropConfig::experiment_defaults();
    cfg.eta_plus = eta_plus;
    cfg.eta_minus = eta_minus;
    let mut gen_opt = IRprop::new(cfg, theta.len()).unwrap();
    let mut disc_opt = Ascending(IRprop::new(cfg, phi.len()).unwrap());
    let shot_root = StreamKey::root(seed).child(4);

    for it in 0..=iters {
        if it > 0 {
            let iter_key = shot_root.child(it as u64);
            for s in 0..gen_steps {
                let plan = ShotPlan::with_key(shots, iter_key.child(10 + s as u64)).unwrap();
                let mut req = GradientRequest::new(&theta, &phi, Priors::equal(), plan, mode);
                req.common_random = gen_crn;
                let g = gen_gradient(&target.state, &gen, &disc, &req).unwrap();
                gen_opt.step(&mut theta, &g.values).unwrap();
            }
            for s in 0..disc_steps {
                let plan = ShotPlan::with_key(shots, iter_key.child(100 + s as u64)).unwrap();
                let mut req = GradientRequest::new(&theta, &phi, Priors::equal(), plan, mode);
                req.common_random = disc_crn;
                let d = disc_gradient(&target.state, &gen, &disc, &req).unwrap();
                disc_opt.step(&mut phi, &d.values).unwrap();
            }
        }
        if it % 10 == 0 || it == iters {
            let plan = ShotPlan::with_key(shots, shot_root.child(it as u64).child(999)).unwrap();
            let req = GradientRequest::new(&theta, &phi, Priors::equal(), plan, EvalMode::Exact);
            let v = value_estimate(&target.state, &gen, &disc, &req).unwrap();
            let (dist, _) = evaluate_exact(&target.state, &gen, &theta).unwrap();
            let mut branch = StateVector::zero(disc.num_qubits()).unwrap();
            gen.apply(&theta, &mut branch).unwrap();
            disc.apply(&phi, &mut branch).unwrap();
            let bee = bee_exact(&branch, disc.num_qubits() - 1).unwrap();
            let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
            let frozen = gen_opt.step_sizes().iter().filter(|d| **d < 1e-5).count();
            println!(
                "iter {it:4}  V = {v:+.4}  bee_exact = {bee:.4}  D = {dist:.4}  gen_dbar = {:.2e} (frozen {frozen}/{})  disc_dbar = {:.2e}",
                mean(gen_opt.step_sizes()),
                theta.len(),
                mean(disc_opt.0.step_sizes()),
            );
        }
    }
}
