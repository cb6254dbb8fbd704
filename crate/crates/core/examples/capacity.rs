//! Scratch probe: best achievable trace distance of a shallow layered
//! circuit against random deeper targets, via direct exact-fidelity ascent.

use advq_core::circuits::{build_layered, make_target, random_params, LayerSpec};
use advq_core::optim::{IRprop, IRpropConfig, Optimizer};
use advq_core::qstate::trace_distance_pure;
use advq_core::streams::StreamKey;

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let get = |i: usize, d: u64| args.get(i).copied().unwrap_or(d);
    let n = get(0, 4) as usize;
    let c_t = get(1, 2) as usize;
    let c_g = get(2, 1) as usize;
    let restarts = get(3, 4);

    for seed in 0..5u64 {
        let target = make_target(seed, n, c_t).unwrap();
        let gen = build_layered(&LayerSpec::new(n, c_g).unwrap(), 0).unwrap();
        let mut best = 1.0f64;
        for restart in 0..restarts {
            let mut theta = random_params(&gen, StreamKey::root(seed * 100 + restart));
            let cfg = IRpropConfig {
                delta_init: 0.05,
                delta_min: 1e-8,
                delta_max: 0.2,
                eta_plus: 1.2,
                eta_minus: 0.5,
            };
            let mut opt = IRprop::new(cfg, theta.len()).unwrap();
            let h = 1e-6;
            for _ in 0..3000 {
                let grads: Vec<f64> = (0..theta.len())
                    .map(|l| {
                        let mut plus = theta.clone();
                        let mut minus = theta.clone();
                        plus[l] += h;
                        minus[l] -= h;
                        let fp = target
                            .state
                            .inner(&gen.run_from_zero(&plus, n).unwrap())
                            .unwrap()
                            .norm_sqr();
                        let fm = target
                            .state
                            .inner(&gen.run_from_zero(&minus, n).unwrap())
                            .unwrap()
                            .norm_sqr();
                        // ascend fidelity = descend its negation
                        -(fp - fm) / (2.0 * h)
                    })
                    .collect();
                opt.step(&mut theta, &grads).unwrap();
            }
            let generated = gen.run_from_zero(&theta, n).unwrap();
            let d = trace_distance_pure(&target.state, &generated).unwrap();
            best = best.min(d);
        }
        println!("target seed {seed}: best trace distance with c_g={c_g}: {best:.4}");
    }
}
