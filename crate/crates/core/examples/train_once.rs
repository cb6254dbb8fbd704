//! Run a single adversarial game and print the learning curve.
//!
//! Usage: cargo run --release -p advq-core --example train_once -- \
//!            [seed] [n] [c_t] [c_g] [c_d] [iters] [gen_steps] [disc_steps] [crn]

use advq_core::adversarial::{train, GameConfig, Seeds, StopConfig};
use advq_core::optim::OptimizerSpec;

fn main() {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let get = |i: usize, default: u64| args.get(i).copied().unwrap_or(default);
    let config = GameConfig {
        num_qubits: get(1, 4) as usize,
        target_layers: get(2, 2) as usize,
        gen_layers: get(3, 2) as usize,
        disc_layers: get(4, 2) as usize,
        prior_target: 0.5,
        shots: 100,
        max_iters: get(5, 300) as usize,
        gen_steps_per_iter: get(6, 1) as usize,
        disc_steps_per_iter: get(7, 1) as usize,
        gen_common_random: get(8, 0) == 1,
        disc_common_random: get(9, get(8, 0)) == 1,
        optimizer: {
            let mut c = advq_core::optim::IRpropConfig::experiment_defaults();
            c.eta_plus = get(11, 120) as f64 / 100.0;
            c.eta_minus = get(12, 50) as f64 / 100.0;
            OptimizerSpec::Irprop { config: c }
        },
        stop: Some(StopConfig::default()),
        seeds: Seeds::from_master(get(0, 1)),
    };
    let started = std::time::Instant::now();
    let result = train(&config).expect("training failed");
    let stride = get(10, 10) as usize;
    for row in result.metrics.iter().step_by(stride) {
        println!(
            "iter {:4}  V = {:+.4}  bee = {:.4}  bee_exact = {:.4}  D = {:.4}",
            row.iter, row.value_est, row.bee_est, row.bee_exact, row.trace_dist
        );
    }
    let last = result.metrics.last().expect("no metrics");
    println!(
        "final: iter {} D = {:.4} bee = {:.4} stop = {:?} ({:.1} s)",
        last.iter,
        last.trace_dist,
        last.bee_est,
        result.stop_reason,
        started.elapsed().as_secs_f64()
    );
}
