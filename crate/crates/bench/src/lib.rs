//! Shared fixtures for the benchmarks.

use glasso_core::simulate::{simulate_dataset, DesignKind, NoiseKind, Pattern, SimSpec};
use glasso_core::{lambda_multitask, Problem};

/// Multi-task problem with the common theory-driven penalty (`A = 10`).
pub fn multitask_problem(design: DesignKind, n: usize, tasks: usize, vars: usize, seed: u64) -> Problem {
    let spec = SimSpec {
        n,
        tasks,
        vars,
        s: (vars / 8).max(1),
        design,
        noise: NoiseKind::Gaussian { sigma: 1.0 },
        amplitude: 1.0,
        pattern: Pattern::DenseInGroup,
        seed,
    };
    let ds = simulate_dataset(&spec).expect("valid benchmark spec");
    let (lambda, _) = lambda_multitask(1.0, n, tasks, vars, 10.0).expect("valid tuning");
    Problem::new(ds.data, vec![lambda; vars]).expect("consistent problem")
}
