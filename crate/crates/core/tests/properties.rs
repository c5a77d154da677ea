mod common;

use glasso_core::bounds::{verify_oracle, HarnessOptions, Penalty};
use glasso_core::simulate::{simulate_dataset, DesignKind, NoiseKind, Pattern, SimSpec};
use glasso_core::{
    group_prox, kkt_residual, mixed_norm, solve_group_lasso, GroupPartition, Problem, RegressionData,
    SolveOptions,
};
use proptest::prelude::*;

fn problem(seed: u64, n: usize, sizes: &[usize], frac: f64) -> Problem {
    let mut rng = common::rng(seed);
    let k: usize = sizes.iter().sum();
    let part = GroupPartition::contiguous(sizes).unwrap();
    let x = common::gaussian_matrix(n, k, &mut rng);
    let y = common::gaussian_vector(n, &mut rng);
    let c = x.transpose() * &y / n as f64;
    let top = (0..part.len()).map(|j| part.block_norm(c.as_slice(), j)).fold(0.0, f64::max);
    let lambda = vec![frac * top; part.len()];
    Problem::new(RegressionData::new(x, y, part).unwrap(), lambda).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solver_agrees_with_block_descent(
        seed in 0u64..10_000,
        n in 4usize..16,
        sizes in prop::collection::vec(1usize..4, 2..5),
        frac in 0.05f64..1.2,
    ) {
        let p = problem(seed, n, &sizes, frac);
        let res = solve_group_lasso(&p, &SolveOptions::default()).unwrap();
        prop_assert!(res.converged);
        let d = &p.data;
        let oracle = common::exact_block_descent(&d.x, &d.y, &d.partition, &p.lambda);
        let f_oracle = common::objective(&d.x, &d.y, &d.partition, &p.lambda, &oracle);
        let f = common::objective(&d.x, &d.y, &d.partition, &p.lambda, &res.beta);
        prop_assert!((f - f_oracle).abs() <= 1e-8, "solver {f}, oracle {f_oracle}");
        prop_assert!(kkt_residual(&p, &res.beta).unwrap() <= SolveOptions::default().tolerance(p.lambda_max()));
    }

    #[test]
    fn large_penalty_gives_zero(seed in 0u64..10_000, sizes in prop::collection::vec(1usize..4, 2..5)) {
        let p = problem(seed, 10, &sizes, 1.0 + 1e-9);
        let res = solve_group_lasso(&p, &SolveOptions::default()).unwrap();
        prop_assert!(res.beta.iter().all(|b| *b == 0.0));
        prop_assert_eq!(res.iterations, 0);
    }

    #[test]
    fn prox_is_nonexpansive(
        a in prop::collection::vec(-5.0f64..5.0, 6),
        b in prop::collection::vec(-5.0f64..5.0, 6),
        t in prop::collection::vec(0.0f64..3.0, 3),
    ) {
        let part = GroupPartition::contiguous(&[2, 3, 1]).unwrap();
        let pa = group_prox(&a, &part, &t).unwrap();
        let pb = group_prox(&b, &part, &t).unwrap();
        let dist = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        prop_assert!(dist(&pa, &pb) <= dist(&a, &b) + 1e-12);
        for (j, tj) in t.iter().enumerate() {
            let before = part.block_norm(&a, j);
            let after = part.block_norm(&pa, j);
            prop_assert!((after - (before - tj).max(0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_norm_decreases_in_p(v in prop::collection::vec(-3.0f64..3.0, 7), p in 1.0f64..6.0, dp in 0.0f64..4.0) {
        let part = GroupPartition::contiguous(&[3, 2, 2]).unwrap();
        let a = mixed_norm(&v, &part, p).unwrap();
        let b = mixed_norm(&v, &part, p + dp).unwrap();
        let inf = mixed_norm(&v, &part, f64::INFINITY).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12) + 1e-15);
        prop_assert!(inf <= b * (1.0 + 1e-12) + 1e-15);
    }
}

fn small_spec(seed: u64) -> SimSpec {
    SimSpec {
        n: 20,
        tasks: 4,
        vars: 8,
        s: 2,
        design: DesignKind::OrthonormalTasks,
        noise: NoiseKind::Gaussian { sigma: 1.0 },
        amplitude: 1.0,
        pattern: Pattern::DenseInGroup,
        seed,
    }
}

#[test]
fn simulation_is_deterministic() {
    let a = simulate_dataset(&small_spec(4)).unwrap();
    let b = simulate_dataset(&small_spec(4)).unwrap();
    let c = simulate_dataset(&small_spec(5)).unwrap();
    assert_eq!(a.data.y, b.data.y);
    assert_eq!(a.beta_star, b.beta_star);
    assert_ne!(a.data.y, c.data.y);
}

#[test]
fn reports_are_reproducible() {
    let run = || {
        let r = verify_oracle(&small_spec(9), Penalty::Multitask { a: 5.0 }, 20, 3, &HarnessOptions::default()).unwrap();
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn orthonormal_problem_matches_closed_form() {
    let mut rng = common::rng(77);
    let part = GroupPartition::contiguous(&[3, 1, 2, 4]).unwrap();
    let x = common::scaled_orthonormal(15, 10, 0.5, &mut rng);
    let y = common::gaussian_vector(15, &mut rng);
    let lambda = vec![0.2, 0.05, 0.4, 0.1];
    let expect = common::orthonormal_closed_form(&x, &y, &part, &lambda, 0.5);
    let p = Problem::new(RegressionData::new(x, y, part).unwrap(), lambda).unwrap();
    let got = solve_group_lasso(&p, &SolveOptions::default()).unwrap().beta;
    for (g, e) in got.iter().zip(&expect) {
        assert!((g - e).abs() <= 1e-9 * e.abs().max(1.0), "{g} vs {e}");
    }
}
