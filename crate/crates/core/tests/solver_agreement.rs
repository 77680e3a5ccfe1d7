//! Cross-solver agreement and trajectory-level properties of the
//! conditional-gradient dual solver.

use sparsedp::dp::loglog_slope;
use sparsedp::erm::{
    frank_wolfe_dual, frank_wolfe_iterates, primal_from_dual, solve_with_config, StepRule,
    SubgradientConfig,
};
use sparsedp::rng::seeded_rng;
use sparsedp::submodular::polytope_membership;
use sparsedp::{Dataset, DualProblem, ErmProblem, LossKind, SubmodularFn};
use rand::Rng;

fn fixed_problem(seed: u64, p: usize, n: usize, lambda: f64, truncate: Option<usize>) -> ErmProblem {
    let mut rng = seeded_rng(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    // correlated responses keep the optimum off the coordinate kinks, where
    // subgradient best-iterate progress is slowest
    let y: Vec<f64> = rows
        .iter()
        .map(|r| {
            let noise = rng.random_range(-1.0..1.0);
            (0.8 * r[0] - 0.6 * r[1] + 0.5 * r[2] + 0.1 * noise).clamp(-1.0, 1.0)
        })
        .collect();
    let data = Dataset::from_rows(&rows, &y).unwrap();
    let f = match truncate {
        Some(k) => SubmodularFn::truncated_cardinality(p, k).unwrap(),
        None => SubmodularFn::cardinality(p).unwrap(),
    };
    ErmProblem::new(data, LossKind::Squared, f, lambda, 10.0).unwrap()
}

/// The dual path and the primal path land on the same point of a p=3
/// instance: recovered theta within 1e-3 in L2.
#[test]
fn dual_and_primal_solvers_agree_in_three_dims() {
    let prob = fixed_problem(54, 3, 12, 0.2, None);
    let dp = DualProblem::build(&prob, 2_000, 54).unwrap();

    let fw = frank_wolfe_dual(&dp, 20_000).unwrap();
    let theta_dual = primal_from_dual(&dp, &fw.theta_or_s).unwrap();

    // Squared loss on a full-rank design is strongly convex, so the primal
    // solver gets the matching eta_t = 2/(mu t) schedule.
    let config = SubgradientConfig {
        max_iters: 200_000,
        step: StepRule::InvT { eta0: 2.0 / prob.loss().strong_convexity },
        seed: 0,
    };
    let sg = solve_with_config(&prob, &config).unwrap();
    assert!(sg.converged);

    let dist: f64 = theta_dual
        .iter()
        .zip(&sg.theta_or_s)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    assert!(dist <= 1e-3, "solvers disagree by {dist}");
}

/// Every iterate is a convex combination of polytope points, so membership
/// (after unscaling) must hold along the whole trajectory.
#[test]
fn iterates_stay_feasible_across_instances() {
    for (seed, lambda, truncate) in [(3, 0.7, None), (4, 2.0, Some(1)), (5, 5.0, Some(2))] {
        let prob = fixed_problem(seed, 3, 8, lambda, truncate);
        let dp = DualProblem::build(&prob, 1_000, seed).unwrap();
        let (_, iterates) = frank_wolfe_iterates(&dp, 60).unwrap();
        for s in &iterates {
            let unscaled: Vec<f64> = s.iter().map(|x| x / dp.k_scale()).collect();
            assert!(
                polytope_membership(prob.f(), &unscaled, 1e-9).unwrap(),
                "iterate left the polytope (seed {seed})"
            );
        }
    }
}

/// The running minimum of the duality gap decays like 1/T: the log-log fit
/// over one decade of iteration counts has slope at most -0.9.
#[test]
fn running_best_gap_decays_at_the_sublinear_rate() {
    let prob = fixed_problem(9, 3, 10, 1.0, None);
    let dp = DualProblem::build(&prob, 1_000, 9).unwrap();
    let report = frank_wolfe_dual(&dp, 512).unwrap();

    let mut best = f64::INFINITY;
    let mut points = Vec::new();
    for (t, gap) in report.duality_gap_trace.iter().enumerate() {
        best = best.min(*gap);
        let steps = t + 1;
        if steps >= 8 && steps.is_power_of_two() {
            points.push((steps as f64, best));
        }
    }
    assert!(points.len() >= 7, "trace too short: {} checkpoints", points.len());
    let fit = loglog_slope(&points).unwrap();
    assert!(fit.slope <= -0.9, "gap decay slope {}", fit.slope);
}
