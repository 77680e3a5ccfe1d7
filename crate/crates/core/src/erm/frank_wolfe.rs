//! Frank-Wolfe on the dual: linear maximization over K is a greedy sort, so
//! each iteration costs one conjugate evaluation plus `p log p`.

use super::dual::DualProblem;
use super::problem::dot;
use super::SolveReport;
use crate::error::{Error, Result};
use crate::submodular::polytope_linmax;

/// Vertex picker for one iteration: `(t, s_prev, theta) -> direction`.
pub(crate) type VertexRule<'c> = &'c mut dyn FnMut(usize, &[f64], &[f64]) -> Result<Vec<f64>>;

/// How the per-iteration linear subproblem picks its vertex.
pub(crate) enum LinOracle<'c> {
    /// Exact argmax of `s^T theta` over K via the greedy ordering.
    Greedy,
    /// Scores every enumerated vertex with a caller-supplied rule and takes
    /// the first minimum. Used by the noisy variant; with zero noise the
    /// score is `(s_prev - v)^T theta`, whose minimizer is the greedy vertex.
    Scored(VertexRule<'c>),
}

/// Shared iteration loop. `t` runs 1-based so the step size at the first
/// update is 1/3; each iteration reuses the conjugate evaluation from the
/// end of the previous one.
pub(crate) fn run_fw(
    dp: &DualProblem,
    t_steps: usize,
    record_iterates: bool,
    mut oracle: LinOracle,
) -> Result<(SolveReport, Vec<Vec<f64>>)> {
    let p = dp.problem().p();
    let mut s = vec![0.0_f64; p];
    let mut objective_trace = Vec::with_capacity(t_steps);
    let mut duality_gap_trace = Vec::with_capacity(t_steps);
    let mut iterates = Vec::new();
    if t_steps == 0 {
        let report = SolveReport {
            theta_or_s: s,
            objective_trace,
            duality_gap_trace,
            iterations: 0,
            converged: true,
        };
        return Ok((report, iterates));
    }
    // theta at the current iterate; refreshed once per iteration.
    let mut theta = dp.primal_from_dual(&s)?;
    for t in 1..=t_steps {
        let direction = match oracle {
            LinOracle::Greedy => {
                let v = polytope_linmax(dp.problem().f(), &theta)?;
                v.s.iter().map(|x| x * dp.k_scale()).collect::<Vec<f64>>()
            }
            LinOracle::Scored(ref mut score) => score(t, &theta, &s)?,
        };
        let rho = 1.0 / (t as f64 + 2.0);
        for (si, di) in s.iter_mut().zip(&direction) {
            *si += rho * (di - *si);
        }
        theta = dp.primal_from_dual(&s)?;
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        objective_trace.push(-dp.conjugate().eval(&neg)?.0);
        duality_gap_trace.push(dp.fw_gap(&s, &theta)?);
        if record_iterates {
            iterates.push(s.clone());
        }
    }
    let report = SolveReport {
        theta_or_s: s,
        objective_trace,
        duality_gap_trace,
        iterations: t_steps,
        converged: true,
    };
    Ok((report, iterates))
}

fn require_smooth_conjugate(dp: &DualProblem) -> Result<()> {
    let loss = dp.problem().loss();
    let squared = matches!(loss.kind, crate::erm::LossKind::Squared);
    if !squared && loss.strong_convexity <= 0.0 {
        return Err(Error::capability(
            "Frank-Wolfe needs a differentiable conjugate, which requires a strongly convex mean loss",
        ));
    }
    Ok(())
}

/// Runs `t_steps` Frank-Wolfe updates from `s = 0` and returns the dual
/// iterate with its objective and gap traces.
pub fn frank_wolfe_dual(dp: &DualProblem, t_steps: usize) -> Result<SolveReport> {
    require_smooth_conjugate(dp)?;
    let (report, _) = run_fw(dp, t_steps, false, LinOracle::Greedy)?;
    Ok(report)
}

/// Same run, but also returns every intermediate dual iterate `s_1..s_T`.
pub fn frank_wolfe_iterates(dp: &DualProblem, t_steps: usize) -> Result<(SolveReport, Vec<Vec<f64>>)> {
    require_smooth_conjugate(dp)?;
    run_fw(dp, t_steps, true, LinOracle::Greedy)
}

/// Variant whose linear step scores the enumerated vertex list directly,
/// first strict minimum winning, instead of using the greedy ordering.
/// The noisy method's trajectory at noise scale zero is exactly this one.
pub fn frank_wolfe_vertex_iterates(
    dp: &DualProblem,
    t_steps: usize,
) -> Result<(SolveReport, Vec<Vec<f64>>)> {
    require_smooth_conjugate(dp)?;
    let mut choose = |_t: usize, theta: &[f64], s_prev: &[f64]| -> Result<Vec<f64>> {
        let base = dot(s_prev, theta);
        let mut best = f64::INFINITY;
        let mut winner = None;
        for v in dp.vertices() {
            let alpha = base - dot(v, theta);
            if alpha < best {
                best = alpha;
                winner = Some(v);
            }
        }
        Ok(winner.expect("nonempty vertex list").clone())
    };
    run_fw(dp, t_steps, true, LinOracle::Scored(&mut choose))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erm::{Dataset, ErmProblem, LossKind};
    use crate::oracles::SquaredErmOracle;
    use crate::submodular::{polytope_membership, SubmodularFn};

    fn problem() -> ErmProblem {
        let data = Dataset::from_rows(
            &[
                vec![1.0, 0.3, -0.2],
                vec![-0.4, 0.9, 0.1],
                vec![0.2, -0.7, 0.8],
                vec![0.6, 0.1, 0.5],
                vec![-0.9, 0.4, -0.3],
            ],
            &[0.8, -0.3, 0.5, 0.9, -0.6],
        )
        .unwrap();
        let f = SubmodularFn::cardinality(3).unwrap();
        ErmProblem::new(data, LossKind::Squared, f, 1.5, 1.0).unwrap()
    }

    #[test]
    fn gaps_are_nonnegative_and_shrink() {
        let prob = problem();
        let dp = DualProblem::build(&prob, 500, 3).unwrap();
        let report = frank_wolfe_dual(&dp, 400).unwrap();
        assert_eq!(report.iterations, 400);
        assert!(report.duality_gap_trace.iter().all(|&g| g >= 0.0));
        let early = report.duality_gap_trace[5];
        let late = *report.duality_gap_trace.last().unwrap();
        assert!(late < early * 0.2, "gap {early} -> {late}");
    }

    #[test]
    fn iterates_stay_inside_k() {
        let prob = problem();
        let dp = DualProblem::build(&prob, 500, 3).unwrap();
        let (_, iterates) = frank_wolfe_iterates(&dp, 50).unwrap();
        assert_eq!(iterates.len(), 50);
        for s in &iterates {
            let unscaled: Vec<f64> = s.iter().map(|v| v / dp.k_scale()).collect();
            assert!(polytope_membership(prob.f(), &unscaled, 1e-9).unwrap());
        }
    }

    #[test]
    fn matches_exact_dual_optimum() {
        let prob = problem();
        let dp = DualProblem::build(&prob, 500, 3).unwrap();
        let report = frank_wolfe_dual(&dp, 4000).unwrap();
        let d_fw = *report.objective_trace.last().unwrap();

        let oracle = SquaredErmOracle::from_dataset(prob.data()).unwrap();
        let (_, d_star) = oracle
            .dual_maximize(prob.f(), prob.lambda_over_n(), None)
            .unwrap();
        assert!(
            d_star - d_fw >= -1e-9 && d_star - d_fw < 2e-4,
            "exact {d_star} vs iterative {d_fw}"
        );
        // final gap bounds the suboptimality
        let gap = *report.duality_gap_trace.last().unwrap();
        assert!(d_star - d_fw <= gap + 1e-9);
    }

    #[test]
    fn zero_steps_returns_the_origin() {
        let prob = problem();
        let dp = DualProblem::build(&prob, 500, 3).unwrap();
        let report = frank_wolfe_dual(&dp, 0).unwrap();
        assert_eq!(report.theta_or_s, vec![0.0; 3]);
        assert!(report.objective_trace.is_empty());
        assert!(report.converged);
    }

    #[test]
    fn hinge_loss_is_refused() {
        let data = Dataset::from_rows(&[vec![1.0], vec![-1.0]], &[1.0, -1.0]).unwrap();
        let f = SubmodularFn::cardinality(1).unwrap();
        let prob = ErmProblem::new(data, LossKind::Hinge, f, 1.0, 1.0).unwrap();
        assert!(DualProblem::build(&prob, 100, 1).is_err());
    }
}
