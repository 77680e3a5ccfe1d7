use super::data::Dataset;
use super::loss::{LossKind, LossModel};
use crate::error::{Error, Result};
use crate::submodular::{omega_inf, polytope_linmax, SubmodularFn};

/// Penalized objective split into its two terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveValue {
    pub risk: f64,
    pub penalty: f64,
    pub total: f64,
}

/// Penalized empirical risk: mean loss plus `(lambda/n)` times the
/// sparsity-inducing norm of the submodular function.
#[derive(Debug, Clone)]
pub struct ErmProblem {
    data: Dataset,
    loss: LossModel,
    f: SubmodularFn,
    lambda: f64,
    domain_bound: f64,
}

impl ErmProblem {
    pub fn new(
        data: Dataset,
        loss_kind: LossKind,
        f: SubmodularFn,
        lambda: f64,
        domain_bound: f64,
    ) -> Result<Self> {
        if f.p() != data.dim() {
            return Err(Error::invalid(format!(
                "set function is on {} dimensions but data has {}",
                f.p(),
                data.dim()
            )));
        }
        if lambda <= 0.0 || !lambda.is_finite() {
            return Err(Error::invalid("lambda must be positive and finite"));
        }
        let loss = LossModel::for_data(loss_kind, &data, domain_bound)?;
        Ok(ErmProblem { data, loss, f, lambda, domain_bound })
    }

    /// Same instance with a different regularization weight; the loss
    /// constants are recomputed so nothing stale survives.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        ErmProblem::new(self.data.clone(), self.loss.kind, self.f.clone(), lambda, self.domain_bound)
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn loss(&self) -> &LossModel {
        &self.loss
    }

    pub fn f(&self) -> &SubmodularFn {
        &self.f
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_over_n(&self) -> f64 {
        self.lambda / self.data.n() as f64
    }

    pub fn domain_bound(&self) -> f64 {
        self.domain_bound
    }

    pub fn p(&self) -> usize {
        self.data.dim()
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    /// Mean loss over the data.
    pub fn empirical_risk(&self, theta: &[f64]) -> f64 {
        let n = self.data.n();
        let mut acc = 0.0;
        for i in 0..n {
            let pred = dot(self.data.x_row(i), theta);
            acc += self.loss.value(pred, self.data.y(i));
        }
        acc / n as f64
    }

    pub fn penalty(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.lambda_over_n() * omega_inf(&self.f, theta)?)
    }

    pub fn objective(&self, theta: &[f64]) -> Result<ObjectiveValue> {
        let risk = self.empirical_risk(theta);
        let penalty = self.penalty(theta)?;
        Ok(ObjectiveValue { risk, penalty, total: risk + penalty })
    }

    /// Subgradient of the mean loss.
    pub fn risk_subgradient(&self, theta: &[f64]) -> Vec<f64> {
        let (n, p) = (self.data.n(), self.data.dim());
        let mut g = vec![0.0; p];
        for i in 0..n {
            let row = self.data.x_row(i);
            let d = self.loss.dpred(dot(row, theta), self.data.y(i));
            for j in 0..p {
                g[j] += d * row[j];
            }
        }
        for v in &mut g {
            *v /= n as f64;
        }
        g
    }

    /// Subgradient of the full objective, optionally with an extra linear
    /// term added to it. The norm's subgradient is the greedy maximizer of
    /// `s^T theta` over the polyhedron, which attains the support function.
    pub fn objective_subgradient(&self, theta: &[f64], extra: Option<&[f64]>) -> Result<Vec<f64>> {
        let mut g = self.risk_subgradient(theta);
        let v = polytope_linmax(&self.f, theta)?;
        let scale = self.lambda_over_n();
        for j in 0..g.len() {
            g[j] += scale * v.s[j];
            if let Some(e) = extra {
                g[j] += e[j];
            }
        }
        Ok(g)
    }
}

/// Objective value decomposed into risk and penalty terms.
pub fn primal_objective(prob: &ErmProblem, theta: &[f64]) -> Result<ObjectiveValue> {
    prob.objective(theta)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_point() -> ErmProblem {
        let data = Dataset::from_rows(&[vec![1.0, 0.0]], &[1.0]).unwrap();
        let f = SubmodularFn::cardinality(2).unwrap();
        ErmProblem::new(data, LossKind::Squared, f, 1.0, 1.0).unwrap()
    }

    #[test]
    fn objective_decomposition_at_zero() {
        let prob = one_point();
        let v = prob.objective(&[0.0, 0.0]).unwrap();
        assert_eq!(v.risk, 1.0);
        assert_eq!(v.penalty, 0.0);
        assert_eq!(v.total, 1.0);
    }

    #[test]
    fn objective_decomposition_at_unit() {
        let prob = one_point();
        let v = prob.objective(&[1.0, 0.0]).unwrap();
        assert_eq!(v.risk, 0.0);
        assert_eq!(v.penalty, 1.0);
        assert_eq!(v.total, 1.0);
    }

    #[test]
    fn subgradient_matches_finite_difference_on_smooth_region() {
        let prob = one_point();
        let theta = [0.3, -0.2];
        let g = prob.objective_subgradient(&theta, None).unwrap();
        let h = 1e-6;
        for j in 0..2 {
            let mut up = theta;
            let mut dn = theta;
            up[j] += h;
            dn[j] -= h;
            let fd = (prob.objective(&up).unwrap().total - prob.objective(&dn).unwrap().total)
                / (2.0 * h);
            assert!((fd - g[j]).abs() < 1e-5, "coord {j}: {fd} vs {}", g[j]);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let data = Dataset::from_rows(&[vec![1.0, 0.0]], &[1.0]).unwrap();
        let f = SubmodularFn::cardinality(3).unwrap();
        assert!(ErmProblem::new(data, LossKind::Squared, f, 1.0, 1.0).is_err());
    }
}
