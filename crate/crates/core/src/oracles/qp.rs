//! Exact small-scale quadratic programming by KKT subset enumeration.
//!
//! Two solvers cover the reference computations the iterative paths are
//! tested against:
//!
//! * [`min_quadratic_over_hull`] minimizes a positive-definite quadratic over
//!   the convex hull of an explicit vertex list. Every support set of at most
//!   `dim + 1` vertices is tried; the optimum's minimal support appears among
//!   them (Carathéodory), so the best feasible candidate is the exact
//!   minimizer up to linear-solve precision.
//! * [`min_penalized_quadratic`] minimizes `quadratic + weight * max_v v^T x`
//!   through the epigraph reformulation, enumerating active constraint sets
//!   of at most `dim + 1` vertices.
//!
//! [`SquaredErmOracle`] packages both for squared-loss instances, assembling
//! the normal-equation data with plain loops.

use super::linalg::{invert, solve_linear};
use crate::erm::Dataset;
use crate::error::{Error, Result};
use crate::submodular::SubmodularFn;

const SUPPORT_TOL: f64 = 1e-9;
const MAX_SUBSETS: f64 = 5e6;
const EXTREME_P_MAX: usize = 5;

/// Extreme points of the symmetric polyhedron by direct enumeration of all
/// full-length signed greedy runs. Independent of the production vertex
/// enumeration; supports `p <= 5`.
pub fn extreme_points_bruteforce(f: &SubmodularFn) -> Result<Vec<Vec<f64>>> {
    let p = f.p();
    if p > EXTREME_P_MAX {
        return Err(Error::capability(format!(
            "extreme point enumeration supports p <= {EXTREME_P_MAX}, got {p}"
        )));
    }
    let mut perm: Vec<usize> = (0..p).collect();
    let mut out: Vec<Vec<f64>> = Vec::new();
    permute(&mut perm, 0, &mut |order| {
        let mut gains = Vec::with_capacity(p);
        let mut mask = 0u64;
        let mut prev = f.eval(0);
        for &j in order.iter() {
            mask |= 1u64 << j;
            let cur = f.eval(mask);
            gains.push(cur - prev);
            prev = cur;
        }
        for signs in 0..(1u32 << p) {
            let mut v = vec![0.0f64; p];
            for (k, &j) in order.iter().enumerate() {
                let sgn = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
                v[j] = sgn * gains[k];
            }
            out.push(v);
        }
    });
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .all(|(x, y)| (*x - *y).abs() <= 1e-12)
    });
    Ok(out)
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

fn subset_budget(n_items: usize, max_size: usize) -> f64 {
    let mut total = 0.0f64;
    let mut c = 1.0f64;
    for k in 1..=max_size.min(n_items) {
        c = c * (n_items - k + 1) as f64 / k as f64;
        total += c;
    }
    total
}

fn for_each_subset(n_items: usize, max_size: usize, visit: &mut impl FnMut(&[usize])) {
    let mut stack: Vec<usize> = Vec::with_capacity(max_size);
    fn rec(
        start: usize,
        n_items: usize,
        max_size: usize,
        stack: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        for i in start..n_items {
            stack.push(i);
            visit(stack);
            if stack.len() < max_size {
                rec(i + 1, n_items, max_size, stack, visit);
            }
            stack.pop();
        }
    }
    rec(0, n_items, max_size, &mut stack, visit);
}

fn quad_value(h: &[Vec<f64>], g: &[f64], x: &[f64]) -> f64 {
    let d = x.len();
    let mut acc = 0.0;
    for i in 0..d {
        let mut hx = 0.0;
        for j in 0..d {
            hx += h[i][j] * x[j];
        }
        acc += 0.5 * x[i] * hx + g[i] * x[i];
    }
    acc
}

/// Minimizes `0.5 x^T H x + g^T x` over the convex hull of `vertices` for
/// positive-definite `H`. Returns the minimizer and its value.
pub fn min_quadratic_over_hull(
    vertices: &[Vec<f64>],
    h: &[Vec<f64>],
    g: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let d = g.len();
    if vertices.is_empty() {
        return Err(Error::invalid("empty vertex list"));
    }
    if subset_budget(vertices.len(), d + 1) > MAX_SUBSETS {
        return Err(Error::capability(
            "hull QP enumeration exceeds the subset budget",
        ));
    }
    let mut best_val = f64::INFINITY;
    let mut best_x: Option<Vec<f64>> = None;
    for_each_subset(vertices.len(), d + 1, &mut |support| {
        let k = support.len();
        // Restricted problem over the simplex on `support`: stationarity on
        // the affine hull plus the normalization row.
        let mut a = vec![vec![0.0f64; k + 1]; k + 1];
        let mut rhs = vec![0.0f64; k + 1];
        for (r, &ir) in support.iter().enumerate() {
            for (c, &ic) in support.iter().enumerate() {
                let mut dot = 0.0;
                for i in 0..d {
                    let mut hv = 0.0;
                    for j in 0..d {
                        hv += h[i][j] * vertices[ic][j];
                    }
                    dot += vertices[ir][i] * hv;
                }
                a[r][c] = dot;
            }
            a[r][k] = 1.0;
            a[k][r] = 1.0;
            rhs[r] = -vertices[ir]
                .iter()
                .zip(g)
                .map(|(vi, gi)| vi * gi)
                .sum::<f64>();
        }
        rhs[k] = 1.0;
        let Some(sol) = solve_linear(&a, &rhs) else {
            return;
        };
        if sol[..k].iter().any(|&mu| mu < -SUPPORT_TOL) {
            return;
        }
        let mut x = vec![0.0f64; d];
        for (c, &ic) in support.iter().enumerate() {
            for j in 0..d {
                x[j] += sol[c] * vertices[ic][j];
            }
        }
        let val = quad_value(h, g, &x);
        if val < best_val {
            best_val = val;
            best_x = Some(x);
        }
    });
    best_x
        .map(|x| (x, best_val))
        .ok_or_else(|| Error::numeric("hull QP found no feasible support set"))
}

/// Minimizes `0.5 x^T H x + g^T x + c0 + weight * max_v v^T x` for
/// positive-definite `H` and `weight > 0`, by enumerating active sets of the
/// epigraph program.
pub fn min_penalized_quadratic(
    h: &[Vec<f64>],
    g: &[f64],
    c0: f64,
    penalty_vertices: &[Vec<f64>],
    weight: f64,
) -> Result<(Vec<f64>, f64)> {
    let d = g.len();
    if weight <= 0.0 || !weight.is_finite() {
        return Err(Error::invalid("penalty weight must be positive"));
    }
    if penalty_vertices.is_empty() {
        return Err(Error::invalid("empty penalty vertex list"));
    }
    if subset_budget(penalty_vertices.len(), d + 1) > MAX_SUBSETS {
        return Err(Error::capability(
            "active-set enumeration exceeds the subset budget",
        ));
    }
    let penalty = |x: &[f64]| -> f64 {
        penalty_vertices
            .iter()
            .map(|v| v.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut best_val = f64::INFINITY;
    let mut best_x: Option<Vec<f64>> = None;
    for_each_subset(penalty_vertices.len(), d + 1, &mut |active| {
        let k = active.len();
        let dim = d + 1 + k;
        // Unknowns: x (d), epigraph level, multipliers (k).
        let mut a = vec![vec![0.0f64; dim]; dim];
        let mut rhs = vec![0.0f64; dim];
        for r in 0..d {
            for c in 0..d {
                a[r][c] = h[r][c];
            }
            for (i, &vi) in active.iter().enumerate() {
                a[r][d + 1 + i] = penalty_vertices[vi][r];
            }
            rhs[r] = -g[r];
        }
        for i in 0..k {
            a[d][d + 1 + i] = 1.0;
        }
        rhs[d] = weight;
        for (i, &vi) in active.iter().enumerate() {
            for c in 0..d {
                a[d + 1 + i][c] = penalty_vertices[vi][c];
            }
            a[d + 1 + i][d] = -1.0;
        }
        let Some(sol) = solve_linear(&a, &rhs) else {
            return;
        };
        if sol[d + 1..].iter().any(|&mu| mu < -SUPPORT_TOL) {
            return;
        }
        let x = &sol[..d];
        let level = sol[d];
        let top = penalty(x);
        if top > level + 1e-7 * (1.0 + level.abs()) {
            return;
        }
        let val = quad_value(h, g, x) + c0 + weight * top;
        if val < best_val {
            best_val = val;
            best_x = Some(x.to_vec());
        }
    });
    best_x
        .map(|x| (x, best_val))
        .ok_or_else(|| Error::numeric("active-set enumeration found no valid KKT point"))
}

/// Exact reference solver for squared-loss instances: assembles the
/// normal-equation data with plain loops and answers primal and dual
/// questions through the enumeration QPs above.
pub struct SquaredErmOracle {
    m: Vec<Vec<f64>>,
    minv: Vec<Vec<f64>>,
    v: Vec<f64>,
    kappa: f64,
    p: usize,
}

impl SquaredErmOracle {
    /// Requires a full-rank design; the oracle refuses rank-deficient data
    /// rather than regularizing it.
    #[allow(clippy::needless_range_loop)]
    pub fn from_dataset(data: &Dataset) -> Result<Self> {
        let p = data.dim();
        let n = data.n();
        let mut m = vec![vec![0.0f64; p]; p];
        let mut v = vec![0.0f64; p];
        let mut kappa = 0.0f64;
        for i in 0..n {
            let x = data.x_row(i);
            let y = data.y(i);
            for a in 0..p {
                v[a] += x[a] * y;
                for b in 0..p {
                    m[a][b] += x[a] * x[b];
                }
            }
            kappa += y * y;
        }
        let nf = n as f64;
        for a in 0..p {
            v[a] /= nf;
            for b in 0..p {
                m[a][b] /= nf;
            }
        }
        kappa /= nf;
        let minv = invert(&m).ok_or_else(|| {
            Error::invalid("reference solver requires a full-rank design matrix")
        })?;
        Ok(SquaredErmOracle { m, minv, v, kappa, p })
    }

    /// Mean squared loss `theta^T M theta - 2 v^T theta + kappa`.
    #[allow(clippy::needless_range_loop)]
    pub fn loss(&self, theta: &[f64]) -> f64 {
        let mut acc = self.kappa;
        for i in 0..self.p {
            let mut mrow = 0.0;
            for j in 0..self.p {
                mrow += self.m[i][j] * theta[j];
            }
            acc += theta[i] * (mrow - 2.0 * self.v[i]);
        }
        acc
    }

    /// Exact minimizer and value of
    /// `loss(theta) + extra^T theta + lambda_over_n * Omega(theta)`.
    #[allow(clippy::needless_range_loop)]
    pub fn primal_minimize(
        &self,
        f: &SubmodularFn,
        lambda_over_n: f64,
        extra_linear: Option<&[f64]>,
    ) -> Result<(Vec<f64>, f64)> {
        let verts = extreme_points_bruteforce(f)?;
        let mut h = vec![vec![0.0f64; self.p]; self.p];
        let mut g = vec![0.0f64; self.p];
        for i in 0..self.p {
            g[i] = -2.0 * self.v[i] + extra_linear.map_or(0.0, |e| e[i]);
            for j in 0..self.p {
                h[i][j] = 2.0 * self.m[i][j];
            }
        }
        min_penalized_quadratic(&h, &g, self.kappa, &verts, lambda_over_n)
    }

    /// Exact maximizer and value of the dual objective
    /// `-conj(-(s + shift))` over `s` in the `lambda_over_n`-scaled
    /// polyhedron, where `conj` is the convex conjugate of the mean loss.
    pub fn dual_maximize(
        &self,
        f: &SubmodularFn,
        lambda_over_n: f64,
        shift: Option<&[f64]>,
    ) -> Result<(Vec<f64>, f64)> {
        let verts: Vec<Vec<f64>> = extreme_points_bruteforce(f)?
            .into_iter()
            .map(|v| v.into_iter().map(|x| lambda_over_n * x).collect())
            .collect();
        // Maximizing -conj(-(s + shift)) is projecting c = 2v - shift onto
        // the scaled polyhedron in the M^{-1} metric.
        let c: Vec<f64> = (0..self.p)
            .map(|i| 2.0 * self.v[i] - shift.map_or(0.0, |b| b[i]))
            .collect();
        let mut h = vec![vec![0.0f64; self.p]; self.p];
        let mut g = vec![0.0f64; self.p];
        for i in 0..self.p {
            for j in 0..self.p {
                h[i][j] = 0.5 * self.minv[i][j];
                g[i] -= 0.5 * self.minv[i][j] * c[j];
            }
        }
        let (s, _) = min_quadratic_over_hull(&verts, &h, &g)?;
        let mut quad = 0.0;
        for i in 0..self.p {
            let mut row = 0.0;
            for j in 0..self.p {
                row += self.minv[i][j] * (c[j] - s[j]);
            }
            quad += (c[i] - s[i]) * row;
        }
        let value = self.kappa - 0.25 * quad;
        Ok((s, value))
    }

    /// The primal point induced by a (shifted) dual point:
    /// `argmin_theta loss(theta) + s_total^T theta = M^{-1} (2v - s_total)/2`.
    #[allow(clippy::needless_range_loop)]
    pub fn theta_from_dual(&self, s_total: &[f64]) -> Vec<f64> {
        let mut theta = vec![0.0f64; self.p];
        for i in 0..self.p {
            for j in 0..self.p {
                theta[i] += 0.5 * self.minv[i][j] * (2.0 * self.v[j] - s_total[j]);
            }
        }
        theta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_points_of_the_box() {
        let f = SubmodularFn::cardinality(2).unwrap();
        let pts = extreme_points_bruteforce(&f).unwrap();
        assert_eq!(pts.len(), 4);
        for v in &pts {
            assert!(v.iter().all(|x| x.abs() == 1.0));
        }
    }

    #[test]
    fn extreme_points_of_the_cross_polytope() {
        let f = SubmodularFn::truncated_cardinality(3, 1).unwrap();
        let pts = extreme_points_bruteforce(&f).unwrap();
        assert_eq!(pts.len(), 6);
        for v in &pts {
            let nnz = v.iter().filter(|x| x.abs() > 0.0).count();
            assert_eq!(nnz, 1);
        }
    }

    #[test]
    fn hull_projection_onto_a_segment() {
        // Project (1, 1) onto the segment from (0, 0) to (2, 0).
        let verts = vec![vec![0.0, 0.0], vec![2.0, 0.0]];
        let h = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let g = vec![-1.0, -1.0];
        let (x, _) = min_quadratic_over_hull(&verts, &h, &g).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-10);
        assert!(x[1].abs() < 1e-10);
    }

    #[test]
    fn hull_interior_optimum_is_found() {
        // Unconstrained minimizer (0.25, 0.25) lies inside the box hull.
        let verts = vec![
            vec![-1.0, -1.0],
            vec![-1.0, 1.0],
            vec![1.0, -1.0],
            vec![1.0, 1.0],
        ];
        let h = vec![vec![2.0, 0.0], vec![0.0, 2.0]];
        let g = vec![-0.5, -0.5];
        let (x, _) = min_quadratic_over_hull(&verts, &h, &g).unwrap();
        assert!((x[0] - 0.25).abs() < 1e-10 && (x[1] - 0.25).abs() < 1e-10);
    }

    #[test]
    fn penalized_quadratic_soft_thresholds() {
        // min (t - 1)^2 + 0.5 |t| -> t = 0.75.
        let h = vec![vec![2.0]];
        let g = vec![-2.0];
        let verts = vec![vec![-1.0], vec![1.0]];
        let (x, val) = min_penalized_quadratic(&h, &g, 1.0, &verts, 0.5).unwrap();
        assert!((x[0] - 0.75).abs() < 1e-10, "got {}", x[0]);
        let expect = (0.75f64 - 1.0).powi(2) + 0.5 * 0.75;
        assert!((val - expect).abs() < 1e-10);
    }

    #[test]
    fn penalized_quadratic_pins_zero_under_heavy_weight() {
        let h = vec![vec![2.0, 0.0], vec![0.0, 2.0]];
        let g = vec![-0.2, 0.1];
        let verts = vec![
            vec![-1.0, -1.0],
            vec![-1.0, 1.0],
            vec![1.0, -1.0],
            vec![1.0, 1.0],
        ];
        let (x, _) = min_penalized_quadratic(&h, &g, 0.0, &verts, 10.0).unwrap();
        assert!(x[0].abs() < 1e-9 && x[1].abs() < 1e-9, "got {x:?}");
    }
}
