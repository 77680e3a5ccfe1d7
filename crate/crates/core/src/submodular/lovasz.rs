//! Lovász extension, the induced norm, and greedy linear maximization over
//! the symmetric polyhedron `{ s : |s|(A) <= F(A) for all A }`.

use super::{check_vector, SubmodularFn};
use crate::error::Result;

/// Indices of `w` sorted by decreasing value; ties broken by ascending index.
fn order_desc(w: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&a, &b| {
        w[b].partial_cmp(&w[a])
            .expect("finite values")
            .then(a.cmp(&b))
    });
    idx
}

/// Lovász extension `f(w)`.
///
/// With `j_1, .., j_p` sorting `w` in decreasing order (ties by ascending
/// index), returns `sum_k w_{j_k} (F({j_1..j_k}) - F({j_1..j_{k-1}}))`. The
/// terms are accumulated in that order, so for `F(A) = |A|` and nonnegative
/// `w` the result is bitwise the descending-order sum of the entries.
pub fn lovasz_extension(f: &SubmodularFn, w: &[f64]) -> Result<f64> {
    check_vector(f, w, "w")?;
    let order = order_desc(w);
    let mut mask = 0u64;
    let mut prev = f.eval(0);
    let mut acc = 0.0;
    for &j in &order {
        mask |= 1u64 << j;
        let cur = f.eval(mask);
        acc += w[j] * (cur - prev);
        prev = cur;
    }
    Ok(acc)
}

/// The norm induced by `F`: the Lovász extension evaluated at `|theta|`.
pub fn omega_inf(f: &SubmodularFn, theta: &[f64]) -> Result<f64> {
    check_vector(f, theta, "theta")?;
    let abs: Vec<f64> = theta.iter().map(|x| x.abs()).collect();
    lovasz_extension(f, &abs)
}

/// A maximizer of `s^T w` over the symmetric polyhedron, as produced by the
/// greedy rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyVertex {
    /// The maximizing point; satisfies `s^T w = f(|w|)`.
    pub s: Vec<f64>,
    /// Coordinate order used by the greedy pass: `|w|` descending, ties by
    /// ascending index.
    pub ordering: Vec<usize>,
    /// Signs applied per coordinate; `+1` for `w_j >= 0`, `-1` otherwise.
    pub signs: Vec<f64>,
}

/// Greedy linear maximization of `s^T w` over `{ s : |s|(A) <= F(A) }`.
///
/// Coordinates are visited in decreasing `|w|` (ties by ascending index) and
/// assigned the signed marginal gain `sign(w_j) (F(A_k) - F(A_{k-1}))`.
/// Coordinates with `w_j = 0` take sign `+1`.
pub fn polytope_linmax(f: &SubmodularFn, w: &[f64]) -> Result<GreedyVertex> {
    check_vector(f, w, "w")?;
    let abs: Vec<f64> = w.iter().map(|x| x.abs()).collect();
    let ordering = order_desc(&abs);
    let signs: Vec<f64> = w.iter().map(|&x| if x < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut s = vec![0.0; w.len()];
    let mut mask = 0u64;
    let mut prev = f.eval(0);
    for &j in &ordering {
        mask |= 1u64 << j;
        let cur = f.eval(mask);
        s[j] = signs[j] * (cur - prev);
        prev = cur;
    }
    Ok(GreedyVertex { s, ordering, signs })
}
