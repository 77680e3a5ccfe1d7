//! Exhaustive operations on the symmetric polyhedron
//! `|P|(F) = { s : |s|(A) <= F(A) for all A }`: dual norm, membership, and
//! vertex enumeration. All constraints range over nonempty subsets; the full
//! ground set participates like any other subset.

use super::{check_vector, SubmodularFn, ENUMERATE_P_MAX, EXHAUSTIVE_P_MAX};
use crate::error::{Error, Result};
use itertools::Itertools;
use std::collections::HashSet;

fn check_exhaustive(f: &SubmodularFn, what: &str) -> Result<()> {
    if f.p() > EXHAUSTIVE_P_MAX {
        return Err(Error::capability(format!(
            "{what} enumerates all 2^p subsets and supports p <= {EXHAUSTIVE_P_MAX}, got p = {}",
            f.p()
        )));
    }
    Ok(())
}

#[inline]
fn abs_sum_on(s: &[f64], mask: u64) -> f64 {
    let mut m = mask;
    let mut acc = 0.0;
    while m != 0 {
        let j = m.trailing_zeros() as usize;
        acc += s[j].abs();
        m &= m - 1;
    }
    acc
}

/// Dual norm `max over nonempty A of |s|(A) / F(A)` by subset enumeration.
pub fn dual_norm_bruteforce(f: &SubmodularFn, s: &[f64]) -> Result<f64> {
    check_vector(f, s, "s")?;
    check_exhaustive(f, "dual_norm_bruteforce")?;
    let full = f.ground().full_mask();
    let mut best = 0.0f64;
    for mask in 1..=full {
        let denom = f.eval(mask);
        if denom <= 0.0 || denom.is_nan() {
            return Err(Error::numeric(format!(
                "F is not positive on nonempty subset {mask:#b}"
            )));
        }
        let ratio = abs_sum_on(s, mask) / denom;
        if ratio > best {
            best = ratio;
        }
    }
    Ok(best)
}

/// Largest constraint violation `max over nonempty A of |s|(A) - F(A)`,
/// together with a maximizing subset. Nonpositive means `s` is a member.
pub fn membership_max_violation(f: &SubmodularFn, s: &[f64]) -> Result<(f64, u64)> {
    check_vector(f, s, "s")?;
    check_exhaustive(f, "polytope_membership")?;
    let full = f.ground().full_mask();
    let mut worst = f64::NEG_INFINITY;
    let mut argmax = 1u64;
    for mask in 1..=full {
        let viol = abs_sum_on(s, mask) - f.eval(mask);
        if viol > worst {
            worst = viol;
            argmax = mask;
        }
    }
    Ok((worst, argmax))
}

/// Whether `s` satisfies every constraint `|s|(A) <= F(A) + tol`.
pub fn polytope_membership(f: &SubmodularFn, s: &[f64], tol: f64) -> Result<bool> {
    if tol < 0.0 || tol.is_nan() {
        return Err(Error::invalid("membership tolerance must be nonnegative"));
    }
    let (worst, _) = membership_max_violation(f, s)?;
    Ok(worst <= tol)
}

/// Quantization grid used to deduplicate enumerated vertices.
const DEDUP_GRID: f64 = 1e12;

/// Enumerates the signed greedy prefix vertices of the symmetric polyhedron.
///
/// For every permutation of the ground set, every prefix length
/// `k in 0..=p`, and every sign pattern on the prefix, the greedy assignment
/// places the signed marginal gains on the prefix coordinates and zero
/// elsewhere. Results are deduplicated on a `1e-12` grid and returned in
/// ascending lexicographic order, so the output is deterministic.
///
/// The point set contains every extreme point of the polyhedron (extreme
/// points arise from full-length prefixes) plus lower-dimensional prefix
/// points such as the origin.
pub fn enumerate_vertices(f: &SubmodularFn) -> Result<Vec<Vec<f64>>> {
    let p = f.p();
    if p > ENUMERATE_P_MAX {
        return Err(Error::capability(format!(
            "enumerate_vertices iterates p! 2^p candidates and supports p <= {ENUMERATE_P_MAX}, \
             got p = {p}"
        )));
    }
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut emit = |v: &[f64]| {
        let key: Vec<i64> = v.iter().map(|x| (x * DEDUP_GRID).round() as i64).collect();
        if seen.insert(key) {
            out.push(v.to_vec());
        }
    };

    for perm in (0..p).permutations(p) {
        // Marginal gains along this permutation.
        let mut gains = Vec::with_capacity(p);
        let mut mask = 0u64;
        let mut prev = f.eval(0);
        for &j in &perm {
            mask |= 1u64 << j;
            let cur = f.eval(mask);
            gains.push(cur - prev);
            prev = cur;
        }
        let mut v = vec![0.0; p];
        emit(&v); // prefix k = 0
        for k in 0..p {
            v[perm[k]] = gains[k];
            // Sign flips only matter on prefix positions with nonzero gain.
            let nz: Vec<usize> = (0..=k).filter(|&i| gains[i] != 0.0).collect();
            for signs in 0..(1u32 << nz.len()) {
                for (bit, &i) in nz.iter().enumerate() {
                    let sgn = if signs >> bit & 1 == 1 { -1.0 } else { 1.0 };
                    v[perm[i]] = sgn * gains[i];
                }
                emit(&v);
            }
            // Restore positive gains for the next prefix length.
            for &i in &nz {
                v[perm[i]] = gains[i];
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    Ok(out)
}
