use crate::error::{Error, Result};

/// Labeled dataset with cached geometry: the largest row L2 norm and the
/// label range, both fixed at construction.
#[derive(Debug, Clone)]
pub struct Dataset {
    x: Vec<f64>, // row-major, n x p
    y: Vec<f64>,
    p: usize,
    r2: f64,
    y_range: (f64, f64),
}

impl Dataset {
    pub fn from_rows(rows: &[Vec<f64>], y: &[f64]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("dataset needs at least one point"));
        }
        let p = rows[0].len();
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::invalid("ragged feature rows"));
        }
        let mut flat = Vec::with_capacity(rows.len() * p);
        for r in rows {
            flat.extend_from_slice(r);
        }
        Self::from_flat(flat, y.to_vec(), p)
    }

    pub fn from_flat(x: Vec<f64>, y: Vec<f64>, p: usize) -> Result<Self> {
        let n = y.len();
        if n == 0 {
            return Err(Error::invalid("dataset needs at least one point"));
        }
        if p == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if x.len() != n * p {
            return Err(Error::invalid(format!(
                "feature buffer holds {} values, expected {} ({} points x {} dims)",
                x.len(),
                n * p,
                n,
                p
            )));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite value in dataset"));
        }
        let r2 = (0..n)
            .map(|i| x[i * p..(i + 1) * p].iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0_f64, f64::max);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &v in &y {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok(Dataset { x, y, p, r2, y_range: (lo, hi) })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn x_row(&self, i: usize) -> &[f64] {
        &self.x[i * self.p..(i + 1) * self.p]
    }

    pub fn y(&self, i: usize) -> f64 {
        self.y[i]
    }

    /// Largest row norm: the R2 bound entering sensitivity and noise scales.
    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn y_range(&self) -> (f64, f64) {
        self.y_range
    }

    pub fn max_abs_y(&self) -> f64 {
        self.y_range.0.abs().max(self.y_range.1.abs())
    }

    /// Neighboring dataset: one point swapped out, caches recomputed.
    pub fn with_replaced(&self, i: usize, x_new: &[f64], y_new: f64) -> Result<Dataset> {
        if i >= self.n() {
            return Err(Error::invalid(format!("point index {i} out of range")));
        }
        if x_new.len() != self.p {
            return Err(Error::invalid("replacement row has wrong dimension"));
        }
        let mut x = self.x.clone();
        let mut y = self.y.clone();
        x[i * self.p..(i + 1) * self.p].copy_from_slice(x_new);
        y[i] = y_new;
        Dataset::from_flat(x, y, self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caches_match_recomputation() {
        let d = Dataset::from_rows(
            &[vec![3.0, 4.0], vec![1.0, 0.0]],
            &[2.0, -1.0],
        )
        .unwrap();
        assert_eq!(d.r2(), 5.0);
        assert_eq!(d.y_range(), (-1.0, 2.0));
        assert_eq!(d.max_abs_y(), 2.0);
        assert_eq!(d.x_row(1), &[1.0, 0.0]);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Dataset::from_rows(&[], &[]).is_err());
        assert!(Dataset::from_rows(&[vec![1.0], vec![1.0, 2.0]], &[0.0, 0.0]).is_err());
        assert!(Dataset::from_flat(vec![1.0, f64::NAN], vec![0.0], 2).is_err());
    }

    #[test]
    fn replacement_updates_caches() {
        let d = Dataset::from_rows(&[vec![1.0], vec![0.5]], &[0.0, 0.5]).unwrap();
        let d2 = d.with_replaced(0, &[10.0], -3.0).unwrap();
        assert_eq!(d2.r2(), 10.0);
        assert_eq!(d2.y_range(), (-3.0, 0.5));
        // original untouched
        assert_eq!(d.r2(), 1.0);
    }
}
