//! The `inspect-norm` subcommand: width, vertex geometry, and closed-form
//! identity checks for a set function, printed as aligned lines plus JSON.

use crate::config::PenaltyKind;
use crate::Failure;
use rand::Rng;
use serde::Serialize;
use sparsedp::rng::stream_rng;
use sparsedp::submodular::{enumerate_vertices, gaussian_width_mc, omega_inf};
use sparsedp::WidthEstimate;
use statrs::distribution::{ContinuousCDF, Normal};

const IDENTITY_CHECK_VECTORS: usize = 200;

#[derive(Serialize)]
pub struct NormReport {
    pub f: String,
    pub p: usize,
    pub width: WidthEstimate,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `None` when the ground set is too large to enumerate.
    pub vertex_count: Option<usize>,
    pub diameter: Option<f64>,
    pub identity: Option<String>,
    pub identity_max_gap: Option<f64>,
    pub notes: Vec<String>,
}

pub fn inspect(kind: &PenaltyKind, p: usize, samples: usize, seed: u64) -> Result<NormReport, Failure> {
    let f = kind.build(p).map_err(|e| Failure::Config(e.to_string()))?;
    let width =
        gaussian_width_mc(&f, samples, seed).map_err(|e| Failure::Config(e.to_string()))?;
    let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.975);
    let mut notes = Vec::new();

    let (vertex_count, diameter) = match enumerate_vertices(&f) {
        Ok(vs) => (Some(vs.len()), Some(max_pairwise_distance(&vs))),
        Err(e) => {
            notes.push(e.to_string());
            (None, None)
        }
    };

    type NormFn = fn(&[f64]) -> f64;
    let closed_form: Option<(&str, NormFn)> = match kind {
        PenaltyKind::Cardinality => Some(("L1", |w| w.iter().map(|x| x.abs()).sum())),
        PenaltyKind::Truncated(1) => {
            Some(("Linf", |w| w.iter().fold(0.0, |m, x| m.max(x.abs()))))
        }
        _ => None,
    };
    let (identity, identity_max_gap) = match closed_form {
        Some((name, norm)) => {
            let mut rng = stream_rng(seed, "norm-identity", 0);
            let mut gap = 0.0f64;
            for _ in 0..IDENTITY_CHECK_VECTORS {
                let w: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
                let diff = (omega_inf(&f, &w).map_err(|e| Failure::Runtime(e.to_string()))?
                    - norm(&w))
                .abs();
                gap = gap.max(diff);
            }
            (Some(format!("Omega_inf = {name}")), Some(gap))
        }
        None => (None, None),
    };

    if p == 1 {
        // in one dimension the norm is F({1})|theta| and the width has a
        // closed form: E|g| * F({1})
        let scale = f.eval(1);
        let exact = (2.0 / std::f64::consts::PI).sqrt() * scale;
        notes.push(format!(
            "p = 1: exact width is sqrt(2/pi) * F({{1}}) = {exact:.6}"
        ));
    }

    Ok(NormReport {
        f: f.describe(),
        p,
        ci_low: width.mean - z * width.std_error,
        ci_high: width.mean + z * width.std_error,
        width,
        vertex_count,
        diameter,
        identity,
        identity_max_gap,
        notes,
    })
}

pub fn print_report(report: &NormReport) -> Result<(), Failure> {
    println!("set function       {} on p = {}", report.f, report.p);
    println!(
        "gaussian width     {:.6} +/- {:.6} (95% CI [{:.6}, {:.6}], {} samples, seed {})",
        report.width.mean,
        report.width.std_error,
        report.ci_low,
        report.ci_high,
        report.width.num_samples,
        report.width.seed,
    );
    match (report.vertex_count, report.diameter) {
        (Some(count), Some(diam)) => {
            println!("polytope vertices  {count}");
            println!("polytope diameter  {diam:.6}");
        }
        _ => println!("polytope vertices  not enumerated"),
    }
    if let (Some(identity), Some(gap)) = (&report.identity, report.identity_max_gap) {
        println!(
            "norm identity      {identity} (max gap {gap:.2e} over {IDENTITY_CHECK_VECTORS} random vectors)"
        );
    }
    for note in &report.notes {
        println!("note               {note}");
    }
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Failure::Runtime(format!("report serialization failed: {e}")))?;
    println!("{json}");
    Ok(())
}

fn max_pairwise_distance(points: &[Vec<f64>]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
            best = best.max(d2);
        }
    }
    best.sqrt()
}
