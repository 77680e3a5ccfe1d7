//! The `gen` subcommand: write a synthetic regression dataset as CSV. Also
//! hosts the CSV reader that `custom_csv` tasks go through, so the two sides
//! of the format stay in one place.

use crate::Failure;
use sparsedp::synth::{gen_synthetic, SynthTask};
use sparsedp::Dataset;
use std::fs;
use std::path::Path;

pub fn generate(task: &str, p: usize, n: usize, seed: u64, out: &Path) -> Result<(), Failure> {
    let task = match task {
        "lasso_synthetic" => SynthTask::Lasso,
        "linf_synthetic" => SynthTask::Linf,
        other => {
            return Err(Failure::Config(format!(
                "unknown task `{other}`, expected lasso_synthetic or linf_synthetic"
            )))
        }
    };
    let data = gen_synthetic(task, p, n, seed).map_err(|e| Failure::Config(e.to_string()))?;
    fs::write(out, render_dataset_csv(&data))
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", out.display())))?;
    Ok(())
}

/// Header `x1,...,xp,y`, one row per sample, LF line endings.
pub fn render_dataset_csv(data: &Dataset) -> String {
    let mut out = String::new();
    for j in 1..=data.dim() {
        out.push_str(&format!("x{j},"));
    }
    out.push_str("y\n");
    for i in 0..data.n() {
        for v in data.x_row(i) {
            out.push_str(&format!("{v},"));
        }
        out.push_str(&format!("{}\n", data.y(i)));
    }
    out
}

/// Reads a dataset in the `gen` format. The feature dimension comes from the
/// header, which must be exactly `x1,...,xp,y`.
pub fn read_dataset_csv(path: &Path) -> Result<Dataset, String> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let header = reader
        .headers()
        .map_err(|e| format!("{}: {e}", path.display()))?
        .clone();
    if header.len() < 2 || header.iter().next_back() != Some("y") {
        return Err(format!(
            "{}: expected header x1,...,xp,y, got {:?}",
            path.display(),
            header.iter().collect::<Vec<_>>().join(",")
        ));
    }
    let p = header.len() - 1;
    for (j, name) in header.iter().take(p).enumerate() {
        if name != format!("x{}", j + 1) {
            return Err(format!(
                "{}: feature column {} is named {name:?}, expected \"x{}\"",
                path.display(),
                j + 1,
                j + 1
            ));
        }
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut y: Vec<f64> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        if record.len() != p + 1 {
            return Err(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                i + 2,
                record.len(),
                p + 1
            ));
        }
        let parsed: Vec<f64> = record
            .iter()
            .map(|field| {
                field.trim().parse::<f64>().map_err(|e| {
                    format!("{}: row {}: {field:?}: {e}", path.display(), i + 2)
                })
            })
            .collect::<Result<_, _>>()?;
        y.push(parsed[p]);
        rows.push(parsed[..p].to_vec());
    }
    Dataset::from_rows(&rows, &y).map_err(|e| format!("{}: {e}", path.display()))
}
