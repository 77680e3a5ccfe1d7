//! The `run` subcommand: load a config, sweep the sample-size grid with the
//! configured mechanism, and emit `results.csv` plus `summary.json`.

use crate::config::{Config, LambdaValue, TaskKind};
use crate::gen::read_dataset_csv;
use crate::Failure;
use serde::Serialize;
use sparsedp::dp::{
    loglog_slope, run_excess_risk_experiment, ExperimentSpec, ExperimentTable, LambdaSetting,
    SlopeFit,
};
use sparsedp::synth::{DataGenerator, LassoSynthetic, LinfSynthetic, ResampleData};
use sparsedp::{PrivacyParams, WidthEstimate};
use statrs::distribution::{ContinuousCDF, StudentsT};
use std::fs;
use std::path::Path;

pub const RESULTS_HEADER: &str = "n,trial,mechanism,excess_empirical_risk,excess_population_risk,\
                                  runtime_ms,noise_scale,lambda,G_width,T,seed";
const SCHEMA_VERSION: u32 = 1;

pub fn run(config_path: &Path, out_dir: &Path, timings: bool) -> Result<(), Failure> {
    let text = fs::read_to_string(config_path).map_err(|e| {
        Failure::Config(format!("cannot read config {}: {e}", config_path.display()))
    })?;
    let config = Config::from_toml(&text).map_err(Failure::Config)?;

    let params = PrivacyParams::new(config.privacy.epsilon, config.privacy.delta)
        .map_err(|e| Failure::Config(e.to_string()))?;
    let f = config
        .model
        .f_kind
        .build(config.task.p)
        .map_err(|e| Failure::Config(e.to_string()))?;
    let generator = build_generator(&config)?;

    let spec = ExperimentSpec {
        generator: generator.as_ref(),
        loss: config.model.loss.into(),
        f,
        lambda: match config.model.lambda {
            LambdaValue::Auto => LambdaSetting::Auto,
            LambdaValue::Fixed(v) => LambdaSetting::Explicit(v),
        },
        mechanism: config.privacy.mechanism.into(),
        params,
        n_grid: config.task.n_grid.clone(),
        trials: config.task.trials,
        seed: config.run.seed,
        domain_bound: config.model.domain_bound,
        eval_samples: config.run.eval_samples,
        theta_star_samples: config.run.theta_star_samples,
        width_samples: config.run.width_samples,
        solver_max_iters: config.run.solver_max_iters,
        fw_steps: config.run.fw_steps,
    };
    let table = run_excess_risk_experiment(&spec).map_err(|e| Failure::Runtime(e.to_string()))?;

    fs::create_dir_all(out_dir)
        .map_err(|e| Failure::Runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join("results.csv");
    fs::write(&csv_path, render_results_csv(&table, timings))
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", csv_path.display())))?;
    let summary = Summary::build(&config, &table, timings);
    let json_path = out_dir.join("summary.json");
    let mut json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Failure::Runtime(format!("summary serialization failed: {e}")))?;
    json.push('\n');
    fs::write(&json_path, json)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", json_path.display())))?;
    Ok(())
}

fn build_generator(config: &Config) -> Result<Box<dyn DataGenerator>, Failure> {
    let p = config.task.p;
    let seed = config.run.seed;
    match config.task.kind {
        TaskKind::LassoSynthetic => Ok(Box::new(
            LassoSynthetic::new(p, seed).map_err(|e| Failure::Config(e.to_string()))?,
        )),
        TaskKind::LinfSynthetic => Ok(Box::new(
            LinfSynthetic::new(p, seed).map_err(|e| Failure::Config(e.to_string()))?,
        )),
        TaskKind::CustomCsv => {
            let path = config.task.path.as_ref().expect("validated");
            let data = read_dataset_csv(path).map_err(Failure::Config)?;
            if data.dim() != p {
                return Err(Failure::Config(format!(
                    "task.p is {p} but {} has {} feature columns",
                    path.display(),
                    data.dim()
                )));
            }
            Ok(Box::new(ResampleData::new(data)))
        }
    }
}

/// One row per (n, trial), header fixed. The runtime column is left empty
/// unless timings were requested, keeping default output byte-reproducible.
fn render_results_csv(table: &ExperimentTable, timings: bool) -> String {
    let mut out = String::new();
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for pt in &table.points {
        let runtime = if timings {
            format!("{}", pt.runtime_ms)
        } else {
            String::new()
        };
        let t_steps = pt.t_steps.map(|t| t.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            pt.n,
            pt.trial,
            pt.mechanism,
            pt.excess_empirical,
            pt.excess_population,
            runtime,
            pt.noise_scale,
            pt.lambda,
            pt.g_width,
            t_steps,
            pt.seed_used,
        ));
    }
    out
}

#[derive(Serialize)]
struct Summary {
    schema_version: u32,
    config: Config,
    timings_enabled: bool,
    g_width: WidthEstimate,
    per_n: Vec<PerNSummary>,
    slope_fits: SlopeFits,
}

#[derive(Serialize)]
struct PerNSummary {
    n: usize,
    lambda: f64,
    mean_excess_empirical: f64,
    se_excess_empirical: f64,
    mean_excess_population: f64,
    se_excess_population: f64,
    noise_scale: f64,
    lr2_scale: f64,
    lambda_g_over_n: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    t_steps: Option<usize>,
}

#[derive(Serialize)]
struct SlopeFits {
    confidence: f64,
    empirical: Option<SlopeSummary>,
    population: Option<SlopeSummary>,
}

#[derive(Serialize)]
struct SlopeSummary {
    slope: f64,
    intercept: f64,
    slope_se: f64,
    points: usize,
    ci_low: f64,
    ci_high: f64,
}

impl Summary {
    fn build(config: &Config, table: &ExperimentTable, timings: bool) -> Summary {
        let alpha = config.run.alpha;
        let per_n: Vec<PerNSummary> = table
            .per_n
            .iter()
            .map(|row| {
                let (se_emp, se_pop) = standard_errors(table, row.n);
                PerNSummary {
                    n: row.n,
                    lambda: row.lambda,
                    mean_excess_empirical: row.mean_excess_empirical,
                    se_excess_empirical: se_emp,
                    mean_excess_population: row.mean_excess_population,
                    se_excess_population: se_pop,
                    noise_scale: row.noise_scale,
                    lr2_scale: row.lr2_scale,
                    lambda_g_over_n: row.lambda_g_over_n,
                    t_steps: row.t_steps,
                }
            })
            .collect();

        let fit_of = |pick: fn(&PerNSummary) -> f64| {
            let pts: Vec<(f64, f64)> = per_n.iter().map(|r| (r.n as f64, pick(r))).collect();
            loglog_slope(&pts).ok().map(|fit| SlopeSummary::from_fit(fit, alpha))
        };
        let slope_fits = SlopeFits {
            confidence: 1.0 - alpha,
            empirical: fit_of(|r| r.mean_excess_empirical),
            population: fit_of(|r| r.mean_excess_population),
        };
        Summary {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
            timings_enabled: timings,
            g_width: table.width.clone(),
            per_n,
            slope_fits,
        }
    }
}

fn standard_errors(table: &ExperimentTable, n: usize) -> (f64, f64) {
    let emp: Vec<f64> = table
        .points
        .iter()
        .filter(|pt| pt.n == n)
        .map(|pt| pt.excess_empirical)
        .collect();
    let pop: Vec<f64> = table
        .points
        .iter()
        .filter(|pt| pt.n == n)
        .map(|pt| pt.excess_population)
        .collect();
    (standard_error(&emp), standard_error(&pop))
}

fn standard_error(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (var / m).sqrt()
}

impl SlopeSummary {
    fn from_fit(fit: SlopeFit, alpha: f64) -> SlopeSummary {
        let dof = (fit.points.saturating_sub(2)).max(1) as f64;
        // two-sided 1 - alpha interval from the t distribution
        let quantile = StudentsT::new(0.0, 1.0, dof)
            .map(|t| t.inverse_cdf(1.0 - alpha / 2.0))
            .unwrap_or(f64::NAN);
        SlopeSummary {
            slope: fit.slope,
            intercept: fit.intercept,
            slope_se: fit.slope_se,
            points: fit.points,
            ci_low: fit.slope - quantile * fit.slope_se,
            ci_high: fit.slope + quantile * fit.slope_se,
        }
    }
}
