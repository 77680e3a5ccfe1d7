//! Experiment configuration: a TOML file with four typed sections. Parsing
//! is strict (unknown keys rejected) and the parsed value round-trips
//! through serialization without loss, so `summary.json` can echo it back
//! for auditing.

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use sparsedp::dp::MechanismChoice;
use sparsedp::{LossKind, Result, SubmodularFn};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub const DEFAULT_EVAL_SAMPLES: usize = 100_000;
pub const DEFAULT_THETA_STAR_SAMPLES: usize = 100_000;
pub const DEFAULT_WIDTH_SAMPLES: usize = 20_000;
pub const DEFAULT_SOLVER_MAX_ITERS: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub task: TaskSection,
    pub model: ModelSection,
    pub privacy: PrivacySection,
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSection {
    pub kind: TaskKind,
    /// Dataset path; only meaningful (and then required) for `custom_csv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub p: usize,
    pub n_grid: Vec<usize>,
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    LassoSynthetic,
    LinfSynthetic,
    CustomCsv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub loss: LossName,
    /// `cardinality`, `trunc:<k>`, or `sqrt`.
    pub f_kind: PenaltyKind,
    /// `"auto"` or an explicit positive number.
    pub lambda: LambdaValue,
    /// Bound on the optimization domain; enters the Lipschitz constant of
    /// the squared loss.
    #[serde(default = "default_domain_bound")]
    pub domain_bound: f64,
}

fn default_domain_bound() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossName {
    Squared,
    Logistic,
    Hinge,
}

impl From<LossName> for LossKind {
    fn from(name: LossName) -> LossKind {
        match name {
            LossName::Squared => LossKind::Squared,
            LossName::Logistic => LossKind::Logistic,
            LossName::Hinge => LossKind::Hinge,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrivacySection {
    pub epsilon: f64,
    pub delta: f64,
    pub mechanism: MechanismName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanismName {
    None,
    OutputGauss,
    OutputGamma,
    ObjPerturb,
    PrivateFw,
}

impl From<MechanismName> for MechanismChoice {
    fn from(name: MechanismName) -> MechanismChoice {
        match name {
            MechanismName::None => MechanismChoice::None,
            MechanismName::OutputGauss => MechanismChoice::OutputGaussian,
            MechanismName::OutputGamma => MechanismChoice::OutputGamma,
            MechanismName::ObjPerturb => MechanismChoice::ObjectivePerturb,
            MechanismName::PrivateFw => MechanismChoice::PrivateFrankWolfe,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    /// Confidence parameter: reported intervals hold with probability 1 - alpha.
    pub alpha: f64,
    #[serde(default = "default_eval_samples")]
    pub eval_samples: usize,
    #[serde(default = "default_theta_star_samples")]
    pub theta_star_samples: usize,
    #[serde(default = "default_width_samples")]
    pub width_samples: usize,
    #[serde(default = "default_solver_max_iters")]
    pub solver_max_iters: usize,
    /// Step count override for the noisy Frank-Wolfe; omitted = automatic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fw_steps: Option<usize>,
}

fn default_eval_samples() -> usize {
    DEFAULT_EVAL_SAMPLES
}
fn default_theta_star_samples() -> usize {
    DEFAULT_THETA_STAR_SAMPLES
}
fn default_width_samples() -> usize {
    DEFAULT_WIDTH_SAMPLES
}
fn default_solver_max_iters() -> usize {
    DEFAULT_SOLVER_MAX_ITERS
}

/// Regularization weight: the scaling rule or a fixed number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaValue {
    Auto,
    Fixed(f64),
}

impl Serialize for LambdaValue {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LambdaValue::Auto => ser.serialize_str("auto"),
            LambdaValue::Fixed(v) => ser.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for LambdaValue {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct LambdaVisitor;

        impl Visitor<'_> for LambdaVisitor {
            type Value = LambdaValue;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "the string \"auto\" or a positive number")
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<LambdaValue, E> {
                if s == "auto" {
                    Ok(LambdaValue::Auto)
                } else {
                    Err(E::custom(format!("unknown lambda rule `{s}`, expected \"auto\" or a number")))
                }
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<LambdaValue, E> {
                Ok(LambdaValue::Fixed(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<LambdaValue, E> {
                Ok(LambdaValue::Fixed(v as f64))
            }
        }

        de.deserialize_any(LambdaVisitor)
    }
}

/// Shape of the set function behind the penalty. The string forms are
/// `cardinality`, `trunc:<k>`, and `sqrt`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyKind {
    Cardinality,
    Truncated(usize),
    Sqrt,
}

impl PenaltyKind {
    pub fn build(&self, p: usize) -> Result<SubmodularFn> {
        match *self {
            PenaltyKind::Cardinality => SubmodularFn::cardinality(p),
            PenaltyKind::Truncated(k) => SubmodularFn::truncated_cardinality(p, k),
            PenaltyKind::Sqrt => SubmodularFn::sqrt_cardinality(p),
        }
    }
}

impl fmt::Display for PenaltyKind {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self {
            PenaltyKind::Cardinality => write!(f, "cardinality"),
            PenaltyKind::Truncated(k) => write!(f, "trunc:{k}"),
            PenaltyKind::Sqrt => write!(f, "sqrt"),
        }
    }
}

impl FromStr for PenaltyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "cardinality" {
            return Ok(PenaltyKind::Cardinality);
        }
        if s == "sqrt" {
            return Ok(PenaltyKind::Sqrt);
        }
        if let Some(rest) = s.strip_prefix("trunc:") {
            let k: usize = rest
                .parse()
                .map_err(|_| format!("bad truncation level `{rest}` in `{s}`"))?;
            if k == 0 {
                return Err("truncation level must be at least 1".into());
            }
            return Ok(PenaltyKind::Truncated(k));
        }
        Err(format!(
            "unknown set function `{s}`, expected `cardinality`, `trunc:<k>`, or `sqrt`"
        ))
    }
}

impl Serialize for PenaltyKind {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PenaltyKind {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(de::Error::custom)
    }
}

impl Config {
    pub fn from_toml(text: &str) -> std::result::Result<Config, String> {
        let config: Config = toml::from_str(text).map_err(|e| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialization cannot fail")
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let t = &self.task;
        if t.p == 0 {
            return Err("task.p must be at least 1".into());
        }
        if t.n_grid.is_empty() {
            return Err("task.n_grid must be nonempty".into());
        }
        if t.n_grid.contains(&0) {
            return Err("task.n_grid entries must be positive".into());
        }
        if t.trials == 0 {
            return Err("task.trials must be at least 1".into());
        }
        match (t.kind, &t.path) {
            (TaskKind::CustomCsv, None) => {
                return Err("task.kind = custom_csv requires task.path".into())
            }
            (TaskKind::LassoSynthetic | TaskKind::LinfSynthetic, Some(_)) => {
                return Err("task.path is only valid with task.kind = custom_csv".into())
            }
            _ => {}
        }
        if let LambdaValue::Fixed(v) = self.model.lambda {
            if v <= 0.0 || !v.is_finite() {
                return Err("model.lambda must be positive".into());
            }
        }
        if self.model.domain_bound <= 0.0 || !self.model.domain_bound.is_finite() {
            return Err("model.domain_bound must be positive".into());
        }
        let pr = &self.privacy;
        if pr.epsilon <= 0.0 || !pr.epsilon.is_finite() {
            return Err("privacy.epsilon must be positive".into());
        }
        if pr.delta < 0.0 || pr.delta >= 1.0 {
            return Err("privacy.delta must lie in [0, 1)".into());
        }
        let needs_delta = matches!(
            pr.mechanism,
            MechanismName::OutputGauss | MechanismName::ObjPerturb | MechanismName::PrivateFw
        );
        if needs_delta && pr.delta == 0.0 {
            return Err(format!(
                "privacy.delta must be positive for this mechanism; only output_gamma supports delta = 0 \
                 (got mechanism {:?})",
                pr.mechanism
            ));
        }
        let r = &self.run;
        if r.alpha <= 0.0 || r.alpha >= 1.0 {
            return Err("run.alpha must lie strictly between 0 and 1".into());
        }
        if r.eval_samples == 0 || r.theta_star_samples == 0 {
            return Err("run sample sizes must be positive".into());
        }
        if r.width_samples < 2 {
            return Err("run.width_samples must be at least 2".into());
        }
        if r.solver_max_iters == 0 {
            return Err("run.solver_max_iters must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
[task]
kind = "lasso_synthetic"
p = 4
n_grid = [128, 256, 512]
trials = 10

[model]
loss = "squared"
f_kind = "trunc:2"
lambda = "auto"

[privacy]
epsilon = 1.0
delta = 1e-6
mechanism = "output_gauss"

[run]
seed = 42
alpha = 0.05
"#;

    #[test]
    fn parses_the_example_and_round_trips() {
        let config = Config::from_toml(EXAMPLE).unwrap();
        assert_eq!(config.task.kind, TaskKind::LassoSynthetic);
        assert_eq!(config.model.f_kind, PenaltyKind::Truncated(2));
        assert_eq!(config.model.lambda, LambdaValue::Auto);
        assert_eq!(config.run.eval_samples, DEFAULT_EVAL_SAMPLES);

        let echoed = Config::from_toml(&config.to_toml()).unwrap();
        assert_eq!(config, echoed);
    }

    #[test]
    fn explicit_lambda_round_trips() {
        let text = EXAMPLE.replace("lambda = \"auto\"", "lambda = 2.5");
        let config = Config::from_toml(&text).unwrap();
        assert_eq!(config.model.lambda, LambdaValue::Fixed(2.5));
        let echoed = Config::from_toml(&config.to_toml()).unwrap();
        assert_eq!(config, echoed);
    }

    #[test]
    fn unknown_mechanism_names_the_options() {
        let text = EXAMPLE.replace("output_gauss", "output_cauchy");
        let err = Config::from_toml(&text).unwrap_err();
        assert!(err.contains("unknown variant"), "{err}");
        assert!(err.contains("output_gauss"), "{err}");
        assert!(err.contains("private_fw"), "{err}");
    }

    #[test]
    fn rejects_bad_sections() {
        for (from, to) in [
            ("n_grid = [128, 256, 512]", "n_grid = []"),
            ("trials = 10", "trials = 0"),
            ("epsilon = 1.0", "epsilon = 0.0"),
            ("alpha = 0.05", "alpha = 1.5"),
            ("delta = 1e-6", "delta = 0.0"),
            ("f_kind = \"trunc:2\"", "f_kind = \"trunc:0\""),
        ] {
            let text = EXAMPLE.replace(from, to);
            assert!(Config::from_toml(&text).is_err(), "accepted {to}");
        }
    }

    #[test]
    fn gamma_mechanism_accepts_zero_delta() {
        let text = EXAMPLE
            .replace("delta = 1e-6", "delta = 0.0")
            .replace("output_gauss", "output_gamma");
        assert!(Config::from_toml(&text).is_ok());
    }

    #[test]
    fn custom_task_requires_a_path() {
        let text = EXAMPLE.replace("kind = \"lasso_synthetic\"", "kind = \"custom_csv\"");
        let err = Config::from_toml(&text).unwrap_err();
        assert!(err.contains("task.path"), "{err}");
    }

    #[test]
    fn penalty_kind_strings() {
        assert_eq!("cardinality".parse::<PenaltyKind>().unwrap(), PenaltyKind::Cardinality);
        assert_eq!("trunc:3".parse::<PenaltyKind>().unwrap(), PenaltyKind::Truncated(3));
        assert_eq!("sqrt".parse::<PenaltyKind>().unwrap(), PenaltyKind::Sqrt);
        assert!("trunc:x".parse::<PenaltyKind>().is_err());
        assert!("linf".parse::<PenaltyKind>().is_err());
        assert_eq!(PenaltyKind::Truncated(3).to_string(), "trunc:3");
    }
}
