//! The JSON experiment configuration shared by `solve` and `restore`.

use std::path::{Path, PathBuf};

use padisno::solver::Variant;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Toy2d,
    Restore,
    StronglyConvex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Padisno,
    CPadisno,
}

impl From<VariantKind> for Variant {
    fn from(kind: VariantKind) -> Variant {
        match kind {
            VariantKind::Padisno => Variant::Padisno,
            VariantKind::CPadisno => Variant::CPadisno,
        }
    }
}

/// One experiment run. Unknown JSON keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub variant: VariantKind,
    /// Inertial limit for the prox anchor.
    pub alpha: f64,
    /// Inertial limit for the gradient anchor.
    pub beta: f64,
    /// Explicit step size; when absent the per-problem default applies.
    pub step_override: Option<f64>,
    pub allow_unsafe_step: bool,
    pub max_iters: usize,
    /// Displacement stopping tolerance (`solve` only).
    pub tol: f64,
    pub seed: u64,
    /// Input PGM for `restore`; a synthetic 64x64 image is used when absent.
    pub input_image: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ExperimentConfig {
        ExperimentConfig {
            problem: ProblemKind::Toy2d,
            variant: VariantKind::CPadisno,
            alpha: -0.4,
            beta: 2.5,
            step_override: None,
            allow_unsafe_step: false,
            max_iters: 1000,
            tol: 1e-12,
            seed: 7,
            input_image: None,
            output_dir: PathBuf::from("out"),
        }
    }

    #[test]
    fn json_round_trip() {
        let config = sample();
        let json = config.to_json();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.alpha, config.alpha);
        assert_eq!(back.problem, config.problem);
        assert_eq!(back.variant, config.variant);
        assert_eq!(back.output_dir, config.output_dir);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut value: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        value["surprise"] = serde_json::json!(1);
        let result: Result<ExperimentConfig, _> = serde_json::from_value(value);
        assert!(result.is_err());
    }

    #[test]
    fn missing_required_key_rejected() {
        let mut value: serde_json::Value = serde_json::from_str(&sample().to_json()).unwrap();
        value.as_object_mut().unwrap().remove("alpha");
        let result: Result<ExperimentConfig, _> = serde_json::from_value(value);
        assert!(result.is_err());
    }

    #[test]
    fn variant_names_are_snake_case() {
        let json = sample().to_json();
        assert!(json.contains("\"c_padisno\""));
        assert!(json.contains("\"toy2d\""));
    }
}
