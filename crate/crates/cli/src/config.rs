//! Experiment configuration: a single JSON document, validated before any
//! command runs.

use std::path::{Path, PathBuf};

use kg_core::arith::Rational;
use kg_core::dirichlet::TargetScheme;
use kg_core::sets::{ApproxFunction, Variant};
use kg_core::verify::Profile;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// The config shipped with the binary.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimension {
    pub n: usize,
    pub m: usize,
}

/// A named preset or an explicit function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PsiConfig {
    Preset { preset: String },
    Explicit(ApproxFunction),
}

impl PsiConfig {
    pub fn resolve(&self) -> Result<ApproxFunction, CliError> {
        match self {
            PsiConfig::Preset { preset } => ApproxFunction::preset(preset).ok_or_else(|| {
                CliError::config(format!(
                    "unknown psi preset {preset:?}; expected one of {}",
                    ApproxFunction::PRESETS.join(", ")
                ))
            }),
            PsiConfig::Explicit(f) => Ok(f.clone()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Range {
    pub from: u64,
    pub to: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tuple {
    pub d: i64,
    pub e: i64,
    pub q: u64,
    pub r: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GallagherCase {
    pub a: Rational,
    pub b: Rational,
    pub m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: Dimension,
    pub psi: PsiConfig,
    pub target: TargetScheme,
    pub variant: Variant,
    /// QIA cutoffs `Q`.
    pub cutoffs: Vec<u64>,
    /// Dichotomy windows `[Q0, Q1]`.
    pub schedule: Vec<(u64, u64)>,
    /// Moduli `d` for `dirichlet-pairs` and `measure`.
    pub moduli: Range,
    /// Radii for `measure`.
    pub radii: Vec<Rational>,
    /// Inputs for `disjointness`.
    pub tuples: Vec<Tuple>,
    /// Inputs for `gallagher`.
    pub gallagher: Vec<GallagherCase>,
    pub samples: u64,
    pub seed: u64,
    /// Second-moment floors in `dichotomy` (`n = 2` only).
    #[serde(default)]
    pub floors: bool,
    pub profile: Profile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn shipped() -> Self {
        serde_json::from_str(DEFAULT_CONFIG).expect("shipped config parses")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Scalar target `y`, or `a / b` for a fixed pair.
    pub fn scalar_target(&self) -> Result<Rational, CliError> {
        if self.dimension.m != 1 {
            return Err(CliError::config("this command needs m = 1"));
        }
        let y = self.target.target_for(1)?;
        Ok(y[0].clone())
    }

    /// Checks the normalizations every command relies on.
    pub fn validate(&self) -> Result<(), CliError> {
        let Dimension { n, m } = self.dimension;
        if !(1..=2).contains(&n) || m == 0 {
            return Err(CliError::config(format!("unsupported dimension (n, m) = ({n}, {m})")));
        }
        self.target.validate(m)?;
        if self.variant == Variant::FixedPair && !matches!(self.target, TargetScheme::FixedPair { .. }) {
            return Err(CliError::config("variant fixed_pair needs a fixed_pair target"));
        }
        let psi = self.psi.resolve()?;
        psi.validate(self.reach())?;
        if self.moduli.from == 0 || self.moduli.from > self.moduli.to {
            return Err(CliError::config("moduli must satisfy 1 <= from <= to"));
        }
        if self.cutoffs.windows(2).any(|w| w[0] >= w[1]) || self.cutoffs.first() == Some(&0) {
            return Err(CliError::config("cutoffs must be positive and increasing"));
        }
        if self.schedule.iter().any(|&(q0, q1)| q0 == 0 || q0 > q1) {
            return Err(CliError::config("schedule windows must satisfy 1 <= Q0 <= Q1"));
        }
        if self.samples == 0 {
            return Err(CliError::config("samples must be positive"));
        }
        Ok(())
    }

    /// The tilde QIA reduction needs `psi(q) <= 1/q` up to the last cutoff.
    pub fn validate_qia(&self) -> Result<(), CliError> {
        if self.variant == Variant::Tilde {
            let top = self.cutoffs.last().copied().unwrap_or(1);
            self.psi.resolve()?.validate_capped(top)?;
        }
        Ok(())
    }

    /// Largest `|q|` any command reaches.
    fn reach(&self) -> u64 {
        let cut = self.cutoffs.iter().copied().max().unwrap_or(1);
        let sched = self.schedule.iter().map(|w| w.1).max().unwrap_or(1);
        let tuples = self.tuples.iter().map(|t| t.q.max(t.r)).max().unwrap_or(1);
        cut.max(sched).max(tuples).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kg_core::arith::rat;

    #[test]
    fn shipped_config_validates() {
        let cfg = ExperimentConfig::shipped();
        cfg.validate().unwrap();
        cfg.validate_qia().unwrap();
        let again: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn psi_at_one_half_is_rejected() {
        let mut cfg = ExperimentConfig::shipped();
        cfg.psi = PsiConfig::Explicit(ApproxFunction::power(rat(1, 2), rat(1, 1)));
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("1/2"));
    }

    #[test]
    fn unnormalized_pair_is_rejected() {
        let mut cfg = ExperimentConfig::shipped();
        cfg.variant = Variant::FixedPair;
        cfg.target = TargetScheme::FixedPair { a: vec![2], b: 4 };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn tilde_qia_needs_capped_psi() {
        let mut cfg = ExperimentConfig::shipped();
        cfg.variant = Variant::Tilde;
        cfg.psi = PsiConfig::Preset { preset: "quarter_inverse".into() };
        cfg.validate().unwrap();
        assert!(cfg.validate_qia().is_ok());
        cfg.psi = PsiConfig::Explicit(ApproxFunction::power(rat(2, 5), rat(1, 2)));
        cfg.validate().unwrap();
        assert!(cfg.validate_qia().is_err());
    }

    #[test]
    fn unknown_preset_is_a_config_error() {
        let p = PsiConfig::Preset { preset: "nope".into() };
        assert_eq!(p.resolve().unwrap_err().exit_code(), 2);
    }
}
