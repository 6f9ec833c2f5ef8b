//! Regression pins: constants and values recorded from calibration runs.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::Rational;
use crate::Error;

/// The pins file shipped with the crate.
pub const SHIPPED: &str = include_str!("../pins.toml");

const HEADER: &str = "\
# Regression pins for the verification suite.
#
# Every value below was produced by `kglab verify-suite --recalibrate` from
# exact oracle runs over the frozen grids in `verify.rs`. Audit constants are
# the exact maxima of lhs / rhs over their grids. QIA entries pin the exact
# certified ratio by SHA-256 of its `num/den` form, with a floor rounded down
# to three decimals. Dichotomy hit counts are the seeded Monte Carlo counts.
";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditConstants {
    pub basic_bound: Rational,
    pub step2: Rational,
    pub step3: Rational,
    pub gallagher: Rational,
    pub rational_pair: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QiaPin {
    pub target: Rational,
    #[serde(rename = "Q")]
    pub q: u64,
    pub floor: Rational,
    pub approx: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepPins {
    pub q: u64,
    pub step2_lhs: Rational,
    pub step3_lhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DichotomyPins {
    pub samples: u64,
    pub seed: u64,
    pub plain_hits: u64,
    pub tilde_hits: u64,
    pub floor: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pins {
    pub audits: AuditConstants,
    pub steps: StepPins,
    pub dichotomy: DichotomyPins,
    pub qia: Vec<QiaPin>,
}

impl Pins {
    pub fn parse(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Pins(e.to_string()))
    }

    pub fn shipped() -> Result<Self, Error> {
        Self::parse(SHIPPED)
    }

    pub fn to_toml(&self) -> Result<String, Error> {
        let body = toml::to_string(self).map_err(|e| Error::Pins(e.to_string()))?;
        Ok(format!("{HEADER}\n{body}"))
    }

    pub fn qia_pin(&self, target: &Rational, q: u64) -> Option<&QiaPin> {
        self.qia.iter().find(|p| &p.target == target && p.q == q)
    }
}

/// Hex SHA-256 of the `num/den` form.
pub fn digest(r: &Rational) -> String {
    format!("{:x}", Sha256::digest(r.to_string().as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn shipped_pins_parse_and_round_trip() {
        let pins = Pins::shipped().unwrap();
        assert_eq!(Pins::parse(&pins.to_toml().unwrap()).unwrap(), pins);
        assert!(pins.audits.gallagher.is_positive());
        assert!(!pins.qia.is_empty());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(&rat(4, 5)), digest(&rat(8, 10)));
        assert_ne!(digest(&rat(4, 5)), digest(&rat(5, 4)));
        assert_eq!(digest(&rat(4, 5)).len(), 64);
    }
}
