//! Approximation functions `psi` (univariate) and `Psi` (multivariate).

use serde::{Deserialize, Serialize};

use crate::arith::{rat, Rational};
use crate::Error;

/// Support of a sparse function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Support {
    /// `{base^k : k >= 0}`.
    PowersOf { base: u64 },
    Explicit { values: Vec<u64> },
}

impl Support {
    pub fn contains(&self, q: u64) -> bool {
        match self {
            Support::PowersOf { base } => {
                if *base < 2 {
                    return q == 1;
                }
                let mut x = q;
                while x.is_multiple_of(*base) {
                    x /= base;
                }
                x == 1
            }
            Support::Explicit { values } => values.contains(&q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsiKind {
    /// `c q^(-s)`.
    Power { c: Rational, s: Rational },
    /// `min(c q^(-s), 1/q)`.
    Capped { c: Rational, s: Rational },
    /// `values[q - 1]`; the table length is the domain bound.
    Table { values: Vec<Rational> },
    /// `c q^(-s)` on the support, 0 elsewhere.
    Sparse { support: Support, c: Rational, s: Rational },
    Zero,
}

/// A univariate approximation function with an optional constant ceiling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxFunction {
    #[serde(flatten)]
    pub kind: PsiKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_max: Option<u64>,
}

/// `q^(-s)`: exact for integer `s`, otherwise the exact value of the
/// correctly rounded double `q^(-s)`.
fn inverse_power(q: u64, s: &Rational) -> Rational {
    if s.is_integer() {
        let e = s.to_i128_parts().expect("integer exponent fits").0;
        Rational::integer(q as i128).pow(-(e as i32))
    } else {
        Rational::from_f64((q as f64).powf(-s.to_f64())).expect("finite power")
    }
}

impl ApproxFunction {
    pub fn new(kind: PsiKind) -> Self {
        ApproxFunction {
            kind,
            ceiling: None,
            q_max: None,
        }
    }

    pub fn with_ceiling(mut self, c: Rational) -> Self {
        self.ceiling = Some(c);
        self
    }

    pub fn zero() -> Self {
        Self::new(PsiKind::Zero)
    }

    /// `c / q^s` with integer parameters.
    pub fn power(c: Rational, s: Rational) -> Self {
        Self::new(PsiKind::Power { c, s })
    }

    pub fn capped(c: Rational, s: Rational) -> Self {
        Self::new(PsiKind::Capped { c, s })
    }

    pub fn table(values: Vec<Rational>) -> Self {
        Self::new(PsiKind::Table { values })
    }

    /// Named presets used by the experiments and the default config.
    pub fn preset(name: &str) -> Option<Self> {
        let quarter = rat(1, 4);
        Some(match name {
            "inverse" => Self::power(rat(1, 1), rat(1, 1)).with_ceiling(quarter),
            "half_inverse_capped" => Self::capped(rat(1, 2), rat(1, 1)).with_ceiling(quarter),
            "power_2_2" => Self::power(rat(1, 1), rat(11, 5)).with_ceiling(quarter),
            "quarter_inverse" => Self::power(quarter, rat(1, 1)),
            "quarter_inverse_capped" => Self::capped(quarter, rat(1, 1)),
            "dyadic_sparse" => Self::new(PsiKind::Sparse {
                support: Support::PowersOf { base: 2 },
                c: quarter,
                s: rat(2, 1),
            }),
            "zero" => Self::zero(),
            _ => return None,
        })
    }

    pub const PRESETS: [&'static str; 7] = [
        "inverse",
        "half_inverse_capped",
        "power_2_2",
        "quarter_inverse",
        "quarter_inverse_capped",
        "dyadic_sparse",
        "zero",
    ];

    /// Largest admissible argument.
    pub fn domain_bound(&self) -> u64 {
        let table = match &self.kind {
            PsiKind::Table { values } => values.len() as u64,
            _ => u64::MAX,
        };
        table.min(self.q_max.unwrap_or(u64::MAX))
    }

    pub fn check_domain(&self, q: u64) -> Result<(), Error> {
        let q_max = self.domain_bound();
        if q > q_max {
            return Err(Error::BeyondDomain { q, q_max });
        }
        Ok(())
    }

    /// Exact `psi(q)` for `q >= 1`.
    pub fn value(&self, q: u64) -> Result<Rational, Error> {
        if q == 0 {
            return Err(Error::ZeroInput("psi"));
        }
        self.check_domain(q)?;
        let base = match &self.kind {
            PsiKind::Power { c, s } => c * &inverse_power(q, s),
            PsiKind::Capped { c, s } => (c * &inverse_power(q, s)).min(rat(1, q as i128)),
            PsiKind::Table { values } => values[q as usize - 1].clone(),
            PsiKind::Sparse { support, c, s } => {
                if support.contains(q) {
                    c * &inverse_power(q, s)
                } else {
                    Rational::zero()
                }
            }
            PsiKind::Zero => Rational::zero(),
        };
        Ok(match &self.ceiling {
            Some(cap) => base.min(cap.clone()),
            None => base,
        })
    }

    /// Double-precision `psi(q)` for sampling loops.
    pub fn value_f64(&self, q: u64) -> f64 {
        let qf = q as f64;
        let base = match &self.kind {
            PsiKind::Power { c, s } => c.to_f64() * qf.powf(-s.to_f64()),
            PsiKind::Capped { c, s } => (c.to_f64() * qf.powf(-s.to_f64())).min(1.0 / qf),
            PsiKind::Table { values } => values.get(q as usize - 1).map_or(0.0, Rational::to_f64),
            PsiKind::Sparse { support, c, s } => {
                if support.contains(q) {
                    c.to_f64() * qf.powf(-s.to_f64())
                } else {
                    0.0
                }
            }
            PsiKind::Zero => 0.0,
        };
        match &self.ceiling {
            Some(cap) => base.min(cap.to_f64()),
            None => base,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, PsiKind::Zero)
    }

    /// Checks `0 <= psi(q) < 1/2` for `1 <= q <= upto`.
    pub fn validate(&self, upto: u64) -> Result<(), Error> {
        let half = rat(1, 2);
        for q in 1..=upto.min(self.domain_bound()) {
            let v = self.value(q)?;
            if v.is_negative() || v >= half {
                return Err(Error::PsiOutOfRange {
                    q,
                    value: v.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Checks `psi(q) <= 1/q` for `1 <= q <= upto`.
    pub fn validate_capped(&self, upto: u64) -> Result<(), Error> {
        for q in 1..=upto.min(self.domain_bound()) {
            let v = self.value(q)?;
            if v > rat(1, q as i128) {
                return Err(Error::InvalidSpec(format!(
                    "psi({q}) = {v} exceeds 1/q; use a capped function"
                )));
            }
        }
        Ok(())
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        let body = match &self.kind {
            PsiKind::Power { c, s } => format!("{c}*q^-{s}"),
            PsiKind::Capped { c, s } => format!("min({c}*q^-{s},1/q)"),
            PsiKind::Table { values } => format!("table[{}]", values.len()),
            PsiKind::Sparse { support, c, s } => match support {
                Support::PowersOf { base } => format!("{c}*q^-{s} on {base}^k"),
                Support::Explicit { values } => format!("{c}*q^-{s} on {} points", values.len()),
            },
            PsiKind::Zero => "0".to_string(),
        };
        match &self.ceiling {
            Some(cap) => format!("min({body},{cap})"),
            None => body,
        }
    }
}

/// `Psi(q) = c * prod max(|q_i|, 1)^(-s_i)` on nonzero integer vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiPsi {
    pub c: Rational,
    pub s: Vec<Rational>,
}

impl MultiPsi {
    pub fn new(c: Rational, s: Vec<Rational>) -> Result<Self, Error> {
        if c.is_negative() || c >= rat(1, 2) || s.iter().any(Rational::is_negative) {
            return Err(Error::InvalidSpec(
                "multivariate Psi needs 0 <= c < 1/2 and nonnegative exponents".into(),
            ));
        }
        Ok(MultiPsi { c, s })
    }

    /// The univariate-style constant function `Psi = c`.
    pub fn constant(c: Rational, n: usize) -> Result<Self, Error> {
        Self::new(c, vec![Rational::zero(); n])
    }

    pub fn value(&self, q: &[i64]) -> Rational {
        let mut v = self.c.clone();
        for (qi, si) in q.iter().zip(&self.s) {
            if !si.is_zero() {
                v *= &inverse_power(qi.unsigned_abs().max(1), si);
            }
        }
        v
    }
}
