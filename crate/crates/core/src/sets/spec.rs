use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::arcs::ArcFamily;
use crate::arith::{gcd_vec, rat, Rational};
use crate::circle::CircleIntervalUnion;
use crate::dirichlet::{dirichlet_pair, TargetScheme};
use crate::Error;

/// Which gcd restriction a set carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `A_q`: no restriction.
    Plain,
    /// `A'_q`: `gcd(q, p) = 1`.
    Coprime,
    /// `A~_q`: `gcd(q, b_q p + a_q) = 1` with the Dirichlet pair of `gcd(q)`.
    Tilde,
    /// `A''_q`: `gcd(q, b p + a) = 1` with the target's own `(a, b)`.
    FixedPair,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Coprime => "coprime",
            Variant::Tilde => "tilde",
            Variant::FixedPair => "fixed_pair",
        }
    }
}

/// The restriction `gcd(q, b p + a) = 1` attached to one set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdFilter {
    pub a: Vec<i64>,
    pub b: u64,
}

impl GcdFilter {
    /// Whether `gcd(g, b p_1 + a_1, ..., b p_m + a_m) = 1`.
    pub fn admits(&self, g: u64, p: &[i64]) -> bool {
        let mut acc = g as u128;
        for (pi, ai) in p.iter().zip(&self.a) {
            let t = (self.b as i128 * *pi as i128 + *ai as i128).unsigned_abs();
            acc = acc.gcd(&t);
            if acc == 1 {
                return true;
            }
        }
        acc == 1
    }
}

/// One approximation set `A_{n,m}(q, delta)` of a given variant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSpec {
    pub n: usize,
    pub m: usize,
    pub variant: Variant,
    pub q: Vec<i64>,
    pub delta: Rational,
    pub target: TargetScheme,
}

impl SetSpec {
    pub fn new(
        n: usize,
        m: usize,
        variant: Variant,
        q: Vec<i64>,
        delta: Rational,
        target: TargetScheme,
    ) -> Result<Self, Error> {
        let spec = SetSpec {
            n,
            m,
            variant,
            q,
            delta,
            target,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Shorthand for `n = m = 1` with a scalar target.
    pub fn line(variant: Variant, d: i64, delta: Rational, y: Rational) -> Result<Self, Error> {
        let target = match variant {
            Variant::FixedPair => {
                let (u, v) = y
                    .to_i128_parts()
                    .ok_or_else(|| Error::InvalidSpec("target too large".into()))?;
                TargetScheme::fixed_pair(vec![u as i64], v as u64)?
            }
            _ => TargetScheme::scalar(y),
        };
        Self::new(1, 1, variant, vec![d], delta, target)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n == 0 || self.m == 0 || self.q.len() != self.n {
            return Err(Error::InvalidSpec(format!(
                "q must have n = {} components and n, m >= 1",
                self.n
            )));
        }
        gcd_vec(&self.q)?;
        if self.delta.is_negative() || self.delta >= rat(1, 2) {
            return Err(Error::RadiusTooLarge(self.delta.to_string()));
        }
        self.target.validate(self.m)?;
        match (self.variant, &self.target) {
            (Variant::Tilde, TargetScheme::FixedPair { .. }) => Err(Error::InvalidSpec(
                "the tilde variant takes its pairs from Dirichlet's theorem, not a fixed pair".into(),
            )),
            (Variant::Tilde, _) if self.m != 1 => Err(Error::UnsupportedDimension {
                what: "Dirichlet pairs for vector targets",
                n: self.n,
                m: self.m,
            }),
            (Variant::FixedPair, t) if !matches!(t, TargetScheme::FixedPair { .. }) => Err(
                Error::InvalidSpec("the fixed-pair variant needs a fixed-pair target".into()),
            ),
            _ => Ok(()),
        }
    }

    pub fn gcd(&self) -> u64 {
        gcd_vec(&self.q).expect("validated nonzero")
    }

    /// `y_q`.
    pub fn target_vector(&self) -> Result<Vec<Rational>, Error> {
        self.target.target_for(self.gcd())
    }

    /// The gcd restriction, `None` for the plain variant.
    pub fn filter(&self) -> Result<Option<GcdFilter>, Error> {
        Ok(match self.variant {
            Variant::Plain => None,
            Variant::Coprime => Some(GcdFilter {
                a: vec![0; self.m],
                b: 1,
            }),
            Variant::Tilde => {
                let y = self.target_vector()?;
                let pair = dirichlet_pair(&y[0], self.gcd() as i64)?;
                Some(GcdFilter {
                    a: vec![pair.a],
                    b: pair.b,
                })
            }
            Variant::FixedPair => match &self.target {
                TargetScheme::FixedPair { a, b } => Some(GcdFilter { a: a.clone(), b: *b }),
                _ => unreachable!("validated"),
            },
        })
    }

    /// The one-dimensional family `A_{1,1}(d, delta)` with `d = gcd(q)` and
    /// the same restriction, whose preimage under `T_k` is this set.
    pub fn arc_family(&self) -> Result<ArcFamily, Error> {
        if self.m != 1 {
            return Err(Error::UnsupportedDimension {
                what: "exact interval construction",
                n: self.n,
                m: self.m,
            });
        }
        let d = if self.n == 1 {
            self.q[0]
        } else {
            self.gcd() as i64
        };
        let y = self.target_vector()?.remove(0);
        let filter = self.filter()?.map(|f| (f.a[0], f.b));
        ArcFamily::new(d, self.delta.clone(), y, filter)
    }
}

/// Exact interval union of the reduced one-dimensional set.
pub fn build_interval_set(spec: &SetSpec) -> Result<CircleIntervalUnion, Error> {
    spec.arc_family()?.to_union()
}

/// Per-coordinate factors of a plain set with `m >= 1`, after reduction by `T_k`.
///
/// The reduced set is the product of these unions in `[0, 1)^m`.
pub fn plain_product_factors(spec: &SetSpec) -> Result<Vec<CircleIntervalUnion>, Error> {
    if spec.variant != Variant::Plain {
        return Err(Error::UnsupportedDimension {
            what: "product structure of a gcd-restricted set",
            n: spec.n,
            m: spec.m,
        });
    }
    let d = if spec.n == 1 {
        spec.q[0]
    } else {
        spec.gcd() as i64
    };
    spec.target_vector()?
        .into_iter()
        .map(|y| ArcFamily::new(d, spec.delta.clone(), y, None)?.to_union())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_set_examples() {
        let plain = SetSpec::line(Variant::Plain, 2, rat(1, 16), rat(0, 1)).unwrap();
        let u = build_interval_set(&plain).unwrap();
        assert_eq!(u.measure(), rat(1, 8));
        assert!(u.contains(&rat(0, 1)) && u.contains(&rat(1, 2)));

        let tilde = SetSpec::line(Variant::Tilde, 4, rat(1, 10), rat(1, 3)).unwrap();
        assert_eq!(tilde.filter().unwrap(), Some(GcdFilter { a: vec![1], b: 3 }));
        let u = build_interval_set(&tilde).unwrap();
        let expected = CircleIntervalUnion::from_arcs([
            (&rat(1, 12), &rat(1, 40)),
            (&rat(7, 12), &rat(1, 40)),
        ])
        .unwrap();
        assert_eq!(u, expected);
        assert_eq!(u.measure(), rat(1, 10));

        let coprime = SetSpec::line(Variant::Coprime, 12, rat(1, 10), rat(0, 1)).unwrap();
        let u = build_interval_set(&coprime).unwrap();
        let centers: Vec<Rational> = [1, 5, 7, 11].iter().map(|&p| rat(p, 12)).collect();
        let radius = rat(1, 120);
        let expected =
            CircleIntervalUnion::from_arcs(centers.iter().map(|c| (c, &radius))).unwrap();
        assert_eq!(u, expected);
        assert_eq!(u.measure(), rat(1, 15));
    }

    #[test]
    fn validation() {
        assert!(SetSpec::line(Variant::Plain, 2, rat(1, 2), rat(0, 1)).is_err());
        assert!(SetSpec::line(Variant::Plain, 0, rat(1, 4), rat(0, 1)).is_err());
        let pair = TargetScheme::fixed_pair(vec![1], 3).unwrap();
        assert!(SetSpec::new(1, 1, Variant::Tilde, vec![3], rat(1, 8), pair.clone()).is_err());
        assert!(SetSpec::new(1, 1, Variant::FixedPair, vec![3], rat(1, 8), pair).is_ok());
        let y = TargetScheme::scalar(rat(1, 3));
        assert!(SetSpec::new(1, 1, Variant::FixedPair, vec![3], rat(1, 8), y).is_err());
        let two = TargetScheme::homogeneous(2);
        assert!(SetSpec::new(1, 2, Variant::Tilde, vec![3], rat(1, 8), two.clone()).is_err());
        let spec = SetSpec::new(2, 2, Variant::Coprime, vec![4, 6], rat(1, 8), two).unwrap();
        assert!(matches!(
            build_interval_set(&spec),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn variant_ordering_by_inclusion() {
        for d in 1..=40i64 {
            for y in [rat(0, 1), rat(1, 3), rat(2, 7), rat(5, 12)] {
                let delta = rat(1, 7);
                let plain = build_interval_set(&SetSpec::line(Variant::Plain, d, delta.clone(), y.clone()).unwrap()).unwrap();
                let tilde = build_interval_set(&SetSpec::line(Variant::Tilde, d, delta.clone(), y.clone()).unwrap()).unwrap();
                let fixed = build_interval_set(&SetSpec::line(Variant::FixedPair, d, delta.clone(), y.clone()).unwrap()).unwrap();
                assert!(tilde.is_subset_of(&plain));
                assert!(fixed.is_subset_of(&plain));
                if y.is_zero() {
                    let coprime = build_interval_set(&SetSpec::line(Variant::Coprime, d, delta.clone(), y.clone()).unwrap()).unwrap();
                    assert_eq!(coprime, tilde);
                }
            }
        }
    }

    #[test]
    fn reduced_family_uses_gcd() {
        let spec = SetSpec::new(
            2,
            1,
            Variant::Tilde,
            vec![8, 4],
            rat(1, 10),
            TargetScheme::scalar(rat(1, 3)),
        )
        .unwrap();
        let fam = spec.arc_family().unwrap();
        assert_eq!(fam.d(), 4);
        assert_eq!(fam.filter(), Some((1, 3)));
    }

    #[test]
    fn product_factors_for_vector_targets() {
        let spec = SetSpec::new(
            1,
            2,
            Variant::Plain,
            vec![3],
            rat(1, 8),
            TargetScheme::Rational {
                y: vec![rat(0, 1), rat(1, 2)],
            },
        )
        .unwrap();
        let f = plain_product_factors(&spec).unwrap();
        assert_eq!(f.len(), 2);
        let total = f.iter().fold(Rational::one(), |acc, u| acc * u.measure());
        assert_eq!(total, rat(1, 16));
    }
}
