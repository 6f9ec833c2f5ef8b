use serde::{Deserialize, Serialize};

use crate::arith::{factorize, rat, totient_table, ExactSum, Rational};
use crate::dirichlet::{DirichletTable, TargetScheme};
use crate::sets::{ApproxFunction, ArcFamily, SetSpec, Variant};
use crate::Error;

/// `(2 delta)^m * prod_{p | d, p ∤ b} (1 - p^-m)`; `b = None` means no
/// gcd restriction.
pub fn closed_form_measure(m: usize, d: u64, delta: &Rational, b: Option<u64>) -> Result<Rational, Error> {
    if d == 0 {
        return Err(Error::ZeroInput("closed_form_measure"));
    }
    if delta.is_negative() || *delta >= rat(1, 2) {
        return Err(Error::RadiusTooLarge(delta.to_string()));
    }
    let mut value = (delta * &rat(2, 1)).pow(m as i32);
    if let Some(b) = b {
        for p in factorize(d)?.primes() {
            if b % p != 0 {
                let pm = Rational::integer(p as i128).pow(m as i32);
                value *= &(Rational::one() - pm.recip());
            }
        }
    }
    Ok(value)
}

/// Closed-form measure of a set, through its gcd and restriction.
pub fn closed_form_for_spec(spec: &SetSpec) -> Result<Rational, Error> {
    let b = spec.filter()?.map(|f| f.b);
    closed_form_measure(spec.m, spec.gcd(), &spec.delta, b)
}

/// `sum_{q=1}^{Q} q^(n-1) psi(q)^m`.
pub fn partial_sum_psi(psi: &ApproxFunction, n: usize, m: usize, q_max: u64) -> Result<Rational, Error> {
    psi.check_domain(q_max)?;
    let mut acc = ExactSum::new();
    for q in 1..=q_max {
        let v = psi.value(q)?;
        if v.is_zero() {
            continue;
        }
        acc.add(&(Rational::integer(q as i128).pow(n as i32 - 1) * v.pow(m as i32)));
    }
    Ok(acc.finish())
}

/// A family `q -> set(q, psi(|q|))` with `m = 1` and a fixed scalar
/// target, holding the restriction of every gcd up to `max_d`.
#[derive(Clone, Debug)]
pub struct Family {
    pub variant: Variant,
    pub psi: ApproxFunction,
    target: TargetScheme,
    y: Rational,
    filters: Vec<Option<(i64, u64)>>,
}

impl Family {
    /// Prepares restrictions for every modulus up to `max_d`.
    pub fn new(variant: Variant, psi: ApproxFunction, target: &TargetScheme, max_d: u64) -> Result<Self, Error> {
        target.validate(1)?;
        let y = match target {
            TargetScheme::Rational { y } => y[0].clone(),
            TargetScheme::FixedPair { a, b } => rat(a[0] as i128, *b as i128),
            TargetScheme::Moving { .. } => {
                return Err(Error::InvalidSpec(
                    "set families over many moduli need a fixed target".into(),
                ))
            }
        };
        let filters = match (variant, target) {
            (Variant::Plain, _) => vec![None; max_d as usize],
            (Variant::Coprime, _) => vec![Some((0, 1)); max_d as usize],
            (Variant::Tilde, TargetScheme::Rational { .. }) => {
                let table = DirichletTable::build(&y, max_d)?;
                (1..=max_d as i64)
                    .map(|d| table.get(d).map(|p| (p.a, p.b)))
                    .collect()
            }
            (Variant::FixedPair, TargetScheme::FixedPair { a, b }) => vec![Some((a[0], *b)); max_d as usize],
            _ => {
                return Err(Error::InvalidSpec(format!(
                    "variant {} does not accept this target",
                    variant.name()
                )))
            }
        };
        Ok(Family {
            variant,
            psi,
            target: target.clone(),
            y,
            filters,
        })
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn target(&self) -> &TargetScheme {
        &self.target
    }

    pub fn max_d(&self) -> u64 {
        self.filters.len() as u64
    }

    /// Restriction of the modulus `d` (sign ignored).
    pub fn filter(&self, d: i64) -> Option<(i64, u64)> {
        self.filters[d.unsigned_abs() as usize - 1]
    }

    pub fn b(&self, d: i64) -> Option<u64> {
        self.filter(d).map(|(_, b)| b)
    }

    /// `A_{1,1}(d, delta)` with this family's restriction.
    pub fn arcs(&self, d: i64, delta: Rational) -> Result<ArcFamily, Error> {
        ArcFamily::new(d, delta, self.y.clone(), self.filter(d))
    }
}

/// Exact `sum_{1 <= |q| <= Q} |set_q|` with its per-norm breakdown.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetMeasureSum {
    pub total: Rational,
    pub per_norm: Vec<Rational>,
}

/// `sum_s sum_{d | s} 8 phi(s/d) |A_{1,1}(d, psi(s))|` for `(n, m) = (2, 1)`.
pub fn sum_set_measures(family: &Family, q_max: u64) -> Result<SetMeasureSum, Error> {
    family.psi.check_domain(q_max)?;
    if q_max > family.max_d() {
        return Err(Error::BeyondDomain {
            q: q_max,
            q_max: family.max_d(),
        });
    }
    let phi = totient_table(q_max as usize);
    let mut per_norm = Vec::with_capacity(q_max as usize);
    let mut acc = ExactSum::new();
    for s in 1..=q_max {
        let delta = family.psi.value(s)?;
        let mut shell = ExactSum::new();
        if !delta.is_zero() {
            for d in crate::arith::divisors(s) {
                let count = 8 * phi[(s / d) as usize] as i128;
                let mu = closed_form_measure(1, d, &delta, family.b(d as i64))?;
                shell.add(&(Rational::integer(count) * mu));
            }
        }
        let shell = shell.finish();
        acc.add(&shell);
        per_norm.push(shell);
    }
    Ok(SetMeasureSum {
        total: acc.finish(),
        per_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{enumerate_vectors, gcd_vec};
    use crate::sets::build_interval_set;

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_measure(1, 12, &rat(1, 10), Some(1)).unwrap(), rat(1, 15));
        assert_eq!(closed_form_measure(1, 12, &rat(1, 10), Some(2)).unwrap(), rat(2, 15));
        assert_eq!(closed_form_measure(2, 7, &rat(0, 1), Some(3)).unwrap(), rat(0, 1));
        assert_eq!(closed_form_measure(2, 6, &rat(1, 4), None).unwrap(), rat(1, 4));
        assert!(closed_form_measure(1, 0, &rat(1, 4), None).is_err());
    }

    #[test]
    fn closed_form_matches_intervals_on_small_grid() {
        for d in 1..=60i64 {
            for y in [rat(0, 1), rat(1, 3), rat(2, 7), rat(5, 12)] {
                for variant in [Variant::Plain, Variant::Coprime, Variant::Tilde, Variant::FixedPair] {
                    let spec = SetSpec::line(variant, d, rat(1, 7), y.clone()).unwrap();
                    assert_eq!(
                        closed_form_for_spec(&spec).unwrap(),
                        build_interval_set(&spec).unwrap().measure(),
                        "d={d} y={y} {variant:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn partial_sums() {
        let inv_sq = ApproxFunction::power(rat(1, 1), rat(2, 1));
        assert_eq!(partial_sum_psi(&inv_sq, 2, 1, 3).unwrap(), rat(11, 6));
        assert_eq!(partial_sum_psi(&ApproxFunction::zero(), 2, 1, 50).unwrap(), rat(0, 1));
        let quarter = ApproxFunction::preset("quarter_inverse").unwrap();
        assert_eq!(partial_sum_psi(&quarter, 2, 1, 10).unwrap(), rat(5, 2));
        let table = ApproxFunction::table(vec![rat(1, 8)]);
        assert!(matches!(partial_sum_psi(&table, 1, 1, 2), Err(Error::BeyondDomain { .. })));
    }

    #[test]
    fn set_measure_sums() {
        let quarter = ApproxFunction::preset("quarter_inverse").unwrap();
        let coprime = Family::new(Variant::Coprime, quarter.clone(), &TargetScheme::scalar(rat(0, 1)), 10).unwrap();
        let s = sum_set_measures(&coprime, 2).unwrap();
        assert_eq!(s.total, rat(7, 1));
        assert_eq!(s.per_norm, vec![rat(4, 1), rat(3, 1)]);
        let plain = Family::new(Variant::Plain, quarter, &TargetScheme::scalar(rat(1, 3)), 10).unwrap();
        assert_eq!(sum_set_measures(&plain, 1).unwrap().total, rat(4, 1));
        let zero = Family::new(Variant::Plain, ApproxFunction::zero(), &TargetScheme::scalar(rat(0, 1)), 10).unwrap();
        assert_eq!(sum_set_measures(&zero, 10).unwrap().total, rat(0, 1));
    }

    // Brute force over every vector with the closed form of its own gcd.
    #[test]
    fn set_measure_sum_matches_vector_enumeration() {
        let psi = ApproxFunction::preset("half_inverse_capped").unwrap();
        for y in [rat(0, 1), rat(2, 7)] {
            let target = TargetScheme::scalar(y.clone());
            let fam = Family::new(Variant::Tilde, psi.clone(), &target, 30).unwrap();
            let fast = sum_set_measures(&fam, 30).unwrap();
            let mut brute = Rational::zero();
            for s in 1..=30u64 {
                for q in enumerate_vectors(s, 2).unwrap() {
                    let spec = SetSpec::new(2, 1, Variant::Tilde, q.clone(), psi.value(s).unwrap(), target.clone()).unwrap();
                    assert_eq!(spec.gcd(), gcd_vec(&q).unwrap());
                    brute += closed_form_for_spec(&spec).unwrap();
                }
            }
            assert_eq!(fast.total, brute);
        }
    }

    #[test]
    fn plain_sum_is_exactly_the_weighted_psi_sum() {
        let psi = ApproxFunction::preset("inverse").unwrap();
        let fam = Family::new(Variant::Plain, psi.clone(), &TargetScheme::scalar(rat(1, 3)), 200).unwrap();
        let total = sum_set_measures(&fam, 200).unwrap().total;
        let weighted = partial_sum_psi(&psi, 2, 1, 200).unwrap() * rat(16, 1);
        assert_eq!(total, weighted);
    }
}
