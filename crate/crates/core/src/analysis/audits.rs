use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::measure::closed_form_measure;
use crate::arith::{divisors, factorize, rat, totient, ExactSum, Rational};
use crate::circle::CircleIntervalUnion;
use crate::dirichlet::dirichlet_pair;
use crate::sets::kernel::intersection_measure;
use crate::sets::{ApproxFunction, ArcFamily};
use crate::Error;

/// Both sides of an inequality `lhs <= C * rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditPair {
    pub lhs: Rational,
    pub rhs: Rational,
}

impl AuditPair {
    /// `lhs / rhs`, or `None` when `rhs = 0`.
    pub fn ratio(&self) -> Option<Rational> {
        (!self.rhs.is_zero()).then(|| &self.lhs / &self.rhs)
    }

    pub fn holds_with(&self, c: &Rational) -> bool {
        self.lhs <= c * &self.rhs
    }
}

fn tilde(d: i64, delta: Rational, y: &Rational) -> Result<ArcFamily, Error> {
    let p = dirichlet_pair(y, d)?;
    ArcFamily::new(d, delta, y.clone(), Some((p.a, p.b)))
}

/// `|A~(d, delta1) ∩ A~(e, delta2)|` against `delta1 delta2 + delta1 gcd(d, e) / |d|`.
pub fn basic_bound_audit(d: i64, e: i64, delta1: &Rational, delta2: &Rational, y: &Rational) -> Result<AuditPair, Error> {
    let lhs = intersection_measure(&tilde(d, delta1.clone(), y)?, &tilde(e, delta2.clone(), y)?)?;
    let g = d.unsigned_abs().gcd(&e.unsigned_abs());
    let rhs = delta1 * delta2 + delta1 * &rat(g as i128, d.unsigned_abs() as i128);
    Ok(AuditPair { lhs, rhs })
}

/// The two divisor-sum bounds of the QIA argument at a single norm `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepAudit {
    pub q: u64,
    pub step2: AuditPair,
    pub step3: AuditPair,
}

/// Step-2 and step-3 sums at norm `q`, each against `q psi(q)`.
///
/// Step 2: `sum_{d | q} 8 phi(q/d) sum_{1 <= |e| < d, |e| < 2 d^3 / q} psi(q) gcd(d, e) / d`.
/// Step 3: `sum_{d | q} 8 phi(q/d) psi(q) (sum_{gcd = 1} 1/d + sum_{gcd = 2} 2/d)`.
pub fn step_bounds_audit(q: u64, psi: &ApproxFunction) -> Result<StepAudit, Error> {
    let v = psi.value(q)?;
    let mut s2 = ExactSum::new();
    let mut s3 = ExactSum::new();
    for d in divisors(q) {
        let w = 8 * totient(q / d) as i128;
        let mut gsum2: i128 = 0;
        let mut c1: i128 = 0;
        let mut c2: i128 = 0;
        for e in 1..d {
            let g = d.gcd(&e);
            // Both signs of e contribute equally.
            if (e as u128) * (q as u128) < 2 * (d as u128).pow(3) {
                gsum2 += 2 * g as i128;
            }
            match g {
                1 => c1 += 2,
                2 => c2 += 2,
                _ => {}
            }
        }
        s2.add_small(w * gsum2, d as u128);
        s3.add_small(w * (c1 + 2 * c2), d as u128);
    }
    let rhs = Rational::integer(q as i128) * &v;
    Ok(StepAudit {
        q,
        step2: AuditPair { lhs: s2.finish() * &v, rhs: rhs.clone() },
        step3: AuditPair { lhs: s3.finish() * &v, rhs },
    })
}

/// Per-axis overlap `|(-a, a) ∩ ((-b, b) + j)|`.
fn axis_overlap(a: &Rational, b: &Rational, j: i64) -> Rational {
    let jr = Rational::integer(j as i128);
    let hi = a.clone().min(&jr + b);
    let lo = (-a).max(&jr - b);
    (hi - lo).max(Rational::zero())
}

/// `sum_{j in Z^m, j != 0} |U(a) ∩ (U(b) + j)|` for sup-norm balls of radii `a`, `b`.
pub fn gallagher_overlap_sum(a: &Rational, b: &Rational, m: usize) -> Result<Rational, Error> {
    if a.is_negative() || b.is_negative() {
        return Err(Error::InvalidSpec("radii must be nonnegative".into()));
    }
    let reach = (a + b).floor();
    let reach = i64::try_from(reach).map_err(|_| Error::InvalidSpec("radii too large".into()))?;
    let line: Rational = (-reach..=reach).map(|j| axis_overlap(a, b, j)).sum();
    let centre = axis_overlap(a, b, 0);
    Ok(line.pow(m as i32) - centre.pow(m as i32))
}

/// `|A''(q, delta1) ∩ A''(r, delta2)|` for `y = a/b` against `b delta1 delta2`.
pub fn rational_pair_audit(q: i64, r: i64, delta1: &Rational, delta2: &Rational, a: i64, b: u64) -> Result<AuditPair, Error> {
    if b == 0 || a.unsigned_abs().gcd(&b) != 1 {
        return Err(Error::InvalidSpec(format!("fixed pair {a}/{b} is not normalized")));
    }
    let y = rat(a.rem_euclid(b as i64) as i128, b as i128);
    let filter = Some((a, b));
    let f1 = ArcFamily::new(q, delta1.clone(), y.clone(), filter)?;
    let f2 = ArcFamily::new(r, delta2.clone(), y, filter)?;
    let lhs = intersection_measure(&f1, &f2)?;
    let rhs = Rational::integer(b as i128) * delta1 * delta2;
    Ok(AuditPair { lhs, rhs })
}

/// Window for the local density check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    /// Open arc `(center - radius, center + radius)`; radius `1/2` is the whole circle.
    Ball { center: Rational, radius: Rational },
    Union { set: CircleIntervalUnion },
}

impl Window {
    pub fn to_union(&self) -> Result<CircleIntervalUnion, Error> {
        match self {
            Window::Ball { radius, .. } if *radius == rat(1, 2) => Ok(CircleIntervalUnion::full()),
            Window::Ball { center, radius } => CircleIntervalUnion::from_arcs([(center, radius)]),
            Window::Union { set } => Ok(set.clone()),
        }
    }

    pub fn radius(&self) -> Option<&Rational> {
        match self {
            Window::Ball { radius, .. } => Some(radius),
            Window::Union { .. } => None,
        }
    }
}

/// The density constant for `m = 1`: half of `1/2^m`.
pub fn density_constant(m: usize) -> Rational {
    rat(1, 2) * rat(1, 2).pow(m as i32)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDensity {
    pub d: i64,
    pub lhs: Rational,
    pub rhs: Rational,
    /// `|d| >= 1 / radius`.
    pub literal_threshold: bool,
    /// `|d| radius prod_{p | d, p ∤ b} (1 - 1/p) >= 2^(t + 1)`, which makes
    /// the counting argument quantitative for `C = 1/4`.
    pub explicit_threshold: bool,
}

impl LocalDensity {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

/// `|F ∩ W|` against `C |F| |W|` with `C = 1/4`.
pub fn local_density_check(family: &ArcFamily, window: &Window) -> Result<LocalDensity, Error> {
    let set = family.to_union()?;
    let w = window.to_union()?;
    let lhs = set.intersect(&w).measure();
    let b = family.filter().map(|(_, b)| b);
    let full = closed_form_measure(1, family.d().unsigned_abs(), family.delta(), b)?;
    let rhs = density_constant(1) * full * w.measure();
    let d = family.d().unsigned_abs();
    let (literal, explicit) = match window.radius() {
        Some(rho) => {
            let literal = Rational::integer(d as i128) * rho >= Rational::one();
            let mut density = Rational::integer(d as i128) * rho;
            let mut t = 0;
            for p in factorize(d)?.primes() {
                if b.is_some_and(|b| b % p != 0) {
                    density *= &rat(p as i128 - 1, p as i128);
                    t += 1;
                }
            }
            (literal, density >= Rational::integer(1i128 << (t + 1)))
        }
        None => (false, false),
    };
    Ok(LocalDensity {
        d: family.d(),
        lhs,
        rhs,
        literal_threshold: literal,
        explicit_threshold: explicit,
    })
}
