//! Dirichlet pairs `(a_d, b_d)` with `|b_d y - a_d| < 1/|d|`, `1 <= b_d <= |d|`
//! and `gcd(a_d, b_d) = 1`, and the target schemes that carry them.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_vec, Rational};
use crate::Error;

/// A Dirichlet pair built for the modulus `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletPair {
    pub a: i64,
    pub b: u64,
    pub d: u64,
}

impl DirichletPair {
    /// `|b y - a|` as an exact rational.
    pub fn error(&self, y: &Rational) -> Rational {
        (Rational::integer(self.b as i128) * y - Rational::integer(self.a as i128)).abs()
    }

    /// Checks the three defining conditions exactly.
    pub fn is_valid_for(&self, y: &Rational) -> bool {
        let bound = Rational::new(1, self.d as i128);
        self.b >= 1
            && self.b <= self.d
            && self.a.unsigned_abs().gcd(&self.b) == 1
            && self.error(y) < bound
    }
}

/// `y = u/v` with `v > 0`, as machine integers.
fn small_parts(y: &Rational) -> Result<(i128, i128), Error> {
    y.to_i128_parts()
        .filter(|&(_, v)| v < (1i128 << 62))
        .ok_or_else(|| Error::InvalidSpec(format!("target {y} has a denominator too large")))
}

/// Nearest integer to `b u / v` (halves toward the smaller value) and the
/// error numerator `|b u - a v|`.
fn nearest(b: i128, u: i128, v: i128) -> (i128, i128) {
    let num = b * u;
    let (q, r) = num.div_mod_floor(&v);
    if 2 * r > v {
        (q + 1, v - r)
    } else {
        (q, r)
    }
}

fn check_target(y: &Rational) -> Result<(), Error> {
    if y.is_negative() || *y >= Rational::one() {
        return Err(Error::InvalidSpec(format!("target {y} must lie in [0, 1)")));
    }
    Ok(())
}

/// Smallest `b` in `1..=|d|` whose nearest numerator `a` gives
/// `|b y - a| < 1/|d|`, reduced by `gcd(a, b)`.
pub fn dirichlet_pair(y: &Rational, d: i64) -> Result<DirichletPair, Error> {
    if d == 0 {
        return Err(Error::ZeroInput("dirichlet_pair"));
    }
    check_target(y)?;
    let (u, v) = small_parts(y)?;
    let dd = d.unsigned_abs();
    for b in 1..=dd as i128 {
        let (a, err) = nearest(b, u, v);
        if err * (dd as i128) < v {
            return Ok(reduce(a, b, dd));
        }
    }
    unreachable!("Dirichlet's theorem guarantees a pair with b <= |d|")
}

fn reduce(a: i128, b: i128, d: u64) -> DirichletPair {
    let g = a.unsigned_abs().gcd(&(b as u128)).max(1) as i128;
    DirichletPair {
        a: (a / g) as i64,
        b: (b / g) as u64,
        d,
    }
}

/// `dirichlet_pair(y, gcd(q))`.
pub fn pair_for_vector(y: &Rational, q: &[i64]) -> Result<DirichletPair, Error> {
    let d = gcd_vec(q)?;
    dirichlet_pair(y, d as i64)
}

/// Pairs for every modulus `1..=max_d`, built in one increasing pass.
///
/// The accepted `b` is non-decreasing in `|d|` because the acceptance bound
/// `1/|d|` only tightens, so a single pointer walk suffices.
#[derive(Clone, Debug)]
pub struct DirichletTable {
    y: Rational,
    pairs: Vec<DirichletPair>,
}

impl DirichletTable {
    pub fn build(y: &Rational, max_d: u64) -> Result<Self, Error> {
        check_target(y)?;
        let (u, v) = small_parts(y)?;
        let mut pairs = Vec::with_capacity(max_d as usize);
        let mut b = 1i128;
        for d in 1..=max_d {
            loop {
                let (a, err) = nearest(b, u, v);
                if err * (d as i128) < v {
                    pairs.push(reduce(a, b, d));
                    break;
                }
                b += 1;
            }
        }
        Ok(DirichletTable { y: y.clone(), pairs })
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn max_d(&self) -> u64 {
        self.pairs.len() as u64
    }

    /// Pair for modulus `d` (sign ignored); `None` beyond the table.
    pub fn get(&self, d: i64) -> Option<DirichletPair> {
        let k = d.unsigned_abs();
        if k == 0 {
            return None;
        }
        self.pairs.get(k as usize - 1).copied()
    }
}

/// How the inhomogeneous target is specified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetScheme {
    /// Fixed `y` in `[0, 1)^m`.
    Rational { y: Vec<Rational> },
    /// Fixed `y = a / b` with `gcd(a_1, ..., a_m, b) = 1`.
    FixedPair { a: Vec<i64>, b: u64 },
    /// `y` indexed by `|d| = gcd(q)`.
    Moving { table: BTreeMap<u64, Vec<Rational>> },
}

impl TargetScheme {
    /// One-dimensional fixed target, reduced into `[0, 1)`.
    pub fn scalar(y: Rational) -> Self {
        TargetScheme::Rational { y: vec![y.frac()] }
    }

    pub fn homogeneous(m: usize) -> Self {
        TargetScheme::Rational {
            y: vec![Rational::zero(); m],
        }
    }

    /// Fixed pair, normalized so each `a_i` lies in `[0, b)`.
    pub fn fixed_pair(a: Vec<i64>, b: u64) -> Result<Self, Error> {
        if b == 0 {
            return Err(Error::InvalidSpec("fixed pair needs b >= 1".into()));
        }
        let g = a.iter().fold(b, |g, &x| g.gcd(&x.unsigned_abs()));
        if g != 1 {
            return Err(Error::InvalidSpec(format!(
                "fixed pair {a:?}/{b} is not normalized: gcd = {g}"
            )));
        }
        let a = a.into_iter().map(|x| x.rem_euclid(b as i64)).collect();
        Ok(TargetScheme::FixedPair { a, b })
    }

    pub fn dimension(&self) -> Option<usize> {
        match self {
            TargetScheme::Rational { y } => Some(y.len()),
            TargetScheme::FixedPair { a, .. } => Some(a.len()),
            TargetScheme::Moving { table } => table.values().next().map(Vec::len),
        }
    }

    /// Validates the scheme's normalization for dimension `m`.
    pub fn validate(&self, m: usize) -> Result<(), Error> {
        let in_unit = |y: &Rational| !y.is_negative() && *y < Rational::one();
        match self {
            TargetScheme::Rational { y } => {
                if y.len() != m || !y.iter().all(in_unit) {
                    return Err(Error::InvalidSpec(format!(
                        "target must be {m} coordinates in [0, 1)"
                    )));
                }
            }
            TargetScheme::FixedPair { a, b } => {
                let g = a.iter().fold(*b, |g, &x| g.gcd(&x.unsigned_abs()));
                if a.len() != m || *b == 0 || g != 1 {
                    return Err(Error::InvalidSpec(format!(
                        "fixed pair must have {m} numerators and gcd(a, b) = 1"
                    )));
                }
            }
            TargetScheme::Moving { table } => {
                if table.is_empty() || !table.values().all(|y| y.len() == m && y.iter().all(in_unit)) {
                    return Err(Error::InvalidSpec(format!(
                        "moving targets must be nonempty with {m} coordinates in [0, 1)"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Target `y_q` for a vector with `gcd(q) = d`.
    pub fn target_for(&self, d: u64) -> Result<Vec<Rational>, Error> {
        match self {
            TargetScheme::Rational { y } => Ok(y.clone()),
            TargetScheme::FixedPair { a, b } => Ok(a
                .iter()
                .map(|&x| Rational::new(x as i128, *b as i128))
                .collect()),
            TargetScheme::Moving { table } => table
                .get(&d)
                .cloned()
                .ok_or_else(|| Error::InvalidSpec(format!("no moving target for gcd {d}"))),
        }
    }
}

/// Convergents `h/k` of a simple continued fraction given by its partial quotients.
pub fn convergents(quotients: impl IntoIterator<Item = u64>) -> impl Iterator<Item = (u128, u128)> {
    let mut prev = (1u128, 0u128);
    let mut cur: Option<(u128, u128)> = None;
    quotients.into_iter().map_while(move |a| {
        let a = a as u128;
        let next = match cur {
            None => (a, 1),
            Some((h, k)) => (a.checked_mul(h)?.checked_add(prev.0)?, a.checked_mul(k)?.checked_add(prev.1)?),
        };
        if let Some(c) = cur {
            prev = c;
        }
        cur = Some(next);
        Some(next)
    })
}

/// First convergent of `sqrt(2) - 1 = [0; 2, 2, 2, ...]` with denominator above `min_den`.
pub fn sqrt2_minus_1_surrogate(min_den: u64) -> Rational {
    surrogate(std::iter::once(0).chain(std::iter::repeat(2)), min_den)
}

/// First convergent of `e - 2 = [0; 1, 2, 1, 1, 4, 1, 1, 6, ...]` with denominator above `min_den`.
pub fn e_minus_2_surrogate(min_den: u64) -> Rational {
    let tail = (1u64..).flat_map(|k| [1, 2 * k, 1]);
    surrogate(std::iter::once(0).chain(tail), min_den)
}

fn surrogate(quotients: impl Iterator<Item = u64>, min_den: u64) -> Rational {
    let (h, k) = convergents(quotients)
        .find(|&(_, k)| k > min_den as u128)
        .expect("convergent denominators grow without bound");
    Rational::new(h as i128, k as i128)
}
