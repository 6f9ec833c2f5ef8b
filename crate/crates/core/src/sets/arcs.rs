use num_integer::Integer;

use crate::arith::{rat, Rational};
use crate::circle::CircleIntervalUnion;
use crate::Error;

/// `{x : |d x - p - y| < delta for some admissible p}` on the circle.
///
/// It is the union of arcs centred at `(p + y)/d` with radius `delta/|d|`
/// over residues `p mod |d|`; with a filter `(a, b)` only `p` with
/// `gcd(d, b p + a) = 1` are admissible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcFamily {
    d: i64,
    delta: Rational,
    y: Rational,
    filter: Option<(i64, u64)>,
}

impl ArcFamily {
    pub fn new(d: i64, delta: Rational, y: Rational, filter: Option<(i64, u64)>) -> Result<Self, Error> {
        if d == 0 {
            return Err(Error::ZeroInput("arc family modulus"));
        }
        if delta.is_negative() || delta >= rat(1, 2) {
            return Err(Error::RadiusTooLarge(delta.to_string()));
        }
        if let Some((_, 0)) = filter {
            return Err(Error::InvalidSpec("filter needs b >= 1".into()));
        }
        Ok(ArcFamily { d, delta, y, filter })
    }

    pub fn plain(d: i64, delta: Rational, y: Rational) -> Result<Self, Error> {
        Self::new(d, delta, y, None)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn filter(&self) -> Option<(i64, u64)> {
        self.filter
    }

    /// Whether the arc with numerator `p` belongs to the family.
    pub fn admits(&self, p: i64) -> bool {
        match self.filter {
            None => true,
            Some((a, b)) => {
                let t = (b as i128 * p as i128 + a as i128).unsigned_abs();
                t.gcd(&(self.d.unsigned_abs() as u128)) == 1
            }
        }
    }

    /// Admissible residues in `0..|d|`.
    pub fn residues(&self) -> Vec<i64> {
        (0..self.d.abs()).filter(|&p| self.admits(p)).collect()
    }

    pub fn center(&self, p: i64) -> Rational {
        (Rational::integer(p as i128) + &self.y) / Rational::integer(self.d as i128)
    }

    pub fn radius(&self) -> Rational {
        &self.delta / Rational::integer(self.d.unsigned_abs() as i128)
    }

    pub fn to_union(&self) -> Result<CircleIntervalUnion, Error> {
        let r = self.radius();
        let centers: Vec<Rational> = self.residues().into_iter().map(|p| self.center(p)).collect();
        CircleIntervalUnion::from_arcs(centers.iter().map(|c| (c, &r)))
    }
}
