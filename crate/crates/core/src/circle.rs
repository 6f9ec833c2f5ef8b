//! Finite unions of half-open intervals on the circle `R/Z = [0, 1)`.
//!
//! A union is stored in canonical form: pieces `[lo, hi)` with
//! `0 <= lo < hi <= 1`, sorted, pairwise disjoint and non-adjacent. Two unions
//! are equal as sets exactly when their piece lists are equal. A piece ending
//! at 1 and a piece starting at 0 are kept separate, which is the only place
//! the circle's topology is not reflected in the list.

use serde::{Deserialize, Serialize};

use crate::arith::{rat, ExactSum, Rational};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct CircleIntervalUnion {
    pieces: Vec<(Rational, Rational)>,
}

impl CircleIntervalUnion {
    pub fn empty() -> Self {
        CircleIntervalUnion { pieces: Vec::new() }
    }

    pub fn full() -> Self {
        CircleIntervalUnion {
            pieces: vec![(Rational::zero(), Rational::one())],
        }
    }

    /// Union of open arcs `(c - r, c + r)` taken mod 1.
    ///
    /// Arcs of radius 0 are empty. A radius of 1/2 or more is rejected.
    pub fn from_arcs<'a, I>(arcs: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (&'a Rational, &'a Rational)>,
    {
        let half = rat(1, 2);
        let mut raw = Vec::new();
        for (center, radius) in arcs {
            if radius.is_negative() || *radius >= half {
                return Err(Error::RadiusTooLarge(radius.to_string()));
            }
            if radius.is_zero() {
                continue;
            }
            let c = center.frac();
            push_wrapped(&mut raw, &c - radius, &c + radius);
        }
        Ok(Self::normalize(raw))
    }

    /// Union of arbitrary intervals `[lo, hi)` on the real line, reduced mod 1.
    ///
    /// An interval of length 1 or more covers the circle.
    pub fn from_line_intervals(intervals: &[(Rational, Rational)]) -> Self {
        let mut raw = Vec::new();
        for (lo, hi) in intervals {
            if hi <= lo {
                continue;
            }
            if hi - lo >= Rational::one() {
                return Self::full();
            }
            let shift = Rational::from(lo.floor());
            push_wrapped(&mut raw, lo - &shift, hi - &shift);
        }
        Self::normalize(raw)
    }

    /// Sorts and merges pieces that overlap or touch.
    fn normalize(mut raw: Vec<(Rational, Rational)>) -> Self {
        raw.retain(|(lo, hi)| lo < hi);
        raw.sort();
        let mut pieces: Vec<(Rational, Rational)> = Vec::with_capacity(raw.len());
        for (lo, hi) in raw {
            match pieces.last_mut() {
                Some(last) if lo <= last.1 => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => pieces.push((lo, hi)),
            }
        }
        CircleIntervalUnion { pieces }
    }

    pub fn pieces(&self) -> &[(Rational, Rational)] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn measure(&self) -> Rational {
        let mut acc = ExactSum::new();
        for (lo, hi) in &self.pieces {
            acc.add(&(hi - lo));
        }
        acc.finish()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let x = x.frac();
        let idx = self.pieces.partition_point(|(lo, _)| *lo <= x);
        idx > 0 && x < self.pieces[idx - 1].1
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut raw = self.pieces.clone();
        raw.extend(other.pieces.iter().cloned());
        Self::normalize(raw)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.pieces, &other.pieces);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = std::cmp::max(&a[i].0, &b[j].0);
            let hi = std::cmp::min(&a[i].1, &b[j].1);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        // Pieces from a sweep of two canonical lists are already sorted and
        // disjoint; normalizing only merges touching neighbours.
        Self::normalize(out)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        let mut cursor = Rational::zero();
        for (lo, hi) in &self.pieces {
            if cursor < *lo {
                out.push((cursor.clone(), lo.clone()));
            }
            cursor = hi.clone();
        }
        if cursor < Rational::one() {
            out.push((cursor, Rational::one()));
        }
        CircleIntervalUnion { pieces: out }
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersect(&other.complement())
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Image under `x -> x + shift mod 1`.
    pub fn rotate(&self, shift: &Rational) -> Self {
        let intervals: Vec<_> = self
            .pieces
            .iter()
            .map(|(lo, hi)| (lo + shift, hi + shift))
            .collect();
        Self::from_line_intervals(&intervals)
    }

    /// Endpoints as `["lo", "hi"]` string pairs.
    pub fn to_strings(&self) -> Vec<[String; 2]> {
        self.pieces
            .iter()
            .map(|(lo, hi)| [lo.to_string(), hi.to_string()])
            .collect()
    }
}

fn push_wrapped(raw: &mut Vec<(Rational, Rational)>, lo: Rational, hi: Rational) {
    let zero = Rational::zero();
    let one = Rational::one();
    if lo < zero {
        raw.push((&lo + &one, one.clone()));
        raw.push((zero, hi.min(one)));
    } else if hi > one {
        raw.push((lo, one.clone()));
        raw.push((zero, hi - one));
    } else {
        raw.push((lo, hi));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn arcs(list: &[(Rational, Rational)]) -> CircleIntervalUnion {
        CircleIntervalUnion::from_arcs(list.iter().map(|(c, r)| (c, r))).unwrap()
    }

    fn interval(lo: Rational, hi: Rational) -> CircleIntervalUnion {
        CircleIntervalUnion::from_line_intervals(&[(lo, hi)])
    }

    /// Measure by sweeping all endpoints and testing midpoints, independent of
    /// the canonical-form merge.
    fn sweep_measure(u: &CircleIntervalUnion, pred: impl Fn(&Rational) -> bool) -> Rational {
        let mut cuts = vec![Rational::zero(), Rational::one()];
        for (lo, hi) in u.pieces() {
            cuts.push(lo.clone());
            cuts.push(hi.clone());
        }
        cuts.sort();
        cuts.dedup();
        cuts.windows(2)
            .filter(|w| pred(&((&w[0] + &w[1]) / rat(2, 1))))
            .map(|w| &w[1] - &w[0])
            .sum()
    }

    #[test]
    fn wrap_around_arc() {
        let u = arcs(&[(rat(0, 1), rat(1, 8))]);
        assert_eq!(
            u.pieces(),
            &[(rat(0, 1), rat(1, 8)), (rat(7, 8), rat(1, 1))]
        );
        assert_eq!(u.measure(), rat(1, 4));
    }

    #[test]
    fn duplicate_arcs_collapse() {
        let u = arcs(&[(rat(1, 2), rat(1, 16)), (rat(1, 2), rat(1, 16))]);
        assert_eq!(u.pieces(), &[(rat(7, 16), rat(9, 16))]);
        assert_eq!(u.measure(), rat(1, 8));
    }

    #[test]
    fn tilde_arcs_example() {
        let u = arcs(&[(rat(1, 12), rat(1, 40)), (rat(7, 12), rat(1, 40))]);
        assert_eq!(u.pieces().len(), 2);
        assert_eq!(u.measure(), rat(1, 10));
    }

    #[test]
    fn rejects_large_radius() {
        let r = CircleIntervalUnion::from_arcs([(&rat(0, 1), &rat(1, 2))]);
        assert!(matches!(r, Err(Error::RadiusTooLarge(_))));
        assert!(arcs(&[(rat(1, 3), rat(0, 1))]).is_empty());
    }

    #[test]
    fn intersection_examples() {
        let u = interval(rat(3, 10), rat(7, 10));
        let v = interval(rat(0, 1), rat(2, 5)).union(&interval(rat(3, 5), rat(1, 1)));
        let w = u.intersect(&v);
        assert_eq!(
            w.pieces(),
            &[(rat(3, 10), rat(2, 5)), (rat(3, 5), rat(7, 10))]
        );
        assert_eq!(w.measure(), rat(1, 5));
        assert!(u.intersect(&CircleIntervalUnion::empty()).is_empty());
        assert_eq!(u.intersect(&CircleIntervalUnion::full()), u);
        assert_eq!(CircleIntervalUnion::empty().union(&v), v);
        assert_eq!(CircleIntervalUnion::full().measure(), rat(1, 1));
    }

    // A_{1,1}(1, 1/8) ∪ A_{1,1}(2, 1/16) at y = 0: arcs of radius psi(q)/q.
    #[test]
    fn union_of_two_plain_sets() {
        let a1 = arcs(&[(rat(0, 1), rat(1, 8))]);
        let a2 = arcs(&[(rat(0, 1), rat(1, 32)), (rat(1, 2), rat(1, 32))]);
        let u = a1.union(&a2);
        let oracle = sweep_measure(&u, |x| a1.contains(x) || a2.contains(x));
        assert_eq!(oracle, rat(5, 16));
        assert_eq!(u.measure(), rat(5, 16));
    }

    #[test]
    fn contains_respects_half_open_pieces() {
        let u = interval(rat(1, 4), rat(1, 2));
        assert!(u.contains(&rat(1, 4)));
        assert!(!u.contains(&rat(1, 2)));
        assert!(u.contains(&rat(5, 4)));
    }

    fn random_union(rng: &mut ChaCha8Rng) -> CircleIntervalUnion {
        let k = rng.random_range(0..=20);
        let list: Vec<(Rational, Rational)> = (0..k)
            .map(|_| {
                let den = rng.random_range(2..60i128);
                let c = rat(rng.random_range(-den..2 * den), den);
                let rden = rng.random_range(3..90i128);
                let r = rat(rng.random_range(0..(rden + 1) / 2), rden);
                (c, r)
            })
            .collect();
        arcs(&list)
    }

    #[test]
    fn randomized_algebra() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..1000 {
            let u = random_union(&mut rng);
            let v = random_union(&mut rng);
            let w = random_union(&mut rng);
            assert_eq!(u.union(&v), v.union(&u));
            assert_eq!(u.intersect(&v), v.intersect(&u));
            assert_eq!(u.union(&v).union(&w), u.union(&v.union(&w)));
            assert_eq!(u.intersect(&v).intersect(&w), u.intersect(&v.intersect(&w)));
            assert_eq!(
                u.union(&v).complement(),
                u.complement().intersect(&v.complement())
            );
            assert_eq!(
                u.intersect(&v).complement(),
                u.complement().union(&v.complement())
            );
            assert_eq!(
                u.measure() + v.measure(),
                u.union(&v).measure() + u.intersect(&v).measure()
            );
            assert!(u.intersect(&v).measure() <= std::cmp::min(u.measure(), v.measure()));
            assert_eq!(CircleIntervalUnion::normalize(u.pieces().to_vec()), u);
            let shift = rat(rng.random_range(-50..50), rng.random_range(1..37));
            assert_eq!(u.rotate(&shift).measure(), u.measure());
            let oracle = sweep_measure(&u.union(&v), |x| u.contains(x) || v.contains(x));
            assert_eq!(u.union(&v).measure(), oracle);
        }
    }
}
