use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rational;

/// Exact running sum of many small fractions.
///
/// Keeps an unreduced `numer / denom` whose denominator is the lcm of the
/// denominators seen so far, so each `add_small` costs one pass over the big
/// integers instead of a big gcd.
#[derive(Clone, Debug)]
pub struct ExactSum {
    numer: BigInt,
    denom: BigInt,
}

impl Default for ExactSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSum {
    pub fn new() -> Self {
        ExactSum {
            numer: BigInt::zero(),
            denom: BigInt::one(),
        }
    }

    /// Adds `n / k` for `k > 0`.
    pub fn add_small(&mut self, n: i128, k: u128) {
        debug_assert!(k > 0);
        if n == 0 {
            return;
        }
        let g = n.unsigned_abs().gcd(&k);
        let (n, k) = (n / g as i128, k / g);
        let rem = (&self.denom % BigInt::from(k))
            .try_into()
            .unwrap_or(0u128);
        let g = k.gcd(&rem);
        let scale = k / g;
        if scale != 1 {
            self.numer *= scale;
            self.denom *= scale;
        }
        let lift = &self.denom / BigInt::from(k);
        self.numer += lift * n;
    }

    pub fn add(&mut self, r: &Rational) {
        if r.is_zero() {
            return;
        }
        if let Some((n, d)) = r.to_i128_parts() {
            self.add_small(n, d as u128);
            return;
        }
        let g = self.denom.gcd(r.denom());
        let scale = r.denom() / &g;
        self.numer = &self.numer * &scale + r.numer() * (&self.denom / &g);
        self.denom *= scale;
    }

    pub fn merge(&mut self, other: ExactSum) {
        self.add(&other.finish());
    }

    pub fn finish(self) -> Rational {
        Rational::from_big(self.numer, self.denom)
    }
}
