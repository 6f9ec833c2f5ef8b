//! Factorization and the multiplicative functions built on it.

use std::sync::OnceLock;

use crate::Error;

/// Primes up to this bound are sieved once and reused for trial division.
pub const SIEVE_LIMIT: u64 = 1_000_000;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = SIEVE_LIMIT as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::with_capacity(80_000);
        for i in 2..=n {
            if !composite[i] {
                primes.push(i as u32);
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// Prime factorization with strictly increasing primes and positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Product of `p^e`, saturating at `u128::MAX` (never reached for `u64` inputs).
    pub fn value(&self) -> u128 {
        self.factors
            .iter()
            .fold(1u128, |acc, &(p, e)| acc.saturating_mul((p as u128).pow(e)))
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard rho with Brent's cycle detection; `n` must be odd and composite.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = y;
        let mut r = 1u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(r - k).min(128) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = num_integer::gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = num_integer::gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Trial division by the sieved primes, then Pollard rho on a composite cofactor.
pub fn factorize(n: u64) -> Result<Factorization, Error> {
    if n == 0 {
        return Err(Error::ZeroInput("factorize"));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    for &p in small_primes() {
        let p = p as u64;
        if p * p > rest {
            break;
        }
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    }
    if rest > 1 {
        // Every prime factor of `rest` now exceeds the sieve bound.
        let mut large = Vec::new();
        split_large(rest, &mut large);
        large.sort_unstable();
        for p in large {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    Ok(Factorization { factors })
}

fn factor_or_panic(n: u64) -> Factorization {
    factorize(n).expect("arithmetic functions require n >= 1")
}

/// Moebius function. Panics on `n = 0`.
pub fn mobius(n: u64) -> i8 {
    let f = factor_or_panic(n);
    if !f.is_squarefree() {
        return 0;
    }
    if f.factors.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Euler's totient. Panics on `n = 0`.
pub fn totient(n: u64) -> u64 {
    factor_or_panic(n)
        .factors
        .iter()
        .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

/// Number of positive divisors. Panics on `n = 0`.
pub fn divisor_count(n: u64) -> u64 {
    factor_or_panic(n)
        .factors
        .iter()
        .fold(1u64, |acc, &(_, e)| acc * (e as u64 + 1))
}

/// Sum of positive divisors. Panics on `n = 0`.
pub fn divisor_sum(n: u64) -> u128 {
    factor_or_panic(n).factors.iter().fold(1u128, |acc, &(p, e)| {
        let p = p as u128;
        acc * ((p.pow(e + 1) - 1) / (p - 1))
    })
}

pub fn divisors(n: u64) -> Vec<u64> {
    factor_or_panic(n).divisors()
}

/// Table of totients `phi(0..=n)` by a linear pass, `phi(0)` set to 0.
pub fn totient_table(n: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=n as u64).collect();
    for i in 2..=n {
        if phi[i] == i as u64 {
            let mut j = i;
            while j <= n {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(trial_division(2310), vec![(2, 1), (3, 1), (5, 1), (7, 1), (11, 1)]);
        assert_eq!(factorize(2310).unwrap().factors(), trial_division(2310).as_slice());
        assert!(matches!(factorize(0), Err(Error::ZeroInput(_))));
    }

    #[test]
    fn factorize_large_inputs() {
        let n = 1u64 << 63;
        assert_eq!(factorize(n).unwrap().factors(), &[(2, 63)]);
        // Two primes just above the sieve bound.
        let (p, q) = (1_000_003u64, 1_000_033u64);
        assert_eq!(factorize(p * q).unwrap().factors(), &[(p, 1), (q, 1)]);
        let big_prime = 18_446_744_073_709_551_557u64;
        assert_eq!(factorize(big_prime).unwrap().factors(), &[(big_prime, 1)]);
    }

    #[test]
    fn multiplicative_examples() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(30), -1);
        assert_eq!(totient(12), 4);
        assert_eq!(divisor_count(12), 6);
        let by_enumeration: u128 = (1..=12u128).filter(|d| 12 % d == 0).sum();
        assert_eq!(by_enumeration, 28);
        assert_eq!(divisor_sum(12), by_enumeration);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn mobius_sums_vanish() {
        for n in 1..=10_000u64 {
            let s: i64 = divisors(n).into_iter().map(|d| mobius(d) as i64).sum();
            assert_eq!(s, if n == 1 { 1 } else { 0 }, "n = {n}");
        }
    }

    #[test]
    fn totient_table_matches() {
        let table = totient_table(2000);
        for n in 1..=2000u64 {
            assert_eq!(table[n as usize], totient(n));
        }
    }

    proptest! {
        #[test]
        fn factorization_reconstructs(n in 1u64..u64::MAX / 2) {
            let f = factorize(n).unwrap();
            prop_assert_eq!(f.value(), n as u128);
            let primes: Vec<u64> = f.primes().collect();
            prop_assert!(primes.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(primes.iter().all(|&p| is_prime(p)));
        }

        #[test]
        fn divisor_functions_agree(n in 1u64..20_000) {
            let divs: Vec<u64> = (1..=n).filter(|d| n % d == 0).collect();
            prop_assert_eq!(divisor_count(n), divs.len() as u64);
            prop_assert_eq!(divisor_sum(n), divs.iter().map(|&d| d as u128).sum::<u128>());
            let coprime = (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u64;
            prop_assert_eq!(totient(n), coprime);
        }
    }
}
