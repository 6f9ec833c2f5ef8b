//! Exact number-theoretic kernel: rationals, factorization, arithmetic
//! functions and sup-norm lattice vectors.

mod accumulate;
mod factor;
mod lattice;
mod rational;

pub use accumulate::ExactSum;
pub use factor::{
    divisor_count, divisor_sum, divisors, factorize, is_prime, mobius, totient, totient_table,
    Factorization, SIEVE_LIMIT,
};
pub use lattice::{
    count_vectors_with_gcd, enumerate_vectors, for_each_vector_2d, gcd_vec, parallel,
    reduce_to_primitive, sup_norm,
};
pub use rational::{rat, Rational};

/// `gcd(|a|, |b|)` for signed 64-bit inputs.
pub fn gcd_i64(a: i64, b: i64) -> u64 {
    num_integer::gcd(a.unsigned_abs(), b.unsigned_abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Sum over l | n of mu(l) / l^m equals prod over p | n of (1 - p^-m).
    #[test]
    fn mobius_product_identity() {
        for n in 1..=10_000u64 {
            let f = factorize(n).unwrap();
            for m in 1..=2i32 {
                let lhs: Rational = divisors(n)
                    .into_iter()
                    .map(|l| rat(mobius(l) as i128, 1) / Rational::integer(l as i128).pow(m))
                    .sum();
                let rhs = f.primes().fold(Rational::one(), |acc, p| {
                    acc * (Rational::one() - Rational::integer(p as i128).pow(-m))
                });
                assert_eq!(lhs, rhs, "n={n} m={m}");
            }
        }
    }
}
