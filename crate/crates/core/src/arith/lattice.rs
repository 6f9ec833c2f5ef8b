//! Integer vectors under the sup norm.

use num_integer::Integer;

use super::factor::totient;
use crate::Error;

/// `gcd(|q_1|, ..., |q_n|)` of a nonzero vector.
pub fn gcd_vec(q: &[i64]) -> Result<u64, Error> {
    let g = q.iter().fold(0u64, |g, &c| g.gcd(&c.unsigned_abs()));
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    Ok(g)
}

/// `max |q_i|`.
pub fn sup_norm(q: &[i64]) -> u64 {
    q.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
}

/// Whether two vectors of the same length span a line (zero vectors excluded).
pub fn parallel(q: &[i64], r: &[i64]) -> bool {
    debug_assert_eq!(q.len(), r.len());
    for i in 0..q.len() {
        for j in (i + 1)..q.len() {
            if q[i] as i128 * r[j] as i128 != q[j] as i128 * r[i] as i128 {
                return false;
            }
        }
    }
    true
}

/// Every integer vector of dimension `n` with sup norm exactly `s`.
///
/// Only `n <= 2` is materialized; the count is `2` for `n = 1` and `8s` for `n = 2`.
pub fn enumerate_vectors(s: u64, n: usize) -> Result<Vec<Vec<i64>>, Error> {
    if s == 0 {
        return Err(Error::ZeroInput("enumerate_vectors"));
    }
    let s = s as i64;
    match n {
        1 => Ok(vec![vec![s], vec![-s]]),
        2 => {
            let mut out = Vec::with_capacity(8 * s as usize);
            for_each_vector_2d(s as u64, |a, b| out.push(vec![a, b]));
            Ok(out)
        }
        _ => Err(Error::UnsupportedDimension {
            what: "exact vector enumeration",
            n,
            m: 0,
        }),
    }
}

/// Calls `f(q1, q2)` for each of the `8s` vectors of sup norm `s` in a fixed order.
pub fn for_each_vector_2d(s: u64, mut f: impl FnMut(i64, i64)) {
    let s = s as i64;
    for b in -s..=s {
        f(s, b);
        f(-s, b);
    }
    for a in (-s + 1)..s {
        f(a, s);
        f(a, -s);
    }
}

/// Number of `q` in dimension 2 with `|q| = s` and `gcd(q) = d`: `8 phi(s/d)` when `d | s`.
pub fn count_vectors_with_gcd(s: u64, d: u64, n: usize) -> Result<u64, Error> {
    if n != 2 {
        return Err(Error::UnsupportedDimension {
            what: "gcd-class vector count",
            n,
            m: 0,
        });
    }
    if s == 0 || d == 0 {
        return Err(Error::ZeroInput("count_vectors_with_gcd"));
    }
    if !s.is_multiple_of(d) {
        return Ok(0);
    }
    Ok(8 * totient(s / d))
}

/// Splits `q = d k` with `d = gcd(q) > 0` and `k` primitive (same direction as `q`).
pub fn reduce_to_primitive(q: &[i64]) -> Result<(Vec<i64>, u64), Error> {
    let d = gcd_vec(q)?;
    Ok((q.iter().map(|&c| c / d as i64).collect(), d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(s: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for a in -s..=s {
            for b in -s..=s {
                if a.abs().max(b.abs()) == s {
                    out.push((a, b));
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_vec(&[6, 4]).unwrap(), 2);
        assert_eq!(gcd_vec(&[0, -5]).unwrap(), 5);
        assert_eq!(gcd_vec(&[7, 3]).unwrap(), 1);
        assert!(matches!(gcd_vec(&[0, 0]), Err(Error::ZeroVector)));
    }

    #[test]
    fn enumeration_matches_box_difference() {
        for s in 1..=12i64 {
            let mut got: Vec<(i64, i64)> = enumerate_vectors(s as u64, 2)
                .unwrap()
                .into_iter()
                .map(|v| (v[0], v[1]))
                .collect();
            got.sort();
            let expected = brute_force(s);
            assert_eq!(got.len() as i64, (2 * s + 1).pow(2) - (2 * s - 1).pow(2));
            assert_eq!(got, expected);
        }
        assert_eq!(enumerate_vectors(1, 2).unwrap().len(), 8);
        assert_eq!(enumerate_vectors(3, 2).unwrap().len(), 24);
        assert_eq!(enumerate_vectors(5, 1).unwrap(), vec![vec![5], vec![-5]]);
        assert!(enumerate_vectors(2, 3).is_err());
    }

    #[test]
    fn gcd_class_counts_match_enumeration() {
        for s in 1..=40u64 {
            let vs = enumerate_vectors(s, 2).unwrap();
            for d in 1..=s {
                let brute = vs.iter().filter(|v| gcd_vec(v).unwrap() == d).count() as u64;
                assert_eq!(count_vectors_with_gcd(s, d, 2).unwrap(), brute, "s={s} d={d}");
            }
        }
        assert_eq!(count_vectors_with_gcd(6, 2, 2).unwrap(), 16);
        assert_eq!(count_vectors_with_gcd(4, 4, 2).unwrap(), 8);
        assert_eq!(count_vectors_with_gcd(5, 2, 2).unwrap(), 0);
    }

    #[test]
    fn gcd_class_counts_partition_the_shell() {
        for s in 1..=200u64 {
            let total: u64 = (1..=s)
                .filter(|d| s % d == 0)
                .map(|d| count_vectors_with_gcd(s, d, 2).unwrap())
                .sum();
            assert_eq!(total, 8 * s);
        }
    }

    #[test]
    fn primitive_reduction() {
        assert_eq!(reduce_to_primitive(&[6, 4]).unwrap(), (vec![3, 2], 2));
        assert_eq!(reduce_to_primitive(&[-3, 0]).unwrap(), (vec![-1, 0], 3));
        assert_eq!(reduce_to_primitive(&[5, 7]).unwrap(), (vec![5, 7], 1));
        assert!(reduce_to_primitive(&[0, 0]).is_err());
    }

    #[test]
    fn parallel_detection() {
        assert!(parallel(&[4, 4], &[2, 2]));
        assert!(parallel(&[3, -6], &[-1, 2]));
        assert!(!parallel(&[2, 0], &[0, 2]));
    }
}
