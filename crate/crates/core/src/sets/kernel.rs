//! Exact `|F1 ∩ F2|` for two arc families sharing a target, in scaled integers.
//!
//! Arc centres differ by `(j + y (e - d)) / (d e)` with `j = e p - d s`, so
//! every pairwise overlap is a function of `j` alone. Only the finitely many
//! `j` within reach of the summed radii contribute; for each one the
//! admissible `(p, s)` are counted directly.

use num_integer::Integer;

use super::arcs::ArcFamily;
use crate::arith::{ExactSum, Rational};
use crate::Error;

/// An arc family in machine integers: modulus `d`, `delta = alpha / beta`
/// and an optional filter `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RawFamily {
    pub d: i128,
    pub alpha: i128,
    pub beta: i128,
    pub filter: Option<(i64, u64)>,
}

impl RawFamily {
    pub fn from_family(f: &ArcFamily) -> Option<Self> {
        let (alpha, beta) = f.delta().to_i128_parts()?;
        Some(RawFamily {
            d: f.d() as i128,
            alpha,
            beta,
            filter: f.filter(),
        })
    }

    #[inline]
    fn admits(&self, p: i128) -> bool {
        match self.filter {
            None => true,
            Some((a, b)) => (b as i128 * p + a as i128).unsigned_abs().gcd(&self.d.unsigned_abs()) == 1,
        }
    }
}

/// Intersection measure as `numer / denom`, or `None` when the scaled
/// quantities overflow `i128`.
pub fn intersection_parts(f1: &ArcFamily, f2: &ArcFamily) -> Option<(i128, u128)> {
    let (u, v) = f1.y().to_i128_parts()?;
    raw_intersection(&RawFamily::from_family(f1)?, &RawFamily::from_family(f2)?, u, v)
}

/// [`intersection_parts`] on raw families sharing the target `u / v`.
pub fn raw_intersection(f1: &RawFamily, f2: &RawFamily, u: i128, v: i128) -> Option<(i128, u128)> {
    let (d, e) = (f1.d, f2.d);
    let (ad, ae) = (d.abs(), e.abs());
    if f1.alpha == 0 || f2.alpha == 0 {
        return Some((0, 1));
    }
    let bb = f1.beta.checked_mul(f2.beta)?;
    let big_m = v.checked_mul(bb)?;
    let r1 = f1.alpha.checked_mul(ae)?.checked_mul(v)?.checked_mul(f2.beta)?;
    let r2 = f2.alpha.checked_mul(ad)?.checked_mul(v)?.checked_mul(f1.beta)?;
    let reach = r1.checked_add(r2)?;
    let cap = 2 * r1.min(r2);
    let c0 = u.checked_mul(e - d)?.checked_mul(bb)?;
    let denom = ad.checked_mul(ae)?.checked_mul(big_m)?;
    let g = ad.gcd(&ae);
    let dg = ad / g;

    let lo = Integer::div_floor(&(-reach).checked_sub(c0)?, &big_m);
    let hi = Integer::div_ceil(&reach.checked_sub(c0)?, &big_m);
    let mut j = Integer::div_ceil(&lo, &g) * g;
    let mut total: i128 = 0;
    let mut inv = None;
    while j <= hi {
        let x = j.checked_mul(big_m)?.checked_add(c0)?;
        let ov = (reach - x.abs()).min(cap);
        if ov > 0 {
            let count = if f1.filter.is_none() && f2.filter.is_none() {
                g
            } else {
                let inv = *inv.get_or_insert_with(|| mod_inverse((e / g).rem_euclid(dg), dg));
                let p0 = ((j / g).rem_euclid(dg) * inv).rem_euclid(dg);
                (0..g)
                    .filter(|t| {
                        let p = p0 + t * dg;
                        f1.admits(p) && f2.admits((p * e - j) / d)
                    })
                    .count() as i128
            };
            total = total.checked_add(ov.checked_mul(count)?)?;
        }
        j += g;
    }
    Some((total, denom as u128))
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let ext = a.extended_gcd(&m);
    debug_assert_eq!(ext.gcd, 1);
    ext.x.rem_euclid(m)
}

/// Exact `|F1 ∩ F2|`, falling back to interval unions when the scaled
/// integers overflow.
pub fn intersection_measure(f1: &ArcFamily, f2: &ArcFamily) -> Result<Rational, Error> {
    check_same_target(f1, f2)?;
    match intersection_parts(f1, f2) {
        Some((n, k)) => {
            let mut acc = ExactSum::new();
            acc.add_small(n, k);
            Ok(acc.finish())
        }
        None => intersection_by_unions(f1, f2),
    }
}

/// `|F1 ∩ F2|` through explicit interval unions.
pub fn intersection_by_unions(f1: &ArcFamily, f2: &ArcFamily) -> Result<Rational, Error> {
    check_same_target(f1, f2)?;
    Ok(f1.to_union()?.intersect(&f2.to_union()?).measure())
}

fn check_same_target(f1: &ArcFamily, f2: &ArcFamily) -> Result<(), Error> {
    if f1.y() != f2.y() {
        return Err(Error::MixedFamilies(format!(
            "targets {} and {} differ",
            f1.y(),
            f2.y()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::dirichlet::dirichlet_pair;
    use proptest::prelude::*;

    fn tilde(d: i64, delta: Rational, y: &Rational) -> ArcFamily {
        let p = dirichlet_pair(y, d).unwrap();
        ArcFamily::new(d, delta, y.clone(), Some((p.a, p.b))).unwrap()
    }

    #[test]
    fn basic_example() {
        let f1 = tilde(2, rat(2, 5), &rat(0, 1));
        let f2 = tilde(1, rat(2, 5), &rat(0, 1));
        assert_eq!(intersection_measure(&f1, &f2).unwrap(), rat(1, 5));
        assert_eq!(intersection_by_unions(&f1, &f2).unwrap(), rat(1, 5));
    }

    #[test]
    fn rejects_mixed_targets() {
        let f1 = ArcFamily::plain(3, rat(1, 8), rat(0, 1)).unwrap();
        let f2 = ArcFamily::plain(3, rat(1, 8), rat(1, 3)).unwrap();
        assert!(matches!(intersection_measure(&f1, &f2), Err(Error::MixedFamilies(_))));
    }

    #[test]
    fn exhaustive_small_grid_matches_unions() {
        let targets = [rat(0, 1), rat(1, 3), rat(2, 7), rat(5, 12), rat(408, 985)];
        let radii = [rat(1, 10), rat(3, 8), rat(1, 100), rat(0, 1)];
        for y in &targets {
            for d in -14i64..=14 {
                for e in -14i64..=14 {
                    if d == 0 || e == 0 {
                        continue;
                    }
                    for (i, r1) in radii.iter().enumerate() {
                        let r2 = &radii[(i + 1) % radii.len()];
                        let pairs = [
                            (tilde(d, r1.clone(), y), tilde(e, r2.clone(), y)),
                            (tilde(d, r1.clone(), y), ArcFamily::plain(e, r2.clone(), y.clone()).unwrap()),
                            (
                                ArcFamily::plain(d, r1.clone(), y.clone()).unwrap(),
                                ArcFamily::plain(e, r1.clone(), y.clone()).unwrap(),
                            ),
                        ];
                        for (f1, f2) in &pairs {
                            let fast = intersection_parts(f1, f2).expect("small inputs fit");
                            let fast = rat(fast.0, fast.1 as i128);
                            assert_eq!(fast, intersection_by_unions(f1, f2).unwrap(), "y={y} d={d} e={e} r={r1}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn overflow_falls_back() {
        let delta = Rational::from_f64(0.1).unwrap();
        let f1 = ArcFamily::plain(1000, delta.clone(), rat(0, 1)).unwrap();
        let f2 = ArcFamily::plain(-999, delta, rat(0, 1)).unwrap();
        assert!(intersection_parts(&f1, &f2).is_none());
        assert_eq!(
            intersection_measure(&f1, &f2).unwrap(),
            intersection_by_unions(&f1, &f2).unwrap()
        );
    }

    proptest! {
        #[test]
        fn random_families_match_unions(
            d in -60i64..60, e in -60i64..60,
            n1 in 0i128..50, k1 in 1i128..60, n2 in 0i128..50, k2 in 1i128..60,
            u in 0i128..40, v in 1i128..40,
            fa in -5i64..5, fb in 1u64..6, use_f1: bool, use_f2: bool,
        ) {
            prop_assume!(d != 0 && e != 0);
            let (n1, n2) = (n1 % ((k1 + 1) / 2), n2 % ((k2 + 1) / 2));
            let y = rat(u % v, v);
            let f1 = ArcFamily::new(d, rat(n1, k1), y.clone(), use_f1.then_some((fa, fb))).unwrap();
            let f2 = ArcFamily::new(e, rat(n2, k2), y, use_f2.then_some((fa + 1, fb))).unwrap();
            prop_assert_eq!(intersection_measure(&f1, &f2).unwrap(), intersection_by_unions(&f1, &f2).unwrap());
            prop_assert_eq!(intersection_measure(&f1, &f2).unwrap(), intersection_measure(&f2, &f1).unwrap());
        }
    }
}
