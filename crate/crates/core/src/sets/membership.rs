use serde::{Deserialize, Serialize};

use super::spec::SetSpec;
use crate::arith::{gcd_vec, Rational};
use crate::Error;

/// Distance from the decision boundary below which a double-precision test
/// is redone exactly.
pub const GUARD_BAND: f64 = 1e-12;

/// Scalar types a point can be made of.
pub trait Coord: Clone {
    fn in_unit(&self) -> bool;
    fn exact(&self) -> Rational;
    /// `(sum k_i x_i) mod 1`.
    fn lin_comb_frac<'a>(k: &[i64], xs: impl Iterator<Item = &'a Self>) -> Self
    where
        Self: 'a;
}

impl Coord for Rational {
    fn in_unit(&self) -> bool {
        !self.is_negative() && *self < Rational::one()
    }

    fn exact(&self) -> Rational {
        self.clone()
    }

    fn lin_comb_frac<'a>(k: &[i64], xs: impl Iterator<Item = &'a Self>) -> Self {
        let mut acc = Rational::zero();
        for (ki, xi) in k.iter().zip(xs) {
            acc += &(Rational::integer(*ki as i128) * xi);
        }
        acc.frac()
    }
}

impl Coord for f64 {
    fn in_unit(&self) -> bool {
        (0.0..1.0).contains(self)
    }

    fn exact(&self) -> Rational {
        Rational::from_f64(*self).expect("finite coordinate")
    }

    fn lin_comb_frac<'a>(k: &[i64], xs: impl Iterator<Item = &'a Self>) -> Self {
        let s: f64 = k.iter().zip(xs).map(|(ki, xi)| *ki as f64 * xi).sum();
        let r = s.rem_euclid(1.0);
        if r >= 1.0 {
            0.0
        } else {
            r
        }
    }
}

/// An `n x m` matrix with entries in `[0, 1)`, stored row by row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMatrix<T> {
    n: usize,
    m: usize,
    entries: Vec<T>,
}

impl<T: Coord> PointMatrix<T> {
    pub fn new(n: usize, m: usize, entries: Vec<T>) -> Result<Self, Error> {
        if entries.len() != n * m {
            return Err(Error::InvalidSpec(format!(
                "point needs {} entries, got {}",
                n * m,
                entries.len()
            )));
        }
        if !entries.iter().all(Coord::in_unit) {
            return Err(Error::InvalidSpec("point entries must lie in [0, 1)".into()));
        }
        Ok(PointMatrix { n, m, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.m + j]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = &T> + '_ {
        (0..self.n).map(move |i| self.get(i, j))
    }

    pub fn to_exact(&self) -> PointMatrix<Rational> {
        PointMatrix {
            n: self.n,
            m: self.m,
            entries: self.entries.iter().map(Coord::exact).collect(),
        }
    }
}

/// The integer vector `p` realizing membership and its sup-norm error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipWitness {
    pub p: Vec<i64>,
    pub error: Rational,
}

fn check_shape<T>(x: &PointMatrix<T>, spec: &SetSpec) -> Result<(), Error> {
    if x.n != spec.n || x.m != spec.m {
        return Err(Error::InvalidSpec(format!(
            "point is {}x{} but the set lives in {}x{}",
            x.n, x.m, spec.n, spec.m
        )));
    }
    Ok(())
}

/// Exact membership test with the nearest-integer witness `p = round(qx - y)`.
pub fn membership(x: &PointMatrix<Rational>, spec: &SetSpec) -> Result<Option<MembershipWitness>, Error> {
    check_shape(x, spec)?;
    let y = spec.target_vector()?;
    let mut p = Vec::with_capacity(spec.m);
    let mut error = Rational::zero();
    for (j, yj) in y.iter().enumerate() {
        let mut z = -yj;
        for (qi, xij) in spec.q.iter().zip(x.column(j)) {
            z += &(Rational::integer(*qi as i128) * xij);
        }
        let pj = z.round_half_down();
        let err = (z - Rational::from(pj.clone())).abs();
        p.push(i64::try_from(pj).map_err(|_| Error::InvalidSpec("witness exceeds i64".into()))?);
        error = error.max(err);
    }
    if error >= spec.delta {
        return Ok(None);
    }
    if let Some(filter) = spec.filter()? {
        if !filter.admits(gcd_vec(&spec.q)?, &p) {
            return Ok(None);
        }
    }
    Ok(Some(MembershipWitness { p, error }))
}

/// Double-precision membership; points within [`GUARD_BAND`] of a decision
/// boundary are re-tested exactly.
pub fn membership_f64(x: &PointMatrix<f64>, spec: &SetSpec) -> Result<bool, Error> {
    check_shape(x, spec)?;
    let y: Vec<f64> = spec.target_vector()?.iter().map(Rational::to_f64).collect();
    let delta = spec.delta.to_f64();
    let mut p = Vec::with_capacity(spec.m);
    let mut error = 0.0f64;
    for (j, yj) in y.iter().enumerate() {
        let z: f64 = spec.q.iter().zip(x.column(j)).map(|(qi, xi)| *qi as f64 * xi).sum::<f64>() - yj;
        let pj = z.round();
        let err = (z - pj).abs();
        if (err - 0.5).abs() < GUARD_BAND {
            return Ok(membership(&x.to_exact(), spec)?.is_some());
        }
        p.push(pj as i64);
        error = error.max(err);
    }
    if (error - delta).abs() < GUARD_BAND {
        return Ok(membership(&x.to_exact(), spec)?.is_some());
    }
    if error >= delta {
        return Ok(false);
    }
    Ok(match spec.filter()? {
        Some(filter) => filter.admits(gcd_vec(&spec.q)?, &p),
        None => true,
    })
}

/// `T_k(x) = k x mod 1` for a primitive `k`.
pub fn torus_map_image<T: Coord>(k: &[i64], x: &PointMatrix<T>) -> Result<Vec<T>, Error> {
    if gcd_vec(k)? != 1 {
        return Err(Error::NotPrimitive(k.to_vec()));
    }
    if k.len() != x.n {
        return Err(Error::InvalidSpec("k and x have different row counts".into()));
    }
    Ok((0..x.m).map(|j| T::lin_comb_frac(k, x.column(j))).collect())
}
