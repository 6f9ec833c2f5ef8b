use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::measure::closed_form_measure;
use crate::arith::{parallel, rat, reduce_to_primitive, sup_norm, Rational};
use crate::dirichlet::dirichlet_pair;
use crate::sets::kernel::{intersection_by_unions, intersection_measure};
use crate::sets::{build_interval_set, ApproxFunction, ArcFamily, SetSpec, Variant};
use crate::Error;

/// How a pairwise measure was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    /// Exact interval arithmetic after reduction to one dimension.
    Exact,
    /// Product of the plain measures, which equals the intersection for
    /// plain sets.
    ExactProduct,
    /// Product of the plain measures, an upper bound for restricted sets.
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairMeasure {
    pub value: Rational,
    pub kind: MeasureKind,
}

/// `|S_q ∩ S_r|` for two sets of the same variant and target in `(n, m) = (2, 1)`.
pub fn pairwise_intersection_measure(sq: &SetSpec, sr: &SetSpec) -> Result<PairMeasure, Error> {
    if sq.variant != sr.variant || sq.target != sr.target || sq.n != sr.n || sq.m != sr.m {
        return Err(Error::MixedFamilies(format!(
            "{} set in dimension ({}, {}) against {} set in dimension ({}, {})",
            sq.variant.name(),
            sq.n,
            sq.m,
            sr.variant.name(),
            sr.n,
            sr.m
        )));
    }
    if sq.m != 1 {
        return Err(Error::UnsupportedDimension {
            what: "exact pairwise intersection",
            n: sq.n,
            m: sq.m,
        });
    }
    if !parallel(&sq.q, &sr.q) {
        let value = rat(4, 1) * &sq.delta * &sr.delta;
        let kind = if sq.variant == Variant::Plain {
            MeasureKind::ExactProduct
        } else {
            MeasureKind::UpperBound
        };
        return Ok(PairMeasure { value, kind });
    }
    let (k, d) = reduce_to_primitive(&sq.q)?;
    let i = k.iter().position(|&c| c != 0).expect("primitive vector is nonzero");
    let e = sr.q[i] / k[i];
    let one_dim = |spec: &SetSpec, modulus: i64| -> Result<SetSpec, Error> {
        SetSpec::new(1, 1, spec.variant, vec![modulus], spec.delta.clone(), spec.target.clone())
    };
    let a = build_interval_set(&one_dim(sq, d as i64)?)?;
    let b = build_interval_set(&one_dim(sr, e)?)?;
    Ok(PairMeasure {
        value: a.intersect(&b).measure(),
        kind: MeasureKind::Exact,
    })
}

/// Outcome of one disjointness test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointnessReport {
    pub d: i64,
    pub e: i64,
    pub q: u64,
    pub r: u64,
    pub y: Rational,
    pub measure: Rational,
    /// Hypotheses that failed; empty when the vanishing conclusion applies.
    pub violations: Vec<String>,
}

impl DisjointnessReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.violations.is_empty()
    }

    /// The conclusion holds or is not claimed.
    pub fn consistent(&self) -> bool {
        !self.hypotheses_hold() || self.measure.is_zero()
    }
}

/// `|A~_{1,1}(d, psi(q)) ∩ A_{1,1}(e, psi(r))|` with the hypotheses of the
/// vanishing criterion checked and reported. The cap `psi <= 1/q` is checked
/// at `q` and `r`, the only values the measure depends on.
pub fn disjointness_check(d: i64, e: i64, q: u64, r: u64, psi: &ApproxFunction, y: &Rational) -> Result<DisjointnessReport, Error> {
    let mut violations = Vec::new();
    if !(1 <= r && r < q) {
        violations.push(format!("need 1 <= r < q, got r = {r}, q = {q}"));
    }
    if !(1 <= e.unsigned_abs() && e.unsigned_abs() < d.unsigned_abs()) {
        violations.push(format!("need 1 <= |e| < |d|, got e = {e}, d = {d}"));
    }
    let g = d.unsigned_abs().gcd(&e.unsigned_abs());
    if g < 3 {
        violations.push(format!("need gcd(d, e) >= 3, got {g}"));
    }
    let d2 = 2 * (d as i128) * (d as i128);
    if (r as i128) < d2 {
        violations.push(format!("need r >= 2d^2 = {d2}, got {r}"));
    }
    let (dq, dr) = (psi.value(q)?, psi.value(r)?);
    for (n, v) in [(q, &dq), (r, &dr)] {
        if n > 0 && *v > rat(1, n as i128) {
            violations.push(format!("need psi({n}) <= 1/{n}, got {v}"));
        }
    }
    let pair = dirichlet_pair(y, d)?;
    let tilde = ArcFamily::new(d, dq, y.clone(), Some((pair.a, pair.b)))?;
    let plain = ArcFamily::plain(e, dr, y.clone())?;
    let measure = intersection_measure(&tilde, &plain)?;
    Ok(DisjointnessReport {
        d,
        e,
        q,
        r,
        y: y.clone(),
        measure,
        violations,
    })
}

/// Disjointness measure through explicit interval unions.
pub fn disjointness_measure_by_unions(d: i64, e: i64, q: u64, r: u64, psi: &ApproxFunction, y: &Rational) -> Result<Rational, Error> {
    let pair = dirichlet_pair(y, d)?;
    let tilde = ArcFamily::new(d, psi.value(q)?, y.clone(), Some((pair.a, pair.b)))?;
    let plain = ArcFamily::plain(e, psi.value(r)?, y.clone())?;
    intersection_by_unions(&tilde, &plain)
}

/// `|A_q|` for a plain set, used for non-parallel products.
pub fn plain_measure(q: &[i64], psi: &ApproxFunction) -> Result<Rational, Error> {
    closed_form_measure(1, 1, &psi.value(sup_norm(q))?, None)
}
