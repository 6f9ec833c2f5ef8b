//! Second-moment ratios `S1^2 / S2` over all ordered vector pairs with
//! `1 <= |q|, |r| <= Q` in `(n, m) = (2, 1)`.
//!
//! Parallel pairs are written `q = d k`, `r = e k` with `k` primitive of
//! norm `s`, `d >= 1`, `e != 0`; there are `8 phi(s)` such `k`. Since
//! `A(-d) = -A(d)`, the inner sum over `(d, e)` folds to the diagonal, the
//! antipodal terms and twice the terms with `1 <= |e| < d`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::audits::step_bounds_audit;
use super::measure::{sum_set_measures, Family};
use crate::arith::{totient_table, ExactSum, Rational};
use crate::dirichlet::TargetScheme;
use crate::sets::kernel::{intersection_measure, raw_intersection, RawFamily};
use crate::sets::{ApproxFunction, Variant};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QiaReport {
    /// Smallest norm included; 1 for the full sums.
    pub q_min: u64,
    #[serde(rename = "Q")]
    pub q_max: u64,
    pub s1: Rational,
    pub s2_parallel: Rational,
    pub s2_nonparallel: Rational,
    /// `S1^2 / S2`, or 0 when the report is degenerate.
    pub ratio: Rational,
    /// Parallel terms with `r = q`; equals `S1`.
    pub diagonal: Rational,
    /// Parallel terms with `r = -q`.
    pub antipodal: Rational,
    /// Off-diagonal parallel terms with `gcd(d, e) >= 3`.
    pub gcd_ge3_terms: Rational,
    /// Off-diagonal parallel terms with `gcd(d, e) <= 2`.
    pub gcd_le2_terms: Rational,
    /// Restricted-set terms meeting the disjointness hypotheses but with
    /// positive measure.
    pub disjointness_violations: u64,
    pub step2_lhs: Rational,
    pub step2_rhs: Rational,
    pub step3_lhs: Rational,
    pub step3_rhs: Rational,
    /// `S1 = 0`.
    pub degenerate: bool,
}

impl QiaReport {
    pub fn s2(&self) -> Rational {
        &self.s2_parallel + &self.s2_nonparallel
    }
}

/// Exact report at a single cutoff.
pub fn qia_ratio(psi: &ApproxFunction, target: &TargetScheme, variant: Variant, q_max: u64) -> Result<QiaReport, Error> {
    let family = Family::new(variant, psi.clone(), target, q_max)?;
    Ok(qia_sweep(&family, &[q_max])?.remove(0))
}

#[derive(Clone, Default)]
struct Buckets {
    parallel: Vec<ExactSum>,
    diagonal: Vec<ExactSum>,
    antipodal: Vec<ExactSum>,
    ge3: Vec<ExactSum>,
    le2: Vec<ExactSum>,
    violations: Vec<u64>,
}

impl Buckets {
    fn new(n: usize) -> Self {
        Buckets {
            parallel: vec![ExactSum::new(); n],
            diagonal: vec![ExactSum::new(); n],
            antipodal: vec![ExactSum::new(); n],
            ge3: vec![ExactSum::new(); n],
            le2: vec![ExactSum::new(); n],
            violations: vec![0; n],
        }
    }

    fn merge(mut self, other: Buckets) -> Buckets {
        let pairs = [
            (&mut self.parallel, other.parallel),
            (&mut self.diagonal, other.diagonal),
            (&mut self.antipodal, other.antipodal),
            (&mut self.ge3, other.ge3),
            (&mut self.le2, other.le2),
        ];
        for (mine, theirs) in pairs {
            for (a, b) in mine.iter_mut().zip(theirs) {
                a.merge(b);
            }
        }
        for (a, b) in self.violations.iter_mut().zip(other.violations) {
            *a += b;
        }
        self
    }
}

/// Per-norm data shared by all pair evaluations.
struct Ctx<'a> {
    family: &'a Family,
    u: i128,
    v: i128,
    deltas: Vec<Rational>,
    parts: Vec<Option<(i128, i128)>>,
    capped: bool,
}

impl Ctx<'_> {
    /// `|A(d, psi(|d| s)) ∩ A(e, psi(|e| s))|` as `numer / denom`.
    fn term(&self, s: u64, d: i64, e: i64) -> Result<(i128, u128), Error> {
        let nd = d.unsigned_abs() * s;
        let ne = e.unsigned_abs() * s;
        if let (Some((a1, b1)), Some((a2, b2))) = (self.parts[nd as usize], self.parts[ne as usize]) {
            let f1 = RawFamily { d: d as i128, alpha: a1, beta: b1, filter: self.family.filter(d) };
            let f2 = RawFamily { d: e as i128, alpha: a2, beta: b2, filter: self.family.filter(e) };
            if let Some(r) = raw_intersection(&f1, &f2, self.u, self.v) {
                return Ok(r);
            }
        }
        let f1 = self.family.arcs(d, self.deltas[nd as usize].clone())?;
        let f2 = self.family.arcs(e, self.deltas[ne as usize].clone())?;
        let exact = intersection_measure(&f1, &f2)?;
        let (n, k) = exact.to_i128_parts().ok_or_else(|| {
            Error::InvalidSpec(format!("intersection {exact} does not fit machine integers"))
        })?;
        Ok((n, k as u128))
    }
}

/// Exact reports at every cutoff in `checkpoints` (strictly increasing),
/// sharing one pass over the pair structure.
pub fn qia_sweep(family: &Family, checkpoints: &[u64]) -> Result<Vec<QiaReport>, Error> {
    qia_window_sweep(family, 1, checkpoints)
}

/// [`qia_sweep`] restricted to vectors with `q_min <= |q|`.
pub fn qia_window_sweep(family: &Family, q_min: u64, checkpoints: &[u64]) -> Result<Vec<QiaReport>, Error> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) || q_min == 0 || checkpoints[0] < q_min {
        return Err(Error::InvalidSpec(
            "checkpoints must be strictly increasing and at least the lower cutoff".into(),
        ));
    }
    let q_max = *checkpoints.last().expect("nonempty");
    let psi = &family.psi;
    psi.check_domain(q_max)?;
    if family.variant == Variant::Tilde {
        psi.validate_capped(q_max)?;
    } else {
        psi.validate(q_max)?;
    }
    let (u, v) = family.y().to_i128_parts().ok_or_else(|| Error::InvalidSpec("target too large".into()))?;
    let mut deltas = vec![Rational::zero()];
    for q in 1..=q_max {
        deltas.push(psi.value(q)?);
    }
    let parts = deltas.iter().map(|x| x.to_i128_parts()).collect();
    let ctx = Ctx {
        family,
        u,
        v,
        deltas,
        parts,
        capped: psi.validate_capped(q_max).is_ok(),
    };
    let n = checkpoints.len();
    let phi = totient_table(q_max as usize);

    let buckets = (1..=q_max)
        .into_par_iter()
        .map(|s| norm_class(&ctx, s, q_min, checkpoints, phi[s as usize]))
        .try_reduce(|| Buckets::new(n), |a, b| Ok(a.merge(b)))?;

    let s1_all = sum_set_measures(family, q_max)?;
    let mut reports = Vec::with_capacity(n);
    let finish = |v: Vec<ExactSum>| -> Vec<Rational> {
        let mut run = Rational::zero();
        v.into_iter()
            .map(|x| {
                run += x.finish();
                run.clone()
            })
            .collect()
    };
    let parallel = finish(buckets.parallel);
    let diagonal = finish(buckets.diagonal);
    let antipodal = finish(buckets.antipodal);
    let ge3 = finish(buckets.ge3);
    let le2 = finish(buckets.le2);
    let mut violations = 0;

    // Plain measures for the non-parallel block and per-q step audits.
    let mut plain_total = ExactSum::new();
    let mut steps = [ExactSum::new(), ExactSum::new(), ExactSum::new(), ExactSum::new()];
    let mut s1 = ExactSum::new();
    let mut lo = q_min;
    for (i, &cp) in checkpoints.iter().enumerate() {
        for t in lo..=cp {
            let two_psi = &ctx.deltas[t as usize] * &Rational::integer(2);
            plain_total.add(&(Rational::integer(8 * t as i128) * &two_psi));
            s1.add(&s1_all.per_norm[t as usize - 1]);
            let a = step_bounds_audit(t, psi)?;
            steps[0].add(&a.step2.lhs);
            steps[1].add(&a.step2.rhs);
            steps[2].add(&a.step3.lhs);
            steps[3].add(&a.step3.rhs);
        }
        lo = cp + 1;
        violations += buckets.violations[i];
        let total = plain_total.clone().finish();
        let s2_nonparallel = &total * &total - parallel_plain_products(&ctx, &phi, q_min, cp);
        let s1v = s1.clone().finish();
        let s2 = &parallel[i] + &s2_nonparallel;
        let degenerate = s1v.is_zero();
        let ratio = if degenerate || s2.is_zero() { Rational::zero() } else { &s1v * &s1v / &s2 };
        reports.push(QiaReport {
            q_min,
            q_max: cp,
            s1: s1v,
            s2_parallel: parallel[i].clone(),
            s2_nonparallel,
            ratio,
            diagonal: diagonal[i].clone(),
            antipodal: antipodal[i].clone(),
            gcd_ge3_terms: ge3[i].clone(),
            gcd_le2_terms: le2[i].clone(),
            disjointness_violations: violations,
            step2_lhs: steps[0].clone().finish(),
            step2_rhs: steps[1].clone().finish(),
            step3_lhs: steps[2].clone().finish(),
            step3_rhs: steps[3].clone().finish(),
            degenerate,
        });
    }
    Ok(reports)
}

/// `sum_s 8 phi(s) * 2 (sum_{q_min <= d s <= Q} 2 psi(d s))^2`.
fn parallel_plain_products(ctx: &Ctx, phi: &[u64], q_min: u64, q: u64) -> Rational {
    let mut acc = ExactSum::new();
    for s in 1..=q {
        let mut line = ExactSum::new();
        for d in q_min.div_ceil(s)..=q / s {
            line.add(&ctx.deltas[(d * s) as usize]);
        }
        let line = line.finish() * Rational::integer(2);
        acc.add(&(Rational::integer(16 * phi[s as usize] as i128) * &line * &line));
    }
    acc.finish()
}

fn norm_class(ctx: &Ctx, s: u64, q_min: u64, checkpoints: &[u64], phi_s: u64) -> Result<Buckets, Error> {
    let n = checkpoints.len();
    let mut b = Buckets::new(n);
    let w = 8 * phi_s as i128;
    let tilde = ctx.family.variant == Variant::Tilde;
    let mut slot = 0;
    let d_max = checkpoints[n - 1] / s;
    let d_min = q_min.div_ceil(s) as i64;
    for d in d_min..=d_max as i64 {
        while (d as u64) * s > checkpoints[slot] {
            slot += 1;
        }
        let (n0, k0) = ctx.term(s, d, d)?;
        b.diagonal[slot].add_small(w * n0, k0);
        let (n1, k1) = ctx.term(s, d, -d)?;
        b.antipodal[slot].add_small(w * n1, k1);
        let mut off_ge3 = ExactSum::new();
        let mut off_le2 = ExactSum::new();
        for e_abs in d_min..d {
            let g = (d as u64).gcd(&(e_abs as u64));
            let vanishing = tilde
                && ctx.capped
                && g >= 3
                && (e_abs as u64) * s >= 2 * (d as u64) * (d as u64);
            for e in [e_abs, -e_abs] {
                let (ni, ki) = ctx.term(s, d, e)?;
                if vanishing && ni != 0 {
                    b.violations[slot] += 1;
                }
                if g >= 3 {
                    off_ge3.add_small(2 * w * ni, ki);
                } else {
                    off_le2.add_small(2 * w * ni, ki);
                }
            }
        }
        let (ge3, le2) = (off_ge3.finish(), off_le2.finish());
        b.parallel[slot].add_small(w * n0, k0);
        b.parallel[slot].add_small(w * n1, k1);
        b.parallel[slot].add(&ge3);
        b.parallel[slot].add(&le2);
        b.ge3[slot].add(&ge3);
        b.le2[slot].add(&le2);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{enumerate_vectors, rat};
    use crate::analysis::intersect::pairwise_intersection_measure;
    use crate::dirichlet::sqrt2_minus_1_surrogate;
    use crate::sets::SetSpec;

    #[test]
    fn hand_value() {
        let psi = ApproxFunction::preset("quarter_inverse").unwrap();
        let r = qia_ratio(&psi, &TargetScheme::scalar(rat(0, 1)), Variant::Coprime, 1).unwrap();
        assert_eq!(r.s1, rat(4, 1));
        assert_eq!(r.s2_parallel, rat(8, 1));
        assert_eq!(r.s2_nonparallel, rat(12, 1));
        assert_eq!(r.s2(), rat(20, 1));
        assert_eq!(r.ratio, rat(4, 5));
        assert!(!r.degenerate);
    }

    #[test]
    fn zero_function_is_degenerate() {
        let r = qia_ratio(&ApproxFunction::zero(), &TargetScheme::scalar(rat(1, 3)), Variant::Tilde, 20).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.s1, rat(0, 1));
        assert_eq!(r.ratio, rat(0, 1));
    }

    // Every ordered pair of vectors with norm at most Q, measured pairwise.
    fn brute(psi: &ApproxFunction, y: &Rational, variant: Variant, q_min: u64, q_max: u64) -> (Rational, Rational, Rational) {
        let target = TargetScheme::scalar(y.clone());
        let mut specs = Vec::new();
        for s in q_min..=q_max {
            for q in enumerate_vectors(s, 2).unwrap() {
                specs.push(SetSpec::new(2, 1, variant, q, psi.value(s).unwrap(), target.clone()).unwrap());
            }
        }
        let mut s1 = Rational::zero();
        let (mut par, mut nonpar) = (Rational::zero(), Rational::zero());
        for a in &specs {
            s1 += super::super::measure::closed_form_for_spec(a).unwrap();
            for b in &specs {
                let m = pairwise_intersection_measure(a, b).unwrap();
                if crate::arith::parallel(&a.q, &b.q) {
                    par += m.value;
                } else {
                    nonpar += m.value;
                }
            }
        }
        (s1, par, nonpar)
    }

    #[test]
    fn sweep_matches_pairwise_enumeration() {
        let psi = ApproxFunction::preset("quarter_inverse_capped").unwrap();
        for (variant, y) in [
            (Variant::Tilde, rat(2, 7)),
            (Variant::Tilde, rat(1, 3)),
            (Variant::Coprime, rat(0, 1)),
            (Variant::Plain, rat(1, 3)),
        ] {
            let fam = Family::new(variant, psi.clone(), &TargetScheme::scalar(y.clone()), 6).unwrap();
            let reports = qia_sweep(&fam, &[2, 4, 6]).unwrap();
            for r in &reports {
                let (s1, par, nonpar) = brute(&psi, &y, variant, 1, r.q_max);
                assert_eq!(r.s1, s1, "{variant:?} y={y} Q={}", r.q_max);
                assert_eq!(r.s2_parallel, par, "{variant:?} y={y} Q={}", r.q_max);
                assert_eq!(r.s2_nonparallel, nonpar, "{variant:?} y={y} Q={}", r.q_max);
                assert_eq!(r.diagonal, r.s1);
                assert_eq!(r.s2_parallel, &r.diagonal + &r.antipodal + &r.gcd_ge3_terms + &r.gcd_le2_terms);
            }
        }
    }

    #[test]
    fn window_matches_pairwise_enumeration() {
        let psi = ApproxFunction::preset("half_inverse_capped").unwrap();
        for (variant, y) in [(Variant::Tilde, rat(1, 3)), (Variant::Plain, rat(2, 7))] {
            let fam = Family::new(variant, psi.clone(), &TargetScheme::scalar(y.clone()), 7).unwrap();
            for r in qia_window_sweep(&fam, 3, &[4, 7]).unwrap() {
                let (s1, par, nonpar) = brute(&psi, &y, variant, 3, r.q_max);
                assert_eq!((r.s1.clone(), r.s2_parallel.clone(), r.s2_nonparallel.clone()), (s1, par, nonpar));
                assert_eq!(r.q_min, 3);
            }
        }
        let fam = Family::new(Variant::Plain, psi, &TargetScheme::scalar(rat(0, 1)), 7).unwrap();
        assert!(qia_window_sweep(&fam, 5, &[4, 7]).is_err());
    }

    #[test]
    fn sweep_agrees_with_single_cutoffs() {
        let psi = ApproxFunction::preset("quarter_inverse_capped").unwrap();
        let target = TargetScheme::scalar(sqrt2_minus_1_surrogate(800));
        let fam = Family::new(Variant::Tilde, psi.clone(), &target, 30).unwrap();
        let sweep = qia_sweep(&fam, &[7, 30]).unwrap();
        for r in &sweep {
            assert_eq!(*r, qia_ratio(&psi, &target, Variant::Tilde, r.q_max).unwrap());
            assert!(r.ratio.is_positive() && r.ratio <= rat(1, 1));
            assert_eq!(r.disjointness_violations, 0);
        }
        let steps: Vec<_> = (1..=30).map(|q| step_bounds_audit(q, &psi).unwrap()).collect();
        let lhs: Rational = steps.iter().map(|a| a.step3.lhs.clone()).sum();
        assert_eq!(sweep[1].step3_lhs, lhs);
    }

    #[test]
    fn rejects_bad_checkpoints_and_uncapped_tilde() {
        let psi = ApproxFunction::preset("quarter_inverse").unwrap();
        let fam = Family::new(Variant::Tilde, psi, &TargetScheme::scalar(rat(1, 3)), 10).unwrap();
        assert!(qia_sweep(&fam, &[5, 5]).is_err());
        assert!(qia_sweep(&fam, &[]).is_err());
        let loose = ApproxFunction::table(vec![rat(2, 5); 10]);
        let fam = Family::new(Variant::Tilde, loose, &TargetScheme::scalar(rat(1, 3)), 10).unwrap();
        assert!(qia_sweep(&fam, &[10]).is_err());
    }
}
