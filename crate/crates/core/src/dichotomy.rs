//! Seeded Monte Carlo estimates of finite tail unions, first-moment
//! ceilings, second-moment floors and the `T_l` invariance check.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{qia_window_sweep, Family, QiaReport};
use crate::arith::{gcd_vec, rat, ExactSum, Rational};
use crate::circle::CircleIntervalUnion;
use crate::sets::{membership, membership_f64, ApproxFunction, MultiPsi, PointMatrix, PsiKind, SetSpec, Support, GUARD_BAND};
use crate::Error;

/// Fraction of sampled points in `union_{Q0 <= |q| <= Q1} A_q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    #[serde(rename = "Q0")]
    pub q0: u64,
    #[serde(rename = "Q1")]
    pub q1: u64,
    pub samples: u64,
    pub hits: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub seed: u64,
}

/// `(hits / N, sqrt(p (1 - p) / N))`.
pub fn proportion(hits: u64, samples: u64) -> (f64, f64) {
    let p = hits as f64 / samples as f64;
    (p, (p * (1.0 - p) / samples as f64).sqrt())
}

/// The `index`-th point of the stream keyed by `seed`, independent of
/// evaluation order.
pub fn sample_point(seed: u64, index: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    (0..dim).map(|_| rng.random::<f64>()).collect()
}

fn exact_point(x: &[f64]) -> PointMatrix<Rational> {
    let entries = x.iter().map(|&v| Rational::from_f64(v).expect("finite sample")).collect();
    PointMatrix::new(x.len(), 1, entries).expect("column shape")
}

/// Tail-union sampler for a family with `m = 1` and `n` in `{1, 2}`.
struct Sampler<'a> {
    family: &'a Family,
    n: usize,
    q0: u64,
    q1: u64,
    y: f64,
    deltas: Vec<f64>,
}

impl<'a> Sampler<'a> {
    fn new(family: &'a Family, n: usize, q0: u64, q1: u64) -> Result<Self, Error> {
        if !(1..=2).contains(&n) {
            return Err(Error::UnsupportedDimension { what: "tail union sampling", n, m: 1 });
        }
        if q0 == 0 || q0 > q1 {
            return Err(Error::InvalidSpec(format!("window [{q0}, {q1}] is empty")));
        }
        if q1 > family.max_d() {
            return Err(Error::BeyondDomain { q: q1, q_max: family.max_d() });
        }
        family.psi.check_domain(q1)?;
        family.psi.validate(q1)?;
        let deltas = (0..=q1).map(|q| if q == 0 { 0.0 } else { family.psi.value_f64(q) }).collect();
        Ok(Sampler {
            family,
            n,
            q0,
            q1,
            y: family.y().to_f64(),
            deltas,
        })
    }

    /// Whether `x` lies in `A_q`, falling back to exact arithmetic near the
    /// boundary.
    fn test(&self, q: &[i64], s: u64, x: &[f64]) -> Result<bool, Error> {
        let delta = self.deltas[s as usize];
        let z = q.iter().zip(x).map(|(qi, xi)| *qi as f64 * xi).sum::<f64>() - self.y;
        let p = z.round();
        let err = (z - p).abs();
        if err > delta + GUARD_BAND {
            return Ok(false);
        }
        if err < delta - GUARD_BAND {
            return Ok(match self.family.filter(gcd_vec(q)? as i64) {
                None => true,
                Some((a, b)) => (b as i128 * p as i128 + a as i128).unsigned_abs().gcd(&(gcd_vec(q)? as u128)) == 1,
            });
        }
        let spec = SetSpec::new(
            self.n,
            1,
            self.family.variant,
            q.to_vec(),
            self.family.psi.value(s)?,
            self.family.target().clone(),
        )?;
        Ok(membership(&exact_point(x), &spec)?.is_some())
    }

    fn hit(&self, x: &[f64]) -> Result<bool, Error> {
        for s in self.q0..=self.q1 {
            if self.deltas[s as usize] == 0.0 {
                continue;
            }
            let s_i = s as i64;
            if self.n == 1 {
                if self.test(&[s_i], s, x)? || self.test(&[-s_i], s, x)? {
                    return Ok(true);
                }
                continue;
            }
            for a in -s_i..=s_i {
                for q in [[a, s_i], [a, -s_i], [s_i, a], [-s_i, a]] {
                    // Corners appear twice; testing them twice is harmless.
                    if self.test(&q, s, x)? {
                        return Ok(true);
                    }
                }
            }
        }
        Ok(false)
    }
}

/// Monte Carlo estimate of `|union_{Q0 <= |q| <= Q1} A_q|` for `q` in `Z^n`.
pub fn tail_union_estimate(family: &Family, n: usize, q0: u64, q1: u64, samples: u64, seed: u64) -> Result<TailEstimate, Error> {
    if samples == 0 {
        return Err(Error::ZeroInput("samples"));
    }
    let sampler = Sampler::new(family, n, q0, q1)?;
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| sampler.hit(&sample_point(seed, i, n)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (estimate, stderr) = proportion(hits, samples);
    Ok(TailEstimate { q0, q1, samples, hits, estimate, stderr, seed })
}

/// Exact `|union_{Q0 <= |q| <= Q1} A_q|` for `n = m = 1`.
pub fn exact_window_measure(family: &Family, q0: u64, q1: u64) -> Result<Rational, Error> {
    if q1 > family.max_d() {
        return Err(Error::BeyondDomain { q: q1, q_max: family.max_d() });
    }
    let mut acc = CircleIntervalUnion::empty();
    for s in q0..=q1 {
        let delta = family.psi.value(s)?;
        for d in [s as i64, -(s as i64)] {
            acc = acc.union(&family.arcs(d, delta.clone())?.to_union()?);
        }
    }
    Ok(acc.measure())
}

/// Number of vectors in `Z^n` with sup norm `s >= 1`.
pub fn shell_size(s: u64, n: usize) -> u128 {
    (2 * s as u128 + 1).pow(n as u32) - (2 * s as u128 - 1).pow(n as u32)
}

/// First-moment ceiling `sum_{Q0 <= s <= Q1} #{|q| = s} (2 psi(s))^m`.
pub fn tail_bound(psi: &ApproxFunction, n: usize, m: usize, q0: u64, q1: u64) -> Result<Rational, Error> {
    psi.check_domain(q1)?;
    let mut acc = ExactSum::new();
    for s in q0..=q1 {
        let v = psi.value(s)?;
        if v.is_zero() {
            continue;
        }
        acc.add(&(Rational::integer(shell_size(s, n) as i128) * (v * rat(2, 1)).pow(m as i32)));
    }
    Ok(acc.finish())
}

/// Whether `sum_q q^(n-1) psi(q)^m` converges, decided from the closed form
/// of the function.
pub fn series_converges(psi: &ApproxFunction, n: usize, m: usize) -> bool {
    let threshold = Rational::integer(n as i128);
    let m = Rational::integer(m as i128);
    match &psi.kind {
        PsiKind::Zero | PsiKind::Table { .. } => true,
        PsiKind::Power { c, s } => c.is_zero() || &m * s > threshold,
        PsiKind::Capped { c, s } => c.is_zero() || &m * s.clone().max(Rational::one()) > threshold,
        PsiKind::Sparse { support, c, s } => match support {
            Support::Explicit { .. } => true,
            Support::PowersOf { base } => *base < 2 || c.is_zero() || &m * s > threshold - Rational::one(),
        },
    }
}

/// Which side of the dichotomy the data supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnosis {
    /// Convergent series; every estimate is under its ceiling.
    ZeroSide,
    /// Divergent series; every estimate is over its floor.
    FullSide,
    /// The estimates contradict the series type.
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyRow {
    #[serde(flatten)]
    pub tail: TailEstimate,
    pub tail_bound: Rational,
    /// Second-moment floor of the window when requested.
    pub floor: Option<Rational>,
}

impl DichotomyRow {
    /// `estimate <= min(1, tail_bound) + k stderr`.
    pub fn under_ceiling(&self, k: f64) -> bool {
        self.tail.estimate <= self.tail_bound.to_f64().min(1.0) + k * self.tail.stderr
    }

    /// `estimate >= floor - k stderr`, true when no floor was computed.
    pub fn over_floor(&self, k: f64) -> bool {
        self.floor
            .as_ref()
            .is_none_or(|f| self.tail.estimate >= f.to_f64() - k * self.tail.stderr)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub psi: String,
    pub variant: String,
    pub y: Rational,
    pub n: usize,
    pub converges: bool,
    pub rows: Vec<DichotomyRow>,
    pub diagnosis: Diagnosis,
}

/// Options for [`dichotomy_experiment`].
#[derive(Clone, Debug)]
pub struct DichotomyOptions {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// Compute the exact second-moment floor of each window (`n = 2`).
    pub floors: bool,
}

/// Tail estimates over an increasing schedule of windows, each with its
/// first-moment ceiling and optionally its second-moment floor.
pub fn dichotomy_experiment(family: &Family, schedule: &[(u64, u64)], opts: &DichotomyOptions) -> Result<DichotomyReport, Error> {
    if schedule.is_empty() || schedule.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::InvalidSpec("schedule must be nonempty with increasing Q0".into()));
    }
    if opts.floors && opts.n != 2 {
        return Err(Error::UnsupportedDimension { what: "second-moment floors", n: opts.n, m: 1 });
    }
    let converges = series_converges(&family.psi, opts.n, 1);
    let mut rows = Vec::with_capacity(schedule.len());
    for (i, &(q0, q1)) in schedule.iter().enumerate() {
        let tail = tail_union_estimate(family, opts.n, q0, q1, opts.samples, opts.seed.wrapping_add(i as u64))?;
        let floor = if opts.floors {
            Some(chung_erdos_floor(&qia_window_sweep(family, q0, &[q1])?[0])?)
        } else {
            None
        };
        rows.push(DichotomyRow {
            tail,
            tail_bound: tail_bound(&family.psi, opts.n, 1, q0, q1)?,
            floor,
        });
    }
    let diagnosis = if converges && rows.iter().all(|r| r.under_ceiling(3.0)) {
        Diagnosis::ZeroSide
    } else if !converges && rows.iter().all(|r| r.over_floor(3.0)) {
        Diagnosis::FullSide
    } else {
        Diagnosis::Inconsistent
    };
    Ok(DichotomyReport {
        psi: family.psi.label(),
        variant: family.variant.name().to_string(),
        y: family.y().clone(),
        n: opts.n,
        converges,
        rows,
        diagnosis,
    })
}

/// `S1^2 / S2`, a lower bound for the measure of the union the report covers.
pub fn chung_erdos_floor(report: &QiaReport) -> Result<Rational, Error> {
    if report.degenerate {
        return Err(Error::InvalidSpec("degenerate report: the measure sum is zero".into()));
    }
    let s2 = report.s2();
    if s2.is_zero() {
        return Err(Error::InvalidSpec("second moment is zero".into()));
    }
    Ok(&report.s1 * &report.s1 / s2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub samples: u64,
    /// Samples where `Psi(q) > 0`, so some `k` satisfies the premise.
    pub premises: u64,
    pub violations: u64,
}

/// One instance of the `T_l` step: given `|q x - p - a/b| < k Psi(q)`, checks
/// `|q T_l(x) - p' - a/b| < k l Psi(q)` for `l = b + 1` and
/// `p' = l p + a - q floor(l x)`. Returns `None` when the premise fails.
pub fn invariance_step(x: &PointMatrix<Rational>, q: &[i64], a: &[i64], b: u64, k: &Rational, psi_q: &Rational) -> Result<Option<bool>, Error> {
    let (n, m) = (x.n(), x.m());
    if q.len() != n || a.len() != m {
        return Err(Error::InvalidSpec("shape mismatch".into()));
    }
    let l = Rational::integer(b as i128 + 1);
    let y: Vec<Rational> = a.iter().map(|&aj| rat(aj as i128, b as i128)).collect();
    let bound = k * psi_q;
    let bound_l = &bound * &l;
    let mut premise = true;
    let mut image_ok = true;
    for j in 0..m {
        let qx: Rational = q.iter().enumerate().map(|(i, &qi)| Rational::integer(qi as i128) * x.get(i, j)).sum();
        let z = &qx - &y[j];
        let p = Rational::from(z.round_half_down());
        if (&z - &p).abs() >= bound {
            premise = false;
            break;
        }
        let mut shift = Rational::zero();
        let mut qt = Rational::zero();
        for (i, &qi) in q.iter().enumerate() {
            let lx = &l * x.get(i, j);
            let fl = Rational::from(lx.floor());
            let t = &lx - &fl;
            if t.is_negative() || t >= Rational::one() {
                image_ok = false;
            }
            shift += &(Rational::integer(qi as i128) * &fl);
            qt += &(Rational::integer(qi as i128) * &t);
        }
        let p_image = &l * &p + Rational::integer(a[j] as i128) - shift;
        if !p_image.is_integer() || (&qt - &p_image - &y[j]).abs() >= bound_l {
            image_ok = false;
        }
    }
    Ok(premise.then_some(image_ok))
}

/// Checks the `T_l` step on seeded samples `(x, q)` with `k` the least
/// integer satisfying the premise. Points have 30-bit dyadic entries.
pub fn zero_one_invariance_sample(a: &[i64], b: u64, psi: &MultiPsi, n: usize, samples: u64, seed: u64, q_bound: u64) -> Result<InvarianceReport, Error> {
    let m = a.len();
    if b == 0 || a.iter().fold(b, |g, &ai| g.gcd(&ai.unsigned_abs())) != 1 {
        return Err(Error::InvalidSpec("target must be a/b with gcd(a, b) = 1".into()));
    }
    if psi.s.len() != n || q_bound == 0 {
        return Err(Error::InvalidSpec("Psi must have one exponent per row and q_bound > 0".into()));
    }
    let scale = (1u64 << 30) as i128;
    let counts = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<(u64, u64), Error> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let entries = (0..n * m).map(|_| rat(rng.random_range(0..scale), scale)).collect();
            let x = PointMatrix::new(n, m, entries)?;
            let mut q: Vec<i64> = (0..n).map(|_| rng.random_range(-(q_bound as i64)..=q_bound as i64)).collect();
            if q.iter().all(|&c| c == 0) {
                q[0] = 1;
            }
            let psi_q = psi.value(&q);
            if psi_q.is_zero() {
                return Ok((0, 0));
            }
            // Least k with max_j |q x_j - p_j - y_j| < k Psi(q).
            let mut worst = Rational::zero();
            for j in 0..m {
                let qx: Rational = q.iter().enumerate().map(|(r, &qi)| Rational::integer(qi as i128) * x.get(r, j)).sum();
                let z = qx - rat(a[j] as i128, b as i128);
                let p = Rational::from(z.round_half_down());
                worst = worst.max((z - p).abs());
            }
            let k = Rational::from((&worst / &psi_q).floor()) + Rational::one();
            match invariance_step(&x, &q, a, b, &k, &psi_q)? {
                Some(true) => Ok((1, 0)),
                Some(false) => Ok((1, 1)),
                None => Ok((0, 0)),
            }
        })
        .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))?;
    Ok(InvarianceReport { samples, premises: counts.0, violations: counts.1 })
}

/// Monte Carlo estimate of `|S_q ∩ S_r|` as `(hits, samples)`.
pub fn pair_intersection_estimate(sq: &SetSpec, sr: &SetSpec, samples: u64, seed: u64) -> Result<(u64, u64), Error> {
    if sq.n != sr.n || sq.m != sr.m {
        return Err(Error::MixedFamilies("sets live in different dimensions".into()));
    }
    let dim = sq.n * sq.m;
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<u64, Error> {
            let x = PointMatrix::new(sq.n, sq.m, sample_point(seed, i, dim))?;
            Ok(u64::from(membership_f64(&x, sq)? && membership_f64(&x, sr)?))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok((hits, samples))
}
