//! The verification suite: one check per acceptance criterion, the frozen
//! grids they run on, and the calibration that produces the pins.

use std::time::Instant;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    basic_bound_audit, closed_form_for_spec, disjointness_check, disjointness_measure_by_unions,
    gallagher_overlap_sum, local_density_check, qia_ratio, qia_sweep, rational_pair_audit,
    step_bounds_audit, Family, Window,
};
use crate::arith::{count_vectors_with_gcd, divisors, parallel, rat, Rational};
use crate::dichotomy::{
    dichotomy_experiment, exact_window_measure, pair_intersection_estimate, proportion,
    tail_union_estimate, zero_one_invariance_sample, DichotomyOptions,
};
use crate::dirichlet::{dirichlet_pair, e_minus_2_surrogate, sqrt2_minus_1_surrogate, DirichletTable, TargetScheme};
use crate::pins::{digest, AuditConstants, DichotomyPins, Pins, QiaPin, StepPins};
use crate::sets::{build_interval_set, ApproxFunction, ArcFamily, MultiPsi, SetSpec, Variant};
use crate::Error;

/// Problem sizes: `Full` runs the acceptance sizes, `Quick` a reduced set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Quick,
    Full,
}

impl Profile {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Profile::Quick => quick,
            Profile::Full => full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {}: {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "measure formula"),
    (2, "disjointness"),
    (3, "dirichlet pairs"),
    (4, "qia hand value"),
    (5, "qia stability"),
    (6, "inequality audits"),
    (7, "local density"),
    (8, "dichotomy"),
    (9, "zero-one invariance"),
    (10, "exact cross-checks"),
];

/// Runs one criterion.
pub fn run_criterion(id: u8, pins: &Pins, profile: Profile) -> Result<CriterionResult, Error> {
    let start = Instant::now();
    let (passed, detail) = match id {
        1 => measure_formula(profile)?,
        2 => disjointness(profile)?,
        3 => dirichlet_pairs(profile)?,
        4 => qia_hand_value()?,
        5 => qia_stability(pins, profile)?,
        6 => audits(pins, profile)?,
        7 => local_density(profile)?,
        8 => dichotomy(pins, profile)?,
        9 => zero_one(profile)?,
        10 => cross_checks(profile)?,
        _ => return Err(Error::InvalidSpec(format!("no criterion {id}"))),
    };
    let name = CRITERIA[id as usize - 1].1.to_string();
    Ok(CriterionResult { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() })
}

pub fn run_all(pins: &Pins, profile: Profile) -> Result<Vec<CriterionResult>, Error> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, pins, profile)).collect()
}

fn scalar_targets() -> Vec<Rational> {
    vec![rat(0, 1), rat(1, 3), rat(2, 7), rat(5, 12)]
}

/// Targets for the QIA and disjointness grids.
pub fn qia_targets() -> Vec<Rational> {
    vec![rat(0, 1), rat(1, 3), rat(2, 7), sqrt2_minus_1_surrogate(800)]
}

fn qia_cutoffs(profile: Profile) -> Vec<u64> {
    profile.pick(vec![100, 200], vec![100, 200, 400, 800])
}

fn qia_psi() -> ApproxFunction {
    ApproxFunction::preset("quarter_inverse_capped").expect("preset")
}

fn fixed_pair_of(y: &Rational) -> TargetScheme {
    let (u, v) = y.to_i128_parts().expect("small target");
    TargetScheme::fixed_pair(vec![u as i64], v as u64).expect("reduced target")
}

fn measure_formula(profile: Profile) -> Result<(bool, String), Error> {
    let d_max = profile.pick(60, 200);
    let radii = [rat(1, 10), rat(1, 7), rat(3, 8)];
    let mut cases = Vec::new();
    for d in 1..=d_max {
        for delta in &radii {
            for y in scalar_targets() {
                cases.push((d, delta.clone(), Variant::Tilde, TargetScheme::scalar(y.clone())));
                cases.push((d, delta.clone(), Variant::FixedPair, fixed_pair_of(&y)));
            }
        }
    }
    let mismatches = cases
        .par_iter()
        .map(|(d, delta, variant, target)| -> Result<u64, Error> {
            let spec = SetSpec::new(1, 1, *variant, vec![*d], delta.clone(), target.clone())?;
            Ok(u64::from(closed_form_for_spec(&spec)? != build_interval_set(&spec)?.measure()))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok((mismatches == 0, format!("{} cases, {mismatches} mismatches", cases.len())))
}

/// `(d, e)` with `1 <= |e| < d <= 12` and `gcd(d, e) >= 3`.
pub fn disjointness_pairs() -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for d in 1..=12i64 {
        for e in 1..d {
            if d.gcd(&e) >= 3 {
                out.push((d, e));
                out.push((d, -e));
            }
        }
    }
    out
}

fn disjointness(profile: Profile) -> Result<(bool, String), Error> {
    let psis = [
        ApproxFunction::capped(rat(1, 1), rat(1, 1)).with_ceiling(rat(1, 4)),
        qia_psi(),
    ];
    let mut targets = qia_targets();
    targets.push(rat(1, 7));
    targets.push(e_minus_2_surrogate(1000));
    let step = profile.pick(5, 1);
    let mut tuples = Vec::new();
    for (d, e) in disjointness_pairs() {
        let r0 = 2 * (d * d) as u64;
        for r in (r0..=r0 + 50).step_by(step) {
            for q in (r + 1..=r + 50).step_by(step) {
                tuples.push((d, e, q, r));
            }
        }
    }
    let total = tuples.len() * psis.len() * targets.len();
    let (bad, hyp, unions) = tuples
        .par_iter()
        .enumerate()
        .map(|(i, &(d, e, q, r))| -> Result<(u64, u64, u64), Error> {
            let (mut bad, mut hyp, mut unions) = (0, 0, 0);
            for psi in &psis {
                for y in &targets {
                    let rep = disjointness_check(d, e, q, r, psi, y)?;
                    hyp += u64::from(!rep.hypotheses_hold());
                    bad += u64::from(!rep.measure.is_zero());
                    // Independent interval-union route on a sparse subgrid.
                    if i % 23 == 0 {
                        unions += 1;
                        bad += u64::from(!disjointness_measure_by_unions(d, e, q, r, psi, y)?.is_zero());
                    }
                }
            }
            Ok((bad, hyp, unions))
        })
        .try_reduce(|| (0, 0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2)))?;
    Ok((
        bad == 0 && hyp == 0 && total >= 500,
        format!("{total} tuples ({unions} also by unions), {bad} nonzero measures, {hyp} hypothesis failures"),
    ))
}

fn dirichlet_pairs(profile: Profile) -> Result<(bool, String), Error> {
    let d_max = profile.pick(2000, 10_000);
    let mut targets = scalar_targets();
    targets.push(sqrt2_minus_1_surrogate(800));
    targets.push(e_minus_2_surrogate(1000));
    let mut bad = 0u64;
    let mut direct = 0u64;
    for y in &targets {
        let table = DirichletTable::build(y, d_max)?;
        for d in 1..=d_max as i64 {
            let pair = table.get(d).expect("within table");
            bad += u64::from(!pair.is_valid_for(y));
            if y.is_zero() {
                bad += u64::from((pair.a, pair.b) != (0, 1));
            }
            // Direct scan as a second route on the first 1000 moduli.
            if d <= 1000 {
                direct += 1;
                bad += u64::from(dirichlet_pair(y, d)? != pair);
            }
        }
    }
    Ok((
        bad == 0,
        format!("{} targets x d <= {d_max} ({direct} also by direct scan), {bad} failures", targets.len()),
    ))
}

fn qia_hand_value() -> Result<(bool, String), Error> {
    let psi = ApproxFunction::preset("quarter_inverse").expect("preset");
    let r = qia_ratio(&psi, &TargetScheme::scalar(rat(0, 1)), Variant::Coprime, 1)?;
    let ok = r.s1 == rat(4, 1) && r.s2() == rat(20, 1) && r.ratio == rat(4, 5);
    Ok((ok, format!("S1 = {}, S2 = {}, ratio = {}", r.s1, r.s2(), r.ratio)))
}

fn qia_stability(pins: &Pins, profile: Profile) -> Result<(bool, String), Error> {
    let cutoffs = qia_cutoffs(profile);
    let mut ok = true;
    let mut lowest: Option<Rational> = None;
    let mut missing = 0;
    for y in qia_targets() {
        let fam = Family::new(Variant::Tilde, qia_psi(), &TargetScheme::scalar(y.clone()), *cutoffs.last().expect("nonempty"))?;
        for r in qia_sweep(&fam, &cutoffs)? {
            ok &= r.disjointness_violations == 0 && r.diagonal == r.s1;
            match pins.qia_pin(&y, r.q_max) {
                Some(pin) => ok &= r.ratio >= pin.floor && digest(&r.ratio) == pin.sha256,
                None => {
                    missing += 1;
                    ok = false;
                }
            }
            lowest = Some(lowest.map_or(r.ratio.clone(), |l| l.min(r.ratio.clone())));
        }
    }
    let lowest = lowest.map_or("-".into(), |l| l.to_decimal(6));
    Ok((ok, format!("4 targets x Q in {cutoffs:?}, lowest ratio {lowest}, {missing} unpinned")))
}

/// Maxima of `lhs / rhs` over each audit grid.
pub fn audit_constants(profile: Profile) -> Result<AuditConstants, Error> {
    let max = |a: Option<Rational>, b: Option<Rational>| match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    };

    let radii = [rat(1, 100), rat(1, 10), rat(1, 7), rat(3, 8)];
    let span = profile.pick(12, 30i64);
    let ds: Vec<i64> = (-span..=span).filter(|&d| d != 0).collect();
    let basic = ds
        .par_iter()
        .map(|&d| -> Result<Option<Rational>, Error> {
            let mut best = None;
            for &e in &ds {
                for y in qia_targets() {
                    for d1 in &radii {
                        for d2 in &radii {
                            best = max(best, basic_bound_audit(d, e, d1, d2, &y)?.ratio());
                        }
                    }
                }
            }
            Ok(best)
        })
        .try_reduce(|| None, |a, b| Ok(max(a, b)))?;

    let psi = qia_psi();
    let q_top = profile.pick(300, 1000);
    let (step2, step3) = (1..=q_top)
        .into_par_iter()
        .map(|q| -> Result<(Option<Rational>, Option<Rational>), Error> {
            let a = step_bounds_audit(q, &psi)?;
            Ok((a.step2.ratio(), a.step3.ratio()))
        })
        .try_reduce(|| (None, None), |a, b| Ok((max(a.0, b.0), max(a.1, b.1))))?;

    let mut gallagher = None;
    for i in 1..=16 {
        for j in 1..=16 {
            let (a, b) = (rat(i, 8), rat(j, 8));
            for m in 1..=2 {
                let s = gallagher_overlap_sum(&a, &b, m)?;
                gallagher = max(gallagher, Some(s / (&a * &b).pow(m as i32)));
            }
        }
    }

    let pairs = [(0i64, 1u64), (1, 3), (2, 5), (3, 7)];
    let deltas = [rat(1, 50), rat(1, 10), rat(1, 7), rat(3, 8)];
    let q_top = profile.pick(20, 40i64);
    let rational = (2..=q_top)
        .into_par_iter()
        .map(|q| -> Result<Option<Rational>, Error> {
            let mut best = None;
            for r in (1 - q..q).filter(|&r| r != 0) {
                for &(a, b) in &pairs {
                    for d1 in &deltas {
                        for d2 in &deltas {
                            best = max(best, rational_pair_audit(q, r, d1, d2, a, b)?.ratio());
                        }
                    }
                }
            }
            Ok(best)
        })
        .try_reduce(|| None, |a, b| Ok(max(a, b)))?;

    let need = |x: Option<Rational>| x.ok_or_else(|| Error::InvalidSpec("empty audit grid".into()));
    Ok(AuditConstants {
        basic_bound: need(basic)?,
        step2: need(step2)?,
        step3: need(step3)?,
        gallagher: need(gallagher)?,
        rational_pair: need(rational)?,
    })
}

fn audits(pins: &Pins, profile: Profile) -> Result<(bool, String), Error> {
    let found = audit_constants(profile)?;
    let pinned = &pins.audits;
    let pairs = [
        ("basic", &found.basic_bound, &pinned.basic_bound),
        ("step2", &found.step2, &pinned.step2),
        ("step3", &found.step3, &pinned.step3),
        ("gallagher", &found.gallagher, &pinned.gallagher),
        ("rational", &found.rational_pair, &pinned.rational_pair),
    ];
    // The full grids must reproduce the pins exactly; the quick grids are
    // subsets, so their maxima can only be lower.
    let mut ok = pairs.iter().all(|(_, f, p)| match profile {
        Profile::Full => f == p,
        Profile::Quick => f <= p,
    });
    let t = rat(3, 4);
    ok &= gallagher_overlap_sum(&t, &t, 1)? == rat(1, 1) && gallagher_overlap_sum(&t, &t, 2)? == rat(4, 1);
    let psi = qia_psi();
    let s = step_bounds_audit(pins.steps.q, &psi)?;
    ok &= s.step2.lhs == pins.steps.step2_lhs && s.step3.lhs == pins.steps.step3_lhs;
    let detail = pairs
        .iter()
        .map(|(n, f, _)| format!("{n} C = {}", f.to_decimal(4)))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((ok, detail))
}

/// Outcome of the local density grid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub cases: u64,
    pub explicit_cases: u64,
    pub explicit_failures: u64,
    pub literal_cases: u64,
    pub literal_failures: u64,
    pub full_window_failures: u64,
}

pub fn local_density_grid(profile: Profile) -> Result<DensitySummary, Error> {
    let d_max = profile.pick(60, 200i64);
    let radii = [rat(1, 10), rat(1, 7), rat(3, 8)];
    let mut windows = vec![Window::Ball { center: rat(0, 1), radius: rat(1, 2) }];
    for c in [rat(0, 1), rat(1, 3), rat(5, 7)] {
        for r in [rat(1, 4), rat(1, 10), rat(1, 40)] {
            windows.push(Window::Ball { center: c.clone(), radius: r });
        }
    }
    (1..=d_max)
        .into_par_iter()
        .map(|d| -> Result<DensitySummary, Error> {
            let mut s = DensitySummary::default();
            for y in qia_targets() {
                let pair = dirichlet_pair(&y, d)?;
                for delta in &radii {
                    let fam = ArcFamily::new(d, delta.clone(), y.clone(), Some((pair.a, pair.b)))?;
                    for w in &windows {
                        let r = local_density_check(&fam, w)?;
                        let fail = u64::from(!r.holds());
                        s.cases += 1;
                        if w.radius() == Some(&rat(1, 2)) {
                            s.full_window_failures += fail;
                        }
                        if r.explicit_threshold {
                            s.explicit_cases += 1;
                            s.explicit_failures += fail;
                        }
                        if r.literal_threshold {
                            s.literal_cases += 1;
                            s.literal_failures += fail;
                        }
                    }
                }
            }
            Ok(s)
        })
        .try_reduce(DensitySummary::default, |a, b| {
            Ok(DensitySummary {
                cases: a.cases + b.cases,
                explicit_cases: a.explicit_cases + b.explicit_cases,
                explicit_failures: a.explicit_failures + b.explicit_failures,
                literal_cases: a.literal_cases + b.literal_cases,
                literal_failures: a.literal_failures + b.literal_failures,
                full_window_failures: a.full_window_failures + b.full_window_failures,
            })
        })
}

fn local_density(profile: Profile) -> Result<(bool, String), Error> {
    let fam = ArcFamily::new(12, rat(1, 10), rat(0, 1), Some((0, 1)))?;
    let hand = local_density_check(&fam, &Window::Ball { center: rat(1, 4), radius: rat(1, 4) })?;
    let hand_ok = hand.lhs == rat(1, 30) && hand.rhs == rat(1, 120);
    let s = local_density_grid(profile)?;
    let ok = hand_ok && s.explicit_cases > 0 && s.explicit_failures == 0 && s.full_window_failures == 0;
    Ok((
        ok,
        format!(
            "hand case {} >= {}; {} cases, {} above the explicit threshold with {} failures; \
             literal |d| >= 1/radius threshold: {} cases, {} failures (not asserted)",
            hand.lhs, hand.rhs, s.cases, s.explicit_cases, s.explicit_failures, s.literal_cases, s.literal_failures
        ),
    ))
}

/// The divergent-window estimates `(plain, tilde)` at the given size.
pub fn divergent_window(samples: u64, seed: u64) -> Result<(u64, u64), Error> {
    let psi = ApproxFunction::preset("half_inverse_capped").expect("preset");
    let target = TargetScheme::scalar(rat(1, 3));
    let mut hits = [0; 2];
    for (i, variant) in [Variant::Plain, Variant::Tilde].into_iter().enumerate() {
        let fam = Family::new(variant, psi.clone(), &target, 1000)?;
        hits[i] = tail_union_estimate(&fam, 2, 100, 1000, samples, seed)?.hits;
    }
    Ok((hits[0], hits[1]))
}

fn dichotomy(pins: &Pins, profile: Profile) -> Result<(bool, String), Error> {
    let mut ok = true;
    let samples = profile.pick(2000, 10_000);
    let conv = Family::new(Variant::Plain, ApproxFunction::preset("power_2_2").expect("preset"), &TargetScheme::scalar(rat(1, 3)), 400)?;
    let opts = DichotomyOptions { n: 2, samples, seed: 11, floors: false };
    let conv = dichotomy_experiment(&conv, &[(10, 400), (25, 400), (50, 400), (100, 400)], &opts)?;
    ok &= conv.converges && conv.rows.iter().all(|r| r.under_ceiling(3.0));
    let sparse = Family::new(Variant::Plain, ApproxFunction::preset("dyadic_sparse").expect("preset"), &TargetScheme::scalar(rat(1, 3)), 1024)?;
    let sparse = dichotomy_experiment(&sparse, &[(1, 1024), (16, 1024), (256, 1024)], &opts)?;
    ok &= sparse.converges && sparse.rows.iter().all(|r| r.under_ceiling(3.0));

    let pin = &pins.dichotomy;
    let samples = profile.pick(10_000, pin.samples);
    let (plain, tilde) = divergent_window(samples, pin.seed)?;
    let (p_plain, _) = proportion(plain, samples);
    let (p_tilde, _) = proportion(tilde, samples);
    let floor = pin.floor.to_f64();
    ok &= p_plain >= floor && p_tilde >= floor;
    if profile == Profile::Full {
        ok &= plain == pin.plain_hits && tilde == pin.tilde_hits;
    }
    let last = |r: &crate::dichotomy::DichotomyReport| {
        let row = r.rows.last().expect("nonempty");
        format!("{:.4} <= {:.4}", row.tail.estimate, row.tail_bound.to_f64())
    };
    Ok((
        ok,
        format!(
            "q^-2.2 tail {}; dyadic tail {}; divergent [100, 1000] plain {p_plain:.4}, tilde {p_tilde:.4} >= {floor}",
            last(&conv),
            last(&sparse)
        ),
    ))
}

/// `(a, b)` targets for the invariance check; the last two have `m = 2`.
pub fn invariance_targets() -> Vec<(Vec<i64>, u64)> {
    vec![(vec![0], 1), (vec![1], 3), (vec![2], 7), (vec![1, 2], 5), (vec![3, 1], 4)]
}

fn zero_one(profile: Profile) -> Result<(bool, String), Error> {
    let samples = profile.pick(1000, 10_000);
    let psi = MultiPsi::new(rat(1, 4), vec![rat(1, 1), rat(1, 2)])?;
    let mut violations = 0;
    let mut premises = 0;
    for (i, (a, b)) in invariance_targets().into_iter().enumerate() {
        let r = zero_one_invariance_sample(&a, b, &psi, 2, samples, 100 + i as u64, 1000)?;
        violations += r.violations;
        premises += r.premises;
    }
    Ok((violations == 0, format!("5 targets x {samples} samples, {premises} premises, {violations} violations")))
}

/// The `(1, 1)` windows with exact union measures.
pub fn exact_windows() -> Result<Vec<(Family, u64, u64)>, Error> {
    let get = |n: &str| ApproxFunction::preset(n).expect("preset");
    let table = ApproxFunction::table(vec![rat(1, 8), rat(1, 16)]);
    let fams = [
        (Variant::Plain, table, rat(0, 1), 1, 2),
        (Variant::Plain, get("quarter_inverse"), rat(1, 3), 1, 10),
        (Variant::Tilde, get("quarter_inverse_capped"), rat(2, 7), 5, 40),
        (Variant::Coprime, get("half_inverse_capped"), rat(0, 1), 3, 30),
    ];
    fams.into_iter()
        .map(|(v, psi, y, q0, q1)| Ok((Family::new(v, psi, &TargetScheme::scalar(y), q1)?, q0, q1)))
        .collect()
}

/// Seeded non-parallel plain pairs in `(2, 1)`.
pub fn product_rule_pairs(count: usize) -> Result<Vec<(SetSpec, SetSpec)>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let target = TargetScheme::scalar(rat(1, 3));
    let mut out = Vec::new();
    while out.len() < count {
        let q: Vec<i64> = (0..2).map(|_| rng.random_range(-12..=12)).collect();
        let r: Vec<i64> = (0..2).map(|_| rng.random_range(-12..=12)).collect();
        if q.iter().all(|&c| c == 0) || r.iter().all(|&c| c == 0) || parallel(&q, &r) {
            continue;
        }
        out.push((
            SetSpec::new(2, 1, Variant::Plain, q, rat(1, 5), target.clone())?,
            SetSpec::new(2, 1, Variant::Plain, r, rat(1, 7), target.clone())?,
        ));
    }
    Ok(out)
}

fn cross_checks(profile: Profile) -> Result<(bool, String), Error> {
    let reps = profile.pick(5, 20);
    let samples = profile.pick(4000, 10_000);
    let mut window_fail = 0;
    let mut window_runs = 0;
    for (fam, q0, q1) in exact_windows()? {
        let exact = exact_window_measure(&fam, q0, q1)?.to_f64();
        for rep in 0..reps {
            let t = tail_union_estimate(&fam, 1, q0, q1, samples, 500 + rep)?;
            window_runs += 1;
            window_fail += u64::from((t.estimate - exact).abs() > 4.0 * t.stderr);
        }
    }
    let pair_samples = profile.pick(20_000, 100_000);
    let mut pair_fail = 0;
    let pairs = product_rule_pairs(20)?;
    for (i, (a, b)) in pairs.iter().enumerate() {
        let (hits, n) = pair_intersection_estimate(a, b, pair_samples, 700 + i as u64)?;
        let (p, se) = proportion(hits, n);
        let product = (rat(4, 1) * &a.delta * &b.delta).to_f64();
        pair_fail += u64::from((p - product).abs() > 3.0 * se);
    }
    let mut count_fail = 0;
    for s in 1..=200u64 {
        let total: u64 = divisors(s).into_iter().map(|d| count_vectors_with_gcd(s, d, 2)).sum::<Result<u64, Error>>()?;
        count_fail += u64::from(total != 8 * s);
    }
    Ok((
        window_fail == 0 && pair_fail == 0 && count_fail == 0,
        format!(
            "{window_runs} window runs ({window_fail} outside 4 se), {} product pairs ({pair_fail} outside 3 se), \
             counting identity s <= 200 ({count_fail} failures)",
            pairs.len()
        ),
    ))
}

/// Recomputes every pin from oracle runs at full size.
pub fn calibrate() -> Result<Pins, Error> {
    let audits = audit_constants(Profile::Full)?;
    let psi = qia_psi();
    let steps = {
        let a = step_bounds_audit(360, &psi)?;
        StepPins { q: 360, step2_lhs: a.step2.lhs, step3_lhs: a.step3.lhs }
    };
    let cutoffs = qia_cutoffs(Profile::Full);
    let mut qia = Vec::new();
    for y in qia_targets() {
        let fam = Family::new(Variant::Tilde, psi.clone(), &TargetScheme::scalar(y.clone()), *cutoffs.last().expect("nonempty"))?;
        for r in qia_sweep(&fam, &cutoffs)? {
            let floor = Rational::from((&r.ratio * &rat(1000, 1)).floor()) / rat(1000, 1);
            qia.push(QiaPin {
                target: y.clone(),
                q: r.q_max,
                floor,
                approx: r.ratio.to_decimal(9),
                sha256: digest(&r.ratio),
            });
        }
    }
    let (samples, seed) = (100_000, 1);
    let (plain_hits, tilde_hits) = divergent_window(samples, seed)?;
    Ok(Pins {
        audits,
        steps,
        dichotomy: DichotomyPins { samples, seed, plain_hits, tilde_hits, floor: rat(19, 20) },
        qia,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_have_the_stated_sizes() {
        assert_eq!(disjointness_pairs().len(), 20);
        assert!(disjointness_pairs().iter().all(|&(d, e)| d.gcd(&e) >= 3 && e.abs() < d));
        assert_eq!(product_rule_pairs(20).unwrap().len(), 20);
        assert_eq!(invariance_targets().len(), 5);
        assert_eq!(exact_windows().unwrap().len(), 4);
    }

    #[test]
    fn quick_criteria_pass_on_shipped_pins() {
        let pins = Pins::shipped().unwrap();
        for id in [1, 3, 4, 9] {
            let r = run_criterion(id, &pins, Profile::Quick).unwrap();
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn unknown_criterion_is_an_error() {
        assert!(run_criterion(11, &Pins::shipped().unwrap(), Profile::Quick).is_err());
    }
}
