//! One function per subcommand. Each returns its rows and whether every
//! check passed.

use std::path::Path;

use kg_core::analysis::{
    closed_form_for_spec, disjointness_check, gallagher_overlap_sum, qia_sweep, Family,
};
use kg_core::dichotomy::{dichotomy_experiment, DichotomyOptions, Diagnosis};
use kg_core::dirichlet::dirichlet_pair;
use kg_core::pins::Pins;
use kg_core::sets::{build_interval_set, SetSpec};
use kg_core::verify::{calibrate, run_all};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{
    CriterionRow, DichotomyRow, DisjointnessRow, GallagherRow, MeasureRow, PairRow, QiaRow, Results, Status,
};

pub struct Outcome {
    pub results: Results,
    pub passed: bool,
    /// Human-readable lines for stderr.
    pub lines: Vec<String>,
}

impl Outcome {
    fn new(results: Results, passed: bool) -> Self {
        Outcome { results, passed, lines: Vec::new() }
    }
}

pub fn dirichlet_pairs(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let y = cfg.scalar_target()?;
    let mut rows = Vec::new();
    for d in cfg.moduli.from..=cfg.moduli.to {
        let p = dirichlet_pair(&y, d as i64)?;
        rows.push(PairRow { d, a: p.a, b: p.b, error: p.error(&y), valid: p.is_valid_for(&y) });
    }
    let passed = rows.iter().all(|r| r.valid);
    Ok(Outcome::new(Results::DirichletPairs(rows), passed))
}

pub fn measure(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    cfg.scalar_target()?;
    let mut rows = Vec::new();
    for d in cfg.moduli.from..=cfg.moduli.to {
        for delta in &cfg.radii {
            let spec = SetSpec::new(1, 1, cfg.variant, vec![d as i64], delta.clone(), cfg.target.clone())?;
            let closed_form = closed_form_for_spec(&spec)?;
            let oracle = build_interval_set(&spec)?.measure();
            rows.push(MeasureRow {
                d: d as i64,
                delta: delta.clone(),
                variant: cfg.variant.name().to_string(),
                equal: closed_form == oracle,
                closed_form,
                oracle,
            });
        }
    }
    let passed = rows.iter().all(|r| r.equal);
    Ok(Outcome::new(Results::Measure(rows), passed))
}

pub fn qia(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    if cfg.dimension.n != 2 || cfg.dimension.m != 1 {
        return Err(CliError::config("qia needs (n, m) = (2, 1)"));
    }
    if cfg.cutoffs.is_empty() {
        return Err(CliError::config("qia needs at least one cutoff"));
    }
    cfg.validate_qia()?;
    let top = *cfg.cutoffs.last().expect("nonempty");
    let family = Family::new(cfg.variant, cfg.psi.resolve()?, &cfg.target, top)?;
    let rows: Vec<QiaRow> = qia_sweep(&family, &cfg.cutoffs)?
        .into_iter()
        .map(|r| QiaRow {
            q: r.q_max,
            s2: r.s2(),
            ratio_approx: r.ratio.to_decimal(9),
            pass: r.disjointness_violations == 0,
            s1: r.s1,
            ratio: r.ratio,
            disjointness_violations: r.disjointness_violations,
            step2_lhs: r.step2_lhs,
            step2_rhs: r.step2_rhs,
            step3_lhs: r.step3_lhs,
            step3_rhs: r.step3_rhs,
            degenerate: r.degenerate,
        })
        .collect();
    let passed = rows.iter().all(|r| r.pass);
    Ok(Outcome::new(Results::Qia(rows), passed))
}

pub fn disjointness(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let y = cfg.scalar_target()?;
    let psi = cfg.psi.resolve()?;
    let mut rows = Vec::new();
    for t in &cfg.tuples {
        let rep = disjointness_check(t.d, t.e, t.q, t.r, &psi, &y)?;
        let status = if !rep.hypotheses_hold() {
            Status::Warning
        } else if rep.measure.is_zero() {
            Status::Pass
        } else {
            Status::Fail
        };
        rows.push(DisjointnessRow {
            d: rep.d,
            e: rep.e,
            q: rep.q,
            r: rep.r,
            y: rep.y,
            measure: rep.measure,
            violations: rep.violations.join("; "),
            status,
        });
    }
    let passed = rows.iter().all(|r| r.status != Status::Fail);
    Ok(Outcome::new(Results::Disjointness(rows), passed))
}

pub fn gallagher(cfg: &ExperimentConfig, pins: &Pins) -> Result<Outcome, CliError> {
    let constant = &pins.audits.gallagher;
    let mut rows = Vec::new();
    for c in &cfg.gallagher {
        let sum = gallagher_overlap_sum(&c.a, &c.b, c.m)?;
        let rhs = (&c.a * &c.b).pow(c.m as i32);
        rows.push(GallagherRow {
            pass: sum <= constant * &rhs,
            a: c.a.clone(),
            b: c.b.clone(),
            m: c.m,
            sum,
            rhs,
            constant: constant.clone(),
        });
    }
    let passed = rows.iter().all(|r| r.pass);
    Ok(Outcome::new(Results::Gallagher(rows), passed))
}

pub fn dichotomy(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    if cfg.dimension.m != 1 {
        return Err(CliError::config("dichotomy needs m = 1"));
    }
    let top = cfg
        .schedule
        .iter()
        .map(|w| w.1)
        .max()
        .ok_or_else(|| CliError::config("dichotomy needs a nonempty schedule"))?;
    let family = Family::new(cfg.variant, cfg.psi.resolve()?, &cfg.target, top)?;
    let opts = DichotomyOptions { n: cfg.dimension.n, samples: cfg.samples, seed: cfg.seed, floors: cfg.floors };
    let report = dichotomy_experiment(&family, &cfg.schedule, &opts)?;
    let rows = report
        .rows
        .iter()
        .map(|r| DichotomyRow {
            q0: r.tail.q0,
            q1: r.tail.q1,
            samples: r.tail.samples,
            hits: r.tail.hits,
            estimate: r.tail.estimate,
            stderr: r.tail.stderr,
            tail_bound: r.tail_bound.clone(),
            floor: r.floor.clone(),
            pass: if report.converges { r.under_ceiling(3.0) } else { r.over_floor(3.0) },
        })
        .collect();
    let mut out = Outcome::new(Results::Dichotomy(rows), report.diagnosis != Diagnosis::Inconsistent);
    out.lines.push(format!(
        "psi {}: series {}, diagnosis {:?}",
        report.psi,
        if report.converges { "converges" } else { "diverges" },
        report.diagnosis
    ));
    Ok(out)
}

/// Runs every criterion; with `recalibrate`, first regenerates the pins and
/// writes them to `pins_path`.
pub fn verify_suite(cfg: &ExperimentConfig, pins: Pins, recalibrate: bool, pins_path: &Path) -> Result<Outcome, CliError> {
    let pins = if recalibrate {
        let fresh = calibrate()?;
        std::fs::write(pins_path, fresh.to_toml()?)
            .map_err(|e| CliError::io(format!("{}: {e}", pins_path.display())))?;
        fresh
    } else {
        pins
    };
    let results = run_all(&pins, cfg.profile)?;
    let lines = results.iter().map(|r| r.line()).collect();
    let passed = results.iter().all(|r| r.passed);
    let rows = results
        .into_iter()
        .map(|r| CriterionRow { id: r.id, name: r.name, passed: r.passed, detail: r.detail })
        .collect();
    Ok(Outcome { results: Results::VerifySuite(rows), passed, lines })
}
