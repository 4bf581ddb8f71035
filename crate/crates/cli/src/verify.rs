//! The self-verification suite: seven criteria, each a group of checks with
//! a wall-clock budget.

use crate::commands;
use crate::config::RunConfig;
use crate::oracle::rayleigh_schrodinger;
use late_terms_core::analysis::{growth_sequence, oscillation_residual, oscillation_table, ratio_sequence, richardson_exact, slope_fit};
use late_terms_core::asymptotics::model_for;
use late_terms_core::numerics::{gamma_half_ratio, DEFAULT_PRECISION};
use late_terms_core::problems::PROBLEM_IDS;
use late_terms_core::{compute_series, BigFloat, EigenSeries, ProblemKind, ProblemSpec, Rational};
use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

const E: f64 = std::f64::consts::E;
const TWO_POLE_SETS: [(i64, i64); 3] = [(1, 1), (1, 3), (3, 1)];

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Restrict to checks about one problem id.
    pub only: Option<String>,
    pub precision_bits: u32,
    /// Corrupts the black-hole first-order coefficient before it is
    /// compared, to exercise the failure path.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { only: None, precision_bits: DEFAULT_PRECISION, inject_fault: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub passed: bool,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub outcome: Outcome,
    pub elapsed: Duration,
    pub budget: Duration,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    pub fn passed(&self) -> bool {
        self.outcome != Outcome::Fail
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skipped => "SKIP",
        };
        write!(
            f,
            "{tag} criterion {}: {} ({:.3} s, budget {} s)",
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )?;
        for c in &self.checks {
            write!(f, "\n    [{}] {}", if c.passed { "ok" } else { "FAILED" }, c.message)?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown problem `{0}` for --only; valid ids are {ids}", ids = PROBLEM_IDS.join(", "))]
pub struct UnknownProblem(pub String);

struct Ctx<'a> {
    opts: &'a VerifyOptions,
    checks: Vec<Check>,
}

impl Ctx<'_> {
    fn wants(&self, problem: &str) -> bool {
        self.opts.only.as_deref().is_none_or(|p| p == problem)
    }

    /// Problem-independent checks run only without a filter.
    fn wants_generic(&self) -> bool {
        self.opts.only.is_none()
    }

    fn prec(&self) -> u32 {
        self.opts.precision_bits
    }

    fn check(&mut self, passed: bool, message: impl Into<String>) {
        self.checks.push(Check { passed, message: message.into() });
    }

    fn exact(&mut self, label: &str, got: &Rational, expected: &Rational) {
        if got == expected {
            self.check(true, format!("{label} = {got}"));
        } else {
            self.check(false, format!("exact mismatch: {label} = {got}, expected {expected}"));
        }
    }

    fn fail(&mut self, label: &str, err: impl fmt::Display) {
        self.check(false, format!("{label}: {err}"));
    }
}

fn two_pole(b: i64, c: i64) -> ProblemKind {
    ProblemKind::TwoPole { b: Rational::from(b), c: Rational::from(c) }
}

fn series(kind: &ProblemKind, n_max: u32) -> late_terms_core::Result<EigenSeries> {
    compute_series(&ProblemSpec::new(kind.clone(), n_max)?)
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn dist1(x: &BigFloat) -> f64 {
    (x.to_f64() - 1.0).abs()
}

type Body = fn(&mut Ctx) -> late_terms_core::Result<()>;

const CRITERIA: [(u32, &str, u64, Body); 7] = [
    (1, "exact low-order regressions", 1, criterion_regressions),
    (2, "anharmonic Rayleigh-Schrödinger oracle", 1, criterion_rs_oracle),
    (3, "anharmonic late terms", 10, criterion_anharmonic_late),
    (4, "black-hole and Rossby late terms", 60, criterion_slow_late),
    (5, "two-pole oscillation residual", 60, criterion_oscillation),
    (6, "growth slopes", 60, criterion_growth),
    (7, "property suites", 30, criterion_properties),
];

pub fn run(opts: &VerifyOptions) -> Result<Vec<CriterionReport>, UnknownProblem> {
    if let Some(p) = &opts.only {
        if !PROBLEM_IDS.contains(&p.as_str()) {
            return Err(UnknownProblem(p.clone()));
        }
    }
    Ok(CRITERIA.iter().map(|&(id, title, secs, body)| run_one(opts, id, title, secs, body)).collect())
}

fn run_one(opts: &VerifyOptions, id: u32, title: &'static str, secs: u64, body: Body) -> CriterionReport {
    let budget = Duration::from_secs(secs);
    let mut ctx = Ctx { opts, checks: Vec::new() };
    let start = Instant::now();
    if let Err(e) = body(&mut ctx) {
        ctx.fail("error", e);
    }
    let elapsed = start.elapsed();
    let mut checks = ctx.checks;
    let outcome = if checks.is_empty() {
        Outcome::Skipped
    } else {
        if elapsed > budget {
            checks.push(Check { passed: false, message: format!("runtime {:.3} s exceeds {secs} s", elapsed.as_secs_f64()) });
        }
        if checks.iter().all(|c| c.passed) { Outcome::Pass } else { Outcome::Fail }
    };
    CriterionReport { id, title, outcome, elapsed, budget, checks }
}

fn criterion_regressions(ctx: &mut Ctx) -> late_terms_core::Result<()> {
    if ctx.wants("blackhole") {
        let mut s = series(&ProblemKind::BlackHole, 1)?;
        if ctx.opts.inject_fault {
            s.coeffs[1] += 1;
        }
        ctx.exact("blackhole ω₀", &s.coeffs[0], &q(1, 2));
        ctx.exact("blackhole ω₁", &s.coeffs[1], &q(-1, 4));
    }
    if ctx.wants("anharmonic") {
        let s = series(&ProblemKind::Anharmonic, 1)?;
        ctx.exact("anharmonic λ₀", &s.coeffs[0], &q(1, 2));
    }
    if ctx.wants("rossby") {
        let s = series(&ProblemKind::Rossby, 1)?;
        ctx.exact("rossby λ₀", &s.coeffs[0], &q(0, 1));
        ctx.exact("rossby λ₁", &s.coeffs[1], &q(1, 1));
        for m in [1, 2] {
            let zero = s.table.row(m).is_some_and(|r| r.iter().all(|c| *c == 0));
            ctx.check(zero, format!("rossby ψ{m} = 0"));
        }
    }
    if ctx.wants("twopole") {
        for (b, c) in TWO_POLE_SETS {
            let s = series(&two_pole(b, c), 1)?;
            ctx.exact(&format!("twopole(b={b}, c={c}) ω₀"), &s.coeffs[0], &q(1, 1));
            ctx.exact(&format!("twopole(b={b}, c={c}) ω₁"), &s.coeffs[1], &q(c, b * b + c * c));
        }
    }
    Ok(())
}

fn criterion_rs_oracle(ctx: &mut Ctx) -> late_terms_core::Result<()> {
    if !ctx.wants("anharmonic") {
        return Ok(());
    }
    let order = 8;
    let oracle = rayleigh_schrodinger(order);
    let s = series(&ProblemKind::Anharmonic, order as u32)?;
    ctx.exact("anharmonic λ₁", &s.coeffs[1], &q(3, 4));
    ctx.exact("anharmonic λ₂ vs oracle", &s.coeffs[2], &oracle[2]);
    let agree = s.coeffs == oracle;
    ctx.check(agree, format!("λ₀..λ{order} equal to the oracle: {agree}"));
    Ok(())
}

fn criterion_anharmonic_late(ctx: &mut Ctx) -> late_terms_core::Result<()> {
    if !ctx.wants("anharmonic") {
        return Ok(());
    }
    let prec = ctx.prec();
    let kind = ProblemKind::Anharmonic;
    let s = series(&kind, 50)?;
    let model = model_for(&kind, prec)?;
    let r = ratio_sequence(&s, &model, 5, 50, prec)?.with_richardson(&[1])?;
    let at = |n| dist1(r.at(n).expect("in range"));
    let (d10, d25, d50) = (at(10), at(25), at(50));
    ctx.check(d50 < 0.05, format!("|ratio(50) − 1| = {d50:.3e} < 0.05"));
    let last = r.n_end() - 1;
    let d_r1 = dist1(r.richardson_at(1, last).expect("column entry"));
    ctx.check(d_r1 < 0.01, format!("|R1(last entry, n = {last}) − 1| = {d_r1:.3e} < 0.01"));
    ctx.check(
        d50 < d25 && d25 < d10,
        format!("monotone trend |r(50)−1| = {d50:.3e} < |r(25)−1| = {d25:.3e} < |r(10)−1| = {d10:.3e}"),
    );
    Ok(())
}

fn criterion_slow_late(ctx: &mut Ctx) -> late_terms_core::Result<()> {
    let prec = ctx.prec();
    for kind in [ProblemKind::BlackHole, ProblemKind::Rossby] {
        if !ctx.wants(kind.id()) {
            continue;
        }
        let s = series(&kind, 80)?;
        let model = model_for(&kind, prec)?;
        let r = ratio_sequence(&s, &model, 5, 80, prec)?.with_richardson(&[3])?;
        let d80 = dist1(r.at(80).expect("in range"));
        ctx.check(d80 < 0.2, format!("{kind}: |ratio(80) − 1| = {d80:.3e} < 0.2"));
        let last = r.n_end() - 3;
        let d_r3 = dist1(r.richardson_at(3, last).expect("column entry"));
        let d_raw = dist1(r.at(last).expect("in range"));
        ctx.check(
            d_r3 < d_raw,
            format!("{kind}: at n = {last}, |R3 − 1| = {d_r3:.3e} < |raw − 1| = {d_raw:.3e}"),
        );
        let outside: Vec<u32> = (40..=80).filter(|&n| !(0.5..=1.5).contains(&r.at(n).unwrap().to_f64())).collect();
        ctx.check(outside.is_empty(), format!("{kind}: raw ratio in [0.5, 1.5] for n ≥ 40 (outside: {outside:?})"));
    }
    Ok(())
}

fn criterion_oscillation(ctx: &mut Ctx) -> late_terms_core::Result<()> {
    if !ctx.wants("twopole") {
        return Ok(());
    }
    let prec = ctx.prec();
    let kind = two_pole(1, 3);
    let s = series(&kind, 80)?;
    let model = model_for(&kind, prec)?;
    let rows = oscillation_table(&s, &model, 20, 80, prec)?;
    let amplitude = model.prefactor_polar(prec).0 * 2u32;
    let early = oscillation_residual(&rows, &amplitude, 20, 40);
    let late = oscillation_residual(&rows, &amplitude, 60, 80);
    match (early, late) {
        (Some(early), Some(late)) => {
            ctx.check(
                late.median < 0.1,
                format!("median residual over [60, 80] = {:.3e} < 0.1 ({} excluded)", late.median, late.excluded.len()),
            );
            ctx.check(
                late.median < early.median,
                format!("late median {:.3e} < early median over [20, 40] {:.3e}", late.median, early.median),
            );
        }
        _ => ctx.check(false, "no usable rows after cosine-zero exclusion"),
    }
    Ok(())
}

fn criterion_growth(ctx: &mut Ctx) -> late_terms_core::Result<()> {
    let prec = ctx.prec();
    let chi_tp = model_for(&two_pole(1, 1), prec)?.terms[0].chi.abs().to_f64();
    let cases = [
        (ProblemKind::BlackHole, 80, 40, 1.0 / E),
        (ProblemKind::Anharmonic, 50, 25, 3.0 / E),
        (ProblemKind::Rossby, 80, 40, 1.0 / E),
        (two_pole(1, 1), 80, 40, 1.0 / (E * chi_tp)),
    ];
    for (kind, n_hi, n_lo, target) in cases {
        if !ctx.wants(kind.id()) {
            continue;
        }
        let s = series(&kind, n_hi)?;
        let g = growth_sequence(&s.coeffs, prec);
        match slope_fit(&g.values, 1, n_lo, n_hi) {
            Ok(slope) => {
                let slope = slope.to_f64();
                let rel = (slope / target - 1.0).abs();
                ctx.check(rel < 0.15, format!("{kind}: slope over [{n_lo}, {n_hi}] = {slope:.4}, target {target:.4}, off by {:.1}%", rel * 100.0));
            }
            Err(e) => ctx.fail(&format!("{kind} slope"), e),
        }
    }
    Ok(())
}

fn criterion_properties(ctx: &mut Ctx) -> late_terms_core::Result<()> {
    let prec = ctx.prec();
    let mut kinds = vec![ProblemKind::BlackHole, ProblemKind::Anharmonic, ProblemKind::Rossby];
    kinds.extend(TWO_POLE_SETS.iter().map(|&(b, c)| two_pole(b, c)));

    kinds.retain(|k| ctx.wants(k.id()));
    for kind in &kinds {
        let short = series(kind, 40)?;
        let long = series(kind, 80)?;
        let stable = short.coeffs[..] == long.coeffs[..=40];
        ctx.check(stable, format!("{kind}: orders 0..=40 identical at n_max 40 and 80"));
    }

    if ctx.wants_generic() {
        // s_n = L + Σ a_j / n^j with j ≤ m is reproduced exactly by order m.
        let limit = q(7, 3);
        let tail = [q(2, 1), q(-5, 7), q(11, 13), q(-1, 2)];
        let mut exact = true;
        for m in 1..=tail.len() as u32 {
            let seq: Vec<Rational> = (3..30u32)
                .map(|n| {
                    let mut power = Rational::from(1);
                    tail[..m as usize].iter().fold(limit.clone(), |acc, a| {
                        power *= n;
                        acc + Rational::from(a / &power)
                    })
                })
                .collect();
            exact &= richardson_exact(&seq, 3, m)?.iter().all(|v| *v == limit);
        }
        ctx.check(exact, "Richardson order m reproduces 1/n-polynomial limits exactly, m = 1..4");

        let mut prev = gamma_half_ratio(0);
        let mut ok = prev == 1;
        for m in 0..200u32 {
            let next = gamma_half_ratio(m + 1);
            ok &= next == (&prev * q(2 * m as i64 + 1, 2));
            prev = next;
        }
        ctx.check(ok, "Γ(m+1/2)/√π recurrence holds for m ≤ 200");
    }

    if ctx.wants("twopole") {
        let tol = BigFloat::with_val(prec, 1) >> (prec / 2);
        let mut worst = BigFloat::new(prec);
        for (b, c) in TWO_POLE_SETS {
            let model = model_for(&two_pole(b, c), prec)?;
            for n in 2..=80u64 {
                let z = model.eval_complex(n, prec)?;
                let scale = z.abs().max(&BigFloat::with_val(prec, 1));
                let rel = z.im.clone().abs() / scale;
                if rel > worst {
                    worst = rel;
                }
            }
        }
        ctx.check(worst < tol, format!("two-pole prediction imaginary residue {:.3e} < 2^-{}", worst.to_f64(), prec / 2));
    }

    let csv_cases: [(&str, &[(&str, &str)]); 2] = [("blackhole", &[]), ("twopole", &[("b", "1"), ("c", "3")])];
    for (problem, params) in csv_cases {
        if !ctx.wants(problem) {
            continue;
        }
        let config = RunConfig {
            problem: problem.into(),
            params: params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect::<BTreeMap<_, _>>(),
            n_max: 30,
            n_start: 5,
            precision_bits: prec,
            richardson_orders: vec![1, 2, 3],
        };
        let render = || commands::compare(&config).ok().and_then(|t| t.to_csv().ok());
        match (render(), render()) {
            (Some(a), Some(b)) => ctx.check(a == b, format!("{problem}: compare CSV byte-identical across runs ({} bytes)", a.len())),
            _ => ctx.check(false, format!("{problem}: compare CSV could not be produced")),
        }
    }
    Ok(())
}
