//! Sequence diagnostics: ratios to a prediction, Richardson acceleration,
//! root growth `|cₙ|^(1/n)` with its slope, and the normalised two-pole
//! oscillation table.
//!
//! Missing entries (a zero prediction, a zero coefficient) are stored as
//! NaN and listed separately so that indices stay aligned with `n`.

use crate::asymptotics::LateTermModel;
use crate::numerics::{log_gamma, to_float, BigFloat, Rational};
use crate::problems::EigenSeries;
use crate::{Error, Result};
use rug::ops::Pow;
use std::collections::BTreeMap;

/// Anything that predicts the order-`n` coefficient.
pub trait Predictor {
    fn predict(&self, n: u32, prec: u32) -> Result<BigFloat>;

    /// `Some((r, t))` when the prediction factors exactly as `r · t` with
    /// rational `r`; ratios then divide exactly and round once.
    fn exact_split(&self, _n: u32, _prec: u32) -> Option<(Rational, BigFloat)> {
        None
    }
}

impl Predictor for LateTermModel {
    fn predict(&self, n: u32, prec: u32) -> Result<BigFloat> {
        self.eval(n as u64, prec)
    }

    fn exact_split(&self, n: u32, prec: u32) -> Option<(Rational, BigFloat)> {
        let f = self.exact_factorization()?;
        Some((f.rational_part(n), f.transcendental_part(prec)))
    }
}

/// A series predicts itself; used as the identity check of the ratio path.
impl Predictor for EigenSeries {
    fn predict(&self, n: u32, prec: u32) -> Result<BigFloat> {
        let c = self.coeff(n).ok_or_else(|| Error::InvalidRange(format!("order {n} not computed")))?;
        Ok(to_float(c, prec))
    }

    fn exact_split(&self, n: u32, prec: u32) -> Option<(Rational, BigFloat)> {
        Some((self.coeff(n)?.clone(), BigFloat::with_val(prec, 1)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioPath {
    /// Exact rational division whenever the predictor factors exactly.
    Auto,
    /// Always divide by the floating prediction.
    Float,
}

#[derive(Clone, Debug)]
pub struct RatioSeries {
    pub n_start: u32,
    /// `coeff(n) / predicted(n)` for `n = n_start + k`.
    pub values: Vec<BigFloat>,
    /// Orders whose prediction is exactly zero; their value is NaN.
    pub flagged: Vec<u32>,
    /// Richardson columns keyed by order `m`; column `m` has
    /// `values.len() − m` entries, entry `j` labelled `n_start + j`.
    pub richardson: BTreeMap<u32, Vec<BigFloat>>,
    /// `coeff(n) / r(n)` on the exact path, where the ratio is this value
    /// divided by the constant transcendental factor.
    pub exact_normalized: Option<Vec<Rational>>,
}

impl RatioSeries {
    pub fn n_end(&self) -> u32 {
        self.n_start + self.values.len() as u32 - 1
    }

    pub fn at(&self, n: u32) -> Option<&BigFloat> {
        n.checked_sub(self.n_start).and_then(|k| self.values.get(k as usize))
    }

    pub fn richardson_at(&self, m: u32, n: u32) -> Option<&BigFloat> {
        let col = self.richardson.get(&m)?;
        n.checked_sub(self.n_start).and_then(|k| col.get(k as usize))
    }

    /// Adds Richardson columns for each order in `orders`.
    pub fn with_richardson(mut self, orders: &[u32]) -> Result<Self> {
        for &m in orders {
            let col = richardson(&self.values, self.n_start, m)?;
            self.richardson.insert(m, col);
        }
        Ok(self)
    }
}

/// Ratios `coeff(n) / predicted(n)` for `n ∈ [n_start, n_end]`.
pub fn ratio_sequence(
    series: &EigenSeries,
    predictor: &impl Predictor,
    n_start: u32,
    n_end: u32,
    prec: u32,
) -> Result<RatioSeries> {
    ratio_sequence_with(series, predictor, n_start, n_end, prec, RatioPath::Auto)
}

pub fn ratio_sequence_with(
    series: &EigenSeries,
    predictor: &impl Predictor,
    n_start: u32,
    n_end: u32,
    prec: u32,
    path: RatioPath,
) -> Result<RatioSeries> {
    if n_start < 2 || n_start > n_end || n_end > series.n_max() {
        return Err(Error::InvalidRange(format!(
            "ratio range [{n_start}, {n_end}] must satisfy 2 ≤ n_start ≤ n_end ≤ n_max = {}",
            series.n_max()
        )));
    }
    let mut values = Vec::with_capacity((n_end - n_start + 1) as usize);
    let mut flagged = Vec::new();
    let mut exact = (path == RatioPath::Auto).then(Vec::new);

    for n in n_start..=n_end {
        let coeff = &series.coeffs[n as usize];
        let split = exact.as_ref().and_then(|_| predictor.exact_split(n, prec));
        match split {
            Some((r, t)) => {
                if r == 0 || t.is_zero() {
                    flagged.push(n);
                    values.push(BigFloat::with_val(prec, f64::NAN));
                    exact.as_mut().unwrap().push(Rational::new());
                    continue;
                }
                let normalized = Rational::from(coeff / &r);
                values.push(to_float(&normalized, prec) / t);
                exact.as_mut().unwrap().push(normalized);
            }
            None => {
                exact = None;
                let predicted = predictor.predict(n, prec)?;
                if predicted.is_zero() {
                    flagged.push(n);
                    values.push(BigFloat::with_val(prec, f64::NAN));
                } else {
                    values.push(to_float(coeff, prec) / predicted);
                }
            }
        }
    }
    // A predictor that splits exactly at some orders but not others gets
    // no exact column.
    if exact.as_ref().is_some_and(|e| e.len() != values.len()) {
        exact = None;
    }
    Ok(RatioSeries { n_start, values, flagged, richardson: BTreeMap::new(), exact_normalized: exact })
}

/// Weights `w_k = (n+k)^m (−1)^(k+m) / (k! (m−k)!)`, `k = 0..=m`.
pub fn richardson_weights(n: u32, m: u32) -> Vec<Rational> {
    let fact = |k: u32| crate::numerics::factorial(k);
    (0..=m)
        .map(|k| {
            let power = Rational::from(n + k).pow(m);
            let sign = if (k + m).is_multiple_of(2) { 1 } else { -1 };
            power * sign / Rational::from(fact(k) * fact(m - k))
        })
        .collect()
}

fn check_richardson(len: usize, m: u32) -> Result<()> {
    if m == 0 || len <= m as usize {
        return Err(Error::SequenceTooShort { len, order: m });
    }
    Ok(())
}

/// Order-`m` Richardson extrapolation of `seq`, where `seq[j]` is the term
/// at `n = n_start + j`. Output entry `j` combines `seq[j..=j+m]`, removes
/// `1/n, …, 1/n^m` tails exactly, and is labelled `n_start + j`.
pub fn richardson(seq: &[BigFloat], n_start: u32, m: u32) -> Result<Vec<BigFloat>> {
    check_richardson(seq.len(), m)?;
    let prec = seq.iter().map(BigFloat::prec).max().unwrap_or(64);
    Ok((0..seq.len() - m as usize)
        .map(|j| {
            let weights = richardson_weights(n_start + j as u32, m);
            weights.iter().enumerate().fold(BigFloat::new(prec), |acc, (k, w)| {
                acc + seq[j + k].clone() * to_float(w, prec)
            })
        })
        .collect())
}

/// [`richardson`] in exact rational arithmetic.
pub fn richardson_exact(seq: &[Rational], n_start: u32, m: u32) -> Result<Vec<Rational>> {
    check_richardson(seq.len(), m)?;
    Ok((0..seq.len() - m as usize)
        .map(|j| {
            let weights = richardson_weights(n_start + j as u32, m);
            weights.iter().enumerate().fold(Rational::new(), |acc, (k, w)| {
                acc + Rational::from(&seq[j + k] * w)
            })
        })
        .collect())
}

#[derive(Clone, Debug)]
pub struct GrowthSequence {
    /// Entry `k` is `|c_(k+1)|^(1/(k+1))`; orders start at 1.
    pub values: Vec<BigFloat>,
    /// Orders with a zero coefficient (stored as NaN).
    pub skipped: Vec<u32>,
}

impl GrowthSequence {
    pub const N_START: u32 = 1;

    pub fn at(&self, n: u32) -> Option<&BigFloat> {
        n.checked_sub(1).and_then(|k| self.values.get(k as usize))
    }
}

/// `|cₙ|^(1/n)` for `n = 1..coeffs.len()−1`.
pub fn growth_sequence(coeffs: &[Rational], prec: u32) -> GrowthSequence {
    let mut values = Vec::new();
    let mut skipped = Vec::new();
    for (n, c) in coeffs.iter().enumerate().skip(1) {
        if *c == 0 {
            skipped.push(n as u32);
            values.push(BigFloat::with_val(prec, f64::NAN));
            continue;
        }
        let magnitude = to_float(&Rational::from(c.abs_ref()), prec);
        values.push((magnitude.ln() / n as u32).exp());
    }
    GrowthSequence { values, skipped }
}

/// Least-squares slope of `seq[j]` against `n = n_start + j` over the
/// closed window `[n_lo, n_hi]`. NaN entries are ignored.
pub fn slope_fit(seq: &[BigFloat], n_start: u32, n_lo: u32, n_hi: u32) -> Result<BigFloat> {
    let last = n_start as usize + seq.len();
    if n_lo < n_start || n_lo > n_hi || n_hi as usize >= last {
        return Err(Error::InvalidRange(format!(
            "window [{n_lo}, {n_hi}] outside sequence [{n_start}, {}]",
            last.saturating_sub(1)
        )));
    }
    let points: Vec<(u32, &BigFloat)> = (n_lo..=n_hi)
        .map(|n| (n, &seq[(n - n_start) as usize]))
        .filter(|(_, v)| !v.is_nan())
        .collect();
    if points.len() < 5 {
        return Err(Error::TooFewPoints(points.len()));
    }
    let prec = points[0].1.prec();
    let count = BigFloat::with_val(prec, points.len());
    let mean_n = points.iter().fold(BigFloat::new(prec), |a, (n, _)| a + *n) / &count;
    let mean_v = points.iter().fold(BigFloat::new(prec), |a, (_, v)| a + *v) / &count;
    let mut sxy = BigFloat::new(prec);
    let mut sxx = BigFloat::new(prec);
    for (n, v) in &points {
        let dx = BigFloat::with_val(prec, *n) - &mean_n;
        sxy += dx.clone() * BigFloat::with_val(prec, *v - &mean_v);
        sxx += dx.square();
    }
    Ok(sxy / sxx)
}

#[derive(Clone, Debug)]
pub struct OscillationRow {
    pub n: u32,
    /// `ωₙ |χ₀|ⁿ / Γ(n)`.
    pub numeric: BigFloat,
    /// `2|K| cos(arg K − n arg χ₀)`.
    pub predicted: BigFloat,
}

/// The two-pole cosine model as a continuous function of `t`.
pub fn oscillation_curve(model: &LateTermModel, t: &BigFloat, prec: u32) -> Result<BigFloat> {
    if !model.conjugate_pair {
        return Err(Error::NotConjugatePair);
    }
    let (k_abs, k_arg) = model.prefactor_polar(prec);
    let chi_arg = model.terms[0].chi.with_prec(prec).arg();
    Ok(k_abs * 2u32 * (k_arg - chi_arg * t).cos())
}

pub fn oscillation_table(
    series: &EigenSeries,
    model: &LateTermModel,
    n_start: u32,
    n_end: u32,
    prec: u32,
) -> Result<Vec<OscillationRow>> {
    if !model.conjugate_pair {
        return Err(Error::NotConjugatePair);
    }
    if n_start < 1 || n_start > n_end || n_end > series.n_max() {
        return Err(Error::InvalidRange(format!(
            "oscillation range [{n_start}, {n_end}] must satisfy 1 ≤ n_start ≤ n_end ≤ n_max = {}",
            series.n_max()
        )));
    }
    let wp = model.working_precision();
    let ln_chi_abs = model.terms[0].chi.with_prec(wp).abs().ln();
    (n_start..=n_end)
        .map(|n| {
            let ln_norm = ln_chi_abs.clone() * n - log_gamma(&BigFloat::with_val(wp, n))?;
            let numeric = to_float(&series.coeffs[n as usize], wp) * ln_norm.exp();
            let predicted = oscillation_curve(model, &BigFloat::with_val(wp, n), wp)?;
            Ok(OscillationRow {
                n,
                numeric: BigFloat::with_val(prec, numeric),
                predicted: BigFloat::with_val(prec, predicted),
            })
        })
        .collect()
}

/// Relative size below which a normalised prediction counts as a cosine
/// zero and is left out of residual statistics.
pub const COSINE_ZERO_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSummary {
    /// Median of `|numeric − predicted| / amplitude` over the kept rows.
    pub median: f64,
    pub used: usize,
    /// Orders dropped as cosine zeros.
    pub excluded: Vec<u32>,
}

/// Residual statistic for rows with `n ∈ [n_lo, n_hi]`, scaled by the
/// cosine amplitude `2|K|`.
pub fn oscillation_residual(
    rows: &[OscillationRow],
    amplitude: &BigFloat,
    n_lo: u32,
    n_hi: u32,
) -> Option<ResidualSummary> {
    let cutoff = amplitude.clone() * COSINE_ZERO_THRESHOLD;
    let mut excluded = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    for row in rows.iter().filter(|r| (n_lo..=n_hi).contains(&r.n)) {
        if row.predicted.clone().abs() < cutoff {
            excluded.push(row.n);
            continue;
        }
        let r = (row.numeric.clone() - &row.predicted).abs() / amplitude;
        residuals.push(r.to_f64());
    }
    if residuals.is_empty() {
        return None;
    }
    residuals.sort_by(f64::total_cmp);
    let mid = residuals.len() / 2;
    let median = if residuals.len() % 2 == 1 {
        residuals[mid]
    } else {
        0.5 * (residuals[mid - 1] + residuals[mid])
    };
    Some(ResidualSummary { median, used: residuals.len(), excluded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::model_for;
    use crate::numerics::factorial;
    use crate::problems::{compute_series, ProblemKind, ProblemSpec};
    use proptest::prelude::*;

    const PREC: u32 = 256;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn richardson_keeps_constants() {
        let seq = vec![q(7, 3); 12];
        for m in 1..=4 {
            assert!(richardson_exact(&seq, 5, m).unwrap().iter().all(|v| *v == q(7, 3)));
            let floats: Vec<_> = seq.iter().map(|v| to_float(v, PREC)).collect();
            for v in richardson(&floats, 5, m).unwrap() {
                assert!((v - to_float(&q(7, 3), PREC)).abs() < 1e-60);
            }
        }
    }

    #[test]
    fn richardson_first_order_cancels_one_over_n() {
        for n_start in [1u32, 2, 5, 40] {
            let seq: Vec<_> = (n_start..n_start + 8).map(|n| Rational::from(1) + q(1, n as i64)).collect();
            let out = richardson_exact(&seq, n_start, 1).unwrap();
            assert_eq!(out.len(), 7);
            assert!(out.iter().all(|v| *v == 1));
        }
    }

    #[test]
    fn richardson_second_order_cancels_quadratic_tail() {
        let (a, b, c) = (q(3, 2), q(-5, 7), q(11, 4));
        let seq: Vec<_> = (5..20)
            .map(|n| a.clone() + Rational::from(&b / n) + Rational::from(&c / (n * n)))
            .collect();
        assert!(richardson_exact(&seq, 5, 2).unwrap().iter().all(|v| *v == a));
    }

    #[test]
    fn richardson_needs_m_plus_one_terms() {
        let seq = vec![q(1, 1); 3];
        assert!(richardson_exact(&seq, 5, 3).is_err());
        assert!(richardson_exact(&seq, 5, 0).is_err());
        assert_eq!(richardson_exact(&seq, 5, 2).unwrap().len(), 1);
    }

    proptest! {
        #[test]
        fn richardson_annihilates_inverse_power_tails(
            m in 1u32..=5,
            n_start in 1u32..60,
            coeffs in proptest::collection::vec((-50i64..50, 1i64..20), 6),
        ) {
            let limit = q(coeffs[0].0, coeffs[0].1);
            let seq: Vec<Rational> = (n_start..n_start + m + 6)
                .map(|n| {
                    let mut v = limit.clone();
                    for (p, (num, den)) in coeffs.iter().enumerate().skip(1).take(m as usize) {
                        v += q(*num, *den) / Rational::from(n).pow(p as u32);
                    }
                    v
                })
                .collect();
            for v in richardson_exact(&seq, n_start, m).unwrap() {
                prop_assert_eq!(v, limit.clone());
            }
        }
    }

    #[test]
    fn growth_of_constant_and_factorial() {
        let ones = vec![q(1, 1); 20];
        let g = growth_sequence(&ones, PREC);
        assert_eq!(g.values.len(), 19);
        assert!(g.values.iter().all(|v| (v.clone() - 1u32).abs() < 1e-70));

        let facts: Vec<_> = (0..=80).map(|n| Rational::from(factorial(n))).collect();
        let g = growth_sequence(&facts, PREC);
        let slope = slope_fit(&g.values, GrowthSequence::N_START, 40, 80).unwrap().to_f64();
        let inv_e = (-1f64).exp();
        assert!((slope / inv_e - 1.0).abs() < 0.05, "{slope}");
        let at80 = g.at(80).unwrap().to_f64();
        assert!((at80 / (80.0 * inv_e) - 1.0).abs() < 0.05);
    }

    #[test]
    fn growth_skips_zero_coefficients() {
        let g = growth_sequence(&[q(1, 1), q(2, 1), q(0, 1), q(8, 1)], PREC);
        assert_eq!(g.skipped, vec![2]);
        assert!(g.at(2).unwrap().is_nan());
        assert!((g.at(3).unwrap().clone() - 2u32).abs() < 1e-70);
    }

    #[test]
    fn slope_fit_basics() {
        let line: Vec<_> = (3..30).map(|n| BigFloat::with_val(PREC, 2.5 * n as f64 - 4.0)).collect();
        let s = slope_fit(&line, 3, 5, 20).unwrap();
        assert!((s - 2.5f64).abs() < 1e-60);
        let flat = vec![BigFloat::with_val(PREC, 4); 10];
        assert!(slope_fit(&flat, 0, 0, 9).unwrap().abs() < 1e-70);
        assert_eq!(slope_fit(&flat, 0, 0, 3), Err(Error::TooFewPoints(4)));
        assert!(slope_fit(&flat, 0, 0, 10).is_err());
        assert!(slope_fit(&flat, 2, 1, 8).is_err());
    }

    fn series(kind: ProblemKind, n_max: u32) -> EigenSeries {
        compute_series(&ProblemSpec::new(kind, n_max).unwrap()).unwrap()
    }

    #[test]
    fn identity_predictor_gives_unit_ratios() {
        let s = series(ProblemKind::Anharmonic, 20);
        let r = ratio_sequence(&s, &s, 2, 20, PREC).unwrap();
        assert!(r.values.iter().all(|v| *v == 1));
        let f = ratio_sequence_with(&s, &s, 2, 20, PREC, RatioPath::Float).unwrap();
        assert!(f.values.iter().all(|v| (v.clone() - 1u32).abs() < 1e-70));
    }

    #[test]
    fn rossby_ratio_is_exactly_rational() {
        let s = series(ProblemKind::Rossby, 30);
        let m = model_for(&ProblemKind::Rossby, PREC).unwrap();
        let r = ratio_sequence(&s, &m, 2, 30, PREC).unwrap();
        let exact = r.exact_normalized.as_ref().unwrap();
        for n in 2..=30u32 {
            let four = Rational::from(4).pow(n - 1);
            let expected = s.coeffs[n as usize].clone() * four * Rational::from(factorial(n - 1))
                / Rational::from(factorial(2 * n - 2));
            assert_eq!(exact[(n - 2) as usize], expected, "n = {n}");
            assert_eq!(*r.at(n).unwrap(), to_float(&expected, PREC));
        }
    }

    #[test]
    fn blackhole_first_ratio_is_far_from_one() {
        // ω₁ / prediction(1) = √2π/2 on the exact path.
        let m = model_for(&ProblemKind::BlackHole, PREC).unwrap();
        let f = m.exact_factorization().unwrap();
        let ratio = to_float(&(q(-1, 4) / f.rational_part(1)), PREC) / f.transcendental_part(PREC);
        assert!((ratio.to_f64() - 2.221441469).abs() < 1e-9);
    }

    #[test]
    fn exact_and_float_ratio_paths_agree() {
        let tol = BigFloat::with_val(PREC, 2).pow(16 - PREC as i32);
        for kind in [ProblemKind::Anharmonic, ProblemKind::Rossby, ProblemKind::BlackHole] {
            let s = series(kind.clone(), 40);
            let m = model_for(&kind, PREC).unwrap();
            let exact = ratio_sequence(&s, &m, 2, 40, PREC).unwrap();
            let float = ratio_sequence_with(&s, &m, 2, 40, PREC, RatioPath::Float).unwrap();
            assert!(exact.exact_normalized.is_some() && float.exact_normalized.is_none());
            for (a, b) in exact.values.iter().zip(&float.values) {
                assert!((a.clone() - b).abs() / b.clone().abs() < tol, "{kind}");
            }
        }
    }

    #[test]
    fn ratio_range_is_checked() {
        let s = series(ProblemKind::BlackHole, 10);
        let m = model_for(&ProblemKind::BlackHole, PREC).unwrap();
        assert!(ratio_sequence(&s, &m, 1, 10, PREC).is_err());
        assert!(ratio_sequence(&s, &m, 5, 11, PREC).is_err());
        assert!(ratio_sequence(&s, &m, 6, 5, PREC).is_err());
        let r = ratio_sequence(&s, &m, 5, 10, PREC).unwrap().with_richardson(&[1, 2, 3]).unwrap();
        assert_eq!(r.n_end(), 10);
        assert_eq!(r.richardson[&3].len(), r.values.len() - 3);
        assert!(r.richardson_at(3, 7).is_some() && r.richardson_at(3, 8).is_none());
    }

    #[test]
    fn oscillation_requires_two_pole_model() {
        let s = series(ProblemKind::BlackHole, 10);
        let m = model_for(&ProblemKind::BlackHole, PREC).unwrap();
        assert!(matches!(oscillation_table(&s, &m, 2, 10, PREC), Err(Error::NotConjugatePair)));
    }

    #[test]
    fn oscillation_prediction_is_bounded() {
        let kind = ProblemKind::TwoPole { b: q(1, 1), c: q(3, 1) };
        let s = series(kind.clone(), 30);
        let m = model_for(&kind, PREC).unwrap();
        let amplitude = m.prefactor_polar(PREC).0 * 2u32;
        let rows = oscillation_table(&s, &m, 1, 30, PREC).unwrap();
        assert_eq!(rows.len(), 30);
        assert!(rows.iter().all(|r| r.predicted.clone().abs() <= amplitude));
    }

    #[test]
    fn residual_summary_excludes_cosine_zeros() {
        let one = BigFloat::with_val(64, 1);
        let row = |n, numeric: f64, predicted: f64| OscillationRow {
            n,
            numeric: BigFloat::with_val(64, numeric),
            predicted: BigFloat::with_val(64, predicted),
        };
        let rows = vec![row(1, 0.5, 0.4), row(2, 0.3, 1e-9), row(3, 0.0, 0.2), row(4, 0.9, 0.6)];
        let s = oscillation_residual(&rows, &one, 1, 4).unwrap();
        assert_eq!(s.excluded, vec![2]);
        assert_eq!(s.used, 3);
        assert!((s.median - 0.2).abs() < 1e-12);
        assert!(oscillation_residual(&rows, &one, 9, 10).is_none());
    }
}
