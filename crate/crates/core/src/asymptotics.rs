//! Closed-form late-term predictions `Σ K·Γ(n+γ)/χⁿ` for each model problem.
//!
//! Prefactors are kept exact as `(re + i·im)·√r·π^(p/2)` with rational
//! `re`, `im`; they are rounded to floats only at evaluation time. Singulants
//! that are rational (all single-term models) are kept exact as well, which
//! lets [`LateTermModel::exact_factorization`] split a prediction into an
//! exact rational and one transcendental constant.

use crate::numerics::{gamma_half_ratio, log_gamma, pi, BigFloat, ComplexBF, Integer, Rational};
use crate::problems::ProblemKind;
use crate::{Error, Result};
use rug::ops::Pow;

/// Extra bits carried through log-space evaluation. `ln Γ(n)` exceeds
/// `2^9` already around `n = 130`, and exponentiation multiplies the
/// absolute log error by that magnitude.
const GUARD_BITS: u32 = 64;

/// Exact constant `(re + i·im) · √radicand · π^(sqrt_pi_power/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefactor {
    pub re: Rational,
    pub im: Rational,
    pub radicand: u32,
    pub sqrt_pi_power: i32,
}

impl Prefactor {
    pub fn real(re: Rational, radicand: u32, sqrt_pi_power: i32) -> Self {
        Prefactor { re, im: Rational::new(), radicand, sqrt_pi_power }
    }

    pub fn is_real(&self) -> bool {
        self.im == 0
    }

    /// `√radicand · π^(sqrt_pi_power/2)`.
    pub fn transcendental(&self, prec: u32) -> BigFloat {
        let root = BigFloat::with_val(prec, self.radicand).sqrt();
        let sqrt_pi = pi(prec).sqrt();
        root * sqrt_pi.pow(self.sqrt_pi_power)
    }

    pub fn value(&self, prec: u32) -> ComplexBF {
        ComplexBF::from_rationals(&self.re, &self.im, prec).scale(&self.transcendental(prec))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LateTerm {
    pub prefactor: Prefactor,
    /// Singulant at the working precision of the model.
    pub chi: ComplexBF,
    /// Exact singulant when it is rational.
    pub chi_exact: Option<Rational>,
    pub gamma: Rational,
}

impl LateTerm {
    fn conj(&self) -> LateTerm {
        LateTerm {
            prefactor: Prefactor { im: Rational::from(-&self.prefactor.im), ..self.prefactor.clone() },
            chi: self.chi.conj(),
            chi_exact: self.chi_exact.clone(),
            gamma: self.gamma.clone(),
        }
    }

    fn k(&self, prec: u32) -> ComplexBF {
        self.prefactor.value(prec)
    }
}

/// Predicted large-`n` form of the eigenvalue coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LateTermModel {
    pub terms: Vec<LateTerm>,
    /// When set, every listed term is accompanied by its complex conjugate
    /// and the prediction is `2·Re` of the listed sum.
    pub conjugate_pair: bool,
    /// Precision requested by the caller; values are stored with guard bits.
    pub precision: u32,
}

/// Split of a single-term prediction into `exact(n) · constant`.
#[derive(Clone, Debug)]
pub struct ExactFactorization<'a> {
    model: &'a LateTermModel,
}

impl ExactFactorization<'_> {
    /// Rational part `re · Γ(n+γ)/√π^{2γ mod 2} · χ^(−n)`.
    pub fn rational_part(&self, n: u32) -> Rational {
        let term = &self.model.terms[0];
        let chi = term.chi_exact.as_ref().expect("checked at construction");
        let shifted = Rational::from(&term.gamma + n);
        let gamma_value = if *shifted.denom() == 1 {
            let arg = shifted.numer().to_u32().expect("n + γ is a small positive integer");
            Rational::from(Integer::from(Integer::factorial(arg - 1)))
        } else {
            let m = &shifted - Rational::from((1, 2));
            gamma_half_ratio(m.numer().to_u32().expect("n + γ − 1/2 is a small integer"))
        };
        let chi_pow = Rational::from(chi.pow(n));
        term.prefactor.re.clone() * gamma_value / chi_pow
    }

    /// The constant `√r · π^(p/2)`, times `√π` for half-integer `γ`.
    pub fn transcendental_part(&self, prec: u32) -> BigFloat {
        let term = &self.model.terms[0];
        let mut prefactor = term.prefactor.clone();
        if *term.gamma.denom() != 1 {
            prefactor.sqrt_pi_power += 1;
        }
        prefactor.transcendental(prec)
    }
}

impl LateTermModel {
    pub fn working_precision(&self) -> u32 {
        self.precision + GUARD_BITS
    }

    /// Available for single-term models with real prefactor, rational
    /// singulant and integer or half-integer `γ`.
    pub fn exact_factorization(&self) -> Option<ExactFactorization<'_>> {
        if self.conjugate_pair || self.terms.len() != 1 {
            return None;
        }
        let term = &self.terms[0];
        let half_or_whole = *term.gamma.denom() == 1 || *term.gamma.denom() == 2;
        (term.prefactor.is_real() && term.chi_exact.is_some() && half_or_whole)
            .then_some(ExactFactorization { model: self })
    }

    fn expanded_terms(&self) -> Vec<LateTerm> {
        let mut all = self.terms.clone();
        if self.conjugate_pair {
            all.extend(self.terms.iter().map(LateTerm::conj));
        }
        all
    }

    /// Full complex sum of all terms, conjugates included, at `prec` bits.
    pub fn eval_complex(&self, n: u64, prec: u32) -> Result<ComplexBF> {
        if n < 2 {
            return Err(Error::ModelDomain(n));
        }
        let wp = prec + GUARD_BITS;
        let mut total = ComplexBF::from_real(BigFloat::new(wp));
        for term in self.expanded_terms() {
            let k = term.k(wp);
            if k.is_zero() {
                continue;
            }
            let arg = BigFloat::with_val(wp, &term.gamma) + n;
            let log_gamma = log_gamma(&arg)?;
            let n_log_chi = term.chi.with_prec(wp).ln().scale(&BigFloat::with_val(wp, n));
            let log_value = k.ln().add(&ComplexBF::from_real(log_gamma)).sub(&n_log_chi);
            total = total.add(&log_value.exp());
        }
        Ok(total.with_prec(prec))
    }

    /// Real prediction at order `n ≥ 2`, evaluated in log space.
    pub fn eval(&self, n: u64, prec: u32) -> Result<BigFloat> {
        Ok(self.eval_complex(n, prec)?.re)
    }

    /// Modulus and argument of the listed (first) term's prefactor.
    pub fn prefactor_polar(&self, prec: u32) -> (BigFloat, BigFloat) {
        let k = self.terms[0].k(prec);
        (k.abs(), k.arg())
    }
}

/// Late-term model for `kind`, with transcendental constants held at
/// `precision` bits plus guard bits.
pub fn model_for(kind: &ProblemKind, precision: u32) -> Result<LateTermModel> {
    let wp = precision + GUARD_BITS;
    let q = |n: i64, d: i64| Rational::from((n, d));
    let single = |prefactor: Prefactor, chi: Rational, gamma: Rational| LateTermModel {
        terms: vec![LateTerm {
            prefactor,
            chi: ComplexBF::from_rationals(&chi, &Rational::new(), wp),
            chi_exact: Some(chi),
            gamma,
        }],
        conjugate_pair: false,
        precision,
    };
    Ok(match kind {
        // (−1)ⁿ Γ(n) / (2√2 π):  K = √2/4 · π⁻¹
        ProblemKind::BlackHole => single(Prefactor::real(q(1, 4), 2, -2), q(-1, 1), Rational::new()),
        // (−1)ⁿ⁺¹ √6 3ⁿ Γ(n+1/2) / π^{3/2}:  K = −√6 π^{−3/2}, χ = −1/3
        ProblemKind::Anharmonic => single(Prefactor::real(q(-1, 1), 6, -3), q(-1, 3), q(1, 2)),
        // Γ(n−1/2)/√π
        ProblemKind::Rossby => single(Prefactor::real(q(1, 1), 1, -1), q(1, 1), q(-1, 2)),
        ProblemKind::TwoPole { b, c } => {
            // K = i b / (√2 π (c + i b)), divided exactly as written.
            let norm = Rational::from(b * b) + Rational::from(c * c);
            let ratio_re = Rational::from(b * b) / &norm;
            let ratio_im = Rational::from(b * c) / &norm;
            let prefactor = Prefactor {
                re: ratio_re / 2u32,
                im: ratio_im / 2u32,
                radicand: 2,
                sqrt_pi_power: -2,
            };
            LateTermModel {
                terms: vec![LateTerm {
                    prefactor,
                    chi: compute_chi0(b, c, wp)?,
                    chi_exact: None,
                    gamma: Rational::new(),
                }],
                conjugate_pair: true,
                precision,
            }
        }
    })
}

fn chi_branch(b: &Rational, c: &Rational, prec: u32, sign: i32) -> Result<ComplexBF> {
    if *c == 0 || *b == 0 {
        return Err(Error::InvalidParameters(format!(
            "singulant needs nonzero b and c, got b = {b}, c = {c}"
        )));
    }
    let b2 = Rational::from(b * b);
    let c2 = Rational::from(c * c);
    let c3 = Rational::from(&c2 * c);
    // (±2i b³ − b²c + c³) / (2c²)
    let lead_re = (&c3 - Rational::from(&b2 * c)) / Rational::from(&c2 * 2u32);
    let lead_im = Rational::from(&b2 * b) * sign / &c2;
    let lead = ComplexBF::from_rationals(&lead_re, &lead_im, prec);
    // b²(b²+c²)/c³ · log(1 ∓ i c/b)
    let weight = (&b2 * Rational::from(&b2 + &c2)) / &c3;
    let arg = ComplexBF::from_rationals(&Rational::from(1), &(Rational::from(c / b) * -sign), prec);
    Ok(lead.add(&arg.ln().scale(&BigFloat::with_val(prec, &weight))))
}

/// `χ₀ = (2ib³ − b²c + c³)/(2c²) + b²(b²+c²)/c³ · log(1 − ic/b)`, principal
/// branch. The second singulant is its conjugate.
pub fn compute_chi0(b: &Rational, c: &Rational, prec: u32) -> Result<ComplexBF> {
    chi_branch(b, c, prec, 1)
}

/// The second singulant evaluated from its own formula,
/// `(−2ib³ − b²c + c³)/(2c²) + b²(b²+c²)/c³ · log(1 + ic/b)`.
pub fn compute_chi2(b: &Rational, c: &Rational, prec: u32) -> Result<ComplexBF> {
    chi_branch(b, c, prec, -1)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PREC: u32 = 256;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn two_pole(b: i64, c: i64) -> ProblemKind {
        ProblemKind::TwoPole { b: Rational::from(b), c: Rational::from(c) }
    }

    fn rel_err(a: &BigFloat, b: &BigFloat) -> BigFloat {
        (a.clone() - b).abs() / b.clone().abs()
    }

    #[test]
    fn prefactor_decimals() {
        let bh = model_for(&ProblemKind::BlackHole, PREC).unwrap();
        assert!((bh.terms[0].k(PREC).re.to_f64() - 0.1125395395).abs() < 1e-10);
        let ro = model_for(&ProblemKind::Rossby, PREC).unwrap();
        assert!((ro.terms[0].k(PREC).re.to_f64() - 0.5641895835).abs() < 1e-10);
        let tp = model_for(&two_pole(1, 1), PREC).unwrap();
        let (re, im) = tp.terms[0].k(PREC).to_f64_pair();
        let expected = 1.0 / (2.0 * 2f64.sqrt() * std::f64::consts::PI);
        assert!((re - expected).abs() < 1e-15 && (im - expected).abs() < 1e-15);
        assert!((re - 0.1125).abs() < 1e-4);
    }

    #[test]
    fn anharmonic_prefactor_is_minus_root6_over_pi_three_halves() {
        let m = model_for(&ProblemKind::Anharmonic, PREC).unwrap();
        let k = m.terms[0].k(PREC).re.to_f64();
        assert!((k + 6f64.sqrt() / std::f64::consts::PI.powf(1.5)).abs() < 1e-15);
    }

    #[test]
    fn chi0_unit_parameters() {
        let chi = compute_chi0(&q(1, 1), &q(1, 1), PREC).unwrap();
        let (re, im) = chi.to_f64_pair();
        assert!((re - 2f64.ln()).abs() < 1e-15);
        assert!((im - (1.0 - std::f64::consts::FRAC_PI_2)).abs() < 1e-15);
        assert!((re - std::f64::consts::LN_2).abs() < 1e-7 && (im + 0.5707963).abs() < 1e-7);
        assert!((chi.abs().to_f64() - 0.8980).abs() < 1e-4);
    }

    #[test]
    fn chi2_is_conjugate_of_chi0() {
        for (b, c) in [(1, 1), (1, 3), (3, 1), (2, 5)] {
            let (b, c) = (Rational::from(b), Rational::from(c));
            let chi0 = compute_chi0(&b, &c, PREC).unwrap();
            let chi2 = compute_chi2(&b, &c, PREC).unwrap();
            assert!(chi0.conj().sub(&chi2).abs() < 1e-70);
        }
    }

    #[test]
    fn chi0_requires_nonzero_parameters() {
        assert!(compute_chi0(&q(1, 1), &q(0, 1), PREC).is_err());
        assert!(compute_chi0(&q(0, 1), &q(1, 1), PREC).is_err());
    }

    #[test]
    fn eval_domain_starts_at_two() {
        let m = model_for(&ProblemKind::BlackHole, PREC).unwrap();
        assert_eq!(m.eval(1, PREC), Err(Error::ModelDomain(1)));
        assert!(m.eval(2, PREC).is_ok());
    }

    #[test]
    fn rossby_at_two_is_one_half() {
        let m = model_for(&ProblemKind::Rossby, PREC).unwrap();
        let v = m.eval(2, PREC).unwrap();
        assert!(rel_err(&v, &BigFloat::with_val(PREC, 0.5)) < 1e-70);
    }

    #[test]
    fn blackhole_at_three() {
        // (−1)³ Γ(3) / (2√2π) = −1/(√2π)
        let m = model_for(&ProblemKind::BlackHole, PREC).unwrap();
        let v = m.eval(3, PREC).unwrap();
        let expected = -(BigFloat::with_val(PREC, 2).sqrt() * pi(PREC)).recip();
        assert!(rel_err(&v, &expected) < 1e-70);
        assert!((v.to_f64() + 0.2250790790).abs() < 1e-9);
    }

    #[test]
    fn rossby_consecutive_ratio_is_n_minus_half() {
        let m = model_for(&ProblemKind::Rossby, PREC).unwrap();
        for n in 2..60u64 {
            let r = m.eval(n + 1, PREC).unwrap() / m.eval(n, PREC).unwrap();
            let expected = BigFloat::with_val(PREC, n) - 0.5;
            assert!(rel_err(&r, &expected) < 1e-70, "n = {n}");
        }
    }

    #[test]
    fn single_term_ratio_is_shift_over_chi() {
        for kind in [ProblemKind::BlackHole, ProblemKind::Anharmonic] {
            let m = model_for(&kind, PREC).unwrap();
            let t = &m.terms[0];
            for n in [2u64, 7, 40] {
                let r = m.eval(n + 1, PREC).unwrap() / m.eval(n, PREC).unwrap();
                let shift = Rational::from(&t.gamma + n) / t.chi_exact.as_ref().unwrap();
                assert!(rel_err(&r, &BigFloat::with_val(PREC, &shift)) < 1e-70);
            }
        }
    }

    #[test]
    fn exact_factorization_matches_log_space_evaluation() {
        let tol = BigFloat::with_val(PREC, 2).pow(16 - PREC as i32);
        for kind in [ProblemKind::BlackHole, ProblemKind::Anharmonic, ProblemKind::Rossby] {
            let m = model_for(&kind, PREC).unwrap();
            let f = m.exact_factorization().unwrap();
            for n in [2u32, 3, 10, 50, 80, 200] {
                let exact = BigFloat::with_val(PREC, &f.rational_part(n)) * f.transcendental_part(PREC);
                let logspace = m.eval(n as u64, PREC).unwrap();
                assert!(rel_err(&logspace, &exact) < tol, "{kind} n = {n}");
            }
        }
        assert!(model_for(&two_pole(1, 1), PREC).unwrap().exact_factorization().is_none());
    }

    #[test]
    fn anharmonic_factored_form() {
        // prediction · π^{3/2} / ((−1)^{n+1} 3ⁿ √6) = gamma_half_ratio(n) · √π
        let m = model_for(&ProblemKind::Anharmonic, PREC).unwrap();
        let f = m.exact_factorization().unwrap();
        for n in 2..30u32 {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            let expected = gamma_half_ratio(n) * Rational::from(3).pow(n) * sign;
            assert_eq!(f.rational_part(n), expected);
        }
    }

    #[test]
    fn rossby_prediction_is_exactly_rational() {
        let m = model_for(&ProblemKind::Rossby, PREC).unwrap();
        let f = m.exact_factorization().unwrap();
        assert_eq!(f.transcendental_part(PREC), 1);
        assert_eq!(f.rational_part(2), q(1, 2));
        assert_eq!(f.rational_part(4), q(15, 8));
    }

    #[test]
    fn two_pole_prediction_is_real() {
        let tol = BigFloat::with_val(PREC, 2).pow(-(PREC as i32) / 2);
        for (b, c) in [(1, 1), (1, 3), (3, 1)] {
            let m = model_for(&two_pole(b, c), PREC).unwrap();
            for n in [2u64, 5, 17, 40, 80] {
                let z = m.eval_complex(n, PREC).unwrap();
                let scale = z.abs().max(&BigFloat::with_val(PREC, 1));
                assert!(z.im.clone().abs() / scale < tol, "b={b} c={c} n={n}");
            }
        }
    }

    #[test]
    fn two_pole_normalized_prediction_is_a_sinusoid() {
        for (b, c) in [(1, 1), (1, 3), (3, 1)] {
            let m = model_for(&two_pole(b, c), PREC).unwrap();
            let chi = &m.terms[0].chi;
            let (k_abs, k_arg) = m.prefactor_polar(PREC);
            for n in [2u64, 9, 33, 80] {
                let norm = chi.abs().pow(n as u32) / log_gamma(&BigFloat::with_val(PREC, n)).unwrap().exp();
                let lhs = m.eval(n, PREC).unwrap() * norm;
                let phase = k_arg.clone() - chi.arg() * n;
                let rhs = k_abs.clone() * 2u32 * phase.cos();
                assert!((lhs - rhs).abs() < 1e-60, "b={b} c={c} n={n}");
            }
        }
    }
}
