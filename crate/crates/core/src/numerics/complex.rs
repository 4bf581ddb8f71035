use super::BigFloat;
use rug::Rational;
use std::fmt;

/// Complex number over two MPFR floats of equal precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBF {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl ComplexBF {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        ComplexBF { re, im }
    }

    pub fn from_real(re: BigFloat) -> Self {
        let im = BigFloat::new(re.prec());
        ComplexBF { re, im }
    }

    pub fn from_rationals(re: &Rational, im: &Rational, prec: u32) -> Self {
        ComplexBF {
            re: BigFloat::with_val(prec, re),
            im: BigFloat::with_val(prec, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ComplexBF::new(self.re.clone(), -self.im.clone())
    }

    pub fn abs(&self) -> BigFloat {
        self.re.clone().hypot(&self.im)
    }

    /// Principal argument in `(−π, π]`. A signed-zero imaginary part is
    /// read as `+0`, so the negative real axis maps to `+π`.
    pub fn arg(&self) -> BigFloat {
        if self.im.is_zero() {
            let y = BigFloat::new(self.im.prec());
            y.atan2(&self.re)
        } else {
            self.im.clone().atan2(&self.re)
        }
    }

    /// Principal logarithm, `ln|z| + i·arg z`.
    pub fn ln(&self) -> Self {
        ComplexBF::new(self.abs().ln(), self.arg())
    }

    pub fn exp(&self) -> Self {
        let modulus = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(BigFloat::new(self.im.prec()));
        ComplexBF::new(c * &modulus, s * modulus)
    }

    pub fn add(&self, other: &Self) -> Self {
        ComplexBF::new(
            self.re.clone() + &other.re,
            self.im.clone() + &other.im,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        ComplexBF::new(
            self.re.clone() - &other.re,
            self.im.clone() - &other.im,
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let re = self.re.clone() * &other.re - self.im.clone() * &other.im;
        let im = self.re.clone() * &other.im + self.im.clone() * &other.re;
        ComplexBF::new(re, im)
    }

    pub fn div(&self, other: &Self) -> Self {
        let den = other.re.clone().square() + other.im.clone().square();
        let re = (self.re.clone() * &other.re + self.im.clone() * &other.im) / &den;
        let im = (self.im.clone() * &other.re - self.re.clone() * &other.im) / den;
        ComplexBF::new(re, im)
    }

    pub fn scale(&self, factor: &BigFloat) -> Self {
        ComplexBF::new(self.re.clone() * factor, self.im.clone() * factor)
    }

    /// Rounds both parts to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexBF::new(
            BigFloat::with_val(prec, &self.re),
            BigFloat::with_val(prec, &self.im),
        )
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for ComplexBF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64_pair();
        if im.is_sign_negative() {
            write!(f, "{re} - {}i", -im)
        } else {
            write!(f, "{re} + {im}i")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::pi;
    use proptest::prelude::*;

    const PREC: u32 = 256;

    fn c(re: f64, im: f64) -> ComplexBF {
        ComplexBF::new(BigFloat::with_val(PREC, re), BigFloat::with_val(PREC, im))
    }

    fn close(a: &ComplexBF, b: &ComplexBF, tol: f64) -> bool {
        a.sub(b).abs() < tol
    }

    #[test]
    fn negative_real_axis_has_argument_pi() {
        let z = ComplexBF::new(BigFloat::with_val(PREC, -2), -BigFloat::new(PREC));
        assert_eq!(z.arg(), pi(PREC));
        assert_eq!(c(-1.0, 0.0).ln().im, pi(PREC));
    }

    #[test]
    fn log_of_one_minus_i() {
        let l = c(1.0, -1.0).ln();
        let (re, im) = l.to_f64_pair();
        assert!((re - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((im + std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = c(1.5, -0.25);
        let b = c(-3.0, 7.0);
        assert!(close(&a.mul(&b).div(&b), &a, 1e-70));
    }

    proptest! {
        #[test]
        fn exp_inverts_ln(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            prop_assume!(re.abs() + im.abs() > 1e-6);
            let z = c(re, im);
            let back = z.ln().exp();
            let tol = z.abs().to_f64() * 1e-60;
            prop_assert!(close(&back, &z, tol));
        }

        #[test]
        fn principal_argument_range(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            let arg = c(re, im).arg();
            prop_assert!(arg <= pi(PREC));
            prop_assert!(arg > -pi(PREC));
        }

        #[test]
        fn ln_commutes_with_conjugation(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            prop_assume!(im != 0.0);
            let z = c(re, im);
            prop_assert!(close(&z.conj().ln(), &z.ln().conj(), 1e-60));
        }
    }
}
