//! Exact rationals, exact gamma kernels and arbitrary-precision floats.
//!
//! [`Rational`] and [`Integer`] are GMP values, always in lowest terms.
//! [`BigFloat`] is an MPFR float; its precision travels with the value and
//! its exponent range (about ±2^30 bits) comfortably covers `Γ(n)` for
//! every order this crate produces.

mod complex;

pub use complex::ComplexBF;
pub use rug::{Integer, Rational};

use crate::{Error, Result};
use rug::float::Constant;

pub type BigFloat = rug::Float;

/// Mantissa width used when nothing else is configured.
pub const DEFAULT_PRECISION: u32 = 256;

/// Exact `m!`.
pub fn factorial(m: u32) -> Integer {
    Integer::from(Integer::factorial(m))
}

/// `Γ(m + 1/2) / √π = (2m)! / (4^m · m!)`, exactly.
pub fn gamma_half_ratio(m: u32) -> Rational {
    let num = factorial(2 * m);
    let den = (Integer::from(1) << (2 * m)) * factorial(m);
    Rational::from((num, den))
}

/// `ln Γ(x)` for `x > 0`, correctly rounded at the precision of `x`.
pub fn log_gamma(x: &BigFloat) -> Result<BigFloat> {
    if !x.is_finite() || *x <= 0 {
        return Err(Error::NonPositiveGammaArgument(x.to_string()));
    }
    Ok(x.clone().ln_gamma())
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if *b == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(Rational::from(a / b))
}

/// Correctly rounded conversion.
pub fn to_float(r: &Rational, prec: u32) -> BigFloat {
    BigFloat::with_val(prec, r)
}

pub fn pi(prec: u32) -> BigFloat {
    BigFloat::with_val(prec, Constant::Pi)
}

/// Parses `"p/q"`, integers and plain or exponent decimals (`"-0.125"`,
/// `"2.5e-3"`) into an exact rational. Decimals are read digit-exactly, so
/// `"0.1"` is `1/10`, not the nearest binary double.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::ParseRational(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: Integer = p.trim().parse().map_err(|_| err())?;
        let q: Integer = q.trim().parse().map_err(|_| err())?;
        if q == 0 {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::from((p, q)));
    }

    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..].parse().map_err(|_| err())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from(all_digits.parse::<Integer>().map_err(|_| err())?);
    let scale = exponent - frac_part.len() as i32;
    let ten_pow = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    if scale >= 0 {
        value *= ten_pow;
    } else {
        value /= ten_pow;
    }
    if negative {
        value = -value;
    }
    Ok(value)
}
