use super::SeriesState;
use crate::numerics::Rational;
use crate::{Error, Result};

/// Fills order `n` of the two-pole model. With `s = 1/(b² + c²)`, for
/// `i = n, …, 1`:
///
/// ```text
/// i a[n,i] = Σ_{k=1}^{n} ω[k] a[n−k,i] − (i+1)² a[n,i+1]
///          − cs ( −2 Σ_{k=0}^{n−1} ω[k] a[n−k−1,i−1] + 2(i−1) a[n−1,i−1]
///                 + a[n−1,i−1] + i² a[n−1,i] )
///          − s ( −Σ_{k=0}^{n−2} ω[k] a[n−2−k,i−2] + (i−2) a[n−2,i−2] )
/// ```
///
/// then `ω[n] = a[n,1]`. Sums over negative orders are empty.
pub fn step_twopole(state: &mut SeriesState, n: usize, b: &Rational, c: &Rational) -> Result<()> {
    assert_eq!(state.table.len(), n, "orders below {n} must be complete");
    let norm = Rational::from(b * b) + Rational::from(c * c);
    if norm == 0 {
        return Err(Error::InvalidParameters("b² + c² must be nonzero".into()));
    }
    if n == 0 {
        state.table.push(vec![Rational::from(1)]);
        state.coeffs.push(Rational::from(1));
        return Ok(());
    }
    let s = Rational::from(norm.recip_ref());
    let cs = Rational::from(c * &s);
    let t = &state.table;
    let ni = n as isize;
    let mut row = vec![Rational::new(); n + 2];
    for i in (1..=ni).rev() {
        let iu = i as usize;
        // ω[n] a[0,i] = 0 for i ≥ 1
        let mut rhs = Rational::new();
        for k in 1..ni {
            rhs += Rational::from(state.coeff(k) * t.get(ni - k, i));
        }
        rhs -= &row[iu + 1] * Rational::from((iu + 1) * (iu + 1)) ;

        let mut first = Rational::new();
        for k in 0..ni {
            first -= Rational::from(state.coeff(k) * t.get(ni - k - 1, i - 1)) * 2u32;
        }
        first += t.get(ni - 1, i - 1) * Rational::from(2 * (i - 1) + 1) ;
        first += t.get(ni - 1, i) * Rational::from(i * i) ;
        rhs -= first * &cs;

        let mut second = Rational::new();
        for k in 0..=(ni - 2) {
            second -= Rational::from(state.coeff(k) * t.get(ni - 2 - k, i - 2));
        }
        second += t.get(ni - 2, i - 2) * Rational::from(i - 2) ;
        rhs -= second * &s;

        row[iu] = rhs / Rational::from(iu);
    }
    row.truncate(n + 1);
    let omega = row[1].clone();
    state.table.push(row);
    state.coeffs.push(omega);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(b: i64, c: i64, n_max: usize) -> SeriesState {
        let (b, c) = (Rational::from(b), Rational::from(c));
        let mut s = SeriesState::new();
        for n in 0..=n_max {
            step_twopole(&mut s, n, &b, &c).unwrap();
        }
        s
    }

    #[test]
    fn first_order_is_c_over_norm() {
        for (b, c) in [(1, 1), (1, 3), (3, 1), (2, 7)] {
            let s = run(b, c, 1);
            let expected = Rational::from((c, b * b + c * c));
            assert_eq!(s.coeffs[1], expected);
            assert_eq!(s.table.row(1).unwrap()[1], expected);
        }
    }

    #[test]
    fn second_order_regressions() {
        assert_eq!(run(1, 1, 2).coeffs[2], 0);
        assert_eq!(run(1, 3, 2).coeffs[2], Rational::from((4, 25)));
        assert_eq!(run(3, 1, 2).coeffs[2], Rational::from((-4, 25)));
    }

    #[test]
    fn zero_norm_is_rejected() {
        let mut s = SeriesState::new();
        let z = Rational::new();
        assert!(step_twopole(&mut s, 0, &z, &z).is_err());
    }
}
