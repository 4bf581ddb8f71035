use super::SeriesState;
use crate::numerics::Rational;

/// Fills order `n` of the black-hole model.
///
/// For `j = n, …, 1`:
///
/// ```text
/// 2j a[n,j] + (j+1)² a[n,j+1] = −2 Σ_{k=j−1}^{n−1} ω[n−1−k] a[k,j−1]
///                              + 2(j−1) a[n−1,j−1]
///                              + 2 Σ_{k=j}^{n−1} ω[n−k] a[k,j]
/// ```
///
/// with `a[n,n+1] = 0` and `a[k,0] = δ(k,0)`, then `ω[n] = a[n,1] / 2`.
/// Order 0 seeds `g₀ = 1`, `ω₀ = 1/2`.
pub fn step_blackhole(state: &mut SeriesState, n: usize) {
    assert_eq!(state.table.len(), n, "orders below {n} must be complete");
    if n == 0 {
        state.table.push(vec![Rational::from(1)]);
        state.coeffs.push(Rational::from((1, 2)));
        return;
    }
    let t = &state.table;
    let ni = n as isize;
    let mut row = vec![Rational::new(); n + 2];
    for j in (1..=ni).rev() {
        let mut rhs = Rational::new();
        for k in (j - 1)..ni {
            rhs -= Rational::from(state.coeff(ni - 1 - k) * t.get(k, j - 1)) * 2u32;
        }
        rhs += t.get(ni - 1, j - 1) * Rational::from(2 * (j - 1)) ;
        for k in j..ni {
            rhs += Rational::from(state.coeff(ni - k) * t.get(k, j)) * 2u32;
        }
        let ju = j as usize;
        rhs -= &row[ju + 1] * Rational::from((ju + 1) * (ju + 1)) ;
        row[ju] = rhs / Rational::from(2 * ju);
    }
    row.truncate(n + 1);
    let omega = Rational::from(&row[1] / 2u32);
    state.table.push(row);
    state.coeffs.push(omega);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_and_first_orders() {
        let mut s = SeriesState::new();
        step_blackhole(&mut s, 0);
        assert_eq!(s.coeffs, [Rational::from((1, 2))]);
        step_blackhole(&mut s, 1);
        assert_eq!(s.table.row(1).unwrap(), &[Rational::new(), Rational::from((-1, 2))]);
        assert_eq!(s.coeffs[1], Rational::from((-1, 4)));
        step_blackhole(&mut s, 2);
        assert_eq!(s.coeffs[2], Rational::from((5, 16)));
    }

    #[test]
    #[should_panic]
    fn orders_must_be_sequential() {
        let mut s = SeriesState::new();
        step_blackhole(&mut s, 1);
    }
}
