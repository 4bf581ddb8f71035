use super::SeriesState;
use crate::numerics::Rational;

/// Fills order `n` of the quartic anharmonic oscillator, `gₙ = Σ a[n,k] x^(2k)`.
///
/// For `k = 2n, …, 1`:
///
/// ```text
/// 2k a[n,k] = (2k+2)(2k+1) a[n,k+1] − a[n−1,k−2]/4 + Σ_{i=1}^{n} λ[i] a[n−i,k]
/// ```
///
/// then `λ[n] = −2 a[n,1]`. The `i = n` term multiplies `a[0,k] = 0`, so the
/// unknown `λ[n]` never enters the row.
pub fn step_anharmonic(state: &mut SeriesState, n: usize) {
    assert_eq!(state.table.len(), n, "orders below {n} must be complete");
    if n == 0 {
        state.table.push(vec![Rational::from(1)]);
        state.coeffs.push(Rational::from((1, 2)));
        return;
    }
    let t = &state.table;
    let ni = n as isize;
    let top = 2 * n;
    let mut row = vec![Rational::new(); top + 2];
    for k in (1..=top).rev() {
        let ki = k as isize;
        let mut rhs = &row[k + 1] * Rational::from((2 * k + 2) * (2 * k + 1)) ;
        rhs -= Rational::from(t.get(ni - 1, ki - 2) / 4u32);
        for i in 1..ni {
            rhs += Rational::from(state.coeff(i) * t.get(ni - i, ki));
        }
        row[k] = rhs / Rational::from(2 * k);
    }
    row.truncate(top + 1);
    let lambda = Rational::from(&row[1] * -2i32);
    state.table.push(row);
    state.coeffs.push(lambda);
}
