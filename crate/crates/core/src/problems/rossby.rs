use super::SeriesState;
use crate::numerics::Rational;

/// Fills eigenfunction order `m` of the simplified Rossby-wave problem and,
/// for even `m = 2n ≥ 2`, the eigenvalue coefficient `λ[n]` of `ε^(2n)`.
///
/// Odd `m = 2n+1`, `ψ_m = Σ a[m,k] x^(2k−1)`, for `k = n, …, 1`:
///
/// ```text
/// 2(2k−1) a[m,k] = 2k(2k+1) a[m,k+1] + Σ_{p=1}^{n} a[2(n−p)+1, k−p+1]
///                − Σ_{p=1}^{n} a[2(n−p), k−p] − Σ_{p=0}^{n} λ[p] a[2(n−p)+1, k]
/// ```
///
/// Even `m = 2n`, `ψ_m = Σ a[m,k] x^(2k)`, for `k = n, …, 1`:
///
/// ```text
/// 4k a[m,k] = (2k+2)(2k+1) a[m,k+1] + Σ_{p=1}^{n} a[2(n−p), k−p+1]
///           − Σ_{p=1}^{n−1} a[2(n−p)−1, k−p+1] − Σ_{p=0}^{n} λ[p] a[2(n−p), k]
/// ```
///
/// The eigenvalue comes from the same even equation at `k = 0`, keeping
/// every term: `λ[n] = 2a[2n,1] + a[2n−2,0] + …`, where `a[0,0] = 1` makes
/// the `n = 1` case `λ₁ = 1` and all later cases reduce to `λ[n] = 2a[2n,1]`.
/// The `p = 0` terms carry `λ₀ = 0` and are folded into the pivot.
pub fn step_rossby(state: &mut SeriesState, m: usize) {
    assert_eq!(state.table.len(), m, "orders below {m} must be complete");
    if m == 0 {
        state.table.push(vec![Rational::from(1)]);
        state.coeffs.push(Rational::new());
        return;
    }
    let t = &state.table;
    let n = (m / 2) as isize;
    let lambda0 = state.coeff(0).clone();
    let mut row = vec![Rational::new(); n as usize + 2];

    if m % 2 == 1 {
        for k in (1..=n).rev() {
            let ku = k as usize;
            let mut rhs = &row[ku + 1] * Rational::from(2 * k * (2 * k + 1)) ;
            for p in 1..=n {
                rhs += t.get(2 * (n - p) + 1, k - p + 1);
                rhs -= t.get(2 * (n - p), k - p);
                rhs -= Rational::from(state.coeff(p) * t.get(2 * (n - p) + 1, k));
            }
            let pivot = Rational::from(2 * (2 * k - 1)) + &lambda0;
            row[ku] = rhs / pivot;
        }
        row.truncate(n as usize + 1);
        state.table.push(row);
        return;
    }

    // λ[n] · a[0,k] vanishes for k ≥ 1, so the row never needs λ[n].
    let even_rhs = |row: &[Rational], k: isize| {
        let mut rhs = match row.get(k as usize + 1) {
            Some(next) => next * Rational::from((2 * k + 2) * (2 * k + 1)) ,
            None => Rational::new(),
        };
        for p in 1..=n {
            rhs += t.get(2 * (n - p), k - p + 1);
        }
        for p in 1..n {
            rhs -= t.get(2 * (n - p) - 1, k - p + 1);
            rhs -= Rational::from(state.coeff(p) * t.get(2 * (n - p), k));
        }
        rhs
    };
    for k in (1..=n).rev() {
        let pivot = Rational::from(4 * k) + &lambda0;
        row[k as usize] = even_rhs(&row, k) / pivot;
    }
    // k = 0: 0 = even_rhs(0) − λ₀ a[2n,0] − λ[n] a[0,0], with a[2n,0] = 0.
    let lambda = even_rhs(&row, 0) / t.get(0, 0);
    row.truncate(n as usize + 1);
    state.table.push(row);
    state.coeffs.push(lambda);
}
