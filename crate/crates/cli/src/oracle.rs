//! Rayleigh–Schrödinger perturbation theory for `−Ψ'' + x²Ψ/4 + εx⁴Ψ/4`,
//! independent of the recurrence engines.
//!
//! With `x = √2 y` the perturbation is `V = y⁴ = (a + a†)⁴ / 4` on the
//! harmonic-oscillator ladder. A state `Σ c_k |k⟩` is held as `r_k` with
//! `c_k = r_k √(k!)`, so `a†: r_k → r_(k+1)`, `a: r_k → k·r_(k−1)` and all
//! amplitudes stay rational.

use late_terms_core::Rational;

type State = Vec<Rational>;

fn add_into(acc: &mut State, other: &State) {
    if acc.len() < other.len() {
        acc.resize(other.len(), Rational::new());
    }
    for (a, b) in acc.iter_mut().zip(other) {
        *a += b;
    }
}

fn position(s: &State) -> State {
    let mut out = vec![Rational::new(); s.len() + 1];
    for (k, r) in s.iter().enumerate() {
        out[k + 1] += r;
        if k > 0 {
            out[k - 1] += Rational::from(r * k as u32);
        }
    }
    out
}

fn perturbation(s: &State) -> State {
    let mut v = s.clone();
    for _ in 0..4 {
        v = position(&v);
    }
    v.into_iter().map(|r| r / 4u32).collect()
}

/// Ground-state energies `E_0..=E_order` in intermediate normalisation.
pub fn rayleigh_schrodinger(order: usize) -> Vec<Rational> {
    let mut energies = vec![Rational::from((1, 2))];
    let mut states: Vec<State> = vec![vec![Rational::from(1)]];
    for n in 1..=order {
        let mut rhs = perturbation(&states[n - 1]);
        energies.push(rhs[0].clone());
        for k in 1..=n {
            let scaled: State = states[n - k].iter().map(|r| -Rational::from(r * &energies[k])).collect();
            add_into(&mut rhs, &scaled);
        }
        // (E⁰₀ − H₀)ψ_n = rhs with ⟨0|ψ_n⟩ = 0; E⁰₀ − E⁰_k = −k.
        let psi = rhs
            .into_iter()
            .enumerate()
            .map(|(k, r)| if k == 0 { Rational::new() } else { -r / k as u32 })
            .collect();
        states.push(psi);
    }
    energies
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        let e = rayleigh_schrodinger(3);
        assert_eq!(e[0], Rational::from((1, 2)));
        assert_eq!(e[1], Rational::from((3, 4)));
        assert_eq!(e[2], Rational::from((-21, 8)));
        assert_eq!(e[3], Rational::from((333, 16)));
    }
}
