//! Structural properties of the computed series and their analysis.

use late_terms_core::analysis::{growth_sequence, oscillation_residual, oscillation_table, slope_fit};
use late_terms_core::asymptotics::model_for;
use late_terms_core::numerics::{BigFloat, Rational};
use late_terms_core::{compute_series, EigenSeries, ProblemKind, ProblemSpec};
use proptest::prelude::*;

const PREC: u32 = 256;

fn series(kind: ProblemKind, n_max: u32) -> EigenSeries {
    compute_series(&ProblemSpec::new(kind, n_max).unwrap()).unwrap()
}

fn two_pole(b: i64, c: i64) -> ProblemKind {
    ProblemKind::TwoPole { b: Rational::from(b), c: Rational::from(c) }
}

fn all_kinds() -> Vec<ProblemKind> {
    vec![
        ProblemKind::BlackHole,
        ProblemKind::Anharmonic,
        ProblemKind::Rossby,
        two_pole(1, 1),
        two_pole(1, 3),
        two_pole(3, 1),
    ]
}

#[test]
fn prefix_is_stable_when_extending_order() {
    for kind in all_kinds() {
        let short = series(kind.clone(), 40);
        let long = series(kind.clone(), 80);
        assert_eq!(short.coeffs[..], long.coeffs[..41], "{kind}");
        for n in 0..=40 {
            if !matches!(kind, ProblemKind::Rossby) {
                assert_eq!(short.table.row(n), long.table.row(n), "{kind} row {n}");
            }
        }
    }
}

#[test]
fn sign_structure() {
    let n_max = 80;
    let bh = series(ProblemKind::BlackHole, n_max);
    let an = series(ProblemKind::Anharmonic, n_max);
    let ro = series(ProblemKind::Rossby, n_max);
    for n in 10..=n_max as usize {
        let alt = if n % 2 == 0 { 1 } else { -1 };
        assert_eq!(bh.coeffs[n].cmp0() as i32, alt, "blackhole n = {n}");
        assert_eq!(an.coeffs[n].cmp0() as i32, -alt, "anharmonic n = {n}");
        assert!(ro.coeffs[n] > 0, "rossby n = {n}");
    }
}

#[test]
fn rossby_rows_have_definite_parity() {
    // Odd rows are stored on odd powers, even rows on even powers; the
    // lowest non-trivial rows vanish identically.
    let s = series(ProblemKind::Rossby, 20);
    assert_eq!(s.table.len(), 41);
    for n in [1usize, 2] {
        assert!(s.table.row(n).unwrap().iter().all(|c| *c == 0), "row {n}");
    }
    for n in 3..=40usize {
        let row = s.table.row(n).unwrap();
        let stored = if n % 2 == 1 { (n - 1) / 2 } else { n / 2 };
        assert_eq!(row.len(), stored + 1, "row {n}");
        assert_eq!(row[0], 0, "row {n}");
    }
}

#[test]
fn growth_tracks_factorial_over_singulant() {
    // |cₙ|^(1/n) ≈ n / (e|χ|) at n = 80.
    let e = std::f64::consts::E;
    for (kind, chi_abs) in
        [(ProblemKind::BlackHole, 1.0), (ProblemKind::Anharmonic, 1.0 / 3.0), (ProblemKind::Rossby, 1.0)]
    {
        let s = series(kind.clone(), 80);
        let g = growth_sequence(&s.coeffs, PREC);
        let ratio = g.at(80).unwrap().to_f64() / (80.0 / (e * chi_abs));
        assert!((0.85..=1.15).contains(&ratio), "{kind}: {ratio}");
    }
}

#[test]
fn anharmonic_growth_slope() {
    let s = series(ProblemKind::Anharmonic, 60);
    let g = growth_sequence(&s.coeffs, PREC);
    let slope = slope_fit(&g.values, 1, 40, 60).unwrap().to_f64();
    let target = 3.0 / std::f64::consts::E;
    assert!(slope >= 0.9 * target && slope <= 1.2 * target, "{slope}");
}

#[test]
fn twopole_residual_decreases_with_order() {
    let kind = two_pole(1, 3);
    let s = series(kind.clone(), 80);
    let model = model_for(&kind, PREC).unwrap();
    let rows = oscillation_table(&s, &model, 20, 80, PREC).unwrap();
    let amplitude = model.prefactor_polar(PREC).0 * 2u32;
    let early = oscillation_residual(&rows, &amplitude, 20, 40).unwrap();
    let late = oscillation_residual(&rows, &amplitude, 60, 80).unwrap();
    assert!(late.median < early.median, "{} vs {}", late.median, early.median);
    assert!(late.median < 0.1);
}

#[test]
fn oscillation_numeric_is_bounded() {
    let kind = two_pole(1, 3);
    let s = series(kind.clone(), 60);
    let model = model_for(&kind, PREC).unwrap();
    let amplitude = model.prefactor_polar(PREC).0 * 2u32;
    for row in oscillation_table(&s, &model, 20, 60, PREC).unwrap() {
        assert!(row.numeric.clone().abs() < amplitude.clone() * 2u32, "n = {}", row.n);
        assert!(row.predicted.clone().abs() <= BigFloat::with_val(PREC, &amplitude) * 1.000001);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn twopole_series_is_real_and_stable(b in 1i64..6, bd in 1i64..4, c in 1i64..6, cd in 1i64..4) {
        let kind = ProblemKind::TwoPole { b: Rational::from((b, bd)), c: Rational::from((c, cd)) };
        let short = series(kind.clone(), 8);
        let long = series(kind, 12);
        prop_assert_eq!(&short.coeffs[..], &long.coeffs[..9]);
        prop_assert_eq!(&short.coeffs[0], &Rational::from(1));
        let norm = Rational::from((b * b, bd * bd)) + Rational::from((c * c, cd * cd));
        let first = Rational::from((c, cd)) / norm;
        prop_assert_eq!(&short.coeffs[1], &first);
    }
}
