//! Table builders behind the `coeffs`, `compare`, `growth` and
//! `oscillation` subcommands. Each returns the rendered output; writing it
//! is left to the caller.

use crate::config::{ConfigError, RunConfig};
use crate::output::{format_decimal, format_rational, metadata_lines, write_csv, OutputError, OutputRow, Table};
use late_terms_core::analysis::{growth_sequence, oscillation_curve, oscillation_table, ratio_sequence, slope_fit, GrowthSequence};
use late_terms_core::asymptotics::model_for;
use late_terms_core::numerics::to_float;
use late_terms_core::{compute_series, BigFloat, EigenSeries, ProblemKind, ProblemSpec, Rational};
use std::collections::BTreeMap;

/// Samples of the continuous cosine per unit step in `n`.
pub const OSCILLATION_SAMPLES: u32 = 10;

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] late_terms_core::Error),
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{0}")]
    Usage(String),
}

pub type CommandResult<T> = Result<T, CommandError>;

fn series_for(config: &RunConfig) -> CommandResult<(ProblemKind, EigenSeries)> {
    let kind = config.problem_kind()?;
    let series = compute_series(&ProblemSpec::new(kind.clone(), config.n_max)?)?;
    Ok((kind, series))
}

fn coefficient_rows(series: &EigenSeries, prec: u32) -> Vec<OutputRow> {
    series
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, c)| OutputRow {
            n: n as u32,
            coeff_exact: format_rational(c),
            coeff_float: format_decimal(&to_float(c, prec)),
            predicted: String::new(),
            ratio: String::new(),
            richardson: BTreeMap::new(),
        })
        .collect()
}

/// One row per order `0..=n_max`, prediction columns empty.
pub fn coeffs(config: &RunConfig) -> CommandResult<Table> {
    let (_, series) = series_for(config)?;
    Ok(Table { config: config.clone(), richardson_orders: vec![], rows: coefficient_rows(&series, config.precision_bits) })
}

/// Coefficients plus prediction, ratio and Richardson columns from
/// `n_start` on.
pub fn compare(config: &RunConfig) -> CommandResult<Table> {
    let highest = config.richardson_orders.iter().copied().max().unwrap_or(0);
    if config.n_max < config.n_start + highest + 1 {
        return Err(CommandError::Usage(format!(
            "n_max = {} is too small: Richardson order {highest} from n_start = {} needs n_max ≥ {}",
            config.n_max,
            config.n_start,
            config.n_start + highest + 1
        )));
    }
    let prec = config.precision_bits;
    let (kind, series) = series_for(config)?;
    let model = model_for(&kind, prec)?;
    let ratios = ratio_sequence(&series, &model, config.n_start, config.n_max, prec)?
        .with_richardson(&config.richardson_orders)?;

    let mut rows = coefficient_rows(&series, prec);
    for row in rows.iter_mut().filter(|r| r.n >= config.n_start) {
        row.predicted = format_decimal(&model.eval(row.n as u64, prec)?);
        row.ratio = format_decimal(ratios.at(row.n).expect("ratio in range"));
        for &m in &config.richardson_orders {
            let value = ratios.richardson_at(m, row.n).map(format_decimal).unwrap_or_default();
            row.richardson.insert(m, value);
        }
    }
    Ok(Table { config: config.clone(), richardson_orders: config.richardson_orders.clone(), rows })
}

/// `(n, |cₙ|^(1/n))` rows with a slope-fit footer over the top half of the
/// range.
pub fn growth(config: &RunConfig) -> CommandResult<String> {
    let (_, series) = series_for(config)?;
    let g = growth_sequence(&series.coeffs, config.precision_bits);
    render_growth(&metadata_lines(config), &g)
}

/// Renders a growth sequence; exposed so synthetic coefficient lists can be
/// run through the same formatting and fit.
pub fn render_growth(meta: &[String], g: &GrowthSequence) -> CommandResult<String> {
    let header = vec!["n".to_string(), "growth".to_string()];
    let records = g.values.iter().enumerate().map(|(k, v)| vec![(k as u32 + GrowthSequence::N_START).to_string(), format_decimal(v)]);
    let n_hi = g.values.len() as u32;
    let n_lo = (n_hi / 2).max(GrowthSequence::N_START);
    let footer = match slope_fit(&g.values, GrowthSequence::N_START, n_lo, n_hi) {
        Ok(slope) => format!("slope_fit n in [{n_lo}, {n_hi}]: {}", format_decimal(&slope)),
        Err(e) => format!("slope_fit n in [{n_lo}, {n_hi}]: unavailable ({e})"),
    };
    Ok(write_csv(meta, &header, records, &[footer])?)
}

/// Growth sequence of an arbitrary coefficient list (entry 0 ignored).
pub fn growth_of(coeffs: &[Rational], prec: u32) -> GrowthSequence {
    growth_sequence(coeffs, prec)
}

/// Normalised two-pole coefficients against the cosine model, with the
/// model also sampled at tenths of an order.
pub fn oscillation(config: &RunConfig) -> CommandResult<String> {
    let (kind, series) = series_for(config)?;
    if !matches!(kind, ProblemKind::TwoPole { .. }) {
        return Err(CommandError::Usage(format!(
            "oscillation needs problem `twopole`, got `{}`",
            kind.id()
        )));
    }
    let prec = config.precision_bits;
    let model = model_for(&kind, prec)?;
    let n_start = config.n_start.min(config.n_max);
    let table = oscillation_table(&series, &model, n_start, config.n_max, prec)?;
    let (k_abs, _) = model.prefactor_polar(prec);

    let mut records = Vec::new();
    for row in &table {
        let steps = if row.n == config.n_max { 1 } else { OSCILLATION_SAMPLES };
        for k in 0..steps {
            let t = BigFloat::with_val(prec, row.n) + BigFloat::with_val(prec, k) / OSCILLATION_SAMPLES;
            let continuous = format_decimal(&oscillation_curve(&model, &t, prec)?);
            if k == 0 {
                records.push(vec![row.n.to_string(), format_decimal(&row.numeric), format_decimal(&row.predicted), continuous]);
            } else {
                records.push(vec![format!("{}.{k}", row.n), String::new(), String::new(), continuous]);
            }
        }
    }
    let mut meta = metadata_lines(config);
    meta.push(format!("amplitude 2|K| = {}", format_decimal(&(k_abs * 2u32))));
    meta.push(format!("|chi0| = {}", format_decimal(&model.terms[0].chi.abs())));
    let header: Vec<String> =
        ["n", "normalized_numeric", "normalized_predicted", "continuous_predicted"].iter().map(|s| s.to_string()).collect();
    Ok(write_csv(&meta, &header, records, &[])?)
}
