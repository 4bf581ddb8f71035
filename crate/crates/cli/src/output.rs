//! Tabular output: CSV with `#` metadata lines, the equivalent JSON, parsers
//! for both, and atomic file writes.
//!
//! Decimals are written with 20 significant digits in scientific notation,
//! rounded to nearest from the working-precision value, so a fixed config
//! always produces the same bytes. Exact coefficients travel alongside as
//! `p/q` strings.

use crate::config::RunConfig;
use late_terms_core::{BigFloat, Rational};
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SIGNIFICANT_DIGITS: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("I/O error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed table: {0}")]
    Malformed(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 20 significant digits, `NaN` for NaN, `0` for zero.
pub fn format_decimal(x: &BigFloat) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_zero() {
        return "0".into();
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS, x)
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// One order of a coefficient table. Prediction columns are empty strings
/// when not computed; `richardson[m]` is the `ratio_r{m}` column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputRow {
    pub n: u32,
    pub coeff_exact: String,
    pub coeff_float: String,
    pub predicted: String,
    pub ratio: String,
    pub richardson: BTreeMap<u32, String>,
}

impl OutputRow {
    pub fn exact(&self) -> Result<Rational, OutputError> {
        self.coeff_exact
            .parse()
            .map_err(|_| OutputError::Malformed(format!("coeff_exact `{}` is not a rational", self.coeff_exact)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub config: RunConfig,
    pub richardson_orders: Vec<u32>,
    pub rows: Vec<OutputRow>,
}

fn richardson_column(m: u32) -> String {
    format!("ratio_r{m}")
}

impl Table {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> =
            ["n", "coeff_exact", "coeff_float", "predicted", "ratio"].iter().map(|s| s.to_string()).collect();
        h.extend(self.richardson_orders.iter().map(|&m| richardson_column(m)));
        h
    }

    pub fn to_csv(&self) -> Result<String, OutputError> {
        let header = self.header();
        let records = self.rows.iter().map(|r| {
            let mut rec = vec![r.n.to_string(), r.coeff_exact.clone(), r.coeff_float.clone(), r.predicted.clone(), r.ratio.clone()];
            rec.extend(self.richardson_orders.iter().map(|m| r.richardson.get(m).cloned().unwrap_or_default()));
            rec
        });
        write_csv(&metadata_lines(&self.config), &header, records, &[])
    }

    pub fn to_json(&self) -> Result<String, OutputError> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = Map::new();
                obj.insert("n".into(), Value::from(r.n));
                obj.insert("coeff_exact".into(), Value::from(r.coeff_exact.clone()));
                obj.insert("coeff_float".into(), Value::from(r.coeff_float.clone()));
                obj.insert("predicted".into(), Value::from(r.predicted.clone()));
                obj.insert("ratio".into(), Value::from(r.ratio.clone()));
                for m in &self.richardson_orders {
                    obj.insert(richardson_column(*m), Value::from(r.richardson.get(m).cloned().unwrap_or_default()));
                }
                Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({
            "version": VERSION,
            "config": self.config,
            "decimals": decimals_note(&self.config),
            "columns": self.header(),
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_csv(text: &str) -> Result<Self, OutputError> {
        let config = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .find_map(|l| l.strip_prefix("# config "))
            .ok_or_else(|| OutputError::Malformed("missing `# config` line".into()))?;
        let config: RunConfig = serde_json::from_str(config)?;
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let orders = parse_header(&header)?;
        let mut rows = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let field = |i: usize| rec.get(i).unwrap_or_default().to_string();
            let n = field(0).parse().map_err(|_| OutputError::Malformed(format!("bad order `{}`", field(0))))?;
            let richardson = orders.iter().enumerate().map(|(k, &m)| (m, field(5 + k))).collect();
            rows.push(OutputRow { n, coeff_exact: field(1), coeff_float: field(2), predicted: field(3), ratio: field(4), richardson });
        }
        Ok(Table { config, richardson_orders: orders, rows })
    }

    pub fn from_json(text: &str) -> Result<Self, OutputError> {
        let doc: Value = serde_json::from_str(text)?;
        let config: RunConfig = serde_json::from_value(doc["config"].clone())?;
        let header: Vec<String> = serde_json::from_value(doc["columns"].clone())?;
        let orders = parse_header(&header)?;
        let rows = doc["rows"]
            .as_array()
            .ok_or_else(|| OutputError::Malformed("`rows` is not an array".into()))?
            .iter()
            .map(|row| {
                let text = |key: &str| row[key].as_str().map(str::to_string).ok_or_else(|| OutputError::Malformed(format!("missing `{key}`")));
                let n = row["n"].as_u64().ok_or_else(|| OutputError::Malformed("missing `n`".into()))? as u32;
                let mut richardson = BTreeMap::new();
                for &m in &orders {
                    richardson.insert(m, text(&richardson_column(m))?);
                }
                Ok(OutputRow {
                    n,
                    coeff_exact: text("coeff_exact")?,
                    coeff_float: text("coeff_float")?,
                    predicted: text("predicted")?,
                    ratio: text("ratio")?,
                    richardson,
                })
            })
            .collect::<Result<Vec<_>, OutputError>>()?;
        Ok(Table { config, richardson_orders: orders, rows })
    }
}

fn parse_header(header: &[String]) -> Result<Vec<u32>, OutputError> {
    let fixed = ["n", "coeff_exact", "coeff_float", "predicted", "ratio"];
    if header.len() < fixed.len() || header.iter().zip(fixed).any(|(h, f)| h != f) {
        return Err(OutputError::Malformed(format!("unexpected header {header:?}")));
    }
    header[fixed.len()..]
        .iter()
        .map(|h| {
            h.strip_prefix("ratio_r")
                .and_then(|m| m.parse().ok())
                .ok_or_else(|| OutputError::Malformed(format!("unexpected column `{h}`")))
        })
        .collect()
}

fn decimals_note(config: &RunConfig) -> String {
    format!(
        "{SIGNIFICANT_DIGITS} significant digits, rounded to nearest from {}-bit values; coeff_exact is exact",
        config.precision_bits
    )
}

pub fn metadata_lines(config: &RunConfig) -> Vec<String> {
    vec![
        format!("late-terms {VERSION}"),
        format!("config {}", config.to_json()),
        format!("decimals: {}", decimals_note(config)),
    ]
}

/// `#`-prefixed `meta` lines, the header, the records, then `#`-prefixed
/// `footer` lines.
pub fn write_csv<I>(meta: &[String], header: &[String], records: I, footer: &[String]) -> Result<String, OutputError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = String::new();
    for line in meta {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for rec in records {
        w.write_record(&rec)?;
    }
    let body = w.into_inner().map_err(|e| OutputError::Malformed(e.to_string()))?;
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    for line in footer {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    Ok(out)
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), OutputError> {
    let io = |source| OutputError::Io { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
