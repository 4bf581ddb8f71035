//! Order-by-order recurrence engines for the four model eigenvalue problems.
//!
//! Each engine fills one row of polynomial coefficients per order and reads
//! the eigenvalue coefficient off the row's solvability condition. Rows are
//! solved by back-substitution from the top power down; the only divisions
//! are by positive integer pivots (and by `b² + c²` for the two-pole model).
//!
//! Row index conventions in [`CoefficientTable`]:
//!
//! | problem      | row `n` entry `j` multiplies                      |
//! |--------------|---------------------------------------------------|
//! | black hole   | `x^j`, `j = 0..=n`                                |
//! | anharmonic   | `x^(2j)`, `j = 0..=2n`                            |
//! | Rossby, odd  | `x^(2j-1)`, `j = 1..=(n-1)/2` (entry 0 unused)    |
//! | Rossby, even | `x^(2j)`, `j = 0..=n/2`                           |
//! | two-pole     | `x^j`, `j = 0..=n`                                |
//!
//! Row 0 is always the constant `1`; entry 0 of every later row is zero.

mod anharmonic;
mod blackhole;
mod rossby;
mod twopole;

pub use anharmonic::step_anharmonic;
pub use blackhole::step_blackhole;
pub use rossby::step_rossby;
pub use twopole::step_twopole;

use crate::numerics::Rational;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

/// Identifiers accepted by [`ProblemKind::from_id`].
pub const PROBLEM_IDS: [&str; 4] = ["blackhole", "anharmonic", "rossby", "twopole"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    /// `2(1 − εx)(−ωg + xg') + g + (xg')' = 0` on `x < 0`.
    BlackHole,
    /// `−Ψ'' + x²Ψ/4 + εx⁴Ψ/4 = λΨ` on the line.
    Anharmonic,
    /// `ψ'' − 2xψ' + ε²ψ/(1 + εx) = λψ`, eigenvalue expanded in `ε²`.
    Rossby,
    /// Black-hole model whose outer coefficient has two complex poles at
    /// `X = −c ± ib`.
    TwoPole { b: Rational, c: Rational },
}

impl ProblemKind {
    pub fn id(&self) -> &'static str {
        match self {
            ProblemKind::BlackHole => "blackhole",
            ProblemKind::Anharmonic => "anharmonic",
            ProblemKind::Rossby => "rossby",
            ProblemKind::TwoPole { .. } => "twopole",
        }
    }

    /// Builds a problem from its id and named parameters. Only `twopole`
    /// takes parameters (`b` and `c`, both required and positive).
    pub fn from_id(id: &str, params: &BTreeMap<String, Rational>) -> Result<Self> {
        let kind = match id {
            "blackhole" => ProblemKind::BlackHole,
            "anharmonic" => ProblemKind::Anharmonic,
            "rossby" => ProblemKind::Rossby,
            "twopole" => {
                let get = |name: &str| {
                    params.get(name).cloned().ok_or_else(|| {
                        Error::InvalidParameters(format!("twopole requires parameter `{name}`"))
                    })
                };
                ProblemKind::TwoPole { b: get("b")?, c: get("c")? }
            }
            other => {
                return Err(Error::InvalidParameters(format!(
                    "unknown problem `{other}`; valid ids are {}",
                    PROBLEM_IDS.join(", ")
                )))
            }
        };
        let allowed: &[&str] = if matches!(kind, ProblemKind::TwoPole { .. }) { &["b", "c"] } else { &[] };
        if let Some(extra) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidParameters(format!(
                "problem `{id}` does not take parameter `{extra}`"
            )));
        }
        kind.validate()?;
        Ok(kind)
    }

    pub fn params(&self) -> BTreeMap<String, Rational> {
        match self {
            ProblemKind::TwoPole { b, c } => {
                BTreeMap::from([("b".to_string(), b.clone()), ("c".to_string(), c.clone())])
            }
            _ => BTreeMap::new(),
        }
    }

    /// Leading eigenvalue of the unperturbed problem.
    pub fn leading_eigenvalue(&self) -> Rational {
        match self {
            ProblemKind::BlackHole | ProblemKind::Anharmonic => Rational::from((1, 2)),
            ProblemKind::Rossby => Rational::new(),
            ProblemKind::TwoPole { .. } => Rational::from(1),
        }
    }

    fn validate(&self) -> Result<()> {
        if let ProblemKind::TwoPole { b, c } = self {
            if *b <= 0 || *c <= 0 {
                return Err(Error::InvalidParameters(format!(
                    "twopole needs b > 0 and c > 0, got b = {b}, c = {c}"
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemKind::TwoPole { b, c } => write!(f, "twopole(b={b}, c={c})"),
            other => f.write_str(other.id()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub n_max: u32,
}

impl ProblemSpec {
    pub fn new(kind: ProblemKind, n_max: u32) -> Result<Self> {
        kind.validate()?;
        if n_max == 0 {
            return Err(Error::EmptyRange);
        }
        Ok(ProblemSpec { kind, n_max })
    }
}

/// Dense per-order polynomial coefficients. Reads outside the stored range
/// (negative order, negative or too-large power index) return zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoefficientTable {
    rows: Vec<Vec<Rational>>,
    zero: Rational,
}

impl CoefficientTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, n: usize) -> Option<&[Rational]> {
        self.rows.get(n).map(Vec::as_slice)
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn get(&self, n: isize, j: isize) -> &Rational {
        if n < 0 || j < 0 {
            return &self.zero;
        }
        self.rows
            .get(n as usize)
            .and_then(|row| row.get(j as usize))
            .unwrap_or(&self.zero)
    }

    pub(crate) fn push(&mut self, row: Vec<Rational>) {
        self.rows.push(row);
    }
}

/// Partially built series: rows and eigenvalue coefficients for all orders
/// completed so far.
#[derive(Clone, Debug, Default)]
pub struct SeriesState {
    pub table: CoefficientTable,
    pub coeffs: Vec<Rational>,
}

impl SeriesState {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn coeff(&self, n: isize) -> &Rational {
        if n < 0 {
            return &self.table.zero;
        }
        self.coeffs.get(n as usize).unwrap_or(&self.table.zero)
    }
}

#[derive(Clone, Debug)]
pub struct EigenSeries {
    pub problem: ProblemSpec,
    pub coeffs: Vec<Rational>,
    pub table: CoefficientTable,
}

impl EigenSeries {
    pub fn n_max(&self) -> u32 {
        self.problem.n_max
    }

    pub fn coeff(&self, n: u32) -> Option<&Rational> {
        self.coeffs.get(n as usize)
    }
}

/// Runs the engine selected by `spec` through order `spec.n_max`.
///
/// For the Rossby problem the eigenvalue is a series in `ε²`, so
/// `2·n_max + 1` eigenfunction rows are produced for `n_max + 1`
/// eigenvalue coefficients.
pub fn compute_series(spec: &ProblemSpec) -> Result<EigenSeries> {
    spec.kind.validate()?;
    if spec.n_max == 0 {
        return Err(Error::EmptyRange);
    }
    let n_max = spec.n_max as usize;
    let mut state = SeriesState::new();
    match &spec.kind {
        ProblemKind::BlackHole => (0..=n_max).for_each(|n| step_blackhole(&mut state, n)),
        ProblemKind::Anharmonic => (0..=n_max).for_each(|n| step_anharmonic(&mut state, n)),
        ProblemKind::Rossby => (0..=2 * n_max).for_each(|m| step_rossby(&mut state, m)),
        ProblemKind::TwoPole { b, c } => {
            for n in 0..=n_max {
                step_twopole(&mut state, n, b, c)?;
            }
        }
    }
    debug_assert_eq!(state.coeffs.len(), n_max + 1);
    Ok(EigenSeries {
        problem: spec.clone(),
        coeffs: state.coeffs,
        table: state.table,
    })
}
