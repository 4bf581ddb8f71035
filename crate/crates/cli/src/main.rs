use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use late_terms::commands::{self, CommandError};
use late_terms::config::{parse_param, PartialConfig, RunConfig, PRECISION_ENV};
use late_terms::output::{write_atomic, Format};
use late_terms::verify::{self, VerifyOptions};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "late-terms", version, about = "Exact perturbation coefficients and late-term checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact eigenvalue coefficients for n = 0..=n_max.
    Coeffs(RunArgs),
    /// Coefficients against the late-term prediction, with Richardson columns.
    Compare(RunArgs),
    /// |c_n|^(1/n) with a slope fit over the top half of the range.
    Growth(RunArgs),
    /// Normalised two-pole coefficients against the cosine model.
    Oscillation(RunArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
}

#[derive(Clone, Debug)]
struct Orders(Vec<u32>);

fn parse_orders(s: &str) -> Result<Orders, String> {
    let s = s.trim();
    if s.is_empty() || s == "none" {
        return Ok(Orders(vec![]));
    }
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad Richardson order `{t}`")))
        .collect::<Result<_, _>>()
        .map(Orders)
}

#[derive(Args)]
struct RunArgs {
    /// blackhole, anharmonic, rossby or twopole.
    #[arg(long)]
    problem: Option<String>,
    /// Problem parameter, e.g. `--param b=1/2`. Repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, String)>,
    #[arg(long)]
    n_max: Option<u32>,
    /// First order of the ratio and Richardson columns [default: 5].
    #[arg(long)]
    n_start: Option<u32>,
    /// MPFR mantissa bits [default: 256, or $LATE_TERMS_PRECISION].
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Comma-separated Richardson orders, or `none` [default: 1,2,3].
    #[arg(long, value_parser = parse_orders)]
    richardson: Option<Orders>,
    /// Flat JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Print the resolved config as JSON and exit.
    #[arg(long)]
    dump_config: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Only run checks about this problem.
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Corrupt the black-hole first-order coefficient (failure-path test).
    #[arg(long, hide = true)]
    inject_fault: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, CommandError> {
        let file = match &self.config {
            Some(path) => PartialConfig::from_file(path)?,
            None => PartialConfig::default(),
        };
        let flags = PartialConfig {
            problem: self.problem.clone(),
            params: self.params.iter().cloned().collect(),
            n_max: self.n_max,
            n_start: self.n_start,
            precision_bits: self.precision_bits,
            richardson_orders: self.richardson.clone().map(|o| o.0),
        };
        let env = std::env::var(PRECISION_ENV).ok();
        Ok(file.overlay(flags).resolve(env.as_deref())?)
    }
}

enum Kind {
    Coeffs,
    Compare,
    Growth,
    Oscillation,
}

fn run_table(kind: Kind, args: &RunArgs) -> anyhow::Result<()> {
    let config = args.resolve()?;
    if args.dump_config {
        println!("{}", config.to_json_pretty());
        return Ok(());
    }
    let text = match (kind, args.format) {
        (Kind::Coeffs, Format::Csv) => commands::coeffs(&config)?.to_csv()?,
        (Kind::Coeffs, Format::Json) => commands::coeffs(&config)?.to_json()?,
        (Kind::Compare, Format::Csv) => commands::compare(&config)?.to_csv()?,
        (Kind::Compare, Format::Json) => commands::compare(&config)?.to_json()?,
        (Kind::Growth, Format::Csv) => commands::growth(&config)?,
        (Kind::Oscillation, Format::Csv) => commands::oscillation(&config)?,
        (_, Format::Json) => {
            return Err(CommandError::Usage("growth and oscillation emit CSV only".into()).into())
        }
    };
    match &args.out {
        Some(path) => write_atomic(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    let mut opts = VerifyOptions { only: args.only.clone(), inject_fault: args.inject_fault, ..Default::default() };
    if let Some(bits) = args.precision_bits {
        opts.precision_bits = bits;
    } else if let Ok(raw) = std::env::var(PRECISION_ENV) {
        opts.precision_bits = raw.trim().parse().with_context(|| format!("{PRECISION_ENV}={raw} is not a bit count"))?;
    }
    let reports = verify::run(&opts)?;
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("{} criteria, {failed} failed", reports.len());
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Coeffs(a) => run_table(Kind::Coeffs, a).map(|_| true),
        Command::Compare(a) => run_table(Kind::Compare, a).map(|_| true),
        Command::Growth(a) => run_table(Kind::Growth, a).map(|_| true),
        Command::Oscillation(a) => run_table(Kind::Oscillation, a).map(|_| true),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
