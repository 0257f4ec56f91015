//! `ramify`: ramification invariants, symmetric-function coefficients and
//! perturbed minimal polynomials from the command line.
//!
//! Elements are written as integers (`-4`), `π`-adic sums (`3*pi^2 + pi^3`,
//! `1 + 2*t + O(t^5)`) or coordinate lists `[a0, a1]` over a ramified base.
//! Lists of elements are separated by `,` or `;`.
//!
//! Polynomials: `--poly "c_1,...,c_n"` for
//! `X^n - c_1 X^{n-1} + c_2 X^{n-2} - ... + (-1)^n c_n`, optionally preceded
//! by the leading `1`. With `--raw` the list is the ordinary monic
//! coefficients from the top down, so `X^4 + 6X^2 + 4X + 2` is
//! `--raw --poly "1,0,6,4,2"` or `--poly "0,6,-4,2"`.
//!
//! Exit codes: 0 pass, 1 certified failure, 2 input error, 3 precision ceiling.

mod output;
mod parse;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use ramify_core::fixtures::{self, FixtureInfo};
use ramify_core::perturb::dual_route;
use ramify_core::suite::{run_suite, SuiteConfig};
use ramify_core::symcomb::{psi_expansion, DCoefficient};
use ramify_core::theorems::verify_case;
use ramify_core::{
    BaseField, EisensteinPoly, ExtensionError, FieldError, PerturbError, PerturbationSeries, SymError, TheoremError,
    Verdict,
};

use output::{render, Render};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Sym(#[from] SymError),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error(transparent)]
    Theorem(#[from] TheoremError),
    #[error("working precision {ceiling} is not enough: {message}")]
    Ceiling { ceiling: u32, message: String },
    #[error("cannot write output: {0}")]
    Output(#[from] serde_json::Error),
}

impl CliError {
    fn is_precision(&self) -> bool {
        match self {
            CliError::Field(e) => matches!(e, FieldError::PrecisionTooLow { .. }),
            CliError::Extension(e) => matches!(e, ExtensionError::Field(FieldError::PrecisionTooLow { .. })),
            CliError::Perturb(e) => e.is_precision(),
            CliError::Theorem(e) => e.is_precision(),
            _ => false,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Ceiling { .. } => 3,
            CliError::Output(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// Settings shared by every subcommand.
#[derive(Debug, Args)]
struct RunConfig {
    /// Residue characteristic of the base field (ignored with --example).
    #[arg(long, global = true, default_value_t = 2)]
    p: u64,
    /// qp, ramified:<e> or laurent (ignored with --example).
    #[arg(long, global = true, default_value = "qp")]
    backend: String,
    /// Starting working precision, in powers of the base uniformizer.
    #[arg(long, global = true, default_value_t = 20)]
    precision: u32,
    /// Largest working precision tried when a check needs more.
    #[arg(long, global = true, default_value_t = 80)]
    ceiling: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
}

#[derive(Debug, Parser)]
#[command(name = "ramify", version, about = "Ramification invariants and coefficient congruences of Eisenstein polynomials")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Coefficients c_1..c_n (see --raw).
    #[arg(long)]
    poly: Option<String>,
    /// A built-in fixture (see `ramify example --list`).
    #[arg(long)]
    example: Option<String>,
}

#[derive(Debug, Args)]
struct PolyArgs {
    #[command(flatten)]
    source: Source,
    /// Read --poly as ordinary monic coefficients, highest degree first.
    #[arg(long, requires = "poly")]
    raw: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Indices of inseparability, A_j, b_j and the lower breaks.
    Indices(PolyArgs),
    /// The functions ~phi_j and phi_j at l = 1..ell-max.
    PhiTable {
        #[command(flatten)]
        poly: PolyArgs,
        #[arg(long)]
        ell_max: u32,
    },
    /// The coefficient d_{lambda mu}.
    Dcoeff {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
    },
    /// m_mu as a polynomial in the elementary symmetric polynomials.
    Psi {
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long)]
        n: u32,
    },
    /// Minimal polynomial of phi(pi) by both routes.
    Perturb {
        #[command(flatten)]
        poly: PolyArgs,
        /// r_1..r_d, or a sparse map such as "1: 1, 3: 2".
        #[arg(long, allow_hyphen_values = true)]
        phi: String,
    },
    /// Check the coefficient congruences for phi = X + r X^{ell+1}.
    Verify(VerifyArgs),
    /// Show a built-in fixture, or list them.
    Example {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        list: bool,
    },
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with_all = ["example", "random"])]
    poly: Option<String>,
    #[arg(long, conflicts_with = "random")]
    example: Option<String>,
    #[arg(long, requires = "poly")]
    raw: bool,
    #[arg(long, required_unless_present = "random", conflicts_with = "random")]
    ell: Option<u32>,
    /// The coefficient r (default 1).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "random")]
    r: Option<String>,
    /// Run this many randomized cases instead.
    #[arg(long)]
    random: Option<usize>,
}

/// A printable result and the exit status it implies.
struct Outcome {
    text: String,
    verdict: Verdict,
}

impl RunConfig {
    fn field(&self, precision: u32) -> Result<BaseField, CliError> {
        Ok(BaseField::new(self.p, parse::backend(&self.backend)?, precision)?)
    }

    fn emit<T: Render>(&self, value: &T, verdict: Verdict) -> Result<Outcome, CliError> {
        Ok(Outcome {
            text: render(value, self.format)?,
            verdict,
        })
    }

    /// Runs `job` at the starting precision, doubling it on precision
    /// failures up to the ceiling.
    fn escalate<T>(&self, mut job: impl FnMut(u32) -> Result<T, CliError>) -> Result<T, CliError> {
        if self.precision == 0 || self.ceiling < self.precision {
            return Err(CliError::Input("need 1 <= --precision <= --ceiling".into()));
        }
        let mut precision = self.precision;
        loop {
            match job(precision) {
                Err(e) if e.is_precision() => {
                    if precision >= self.ceiling {
                        return Err(CliError::Ceiling {
                            ceiling: precision,
                            message: e.to_string(),
                        });
                    }
                    precision = (precision * 2).min(self.ceiling);
                }
                other => return other,
            }
        }
    }

    fn poly(&self, source: &Source, raw: bool, precision: u32) -> Result<EisensteinPoly, CliError> {
        load_poly(self, source.poly.as_deref(), source.example.as_deref(), raw, precision)
    }
}

fn load_poly(
    config: &RunConfig,
    poly: Option<&str>,
    example: Option<&str>,
    raw: bool,
    precision: u32,
) -> Result<EisensteinPoly, CliError> {
    match (poly, example) {
        (Some(text), None) => parse::poly(config.field(precision)?, text, raw),
        (None, Some(name)) => Ok(fixtures::by_name(name, precision).ok_or_else(|| unknown_example(name))??),
        _ => Err(CliError::Input("give exactly one of --poly and --example".into())),
    }
}

fn unknown_example(name: &str) -> CliError {
    CliError::Input(format!("unknown example {name:?}; known: {}", fixtures::NAMES.join(", ")))
}

/// `r_1, ..., r_d` or `{k: r_k, ...}`.
fn parse_phi(field: BaseField, text: &str) -> Result<PerturbationSeries, CliError> {
    let trimmed = text.trim();
    let (body, base) = match trimmed.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
        Some(inner) => (inner, text.find('{').map_or(0, |i| i + 1)),
        None => (text, 0),
    };
    let items = parse::split_items(body);
    let sparse = items.iter().any(|(_, item)| item.contains(':'));
    if !sparse {
        let coeffs = parse::elements(field, body).map_err(|e| shift(e, base))?;
        return Ok(PerturbationSeries::new(field, coeffs)?);
    }
    let mut terms = BTreeMap::new();
    for (offset, item) in items {
        let colon = item
            .find(':')
            .ok_or_else(|| CliError::Input(format!("expected degree: value, got {:?}", item.trim())))?;
        let (degree, value) = (&item[..colon], &item[colon + 1..]);
        let degree: u32 = degree
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("bad degree {:?}", degree.trim())))?;
        let at = base + offset + colon + 1;
        let value = parse::elements(field, value).map_err(|e| shift(e, at))?;
        if value.len() != 1 || terms.insert(degree, value[0].clone()).is_some() {
            return Err(CliError::Input(format!("degree {degree} given twice or malformed")));
        }
    }
    Ok(PerturbationSeries::from_sparse(field, &terms)?)
}

fn shift(e: CliError, by: usize) -> CliError {
    match e {
        CliError::Parse { position, message } => CliError::Parse {
            position: position + by,
            message,
        },
        other => other,
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let config = &cli.config;
    match &cli.command {
        Command::Indices(args) => {
            let dump = config.escalate(|prec| Ok(config.poly(&args.source, args.raw, prec)?.indices()?.dump()))?;
            config.emit(&dump, Verdict::Pass)
        }
        Command::PhiTable { poly, ell_max } => {
            let table =
                config.escalate(|prec| Ok(config.poly(&poly.source, poly.raw, prec)?.indices()?.phi_table(*ell_max)))?;
            config.emit(&table, Verdict::Pass)
        }
        Command::Dcoeff { lambda, mu } => {
            let d = DCoefficient::compute(&parse::partition(lambda)?, &parse::partition(mu)?)?;
            config.emit(&d, Verdict::Pass)
        }
        Command::Psi { mu, n } => {
            let psi = psi_expansion(&parse::partition(mu)?, *n)?;
            config.emit(&psi, Verdict::Pass)
        }
        Command::Perturb { poly, phi } => {
            let report = config.escalate(|prec| {
                let f = config.poly(&poly.source, poly.raw, prec)?;
                let series = parse_phi(f.field(), phi)?;
                Ok(dual_route(&f, &series)?.report(&f, &series))
            })?;
            let verdict = Verdict::from_bool(report.routes_agree && report.root_check);
            config.emit(&report, verdict)
        }
        Command::Verify(args) => match args.random {
            Some(cases) => {
                let suite = SuiteConfig {
                    seed: config.seed,
                    cases,
                    precision: config.precision,
                    ceiling: config.ceiling,
                };
                if suite.precision == 0 || suite.ceiling < suite.precision {
                    return Err(CliError::Input("need 1 <= --precision <= --ceiling".into()));
                }
                let report = run_suite(&suite);
                config.emit(&report, report.verdict())
            }
            None => {
                let ell = args.ell.ok_or_else(|| CliError::Input("--ell is required".into()))?;
                let report = config.escalate(|prec| {
                    let f = load_poly(config, args.poly.as_deref(), args.example.as_deref(), args.raw, prec)?;
                    let r = f.field().parse(args.r.as_deref().unwrap_or("1"))?;
                    Ok(verify_case(&f, &r, ell)?)
                })?;
                config.emit(&report, report.verdict)
            }
        },
        Command::Example { name, .. } => match name {
            Some(name) => {
                let info = fixtures::info(name, config.precision).ok_or_else(|| unknown_example(name))??;
                config.emit(&info, Verdict::Pass)
            }
            None => {
                let all = fixtures::NAMES
                    .iter()
                    .map(|name| fixtures::info(name, config.precision).expect("known fixture"))
                    .collect::<Result<Vec<FixtureInfo>, _>>()?;
                config.emit(&all, Verdict::Pass)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            ExitCode::from(match outcome.verdict {
                Verdict::Pass => 0,
                Verdict::Fail => 1,
                Verdict::PrecisionCeiling => 3,
            })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
