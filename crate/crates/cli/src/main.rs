//! `gft`: command-line front end for the membership criteria.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use poisson_gft::suite::{identity_rows, run_suite};
use poisson_gft::theorems::Condition;
use poisson_gft::threshold::DEFAULT_SCAN_LIMIT;
use poisson_gft::{
    apply_operator_i, choose_truncation, coeffs_f, coeffs_g, crosscheck_detail, evaluate,
    grid_check, worst_case_r_coeffs, Class, ClassCondition, Error, Grid, Poisson, Policy,
    PredicateId, RClass, Series, Verdict, WeightGrowth,
};

use output::{Format, Rendered};

/// Residual above which `crosscheck` reports a mismatch.
const CROSSCHECK_TOL: f64 = 1e-9;

const EXIT_FAILS: u8 = 1;
const EXIT_MARGINAL: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(
    name = "gft",
    version,
    about = "Membership checks for Poisson distribution series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one criterion from its closed form.
    Check {
        #[command(flatten)]
        pred: PredicateArg,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare a closed form with its truncated coefficient sum.
    Crosscheck {
        #[command(flatten)]
        pred: PredicateArg,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        trunc: EpsArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Solve for the boundary value m* of a criterion.
    Threshold {
        #[command(flatten)]
        pred: PredicateArg,
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 1e-10, allow_negative_numbers = true)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sample the analytic class condition on circles inside the disk.
    Grid {
        #[command(flatten)]
        pred: PredicateArg,
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        trunc: EpsArg,
        /// Circle radii in (0,1), comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75, 0.9])]
        radii: Vec<f64>,
        /// Points per circle.
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Closed-form exponential sums against partial summation at one m.
    Identities {
        #[arg(long, allow_negative_numbers = true)]
        m: f64,
        #[command(flatten)]
        trunc: EpsArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the seeded property suite (seed from GFT_SEED, default 0).
    Suite {
        #[command(flatten)]
        trunc: EpsArg,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct PredicateArg {
    /// Predicate id, e.g. T1_F_in_S or C3_I_in_Sk.
    #[arg(long, value_parser = parse_predicate)]
    predicate: PredicateId,
}

#[derive(Args)]
struct ClassArgs {
    #[arg(long, allow_negative_numbers = true)]
    k: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long = "A", allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long = "B", allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long = "tau-re", default_value_t = 1.0, allow_negative_numbers = true)]
    tau_re: f64,
    #[arg(long = "tau-im", default_value_t = 0.0, allow_negative_numbers = true)]
    tau_im: f64,
}

#[derive(Args)]
struct PointArgs {
    #[arg(long, allow_negative_numbers = true)]
    m: f64,
    #[command(flatten)]
    class: ClassArgs,
}

#[derive(Args)]
struct EpsArg {
    /// Target bound on the discarded tail.
    #[arg(long, default_value_t = 1e-12, allow_negative_numbers = true)]
    eps: f64,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_predicate(s: &str) -> Result<PredicateId, String> {
    s.parse()
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TruncationNotReached { .. } | Error::DomainError(_) => {
                Failure::Numeric(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl ClassArgs {
    fn class(&self) -> Result<Class, Error> {
        Class::new(self.k, self.lambda)
    }

    /// `None` unless both `--A` and `--B` are given.
    fn r(&self) -> Result<Option<RClass>, Failure> {
        match (self.a, self.b) {
            (Some(a), Some(b)) => Ok(Some(RClass::new(
                a,
                b,
                Complex::new(self.tau_re, self.tau_im),
            )?)),
            (None, None) => Ok(None),
            _ => Err(Failure::Usage("--A and --B must be given together".into())),
        }
    }
}

fn policy(eps: f64) -> Result<Policy, Error> {
    Policy::with_eps(eps)
}

fn seed_from_env() -> Result<u64, Failure> {
    match std::env::var("GFT_SEED") {
        Err(_) => Ok(0),
        Ok(s) => s.trim().parse().map_err(|_| {
            Failure::Usage(format!(
                "GFT_SEED must be a nonnegative integer (got {s:?})"
            ))
        }),
    }
}

fn verdict_exit(v: Verdict) -> u8 {
    match v {
        Verdict::Holds => 0,
        Verdict::Fails => EXIT_FAILS,
        Verdict::Marginal => EXIT_MARGINAL,
    }
}

/// The function and analytic condition a predicate is about.
fn grid_target(
    pid: PredicateId,
    p: Poisson,
    c: &Class,
    r: Option<&RClass>,
    policy: &Policy,
) -> Result<(Series, ClassCondition<f64>), Error> {
    let c = pid.effective_params(c);
    Ok(match pid.condition() {
        Condition::FInS => (coeffs_f(p, policy)?, ClassCondition::S(c)),
        Condition::FInC => (coeffs_f(p, policy)?, ClassCondition::C(c)),
        Condition::GInC => (coeffs_g(p, policy)?, ClassCondition::C(c)),
        Condition::GInS => (coeffs_g(p, policy)?, ClassCondition::S(c)),
        cond @ (Condition::IInS | Condition::IInC) => {
            let r = r.ok_or(Error::MissingRParams(pid.as_str()))?;
            let n = choose_truncation(p, policy, WeightGrowth::Quadratic)?;
            let f = apply_operator_i(&worst_case_r_coeffs(r, n), p).magnitudes();
            let cond = if cond == Condition::IInS {
                ClassCondition::S(c)
            } else {
                ClassCondition::C(c)
            };
            (f, cond)
        }
    })
}

fn run(command: Command) -> Result<(Rendered, OutArgs), Failure> {
    Ok(match command {
        Command::Check { pred, point, out } => {
            let (p, c, r) = (
                Poisson::new(point.m)?,
                point.class.class()?,
                point.class.r()?,
            );
            let report = evaluate(pred.predicate, p, &c, r.as_ref())?;
            (output::check(&report, verdict_exit(report.verdict)), out)
        }
        Command::Crosscheck {
            pred,
            point,
            trunc,
            out,
        } => {
            let (p, c, r) = (
                Poisson::new(point.m)?,
                point.class.class()?,
                point.class.r()?,
            );
            let x = crosscheck_detail(pred.predicate, p, &c, r.as_ref(), &policy(trunc.eps)?)?;
            let code = if x.residual < CROSSCHECK_TOL {
                0
            } else {
                EXIT_FAILS
            };
            (
                output::crosscheck(pred.predicate, &x, CROSSCHECK_TOL, code),
                out,
            )
        }
        Command::Threshold {
            pred,
            class,
            tol,
            out,
        } => {
            let (c, r) = (class.class()?, class.r()?);
            let res =
                poisson_gft::solve_m_star(pred.predicate, &c, r.as_ref(), tol, DEFAULT_SCAN_LIMIT)?;
            (output::threshold(&res), out)
        }
        Command::Grid {
            pred,
            point,
            trunc,
            radii,
            points,
            out,
        } => {
            let (p, c, r) = (
                Poisson::new(point.m)?,
                point.class.class()?,
                point.class.r()?,
            );
            let spec = Grid::new(
                radii,
                points,
                poisson_gft::analytic::DEFAULT_DENOMINATOR_FLOOR,
            )?;
            let (f, cond) = grid_target(pred.predicate, p, &c, r.as_ref(), &policy(trunc.eps)?)?;
            let report = grid_check(&f, &cond, &spec);
            let code = if report.violations == 0 {
                0
            } else {
                EXIT_FAILS
            };
            (output::grid(pred.predicate, &report, code), out)
        }
        Command::Identities { m, trunc, out } => {
            let rows = identity_rows(Poisson::new(m)?, &policy(trunc.eps)?)?;
            (output::identities(m, &rows), out)
        }
        Command::Suite { trunc, out } => {
            let seed = seed_from_env()?;
            let report = run_suite(seed, &policy(trunc.eps)?)?;
            (output::suite(&report), out)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok((rendered, out)) => match rendered.emit(out.format, out.out.as_deref()) {
            Ok(()) => ExitCode::from(rendered.exit_code),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_USAGE)
            }
        },
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}
