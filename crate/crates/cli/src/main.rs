//! `caplaw` command-line driver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use caplaw::{Error, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::{conjugate, slln, tailbound, tau, verify};
use config::{load, Echo, Format, DEFAULT_SEED};
use output::{Sink, Table};

#[derive(Debug, Parser)]
#[command(
    name = "caplaw",
    version,
    about = "Sub-linear expectations, sub-Gaussian certificates and capacity laws"
)]
struct Cli {
    /// JSON config file; flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed of all random streams
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: print to stdout)
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic vs numeric convex conjugate of phi_p or a phi_p(b x)
    Conjugate(conjugate::ConjugateArgs),
    /// Smallest sub-Gaussian parameter of a family
    Tau(tau::TauArgs),
    /// Capacity tail bound 2 exp(-phi*(eps / a))
    Tailbound(tailbound::TailboundArgs),
    /// Running-mean simulation with majorant bounds
    Slln(slln::SllnArgs),
    /// Axiom suite of a discrete family
    Verify(verify::VerifyArgs),
}

struct Ctx {
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Ctx {
    fn finish<P: Serialize, R: Serialize>(
        &self,
        command: &str,
        seed: u64,
        format: Format,
        params: &P,
        report: &R,
        tables: &[Table],
    ) -> Result<()> {
        let echo = Echo {
            command,
            seed,
            format,
            params,
        };
        let sink = Sink {
            out: self.out.clone(),
            format,
        };
        sink.emit(&echo, &format!("{command}.json"), report, tables)
    }
}

fn invariants(violations: Vec<String>) -> Result<()> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::Invariant(violations.join("; ")))
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        config: cli.config,
        seed: cli.seed,
        out: cli.out,
        format: cli.format,
    };
    let path = ctx.config.as_deref();
    macro_rules! resolved {
        ($name:expr, $ty:ty) => {{
            let loaded = load::<$ty>(path, $name)?;
            let seed = ctx.seed.or(loaded.seed).unwrap_or(DEFAULT_SEED);
            let format = ctx.format.or(loaded.format).unwrap_or(Format::Both);
            (loaded.params, seed, format)
        }};
    }
    match &cli.command {
        Command::Conjugate(args) => {
            let (params, seed, format) = resolved!("conjugate", conjugate::ConjugateParams);
            let params = params.merge(args)?;
            let (report, tables) = conjugate::run(&params)?;
            ctx.finish("conjugate", seed, format, &params, &report, &tables)
        }
        Command::Tau(args) => {
            let (params, seed, format) = resolved!("tau", tau::TauParams);
            let params = tau::resolve(params.merge(args)?, seed)?;
            let (report, tables) = tau::run(&params, seed)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            ctx.finish("tau", seed, format, &params, &report, &tables)
        }
        Command::Tailbound(args) => {
            let (params, seed, format) = resolved!("tailbound", tailbound::TailboundParams);
            let params = params.merge(args)?;
            let (report, tables) = tailbound::run(&params, seed)?;
            ctx.finish("tailbound", seed, format, &params, &report, &tables)
        }
        Command::Slln(args) => {
            let (params, seed, format) = resolved!("slln", slln::SllnParams);
            let env = std::env::var(slln::MAX_DRAWS_ENV).ok();
            let params = params.merge(args, env.as_deref())?;
            let (report, tables, violations) = slln::run(&params, seed)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            ctx.finish("slln", seed, format, &params, &report, &tables)?;
            invariants(violations)
        }
        Command::Verify(args) => {
            let (params, seed, format) = resolved!("verify", verify::VerifyParams);
            let params = params.merge(args)?;
            let (report, tables, violations) = verify::run(&params)?;
            ctx.finish("verify", seed, format, &params, &report, &tables)?;
            invariants(violations)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
