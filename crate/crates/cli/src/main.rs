//! `boutroux`: tables and figures for the cubic normal matrix model.

// NaN must fail validity checks, so `!(x > 0.0)` is used deliberately.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use commands::{CliError, Kind, Report};
use config::{Flags, Format, RunConfig};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "boutroux",
    version,
    about = "Spectral curve, Boutroux condition and orthogonal polynomials of the cubic normal matrix model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Branch points, discriminant roots and sheet samples.
    Curve,
    /// A(t), branch points, beta and tau over a range of t, and t**.
    Boutroux,
    /// Polylines of the spines and whiskers.
    Whisker,
    /// Droplet boundaries r(theta) for a list of t.
    Droplet,
    /// Harmonic moments of the droplet with the whisker correction.
    Moments,
    /// Sign of H on a grid in the sector |arg z| < pi/3.
    Levelset,
    /// tau, beta, beta*, admissible degrees, M_{n,11} and spurious zeros.
    Theta,
    /// Zeros of P_{n,n} against the limiting support and the asymptotics.
    Opzeros,
    /// Blow-up constants and expansion errors near the critical time.
    Perturb,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Curve => "curve",
            Command::Boutroux => "boutroux",
            Command::Whisker => "whisker",
            Command::Droplet => "droplet",
            Command::Moments => "moments",
            Command::Levelset => "levelset",
            Command::Theta => "theta",
            Command::Opzeros => "opzeros",
            Command::Perturb => "perturb",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Curve | Command::Theta | Command::Opzeros => Format::Json,
            Command::Whisker | Command::Droplet | Command::Levelset => Format::Svg,
            Command::Boutroux | Command::Moments | Command::Perturb => Format::Csv,
        }
    }

    fn run(self, cfg: &RunConfig) -> Result<Report, CliError> {
        match self {
            Command::Curve => commands::curve(cfg),
            Command::Boutroux => commands::boutroux(cfg),
            Command::Whisker => commands::whisker(cfg),
            Command::Droplet => commands::droplet(cfg),
            Command::Moments => commands::moments(cfg),
            Command::Levelset => commands::levelset(cfg),
            Command::Theta => commands::theta(cfg),
            Command::Opzeros => commands::opzeros(cfg),
            Command::Perturb => commands::perturb(cfg),
        }
    }
}

/// Write the report: the JSON document always, plus the table (`csv`) or the
/// figure and its sidecar table (`svg`).
fn emit(
    cmd: Command,
    cfg: &RunConfig,
    report: Report,
) -> Result<Vec<std::path::PathBuf>, CliError> {
    let name = cmd.name();
    let format = cfg.format.unwrap_or(cmd.default_format());
    if format == Format::Svg && report.plot.is_none() {
        return Err(CliError::config(
            name,
            format!("{name} has no figure; use csv or json"),
        ));
    }
    let io = |e: std::io::Error| {
        CliError::config(name, format!("cannot write to {}: {e}", cfg.out.display()))
    };
    let mut files = vec![output::write_atomic(
        &cfg.out,
        &format!("{name}.json"),
        &output::to_json(report.json),
    )
    .map_err(io)?];
    match format {
        Format::Json => {}
        Format::Csv => files.push(
            output::write_atomic(&cfg.out, &format!("{name}.csv"), &report.table.to_csv())
                .map_err(io)?,
        ),
        Format::Svg => {
            let plot = report.plot.expect("checked above");
            files.push(
                output::write_atomic(&cfg.out, &format!("{name}.svg"), &plot.to_svg())
                    .map_err(io)?,
            );
            files.push(
                output::write_atomic(
                    &cfg.out,
                    &format!("{name}_plot.csv"),
                    &plot.sidecar().to_csv(),
                )
                .map_err(io)?,
            );
        }
    }
    Ok(files)
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", output::to_json(e.to_json()).trim_end());
    ExitCode::from(match e.kind {
        Kind::Config => 2,
        Kind::Numerical => 3,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(CliError::config("boutroux", e.to_string().trim_end())),
    };
    let name = cli.command.name();
    let cfg = match RunConfig::resolve(&cli.flags) {
        Ok(cfg) => cfg,
        Err(m) => return fail(CliError::config(name, m)),
    };
    match cli
        .command
        .run(&cfg)
        .and_then(|r| emit(cli.command, &cfg, r))
    {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
