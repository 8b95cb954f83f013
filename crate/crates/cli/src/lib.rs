//! Command-line front end for the `hypiso` tool.

pub mod config;
pub mod report;
pub mod run;

use std::path::PathBuf;

use clap::Parser;

use crate::config::parse_config;
use crate::report::{find_certificate, read_records, write_records};
use crate::run::{Check, Command, Outcome, Settings};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Records,
}

/// Exact classification and simultaneous-hyperbolicity search for group
/// actions on the hyperbolic plane and on trees.
#[derive(Debug, Parser)]
#[command(name = "hypiso", version)]
pub struct Cli {
    /// What to run; may be omitted with --verify.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// System description (hypiso-config v1).
    #[arg(long, short)]
    pub input: PathBuf,
    /// Largest exponent tried per induction stage [config, else 32].
    #[arg(long)]
    pub max_exponent: Option<u32>,
    /// Largest power used by orbit-based checks [config, else 64].
    #[arg(long)]
    pub orbit_depth: Option<u32>,
    /// Radius of materialized tree balls when a tree action gives none.
    #[arg(long, default_value_t = hypiso_core::SpaceModel::DEFAULT_BALL_RADIUS)]
    pub ball_radius: u32,
    /// Seed for sampled checks [config, else 0].
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Re-verify the certificate in a records file against the input system.
    #[arg(long, value_name = "RECORD")]
    pub verify: Option<PathBuf>,
    /// Gromov-product threshold for boundary neighborhoods (dynamics).
    #[arg(long, default_value_t = 1.0)]
    pub threshold: f64,
    /// Dynamics checks to run; all when omitted.
    #[arg(long = "check", value_enum, value_delimiter = ',')]
    pub checks: Vec<Check>,
}

/// Runs the parsed command line; never panics on bad input.
pub fn execute(cli: &Cli) -> Outcome {
    let name = match (&cli.verify, cli.command) {
        (Some(_), _) => "verify",
        (None, Some(c)) => c.name(),
        (None, None) => "none",
    };
    let fallback = Settings {
        max_exponent: cli.max_exponent.unwrap_or(32),
        witness_depth: 6,
        orbit_depth: cli.orbit_depth.unwrap_or(64),
        ball_radius: cli.ball_radius,
        seed: cli.seed.unwrap_or(0),
        threshold: cli.threshold,
        checks: cli.checks.clone(),
    };
    let text = match std::fs::read_to_string(&cli.input) {
        Ok(t) => t,
        Err(e) => return run::failed(name, &fallback, "io", format!("{}: {e}", cli.input.display())),
    };
    let cfg = match parse_config(&text, cli.ball_radius) {
        Ok(c) => c,
        Err(e) => return run::failed(name, &fallback, "config", e.to_string()),
    };
    let s = &cfg.schedule;
    let settings = Settings {
        max_exponent: cli.max_exponent.or(s.max_exponent).unwrap_or(32),
        witness_depth: s.witness_depth.unwrap_or(6),
        orbit_depth: cli.orbit_depth.or(s.orbit_depth).unwrap_or(64),
        seed: cli.seed.or(s.seed).unwrap_or(0),
        ..fallback
    };
    if let Some(path) = &cli.verify {
        let records = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return run::failed(name, &settings, "io", format!("{}: {e}", path.display())),
        };
        return match read_records(&records) {
            Ok(recs) => match find_certificate(&recs) {
                Some(cert) => run::verify(&cfg, cert, &settings),
                None => run::failed(name, &settings, "records", "no certificate record found".into()),
            },
            Err(e) => run::failed(name, &settings, "records", e.to_string()),
        };
    }
    match cli.command {
        Some(c) => run::run(c, &cfg, &settings),
        None => run::failed(name, &settings, "usage", "give a command or --verify RECORD".into()),
    }
}

/// The text `main` prints for an outcome.
pub fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Table => outcome.table.clone(),
        Format::Records => write_records(&outcome.records),
    }
}
