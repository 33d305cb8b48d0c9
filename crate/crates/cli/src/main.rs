//! `morrey`: command-line experiments with sharp Morrey-Sobolev inequalities.

mod commands;
mod grid;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use grid::Grid;

#[derive(Debug, Parser)]
#[command(name = "morrey", version, about = "Sharp Morrey-Sobolev inequalities on model manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,

    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,

    /// Panel bisection budget of the adaptive quadrature.
    #[arg(long, global = true)]
    pub max_refinements: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Q1,
    Q2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Bound {
    Ms1,
    Ms2,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sharp constants c1, c2 and the exponents.
    Constants {
        #[arg(long = "n")]
        n: usize,
        #[arg(long = "p")]
        p: f64,
    },
    /// Norms and quotients of one profile on one model.
    Quotient {
        #[arg(long)]
        model: String,
        #[arg(long)]
        profile: String,
        #[arg(long = "n")]
        n: usize,
        #[arg(long = "p")]
        p: f64,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, value_enum, default_value_t = Which::Q1)]
        which: Which,
    },
    /// Minimal quotient over a grid of support radii.
    Scan {
        #[arg(long)]
        model: String,
        #[arg(long = "n")]
        n: usize,
        #[arg(long = "p")]
        p: f64,
        #[arg(long)]
        lambda_grid: Grid,
        #[arg(long, value_enum, default_value_t = Which::Q1)]
        which: Which,
    },
    /// Euclidean rearrangement of a profile and the gradient comparison.
    Rearrange {
        #[arg(long)]
        model: String,
        #[arg(long)]
        profile: String,
        #[arg(long = "n")]
        n: usize,
        #[arg(long = "p")]
        p: f64,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Ball volumes and the ratio to Euclidean balls.
    Volumes {
        #[arg(long)]
        model: String,
        #[arg(long)]
        rho_grid: Grid,
    },
    /// Large-volume-balls checks for a candidate constant C.
    Diagnose {
        #[arg(long)]
        model: String,
        #[arg(long = "n")]
        n: usize,
        #[arg(long = "p")]
        p: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long, value_enum)]
        which: Bound,
        /// Support radii of the gap integral (ms2), comma separated.
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
        #[arg(long)]
        rho_grid: Option<Grid>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Json => output::to_json(&out.record),
                Format::Csv => out.table.to_csv(),
            };
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            for warning in &out.warnings {
                eprintln!("warning: {warning}");
            }
            ExitCode::from(out.exit_code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            if !err.is_numerical() {
                eprintln!("run `morrey --help` for usage");
            }
            ExitCode::from(err.exit_code())
        }
    }
}
