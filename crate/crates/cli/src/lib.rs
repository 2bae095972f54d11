//! Command-line front end for `coxarith`: argument parsing, the bundled
//! dataset, reports and the paper reproduction.

pub mod commands;
pub mod dataset;
pub mod paper;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use coxarith::Result;

use commands::Outcome;
use dataset::Dataset;

#[derive(Debug, Parser)]
#[command(name = "coxarith", version, about = "Arithmetic invariants of hyperbolic Coxeter polyhedra")]
pub struct Cli {
    /// Print the machine-readable report instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Bits of precision at which certified sign evaluation starts.
    #[arg(long, global = true, default_value_t = 128)]
    pub precision: u32,

    /// Directory whose files override the bundled dataset.
    #[arg(long, global = true, value_name = "DIR")]
    pub data: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Gram matrix of a diagram.
    Gram { file: String },
    /// Exact signature of the Gram matrix, cross-checked in floating point.
    Signature {
        file: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// The field generated by the cyclic products.
    Tracefield {
        file: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Arithmetic, properly quasi-arithmetic or not quasi-arithmetic.
    Classify {
        file: String,
        /// Dimension of the hyperbolic space; read off the signature if absent.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Decide whether two quadratic forms are similar over a field.
    Similar {
        form_a: String,
        form_b: String,
        /// The base field, such as `sqrt 5`; defaults to the forms' own.
        #[arg(long)]
        field: Option<String>,
        /// Expected verdict: similar, not-similar or inconclusive.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Classify the vertices of a simplex by their links.
    Links {
        file: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Check that the vanishing minors and the determinant are exactly zero.
    VerifyWeights {
        file: String,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Solve numerically for unknown dotted weights.
    SolveWeights {
        file: String,
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Garlands built from two pieces.
    #[command(subcommand)]
    Garland(GarlandCommand),
    /// Run every check on the bundled dataset.
    PaperReport {
        /// Record per-check wall-clock times in the report.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum GarlandCommand {
    /// Number of classes of words of length n.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Classes of length n by number of letters 2.
    Census {
        #[arg(long)]
        n: usize,
        /// Also list the smallest word of every class.
        #[arg(long)]
        list: bool,
    },
    /// Arithmeticity class of the garland of a word.
    Classify {
        #[arg(long)]
        word: String,
        /// `h4`, `h5` or a catalog file.
        #[arg(long)]
        catalog: String,
        #[arg(long)]
        expect: Option<String>,
    },
    /// Number of classes with total volume at most a budget.
    Volume {
        #[arg(long)]
        budget: String,
        #[arg(long)]
        catalog: String,
        #[arg(long)]
        expect: Option<String>,
    },
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome> {
    coxarith::exact::set_start_precision(cli.precision);
    let data = Dataset::new(cli.data.clone());
    let e = |x: &Option<String>| x.clone();
    match &cli.command {
        Command::Gram { file } => commands::gram(&data, file),
        Command::Signature { file, expect } => commands::signature(&data, file, e(expect).as_deref()),
        Command::Tracefield { file, expect } => commands::tracefield(&data, file, e(expect).as_deref()),
        Command::Classify { file, dim, expect } => {
            commands::classify_file(&data, file, *dim, expect.as_deref())
        }
        Command::Similar {
            form_a,
            form_b,
            field,
            expect,
        } => commands::similar(&data, form_a, form_b, field.as_deref(), expect.as_deref()),
        Command::Links { file, expect } => commands::links(&data, file, expect.as_deref()),
        Command::VerifyWeights { file, dim } => commands::verify_weights(&data, file, *dim),
        Command::SolveWeights { file, dim } => commands::solve_weights(&data, file, *dim),
        Command::Garland(g) => match g {
            GarlandCommand::Count { n, expect } => commands::garland_count(*n, expect.as_deref()),
            GarlandCommand::Census { n, list } => commands::garland_census(*n, *list),
            GarlandCommand::Classify {
                word,
                catalog,
                expect,
            } => commands::garland_classify(&data, word, catalog, expect.as_deref()),
            GarlandCommand::Volume {
                budget,
                catalog,
                expect,
            } => commands::garland_volume(&data, budget, catalog, expect.as_deref()),
        },
        Command::PaperReport { timing } => {
            let report = paper::paper_report(&data, *timing);
            let mut lines: Vec<String> = report
                .checks
                .iter()
                .map(|c| format!("{:<12} {:<44} {}", c.verdict.to_string(), c.name, c.observed))
                .collect();
            lines.push(format!("overall: {}", report.verdict));
            Ok(Outcome {
                report,
                text: lines.join("\n"),
            })
        }
    }
}
