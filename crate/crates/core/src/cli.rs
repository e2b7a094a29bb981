//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::DataSource;
use crate::delpezzo::{validate_atlas, Atlas};
use crate::error::Result;
use crate::scenarios::{run_all, RunOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "fano14", version, about = "Exact verification of K-stability computations for a Fano threefold of degree 14")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run scenarios, the sampling oracle, mutation controls and (for the full set) the atlas.
    Verify(VerifyArgs),
    /// Validate the del Pezzo atlas.
    Atlas(CommonArgs),
    /// Print the shipped scenario names.
    List(CommonArgs),
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Read data files from this directory instead of the built-in copies.
    #[arg(long, env = "FANO14_DATA_DIR")]
    pub data_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub scenario: Option<String>,
    /// Oracle samples per family; 0 skips the oracle.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

impl CommonArgs {
    fn source(&self) -> DataSource {
        match &self.data_dir {
            Some(dir) => DataSource::dir(dir),
            None => DataSource::embedded(),
        }
    }
}

/// Report text and whether every selected check passed.
pub fn execute(command: &Command) -> Result<(String, bool)> {
    match command {
        Command::Verify(args) => {
            let opts = RunOptions {
                parallel: args.parallel,
                samples: args.samples,
                seed: args.seed,
                scenario: args.scenario.clone(),
                include_atlas: args.scenario.is_none(),
            };
            let report = run_all(&args.common.source(), &opts)?;
            let text = match args.common.format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json(),
            };
            Ok((text, report.verdict))
        }
        Command::Atlas(common) => {
            let report = validate_atlas(&Atlas::load(&common.source())?)?;
            let text = match common.format {
                Format::Text => report.lines().into_iter().map(|l| l + "\n").collect(),
                Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
            };
            Ok((text, report.verdict))
        }
        Command::List(common) => {
            let names = common.source().scenario_names()?;
            let text = match common.format {
                Format::Text => names.iter().map(|n| format!("{n}\n")).collect(),
                Format::Json => serde_json::to_string_pretty(&names).expect("names serialize") + "\n",
            };
            Ok((text, true))
        }
    }
}

/// Parse `argv`, run, write the report to `out`; returns the exit code.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(rendered.as_bytes()) } else { out.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok((text, pass)) => {
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return EXIT_USAGE;
            }
            if pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
