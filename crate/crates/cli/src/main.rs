mod commands;
mod config;
mod output;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{CommonArgs, RunConfig};

const AFTER_HELP: &str = "\
Exit codes: 0 success, 1 bad configuration or failed verification,
2 resonance scan failed or found nothing to evolve, 3 the admissible
subspace is trivial.

Files (written atomically into --out, default the working directory):
  poles.json  resonances; floats with 17 significant digits
  poles.csv   re_zeta,im_zeta,sheet,kind,residual
  decay.csv   t,unitary_re,unitary_im,unitary_abs,decay_re,decay_im,decay_abs,reference
  verify.json {suite, pass, checks: [{name, measured, tolerance, pass}]}
CSV numbers carry 12 significant digits.";

#[derive(Parser, Debug)]
#[command(name = "gamov", version, about = "Resonances and decay semigroups of scattering matrices", after_help = AFTER_HELP)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Locate poles of S and write poles.json / poles.csv
    Resonances,
    /// Transition curves of the leading resonance's Gamov vector; writes decay.csv
    Decay,
    /// Run a verification suite and print a JSON report
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Hardy,
    Semigroup,
    Smatrix,
    Subspace,
    All,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: msg.into(),
        }
    }

    pub fn io(msg: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: msg.into(),
        }
    }

    pub fn scan(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: msg.into(),
        }
    }

    pub fn trivial(msg: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: msg.into(),
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let cfg = RunConfig::from_args(&cli.common)?;
    match cli.command {
        Command::Resonances => commands::resonances(&cfg).map(|_| 0),
        Command::Decay => commands::decay(&cfg).map(|_| 0),
        Command::Verify { suite } => verify::run(&cfg, suite).map(|pass| if pass { 0 } else { 1 }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gamov: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
