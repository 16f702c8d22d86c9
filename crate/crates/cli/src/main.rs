mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(iontrap::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<iontrap::Error> for CliError {
    fn from(e: iontrap::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use iontrap::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Core(E::Convergence { .. } | E::Instability { .. } | E::IntegrationAccuracy { .. }) => 2,
            CliError::Core(_) => 3,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("IONTRAP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("IONTRAP_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (name, cfg, output, seed, out) = match &cli.command {
        Command::Positions(c) => {
            let cfg = RunConfig::resolve(Some(&c.input), None, &c.output)?;
            ("positions", Some(cfg.clone()), &c.output, None, commands::positions(&cfg)?)
        }
        Command::Modes(c) => {
            let cfg = RunConfig::resolve(Some(&c.input), None, &c.output)?;
            ("modes", Some(cfg.clone()), &c.output, None, commands::modes(&cfg)?)
        }
        Command::Continuum(c) => {
            let cfg = RunConfig::resolve(Some(&c.input), None, &c.output)?;
            ("continuum", Some(cfg.clone()), &c.output, None, commands::continuum(&cfg, c)?)
        }
        Command::Sums(c) => {
            let cfg = RunConfig::resolve(Some(&c.input), None, &c.output)?;
            ("sums", Some(cfg.clone()), &c.output, None, commands::sums(&cfg, c)?)
        }
        Command::Decohere(c) => {
            let cfg = RunConfig::resolve(Some(&c.input), Some(&c.transition), &c.output)?;
            ("decohere", Some(cfg.clone()), &c.output, None, commands::decohere(&cfg, c)?)
        }
        Command::Sweep(c) => {
            let cfg = RunConfig::resolve(Some(&c.input), Some(&c.transition), &c.output)?;
            ("sweep", Some(cfg.clone()), &c.output, None, commands::sweep(&cfg, c)?)
        }
        Command::SpinVerify(c) => ("spin-verify", None, &c.output, None, commands::spin_verify(c)?),
        Command::McDephase(c) => {
            let cfg = RunConfig::resolve(Some(&c.input), Some(&c.transition), &c.output)?;
            ("mc-dephase", Some(cfg.clone()), &c.output, Some(c.seed), commands::mc_dephase(&cfg, c)?)
        }
    };
    let format = cfg.as_ref().map_or(output.format.unwrap_or_default(), |c| c.format);
    let inputs = match (&cli.command, &cfg) {
        (Command::SpinVerify(c), _) => json!({
            "omega_0": c.omega_0,
            "ratio": c.ratio,
            "drive": format!("{:?}", c.drive).to_ascii_lowercase(),
            "frequency_ratio": c.frequency_ratio,
            "phi_max": c.phi_max,
            "points": c.points,
            "steps_per_period": c.steps_per_period,
        }),
        (_, Some(cfg)) => serde_json::to_value(cfg).expect("serialisable config"),
        _ => json!(null),
    };
    let manifest = output::manifest(name, inputs, seed, &out.summary);
    output::emit(&out, manifest, format, output.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

