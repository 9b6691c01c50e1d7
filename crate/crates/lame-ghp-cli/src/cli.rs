//! Argument parsing and the top-level run loop.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::{FlagOverrides, RunConfig};
use crate::error::{CliError, CliResult, EXIT_CONFIG_ERROR, EXIT_SUCCESS};
use crate::output::{Outcome, Status};

/// Batch verification runs for Lamé eigenfunction expansions, constraint
/// cascades, CGO identities and grating modes.
#[derive(Debug, Parser)]
#[command(name = "lame-ghp", version)]
pub struct Cli {
    /// Flags shared by every subcommand.
    #[command(flatten)]
    pub flags: GlobalFlags,
    /// Subcommand to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand; they override the configuration file.
#[derive(Debug, Args)]
pub struct GlobalFlags {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Primary artifact path (standard output when absent).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    /// Seed of the randomized sweeps.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Truncation order M.
    #[arg(long, global = true, value_name = "N")]
    pub trunc_m: Option<usize>,
    /// Trace powers N.
    #[arg(long, global = true, value_name = "N")]
    pub trunc_n: Option<usize>,
    /// Bound of the command's primary check.
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tol: Option<f64>,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// PDE residual and gradient checks on random fields (JSON).
    VerifyExpansions,
    /// Series versus direct boundary traces on random fields (JSON).
    VerifyTraces,
    /// Forced-zero prefix and relation replay of a catalog row (JSON).
    Cascade {
        /// Catalog label, e.g. `R+G` or `S(H)`.
        label: String,
    },
    /// Conditioning scan over an impedance grid (CSV).
    ScanEta {
        /// Catalog label of the scanned row.
        #[arg(long)]
        family: Option<String>,
    },
    /// Conditioning scan over opening angles (CSV).
    ScanAngle {
        /// Catalog label of the scanned row.
        #[arg(long)]
        family: Option<String>,
    },
    /// Sector integral identity over a decay grid (CSV).
    CgoIdentity,
    /// Leading-coefficient fit of a planted b0 (JSON).
    CgoB0fit,
    /// Rayleigh mode table with branch and quasiperiodicity checks (CSV).
    GratingModes {
        /// Also write the sampled modal field as CSV.
        #[arg(long, value_name = "PATH")]
        fields: Option<PathBuf>,
    },
    /// Critical opening angle (JSON).
    PhiRoot,
    /// Scenario catalog and measurement counts (JSON).
    Catalog,
}

fn absolute(path: &Path) -> CliResult<PathBuf> {
    std::path::absolute(path).map_err(|source| CliError::ReadInput {
        path: path.to_path_buf(),
        source,
    })
}

fn configure(cli: &Cli) -> CliResult<RunConfig> {
    let f = &cli.flags;
    let config = match &f.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let mut config = config.apply(&FlagOverrides {
        out: f.out.as_deref().map(absolute).transpose()?,
        workers: f.workers,
        seed: f.seed,
        trunc_m: f.trunc_m,
        trunc_n: f.trunc_n,
        tol: f.tol,
    })?;
    match &cli.command {
        Command::ScanEta { family } | Command::ScanAngle { family } if family.is_some() => {
            config.scan.family.clone_from(family);
        }
        Command::GratingModes { fields: Some(path) } => {
            config.grating.field_output = Some(absolute(path)?);
        }
        _ => {}
    }
    Ok(config)
}

fn dispatch(config: &RunConfig, command: &Command) -> CliResult<Outcome> {
    match command {
        Command::VerifyExpansions => commands::verify::verify_expansions(config),
        Command::VerifyTraces => commands::verify::verify_traces(config),
        Command::Cascade { label } => commands::cascade::cascade(config, label),
        Command::ScanEta { .. } => commands::scan::scan_eta(config),
        Command::ScanAngle { .. } => commands::scan::scan_angle(config),
        Command::CgoIdentity => commands::cgo::cgo_identity(config),
        Command::CgoB0fit => commands::cgo::cgo_b0fit(config),
        Command::GratingModes { .. } => commands::grating::grating_modes(config),
        Command::PhiRoot => commands::phi_root::run(config),
        Command::Catalog => commands::catalog::run(config),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<Status> {
    let config = configure(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let outcome = pool.install(|| dispatch(&config, &cli.command))?;
    match &config.output {
        Some(path) => write_file(&config.resolve(path), outcome.artifact.as_bytes())?,
        None => stdout
            .write_all(outcome.artifact.as_bytes())
            .map_err(|source| CliError::Write {
                path: PathBuf::from("<stdout>"),
                source,
            })?,
    }
    for (path, artifact) in &outcome.attachments {
        write_file(path, artifact.as_bytes())?;
    }
    for line in &outcome.summary {
        // A closed standard error does not invalidate the written artifacts.
        let _ = writeln!(stderr, "{line}");
    }
    Ok(outcome.status)
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit status: 0 success, 1 check failure, 2 configuration error, 3
/// numerical failure.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{e}");
            return EXIT_CONFIG_ERROR;
        }
        Err(e) => {
            let _ = write!(stdout, "{e}");
            return EXIT_SUCCESS;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn run_capture(args: &[&str]) -> (u8, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("lame-ghp").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn subcommand_names() {
        let names: Vec<String> = Cli::command()
            .get_subcommands()
            .map(|c| c.get_name().to_string())
            .collect();
        assert_eq!(
            names,
            [
                "verify-expansions",
                "verify-traces",
                "cascade",
                "scan-eta",
                "scan-angle",
                "cgo-identity",
                "cgo-b0fit",
                "grating-modes",
                "phi-root",
                "catalog"
            ]
        );
    }

    #[test]
    fn bad_arguments_are_configuration_errors() {
        let (code, _, err) = run_capture(&["cascade"]);
        assert_eq!(code, EXIT_CONFIG_ERROR);
        assert!(err.contains("LABEL"));
        assert_eq!(
            run_capture(&["phi-root", "--workers", "x"]).0,
            EXIT_CONFIG_ERROR
        );
        assert_eq!(
            run_capture(&["catalog", "--tol", "1e-3"]).0,
            EXIT_CONFIG_ERROR
        );
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_SUCCESS);
        assert!(out.contains("grating-modes"));
    }

    #[test]
    fn artifacts_go_to_standard_output_and_summaries_to_standard_error() {
        let (code, out, err) = run_capture(&["phi-root", "--workers", "2"]);
        assert_eq!(code, EXIT_SUCCESS);
        assert!(out.contains("\"schema_version\": 1"));
        assert!(err.starts_with("PASS: phi_root"));
    }
}
