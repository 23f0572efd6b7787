use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use oscint_cli::input::{parse, read, RunSpec, SnarlInput};
use oscint_cli::{commands, CliError, CliResult, Exit, Outcome, RunRecord, SweepOptions};
use oscint_core::quadrature::CSV_HEADER;
use oscint_core::wire::{MapsJson, PolyJson};

#[derive(Parser)]
#[command(
    name = "oscint",
    version,
    about = "Snarl resolutions, phase degeneracy and oscillatory decay sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Resolve a snarl into hyperplanes through transverse splittings.
    Resolve {
        snarl: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for resolution.json and record.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a phase is a sum of pullbacks through the given maps.
    Degeneracy {
        poly: PathBuf,
        maps: PathBuf,
        /// Directory for report.json and record.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the oscillatory integral over a λ grid and fit the decay.
    Sweep {
        runspec: PathBuf,
        /// Use certificate-modulated bumps that cancel a degenerate phase.
        #[arg(long)]
        adversarial: bool,
        /// Exit 0 even when some λ hit the node cap.
        #[arg(long)]
        allow_unconverged: bool,
        /// CSV destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON destination for rows and fit.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Run record destination.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Rerun a recorded run and compare.
    Replay { record: PathBuf },
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::input(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, text)
        .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))
}

/// Writes to stdout; a closed pipe (`oscint ... | head`) is not an error.
fn stdout(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize") + "\n"
}

fn emit_exact(outcome: &Outcome, out: Option<&Path>, name: &str) -> CliResult<()> {
    let rec = &outcome.record;
    match out {
        Some(dir) => {
            write(&dir.join(name), &pretty(&rec.output))?;
            write(&dir.join("record.json"), &(rec.to_json_pretty() + "\n"))?;
            eprintln!("run {} written to {}", rec.run_id, dir.display());
        }
        None => stdout(&pretty(&rec.output)),
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<Exit> {
    match cli.command {
        Command::Resolve { snarl, seed, out } => {
            let input = SnarlInput::parse(&read(&snarl)?)?;
            let outcome = commands::resolve(&input, seed)?;
            let o = &outcome.record.output;
            eprintln!(
                "{} step(s); terminal snarl in general position: {}",
                o["steps"], o["terminal_general_position"]
            );
            emit_exact(&outcome, out.as_deref(), "resolution.json")?;
            Ok(Exit::Ok)
        }
        Command::Degeneracy { poly, maps, out } => {
            let p: PolyJson = parse("polynomial", &read(&poly)?)?;
            let m: MapsJson = parse("maps", &read(&maps)?)?;
            let outcome = commands::degeneracy(&p, &m)?;
            emit_exact(&outcome, out.as_deref(), "report.json")?;
            Ok(Exit::Ok)
        }
        Command::Sweep {
            runspec,
            adversarial,
            allow_unconverged,
            out,
            json,
            record,
        } => {
            let spec = RunSpec::parse(&read(&runspec)?)?;
            let opts = SweepOptions {
                adversarial,
                allow_unconverged,
            };
            let outcome = commands::sweep(&spec, opts)?;
            let rec = &outcome.record;
            let rows: oscint_core::quadrature::DecaySweep =
                serde_json::from_value(rec.output.clone()).expect("sweep output round-trips");
            let csv = rows.to_csv();
            debug_assert!(csv.starts_with(CSV_HEADER));
            match &out {
                Some(path) => write(path, &csv)?,
                None => stdout(&csv),
            }
            if let Some(path) = &json {
                write(path, &pretty(&rec.output))?;
            }
            if let Some(path) = &record {
                write(path, &(rec.to_json_pretty() + "\n"))?;
            }
            if let Some(fit) = &rows.fit {
                eprintln!(
                    "fit: rho = {:.4}, logC = {:.4}, r2 = {:.4}",
                    fit.rho, fit.log_c, fit.r2
                );
            }
            if outcome.unconverged && !allow_unconverged {
                eprintln!("error: some λ values did not converge within the node cap");
                return Ok(Exit::Convergence);
            }
            Ok(Exit::Ok)
        }
        Command::Replay { record } => {
            let rec: RunRecord = parse("run record", &read(&record)?)?;
            let report = commands::replay(&rec)?;
            if let Some(w) = &report.warning {
                eprintln!("warning: {w}");
            }
            stdout(&(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"));
            Ok(if report.reproduced {
                Exit::Ok
            } else {
                Exit::ReplayMismatch
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code.code()),
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(d) = &e.detail {
                eprintln!("{}", serde_json::to_string_pretty(d).unwrap_or_default());
            }
            ExitCode::from(e.exit.code())
        }
    }
}
