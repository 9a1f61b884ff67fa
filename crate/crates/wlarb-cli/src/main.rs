//! Experiment runner for the wavelength-arbitration simulator.
//!
//! Each subcommand expands a configuration into independent sweep cells,
//! evaluates them in parallel with seeded reproducibility, and writes a CSV
//! (or JSON-lines) table with a stable schema. Identical configuration and
//! seed produce byte-identical output regardless of `--jobs`.

use std::process::ExitCode;

use wlarb_cli::commands::{self, CliError, Command};
use wlarb_cli::config::{self, ExperimentConfig, OutputFormat};
use wlarb_cli::plot;

const USAGE: &str = "\
wlarb — wavelength-arbitration Monte Carlo experiments

USAGE:
    wlarb <COMMAND> [--config PATH] [--seed N] [--out PATH] [--jobs N]
                    [--format csv|jsonl] [--emit-plot]

COMMANDS:
    shmoo        two-axis failure-probability grid (afp or cafp metric)
    mintr        minimum tuning range vs ring variation for 4 DWDM presets
    ltd          deterministic-policy minimum tuning range vs grid offset
    sensitivity  minimum tuning range vs one variation parameter
    fsr          minimum tuning range across FSR means
    breakdown    conditional failures split into lock errors / wrong order
    sample       dump one sampled laser comb and ring row

FLAGS:
    --config PATH   structured-text configuration (sections [grid],
                    [variation], [arbiter], [sweep], [run])
    --seed N        override the master seed
    --out PATH      write the table to PATH (default: stdout)
    --jobs N        worker threads (0 = all cores); output is independent
    --format F      csv (default) or jsonl
    --emit-plot     also write a matplotlib script next to --out
    --help          show this help

EXIT CODES:
    0 success, 2 configuration/usage error, 3 internal invariant violation
";

struct Flags {
    config_path: Option<String>,
    seed: Option<u64>,
    out: Option<String>,
    jobs: Option<usize>,
    format: Option<OutputFormat>,
    emit_plot: bool,
}

fn parse_flags(args: &[String]) -> Result<Flags, CliError> {
    let mut flags = Flags {
        config_path: None,
        seed: None,
        out: None,
        jobs: None,
        format: None,
        emit_plot: false,
    };
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        let mut value_for = |name: &str| {
            iter.next()
                .cloned()
                .ok_or_else(|| CliError::Config(format!("{name} needs a value")))
        };
        match arg.as_str() {
            "--config" => flags.config_path = Some(value_for("--config")?),
            "--seed" => {
                let raw = value_for("--seed")?;
                flags.seed = Some(
                    raw.parse()
                        .map_err(|_| CliError::Config(format!("bad seed `{raw}`")))?,
                );
            }
            "--out" => flags.out = Some(value_for("--out")?),
            "--jobs" => {
                let raw = value_for("--jobs")?;
                flags.jobs = Some(
                    raw.parse()
                        .map_err(|_| CliError::Config(format!("bad job count `{raw}`")))?,
                );
            }
            "--format" => {
                flags.format = Some(match value_for("--format")?.as_str() {
                    "csv" => OutputFormat::Csv,
                    "jsonl" => OutputFormat::Jsonl,
                    other => return Err(CliError::Config(format!("unknown format `{other}`"))),
                });
            }
            "--emit-plot" => flags.emit_plot = true,
            other => return Err(CliError::Config(format!("unknown flag `{other}`"))),
        }
    }
    Ok(flags)
}

fn run() -> Result<(), CliError> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help" {
        print!("{USAGE}");
        return Ok(());
    }
    let Some(command) = Command::parse(&args[0]) else {
        return Err(CliError::Config(format!(
            "unknown command `{}`; see --help for the command list",
            args[0]
        )));
    };
    let flags = parse_flags(&args[1..])?;

    let mut cfg: ExperimentConfig = command.default_config();
    if let Some(path) = &flags.config_path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
        cfg = config::parse_config(&text, &cfg)?;
    }
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    if let Some(out) = flags.out {
        cfg.out = Some(out);
    }
    if let Some(jobs) = flags.jobs {
        cfg.jobs = jobs;
    }
    if let Some(format) = flags.format {
        cfg.format = format;
    }

    let table = commands::run(command, &cfg)?;
    let rendered = match cfg.format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Jsonl => table.to_jsonl(),
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| CliError::Config(format!("cannot write {path}: {e}")))?,
        None => print!("{rendered}"),
    }
    if flags.emit_plot {
        let Some(path) = &cfg.out else {
            return Err(CliError::Config("--emit-plot needs --out".into()));
        };
        let script = plot::emit(command, path)
            .map_err(|e| CliError::Config(format!("cannot write plot script: {e}")))?;
        eprintln!("wrote {script}");
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
