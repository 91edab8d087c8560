use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qelm::config::{ExperimentConfig, Format};
use qelm::output::{render_bounds, write_output};
use qelm::{exit, run_config, CliError, CliResult, PRESETS};
use qelm_core::architectures::ArchitectureKind;
use qelm_core::bounds::requirement_table;

#[derive(Parser)]
#[command(
    name = "qelm",
    version,
    about = "Quantum extreme learning machine experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a JSON configuration.
    Run(RunArgs),
    /// Tabulate minimum reservoir sizes.
    Bounds(BoundsArgs),
    /// List the available presets.
    ListPresets,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["preset", "config"])))]
struct RunArgs {
    /// Preset name, see `list-presets`.
    #[arg(long)]
    preset: Option<String>,
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; every run derives its own stream from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Independent runs per configuration, overriding the desk scale.
    #[arg(long)]
    runs: Option<usize>,
    /// Dataset size per run.
    #[arg(long)]
    samples: Option<usize>,
    /// Fraction of the full run count, in (0, 1]; presets default to 0.1.
    #[arg(long)]
    desk_scale: Option<f64>,
    /// Defaults to csv.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include configurations far beyond desk scale.
    #[arg(long)]
    big_compute: bool,
}

#[derive(Args)]
struct BoundsArgs {
    /// S3L, SM, MI or D (case-insensitive).
    #[arg(long)]
    arch: String,
    /// Inclusive range `A..B`, or a single value.
    #[arg(long, value_parser = parse_range)]
    input_qubits: RangeInclusive<usize>,
    /// Units or injections, as a range; ignored for S3L.
    #[arg(long, value_parser = parse_range, default_value = "1..10")]
    n: RangeInclusive<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => (parse(s)?, parse(s)?),
    };
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok(a..=b)
}

fn run(args: RunArgs) -> CliResult<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(p) = args.preset {
        cfg.preset = Some(p);
    }
    cfg.seed = args.seed.or(cfg.seed);
    cfg.runs = args.runs.or(cfg.runs);
    cfg.samples = args.samples.or(cfg.samples);
    cfg.desk_scale = args.desk_scale.or(cfg.desk_scale);
    cfg.big_compute |= args.big_compute;
    cfg.format = args.format.unwrap_or(cfg.format);
    cfg.output = args.out.or(cfg.output);
    let output = run_config(&cfg)?;
    write_output(&output.render(cfg.format)?, cfg.output.as_deref())
}

fn bounds(args: BoundsArgs) -> CliResult<()> {
    let kind: ArchitectureKind = args
        .arch
        .parse()
        .map_err(|_| CliError::usage(format!("unknown architecture `{}`", args.arch)))?;
    let rows = requirement_table(kind, args.input_qubits, args.n)
        .map_err(|e| CliError::from_core("bounds", e))?;
    write_output(&render_bounds(&rows, args.format)?, args.out.as_deref())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::USAGE as u8
            } else {
                exit::SUCCESS as u8
            });
        }
    };
    let result = qelm::runner::configure_from_env().and_then(|_| match cli.command {
        Command::Run(a) => run(a),
        Command::Bounds(a) => bounds(a),
        Command::ListPresets => {
            for p in PRESETS {
                println!("{:<20} {}", p.name, p.description);
            }
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
