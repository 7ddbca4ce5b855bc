use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use halfspace_cli::{list_experiments, run, CliError, ExperimentConfig, OUT_DIR_ENV};

#[derive(Parser)]
#[command(
    name = "halfspace",
    version,
    about = "Run the halfspace verification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the experiment ids.
    List,
    /// Run one experiment and write its reports.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Experiment id (see `halfspace list`).
    id: String,
    /// TOML config file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tube radii, comma-separated.
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<f64>>,
    /// BL constants of the stretch maps, comma-separated.
    #[arg(long = "K", value_delimiter = ',')]
    k: Option<Vec<f64>>,
    /// Path source: random, builtin:radial, builtin:horizontal or builtin:arc.
    #[arg(long)]
    paths: Option<String>,
    /// Number of random cases.
    #[arg(long)]
    count: Option<usize>,
    /// Output directory (default: $HALFSPACE_OUT_DIR, then ./halfspace-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot of the report rows.
    #[arg(long)]
    plot: bool,
    /// Record wall time in the JSON report (makes reports differ between runs).
    #[arg(long)]
    timing: bool,
}

fn execute(args: RunArgs) -> Result<bool, CliError> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let p = &mut config.params;
    config.seed = args.seed.or(config.seed);
    p.r = args.r.or(p.r.take());
    p.k = args.k.or(p.k.take());
    p.paths = args.paths.or(p.paths.take());
    p.count = args.count.or(p.count);
    config.output.plot |= args.plot;
    let dir = args
        .out
        .or(config.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("halfspace-out"));

    let report = run(&args.id, &config, args.timing)?;
    let files = report.write(&dir, config.output.plot)?;
    for row in report.failures().take(20) {
        eprintln!(
            "FAIL {} {}: bound {} observed {} ({})",
            row.case, row.label, row.bound, row.observed, row.detail
        );
    }
    let failed = report.failures().count();
    println!(
        "{}: {} ({} rows, {} failed)",
        report.experiment,
        if report.pass { "pass" } else { "FAIL" },
        report.rows.len(),
        failed
    );
    if let Some(t) = report.wall_time_seconds {
        println!("wall time: {t:.3} s");
    }
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            print!("{}", list_experiments());
            ExitCode::SUCCESS
        }
        Command::Run(args) => match execute(args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
