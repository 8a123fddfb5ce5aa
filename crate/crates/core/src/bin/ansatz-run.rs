use clap::Parser;
use coulomb_ansatz::config::ExperimentConfig;
use coulomb_ansatz::runner::{exit_code, run, sweep};
use coulomb_ansatz::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Run one experiment described by a TOML file.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Experiment configuration (TOML).
    config: PathBuf,

    /// Where CSV files and the summary go.
    #[arg(long, env = "ANSATZ_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads for ray scans (default: all cores).
    #[arg(long)]
    threads: Option<usize>,

    #[arg(short, long)]
    verbose: bool,

    /// Repeat a residual scan over values of one parameter,
    /// e.g. `a0=0.5,1,2`. Axes: delta_cone, omega, h, r_max, a0.
    #[arg(long, value_name = "AXIS=V1,V2,...")]
    sweep: Option<String>,
}

fn parse_sweep(arg: &str) -> Result<(String, Vec<f64>), Error> {
    let (axis, values) = arg
        .split_once('=')
        .ok_or_else(|| Error::Configuration(format!("sweep '{arg}' is not AXIS=V1,V2,...")))?;
    let values = values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::Configuration(format!("sweep value '{v}' is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((axis.trim().to_string(), values))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Debug
        } else {
            log::LevelFilter::Warn
        })
        .init();

    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} threads: {e}");
            return ExitCode::from(2);
        }
    }

    let result = ExperimentConfig::load(&cli.config).and_then(|mut config| {
        if let Some(seed) = cli.seed {
            config.seed = seed;
        }
        let dir = cli
            .output_dir
            .clone()
            .or_else(|| config.output.clone())
            .unwrap_or_else(|| PathBuf::from("ansatz-out"));
        log::info!("scenario {} -> {}", config.scenario.name(), dir.display());
        match &cli.sweep {
            Some(s) => {
                let (axis, values) = parse_sweep(s)?;
                sweep(&config, &axis, &values, &dir)
            }
            None => run(&config, &dir),
        }
    });

    match result {
        Ok(report) => {
            print!("{}", report.summary());
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
