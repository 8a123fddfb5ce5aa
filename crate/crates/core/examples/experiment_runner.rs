//! Run a scenario from a TOML configuration, the same way the
//! `ansatz-run` binary does, and print its summary.
//!
//! cargo run --example experiment_runner -- configs/estimates.toml

use coulomb_ansatz::config::ExperimentConfig;
use coulomb_ansatz::runner::run;
use std::path::PathBuf;

fn main() -> coulomb_ansatz::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::load(&PathBuf::from(path))?,
        None => ExperimentConfig::from_toml_str(
            "scenario = \"validate-kinematics\"\nseed = 1\n[system]\nn = 5\na0 = 1.0\n[decomposition]\nclusters = [[1, 2, 3]]\n",
        )?,
    };
    let dir = std::env::temp_dir().join(format!("ansatz-example-{}", config.scenario.name()));
    let report = run(&config, &dir)?;
    print!("{}", report.summary());
    Ok(())
}
