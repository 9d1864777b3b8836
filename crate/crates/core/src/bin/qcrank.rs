use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use qcrank_dpqa::circuit::QCrankConfig;
use qcrank_dpqa::harness::{default_table2_spec, run_experiment, ConfigShots, ExperimentSpec};
use qcrank_dpqa::noise::NoiseParams;
use qcrank_dpqa::sim::Backend;
use qcrank_dpqa::{Error, Result};

/// Simulate QCrank encoding on a noisy neutral-atom array.
#[derive(Debug, Parser)]
#[command(name = "qcrank", version)]
struct Args {
    /// Address qubits.
    #[arg(long, requires = "nd")]
    na: Option<usize>,
    /// Data qubits.
    #[arg(long, requires = "na")]
    nd: Option<usize>,
    /// Shots per run (defaults to the configuration's table value, else 25000).
    #[arg(long)]
    shots: Option<u64>,
    /// Simulation backend: exact or traj. Registers above 12 qubits always use traj.
    #[arg(long)]
    backend: Option<Backend>,
    /// Noise scale factor; repeat for a sweep.
    #[arg(long = "noise-scale", default_value = "1.0")]
    noise_scale: Vec<f64>,
    /// Random sequences per configuration and scale.
    #[arg(long, default_value_t = qcrank_dpqa::harness::DEFAULT_SEQUENCES)]
    sequences: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for results.csv, results.json and timings.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run all nine benchmark configurations.
    #[arg(long, conflicts_with_all = ["na", "nd"])]
    table2: bool,
    /// Also write the compiled instruction stream of every configuration.
    #[arg(long, requires = "out")]
    dump_schedule: bool,
    /// Key-value file overriding the baseline noise parameters.
    #[arg(long)]
    noise_config: Option<PathBuf>,
}

fn build_spec(args: &Args) -> Result<ExperimentSpec> {
    let mut spec = default_table2_spec();
    if !args.table2 {
        let (Some(na), Some(nd)) = (args.na, args.nd) else {
            return Err(Error::InvalidConfig(
                "give --na and --nd, or --table2".into(),
            ));
        };
        let cfg = QCrankConfig::new(na, nd)?;
        let shots = spec
            .configs
            .iter()
            .find(|c| c.cfg == cfg)
            .map_or(25_000, |c| c.shots);
        spec.configs = vec![ConfigShots { cfg, shots }];
    }
    if let Some(shots) = args.shots {
        spec.configs.iter_mut().for_each(|c| c.shots = shots);
    }
    if let Some(path) = &args.noise_config {
        spec.noise = NoiseParams::from_config_str(&fs::read_to_string(path)?, &spec.noise)?;
    }
    spec.noise_scales = args.noise_scale.clone();
    spec.backend = args.backend;
    spec.sequences = args.sequences;
    spec.seed = args.seed;
    spec.out = args.out.clone();
    spec.dump_schedule = args.dump_schedule;
    spec.validate()?;
    Ok(spec)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let result = build_spec(&args).and_then(|spec| run_experiment(&spec));
    match result {
        Ok(rows) => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for r in &rows {
                if let Err(e) = w.serialize(r) {
                    log::error!("{e}");
                    return ExitCode::FAILURE;
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::FAILURE
        }
    }
}
