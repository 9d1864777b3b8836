//! Experiment driver for the configuration sweep.

mod dump;

pub use dump::{parse_schedule, write_schedule};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analysis::{two_run_protocol, RmseReport};
use crate::circuit::{build_dpqa, compute_angles, QCrankConfig};
use crate::compiler::{lower, Schedule};
use crate::error::{Error, Result};
use crate::noise::{attach_noise, scale_params, NoiseParams};
use crate::sim::{Backend, ShotCounts, DEFAULT_EXACT_UP_TO};

/// Name of the generator behind every random draw of the harness.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.3), seed_from_u64 + set_stream";

/// Encoder configurations of the benchmark: `(n_a, n_d, shots)`.
pub const TABLE2: [(usize, usize, u64); 9] = [
    (3, 3, 25_000),
    (3, 6, 25_000),
    (3, 9, 25_000),
    (3, 12, 25_000),
    (4, 8, 50_000),
    (5, 5, 100_000),
    (4, 12, 50_000),
    (4, 16, 50_000),
    (5, 10, 100_000),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigShots {
    pub cfg: QCrankConfig,
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub configs: Vec<ConfigShots>,
    pub noise_scales: Vec<f64>,
    /// `None` picks per register size.
    pub backend: Option<Backend>,
    pub sequences: usize,
    pub seed: u64,
    pub noise: NoiseParams,
    pub out: Option<PathBuf>,
    pub dump_schedule: bool,
}

pub const DEFAULT_SEQUENCES: usize = 10;

pub fn default_table2_spec() -> ExperimentSpec {
    ExperimentSpec {
        configs: TABLE2
            .iter()
            .map(|&(a, d, shots)| ConfigShots {
                cfg: QCrankConfig::new(a, d).expect("table rows are valid"),
                shots,
            })
            .collect(),
        noise_scales: vec![1.0],
        backend: None,
        sequences: DEFAULT_SEQUENCES,
        seed: 0,
        noise: crate::noise::baseline_params(),
        out: None,
        dump_schedule: false,
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.configs.is_empty() {
            return Err(Error::InvalidConfig("no configurations given".into()));
        }
        if let Some(c) = self.configs.iter().find(|c| c.shots == 0) {
            return Err(Error::InvalidConfig(format!("{} has zero shots", c.cfg)));
        }
        if self.noise_scales.is_empty()
            || self
                .noise_scales
                .iter()
                .any(|s| !(s.is_finite() && *s > 0.0))
        {
            return Err(Error::InvalidConfig(format!(
                "noise scales {:?} must be positive",
                self.noise_scales
            )));
        }
        if self.sequences == 0 {
            return Err(Error::InvalidConfig(
                "at least one sequence is required".into(),
            ));
        }
        for s in &self.noise_scales {
            scale_params(&self.noise, *s)?;
        }
        Ok(())
    }

    /// Backend used for a configuration; large registers always use trajectories.
    pub fn backend_for(&self, cfg: QCrankConfig) -> Backend {
        if cfg.n_qubits() > DEFAULT_EXACT_UP_TO {
            return Backend::Trajectory;
        }
        self.backend.unwrap_or(Backend::default_for(cfg.n_qubits()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub cfg_id: String,
    pub n_a: usize,
    pub n_d: usize,
    pub capacity: usize,
    pub backend: Backend,
    pub noise_scale: f64,
    pub shots: u64,
    pub sequence: usize,
    pub c: f64,
    pub rmse_raw: f64,
    pub rmse_calibrated: f64,
    /// Kept out of `results.csv` so that file is reproducible byte for byte.
    #[serde(skip)]
    pub wall_time_s: f64,
}

/// SplitMix64 finaliser, used to derive independent seeds from a tuple.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix(base), |acc, &p| mix(acc ^ p))
}

/// Uniform data in `[-1, 1]` for one run of a cell.
pub fn random_data(cfg: QCrankConfig, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cfg.capacity())
        .map(|_| rng.gen_range(-1.0..=1.0))
        .collect()
}

pub fn compile_sequence(cfg: QCrankConfig, data: &[f64]) -> Result<Schedule> {
    let angles = compute_angles(data, cfg)?;
    lower(&build_dpqa(cfg, &angles)?, cfg)
}

/// Encodes, compiles, adds noise and samples one data vector.
pub fn simulate(
    cfg: QCrankConfig,
    data: &[f64],
    noise: &NoiseParams,
    backend: Backend,
    shots: u64,
    seed: u64,
) -> Result<ShotCounts> {
    let program = attach_noise(&compile_sequence(cfg, data)?, noise);
    backend.run(&program, shots, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Calibration = 0,
    Evaluation = 1,
}

/// The data and sampling seeds depend on the configuration and sequence but
/// not on the noise scale, so a scale sweep compares matched runs.
fn cell_seeds(base: u64, cfg: QCrankConfig, sequence: usize, role: Role) -> (u64, u64) {
    let key = [
        cfg.n_a() as u64,
        cfg.n_d() as u64,
        sequence as u64,
        role as u64,
    ];
    (
        derive_seed(base, &[&key[..], &[0]].concat()),
        derive_seed(base, &[&key[..], &[1]].concat()),
    )
}

/// Calibration run on one random sequence, evaluation on another.
pub fn run_cell(
    cfg: QCrankConfig,
    shots: u64,
    noise: &NoiseParams,
    backend: Backend,
    base_seed: u64,
    sequence: usize,
) -> Result<RmseReport> {
    let run = |role| -> Result<(Vec<f64>, ShotCounts)> {
        let (data_seed, sim_seed) = cell_seeds(base_seed, cfg, sequence, role);
        let data = random_data(cfg, data_seed);
        let counts = simulate(cfg, &data, noise, backend, shots, sim_seed)?;
        Ok((data, counts))
    };
    let (calib_truth, calib) = run(Role::Calibration)?;
    let (eval_truth, eval) = run(Role::Evaluation)?;
    two_run_protocol(&calib, &eval, &calib_truth, &eval_truth, cfg)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    config: ConfigShots,
    scale_index: usize,
    sequence: usize,
}

/// Registers at least this large run one cell at a time (each cell already
/// parallelises internally and holds a large state).
const SERIAL_CELLS_FROM: usize = 11;

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let cells: Vec<Cell> = spec
        .configs
        .iter()
        .flat_map(|&config| {
            (0..spec.noise_scales.len()).flat_map(move |scale_index| {
                (0..spec.sequences).map(move |sequence| Cell {
                    config,
                    scale_index,
                    sequence,
                })
            })
        })
        .collect();

    let run = |cell: &Cell| -> Result<ResultRow> {
        let ConfigShots { cfg, shots } = cell.config;
        let scale = spec.noise_scales[cell.scale_index];
        let noise = scale_params(&spec.noise, scale)?;
        let backend = spec.backend_for(cfg);
        let start = Instant::now();
        let report = run_cell(cfg, shots, &noise, backend, spec.seed, cell.sequence)?;
        let wall = start.elapsed().as_secs_f64();
        log::info!(
            "{cfg} scale {scale} seq {} done in {wall:.1}s",
            cell.sequence
        );
        Ok(ResultRow {
            cfg_id: cfg.label(),
            n_a: cfg.n_a(),
            n_d: cfg.n_d(),
            capacity: cfg.capacity(),
            backend,
            noise_scale: scale,
            shots,
            sequence: cell.sequence,
            c: report.calibration.c,
            rmse_raw: report.rmse_raw,
            rmse_calibrated: report.rmse_calibrated,
            wall_time_s: wall,
        })
    };
    let (small, large): (Vec<Cell>, Vec<Cell>) = cells
        .into_iter()
        .partition(|c| c.config.cfg.n_qubits() < SERIAL_CELLS_FROM);
    let mut rows: Vec<ResultRow> = small.par_iter().map(run).collect::<Result<_>>()?;
    for cell in &large {
        rows.push(run(cell)?);
    }
    rows.sort_by(|a, b| {
        (a.n_a, a.n_d, a.noise_scale, a.sequence)
            .partial_cmp(&(b.n_a, b.n_d, b.noise_scale, b.sequence))
            .expect("scales are finite")
    });

    if let Some(dir) = &spec.out {
        write_outputs(spec, &rows, dir)?;
    }
    Ok(rows)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    spec: &'a ExperimentSpec,
    rng: &'static str,
    noise_config: String,
    columns: &'static [&'static str],
}

pub const RESULT_COLUMNS: [&str; 11] = [
    "cfg_id",
    "n_a",
    "n_d",
    "capacity",
    "backend",
    "noise_scale",
    "shots",
    "sequence",
    "c",
    "rmse_raw",
    "rmse_calibrated",
];

pub fn write_results_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_outputs(spec: &ExperimentSpec, rows: &[ResultRow], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_results_csv(rows, &dir.join("results.csv"))?;

    let sidecar = Sidecar {
        spec,
        rng: RNG_NAME,
        noise_config: spec.noise.to_config_string().unwrap_or_default(),
        columns: &RESULT_COLUMNS,
    };
    fs::write(
        dir.join("results.json"),
        serde_json::to_string_pretty(&sidecar)?,
    )?;

    let mut w = csv::Writer::from_path(dir.join("timings.csv"))?;
    w.write_record(["cfg_id", "noise_scale", "sequence", "wall_time_s"])?;
    for r in rows {
        w.write_record([
            r.cfg_id.clone(),
            r.noise_scale.to_string(),
            r.sequence.to_string(),
            format!("{:.3}", r.wall_time_s),
        ])?;
    }
    w.flush()?;

    if spec.dump_schedule {
        for c in &spec.configs {
            let (data_seed, _) = cell_seeds(spec.seed, c.cfg, 0, Role::Evaluation);
            let schedule = compile_sequence(c.cfg, &random_data(c.cfg, data_seed))?;
            let name = format!("schedule_{}_{}.txt", c.cfg.n_a(), c.cfg.n_d());
            fs::write(dir.join(name), write_schedule(&schedule))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::baseline_params;

    #[test]
    fn table2_rows() {
        let spec = default_table2_spec();
        let caps: Vec<usize> = spec.configs.iter().map(|c| c.cfg.capacity()).collect();
        assert_eq!(caps, [24, 48, 72, 96, 128, 160, 192, 256, 320]);
        assert_eq!(spec.configs[0].shots, 25_000);
        assert_eq!(spec.configs[8].shots, 100_000);
        assert_eq!(spec.sequences, 10);
    }

    #[test]
    fn large_registers_route_to_trajectories() {
        let mut spec = default_table2_spec();
        spec.backend = Some(Backend::Exact);
        for c in &spec.configs {
            let b = spec.backend_for(c.cfg);
            assert_eq!(b == Backend::Trajectory, c.cfg.n_qubits() > 12, "{}", c.cfg);
        }
    }

    #[test]
    fn spec_validation() {
        let mut spec = default_table2_spec();
        spec.noise_scales = vec![0.0];
        assert!(spec.validate().is_err());
        let mut spec = default_table2_spec();
        spec.sequences = 0;
        assert!(spec.validate().is_err());
        let mut spec = default_table2_spec();
        spec.configs[0].shots = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn seeds_do_not_depend_on_scale_and_differ_by_role() {
        let cfg = QCrankConfig::new(2, 2).unwrap();
        let a = cell_seeds(5, cfg, 1, Role::Calibration);
        let b = cell_seeds(5, cfg, 1, Role::Evaluation);
        assert_ne!(a, b);
        assert_ne!(a.0, a.1);
        assert_eq!(a, cell_seeds(5, cfg, 1, Role::Calibration));
    }

    #[test]
    fn outputs_are_byte_identical_across_runs() {
        let dir = tempfile::tempdir().unwrap();
        let mk = |sub: &str| ExperimentSpec {
            configs: vec![ConfigShots {
                cfg: QCrankConfig::new(2, 2).unwrap(),
                shots: 2000,
            }],
            noise_scales: vec![0.7, 1.3],
            backend: Some(Backend::Trajectory),
            sequences: 2,
            seed: 42,
            noise: baseline_params(),
            out: Some(dir.path().join(sub)),
            dump_schedule: true,
        };
        let rows = run_experiment(&mk("a")).unwrap();
        run_experiment(&mk("b")).unwrap();
        assert_eq!(rows.len(), 4);
        for f in ["results.csv", "schedule_2_2.txt"] {
            let a = fs::read(dir.path().join("a").join(f)).unwrap();
            let b = fs::read(dir.path().join("b").join(f)).unwrap();
            assert_eq!(a, b, "{f}");
        }
        let text = fs::read_to_string(dir.path().join("a/results.csv")).unwrap();
        assert_eq!(text.lines().next().unwrap(), RESULT_COLUMNS.join(","));
        assert!(dir.path().join("a/timings.csv").exists());
        assert!(dir.path().join("a/results.json").exists());
    }
}
