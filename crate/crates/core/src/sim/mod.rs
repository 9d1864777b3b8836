//! Noisy-program execution: an exact density-matrix backend and a Pauli
//! trajectory backend over state vectors.

mod counts;
mod density;
mod kernels;
mod program;
mod statevector;
mod trajectory;

pub use counts::ShotCounts;
pub use density::DensityMatrix;
pub use statevector::{circuit_probabilities, StateVector};

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

use crate::circuit::QCrankConfig;
use crate::error::{Error, Result};
use crate::noise::NoisyProgram;

/// Default register bound of the density-matrix backend.
pub const EXACT_QUBIT_LIMIT: usize = 13;
/// Default register bound of the trajectory backend.
pub const TRAJECTORY_QUBIT_LIMIT: usize = 26;
/// Largest register sent to the exact backend when none is chosen.
pub const DEFAULT_EXACT_UP_TO: usize = 12;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    #[serde(rename = "traj")]
    Trajectory,
}

impl Backend {
    pub fn default_for(n_qubits: usize) -> Self {
        if n_qubits <= DEFAULT_EXACT_UP_TO {
            Backend::Exact
        } else {
            Backend::Trajectory
        }
    }

    pub fn run(self, program: &NoisyProgram, shots: u64, seed: u64) -> Result<ShotCounts> {
        match self {
            Backend::Exact => run_exact(program, shots, seed),
            Backend::Trajectory => run_trajectories(program, shots, seed),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Exact => "exact",
            Backend::Trajectory => "traj",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "traj" | "trajectory" => Ok(Backend::Trajectory),
            _ => Err(Error::InvalidConfig(format!(
                "unknown backend `{s}` (expected exact or traj)"
            ))),
        }
    }
}

fn check_size(n_qubits: usize, limit: usize) -> Result<()> {
    if n_qubits > limit {
        return Err(Error::RegisterTooLarge { n_qubits, limit });
    }
    Ok(())
}

/// Exact outcome distribution of a noisy program.
pub fn exact_distribution(program: &NoisyProgram) -> Result<Vec<f64>> {
    exact_distribution_limited(program, EXACT_QUBIT_LIMIT)
}

pub fn exact_distribution_limited(program: &NoisyProgram, limit: usize) -> Result<Vec<f64>> {
    check_size(program.n_qubits(), limit)?;
    let compiled = program::compile(program)?;
    Ok(density::evolve(&compiled)?.diagonal())
}

/// Final density matrix of a noisy program.
pub fn exact_state(program: &NoisyProgram) -> Result<DensityMatrix> {
    check_size(program.n_qubits(), EXACT_QUBIT_LIMIT)?;
    density::evolve(&program::compile(program)?)
}

/// Draws `shots` outcomes from a probability vector.
pub fn sample_distribution(
    probs: &[f64],
    n_qubits: usize,
    shots: u64,
    seed: u64,
) -> Result<ShotCounts> {
    let weights: Vec<f64> = probs.iter().map(|p| p.max(0.0)).collect();
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidProgram(format!("cannot sample output distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(ShotCounts::from_outcomes(
        n_qubits,
        (0..shots).map(|_| dist.sample(&mut rng)),
    ))
}

/// Density-matrix simulation followed by sampling of the exact diagonal.
pub fn run_exact(program: &NoisyProgram, shots: u64, seed: u64) -> Result<ShotCounts> {
    run_exact_limited(program, shots, seed, EXACT_QUBIT_LIMIT)
}

pub fn run_exact_limited(
    program: &NoisyProgram,
    shots: u64,
    seed: u64,
    limit: usize,
) -> Result<ShotCounts> {
    let probs = exact_distribution_limited(program, limit)?;
    sample_distribution(&probs, program.n_qubits(), shots, seed)
}

/// One state-vector trajectory per shot with a sampled Pauli per channel.
pub fn run_trajectories(program: &NoisyProgram, shots: u64, seed: u64) -> Result<ShotCounts> {
    run_trajectories_limited(program, shots, seed, TRAJECTORY_QUBIT_LIMIT)
}

pub fn run_trajectories_limited(
    program: &NoisyProgram,
    shots: u64,
    seed: u64,
    limit: usize,
) -> Result<ShotCounts> {
    check_size(program.n_qubits(), limit)?;
    let compiled = program::compile(program)?;
    let outcomes = trajectory::sample_outcomes(&compiled, shots, seed);
    Ok(ShotCounts::from_outcomes(program.n_qubits(), outcomes))
}

/// Conditional `<Z>` of every data qubit given every address, laid out as
/// `[address * n_d + j]`. Entries of addresses with zero weight are NaN.
pub fn conditional_expectations(probs: &[f64], cfg: QCrankConfig) -> Vec<f64> {
    let (n_a, n_d) = (cfg.n_a(), cfg.n_d());
    let mask = cfg.addresses() - 1;
    let mut weight = vec![0.0; cfg.addresses()];
    let mut signed = vec![0.0; cfg.capacity()];
    for (k, &p) in probs.iter().enumerate() {
        let i = k & mask;
        weight[i] += p;
        for j in 0..n_d {
            let sign = if k >> (n_a + j) & 1 == 0 { 1.0 } else { -1.0 };
            signed[i * n_d + j] += sign * p;
        }
    }
    signed
        .iter()
        .enumerate()
        .map(|(idx, s)| {
            let w = weight[idx / n_d];
            if w > 0.0 {
                s / w
            } else {
                f64::NAN
            }
        })
        .collect()
}

/// Analytic conditional expectations of a noiseless program.
pub fn exact_expectations(program: &NoisyProgram) -> Result<Vec<f64>> {
    if !program.is_noiseless() {
        return Err(Error::InvalidProgram(
            "exact expectations need a noiseless program".into(),
        ));
    }
    check_size(program.n_qubits(), EXACT_QUBIT_LIMIT)?;
    let compiled = program::compile(program)?;
    let mut sv = StateVector::zero(program.n_qubits())?;
    for op in &compiled.ops {
        if let program::Op::Gate { kind, qubits } = op {
            sv.apply_gate(kind, qubits);
        }
    }
    Ok(conditional_expectations(&sv.probabilities(), program.cfg()))
}

/// Mean of `samples` trajectory states (before readout) of a small program.
pub fn trajectory_average(
    program: &NoisyProgram,
    samples: u64,
    seed: u64,
) -> Result<DensityMatrix> {
    check_size(program.n_qubits(), 10)?;
    let compiled = program::compile(program)?;
    let n = program.n_qubits();
    let dim = 1usize << n;
    let mut acc = vec![num_complex::Complex64::new(0.0, 0.0); dim * dim];
    let mut sv = StateVector::zero(n)?;
    for k in 0..samples {
        let mut rng = trajectory::shot_rng(seed, k);
        trajectory::run_shot(&compiled, &mut sv, &mut rng);
        let a = sv.amplitudes();
        for r in 0..dim {
            for c in 0..dim {
                acc[r * dim + c] += a[r] * a[c].conj();
            }
        }
    }
    let scale = 1.0 / samples as f64;
    acc.iter_mut().for_each(|x| *x *= scale);
    Ok(DensityMatrix::from_raw(n, acc))
}
