//! Reconstruction of the stored sequence from shot counts and its scoring.

use serde::{Deserialize, Serialize};

use crate::circuit::QCrankConfig;
use crate::error::{Error, Result};
use crate::sim::ShotCounts;

/// Reconstructed values `x̂[i * n_d + j]`; `None` where address `i` got no shots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedSequence {
    cfg: QCrankConfig,
    values: Vec<Option<f64>>,
    /// Shots that landed on each entry's address.
    shots: Vec<u64>,
}

impl DecodedSequence {
    /// Wraps exact values, e.g. from `exact_expectations`.
    pub fn from_values(cfg: QCrankConfig, values: &[f64]) -> Result<Self> {
        if values.len() != cfg.capacity() {
            return Err(Error::LengthMismatch {
                expected: cfg.capacity(),
                got: values.len(),
            });
        }
        Ok(Self {
            cfg,
            values: values.iter().map(|v| v.is_finite().then_some(*v)).collect(),
            shots: vec![0; values.len()],
        })
    }

    pub fn cfg(&self) -> QCrankConfig {
        self.cfg
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn value(&self, address: usize, j: usize) -> Option<f64> {
        self.values[self.cfg.data_index(address, j)]
    }

    pub fn shots(&self) -> &[u64] {
        &self.shots
    }

    /// Addresses without any shots.
    pub fn missing_addresses(&self) -> Vec<usize> {
        let n_d = self.cfg.n_d();
        (0..self.cfg.addresses())
            .filter(|&i| self.values[i * n_d].is_none())
            .collect()
    }

    /// Multiplies every present value by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v.map(|x| x * k)).collect(),
            ..self.clone()
        }
    }

    fn pairs<'a>(&'a self, truth: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
        self.values
            .iter()
            .zip(truth)
            .filter_map(|(v, t)| v.map(|x| (x, *t)))
    }
}

pub fn decode(counts: &ShotCounts, cfg: QCrankConfig) -> Result<DecodedSequence> {
    if counts.n_qubits() != cfg.n_qubits() {
        return Err(Error::Dimension(format!(
            "counts over {} qubits cannot be decoded as {cfg}",
            counts.n_qubits()
        )));
    }
    let (n_a, n_d) = (cfg.n_a(), cfg.n_d());
    let mask = cfg.addresses() - 1;
    let mut ones = vec![0u64; cfg.capacity()];
    let totals = counts.address_totals(cfg);
    for (k, c) in counts.iter() {
        let i = k & mask;
        for j in 0..n_d {
            if k >> (n_a + j) & 1 == 1 {
                ones[i * n_d + j] += c;
            }
        }
    }
    let mut values = Vec::with_capacity(cfg.capacity());
    let mut shots = Vec::with_capacity(cfg.capacity());
    for (i, &total) in totals.iter().enumerate() {
        if total == 0 {
            log::warn!("address {i} of {cfg} received no shots; its entries are excluded");
        }
        for j in 0..n_d {
            let n1 = ones[i * n_d + j];
            let n0 = total - n1;
            values.push((total > 0).then(|| (n0 as f64 - n1 as f64) / total as f64));
            shots.push(total);
        }
    }
    Ok(DecodedSequence { cfg, values, shots })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub c: f64,
}

impl Calibration {
    pub fn identity() -> Self {
        Self { c: 1.0 }
    }

    pub fn dynamic_range(&self) -> f64 {
        1.0 / self.c
    }
}

fn check_len(decoded: &DecodedSequence, truth: &[f64]) -> Result<()> {
    if truth.len() != decoded.len() {
        return Err(Error::LengthMismatch {
            expected: decoded.len(),
            got: truth.len(),
        });
    }
    Ok(())
}

/// Least-squares single factor `c` minimising `Σ (c x̂ - truth)²`.
pub fn fit_calibration(decoded: &DecodedSequence, truth: &[f64]) -> Result<Calibration> {
    check_len(decoded, truth)?;
    let (xt, xx) = decoded
        .pairs(truth)
        .fold((0.0, 0.0), |(xt, xx), (x, t)| (xt + x * t, xx + x * x));
    if xx == 0.0 {
        return Err(Error::DegenerateCalibration(
            "all reconstructed values are zero".into(),
        ));
    }
    Ok(Calibration { c: xt / xx })
}

pub const HISTOGRAM_RANGE: (f64, f64) = (-0.5, 0.5);
pub const HISTOGRAM_BIN_WIDTH: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub underflow: u64,
    pub overflow: u64,
}

impl Histogram {
    fn of(values: &[f64]) -> Self {
        let (lo, hi) = HISTOGRAM_RANGE;
        let bins = ((hi - lo) / HISTOGRAM_BIN_WIDTH).round() as usize;
        let edges = (0..=bins)
            .map(|b| lo + b as f64 * HISTOGRAM_BIN_WIDTH)
            .collect();
        let mut h = Self {
            edges,
            counts: vec![0; bins],
            underflow: 0,
            overflow: 0,
        };
        for &v in values {
            if v < lo {
                h.underflow += 1;
            } else if v >= hi {
                h.overflow += 1;
            } else {
                let b = (((v - lo) / HISTOGRAM_BIN_WIDTH) as usize).min(bins - 1);
                h.counts[b] += 1;
            }
        }
        h
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseReport {
    /// Standard deviation of `x̂ - truth`.
    pub rmse_raw: f64,
    /// Standard deviation of `c x̂ - truth`.
    pub rmse_calibrated: f64,
    /// Root mean square of `c x̂ - truth` about zero.
    pub rms_calibrated: f64,
    pub mean_residual: f64,
    pub calibration: Calibration,
    pub dynamic_range: f64,
    pub histogram: Histogram,
    /// Entries scored (present ones).
    pub entries: usize,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (0.0, 0.0);
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn rmse(
    decoded: &DecodedSequence,
    truth: &[f64],
    calibration: Calibration,
) -> Result<RmseReport> {
    check_len(decoded, truth)?;
    let c = calibration.c;
    let raw: Vec<f64> = decoded.pairs(truth).map(|(x, t)| x - t).collect();
    let cal: Vec<f64> = decoded.pairs(truth).map(|(x, t)| c * x - t).collect();
    let (_, rmse_raw) = mean_std(&raw);
    let (mean_residual, rmse_calibrated) = mean_std(&cal);
    let rms_calibrated = if cal.is_empty() {
        0.0
    } else {
        (cal.iter().map(|r| r * r).sum::<f64>() / cal.len() as f64).sqrt()
    };
    Ok(RmseReport {
        rmse_raw,
        rmse_calibrated,
        rms_calibrated,
        mean_residual,
        calibration,
        dynamic_range: calibration.dynamic_range(),
        histogram: Histogram::of(&cal),
        entries: cal.len(),
    })
}

/// Fits the factor on the calibration run only and scores the evaluation run.
pub fn two_run_protocol(
    calib_counts: &ShotCounts,
    eval_counts: &ShotCounts,
    calib_truth: &[f64],
    eval_truth: &[f64],
    cfg: QCrankConfig,
) -> Result<RmseReport> {
    for (what, c) in [("calibration", calib_counts), ("evaluation", eval_counts)] {
        if c.n_qubits() != cfg.n_qubits() {
            return Err(Error::ConfigMismatch(format!(
                "{what} run has {} qubits, {cfg} needs {}",
                c.n_qubits(),
                cfg.n_qubits()
            )));
        }
    }
    let calibration = fit_calibration(&decode(calib_counts, cfg)?, calib_truth)?;
    rmse(&decode(eval_counts, cfg)?, eval_truth, calibration)
}
