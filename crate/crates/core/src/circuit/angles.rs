//! Data-to-angle conversion.
//!
//! A value `x` is stored as the half-angle `alpha = arccos(x) / 2`, so that
//! `Ry(2 alpha)|0>` has `<Z> = cos(2 alpha) = x`. The per-address rotation
//! angles `2 alpha_i` of one data qubit are turned into the `2^n_a` angles of
//! its uniformly controlled rotation by a Walsh-Hadamard transform read out in
//! Gray-code order. Data qubits in group position `p` see the address wires
//! relabeled by `b -> (b + p) mod n_a`, which rotates the Gray codewords.

use super::QCrankConfig;
use crate::error::{Error, Result};

/// Gray codeword of step `t`.
pub fn gray(t: usize) -> usize {
    t ^ (t >> 1)
}

/// Cyclic relabeling of the low `width` bits: bit `b` moves to `(b + shift) mod width`.
pub(crate) fn rotate_bits(word: usize, shift: usize, width: usize) -> usize {
    if width == 0 {
        return word;
    }
    let shift = shift % width;
    let mask = (1usize << width) - 1;
    let word = word & mask;
    if shift == 0 {
        word
    } else {
        ((word << shift) | (word >> (width - shift))) & mask
    }
}

/// In-place unnormalized Walsh-Hadamard transform in natural (Hadamard) order:
/// `out[m] = sum_i (-1)^{popcount(i & m)} in[i]`.
///
/// # Panics
/// If the length is not a power of two.
pub fn fwht(v: &mut [f64]) {
    let n = v.len();
    assert!(n.is_power_of_two(), "fwht length {n} is not a power of two");
    let mut h = 1;
    while h < n {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// Target half-angles and circuit rotation angles for one data set.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTable {
    cfg: QCrankConfig,
    /// `alpha[i * n_d + j]`, address `i`, data qubit `j`.
    alpha: Vec<f64>,
    /// `theta[t * n_d + j]`, Gray step `t`, data qubit `j`.
    theta: Vec<f64>,
}

impl AngleTable {
    pub fn cfg(&self) -> QCrankConfig {
        self.cfg
    }

    pub fn alpha(&self, address: usize, j: usize) -> f64 {
        self.alpha[address * self.cfg.n_d() + j]
    }

    pub fn theta(&self, step: usize, j: usize) -> f64 {
        self.theta[step * self.cfg.n_d() + j]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }

    /// Builds a table from rotation angles alone, recovering `alpha` by the
    /// inverse transform.
    pub fn from_thetas(cfg: QCrankConfig, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != cfg.capacity() {
            return Err(Error::LengthMismatch {
                expected: cfg.capacity(),
                got: theta.len(),
            });
        }
        let mut table = Self {
            cfg,
            alpha: vec![0.0; theta.len()],
            theta,
        };
        table.alpha = table.inverse_alpha();
        Ok(table)
    }

    /// Recomputes `alpha` from `theta`.
    pub fn inverse_alpha(&self) -> Vec<f64> {
        let (k, n_d) = (self.cfg.n_a(), self.cfg.n_d());
        let addresses = self.cfg.addresses();
        let mut alpha = vec![0.0; self.cfg.capacity()];
        let mut buf = vec![0.0; addresses];
        for j in 0..n_d {
            let p = j % k;
            for t in 0..addresses {
                buf[rotate_bits(gray(t), p, k)] = self.theta(t, j);
            }
            fwht(&mut buf);
            for (i, v) in buf.iter().enumerate() {
                alpha[i * n_d + j] = 0.5 * v;
            }
        }
        alpha
    }

    /// Data values implied by `alpha`: `x = cos(2 alpha)`.
    pub fn data(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| (2.0 * a).cos()).collect()
    }
}

/// Converts `data` (layout `data[i * n_d + j]`) into rotation angles.
pub fn compute_angles(data: &[f64], cfg: QCrankConfig) -> Result<AngleTable> {
    if data.len() != cfg.capacity() {
        return Err(Error::LengthMismatch {
            expected: cfg.capacity(),
            got: data.len(),
        });
    }
    if let Some((index, &value)) = data
        .iter()
        .enumerate()
        .find(|(_, x)| !(-1.0..=1.0).contains(*x))
    {
        return Err(Error::ValueOutOfRange { index, value });
    }

    let (k, n_d) = (cfg.n_a(), cfg.n_d());
    let addresses = cfg.addresses();
    let alpha: Vec<f64> = data.iter().map(|x| 0.5 * x.acos()).collect();
    let norm = 1.0 / addresses as f64;

    let mut theta = vec![0.0; cfg.capacity()];
    let mut buf = vec![0.0; addresses];
    for j in 0..n_d {
        let p = j % k;
        for (i, b) in buf.iter_mut().enumerate() {
            *b = 2.0 * alpha[i * n_d + j];
        }
        fwht(&mut buf);
        for t in 0..addresses {
            theta[t * n_d + j] = norm * buf[rotate_bits(gray(t), p, k)];
        }
    }
    Ok(AngleTable { cfg, alpha, theta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn parity(x: usize) -> f64 {
        if x.count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Direct O(4^k) transform, independent of the butterfly.
    fn direct_theta(alpha: &[f64], cfg: QCrankConfig) -> Vec<f64> {
        let (k, n_d, m) = (cfg.n_a(), cfg.n_d(), cfg.addresses());
        let mut theta = vec![0.0; cfg.capacity()];
        for j in 0..n_d {
            let p = j % k;
            for t in 0..m {
                let g = rotate_bits(gray(t), p, k);
                let s: f64 = (0..m)
                    .map(|i| parity(i & g) * 2.0 * alpha[i * n_d + j])
                    .sum();
                theta[t * n_d + j] = s / m as f64;
            }
        }
        theta
    }

    #[test]
    fn gray_code_neighbours_differ_in_one_bit() {
        for t in 0..255 {
            assert_eq!((gray(t) ^ gray(t + 1)).count_ones(), 1);
        }
    }

    #[test]
    fn rotate_bits_cycles() {
        assert_eq!(rotate_bits(0b0001, 1, 4), 0b0010);
        assert_eq!(rotate_bits(0b1000, 1, 4), 0b0001);
        assert_eq!(rotate_bits(0b1011, 4, 4), 0b1011);
        assert_eq!(rotate_bits(1, 0, 1), 1);
    }

    #[test]
    fn fwht_matches_definition() {
        let v: Vec<f64> = (0..8).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut w = v.clone();
        fwht(&mut w);
        for (m, wm) in w.iter().enumerate() {
            let d: f64 = v.iter().enumerate().map(|(i, x)| parity(i & m) * x).sum();
            assert!((wm - d).abs() < 1e-12);
        }
    }

    #[test]
    fn ones_give_zero_angles() {
        let cfg = QCrankConfig::new(1, 1).unwrap();
        let t = compute_angles(&[1.0, 1.0], cfg).unwrap();
        assert_eq!(t.alphas(), &[0.0, 0.0]);
        assert_eq!(t.thetas(), &[0.0, 0.0]);
    }

    #[test]
    fn zero_data_excites_only_uniform_component() {
        for (a, d) in [(1, 1), (2, 4), (3, 6), (4, 8)] {
            let cfg = QCrankConfig::new(a, d).unwrap();
            let t = compute_angles(&vec![0.0; cfg.capacity()], cfg).unwrap();
            assert!(t
                .alphas()
                .iter()
                .all(|&x| (x - FRAC_PI_2 / 2.0).abs() < 1e-15));
            for j in 0..d {
                assert!((t.theta(0, j) - FRAC_PI_2).abs() < 1e-15);
                for s in 1..cfg.addresses() {
                    assert!(t.theta(s, j).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = QCrankConfig::new(2, 2).unwrap();
        assert!(matches!(
            compute_angles(&[0.0; 7], cfg),
            Err(Error::LengthMismatch {
                expected: 8,
                got: 7
            })
        ));
        let mut data = [0.0; 8];
        data[5] = 1.5;
        assert!(matches!(
            compute_angles(&data, cfg),
            Err(Error::ValueOutOfRange { index: 5, .. })
        ));
        data[5] = f64::NAN;
        assert!(compute_angles(&data, cfg).is_err());
    }

    #[test]
    fn extreme_values_are_not_special_cased() {
        let cfg = QCrankConfig::new(2, 2).unwrap();
        let data = [1.0, -1.0, -1.0, 1.0, 1.0, 1.0, -1.0, -1.0];
        let t = compute_angles(&data, cfg).unwrap();
        for (a, x) in t.alphas().iter().zip(data) {
            let expect = if x > 0.0 { 0.0 } else { FRAC_PI_2 };
            assert!((a - expect).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn butterfly_matches_direct_transform(
            (a, d) in prop_oneof![Just((1usize, 2usize)), Just((2, 4)), Just((3, 3)), Just((4, 4)), Just((5, 5))],
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let cfg = QCrankConfig::new(a, d).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..cfg.capacity()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let t = compute_angles(&data, cfg).unwrap();
            for (x, y) in t.thetas().iter().zip(direct_theta(t.alphas(), cfg)) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn inverse_transform_recovers_alpha(
            (a, d) in prop_oneof![Just((1usize, 1usize)), Just((2, 4)), Just((3, 6)), Just((4, 8)), Just((5, 10))],
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let cfg = QCrankConfig::new(a, d).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..cfg.capacity()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let t = compute_angles(&data, cfg).unwrap();
            for (x, y) in t.alphas().iter().zip(t.inverse_alpha()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
            prop_assert!(t.alphas().iter().all(|&x| (0.0..=FRAC_PI_2).contains(&x)));
        }
    }
}
