use num_complex::Complex64;
use rand::Rng;

use super::kernels;
use crate::circuit::{Circuit, GateKind, Pauli};
use crate::error::{Error, Result};

/// Pure state of `n` qubits; qubit `q` is bit `q` of the amplitude index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Largest register the state-vector backend will allocate.
    pub const QUBIT_LIMIT: usize = 30;

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > Self::QUBIT_LIMIT {
            return Err(Error::RegisterTooLarge {
                n_qubits,
                limit: Self::QUBIT_LIMIT,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::Dimension(format!(
                "{} amplitudes is not a power of two",
                amps.len()
            )));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn reset(&mut self) {
        self.amps
            .iter_mut()
            .for_each(|a| *a = Complex64::new(0.0, 0.0));
        self.amps[0] = Complex64::new(1.0, 0.0);
    }

    pub fn copy_from(&mut self, other: &StateVector) {
        self.amps.copy_from_slice(&other.amps);
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_ry(&mut self, q: usize, angle: f64) {
        kernels::apply_real_1q(&mut self.amps, q, kernels::ry_matrix(angle));
    }

    pub fn apply_h(&mut self, q: usize) {
        kernels::apply_real_1q(&mut self.amps, q, kernels::h_matrix());
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        kernels::apply_cz(&mut self.amps, a, b);
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        kernels::apply_cx(&mut self.amps, control, target);
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        match p {
            Pauli::I => {}
            Pauli::X => kernels::apply_x(&mut self.amps, q),
            Pauli::Y => kernels::apply_y(&mut self.amps, q, false),
            Pauli::Z => kernels::apply_z(&mut self.amps, q),
        }
    }

    /// Applies a unitary gate; barriers and measurement are no-ops here.
    pub fn apply_gate(&mut self, kind: &GateKind, qubits: &[usize]) {
        match *kind {
            GateKind::Ry(angle) => self.apply_ry(qubits[0], angle),
            GateKind::H => self.apply_h(qubits[0]),
            GateKind::Pauli(p) => self.apply_pauli(qubits[0], p),
            GateKind::CZ => self.apply_cz(qubits[0], qubits[1]),
            GateKind::CX => self.apply_cx(qubits[0], qubits[1]),
            GateKind::Barrier | GateKind::MeasureAll => {}
        }
    }

    pub fn run_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "circuit on {} qubits applied to a {}-qubit state",
                circuit.n_qubits(),
                self.n_qubits
            )));
        }
        for g in circuit.gates() {
            self.apply_gate(&g.kind, &g.qubits);
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Draws one computational-basis outcome with a single uniform variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>() * self.norm_sqr();
        let mut acc = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            acc += a.norm_sqr();
            if u < acc {
                return i;
            }
        }
        // Rounding left u at the very top; return the last populated index.
        self.amps
            .iter()
            .rposition(|a| a.norm_sqr() > 0.0)
            .unwrap_or(0)
    }
}

/// Output distribution of a circuit started from `|0...0>`.
pub fn circuit_probabilities(circuit: &Circuit) -> Result<Vec<f64>> {
    let mut sv = StateVector::zero(circuit.n_qubits())?;
    sv.run_circuit(circuit)?;
    Ok(sv.probabilities())
}
