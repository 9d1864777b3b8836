//! Flattening of a noisy program into backend operations.

use num_complex::Complex64;

use crate::circuit::{GateKind, Pauli};
use crate::compiler::Instruction;
use crate::error::{Error, Result};
use crate::noise::{Channel, NoisyProgram, PauliTerm};

/// Sampling table of one channel application.
#[derive(Debug, Clone)]
pub(crate) struct ChannelOp {
    pub qubits: [usize; 2],
    pub arity: usize,
    pub terms: Vec<PauliTerm>,
    /// Running sums of `terms[..].prob`.
    pub cumulative: Vec<f64>,
}

impl ChannelOp {
    pub(crate) fn new(channel: &Channel, qubits: &[usize]) -> Self {
        let terms = channel.terms();
        let cumulative = terms
            .iter()
            .scan(0.0, |acc, t| {
                *acc += t.prob;
                Some(*acc)
            })
            .collect();
        let q1 = qubits.get(1).copied().unwrap_or(usize::MAX);
        Self {
            qubits: [qubits[0], q1],
            arity: channel.arity(),
            terms,
            cumulative,
        }
    }

    pub fn error_probability(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Term selected by a uniform variate in `[0, 1)`, or `None` for identity.
    pub fn pick(&self, u: f64) -> Option<&PauliTerm> {
        if u >= self.error_probability() {
            return None;
        }
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.terms.get(k)
    }

    /// Coefficients of the density-matrix action on a group of `4^arity`
    /// entries: `(src, dst, coef)` with local index `row | col << arity`.
    pub fn density_entries(&self) -> Vec<(usize, usize, Complex64)> {
        let k = self.arity;
        let size = 1usize << k;
        let mut coef = vec![Complex64::new(0.0, 0.0); size * size * size];
        let identity = 1.0 - self.error_probability();
        let all: Vec<(f64, [Pauli; 2])> = std::iter::once((identity, [Pauli::I, Pauli::I]))
            .chain(self.terms.iter().map(|t| (t.prob, t.paulis)))
            .collect();
        for (prob, paulis) in all {
            let mut flip = 0usize;
            for (i, p) in paulis.iter().take(k).enumerate() {
                if matches!(p, Pauli::X | Pauli::Y) {
                    flip |= 1 << i;
                }
            }
            let phase = |r: usize| -> Complex64 {
                paulis
                    .iter()
                    .take(k)
                    .enumerate()
                    .fold(Complex64::new(1.0, 0.0), |acc, (i, p)| {
                        let bit = r >> i & 1;
                        acc * match (p, bit) {
                            (Pauli::Y, 0) => Complex64::new(0.0, 1.0),
                            (Pauli::Y, _) => Complex64::new(0.0, -1.0),
                            (Pauli::Z, 1) => Complex64::new(-1.0, 0.0),
                            _ => Complex64::new(1.0, 0.0),
                        }
                    })
            };
            for r in 0..size {
                for c in 0..size {
                    coef[(flip * size + r) * size + c] += prob * phase(r) * phase(c).conj();
                }
            }
        }
        let mut out = Vec::new();
        for flip in 0..size {
            for r in 0..size {
                for c in 0..size {
                    let v = coef[(flip * size + r) * size + c];
                    if v != Complex64::new(0.0, 0.0) {
                        out.push((r | c << k, (r ^ flip) | (c ^ flip) << k, v));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Op {
    Gate {
        kind: GateKind,
        qubits: [usize; 2],
    },
    Channel(ChannelOp),
    /// Marks the end of one source instruction (for per-instruction checks).
    Boundary,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledProgram {
    pub n_qubits: usize,
    pub ops: Vec<Op>,
}

fn gate(kind: GateKind, qubits: &[usize], n: usize) -> Result<Op> {
    if !kind.is_single_qubit() && !kind.is_two_qubit() {
        return Err(Error::InvalidProgram(format!(
            "{} is not a unitary gate",
            kind.name()
        )));
    }
    if qubits.iter().any(|&q| q >= n) {
        return Err(Error::InvalidProgram(format!(
            "gate on {qubits:?} outside {n} qubits"
        )));
    }
    let q1 = qubits.get(1).copied().unwrap_or(usize::MAX);
    Ok(Op::Gate {
        kind,
        qubits: [qubits[0], q1],
    })
}

/// Lowers instructions to gates and channels. Moves carry no unitary action.
/// Measurement must be the final instruction; an absent one is implied.
pub(crate) fn compile(program: &NoisyProgram) -> Result<CompiledProgram> {
    let n = program.n_qubits();
    let mut ops = Vec::new();
    let steps = program.steps();
    for (idx, step) in steps.iter().enumerate() {
        for c in &step.channels {
            if c.qubits.len() != c.channel.arity() || c.qubits.iter().any(|&q| q >= n) {
                return Err(Error::InvalidProgram(format!(
                    "channel on {:?} does not fit {n} qubits / arity {}",
                    c.qubits,
                    c.channel.arity()
                )));
            }
        }
        let channels = step
            .channels
            .iter()
            .map(|c| Op::Channel(ChannelOp::new(&c.channel, &c.qubits)));
        match &step.instruction {
            Instruction::MeasureAll => {
                if idx + 1 != steps.len() {
                    return Err(Error::InvalidProgram(
                        "measurement must be the final instruction".into(),
                    ));
                }
                ops.extend(channels);
            }
            Instruction::Move(_) => ops.extend(channels),
            Instruction::GlobalU { kind } => {
                for q in 0..n {
                    ops.push(gate(*kind, &[q], n)?);
                }
                ops.extend(channels);
            }
            Instruction::LocalU { qubit, kind } => {
                ops.push(gate(*kind, &[*qubit], n)?);
                ops.extend(channels);
            }
            Instruction::GlobalCZ(pulse) => {
                for &(a, d) in &pulse.pairs {
                    ops.push(gate(GateKind::CZ, &[a, d], n)?);
                }
                ops.extend(channels);
            }
        }
        ops.push(Op::Boundary);
    }
    Ok(CompiledProgram { n_qubits: n, ops })
}
