//! Gate-level circuit representation and the QCrank circuit builders.
//!
//! Qubit numbering is fixed throughout the crate: address qubit `b` is qubit
//! `b`, data qubit `j` is qubit `n_a + j`. In every state-vector index, qubit
//! `q` is bit `q`, so the low `n_a` bits of a basis index are the address.

mod angles;
pub(crate) mod builder;
mod unitary;

pub use angles::{compute_angles, fwht, gray, AngleTable};
pub use builder::{build_dpqa, build_original, control_schedule, ControlSchedule, CzLayerSpec};
pub use unitary::{unitary_of, UNITARY_QUBIT_LIMIT};

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Register split of a QCrank encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QCrankConfig {
    n_a: usize,
    n_d: usize,
}

impl QCrankConfig {
    /// Largest address register accepted; keeps `2^n_a` angle tables small.
    pub const MAX_ADDRESS_QUBITS: usize = 16;

    pub fn new(n_a: usize, n_d: usize) -> Result<Self> {
        if n_a == 0 || n_d == 0 {
            return Err(Error::InvalidConfig(format!(
                "n_a and n_d must be at least 1 (got {n_a}, {n_d})"
            )));
        }
        if n_a > Self::MAX_ADDRESS_QUBITS {
            return Err(Error::InvalidConfig(format!(
                "n_a = {n_a} exceeds {}",
                Self::MAX_ADDRESS_QUBITS
            )));
        }
        if !n_d.is_multiple_of(n_a) {
            return Err(Error::InvalidConfig(format!(
                "n_d = {n_d} is not divisible by n_a = {n_a}"
            )));
        }
        Ok(Self { n_a, n_d })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_d(&self) -> usize {
        self.n_d
    }

    pub fn n_qubits(&self) -> usize {
        self.n_a + self.n_d
    }

    /// Number of addresses, `2^n_a`.
    pub fn addresses(&self) -> usize {
        1 << self.n_a
    }

    /// Stored real values, `n_d * 2^n_a`. Also the number of entangling gates.
    pub fn capacity(&self) -> usize {
        self.n_d * self.addresses()
    }

    /// Data rows of width `n_a`.
    pub fn data_rows(&self) -> usize {
        self.n_d / self.n_a
    }

    /// Number of parallel CZ layers, `(n_d / n_a) * 2^n_a`.
    pub fn cz_depth(&self) -> usize {
        self.data_rows() * self.addresses()
    }

    pub fn data_qubit(&self, j: usize) -> usize {
        self.n_a + j
    }

    pub fn is_address(&self, qubit: usize) -> bool {
        qubit < self.n_a
    }

    /// Index into a flat data vector for address `i`, data qubit `j`.
    pub fn data_index(&self, address: usize, j: usize) -> usize {
        address * self.n_d + j
    }

    pub fn label(&self) -> String {
        format!("{}+{}", self.n_a, self.n_d)
    }
}

impl fmt::Display for QCrankConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n_a, self.n_d)
    }
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    /// Rotation about y by the given angle in radians.
    Ry(f64),
    H,
    /// Pauli gate; only used for fault injection and error frames.
    Pauli(Pauli),
    CZ,
    /// Control first, target second. Only appears in the original layout.
    CX,
    Barrier,
    MeasureAll,
}

impl GateKind {
    pub fn arity(&self) -> Option<usize> {
        match self {
            GateKind::Ry(_) | GateKind::H | GateKind::Pauli(_) => Some(1),
            GateKind::CZ | GateKind::CX => Some(2),
            GateKind::Barrier | GateKind::MeasureAll => None,
        }
    }

    pub fn is_single_qubit(&self) -> bool {
        self.arity() == Some(1)
    }

    pub fn is_two_qubit(&self) -> bool {
        self.arity() == Some(2)
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Ry(_) => "RY",
            GateKind::H => "H",
            GateKind::Pauli(Pauli::I) => "I",
            GateKind::Pauli(Pauli::X) => "X",
            GateKind::Pauli(Pauli::Y) => "Y",
            GateKind::Pauli(Pauli::Z) => "Z",
            GateKind::CZ => "CZ",
            GateKind::CX => "CX",
            GateKind::Barrier => "BARRIER",
            GateKind::MeasureAll => "MEASURE",
        }
    }

    pub fn angle(&self) -> f64 {
        match self {
            GateKind::Ry(a) => *a,
            _ => 0.0,
        }
    }
}

/// Whether a single-qubit gate is driven by a global beam or a focused one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scope {
    Global,
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub scope: Scope,
}

impl Gate {
    pub fn ry(qubit: usize, angle: f64) -> Self {
        Self::local(GateKind::Ry(angle), vec![qubit])
    }

    pub fn h(qubit: usize) -> Self {
        Self::local(GateKind::H, vec![qubit])
    }

    pub fn pauli(qubit: usize, p: Pauli) -> Self {
        Self::local(GateKind::Pauli(p), vec![qubit])
    }

    pub fn cz(a: usize, b: usize) -> Self {
        Self::local(GateKind::CZ, vec![a, b])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::local(GateKind::CX, vec![control, target])
    }

    fn local(kind: GateKind, qubits: Vec<usize>) -> Self {
        Self {
            kind,
            qubits,
            scope: Scope::Local,
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if let Some(k) = self.kind.arity() {
            if self.qubits.len() != k {
                return Err(Error::Dimension(format!(
                    "{} expects {k} qubit(s), got {}",
                    self.kind.name(),
                    self.qubits.len()
                )));
            }
            if k == 2 && self.qubits[0] == self.qubits[1] {
                return Err(Error::Dimension(format!(
                    "{} on repeated qubit {}",
                    self.kind.name(),
                    self.qubits[0]
                )));
            }
        }
        if let Some(&q) = self.qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::Dimension(format!(
                "qubit {q} out of range for {n_qubits} qubits"
            )));
        }
        Ok(())
    }
}

/// An ordered list of layers; gates within one layer act on disjoint qubits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    layers: Vec<Vec<Gate>>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            layers: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    /// Appends a layer as given. Single-qubit layers are re-tagged: a layer is
    /// global iff the identical gate acts on every qubit of the register.
    pub fn push_layer(&mut self, mut gates: Vec<Gate>) -> Result<()> {
        if gates.is_empty() {
            return Ok(());
        }
        let mut used = vec![false; self.n_qubits];
        for g in &gates {
            g.validate(self.n_qubits)?;
            if g.kind.arity().is_none() {
                if gates.len() != 1 {
                    return Err(Error::Dimension(format!(
                        "{} must be alone in its layer",
                        g.kind.name()
                    )));
                }
                continue;
            }
            for &q in &g.qubits {
                if std::mem::replace(&mut used[q], true) {
                    return Err(Error::Dimension(format!(
                        "qubit {q} used twice in one layer"
                    )));
                }
            }
        }
        let scope = layer_scope(&gates, self.n_qubits);
        for g in gates.iter_mut().filter(|g| g.kind.is_single_qubit()) {
            g.scope = scope;
        }
        self.layers.push(gates);
        Ok(())
    }

    pub fn barrier(&mut self) {
        let g = Gate {
            kind: GateKind::Barrier,
            qubits: (0..self.n_qubits).collect(),
            scope: Scope::Global,
        };
        self.layers.push(vec![g]);
    }

    pub fn measure_all(&mut self) {
        let g = Gate {
            kind: GateKind::MeasureAll,
            qubits: (0..self.n_qubits).collect(),
            scope: Scope::Global,
        };
        self.layers.push(vec![g]);
    }

    /// Appends a gate into the earliest layer after the last use of any of
    /// its qubits (as-soon-as-possible packing). Barriers fence packing.
    pub fn append(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if gate.kind.arity().is_none() {
            match gate.kind {
                GateKind::MeasureAll => self.measure_all(),
                _ => self.barrier(),
            }
            return Ok(());
        }
        let mut slot = self.layers.len();
        while slot > 0 {
            let layer = &self.layers[slot - 1];
            let blocked = layer.iter().any(|g| {
                g.kind.arity().is_none() || g.qubits.iter().any(|q| gate.qubits.contains(q))
            });
            if blocked {
                break;
            }
            slot -= 1;
        }
        if slot == self.layers.len() {
            self.layers.push(vec![gate]);
        } else {
            self.layers[slot].push(gate);
        }
        Ok(())
    }

    /// Inserts a layer at `index` (layer boundaries count from 0 = before the
    /// first layer). Used for fault injection.
    pub fn insert_layer(&mut self, index: usize, gates: Vec<Gate>) -> Result<()> {
        let mut tmp = Circuit::new(self.n_qubits);
        tmp.push_layer(gates)?;
        if let Some(layer) = tmp.layers.pop() {
            self.layers.insert(index.min(self.layers.len()), layer);
        }
        Ok(())
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates().filter(|g| g.kind.is_two_qubit()).count()
    }

    /// Number of layers that contain at least one two-qubit gate.
    pub fn two_qubit_depth(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| l.iter().any(|g| g.kind.is_two_qubit()))
            .count()
    }

    /// Indices of barrier layers.
    pub fn barrier_positions(&self) -> Vec<usize> {
        self.layers
            .iter()
            .enumerate()
            .filter(|(_, l)| l.iter().any(|g| g.kind == GateKind::Barrier))
            .map(|(i, _)| i)
            .collect()
    }
}

fn layer_scope(gates: &[Gate], n_qubits: usize) -> Scope {
    let uniform = gates.len() == n_qubits
        && gates
            .iter()
            .all(|g| g.kind.is_single_qubit() && g.kind == gates[0].kind);
    if uniform {
        Scope::Global
    } else {
        Scope::Local
    }
}
