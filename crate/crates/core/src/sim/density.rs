use nalgebra::DMatrix;
use num_complex::Complex64;

use super::kernels;
use super::program::{ChannelOp, CompiledProgram, Op};
use super::StateVector;
use crate::circuit::{GateKind, Pauli};
use crate::error::{Error, Result};

/// Mixed state of `n` qubits stored row-major, `rho[row * 2^n + col]`.
///
/// As a flat buffer this is a vector over `2n` wires: wire `n + q` is the
/// row bit of qubit `q`, wire `q` its column bit. A gate `U` on qubit `q`
/// is `U` on wire `n + q` and `conj(U)` on wire `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zero(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        data[0] = Complex64::new(1.0, 0.0);
        Self { n_qubits, data }
    }

    pub fn from_pure(sv: &StateVector) -> Self {
        let a = sv.amplitudes();
        let dim = a.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = a[r] * a[c].conj();
            }
        }
        Self {
            n_qubits: sv.n_qubits(),
            data,
        }
    }

    pub(crate) fn from_raw(n_qubits: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), 1 << (2 * n_qubits));
        Self { n_qubits, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].re).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].re).collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let dim = self.dim();
        (0..dim).all(|r| (r..dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.dim();
        DMatrix::from_fn(dim, dim, |r, c| self.get(r, c))
    }

    /// Smallest eigenvalue; dense, so only meant for small registers.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = self.to_matrix();
        let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        m.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    fn row_wire(&self, q: usize) -> usize {
        self.n_qubits + q
    }

    pub fn apply_gate(&mut self, kind: GateKind, qubits: &[usize]) {
        let n = self.n_qubits;
        let (r0, c0) = (self.row_wire(qubits[0]), qubits[0]);
        let d = &mut self.data;
        match kind {
            GateKind::Ry(angle) => {
                let m = kernels::ry_matrix(angle);
                kernels::apply_real_1q(d, r0, m);
                kernels::apply_real_1q(d, c0, m);
            }
            GateKind::H => {
                kernels::apply_real_1q(d, r0, kernels::h_matrix());
                kernels::apply_real_1q(d, c0, kernels::h_matrix());
            }
            GateKind::Pauli(p) => apply_pauli_both(d, r0, c0, p),
            GateKind::CZ => {
                let (r1, c1) = (n + qubits[1], qubits[1]);
                kernels::apply_cz(d, r0, r1);
                kernels::apply_cz(d, c0, c1);
            }
            GateKind::CX => {
                let (r1, c1) = (n + qubits[1], qubits[1]);
                kernels::apply_cx(d, r0, r1);
                kernels::apply_cx(d, c0, c1);
            }
            GateKind::Barrier | GateKind::MeasureAll => {}
        }
    }

    /// Applies a Pauli channel as a Kraus sum.
    pub(crate) fn apply_channel(&mut self, channel: &ChannelOp) {
        let entries = channel.density_entries();
        let k = channel.arity;
        let mut wires: Vec<usize> = (0..k).map(|i| self.n_qubits + channel.qubits[i]).collect();
        wires.extend((0..k).map(|i| channel.qubits[i]));
        kernels::for_each_group(&mut self.data, &wires, |g| {
            let mut out = [Complex64::new(0.0, 0.0); 16];
            for &(src, dst, coef) in &entries {
                out[dst] += coef * g[src];
            }
            g.copy_from_slice(&out[..g.len()]);
        });
    }
}

fn apply_pauli_both(d: &mut [Complex64], row: usize, col: usize, p: Pauli) {
    match p {
        Pauli::I => {}
        Pauli::X => {
            kernels::apply_x(d, row);
            kernels::apply_x(d, col);
        }
        Pauli::Y => {
            kernels::apply_y(d, row, false);
            kernels::apply_y(d, col, true);
        }
        Pauli::Z => {
            kernels::apply_z(d, row);
            kernels::apply_z(d, col);
        }
    }
}

/// Evolves `|0...0><0...0|` through the program, checking the trace after
/// every instruction.
pub(crate) fn evolve(program: &CompiledProgram) -> Result<DensityMatrix> {
    let mut rho = DensityMatrix::zero(program.n_qubits);
    for (i, op) in program.ops.iter().enumerate() {
        match op {
            Op::Gate { kind, qubits } => rho.apply_gate(*kind, qubits),
            Op::Channel(c) => rho.apply_channel(c),
            Op::Boundary => {
                let tr = rho.trace();
                if (tr - 1.0).abs() >= 1e-10 {
                    return Err(Error::InvalidProgram(format!(
                        "trace drifted to {tr} at op {i}"
                    )));
                }
            }
        }
    }
    Ok(rho)
}
