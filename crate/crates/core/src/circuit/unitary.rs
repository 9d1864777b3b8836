use nalgebra::DMatrix;
use num_complex::Complex64;

use super::Circuit;
use crate::error::{Error, Result};
use crate::sim::StateVector;

pub const UNITARY_QUBIT_LIMIT: usize = 10;

/// Dense unitary of a circuit, built column by column from basis states.
/// Barriers and measurement are skipped.
pub fn unitary_of(circuit: &Circuit) -> Result<DMatrix<Complex64>> {
    let n = circuit.n_qubits();
    if n > UNITARY_QUBIT_LIMIT {
        return Err(Error::RegisterTooLarge {
            n_qubits: n,
            limit: UNITARY_QUBIT_LIMIT,
        });
    }
    let dim = 1usize << n;
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut sv = StateVector::basis(n, col)?;
        sv.run_circuit(circuit)?;
        for (row, a) in sv.amplitudes().iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn empty_circuit_is_identity() {
        let u = unitary_of(&Circuit::new(3)).unwrap();
        assert_eq!(u, DMatrix::identity(8, 8));
    }

    #[test]
    fn hadamard_matrix() {
        let mut c = Circuit::new(1);
        c.append(Gate::h(0)).unwrap();
        let u = unitary_of(&c).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expect = DMatrix::from_row_slice(2, 2, &[r, r, r, -r].map(|x| Complex64::new(x, 0.0)));
        assert!((u - expect).norm() < 1e-15);
    }

    #[test]
    fn barrier_and_measure_skipped() {
        let mut c = Circuit::new(2);
        c.barrier();
        c.measure_all();
        assert_eq!(unitary_of(&c).unwrap(), DMatrix::identity(4, 4));
    }

    #[test]
    fn too_large_rejected() {
        assert!(unitary_of(&Circuit::new(11)).is_err());
    }
}
