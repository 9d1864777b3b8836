use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::program::{CompiledProgram, Op};
use super::StateVector;

/// Registers at least this large parallelise inside each kernel instead of
/// across shots, so only one state vector is alive at a time.
const SERIAL_SHOTS_FROM: usize = 16;

/// Generator of one shot. Shot `k` always reads stream `k` of the seed, so
/// the outcome of a shot never depends on which thread ran it.
pub(crate) fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Runs one pure-state trajectory in `sv` (which is reset first), drawing one
/// variate per channel, and returns the sampled outcome.
pub(crate) fn run_shot(
    program: &CompiledProgram,
    sv: &mut StateVector,
    rng: &mut ChaCha8Rng,
) -> usize {
    sv.reset();
    for op in &program.ops {
        match op {
            Op::Gate { kind, qubits } => sv.apply_gate(kind, qubits),
            Op::Channel(c) => {
                let u: f64 = rng.gen();
                if let Some(term) = c.pick(u) {
                    for (i, &p) in term.paulis.iter().take(c.arity).enumerate() {
                        sv.apply_pauli(c.qubits[i], p);
                    }
                }
            }
            Op::Boundary => {}
        }
    }
    sv.sample(rng)
}

/// Outcomes of `shots` trajectories, in shot order.
pub(crate) fn sample_outcomes(program: &CompiledProgram, shots: u64, seed: u64) -> Vec<usize> {
    let n = program.n_qubits;
    let fresh = || StateVector::zero(n).expect("register size checked by caller");
    if n >= SERIAL_SHOTS_FROM {
        let mut sv = fresh();
        return (0..shots)
            .map(|k| run_shot(program, &mut sv, &mut shot_rng(seed, k)))
            .collect();
    }
    (0..shots)
        .into_par_iter()
        .map_init(fresh, |sv, k| run_shot(program, sv, &mut shot_rng(seed, k)))
        .collect()
}
