use super::angles::{gray, AngleTable};
use super::{Circuit, Gate, QCrankConfig};
use crate::error::{Error, Result};

/// Address controls of every uniformly controlled rotation, per Gray step.
///
/// `controls(t)[p]` is the address qubit that the data qubits in group
/// position `p` are entangled with at Gray step `t`. The base sequence is the
/// position of the bit flipped between codewords `t` and `t + 1` (cyclically);
/// position `p` adds `p` modulo `n_a`, so every step uses each address once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ControlSchedule {
    n_a: usize,
    steps: Vec<Vec<usize>>,
}

impl ControlSchedule {
    /// Wraps an arbitrary per-step control table; entries must be valid
    /// address indices and each step must list one control per position.
    pub fn from_steps(n_a: usize, steps: Vec<Vec<usize>>) -> Result<Self> {
        for (t, s) in steps.iter().enumerate() {
            if s.len() != n_a {
                return Err(Error::Dimension(format!(
                    "step {t} lists {} controls, expected {n_a}",
                    s.len()
                )));
            }
            if let Some(&c) = s.iter().find(|&&c| c >= n_a) {
                return Err(Error::Dimension(format!(
                    "step {t} uses address {c} >= {n_a}"
                )));
            }
        }
        Ok(Self { n_a, steps })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn steps(&self) -> &[Vec<usize>] {
        &self.steps
    }

    pub fn controls(&self, step: usize) -> &[usize] {
        &self.steps[step]
    }

    /// Control sequence of one group position across all steps.
    pub fn sequence(&self, position: usize) -> Vec<usize> {
        self.steps.iter().map(|s| s[position]).collect()
    }

    /// The `c` with `controls(step)[p] == (c + p) mod n_a` for all `p`, if any.
    pub fn cyclic_offset(&self, step: usize) -> Option<usize> {
        cyclic_offset_of(&self.steps[step], self.n_a)
    }
}

pub(crate) fn cyclic_offset_of(controls: &[usize], n_a: usize) -> Option<usize> {
    let c = *controls.first()?;
    controls
        .iter()
        .enumerate()
        .all(|(p, &x)| x == (c + p) % n_a)
        .then_some(c)
}

pub fn control_schedule(cfg: QCrankConfig) -> ControlSchedule {
    let (k, m) = (cfg.n_a(), cfg.addresses());
    let steps = (0..m)
        .map(|t| {
            let base = (gray(t) ^ gray((t + 1) % m)).trailing_zeros() as usize;
            (0..k).map(|p| (base + p) % k).collect()
        })
        .collect();
    ControlSchedule { n_a: k, steps }
}

/// One parallel CZ layer of the DPQA circuit: all addresses against one data row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzLayerSpec {
    pub step: usize,
    pub row: usize,
    /// `controls[p]` pairs with data qubit `row * n_a + p`.
    pub controls: Vec<usize>,
}

/// Rows visited at a Gray step: forward on even steps, backward on odd ones,
/// so each step starts on the row where the previous one ended.
pub(crate) fn row_order(step: usize, rows: usize) -> Vec<usize> {
    if step.is_multiple_of(2) {
        (0..rows).collect()
    } else {
        (0..rows).rev().collect()
    }
}

pub(crate) fn cz_layers(cfg: QCrankConfig, schedule: &ControlSchedule) -> Vec<CzLayerSpec> {
    let rows = cfg.data_rows();
    schedule
        .steps()
        .iter()
        .enumerate()
        .flat_map(|(t, controls)| {
            row_order(t, rows).into_iter().map(move |row| CzLayerSpec {
                step: t,
                row,
                controls: controls.clone(),
            })
        })
        .collect()
}

fn check_angles(cfg: QCrankConfig, angles: &AngleTable) -> Result<()> {
    if angles.cfg() != cfg {
        return Err(Error::Dimension(format!(
            "angle table built for {} used with {}",
            angles.cfg(),
            cfg
        )));
    }
    Ok(())
}

/// QCrank circuit in its original CX form: Hadamards on the address
/// register, then for each data qubit a Gray-ordered chain of `Ry` and CX.
pub fn build_original(cfg: QCrankConfig, angles: &AngleTable) -> Result<Circuit> {
    check_angles(cfg, angles)?;
    let schedule = control_schedule(cfg);
    let mut circuit = Circuit::new(cfg.n_qubits());
    for b in 0..cfg.n_a() {
        circuit.append(Gate::h(b))?;
    }
    for t in 0..cfg.addresses() {
        let controls = schedule.controls(t);
        for j in 0..cfg.n_d() {
            let target = cfg.data_qubit(j);
            circuit.append(Gate::ry(target, angles.theta(t, j)))?;
            circuit.append(Gate::cx(controls[j % cfg.n_a()], target))?;
        }
    }
    circuit.measure_all();
    Ok(circuit)
}

/// QCrank circuit in the neutral-atom native form.
///
/// Each CX is rewritten as `H CZ H`; the Hadamards between consecutive CZs
/// cancel by flipping the sign of the enclosed `Ry`, leaving one global
/// Hadamard layer at the start and a Hadamard on each data qubit at the end.
/// Every Gray step is fenced by a barrier and holds one layer of data `Ry`
/// followed by one CZ layer per data row, `n_a` gates wide.
pub fn build_dpqa(cfg: QCrankConfig, angles: &AngleTable) -> Result<Circuit> {
    check_angles(cfg, angles)?;
    let schedule = control_schedule(cfg);
    let n_a = cfg.n_a();
    let mut circuit = Circuit::new(cfg.n_qubits());
    circuit.push_layer((0..cfg.n_qubits()).map(Gate::h).collect())?;

    let layers = cz_layers(cfg, &schedule);
    let mut next = layers.iter().peekable();
    for t in 0..cfg.addresses() {
        circuit.barrier();
        circuit.push_layer(
            (0..cfg.n_d())
                .map(|j| Gate::ry(cfg.data_qubit(j), -angles.theta(t, j)))
                .collect(),
        )?;
        while let Some(layer) = next.next_if(|l| l.step == t) {
            circuit.push_layer(
                layer
                    .controls
                    .iter()
                    .enumerate()
                    .map(|(p, &a)| Gate::cz(a, cfg.data_qubit(layer.row * n_a + p)))
                    .collect(),
            )?;
        }
    }
    circuit.barrier();
    circuit.push_layer((0..cfg.n_d()).map(|j| Gate::h(cfg.data_qubit(j))).collect())?;
    circuit.measure_all();
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{compute_angles, GateKind, Scope};

    fn zero_angles(cfg: QCrankConfig) -> AngleTable {
        compute_angles(&vec![0.3; cfg.capacity()], cfg).unwrap()
    }

    #[test]
    fn single_address_schedule() {
        let cfg = QCrankConfig::new(1, 3).unwrap();
        let s = control_schedule(cfg);
        assert_eq!(s.steps(), &[vec![0], vec![0]]);
    }

    #[test]
    fn two_address_schedule() {
        let s = control_schedule(QCrankConfig::new(2, 4).unwrap());
        assert_eq!(s.sequence(0), vec![0, 1, 0, 1]);
        assert_eq!(s.sequence(1), vec![1, 0, 1, 0]);
        for t in 0..4 {
            let mut c = s.controls(t).to_vec();
            c.sort();
            assert_eq!(c, vec![0, 1]);
        }
    }

    #[test]
    fn four_address_schedule_uses_every_control_each_step() {
        let s = control_schedule(QCrankConfig::new(4, 8).unwrap());
        assert_eq!(s.steps().len(), 16);
        for t in 0..16 {
            let mut c = s.controls(t).to_vec();
            c.sort();
            assert_eq!(c, vec![0, 1, 2, 3]);
            assert!(s.cyclic_offset(t).is_some());
        }
        // Gray flips for 4 bits: 0,1,0,2,0,1,0,3,...
        assert_eq!(&s.sequence(0)[..8], &[0, 1, 0, 2, 0, 1, 0, 3]);
    }

    #[test]
    fn distinct_controls_up_to_five_addresses() {
        for n_a in 1..=5 {
            let s = control_schedule(QCrankConfig::new(n_a, n_a).unwrap());
            for t in 0..(1 << n_a) {
                let mut c = s.controls(t).to_vec();
                c.sort();
                c.dedup();
                assert_eq!(c.len(), n_a);
            }
        }
    }

    #[test]
    fn gate_counts_of_both_layouts() {
        for (a, d, depth) in [(1, 1, 2), (2, 4, 8), (3, 3, 8), (4, 8, 32)] {
            let cfg = QCrankConfig::new(a, d).unwrap();
            let angles = zero_angles(cfg);
            let orig = build_original(cfg, &angles).unwrap();
            let opt = build_dpqa(cfg, &angles).unwrap();
            assert_eq!(orig.n_qubits(), a + d);
            assert_eq!(orig.two_qubit_count(), cfg.capacity());
            assert_eq!(opt.two_qubit_count(), cfg.capacity());
            assert_eq!(orig.two_qubit_depth(), depth);
            assert_eq!(opt.two_qubit_depth(), depth);
            let ry = opt
                .gates()
                .filter(|g| matches!(g.kind, GateKind::Ry(_)))
                .count();
            assert_eq!(ry, cfg.capacity());
        }
    }

    #[test]
    fn dpqa_layers_are_native_and_parallel() {
        let cfg = QCrankConfig::new(4, 8).unwrap();
        let c = build_dpqa(cfg, &zero_angles(cfg)).unwrap();
        for layer in c.layers() {
            let cz = layer.iter().filter(|g| g.kind == GateKind::CZ).count();
            assert!(cz == 0 || cz == 4);
            assert!(layer
                .iter()
                .all(|g| !matches!(g.kind, GateKind::CX | GateKind::Pauli(_))));
        }
        assert_eq!(c.layers()[0].len(), 12);
        assert!(c.layers()[0].iter().all(|g| g.scope == Scope::Global));
        let global_layers = c
            .layers()
            .iter()
            .filter(|l| {
                l.iter()
                    .any(|g| g.kind.is_single_qubit() && g.scope == Scope::Global)
            })
            .count();
        assert_eq!(global_layers, 1);
    }

    #[test]
    fn mismatched_angles_rejected() {
        let a = QCrankConfig::new(2, 4).unwrap();
        let b = QCrankConfig::new(2, 2).unwrap();
        assert!(build_dpqa(b, &zero_angles(a)).is_err());
        assert!(build_original(b, &zero_angles(a)).is_err());
    }

    #[test]
    fn boustrophedon_rows() {
        let cfg = QCrankConfig::new(2, 6).unwrap();
        let layers = cz_layers(cfg, &control_schedule(cfg));
        let rows: Vec<_> = layers.iter().map(|l| l.row).collect();
        assert_eq!(rows, vec![0, 1, 2, 2, 1, 0, 0, 1, 2, 2, 1, 0]);
    }

    #[test]
    fn non_cyclic_controls_have_no_offset() {
        let s = ControlSchedule::from_steps(3, vec![vec![0, 2, 1]]).unwrap();
        assert_eq!(s.cyclic_offset(0), None);
        assert!(ControlSchedule::from_steps(3, vec![vec![0, 1]]).is_err());
        assert!(ControlSchedule::from_steps(2, vec![vec![0, 2]]).is_err());
    }
}
