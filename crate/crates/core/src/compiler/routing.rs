//! Address-row routing and lowering of the DPQA circuit.
//!
//! Only address atoms move. Between Gray steps the address row is cyclically
//! shifted in at most two horizontal steps: the whole row moves toward the
//! shorter wrap direction (atoms leaving the array park in staging columns),
//! then only the parked atoms jump across to their wrapped columns. Within a
//! step the row descends or climbs one data row at a time, alternating
//! direction between steps.

use super::geometry::{plan_layout, Geometry, Site};
use super::schedule::{AtomMove, CzPulse, Instruction, MoveStep, Schedule};
use crate::circuit::builder::{cyclic_offset_of, row_order};
use crate::circuit::{Circuit, ControlSchedule, GateKind, QCrankConfig, Scope};
use crate::error::{Error, Result};

/// Tracks address-row state while emitting moves.
struct Router {
    geometry: Geometry,
    offset: usize,
    row: usize,
}

impl Router {
    fn new(cfg: QCrankConfig) -> Self {
        Self {
            geometry: plan_layout(cfg),
            offset: 0,
            row: 0,
        }
    }

    fn n_a(&self) -> usize {
        self.geometry.columns()
    }

    fn commit(&mut self, moves: Vec<AtomMove>, out: &mut Vec<MoveStep>) -> Result<()> {
        if moves.is_empty() {
            return Ok(());
        }
        let step = MoveStep::new(moves);
        self.geometry.try_apply(&step).map_err(|v| {
            Error::InfeasiblePairing(format!("router produced an illegal move: {v}"))
        })?;
        out.push(step);
        Ok(())
    }

    /// Moves that bring the address row to cyclic `offset` facing data `row`.
    /// With offset `c`, address `b` sits in column `(b - c) mod n_a`.
    fn route_to(&mut self, offset: usize, row: usize) -> Result<Vec<MoveStep>> {
        let n_a = self.n_a();
        let mut steps = Vec::new();

        let delta = (offset + n_a - self.offset) % n_a;
        if delta != 0 {
            let (shift, wrap) = if delta <= n_a - delta {
                (-(delta as i32), n_a as i32)
            } else {
                ((n_a - delta) as i32, -(n_a as i32))
            };
            let first: Vec<AtomMove> = (0..n_a)
                .map(|b| {
                    let from = self.geometry.position(b);
                    AtomMove {
                        atom: b,
                        from,
                        to: Site::new(from.x + shift, from.y),
                    }
                })
                .collect();
            self.commit(first, &mut steps)?;
            let second: Vec<AtomMove> = (0..n_a)
                .filter_map(|b| {
                    let from = self.geometry.position(b);
                    (!self.geometry.in_array(from)).then(|| AtomMove {
                        atom: b,
                        from,
                        to: Site::new(from.x + wrap, from.y),
                    })
                })
                .collect();
            self.commit(second, &mut steps)?;
            self.offset = offset;
        }

        while self.row != row {
            let next = if row > self.row {
                self.row + 1
            } else {
                self.row - 1
            };
            let dy = Geometry::address_y(next) - Geometry::address_y(self.row);
            let moves = (0..n_a)
                .map(|b| {
                    let from = self.geometry.position(b);
                    AtomMove {
                        atom: b,
                        from,
                        to: Site::new(from.x, from.y + dy),
                    }
                })
                .collect();
            self.commit(moves, &mut steps)?;
            self.row = next;
        }
        Ok(steps)
    }

    /// CZ pairs and spectators implied by the current positions.
    fn pulse(&self, step: usize) -> CzPulse {
        let g = &self.geometry;
        let mut pairs: Vec<(usize, usize)> = (0..g.n_atoms())
            .filter(|&a| g.is_address(a))
            .filter_map(|a| {
                g.occupant(Geometry::partner_site(g.position(a)))
                    .map(|d| (a, d))
            })
            .filter(|&(_, d)| !g.is_address(d))
            .collect();
        pairs.sort_by_key(|&(a, _)| g.position(a).x);
        let spectators = (0..g.n_atoms())
            .filter(|q| !pairs.iter().any(|&(a, d)| a == *q || d == *q))
            .collect();
        CzPulse {
            step,
            pairs,
            spectators,
        }
    }
}

fn expected_pairs(cfg: QCrankConfig, row: usize, controls: &[usize]) -> Vec<(usize, usize)> {
    let n_a = cfg.n_a();
    let mut pairs: Vec<_> = controls
        .iter()
        .enumerate()
        .map(|(p, &a)| (a, cfg.data_qubit(row * n_a + p)))
        .collect();
    pairs.sort_unstable();
    pairs
}

fn check_pulse(pulse: &CzPulse, mut expected: Vec<(usize, usize)>) -> Result<()> {
    let mut got = pulse.pairs.clone();
    got.sort_unstable();
    expected.sort_unstable();
    if got != expected {
        return Err(Error::InfeasiblePairing(format!(
            "pulse pairs {got:?} differ from required {expected:?}"
        )));
    }
    Ok(())
}

/// Emits moves and CZ pulses for a control schedule, visiting data rows in
/// boustrophedon order. The schedule contains no single-qubit pulses.
pub fn schedule_moves(cfg: QCrankConfig, pairing: &ControlSchedule) -> Result<Schedule> {
    if pairing.n_a() != cfg.n_a() {
        return Err(Error::Dimension(format!(
            "pairing built for {} addresses used with {cfg}",
            pairing.n_a()
        )));
    }
    let mut router = Router::new(cfg);
    let mut schedule = Schedule::new(router.geometry.clone());
    for (t, controls) in pairing.steps().iter().enumerate() {
        let offset = cyclic_offset_of(controls, cfg.n_a()).ok_or_else(|| {
            Error::InfeasiblePairing(format!(
                "step {t} controls {controls:?} are not a cyclic shift of the address row"
            ))
        })?;
        for row in row_order(t, cfg.data_rows()) {
            for step in router.route_to(offset, row)? {
                schedule.push(Instruction::Move(step));
            }
            let pulse = router.pulse(t);
            check_pulse(&pulse, expected_pairs(cfg, row, controls))?;
            schedule.push(Instruction::GlobalCZ(pulse));
        }
    }
    Ok(schedule)
}

/// Reads one CZ layer as (data row, per-position controls).
fn read_cz_layer(cfg: QCrankConfig, layer: &[crate::circuit::Gate]) -> Result<(usize, Vec<usize>)> {
    let n_a = cfg.n_a();
    if layer.len() != n_a {
        return Err(Error::NotDpqaForm(format!(
            "CZ layer has {} gates, expected {n_a}",
            layer.len()
        )));
    }
    let mut row = None;
    let mut controls = vec![usize::MAX; n_a];
    for g in layer {
        if g.kind != GateKind::CZ {
            return Err(Error::NotDpqaForm(format!(
                "{} mixed into a CZ layer",
                g.kind.name()
            )));
        }
        let (a, d) = match (cfg.is_address(g.qubits[0]), cfg.is_address(g.qubits[1])) {
            (true, false) => (g.qubits[0], g.qubits[1]),
            (false, true) => (g.qubits[1], g.qubits[0]),
            _ => {
                return Err(Error::NotDpqaForm(format!(
                    "CZ on {:?} is not address-data",
                    g.qubits
                )))
            }
        };
        let j = d - cfg.n_a();
        let r = j / n_a;
        if *row.get_or_insert(r) != r {
            return Err(Error::NotDpqaForm(
                "CZ layer spans several data rows".into(),
            ));
        }
        controls[j % n_a] = a;
    }
    Ok((row.unwrap_or(0), controls))
}

/// Lowers a DPQA-form circuit into a full instruction stream.
pub fn lower(circuit: &Circuit, cfg: QCrankConfig) -> Result<Schedule> {
    if circuit.n_qubits() != cfg.n_qubits() {
        return Err(Error::Dimension(format!(
            "circuit has {} qubits, configuration {cfg} needs {}",
            circuit.n_qubits(),
            cfg.n_qubits()
        )));
    }
    let mut router = Router::new(cfg);
    let mut schedule = Schedule::new(router.geometry.clone());
    let mut cz_layers = 0usize;
    let mut measured = false;

    for layer in circuit.layers() {
        if measured {
            return Err(Error::NotDpqaForm(
                "gates after the final measurement".into(),
            ));
        }
        let first = &layer[0].kind;
        match first {
            GateKind::Barrier => {}
            GateKind::MeasureAll => {
                schedule.push(Instruction::MeasureAll);
                measured = true;
            }
            GateKind::CZ => {
                let (row, controls) = read_cz_layer(cfg, layer)?;
                let offset = cyclic_offset_of(&controls, cfg.n_a()).ok_or_else(|| {
                    Error::NotDpqaForm(format!("controls {controls:?} are not a cyclic shift"))
                })?;
                for step in router.route_to(offset, row)? {
                    schedule.push(Instruction::Move(step));
                }
                let pulse = router.pulse(cz_layers / cfg.data_rows());
                check_pulse(&pulse, expected_pairs(cfg, row, &controls))?;
                schedule.push(Instruction::GlobalCZ(pulse));
                cz_layers += 1;
            }
            GateKind::CX => return Err(Error::NotDpqaForm("CX is not a native gate".into())),
            _ => {
                if layer.iter().any(|g| !g.kind.is_single_qubit()) {
                    return Err(Error::NotDpqaForm(
                        "mixed single- and two-qubit layer".into(),
                    ));
                }
                if layer[0].scope == Scope::Global {
                    schedule.push(Instruction::GlobalU { kind: *first });
                } else {
                    for g in layer {
                        schedule.push(Instruction::LocalU {
                            qubit: g.qubits[0],
                            kind: g.kind,
                        });
                    }
                }
            }
        }
    }
    if !measured {
        schedule.push(Instruction::MeasureAll);
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_dpqa, build_original, compute_angles, control_schedule};
    use crate::compiler::move_touch_counts;

    fn cfg(a: usize, d: usize) -> QCrankConfig {
        QCrankConfig::new(a, d).unwrap()
    }

    #[test]
    fn fig3_segment_for_four_plus_eight() {
        // Gray step 3 of the 4+8 encoder has controls offset 2 and visits row 1 first.
        let c = cfg(4, 8);
        let s = schedule_moves(c, &control_schedule(c)).unwrap();
        let ins = s.instructions();
        let pulse_idx: Vec<usize> = ins
            .iter()
            .enumerate()
            .filter(|(_, i)| matches!(i, Instruction::GlobalCZ(p) if p.step == 3))
            .map(|(k, _)| k)
            .collect();
        assert_eq!(pulse_idx.len(), 2);
        let (first, second) = (pulse_idx[0], pulse_idx[1]);
        // two horizontal steps right before the first pulse of the step
        let before: Vec<_> = ins[first - 2..first].iter().collect();
        for i in &before {
            assert!(matches!(i, Instruction::Move(m) if m.is_horizontal()));
        }
        let Instruction::GlobalCZ(p) = &ins[first] else {
            unreachable!()
        };
        // d7-a1 ... d4-a2 (data qubit j is qubit 4 + j)
        assert!(p.pairs.contains(&(1, 4 + 7)));
        assert!(p.pairs.contains(&(2, 4 + 4)));
        assert_eq!(second, first + 2);
        assert!(matches!(&ins[first + 1], Instruction::Move(m) if m.is_vertical() && m.len() == 4));
        let Instruction::GlobalCZ(p) = &ins[second] else {
            unreachable!()
        };
        assert!(p.pairs.contains(&(1, 4 + 3)));
        assert!(p.pairs.contains(&(2, 4)));
    }

    #[test]
    fn single_row_needs_no_vertical_moves() {
        let c = cfg(3, 3);
        let s = schedule_moves(c, &control_schedule(c)).unwrap();
        assert!(s.move_steps().all(|m| m.is_horizontal()));
        let touches = move_touch_counts(&s);
        assert!(touches[3..].iter().all(|&t| t == 0));
    }

    #[test]
    fn shift_economy() {
        for (a, d) in [(2, 4), (3, 3), (4, 8), (5, 5)] {
            let c = cfg(a, d);
            let s = schedule_moves(c, &control_schedule(c)).unwrap();
            let ins = s.instructions();
            let mut run: Vec<&MoveStep> = Vec::new();
            for i in ins {
                match i {
                    Instruction::Move(m) if m.is_horizontal() => run.push(m),
                    _ => {
                        assert!(run.len() <= 2);
                        if let Some(first) = run.first() {
                            let on_target = first
                                .moves
                                .iter()
                                .filter(|m| m.to.x >= 0 && (m.to.x as usize) < a)
                                .count();
                            assert!(on_target >= a.div_ceil(2));
                            assert_eq!(first.len(), a);
                        }
                        run.clear();
                    }
                }
            }
        }
    }

    #[test]
    fn non_cyclic_pairing_is_infeasible() {
        let c = cfg(3, 3);
        let bad = ControlSchedule::from_steps(3, vec![vec![0, 2, 1]]).unwrap();
        assert!(matches!(
            schedule_moves(c, &bad),
            Err(Error::InfeasiblePairing(_))
        ));
    }

    #[test]
    fn lower_counts() {
        let c = cfg(2, 4);
        let angles = compute_angles(&[0.1; 16], c).unwrap();
        let s = lower(&build_dpqa(c, &angles).unwrap(), c).unwrap();
        assert_eq!(s.pulses().count(), 8);
        assert!(matches!(
            s.instructions().last(),
            Some(Instruction::MeasureAll)
        ));
        assert!(matches!(
            s.instructions()[0],
            Instruction::GlobalU { kind: GateKind::H }
        ));
    }

    #[test]
    fn lower_rejects_original_layout() {
        let c = cfg(2, 4);
        let angles = compute_angles(&[0.1; 16], c).unwrap();
        assert!(matches!(
            lower(&build_original(c, &angles).unwrap(), c),
            Err(Error::NotDpqaForm(_))
        ));
    }

    #[test]
    fn lower_and_schedule_moves_agree_on_moves() {
        let c = cfg(4, 8);
        let angles = compute_angles(&vec![0.0; 128], c).unwrap();
        let full = lower(&build_dpqa(c, &angles).unwrap(), c).unwrap();
        let moves = schedule_moves(c, &control_schedule(c)).unwrap();
        let strip = |s: &Schedule| {
            s.instructions()
                .iter()
                .filter(|i| matches!(i, Instruction::Move(_) | Instruction::GlobalCZ(_)))
                .cloned()
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&full), strip(&moves));
        assert_eq!(full.touches(), moves.touches());
    }
}
