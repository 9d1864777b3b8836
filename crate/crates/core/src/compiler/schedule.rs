use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

use super::geometry::{Geometry, Site};
use crate::circuit::{GateKind, QCrankConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomMove {
    pub atom: usize,
    pub from: Site,
    pub to: Site,
}

/// Atoms picked up and moved together by the AOD in one step.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MoveStep {
    pub moves: Vec<AtomMove>,
}

impl MoveStep {
    pub fn new(moves: Vec<AtomMove>) -> Self {
        Self { moves }
    }

    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.moves.iter().map(|m| m.atom)
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn is_horizontal(&self) -> bool {
        self.moves.iter().all(|m| m.from.y == m.to.y)
    }

    pub fn is_vertical(&self) -> bool {
        self.moves.iter().all(|m| m.from.x == m.to.x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Reason a move step cannot be executed by the AOD.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AodViolation {
    UnknownAtom {
        atom: usize,
    },
    DuplicateAtom {
        atom: usize,
    },
    StaleSource {
        atom: usize,
        claimed: Site,
        actual: Site,
    },
    OrderInversion {
        first: usize,
        second: usize,
        axis: Axis,
    },
    Collision {
        atom: usize,
        site: Site,
        occupant: usize,
    },
}

impl fmt::Display for AodViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AodViolation::UnknownAtom { atom } => write!(f, "atom {atom} does not exist"),
            AodViolation::DuplicateAtom { atom } => write!(f, "atom {atom} listed twice"),
            AodViolation::StaleSource {
                atom,
                claimed,
                actual,
            } => {
                write!(
                    f,
                    "atom {atom} claimed at ({claimed}) but sits at ({actual})"
                )
            }
            AodViolation::OrderInversion {
                first,
                second,
                axis,
            } => {
                write!(
                    f,
                    "atoms {first} and {second} change relative order along {axis:?}"
                )
            }
            AodViolation::Collision {
                atom,
                site,
                occupant,
            } => {
                write!(
                    f,
                    "atom {atom} lands on ({site}) held by stationary atom {occupant}"
                )
            }
        }
    }
}

impl std::error::Error for AodViolation {}

/// Checks one simultaneous move against the current occupancy: every moved
/// pair keeps its relative order on both axes (so no paths cross and no two
/// atoms share a destination) and no atom lands on a stationary one.
pub fn check_aod(step: &MoveStep, occupancy: &Geometry) -> Result<(), AodViolation> {
    let mut seen = HashSet::new();
    for m in &step.moves {
        if m.atom >= occupancy.n_atoms() {
            return Err(AodViolation::UnknownAtom { atom: m.atom });
        }
        if !seen.insert(m.atom) {
            return Err(AodViolation::DuplicateAtom { atom: m.atom });
        }
        let actual = occupancy.position(m.atom);
        if actual != m.from {
            return Err(AodViolation::StaleSource {
                atom: m.atom,
                claimed: m.from,
                actual,
            });
        }
    }
    for (i, a) in step.moves.iter().enumerate() {
        for b in &step.moves[i + 1..] {
            let order_x = (a.from.x - b.from.x).signum() == (a.to.x - b.to.x).signum();
            let order_y = (a.from.y - b.from.y).signum() == (a.to.y - b.to.y).signum();
            if !order_x {
                return Err(AodViolation::OrderInversion {
                    first: a.atom,
                    second: b.atom,
                    axis: Axis::X,
                });
            }
            if !order_y {
                return Err(AodViolation::OrderInversion {
                    first: a.atom,
                    second: b.atom,
                    axis: Axis::Y,
                });
            }
        }
    }
    for m in &step.moves {
        if let Some(occupant) = occupancy.occupant(m.to) {
            if !seen.contains(&occupant) {
                return Err(AodViolation::Collision {
                    atom: m.atom,
                    site: m.to,
                    occupant,
                });
            }
        }
    }
    Ok(())
}

impl Geometry {
    /// Applies a step after validating it.
    pub fn try_apply(&mut self, step: &MoveStep) -> Result<(), AodViolation> {
        check_aod(step, self)?;
        for m in &step.moves {
            self.set_position(m.atom, m.to);
        }
        Ok(())
    }
}

/// One global Rydberg pulse: every co-located (address, data) pair gets a
/// CZ, every other atom in the zone is a spectator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CzPulse {
    /// Gray step the pulse belongs to.
    pub step: usize,
    /// `(address, data)` qubit pairs.
    pub pairs: Vec<(usize, usize)>,
    pub spectators: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Instruction {
    Move(MoveStep),
    GlobalCZ(CzPulse),
    /// Same single-qubit gate on every atom.
    GlobalU {
        kind: GateKind,
    },
    LocalU {
        qubit: usize,
        kind: GateKind,
    },
    MeasureAll,
}

/// Compiled instruction stream together with its starting layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    initial: Geometry,
    instructions: Vec<Instruction>,
    touches: Vec<usize>,
}

impl Schedule {
    pub fn new(initial: Geometry) -> Self {
        let touches = vec![0; initial.n_atoms()];
        Self {
            initial,
            instructions: Vec::new(),
            touches,
        }
    }

    pub fn cfg(&self) -> QCrankConfig {
        self.initial.cfg()
    }

    pub fn n_qubits(&self) -> usize {
        self.initial.n_atoms()
    }

    pub fn initial(&self) -> &Geometry {
        &self.initial
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    /// Per-atom count of move-step memberships, maintained while pushing.
    pub fn touches(&self) -> &[usize] {
        &self.touches
    }

    pub fn push(&mut self, instruction: Instruction) {
        if let Instruction::Move(step) = &instruction {
            for atom in step.atoms() {
                self.touches[atom] += 1;
            }
        }
        self.instructions.push(instruction);
    }

    pub fn move_steps(&self) -> impl Iterator<Item = &MoveStep> {
        self.instructions.iter().filter_map(|i| match i {
            Instruction::Move(s) => Some(s),
            _ => None,
        })
    }

    pub fn pulses(&self) -> impl Iterator<Item = &CzPulse> {
        self.instructions.iter().filter_map(|i| match i {
            Instruction::GlobalCZ(p) => Some(p),
            _ => None,
        })
    }

    /// Positions of all atoms after every instruction up to `upto` (exclusive).
    pub fn geometry_at(&self, upto: usize) -> Result<Geometry, AodViolation> {
        let mut g = self.initial.clone();
        for i in &self.instructions[..upto.min(self.instructions.len())] {
            if let Instruction::Move(step) = i {
                g.try_apply(step)?;
            }
        }
        Ok(g)
    }
}

/// Recounts how often each atom appears in a move step.
pub fn move_touch_counts(schedule: &Schedule) -> Vec<usize> {
    let mut counts = vec![0; schedule.n_qubits()];
    for step in schedule.move_steps() {
        for atom in step.atoms() {
            counts[atom] += 1;
        }
    }
    counts
}
