use serde::{Deserialize, Serialize};

use super::channel::{Channel, PauliChannel1Q};
use super::params::NoiseParams;
use crate::circuit::QCrankConfig;
use crate::compiler::{Instruction, Schedule};
use crate::error::{Error, Result};

/// Which operation a channel models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NoiseSource {
    Lue,
    Gue,
    Mve,
    Spe,
    Cz,
    Spam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelApp {
    pub source: NoiseSource,
    pub channel: Channel,
    /// One qubit, or an `(address, data)` pair for two-qubit channels.
    pub qubits: Vec<usize>,
}

/// An instruction with the channels it triggers. Channels act after the
/// instruction, except for `MeasureAll` where they act before readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyStep {
    pub instruction: Instruction,
    pub channels: Vec<ChannelApp>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyProgram {
    cfg: QCrankConfig,
    steps: Vec<NoisyStep>,
}

impl NoisyProgram {
    /// Wraps a bare schedule without any channels.
    pub fn noiseless(schedule: &Schedule) -> Self {
        let steps = schedule
            .instructions()
            .iter()
            .map(|i| NoisyStep {
                instruction: i.clone(),
                channels: Vec::new(),
            })
            .collect();
        Self {
            cfg: schedule.cfg(),
            steps,
        }
    }

    /// Program from explicit steps; every channel must fit the register.
    pub fn from_steps(cfg: QCrankConfig, steps: Vec<NoisyStep>) -> Result<Self> {
        let n = cfg.n_qubits();
        for c in steps.iter().flat_map(|s| s.channels.iter()) {
            c.channel.validate()?;
            if c.qubits.len() != c.channel.arity() || c.qubits.iter().any(|&q| q >= n) {
                return Err(Error::InvalidProgram(format!(
                    "{:?} channel on {:?} does not fit {n} qubits",
                    c.source, c.qubits
                )));
            }
        }
        Ok(Self { cfg, steps })
    }

    pub fn cfg(&self) -> QCrankConfig {
        self.cfg
    }

    pub fn n_qubits(&self) -> usize {
        self.cfg.n_qubits()
    }

    pub fn steps(&self) -> &[NoisyStep] {
        &self.steps
    }

    pub fn is_noiseless(&self) -> bool {
        self.channels().all(|c| c.channel.is_identity())
    }

    pub fn channels(&self) -> impl Iterator<Item = &ChannelApp> {
        self.steps.iter().flat_map(|s| s.channels.iter())
    }

    pub fn count(&self, source: NoiseSource) -> usize {
        self.channels().filter(|c| c.source == source).count()
    }

    /// Inserts a bare instruction before step `boundary` (`len()` appends).
    /// Used to inject deterministic faults.
    pub fn insert(&mut self, boundary: usize, instruction: Instruction) -> Result<()> {
        if boundary > self.steps.len() {
            return Err(Error::InvalidProgram(format!(
                "boundary {boundary} beyond {} steps",
                self.steps.len()
            )));
        }
        self.steps.insert(
            boundary,
            NoisyStep {
                instruction,
                channels: Vec::new(),
            },
        );
        Ok(())
    }
}

fn one(source: NoiseSource, c: PauliChannel1Q, qubit: usize) -> ChannelApp {
    ChannelApp {
        source,
        channel: Channel::One(c),
        qubits: vec![qubit],
    }
}

/// Attaches the DPQA channels to every instruction. Channels with zero
/// strength are omitted, so zero noise yields the bare schedule.
pub fn attach_noise(schedule: &Schedule, params: &NoiseParams) -> NoisyProgram {
    let n = schedule.n_qubits();
    let (lue, gue, mve, spe, spam) = (
        params.lue(),
        params.gue(),
        params.mve(),
        params.spe(),
        params.spam(),
    );
    let cz = Channel::Two(params.cz());

    let steps = schedule
        .instructions()
        .iter()
        .map(|ins| {
            let channels: Vec<ChannelApp> = match ins {
                Instruction::LocalU { qubit, .. } => vec![one(NoiseSource::Lue, lue, *qubit)],
                Instruction::GlobalU { .. } => {
                    (0..n).map(|q| one(NoiseSource::Gue, gue, q)).collect()
                }
                Instruction::Move(step) => step
                    .atoms()
                    .map(|a| one(NoiseSource::Mve, mve, a))
                    .collect(),
                Instruction::GlobalCZ(pulse) => pulse
                    .pairs
                    .iter()
                    .map(|&(a, d)| ChannelApp {
                        source: NoiseSource::Cz,
                        channel: cz,
                        qubits: vec![a, d],
                    })
                    .chain(
                        pulse
                            .spectators
                            .iter()
                            .map(|&q| one(NoiseSource::Spe, spe, q)),
                    )
                    .collect(),
                Instruction::MeasureAll => {
                    (0..n).map(|q| one(NoiseSource::Spam, spam, q)).collect()
                }
            };
            let channels = channels
                .into_iter()
                .filter(|c| !c.channel.is_identity())
                .collect();
            NoisyStep {
                instruction: ins.clone(),
                channels,
            }
        })
        .collect();
    NoisyProgram {
        cfg: schedule.cfg(),
        steps,
    }
}
