//! Parameterized Pauli noise for DPQA operations.

mod attach;
mod channel;
mod params;

pub use attach::{attach_noise, ChannelApp, NoiseSource, NoisyProgram, NoisyStep};
pub use channel::{Channel, PauliChannel1Q, PauliChannel2Q, PauliTerm};
pub use params::{baseline_params, scale_params, NoiseParams, CONFIG_KEYS};
