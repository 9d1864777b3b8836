//! Compilation of the DPQA-form circuit onto a single-zone atom array.

mod geometry;
mod routing;
mod schedule;

pub use geometry::{plan_layout, Geometry, Site};
pub use routing::{lower, schedule_moves};
pub use schedule::{
    check_aod, move_touch_counts, AodViolation, AtomMove, Axis, CzPulse, Instruction, MoveStep,
    Schedule,
};
