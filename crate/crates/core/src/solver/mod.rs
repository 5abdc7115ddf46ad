//! Time integration of kinetic fields on periodic grids.

mod entropy;
mod field;
mod grid;
mod split;
mod transport;

pub use entropy::total_entropy_transport;
pub use field::KineticField;
pub use grid::{Grid, MIN_CELLS};
pub use split::{
    relax_step, run, split_step, Divergence, EntropyMonitor, RunSummary, SplitConfig, SplitScheme,
    SplitStepper, StepRecord, SubStep, DIVERGENCE_THRESHOLD,
};
pub use transport::{cell_shift, transport_step, TransportBackend, Transporter, SHIFT_TOLERANCE};
