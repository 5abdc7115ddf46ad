//! The four experiments exposed by the command-line tool.

mod convergence;
mod entropy;
mod region;
mod stability;

pub use convergence::{ConvergenceParams, ConvergenceResults, ConvergenceRow, OrderRow};
pub use entropy::{EntropyParams, EntropyResult};
pub use region::RegionParams;
pub use stability::{StabilityParams, StabilityRun};
