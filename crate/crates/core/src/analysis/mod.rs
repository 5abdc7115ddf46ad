//! Equivalent systems, stability predicates, plane-wave modes and error metrics.

mod equivalent;
mod errors;
mod modes;
mod stability;

pub use equivalent::{stiff_coefficient, EquivalentSystem};
pub use errors::{convergence_order, l2_relative_error};
pub use modes::{
    mode_eqeq, mode_eqsys, slow_mode, ModeKind, ModeSolution, COINCIDENCE_TOLERANCE,
    MODE_CSV_HEADER,
};
pub use stability::{
    diffusion_matrix, diffusive_stable, hyperbolic, hyperbolic_with_margin, raster_axis,
    stability_region, symmetrizer, symmetrizer_minors, DiffusionMatrix, StabilityRaster,
    MIN_RESOLUTION,
};
