//! Vectorial lattice-Boltzmann method (VLBM) for hyperbolic conservation laws.
//!
//! The crate is organised in four layers:
//!
//! * [`lattice`]: the D1Q2, D2Q3 and D2Q4 velocity sets, their moment
//!   matrices, equilibria and the `F <-> Y` change of variables.
//! * [`models`]: the conservation laws (linear transport, shallow water,
//!   isothermal Euler) with fluxes, Lax entropies, entropy variables and
//!   dual kinetic entropies.
//! * [`solver`]: periodic grids, kinetic fields, transport/relaxation
//!   operators, the plain and time-symmetric split steppers and entropy
//!   monitoring.
//! * [`analysis`]: equivalent systems, diffusion matrices, stability and
//!   hyperbolicity predicates, plane-wave mode solutions and error metrics.

pub mod analysis;
pub mod error;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod models;
pub mod solver;

pub use error::{Result, VlbmError};
pub use lattice::{ModelKind, MomentStructure, VelocitySet};
pub use models::ConservationLaw;
