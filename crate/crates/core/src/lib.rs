//! Pseudo-spectral solver for the 3D primitive equations on `(0,1)^2 x (-h,0)`.

pub mod analysis;
pub mod domain;
pub mod error;
pub mod field;
pub mod hydrostatic;
pub mod nonlinear;
pub mod random;
pub mod stepper;
pub mod verify;

pub use domain::{BcVariant, Domain, DomainSpec};
pub use error::{Error, Result};
pub use field::{SurfaceField, VelocityField};
