//! Plane-strain finite-element simulation of splitting cracks in a block
//! loaded through a narrow rubber bearing strip.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: structured quad mesh, strip overlay, stiffness patches, supports
//! - [`material`]: step-function softening law, random initial moduli, secant law
//! - [`fem`]: plane-strain kernel, assembly, skyline Cholesky solve, recovery
//! - [`engines`]: sequential linear analysis and the incremental secant model
//! - [`analytic`]: closed-form splitting and bearing formulas
//! - [`io`]: scenario files, CSV/VTK/JSON output, the run driver

pub mod analytic;
pub mod engines;
pub mod error;
pub mod fem;
pub mod io;
pub mod material;
pub mod mesh;

pub use engines::{run_sla, run_ss, RunOutput, SlaConfig, Specimen, SsConfig, Trace};
pub use error::{Error, Result};
pub use fem::FieldState;
pub use material::{MaterialParams, RandomField, StepFunction};
pub use mesh::{BoundarySets, Mesh, Region};
