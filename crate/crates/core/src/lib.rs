//! Space-time finite element solvers for dual variational formulations of
//! time-dependent PDEs and ODEs.

pub mod dual_euler;
pub mod dual_heat;
pub mod dual_transport;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod metrics;
pub mod oracles;
pub mod profile;
pub mod projection;

pub use error::{Error, Result};
pub use fem::{GaussSamples, NodalField};
pub use mesh::{BoundaryTags, Side, SpaceTimeMesh, TimeMesh};
pub use profile::Profile;
