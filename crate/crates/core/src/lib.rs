//! Entropy-stable hybrid DGSEM / finite-volume subcell discretisation of the
//! compressible Euler equations on moving curved hexahedral meshes.
//!
//! The evolved unknowns are `J·u` and the Jacobian `J` itself; both are
//! advanced by the same convex blend of a flux-differencing DG operator and a
//! subcell finite-volume operator, which makes constant states exact on any
//! mesh motion.

pub mod blending;
pub mod config;
pub mod dg;
pub mod diagnostics;
pub mod flow;
pub mod fv;
pub mod mesh;
pub mod operator;
pub mod physics;
pub mod run;
pub mod residual;
pub mod sbp;
pub mod time;
pub mod verify;

pub use mesh::{build_mesh, Mesh, MeshError, MeshGeometry, MeshTopology, MotionSpec};
pub use physics::{EulerState, GasModel, StateError};
pub use sbp::{build_sbp, SbpOperator};
