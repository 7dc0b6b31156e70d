//! Solver for multilinear systems A x^{m-1} = b where A is a
//! nonsingular M-tensor and b is positive. The unique positive solution
//! is found by following the solution curve of the homotopy
//! (t*A + (1-t)*I) x^{m-1} = b from its trivial root at t = 0 with an
//! adaptive Euler-Newton predictor-corrector.
//!
//! Modules:
//! - [`tensor`]: dense tensor storage and contraction kernels
//! - [`linalg`]: dense LU with partial pivoting
//! - [`mtensor`]: M-tensor decompositions, certificates, instance generator
//! - [`homotopy`]: the path tracker
//! - [`io`]: tensor/vector text file formats
//! - [`bench`]: benchmark sweeps and report serialization

pub mod bench;
pub mod error;
pub mod homotopy;
pub mod io;
pub mod linalg;
pub mod mtensor;
pub mod tensor;

pub use error::{Error, Result};
pub use homotopy::{track, HomotopyProblem, TrackResult, TrackStatus, TrackerConfig};
pub use mtensor::{generate_instance, GeneratorConfig, MTensorDecomposition};
pub use tensor::{DenseTensor, JacobianMode};
