//! Synthesis of multi-frequency acoustic data radiated by wave-number-dependent
//! sources and reconstruction of the source support by the multi-frequency
//! factorization method.
//!
//! The pipeline in brief:
//!
//! 1. [`source`] models a time-dependent source density on a parametric
//!    support ([`geometry`]) and its frequency-domain transform.
//! 2. [`synthesis`] evaluates far-field patterns / near-field data over a
//!    frequency band ([`spectral::FrequencyGrid`]) and packages them as
//!    [`synthesis::FieldDataset`]s.
//! 3. [`spectral`] assembles the discrete far/near-field operator (a Toeplitz
//!    matrix) from one dataset and computes its sharpened eigensystem.
//! 4. [`probes`] evaluates the test functions against which range
//!    membership is decided, and [`imaging`] turns Picard-series sums into
//!    indicator grids, threshold masks and moment-scan curves.
//! 5. [`io`] fixes the plain-text formats used for regression fixtures and
//!    by the command-line front end.

pub mod error;
pub mod fourier;
pub mod geometry;
pub mod imaging;
pub mod io;
pub mod probes;
pub mod source;
pub mod spectral;
pub mod synthesis;
pub mod vec3;

pub use error::CoreError;
pub use geometry::{Extent, Separation, Shape};
pub use imaging::{IndicatorGrid, ScanCurve, SearchBox};
pub use io::Manifest;
pub use probes::{ProbeParams, Regime};
pub use source::{Amplitude, SourceModel, Spatial};
pub use spectral::{FrequencyGrid, OperatorSpectrum, SharpMode};
pub use synthesis::{FieldDataset, Observation, QuadratureSpec};
pub use vec3::{UnitVec, Vec3};

/// Relative eigenvalue floor applied inside Picard denominators.
pub const EPS_REG_REL: f64 = 1e-12;
