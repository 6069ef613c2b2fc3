//! Bergman-Toeplitz operators T_psi with symbols psi = K(w,w)^{-alpha} d(w)^beta on the unit
//! disc and the unit balls of C^2 and C^3: kernels, boundary-graded quadrature, kernel
//! integral estimates, the weighted Schur test, and norm, essential-norm and Schatten
//! diagnostics.

pub mod domain;
pub mod error;
pub mod estimates;
pub mod quadrature;
pub mod report;
pub mod schur;
pub mod suite;
pub mod toeplitz;

pub use domain::{BSystem, Chart, DomainKind, DomainModel, Point};
pub use error::{Error, Result};
pub use estimates::{EstimateReport, Sweep, SweepPoint};
pub use num_complex::Complex64;
pub use quadrature::{GridSpec, QuadGrid};
pub use report::{ReportRecord, RunConfig, RunOutput, Status};
pub use schur::{SchurParams, SpaceParams};
pub use toeplitz::{DiscreteOperator, ExhaustionSpec, NormBracket, SingularSpectrum, SymbolSpec};
