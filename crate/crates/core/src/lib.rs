//! Numerical models of order unit spaces with compression bases.
//!
//! Two concrete models are provided: real symmetric matrices (a JB-algebra)
//! and generalized spin factors `R × X*` over a finite-dimensional normed
//! space `X`. On top of them sit the compression machinery, spectral
//! resolutions, functional calculus, and a seeded verification harness that
//! emits reproducible text reports.

pub mod calculus;
pub mod compression;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod ous;
pub mod report;
pub mod rng;
pub mod spin;

pub use calculus::{RealFunction, SpectralResolution};
pub use compression::{OrthogonalDecomposition, Projection};
pub use error::{Error, Result};
pub use ous::{parse_element, Element, ModelContext, ModelKind, ModelTag, Spectrum};
pub use report::{Verdict, VerificationReport};
pub use rng::SeededRng;
pub use spin::{NormOracle, NormPlugin, SpinProjection};
