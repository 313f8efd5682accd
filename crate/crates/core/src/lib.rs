//! Discrete potential theory on rectangular lattices.
//!
//! Dirichlet solvers on finite lattice domains, Dirichlet-Laplacian spectra,
//! the Fourier transfer solution of the Dirichlet problem in a strip, the
//! spectral harmonic measure of truncated cylinders and checkers for the
//! quantitative inequalities built on them (maximum principle, layer `l²`
//! bound, three-line log-convexity, Phragmén–Lindelöf lower bounds and
//! conditional stability).

pub mod cylinder;
pub mod dirichlet;
pub mod error;
pub mod lattice;
pub mod montecarlo;
pub mod operators;
pub mod spectral;
pub mod strip;

pub use error::{Error, Result};
pub use lattice::{DomainShape, DomainSpec, GridDomain, LatticePoint, Mesh};
pub use operators::GridFunction;
pub use spectral::{RatePair, Spectrum};
