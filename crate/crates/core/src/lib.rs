//! High-precision eigenvalue toolkit for one-dimensional Schrödinger
//! operators with polynomial potentials on the half line.
//!
//! Two independent solvers share one problem model:
//!
//! * [`rayleigh_ritz`] — a parity-separated variational solver in the
//!   half-line basis x^j exp(-x³/3), giving upper bounds that decrease
//!   with the basis size;
//! * [`hankel`] — the Riccati-Padé method: roots of Hankel determinants
//!   built from the Taylor coefficients of the modified logarithmic
//!   derivative of the wavefunction, converging to eigenvalues as the
//!   determinant dimension grows.
//!
//! [`susy`] cross-checks the two partner spectra E_n⁻ = E_{n-1}⁺ and the
//! interleaving structure the partner pair induces on a single run.

pub mod error;
pub mod fmt;
pub mod hankel;
pub mod linalg;
pub mod model;
pub mod moments;
pub mod poly;
pub mod precision;
pub mod rayleigh_ritz;
pub mod riccati;
pub mod susy;

pub use error::{Error, Result};
pub use hankel::{RootSearch, RootSequence, SignedLogValue};
pub use linalg::SymmetricMatrix;
pub use model::{
    HamiltonianKind, ParitySector, PolynomialPotential, PotentialLabel, SpectrumLabel,
};
pub use moments::MomentTable;
pub use poly::RationalPolynomial;
pub use precision::PrecisionContext;
pub use rayleigh_ritz::{BasisSpec, SpectrumTable};
pub use riccati::{CoefficientSeries, ExactCoefficientSeries};
pub use susy::{DegeneracyReport, LabeledSpectrum, SpectrumEntry, SpectrumSource};
