//! Spectral analysis of Hill's equation `-y'' + q(x) y = μ y` with a complex
//! period-1 potential `q`.
//!
//! The crate is organized bottom-up:
//!
//! - [`potential`]: potentials, even/odd decompositions and the residuals of
//!   the potential conditions, plus construction of potentials that satisfy
//!   the half-interval condition.
//! - [`ode`]: the fundamental system `c, s`, its `μ`-derivatives, transfer
//!   and monodromy matrices and the discriminant `Δ = c(1) + s'(1)`.
//! - [`spectra`]: eigenvalues of the periodic, anti-periodic and separated
//!   boundary problems, located in the complex `μ`-plane by the argument
//!   principle and Newton refinement.
//! - [`kernel`]: the transformation kernel `K(x, t)` and the integral
//!   representation of `c` and `s`.
//! - [`harness`]: end-to-end checks that turn all of the above into a
//!   verification report.
//!
//! The guide in `book/` walks through each of these with runnable snippets.

pub mod error;
pub mod harness;
pub mod kernel;
pub mod ode;
pub mod output;
pub mod potential;
pub mod quadrature;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use ode::IntegratorConfig;
pub use potential::PotentialSpec;
pub use spectra::{ProblemTag, SearchRegion};


#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/potentials.md")]
    mod potentials {}
    #[doc = include_str!("../../../book/src/fundamental-system.md")]
    mod fundamental_system {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/kernel.md")]
    mod kernel {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
