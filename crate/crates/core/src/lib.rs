//! Essential spectra of Bergman-Toeplitz operators with periodic symbols.
//!
//! The periodic domain is a chain of discs of radius `R0` joined by a strip of
//! half-width `h`. A real radial symbol placed in every disc produces a
//! Toeplitz operator whose essential spectrum is the union over the Floquet
//! parameter `eta` of the spectra of compact fiber operators. Each fiber is
//! discretized with a twisted trigonometric basis that satisfies the
//! quasiperiodic matching condition exactly, orthonormalized at quadrature
//! nodes.
//!
//! Module map:
//!
//! * [`geometry`]: the disc-plus-strip cell and its quadrature rules.
//! * [`symbols`]: radial profiles, moment-based synthesis and periodic lifts.
//! * [`disc_spectrum`]: closed-form eigenvalues for radial symbols on a disc.
//! * [`quasi_bergman`]: discrete quasiperiodic Bergman spaces and twists.
//! * [`band_solver`]: fiber matrices, band functions, spectrum components.
//! * [`floquet`]: the truncated Floquet transform and quasimodes.
//! * [`conformal`]: weighted-composition transplantation for explicit maps.
//! * [`pipeline`]: targets to verdict, end to end.
//! * [`cli`]: the command line front end.

pub mod band_solver;
pub mod cli;
pub mod conformal;
pub mod disc_spectrum;
pub mod error;
pub mod floquet;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod par;
pub mod pipeline;
pub mod quasi_bergman;
pub mod symbols;

pub use error::{Error, Result};
pub use num_complex::Complex64;
