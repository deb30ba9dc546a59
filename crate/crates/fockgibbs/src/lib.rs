//! Grand-canonical Gibbs states on Fourier-truncated bosonic Fock spaces over the
//! unit torus, the focusing Hartree and local sextic Gibbs measures they approximate,
//! and the coherent-state machinery that connects the two.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: parameters, the one-body spectrum, interaction kernels, mass cutoffs
//!   and the quintic soliton.
//! * [`fock`]: occupation bases, ladder operators and sector matrices.
//! * [`qgibbs`]: block-diagonal quantum Gibbs states and their observables.
//! * [`cgibbs`]: sampling and quadrature for the classical measures.
//! * [`semiclassics`]: coherent states, Husimi functions and the inequalities
//!   relating quantum and classical quantities.
//! * [`linalg`] and [`quad`]: dense Hermitian eigensolvers and adaptive quadrature.

pub mod cgibbs;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod qgibbs;
pub mod quad;
pub mod semiclassics;

pub use error::{Error, Result};
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
