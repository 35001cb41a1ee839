//! Normalized ground states of a two-component mass-critical nonlinear
//! Schrödinger system on periodic boxes: sharp Gagliardo–Nirenberg constants,
//! double-mass constrained minimization, split-step time evolution with an
//! orbital-stability probe, and concentration diagnostics as the masses
//! approach the critical pair.

pub mod cli;
pub mod concentration;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod field;
mod fft;
pub mod grid;
pub mod minimize;
pub mod scalar;

pub use error::{Error, Result};
pub use field::{best_translation_alignment, Field, FieldPair};
pub use grid::Grid;

pub use rustfft::num_complex::Complex64;
