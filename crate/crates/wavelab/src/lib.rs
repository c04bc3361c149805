//! Pseudo-spectral laboratory for oscillatory wave multipliers: centered
//! FFT grids, multiplier symbols, dyadic decompositions, heat atoms, Riesz
//! potentials, wave propagators, sharp maximal functions, and the scaling
//! experiments built on them.

pub mod error;
pub mod fft;
pub mod fieldio;
pub mod grid;
pub mod heat;
pub mod config;
pub mod experiments;
pub mod lp;
pub mod maximal;
pub mod real;
pub mod report;
pub mod riesz;
pub mod symbols;
pub mod wave;

pub use error::{Error, Result};
pub use real::Real;

/// Concrete double-precision aliases for the generic core types.
pub type Grid64 = grid::GridSpec<f64>;
pub type Field64 = grid::Field<f64>;
pub type Spectral64 = grid::SpectralField<f64>;
pub type Symbol64 = symbols::SymbolSpec<f64>;

/// Single-precision aliases.
pub type Grid32 = grid::GridSpec<f32>;
pub type Field32 = grid::Field<f32>;
pub type Spectral32 = grid::SpectralField<f32>;
pub type Symbol32 = symbols::SymbolSpec<f32>;
