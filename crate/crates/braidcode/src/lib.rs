//! Multiset color codes on flat and cyclic integer grids: braid constructions,
//! codebook-free decoding and a brute-force verification oracle.

pub mod arith;
pub mod bench;
pub mod braid1d;
pub mod braidnd;
pub mod codec;
pub mod error;
pub mod generator;
pub mod grid;
pub mod oracle;
pub mod params;
pub mod sunmao;

pub use error::{DecodeStep, Error, Result};
pub use grid::{BlockSpec, Codeword, ColorId, ColorMap, GridPoint, GridSpec, PaletteEntry};
pub use params::Params;
