//! Noncommutative deformations of projective toric varieties.

pub mod cli;
pub mod groupoid;
pub mod io;
pub mod ncring;
pub mod number;
pub mod polytope;
pub mod quantization;
pub mod rmatrix;
pub mod suite;
pub mod toric_flows;
