//! Folding rectangular polyominoes with holes onto the unit cube.
//!
//! The crate is organised in layers:
//!
//! - [`cube`]: placements of a grid cell on the cube and the roll/flip transitions.
//! - [`grid`]: polyominoes with typed holes, filling, parity and band contraction.
//! - [`engine`]: facemappings, crease propagation and exhaustive search.
//! - [`analyzer`]: the certificate ladder, hole cooperation and minimal cooperating sets.
//! - [`constructions`]: verified witness fixtures and the staircase family.

pub mod cube;
pub mod grid;
pub mod engine;
pub mod analyzer;
pub mod constructions;
