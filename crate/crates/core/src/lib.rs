//! Workbench for peaceable queens: two armies of queens of equal size on an
//! n×n grid or torus, with no queen attacking one of the other color.
//!
//! [`board`] and [`battle`] hold the geometry and the peace checks,
//! [`constructions`] the explicit families, [`swap_search`] the local
//! search, [`exact`] branch and bound, [`bounds_nlp`] the density-bound
//! programs, and [`interface`] the CLI, board files, SVG and HTTP API.

pub mod battle;
pub mod board;
pub mod bounds_nlp;
pub mod cellset;
pub mod constructions;
pub mod exact;
pub mod interface;
pub mod rng;
pub mod swap_search;
