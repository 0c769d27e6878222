//! Everything that faces a user: board files, SVG, the HTTP session API
//! and the command line.

pub mod boardfile;
pub mod cli;
pub mod http;
pub mod svg;
