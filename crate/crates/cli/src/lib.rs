//! Command line front end over the spectra-core library: argument grammar,
//! deterministic rendering, subcommand dispatch, and the acceptance suite.

pub mod accept;
pub mod args;
pub mod commands;
pub mod render;
