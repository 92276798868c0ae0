//! Command line and HTTP front ends for the preposition diagnostician.

pub mod cli;
pub mod config;
pub mod server;
pub mod store;
