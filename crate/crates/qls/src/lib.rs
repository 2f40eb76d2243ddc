//! Command-line front end for the quantum-logic spectroscopy toolkit.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod plot;
