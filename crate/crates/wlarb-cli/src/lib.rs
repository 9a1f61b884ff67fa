//! Experiment runner library for the wavelength-arbitration simulator:
//! configuration parsing, sweep-cell expansion, deterministic parallel
//! execution, and table rendering. The `wlarb` binary is a thin wrapper.

pub mod commands;
pub mod config;
pub mod plot;
pub mod runner;
pub mod table;
