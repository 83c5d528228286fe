//! File formats, the double-coset table cache and the `hecke` command line
//! on top of [`hecke_core`].

pub mod cache;
pub mod cli;
pub mod commands;
pub mod format;
