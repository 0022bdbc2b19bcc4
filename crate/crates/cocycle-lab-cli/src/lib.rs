//! Library surface of the runner, split out so the config schema and file
//! emitters are testable without spawning the binary.

pub mod config;
pub mod output;
pub mod run;
