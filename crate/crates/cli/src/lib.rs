//! File formats, graph generators and subcommands behind the `cyclelap`
//! binary.

pub mod commands;
pub mod formats;
pub mod generate;
pub mod summary;
pub mod verify;
