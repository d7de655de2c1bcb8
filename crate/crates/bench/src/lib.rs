//! Scenarios, serialization, verification and reporting for the `hzplan` command-line tool.

pub mod io;
pub mod scenarios;
pub mod verify;
