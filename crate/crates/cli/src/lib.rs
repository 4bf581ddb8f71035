//! Library side of the `late-terms` command: configuration, table builders,
//! output encodings and the verification suite.

pub mod commands;
pub mod config;
pub mod oracle;
pub mod output;
pub mod verify;
