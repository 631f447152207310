//! Command-line front end: matrix files, reports and the `krein` commands.

pub mod app;
pub mod io;
