//! Library side of the `signtest` CLI: argument definitions, command
//! dispatch, input parsing and report rendering. The binary in `main.rs` is
//! a thin shell around [`app::run`]; keeping the logic here makes it
//! testable and lets the fuzz targets hit the parsers directly.

pub mod app;
pub mod input;
pub mod svg;
