//! Command-line front end for `dirdiff`: 8-bit grayscale image I/O, the
//! benchmark harness and the `inpaint`, `bench` and `genmask` commands.

mod cli;
pub mod harness;
pub mod io;
pub mod pgm;

pub use cli::{run, Failure};
