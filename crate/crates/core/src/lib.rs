//! Simulation and analysis kernels for quantum logic spectroscopy of Al⁺
//! with a co-trapped Ca⁺ logic ion.
//!
//! Everything here is `no_std` with `alloc`; file formats, the command line
//! and parallel drivers live in the `qls` crate.

#![no_std]
// `!(x > 0.0)` is used on purpose so NaN fails range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod atomic;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod metrology;
pub mod protocol;
pub mod rng;
pub mod trap;

pub use error::{Error, Result};
