//! Algorithmic core for the privacy-preserving scene description pipeline.
//!
//! Everything in this crate is pure computation over owned values: no IO, no
//! global state, no platform-dependent behavior. The companion `privdesc`
//! crate layers datasets, checkpoints, CLI commands, and transports on top.
//!
//! The crate is `no_std` (with `alloc`) so the kernel can be embedded in
//! constrained runtimes; all float transcendentals go through `libm` for
//! bit-identical results across platforms.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod embed;
pub mod env;
pub mod experts;
pub mod gate;
pub mod metrics;
pub mod policy;
pub mod privacy;
pub mod rng;
pub mod scene;
pub mod tape;
pub mod textkit;

mod mathx;
