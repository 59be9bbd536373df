//! Qudit graph codes over prime fields.
//!
//! The crate covers the whole pipeline from finite-field algebra to dense
//! verification of encoders, syndrome measurements and one-way programs, and
//! a memory simulation under local depolarizing noise. It is `no_std` and
//! only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod channel;
pub mod ffield;
pub mod graph;
pub mod memory;
pub mod oneway;
pub mod phase;
pub mod qspace;
pub mod scheme;
