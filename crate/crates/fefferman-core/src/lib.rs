//! Exact algebra and floating-point tensor calculus for qc, cr and conformal
//! structures.
#![cfg_attr(not(test), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod checks;
pub mod cohomology;
pub mod conformal;
pub mod inclusions;
pub mod jet;
pub mod lie;
pub mod linalg;
pub mod matrix;
pub mod models;
pub mod scalar;
pub mod transfer;
