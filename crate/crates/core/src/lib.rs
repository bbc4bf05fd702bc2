#![no_std]
extern crate alloc;

pub mod fixed_points;
pub mod linalg;
pub mod mcg_algebra;
pub mod rng;
pub mod rotation;
pub mod surfaces;
pub mod torus_maps;
