//! Synthesis of doubly geometric (DoG) single-qubit control pulses.
//!
//! A DoG pulse drives a holonomic (parallel-transported, cyclic) Bloch-sphere
//! evolution whose first-order detuning error curve is closed. The crate is
//! split along the pipeline:
//!
//! * [`curvekit`] builds and differentiates 3D space curves.
//! * [`qdyn`] propagates the three-field qubit Hamiltonian and extracts error
//!   curves and fidelities.
//! * [`holonomy`] maps Bloch paths to fields and computes geometric phases.
//! * [`dogsynth`] turns a closed error curve into holonomic control fields and
//!   provides the orange-slice and twisted-curve gate families.
//! * [`bench`] runs fidelity sweeps and the closed-form toy models.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `num_traits::Float` goes unused when test dependencies unify std float
// methods into the build.
#![allow(unused_imports)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bench;
pub mod curvekit;
pub mod dogsynth;
mod error;
pub mod holonomy;
pub mod numerics;
pub mod qdyn;
mod tolerances;
mod vec3;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
pub use vec3::Vec3;
