//! Emission-circuit synthesis for photonic graph states.
//!
//! - [`tableau`]: stabilizer states, RREF gauge and height function.
//! - [`graphs`]: target graphs, automorphisms and emission orderings.
//! - [`solver`]: time-reversed circuit construction and verification.
//! - [`search`]: ordering sweeps and CNOT histograms.
//! - [`bounds`]: closed-form CNOT upper bounds.

pub mod bounds;
pub mod graphs;
pub mod search;
pub mod solver;
pub mod tableau;
