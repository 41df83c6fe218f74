//! Emission circuits for photonic graph states.
//!
//! [`solve`] runs the time-reversed construction: photons are absorbed back
//! into a register of [`min_emitters`] emitters from the last one to the
//! first. Where no generator starts at the current photon, a time-reversed
//! measurement frees one. The recorded gates, inverted and reversed, form a
//! forward [`GenerationCircuit`] that [`simulate`] runs from `|0...0>` and
//! [`verify`] checks against the target.

mod circuit;
mod extract;
mod simulate;
mod solve;
mod verify;

use thiserror::Error;

use crate::graphs::GraphError;
use crate::tableau::TableauError;

pub use circuit::{Gate, GenerationCircuit};
pub use extract::{extract_graph, photonic_part, ExtractedGraph};
pub use simulate::{simulate, OutcomeSource};
pub use solve::{
    min_emitters, solve, solve_with, AbsorbChoice, Gauge, Pick, ReduceChoice, Solution,
    SolveOptions, SolveStats, StepTrace,
};
pub use verify::{verify, VerifyReport, DEFAULT_RANDOM_STREAMS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("ordering has {ordering} entries but the graph has {graph} vertices")]
    OrderingMismatch { ordering: usize, graph: usize },
    #[error("{photons} photons plus {emitters} emitters exceeds the register size")]
    TooManyQubits { photons: usize, emitters: usize },
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("circuit text line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("emitter {} does not end in |0>", .0 + 1)]
    EmitterNotReset(usize),
    #[error("internal solver inconsistency: {0}")]
    Internal(String),
}
