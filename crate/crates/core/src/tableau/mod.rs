//! Binary-symplectic stabilizer states.
//!
//! A [`Tableau`] holds `n` commuting, independent Pauli generators. Besides
//! Clifford conjugation and Z-measurement it provides the RREF gauge used by
//! the circuit solver, the height function derived from it, and a canonical
//! form for state equality. [`dense_state`] expands small tableaus into
//! amplitudes for independent cross-checks.

mod dense;
mod pauli;
mod stabilizer;

use thiserror::Error;

pub use dense::{apply_pauli, dense_state, equal_up_to_phase, DENSE_MAX_QUBITS};
pub use pauli::{Pauli, PauliString, MAX_QUBITS};
pub use stabilizer::{Clifford, HeightProfile, Measurement, Tableau};

pub(crate) use stabilizer::qubit_mask;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableauError {
    #[error("a state needs at least one qubit")]
    Empty,
    #[error("{0} qubits exceeds the supported register size")]
    TooManyQubits(usize),
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("two-qubit gate repeats qubit {0}")]
    RepeatedQubit(usize),
    #[error("expected {expected} generators, found {found}")]
    WrongGeneratorCount { expected: usize, found: usize },
    #[error("qubit order is not a permutation")]
    BadOrder,
    #[error("photon {0} is not in |0>")]
    PhotonNotFresh(usize),
    #[error("inconsistent stabilizer generators: {0}")]
    Inconsistent(String),
}
