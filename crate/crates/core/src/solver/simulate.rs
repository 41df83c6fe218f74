use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::circuit::{Gate, GenerationCircuit};
use super::SolveError;
use crate::tableau::{Tableau, TableauError};

/// Where random measurement outcomes come from.
#[derive(Clone, Debug)]
pub enum OutcomeSource {
    Seeded(Box<ChaCha8Rng>),
    /// Every random outcome takes this value.
    Constant(bool),
}

impl OutcomeSource {
    pub fn seeded(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        OutcomeSource::Seeded(Box::new(rng))
    }
}

/// Runs `circuit` from `|0...0>` and returns the final register state.
pub fn simulate(
    circuit: &GenerationCircuit,
    outcomes: &mut OutcomeSource,
) -> Result<Tableau, SolveError> {
    let np = circuit.n_photons();
    let mut t = Tableau::zero_state(circuit.n_qubits())?;
    let mut spare = ChaCha8Rng::seed_from_u64(0);
    for &g in circuit.gates() {
        match g {
            Gate::H(q) => t.h(q),
            Gate::S(q) => t.s(q),
            Gate::X(q) => t.pauli_x(q),
            Gate::Z(q) => t.pauli_z(q),
            Gate::Cz(a, b) => t.cz(a, b),
            Gate::Cnot { control, target } => t.cnot(control, target),
            Gate::Emit { emitter, photon } => t.emit(emitter, photon).map_err(|e| match e {
                TableauError::PhotonNotFresh(p) if p < np => SolveError::MalformedCircuit(format!(
                    "photon {} is not in |0> when emitted",
                    p + 1
                )),
                other => other.into(),
            })?,
            Gate::Measure { emitter, photon } => {
                let m = match outcomes {
                    OutcomeSource::Seeded(rng) => t.measure_z(emitter, None, rng.as_mut())?,
                    OutcomeSource::Constant(bit) => t.measure_z(emitter, Some(*bit), &mut spare)?,
                };
                if m.outcome {
                    t.pauli_x(photon);
                    t.pauli_x(emitter);
                }
            }
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tableau::PauliString;

    #[test]
    fn measurement_feedforward_resets_emitter() {
        // the emitter copies itself onto photon 1, then the measurement undoes it
        let c = GenerationCircuit::parse("photons 1\nemitters 1\nH 2\nE 2 1\nM 2 1\n").unwrap();
        let zero = Tableau::zero_state(2).unwrap().canonical();
        for bit in [false, true] {
            let t = simulate(&c, &mut OutcomeSource::Constant(bit)).unwrap();
            assert_eq!(t.canonical(), zero);
        }
        for stream in 0..4 {
            let t = simulate(&c, &mut OutcomeSource::seeded(7, stream)).unwrap();
            assert!(t.stabilizes(&PauliString::z(0)));
            assert!(t.stabilizes(&PauliString::z(1)));
        }
    }

    #[test]
    fn photon_must_be_fresh_when_emitted() {
        let gates = vec![
            Gate::X(0),
            Gate::Emit {
                emitter: 1,
                photon: 0,
            },
        ];
        let bad = GenerationCircuit::new(1, 1, gates).unwrap();
        assert!(matches!(
            simulate(&bad, &mut OutcomeSource::Constant(false)),
            Err(SolveError::MalformedCircuit(_))
        ));
    }
}
