use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::{Gate, GenerationCircuit};
use super::simulate::{simulate, OutcomeSource};
use super::SolveError;
use crate::graphs::{EmissionOrdering, Graph};
use crate::tableau::{dense_state, equal_up_to_phase, Tableau, DENSE_MAX_QUBITS};

/// Seeded outcome streams checked on top of the all-0 and all-1 streams.
pub const DEFAULT_RANDOM_STREAMS: u64 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    /// Outcome streams simulated on the tableau backend.
    pub streams: usize,
    /// Whether the state-vector cross-check ran.
    pub dense_checked: bool,
    pub failure: Option<String>,
}

/// Checks that `circuit` prepares the graph state of `g` under `ordering`
/// with every emitter back in `|0>`.
///
/// The tableau simulation runs for all-0 and all-1 measurement outcomes and
/// `random_streams` seeded streams. Registers of at most
/// [`DENSE_MAX_QUBITS`] qubits are also run on amplitudes.
pub fn verify(
    circuit: &GenerationCircuit,
    g: &Graph,
    ordering: &EmissionOrdering,
    seed: u64,
    random_streams: u64,
) -> Result<VerifyReport, SolveError> {
    let np = g.n_vertices();
    if ordering.len() != np {
        return Err(SolveError::OrderingMismatch {
            ordering: ordering.len(),
            graph: np,
        });
    }
    if circuit.n_photons() != np {
        return Err(SolveError::MalformedCircuit(format!(
            "circuit emits {} photons, graph has {np} vertices",
            circuit.n_photons()
        )));
    }
    let mut target = g.relabeled(ordering.order()).state();
    target.extend_zero(circuit.n_emitters())?;
    let expected = target.canonical();

    let mut sources = vec![
        ("all-0".to_string(), OutcomeSource::Constant(false)),
        ("all-1".to_string(), OutcomeSource::Constant(true)),
    ];
    for s in 0..random_streams {
        sources.push((
            format!("seed {seed} stream {s}"),
            OutcomeSource::seeded(seed, s),
        ));
    }
    let mut report = VerifyReport {
        passed: true,
        streams: 0,
        dense_checked: false,
        failure: None,
    };
    for (name, mut src) in sources {
        let got = simulate(circuit, &mut src)?.canonical();
        report.streams += 1;
        if got != expected {
            report.passed = false;
            report.failure = Some(first_difference(&name, &got, &expected));
            return Ok(report);
        }
    }
    if circuit.n_qubits() <= DENSE_MAX_QUBITS {
        report.dense_checked = true;
        let want = dense_state(&target)?;
        for bit in [false, true] {
            let got = run_dense(circuit, bit)?;
            if !equal_up_to_phase(&got, &want, 1e-9) {
                report.passed = false;
                report.failure = Some(format!(
                    "state-vector run with outcomes {} differs from the target",
                    u8::from(bit)
                ));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

fn first_difference(stream: &str, got: &Tableau, want: &Tableau) -> String {
    let n = got.n_qubits();
    let (k, a, b) = got
        .generators()
        .iter()
        .zip(want.generators())
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(k, (a, b))| (k, a.to_string_n(n), b.to_string_n(n)))
        .unwrap_or((0, String::new(), String::new()));
    format!(
        "{stream}: canonical generator {} is {a}, expected {b}",
        k + 1
    )
}

/// Amplitude-level run of `circuit`, taking `prefer` on every random
/// measurement.
fn run_dense(circuit: &GenerationCircuit, prefer: bool) -> Result<Vec<Complex64>, SolveError> {
    let n = circuit.n_qubits();
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
    psi[0] = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let flip = |psi: &mut Vec<Complex64>, q: usize| {
        for b in 0..psi.len() {
            if b >> q & 1 == 0 {
                psi.swap(b, b | 1 << q);
            }
        }
    };
    for &g in circuit.gates() {
        match g {
            Gate::H(q) => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                for b in 0..psi.len() {
                    if b >> q & 1 == 0 {
                        let (u, v) = (psi[b], psi[b | 1 << q]);
                        psi[b] = (u + v) * r;
                        psi[b | 1 << q] = (u - v) * r;
                    }
                }
            }
            Gate::S(q) => psi.iter_mut().enumerate().for_each(|(b, a)| {
                if b >> q & 1 == 1 {
                    *a *= i;
                }
            }),
            Gate::X(q) => flip(&mut psi, q),
            Gate::Z(q) => psi.iter_mut().enumerate().for_each(|(b, a)| {
                if b >> q & 1 == 1 {
                    *a = -*a;
                }
            }),
            Gate::Cz(a, c) => psi.iter_mut().enumerate().for_each(|(b, amp)| {
                if b >> a & 1 == 1 && b >> c & 1 == 1 {
                    *amp = -*amp;
                }
            }),
            Gate::Cnot { control, target }
            | Gate::Emit {
                emitter: control,
                photon: target,
            } => {
                if matches!(g, Gate::Emit { .. })
                    && psi
                        .iter()
                        .enumerate()
                        .any(|(b, a)| b >> target & 1 == 1 && a.norm() > 1e-9)
                {
                    return Err(SolveError::MalformedCircuit(format!(
                        "photon {} is not in |0> when emitted",
                        target + 1
                    )));
                }
                for b in 0..psi.len() {
                    if b >> control & 1 == 1 && b >> target & 1 == 0 {
                        psi.swap(b, b | 1 << target);
                    }
                }
            }
            Gate::Measure { emitter, photon } => {
                let p1: f64 = psi
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| b >> emitter & 1 == 1)
                    .map(|(_, a)| a.norm_sqr())
                    .sum();
                let outcome = if p1 < 1e-9 {
                    false
                } else if p1 > 1.0 - 1e-9 {
                    true
                } else {
                    prefer
                };
                let keep = if outcome { p1 } else { 1.0 - p1 };
                let scale = 1.0 / keep.sqrt();
                for (b, a) in psi.iter_mut().enumerate() {
                    if (b >> emitter & 1 == 1) == outcome {
                        *a *= scale;
                    } else {
                        *a = Complex64::new(0.0, 0.0);
                    }
                }
                if outcome {
                    flip(&mut psi, photon);
                    flip(&mut psi, emitter);
                }
            }
        }
    }
    Ok(psi)
}
