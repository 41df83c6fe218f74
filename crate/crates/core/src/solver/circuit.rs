//! Generation circuits and their line-oriented text format.
//!
//! Qubits are 1-based in files: photons `1..=photons` in emission order,
//! then emitters. Gates are listed in forward time order, one per line:
//!
//! ```text
//! photons 2
//! emitters 1
//! H 3
//! E 3 1
//! H 1
//! E 3 2
//! M 3 2
//! ```
//!
//! `E e p` emits photon `p` from emitter `e`. `M e p` measures emitter `e` in
//! the Z basis; on outcome 1 it applies `X` to photon `p` and resets the
//! emitter to `|0>`. Blank lines and `#` comments are ignored when parsing.

use std::fmt::Write as _;

use super::SolveError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    X(usize),
    Z(usize),
    Cz(usize, usize),
    Cnot { control: usize, target: usize },
    Emit { emitter: usize, photon: usize },
    Measure { emitter: usize, photon: usize },
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::X(q) | Gate::Z(q) => vec![q],
            Gate::Cz(a, b) => vec![a, b],
            Gate::Cnot { control, target } => vec![control, target],
            Gate::Emit { emitter, photon } | Gate::Measure { emitter, photon } => {
                vec![emitter, photon]
            }
        }
    }
}

/// Forward-time gate list on `n_photons + n_emitters` qubits (0-based,
/// photons first).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GenerationCircuit {
    n_photons: usize,
    n_emitters: usize,
    gates: Vec<Gate>,
}

impl GenerationCircuit {
    /// Checks operand ranges and roles: two-qubit gates act on distinct
    /// emitters, `E`/`M` pair an emitter with a photon, and every photon is
    /// emitted exactly once in index order.
    pub fn new(n_photons: usize, n_emitters: usize, gates: Vec<Gate>) -> Result<Self, SolveError> {
        let c = GenerationCircuit {
            n_photons,
            n_emitters,
            gates,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), SolveError> {
        let n = self.n_qubits();
        let is_emitter = |q: usize| q >= self.n_photons && q < n;
        let is_photon = |q: usize| q < self.n_photons;
        let mut next_photon = 0;
        for (i, g) in self.gates.iter().enumerate() {
            let bad = |msg: &str| SolveError::MalformedCircuit(format!("gate {}: {msg}", i + 1));
            if g.qubits().iter().any(|&q| q >= n) {
                return Err(bad("qubit out of range"));
            }
            match *g {
                Gate::Cz(a, b)
                | Gate::Cnot {
                    control: a,
                    target: b,
                } => {
                    if a == b || !is_emitter(a) || !is_emitter(b) {
                        return Err(bad("two-qubit gates act on two distinct emitters"));
                    }
                }
                Gate::Emit { emitter, photon } => {
                    if !is_emitter(emitter) || !is_photon(photon) {
                        return Err(bad("emission pairs an emitter with a photon"));
                    }
                    if photon != next_photon {
                        return Err(bad("photons must be emitted once each, in order"));
                    }
                    next_photon += 1;
                }
                Gate::Measure { emitter, photon }
                    if (!is_emitter(emitter) || !is_photon(photon)) =>
                {
                    return Err(bad("measurement pairs an emitter with a photon"));
                }
                _ => {}
            }
        }
        if next_photon != self.n_photons {
            return Err(SolveError::MalformedCircuit(format!(
                "{} of {} photons emitted",
                next_photon, self.n_photons
            )));
        }
        Ok(())
    }

    pub fn n_photons(&self) -> usize {
        self.n_photons
    }

    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    pub fn n_qubits(&self) -> usize {
        self.n_photons + self.n_emitters
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Emitter-emitter entangling gates (`CNOT` and `CZ`).
    pub fn cnot_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. } | Gate::Cz(..)))
            .count()
    }

    pub fn measurement_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Measure { .. }))
            .count()
    }

    /// Emitters that appear in at least one gate.
    pub fn emitters_used(&self) -> usize {
        let mut used = vec![false; self.n_emitters];
        for g in &self.gates {
            for q in g.qubits() {
                if q >= self.n_photons {
                    used[q - self.n_photons] = true;
                }
            }
        }
        used.iter().filter(|&&u| u).count()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "photons {}", self.n_photons).unwrap();
        writeln!(s, "emitters {}", self.n_emitters).unwrap();
        for g in &self.gates {
            let line = match *g {
                Gate::H(q) => format!("H {}", q + 1),
                Gate::S(q) => format!("S {}", q + 1),
                Gate::X(q) => format!("X {}", q + 1),
                Gate::Z(q) => format!("Z {}", q + 1),
                Gate::Cz(a, b) => format!("CZ {} {}", a + 1, b + 1),
                Gate::Cnot { control, target } => format!("CNOT {} {}", control + 1, target + 1),
                Gate::Emit { emitter, photon } => format!("E {} {}", emitter + 1, photon + 1),
                Gate::Measure { emitter, photon } => format!("M {} {}", emitter + 1, photon + 1),
            };
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, SolveError> {
        let mut photons = None;
        let mut emitters = None;
        let mut gates = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| SolveError::Parse {
                line: lineno + 1,
                message: msg.to_string(),
            };
            let mut parts = line.split_whitespace();
            let kind = parts.next().unwrap();
            let args = parts
                .map(|a| {
                    a.parse::<usize>()
                        .ok()
                        .and_then(|v| v.checked_sub(1))
                        .ok_or_else(|| err("operands are positive integers"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let want = |k: usize| {
                if args.len() == k {
                    Ok(())
                } else {
                    Err(err(&format!("{kind} takes {k} operand(s)")))
                }
            };
            match kind {
                "photons" | "emitters" => {
                    want(1)?;
                    if !gates.is_empty() {
                        return Err(err("header must precede gates"));
                    }
                    let slot = if kind == "photons" {
                        &mut photons
                    } else {
                        &mut emitters
                    };
                    if slot.is_some() {
                        return Err(err("duplicate header"));
                    }
                    *slot = Some(args[0] + 1);
                }
                "H" | "S" | "X" | "Z" => {
                    want(1)?;
                    let q = args[0];
                    gates.push(match kind {
                        "H" => Gate::H(q),
                        "S" => Gate::S(q),
                        "X" => Gate::X(q),
                        _ => Gate::Z(q),
                    });
                }
                "CZ" | "CNOT" | "E" | "M" => {
                    want(2)?;
                    let (a, b) = (args[0], args[1]);
                    gates.push(match kind {
                        "CZ" => Gate::Cz(a, b),
                        "CNOT" => Gate::Cnot {
                            control: a,
                            target: b,
                        },
                        "E" => Gate::Emit {
                            emitter: a,
                            photon: b,
                        },
                        _ => Gate::Measure {
                            emitter: a,
                            photon: b,
                        },
                    });
                }
                _ => return Err(err(&format!("unknown gate {kind}"))),
            }
        }
        let (Some(p), Some(e)) = (photons, emitters) else {
            return Err(SolveError::Parse {
                line: 0,
                message: "missing photons/emitters header".into(),
            });
        };
        Self::new(p, e, gates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "photons 2\nemitters 1\nH 3\nE 3 1\nH 1\nE 3 2\nM 3 2\n";

    #[test]
    fn text_round_trip() {
        let c = GenerationCircuit::parse(SMALL).unwrap();
        assert_eq!(c.to_text(), SMALL);
        assert_eq!(c.gates().len(), 5);
        assert_eq!(c.measurement_count(), 1);
        assert_eq!(c.emitters_used(), 1);
    }

    #[test]
    fn comments_are_ignored() {
        let text = format!("# header note\n\n{SMALL}# trailing\n");
        assert_eq!(GenerationCircuit::parse(&text).unwrap().to_text(), SMALL);
    }

    #[test]
    fn structural_errors() {
        let bad_cnot = "photons 1\nemitters 1\nCNOT 2 1\nE 2 1\n";
        assert!(matches!(
            GenerationCircuit::parse(bad_cnot),
            Err(SolveError::MalformedCircuit(_))
        ));
        let out_of_order = "photons 2\nemitters 1\nE 3 2\nE 3 1\n";
        assert!(GenerationCircuit::parse(out_of_order).is_err());
        let missing = "photons 2\nemitters 1\nE 3 1\n";
        assert!(GenerationCircuit::parse(missing).is_err());
        assert!(matches!(
            GenerationCircuit::parse("photons 1\nemitters 1\nT 1\n"),
            Err(SolveError::Parse { line: 3, .. })
        ));
        assert!(GenerationCircuit::parse("E 2 1\n").is_err());
    }
}
