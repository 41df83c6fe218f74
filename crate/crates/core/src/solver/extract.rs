use super::SolveError;
use crate::graphs::Graph;
use crate::tableau::{qubit_mask, PauliString, Tableau, TableauError};

/// A graph-state decomposition of a stabilizer state: the state equals
/// `prod_{v in z_corrections} Z_v` applied to `graph.state()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedGraph {
    /// Graph with its hadamard set filled in.
    pub graph: Graph,
    pub hadamards: Vec<usize>,
    pub z_corrections: Vec<usize>,
}

/// State of the first `n_photons` qubits, given that every later qubit is
/// in `|0>`.
pub fn photonic_part(t: &Tableau, n_photons: usize) -> Result<Tableau, SolveError> {
    let n = t.n_qubits();
    if n_photons == 0 || n_photons > n {
        return Err(SolveError::Tableau(TableauError::QubitOutOfRange {
            qubit: n_photons,
            n,
        }));
    }
    if let Some(e) = (n_photons..n).find(|&e| !t.stabilizes(&PauliString::z(e))) {
        return Err(SolveError::EmitterNotReset(e - n_photons));
    }
    let order: Vec<usize> = (n_photons..n).chain(0..n_photons).collect();
    let mask = qubit_mask(n_photons);
    let rows: Vec<PauliString> = t
        .to_rref(&order)?
        .generators()
        .iter()
        .filter(|r| r.support() & !mask == 0)
        .copied()
        .collect();
    Ok(Tableau::from_generators(n_photons, rows)?)
}

/// Local-Hadamard graph form of a stabilizer state.
///
/// Qubits outside the pivot columns of the row-reduced X block receive a
/// Hadamard; afterwards the X block is invertible and the Z block, once the
/// X block is brought to the identity, is the adjacency matrix.
pub fn extract_graph(t: &Tableau) -> Result<ExtractedGraph, SolveError> {
    let n = t.n_qubits();
    let mask = qubit_mask(n);
    let mut rows = t.generators().to_vec();
    let mut pivots = 0u64;
    let mut rank = 0;
    for q in 0..n {
        let bit = 1u64 << q;
        let Some(p) = (rank..n).find(|&i| rows[i].x & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != rank && r.x & bit != 0 {
                *r = r.mul(&pivot);
            }
        }
        pivots |= bit;
        rank += 1;
    }
    let hadamards: Vec<usize> = (0..n).filter(|&q| (mask & !pivots) >> q & 1 == 1).collect();
    let mut rotated = t.clone();
    for &q in &hadamards {
        rotated.h(q);
    }
    let mut rows = rotated.generators().to_vec();
    for q in 0..n {
        let bit = 1u64 << q;
        let p = (q..n).find(|&i| rows[i].x & bit != 0).ok_or_else(|| {
            SolveError::Internal("X block is singular after local Hadamards".into())
        })?;
        rows.swap(q, p);
        let pivot = rows[q];
        for (i, r) in rows.iter_mut().enumerate() {
            if i != q && r.x & bit != 0 {
                *r = r.mul(&pivot);
            }
        }
    }
    let mut graph = Graph::empty(n)?;
    let mut z_corrections = Vec::new();
    for (v, r) in rows.iter().enumerate() {
        if r.z >> v & 1 == 1 {
            return Err(SolveError::Internal(format!(
                "qubit {} carries a Y in graph form",
                v + 1
            )));
        }
        for (u, ru) in rows.iter().enumerate().take(v) {
            let uv = r.z >> u & 1 == 1;
            if uv != (ru.z >> v & 1 == 1) {
                return Err(SolveError::Internal("adjacency is not symmetric".into()));
            }
            if uv {
                graph.add_edge(u, v)?;
            }
        }
        match r.phase {
            0 => {}
            2 => z_corrections.push(v),
            _ => return Err(SolveError::Internal("imaginary generator phase".into())),
        }
    }
    for &q in &hadamards {
        graph.set_hadamard(q)?;
    }
    Ok(ExtractedGraph {
        graph,
        hadamards,
        z_corrections,
    })
}
