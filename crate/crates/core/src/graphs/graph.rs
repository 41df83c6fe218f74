use std::collections::BTreeSet;

use crate::tableau::{PauliString, Tableau, MAX_QUBITS};

use super::GraphError;

/// Simple undirected graph with up to 64 vertices, stored as adjacency masks.
///
/// `hadamards` marks vertices whose qubit carries an extra local Hadamard in
/// the target state. `leaf_map` pairs each core vertex with its leaf for
/// encoded graphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
    hadamards: u64,
    leaf_map: Option<Vec<(usize, usize)>>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        if n > MAX_QUBITS {
            return Err(GraphError::TooLarge(n));
        }
        Ok(Graph {
            n,
            adj: vec![0; n],
            hadamards: 0,
            leaf_map: None,
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n)?;
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), GraphError> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if self.has_edge(a, b) {
            return Err(GraphError::DuplicateEdge(a, b));
        }
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
        Ok(())
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn set_hadamard(&mut self, v: usize) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        self.hadamards |= 1 << v;
        Ok(())
    }

    /// Installs a core-to-leaf pairing after checking it is a bijection
    /// between degree-≥2 cores and degree-1 leaves attached to them.
    pub fn set_leaf_map(&mut self, pairs: Vec<(usize, usize)>) -> Result<(), GraphError> {
        let mut seen = 0u64;
        for &(core, leaf) in &pairs {
            self.check_vertex(core)?;
            self.check_vertex(leaf)?;
            if seen >> core & 1 == 1 || seen >> leaf & 1 == 1 || core == leaf {
                return Err(GraphError::BadLeafMap(format!(
                    "vertex reused in pair ({core}, {leaf})"
                )));
            }
            seen |= (1 << core) | (1 << leaf);
            if !self.has_edge(core, leaf) || self.degree(leaf) != 1 || self.degree(core) < 2 {
                return Err(GraphError::BadLeafMap(format!(
                    "({core}, {leaf}) is not a core with an attached leaf"
                )));
            }
        }
        self.leaf_map = Some(pairs);
        Ok(())
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    #[inline]
    pub fn is_hadamard(&self, v: usize) -> bool {
        self.hadamards >> v & 1 == 1
    }

    pub fn hadamard_mask(&self) -> u64 {
        self.hadamards
    }

    pub fn hadamards(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.is_hadamard(v)).collect()
    }

    pub fn leaf_map(&self) -> Option<&[(usize, usize)]> {
        self.leaf_map.as_deref()
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.n {
            let mut m = self.adj[a] >> a >> 1;
            while m != 0 {
                let off = m.trailing_zeros() as usize;
                out.push((a, a + 1 + off));
                m &= m - 1;
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.adj
            .iter()
            .map(|m| m.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = self.adj[v] & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen.count_ones() as usize == self.n
    }

    /// New graph whose vertex `k` is this graph's vertex `perm[k]`.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        let mut inverse = vec![0; self.n];
        for (k, &v) in perm.iter().enumerate() {
            inverse[v] = k;
        }
        let map_mask = |m: u64| {
            let mut out = 0u64;
            let mut m = m;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                out |= 1 << inverse[v];
                m &= m - 1;
            }
            out
        };
        Graph {
            n: self.n,
            adj: perm.iter().map(|&v| map_mask(self.adj[v])).collect(),
            hadamards: map_mask(self.hadamards),
            leaf_map: self.leaf_map.as_ref().map(|pairs| {
                pairs
                    .iter()
                    .map(|&(c, l)| (inverse[c], inverse[l]))
                    .collect()
            }),
        }
    }

    /// Graph state `prod CZ |+...+>` followed by `H` on every hadamard vertex.
    ///
    /// Generators are `X_v prod_{u~v} Z_u`, with `X` and `Z` exchanged on the
    /// hadamard qubits.
    pub fn state(&self) -> Tableau {
        let h = self.hadamards;
        let rows = (0..self.n)
            .map(|v| {
                let x = 1u64 << v;
                let z = self.adj[v];
                // conjugating by H swaps the x/z bits on h; X_vZ_v never occurs
                PauliString {
                    x: (x & !h) | (z & h),
                    z: (z & !h) | (x & h),
                    phase: 0,
                }
            })
            .collect();
        Tableau::from_generators(self.n, rows).expect("graph states are valid")
    }

    /// Adjacency as a set of unordered pairs, for comparisons.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges().into_iter().collect()
    }
}

/// Cycle `0-1-...-(n-1)-0`.
pub fn ring(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::RingTooSmall(n));
    }
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

/// Path `0-1-...-(n-1)`.
pub fn path(n: usize) -> Result<Graph, GraphError> {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, &edges)
}

/// (2,2) Shor encoding of a bare graph.
///
/// Logical vertex `v` of an `m`-vertex graph becomes core qubits `2v`, `2v+1`
/// and leaves `2m+2v`, `2m+2v+1`, each leaf hanging off the core with the
/// same parity and carrying a Hadamard. Every logical edge becomes the four
/// core edges of a `K_{2,2}`.
pub fn shor_encode_22(g: &Graph) -> Result<Graph, GraphError> {
    if g.leaf_map.is_some() || g.hadamards != 0 {
        return Err(GraphError::AlreadyEncoded);
    }
    let m = g.n;
    let mut out = Graph::empty(4 * m)?;
    for (u, v) in g.edges() {
        for a in [2 * u, 2 * u + 1] {
            for b in [2 * v, 2 * v + 1] {
                out.add_edge(a, b)?;
            }
        }
    }
    let mut pairs = Vec::with_capacity(2 * m);
    for c in 0..2 * m {
        let leaf = 2 * m + c;
        out.add_edge(c, leaf)?;
        out.set_hadamard(leaf)?;
        pairs.push((c, leaf));
    }
    out.set_leaf_map(pairs)?;
    Ok(out)
}

/// Core of an encoded graph with its leaves removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreGraph {
    pub graph: Graph,
    /// `to_full[k]` is the full-graph vertex of core vertex `k`.
    pub to_full: Vec<usize>,
    /// `leaf_of[k]` is the full-graph leaf attached to core vertex `k`.
    pub leaf_of: Vec<usize>,
}

/// Induced subgraph on the core vertices of `g`, relabeled densely in
/// increasing full-graph order.
pub fn truncate_leaves(g: &Graph) -> Result<CoreGraph, GraphError> {
    let pairs = g.leaf_map().ok_or(GraphError::NoLeafMap)?;
    let mut sorted: Vec<(usize, usize)> = pairs.to_vec();
    sorted.sort_unstable();
    let to_full: Vec<usize> = sorted.iter().map(|&(c, _)| c).collect();
    let leaf_of: Vec<usize> = sorted.iter().map(|&(_, l)| l).collect();
    let mut index = vec![usize::MAX; g.n];
    for (k, &c) in to_full.iter().enumerate() {
        index[c] = k;
    }
    let mut core = Graph::empty(to_full.len())?;
    for (a, b) in g.edges() {
        if index[a] != usize::MAX && index[b] != usize::MAX {
            core.add_edge(index[a], index[b])?;
        }
    }
    for (k, &c) in to_full.iter().enumerate() {
        if g.is_hadamard(c) {
            core.set_hadamard(k)?;
        }
    }
    Ok(CoreGraph {
        graph: core,
        to_full,
        leaf_of,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rings() {
        let tri = ring(3).unwrap();
        assert_eq!(tri.n_edges(), 3);
        let hex = ring(6).unwrap();
        assert_eq!(
            hex.edges(),
            vec![(0, 1), (0, 5), (1, 2), (2, 3), (3, 4), (4, 5)]
        );
        assert_eq!(ring(4).unwrap().n_edges(), 4);
        assert_eq!(ring(2), Err(GraphError::RingTooSmall(2)));
    }

    #[test]
    fn edge_validation() {
        let mut g = Graph::empty(3).unwrap();
        assert_eq!(g.add_edge(1, 1), Err(GraphError::SelfLoop(1)));
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.add_edge(1, 0), Err(GraphError::DuplicateEdge(1, 0)));
        assert!(g.add_edge(0, 3).is_err());
    }

    #[test]
    fn encoded_ring_structure() {
        let enc = shor_encode_22(&ring(6).unwrap()).unwrap();
        assert_eq!(enc.n_vertices(), 24);
        assert_eq!(enc.n_edges(), 36);
        assert_eq!(enc.hadamards().len(), 12);
        assert!(enc.hadamards().iter().all(|&v| enc.degree(v) == 1));
        assert_eq!(enc.leaf_map().unwrap().len(), 12);
        assert_eq!(shor_encode_22(&enc), Err(GraphError::AlreadyEncoded));

        let enc3 = shor_encode_22(&ring(3).unwrap()).unwrap();
        assert_eq!(enc3.n_vertices(), 12);
        assert_eq!(enc3.hadamards().len(), 6);
    }

    #[test]
    fn truncation() {
        let enc = shor_encode_22(&ring(6).unwrap()).unwrap();
        let core = truncate_leaves(&enc).unwrap();
        assert_eq!(core.graph.n_vertices(), 12);
        assert_eq!(core.graph.n_edges(), 24);
        assert!((0..12).all(|v| core.graph.degree(v) == 4));
        assert!(core.graph.hadamards().is_empty());
        // the two parity classes form two 6-rings interlocked by cross edges
        let even: Vec<_> = (0..6).map(|k| 2 * k).collect();
        for w in even.windows(2) {
            assert!(core.graph.has_edge(w[0], w[1]));
        }
        assert_eq!(
            truncate_leaves(&ring(6).unwrap()),
            Err(GraphError::NoLeafMap)
        );
        let c3 = truncate_leaves(&shor_encode_22(&ring(3).unwrap()).unwrap()).unwrap();
        assert_eq!(c3.graph.n_vertices(), 6);
        assert_eq!(c3.graph.n_edges(), 12);
    }

    #[test]
    fn graph_state_generators() {
        let g = path(2).unwrap();
        assert_eq!(g.state(), Tableau::parse("XZ ZX").unwrap());
        let mut h = path(2).unwrap();
        h.set_hadamard(1).unwrap();
        assert_eq!(h.state(), Tableau::parse("XX ZZ").unwrap());
    }

    #[test]
    fn relabel_roundtrip() {
        let g = shor_encode_22(&ring(3).unwrap()).unwrap();
        let perm: Vec<usize> = (0..12).rev().collect();
        let r = g.relabeled(&perm);
        assert_eq!(r.relabeled(&perm), g);
        assert_eq!(r.n_edges(), g.n_edges());
    }
}
