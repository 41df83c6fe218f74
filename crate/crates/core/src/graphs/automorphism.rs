use super::graph::Graph;
use super::GraphError;

/// Vertex permutation: vertex `v` maps to `perm[v]`.
pub type Perm = Vec<usize>;

/// Default cap on enumerated group elements.
pub const DEFAULT_GROUP_CAP: usize = 1 << 20;

/// Full automorphism group of a graph, treating the hadamard set as a vertex
/// colour. Elements are listed in lexicographic order, so the identity is
/// first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismGroup {
    n: usize,
    elements: Vec<Perm>,
}

impl AutomorphismGroup {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }
}

/// Vertex invariant used to prune candidate images: colour, degree and the
/// sorted multiset of neighbour degrees.
fn signatures(g: &Graph) -> Vec<(bool, usize, Vec<usize>)> {
    (0..g.n_vertices())
        .map(|v| {
            let mut nd: Vec<usize> = bits(g.neighbors(v)).map(|u| g.degree(u)).collect();
            nd.sort_unstable();
            (g.is_hadamard(v), g.degree(v), nd)
        })
        .collect()
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (m != 0).then(|| {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            v
        })
    })
}

/// Order in which source vertices are assigned: each vertex after the first
/// of its component is adjacent to an earlier one, so adjacency constraints
/// bite early.
fn search_order(g: &Graph) -> Vec<usize> {
    let n = g.n_vertices();
    let mut order = Vec::with_capacity(n);
    let mut placed = 0u64;
    while order.len() < n {
        let start = (0..n).find(|&v| placed >> v & 1 == 0).unwrap();
        order.push(start);
        placed |= 1 << start;
        let mut i = order.len() - 1;
        while i < order.len() {
            for u in bits(g.neighbors(order[i]) & !placed) {
                order.push(u);
                placed |= 1 << u;
            }
            i += 1;
        }
    }
    order
}

struct Matcher<'a> {
    a: &'a Graph,
    b: &'a Graph,
    order: Vec<usize>,
    sig_a: Vec<(bool, usize, Vec<usize>)>,
    sig_b: Vec<(bool, usize, Vec<usize>)>,
    map: Vec<usize>,
    used: u64,
}

impl<'a> Matcher<'a> {
    fn new(a: &'a Graph, b: &'a Graph) -> Self {
        Matcher {
            a,
            b,
            order: search_order(a),
            sig_a: signatures(a),
            sig_b: signatures(b),
            map: vec![usize::MAX; a.n_vertices()],
            used: 0,
        }
    }

    fn consistent(&self, depth: usize, v: usize, w: usize) -> bool {
        if self.sig_a[v] != self.sig_b[w] {
            return false;
        }
        self.order[..depth].iter().all(|&u| {
            let img = self.map[u];
            self.a.has_edge(u, v) == self.b.has_edge(img, w)
        })
    }

    /// Visits every isomorphism; `visit` returns false to stop early.
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let n = self.a.n_vertices();
        if depth == n {
            return visit(&self.map);
        }
        let v = self.order[depth];
        for w in 0..n {
            if self.used >> w & 1 == 1 || !self.consistent(depth, v, w) {
                continue;
            }
            self.map[v] = w;
            self.used |= 1 << w;
            let go_on = self.run(depth + 1, visit);
            self.used &= !(1 << w);
            self.map[v] = usize::MAX;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Enumerates the colour-preserving automorphism group by backtracking.
pub fn automorphisms(g: &Graph) -> Result<AutomorphismGroup, GraphError> {
    automorphisms_capped(g, DEFAULT_GROUP_CAP)
}

pub fn automorphisms_capped(g: &Graph, cap: usize) -> Result<AutomorphismGroup, GraphError> {
    let mut elements = Vec::new();
    let mut over = false;
    Matcher::new(g, g).run(0, &mut |m| {
        if elements.len() == cap {
            over = true;
            return false;
        }
        elements.push(m.to_vec());
        true
    });
    if over {
        return Err(GraphError::GroupTooLarge(cap));
    }
    elements.sort_unstable();
    Ok(AutomorphismGroup {
        n: g.n_vertices(),
        elements,
    })
}

/// A colour-preserving isomorphism `a -> b`, if one exists.
pub fn isomorphic(a: &Graph, b: &Graph) -> Option<Perm> {
    if a.n_vertices() != b.n_vertices()
        || a.n_edges() != b.n_edges()
        || a.hadamard_mask().count_ones() != b.hadamard_mask().count_ones()
    {
        return None;
    }
    let mut found = None;
    Matcher::new(a, b).run(0, &mut |m| {
        found = Some(m.to_vec());
        false
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::graph::{path, ring, shor_encode_22, truncate_leaves};

    fn is_automorphism(g: &Graph, p: &[usize]) -> bool {
        g.edges().iter().all(|&(a, b)| g.has_edge(p[a], p[b]))
            && (0..g.n_vertices()).all(|v| g.is_hadamard(v) == g.is_hadamard(p[v]))
    }

    #[test]
    fn ring_is_dihedral() {
        let g = ring(6).unwrap();
        let grp = automorphisms(&g).unwrap();
        assert_eq!(grp.size(), 12);
        assert_eq!(grp.elements()[0], (0..6).collect::<Vec<_>>());
        assert!(grp.elements().iter().all(|p| is_automorphism(&g, p)));
    }

    #[test]
    fn path_has_one_reflection() {
        assert_eq!(automorphisms(&path(3).unwrap()).unwrap().size(), 2);
    }

    #[test]
    fn encoded_and_core_orders() {
        let enc = shor_encode_22(&ring(6).unwrap()).unwrap();
        let grp = automorphisms(&enc).unwrap();
        assert_eq!(grp.size(), 768);
        assert!(grp.elements().iter().all(|p| is_automorphism(&enc, p)));
        let core = truncate_leaves(&enc).unwrap();
        assert_eq!(automorphisms(&core.graph).unwrap().size(), 768);

        let enc3 = shor_encode_22(&ring(3).unwrap()).unwrap();
        assert_eq!(automorphisms(&enc3).unwrap().size(), 48);
    }

    #[test]
    fn group_cap() {
        let g = Graph::empty(10).unwrap();
        assert_eq!(
            automorphisms_capped(&g, 100),
            Err(GraphError::GroupTooLarge(100))
        );
    }

    #[test]
    fn isomorphism_search() {
        let g = ring(6).unwrap();
        let perm = vec![3, 0, 5, 1, 4, 2];
        let h = g.relabeled(&perm);
        let m = isomorphic(&g, &h).unwrap();
        assert!(g.edges().iter().all(|&(a, b)| h.has_edge(m[a], m[b])));
        assert!(isomorphic(&g, &path(6).unwrap()).is_none());

        let mut colored = path(3).unwrap();
        colored.set_hadamard(0).unwrap();
        let mut middle = path(3).unwrap();
        middle.set_hadamard(1).unwrap();
        assert!(isomorphic(&colored, &middle).is_none());
    }
}
