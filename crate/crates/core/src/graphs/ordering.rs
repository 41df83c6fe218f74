use std::fmt;

use super::automorphism::{AutomorphismGroup, Perm};
use super::graph::{truncate_leaves, Graph};
use super::GraphError;

/// Emission schedule: `order()[k]` is the vertex emitted at time `k + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmissionOrdering {
    order: Vec<usize>,
}

impl EmissionOrdering {
    pub fn new(order: Vec<usize>) -> Result<Self, GraphError> {
        let n = order.len();
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || seen[v] {
                return Err(GraphError::BadOrdering(format!(
                    "{order:?} is not a permutation"
                )));
            }
            seen[v] = true;
        }
        Ok(EmissionOrdering { order })
    }

    pub fn identity(n: usize) -> Self {
        EmissionOrdering {
            order: (0..n).collect(),
        }
    }

    /// From a 1-based emission sequence, e.g. `[1, 2, 3, 6, 5, 4]`.
    pub fn from_one_based(seq: &[usize]) -> Result<Self, GraphError> {
        if seq.contains(&0) {
            return Err(GraphError::BadOrdering("labels are 1-based".into()));
        }
        Self::new(seq.iter().map(|v| v - 1).collect())
    }

    /// From 1-based emission times per vertex: `times[v]` is when vertex
    /// `v + 1` is emitted. This is the labelling obtained by writing emission
    /// times onto the vertices of a drawn graph.
    pub fn from_vertex_times(times: &[usize]) -> Result<Self, GraphError> {
        Ok(Self::from_one_based(times)?.inverse())
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The inverse permutation: emission time (0-based) of each vertex.
    pub fn inverse(&self) -> EmissionOrdering {
        let mut inv = vec![0; self.order.len()];
        for (k, &v) in self.order.iter().enumerate() {
            inv[v] = k;
        }
        EmissionOrdering { order: inv }
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.order.iter().map(|v| v + 1).collect()
    }

    /// `sigma ∘ self`: the same schedule after relabelling vertices by `sigma`.
    pub fn relabeled(&self, sigma: &[usize]) -> EmissionOrdering {
        EmissionOrdering {
            order: self.order.iter().map(|&v| sigma[v]).collect(),
        }
    }

    /// Lexicographically smallest member of this ordering's orbit.
    pub fn canonical_under(&self, group: &AutomorphismGroup) -> EmissionOrdering {
        group
            .elements()
            .iter()
            .map(|s| self.relabeled(s))
            .min()
            .unwrap_or_else(|| self.clone())
    }
}

impl fmt::Display for EmissionOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.order.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        f.write_str("]")
    }
}

/// Streams one representative per automorphism orbit of emission orderings:
/// the lexicographically smallest `sigma ∘ o`. Output is in increasing
/// lexicographic order.
///
/// Backtracks over prefixes while tracking the group elements that fix the
/// prefix pointwise. Extending by `v` is pruned when such an element maps
/// `v` below itself; elements mapping `v` above itself can never produce a
/// smaller ordering again and are dropped.
pub struct CanonicalOrderings<'g> {
    group: &'g [Perm],
    n: usize,
    root_len: usize,
    prefix: Vec<usize>,
    used: u64,
    /// `tied[d]`: indices of elements fixing `prefix[..d]` pointwise.
    tied: Vec<Vec<u32>>,
    next_candidate: Vec<usize>,
    done: bool,
}

impl<'g> CanonicalOrderings<'g> {
    pub fn new(group: &'g AutomorphismGroup) -> Self {
        Self::from_prefix(group, &[]).expect("empty prefix is always viable")
    }

    /// Stream restricted to orderings beginning with `prefix`; `None` when no
    /// canonical ordering has that prefix.
    pub fn from_prefix(group: &'g AutomorphismGroup, prefix: &[usize]) -> Option<Self> {
        let n = group.n_vertices();
        let mut tied: Vec<u32> = (0..group.size() as u32).collect();
        let mut used = 0u64;
        let mut levels = vec![];
        for &v in prefix {
            if v >= n || used >> v & 1 == 1 {
                return None;
            }
            levels.push(tied.clone());
            tied = refine(group.elements(), &tied, v)?;
            used |= 1 << v;
        }
        levels.push(tied);
        let mut next_candidate = vec![0; n + 1];
        next_candidate.truncate(n + 1);
        Some(CanonicalOrderings {
            group: group.elements(),
            n,
            root_len: prefix.len(),
            prefix: prefix.to_vec(),
            used,
            tied: levels,
            next_candidate,
            done: false,
        })
    }

    /// Canonical prefixes of length `depth`, in lexicographic order. Their
    /// streams partition the full stream.
    pub fn prefixes(group: &AutomorphismGroup, depth: usize) -> Vec<Vec<usize>> {
        let n = group.n_vertices();
        let depth = depth.min(n);
        let mut out = Vec::new();
        let all: Vec<u32> = (0..group.size() as u32).collect();
        fn rec(
            g: &[Perm],
            n: usize,
            depth: usize,
            prefix: &mut Vec<usize>,
            used: u64,
            tied: &[u32],
            out: &mut Vec<Vec<usize>>,
        ) {
            if prefix.len() == depth {
                out.push(prefix.clone());
                return;
            }
            for v in 0..n {
                if used >> v & 1 == 1 {
                    continue;
                }
                if let Some(next) = refine(g, tied, v) {
                    prefix.push(v);
                    rec(g, n, depth, prefix, used | 1 << v, &next, out);
                    prefix.pop();
                }
            }
        }
        rec(
            group.elements(),
            n,
            depth,
            &mut Vec::new(),
            0,
            &all,
            &mut out,
        );
        out
    }
}

/// Elements of `tied` that still fix the prefix after appending `v`, or
/// `None` if one of them proves the extension non-canonical.
#[inline]
fn refine(group: &[Perm], tied: &[u32], v: usize) -> Option<Vec<u32>> {
    let mut next = Vec::with_capacity(tied.len());
    for &s in tied {
        let img = group[s as usize][v];
        if img < v {
            return None;
        }
        if img == v {
            next.push(s);
        }
    }
    Some(next)
}

impl Iterator for CanonicalOrderings<'_> {
    type Item = EmissionOrdering;

    fn next(&mut self) -> Option<EmissionOrdering> {
        if self.done {
            return None;
        }
        loop {
            let d = self.prefix.len();
            if d == self.n {
                let out = EmissionOrdering {
                    order: self.prefix.clone(),
                };
                self.backtrack();
                return Some(out);
            }
            let mut advanced = false;
            while self.next_candidate[d] < self.n {
                let v = self.next_candidate[d];
                self.next_candidate[d] += 1;
                if self.used >> v & 1 == 1 {
                    continue;
                }
                if let Some(next) = refine(self.group, &self.tied[d], v) {
                    self.prefix.push(v);
                    self.used |= 1 << v;
                    self.tied.truncate(d + 1);
                    self.tied.push(next);
                    self.next_candidate[d + 1] = 0;
                    advanced = true;
                    break;
                }
            }
            if !advanced && !self.backtrack() {
                return None;
            }
        }
    }
}

impl CanonicalOrderings<'_> {
    /// Pops one level; false once the root prefix is exhausted.
    fn backtrack(&mut self) -> bool {
        if self.prefix.len() <= self.root_len {
            self.done = true;
            return false;
        }
        let v = self.prefix.pop().unwrap();
        self.used &= !(1 << v);
        self.tied.truncate(self.prefix.len() + 1);
        true
    }
}

/// Where each leaf goes relative to its core when lifting a core ordering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiftMode {
    LeavesAfter,
    LeavesBefore,
}

impl LiftMode {
    pub const BOTH: [LiftMode; 2] = [LiftMode::LeavesAfter, LiftMode::LeavesBefore];

    pub fn name(self) -> &'static str {
        match self {
            LiftMode::LeavesAfter => "leaves_after",
            LiftMode::LeavesBefore => "leaves_before",
        }
    }
}

/// Expands an ordering of the truncated core into one of the full encoded
/// graph by emitting each core's leaf right after (or right before) it.
pub fn lift_ordering(
    core_ordering: &EmissionOrdering,
    full: &Graph,
    mode: LiftMode,
) -> Result<EmissionOrdering, GraphError> {
    let before_mask = match mode {
        LiftMode::LeavesAfter => 0,
        LiftMode::LeavesBefore => u64::MAX,
    };
    lift_with_mask(core_ordering, full, before_mask)
}

/// Per-core lift: bit `k` of `before_mask` puts the leaf of the `k`-th emitted
/// core in front of it.
pub fn lift_with_mask(
    core_ordering: &EmissionOrdering,
    full: &Graph,
    before_mask: u64,
) -> Result<EmissionOrdering, GraphError> {
    let core = truncate_leaves(full)?;
    if core_ordering.len() != core.to_full.len() || core.to_full.len() * 2 != full.n_vertices() {
        return Err(GraphError::BadOrdering(
            "core ordering does not match the encoded graph".into(),
        ));
    }
    let mut order = Vec::with_capacity(full.n_vertices());
    for (k, &c) in core_ordering.order().iter().enumerate() {
        let (cv, lv) = (core.to_full[c], core.leaf_of[c]);
        if before_mask >> k & 1 == 1 {
            order.extend([lv, cv]);
        } else {
            order.extend([cv, lv]);
        }
    }
    EmissionOrdering::new(order)
}
