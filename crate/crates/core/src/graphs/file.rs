//! Graph documents: TOML with 1-based vertex labels.
//!
//! ```toml
//! n = 4
//! edges = [[1, 2], [2, 3]]
//! hadamards = [4]
//! leaf_map = [[3, 4]]
//! ```
//!
//! Only `n` and `edges` are required.

use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::GraphError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    hadamards: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    leaf_map: Option<Vec<[usize; 2]>>,
}

fn zero_based(v: usize) -> Result<usize, GraphError> {
    v.checked_sub(1)
        .ok_or_else(|| GraphError::Parse("vertex labels are 1-based".into()))
}

pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let doc: GraphDoc = toml::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
    let mut g = Graph::empty(doc.n)?;
    for [a, b] in doc.edges {
        g.add_edge(zero_based(a)?, zero_based(b)?)?;
    }
    for h in doc.hadamards {
        g.set_hadamard(zero_based(h)?)?;
    }
    if let Some(pairs) = doc.leaf_map {
        let pairs = pairs
            .into_iter()
            .map(|[c, l]| Ok((zero_based(c)?, zero_based(l)?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        g.set_leaf_map(pairs)?;
    }
    Ok(g)
}

pub fn write_graph(g: &Graph) -> String {
    let doc = GraphDoc {
        n: g.n_vertices(),
        edges: g.edges().into_iter().map(|(a, b)| [a + 1, b + 1]).collect(),
        hadamards: g.hadamards().into_iter().map(|v| v + 1).collect(),
        leaf_map: g
            .leaf_map()
            .map(|p| p.iter().map(|&(c, l)| [c + 1, l + 1]).collect()),
    };
    // inline arrays keep one document per graph readable
    let mut out = format!("n = {}\n", doc.n);
    out.push_str(&format!("edges = {}\n", pairs_inline(&doc.edges)));
    if !doc.hadamards.is_empty() {
        let hs: Vec<String> = doc.hadamards.iter().map(|h| h.to_string()).collect();
        out.push_str(&format!("hadamards = [{}]\n", hs.join(", ")));
    }
    if let Some(lm) = &doc.leaf_map {
        out.push_str(&format!("leaf_map = {}\n", pairs_inline(lm)));
    }
    out
}

fn pairs_inline(pairs: &[[usize; 2]]) -> String {
    let items: Vec<String> = pairs.iter().map(|[a, b]| format!("[{a}, {b}]")).collect();
    format!("[{}]", items.join(", "))
}
