use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{SearchError, SearchOutcome};
use crate::graphs::EmissionOrdering;
use crate::solver::SolveOptions;

/// Representatives kept per histogram cell.
pub const MAX_REPRESENTATIVES: usize = 16;

/// `(emitters, cnots)`.
pub type CellKey = (usize, usize);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cell {
    pub count: u64,
    /// Lexicographically smallest orderings seen in this cell, sorted.
    pub representatives: Vec<EmissionOrdering>,
}

impl Cell {
    fn offer(&mut self, o: &EmissionOrdering) {
        let reps = &mut self.representatives;
        if reps.len() == MAX_REPRESENTATIVES && reps.last().is_some_and(|last| o >= last) {
            return;
        }
        if let Err(at) = reps.binary_search(o) {
            reps.insert(at, o.clone());
            reps.truncate(MAX_REPRESENTATIVES);
        }
    }
}

/// Ordering counts per `(emitters, cnots)` cell. Merging is associative and
/// commutative, so results do not depend on how work was split.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Histogram {
    cells: BTreeMap<CellKey, Cell>,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: CellKey, o: &EmissionOrdering) {
        let cell = self.cells.entry(key).or_default();
        cell.count += 1;
        cell.offer(o);
    }

    pub fn merge(&mut self, other: Histogram) {
        for (key, cell) in other.cells {
            let mine = self.cells.entry(key).or_default();
            mine.count += cell.count;
            for o in &cell.representatives {
                mine.offer(o);
            }
        }
    }

    pub fn cells(&self) -> &BTreeMap<CellKey, Cell> {
        &self.cells
    }

    pub fn get(&self, key: CellKey) -> Option<&Cell> {
        self.cells.get(&key)
    }

    pub fn total(&self) -> u64 {
        self.cells.values().map(|c| c.count).sum()
    }

    /// Fewest emitters, then fewest CNOTs.
    pub fn best(&self) -> Option<(CellKey, &Cell)> {
        self.cells.iter().next().map(|(k, c)| (*k, c))
    }

    /// Cells not dominated in both emitters and CNOTs, by emitter count.
    pub fn pareto(&self) -> Result<Vec<CellKey>, SearchError> {
        if self.cells.is_empty() {
            return Err(SearchError::EmptyHistogram);
        }
        let mut front: Vec<CellKey> = Vec::new();
        for &(ne, cx) in self.cells.keys() {
            if front.iter().all(|&(_, fcx)| cx < fcx) {
                front.push((ne, cx));
            }
        }
        Ok(front)
    }

    /// Tab-separated `emitters cnots count` with a header line.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("emitters\tcnots\tcount\n");
        for (&(ne, cx), cell) in &self.cells {
            writeln!(s, "{ne}\t{cx}\t{}", cell.count).unwrap();
        }
        s
    }

    /// Reads counts written by [`Histogram::to_tsv`]; representatives are
    /// not part of that format.
    pub fn from_tsv(text: &str) -> Result<Histogram, SearchError> {
        let mut h = Histogram::new();
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("emitters\tcnots\tcount") {
            return Err(SearchError::Format("missing TSV header".into()));
        }
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let parsed: Option<Vec<u64>> = fields.iter().map(|f| f.trim().parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[ne, cx, count]) => {
                    let cell = h.cells.entry((ne as usize, cx as usize)).or_default();
                    cell.count += count;
                }
                _ => {
                    return Err(SearchError::Format(format!(
                        "TSV line {}: expected three integers",
                        i + 2
                    )))
                }
            }
        }
        Ok(h)
    }
}

/// Where a histogram came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph_hash: Option<String>,
    pub solver: SolveOptions,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct CellDoc {
    emitters: usize,
    cnots: usize,
    count: u64,
    /// 1-based emission sequences.
    representatives: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct CollectedDoc {
    emitters: usize,
    cnots: usize,
    orderings: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct FailureDoc {
    ordering: Vec<usize>,
    message: String,
}

/// JSON form of a search result: provenance, tallies and histogram cells
/// with 1-based representative orderings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramDoc {
    pub provenance: Provenance,
    pub evaluated: u64,
    #[serde(default)]
    pub verified: u64,
    #[serde(default)]
    pub verify_failures: u64,
    #[serde(default)]
    pub bound_violations: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    first_failure: Option<FailureDoc>,
    cells: Vec<CellDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    collected: Vec<CollectedDoc>,
}

fn parse_orderings(seqs: &[Vec<usize>]) -> Result<Vec<EmissionOrdering>, SearchError> {
    Ok(seqs
        .iter()
        .map(|r| EmissionOrdering::from_one_based(r))
        .collect::<Result<Vec<_>, _>>()?)
}

impl HistogramDoc {
    pub fn new(provenance: Provenance, outcome: &SearchOutcome) -> HistogramDoc {
        let one_based = |v: &[EmissionOrdering]| v.iter().map(|o| o.to_one_based()).collect();
        HistogramDoc {
            provenance,
            evaluated: outcome.evaluated,
            verified: outcome.verified,
            verify_failures: outcome.verify_failures,
            bound_violations: outcome.bound_violations,
            first_failure: outcome.first_failure.as_ref().map(|(o, m)| FailureDoc {
                ordering: o.to_one_based(),
                message: m.clone(),
            }),
            cells: outcome
                .histogram
                .cells
                .iter()
                .map(|(&(emitters, cnots), c)| CellDoc {
                    emitters,
                    cnots,
                    count: c.count,
                    representatives: one_based(&c.representatives),
                })
                .collect(),
            collected: outcome
                .collected
                .iter()
                .map(|(&(emitters, cnots), v)| CollectedDoc {
                    emitters,
                    cnots,
                    orderings: one_based(v),
                })
                .collect(),
        }
    }

    /// Rebuilds the in-memory result.
    pub fn outcome(&self) -> Result<SearchOutcome, SearchError> {
        let mut histogram = Histogram::new();
        for c in &self.cells {
            histogram.cells.insert(
                (c.emitters, c.cnots),
                Cell {
                    count: c.count,
                    representatives: parse_orderings(&c.representatives)?,
                },
            );
        }
        let mut collected = BTreeMap::new();
        for c in &self.collected {
            collected.insert((c.emitters, c.cnots), parse_orderings(&c.orderings)?);
        }
        let first_failure = match &self.first_failure {
            Some(f) => Some((
                EmissionOrdering::from_one_based(&f.ordering)?,
                f.message.clone(),
            )),
            None => None,
        };
        Ok(SearchOutcome {
            histogram,
            evaluated: self.evaluated,
            verified: self.verified,
            verify_failures: self.verify_failures,
            bound_violations: self.bound_violations,
            first_failure,
            collected,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("histogram documents serialize")
    }

    pub fn from_json(text: &str) -> Result<HistogramDoc, SearchError> {
        serde_json::from_str(text).map_err(|e| SearchError::Format(e.to_string()))
    }
}
