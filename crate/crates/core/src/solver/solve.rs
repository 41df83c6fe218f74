use serde::{Deserialize, Serialize};

use super::circuit::{Gate, GenerationCircuit};
use super::SolveError;
use crate::graphs::{EmissionOrdering, Graph};
use crate::tableau::{qubit_mask, Pauli, PauliString, Tableau, MAX_QUBITS};

/// Largest generator set searched exhaustively for a minimum-weight product.
const SUBGROUP_LIMIT: usize = 16;

/// How a generator is chosen before it is reduced to a single `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReduceChoice {
    /// Lowest-weight generator of the current RREF, ties to the lowest index.
    Generator,
    /// Lowest-weight element of the subgroup spanned by the eligible
    /// generators.
    Subgroup,
}

/// How the absorbing generator's emitter support is shrunk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsorbChoice {
    /// Take the RREF candidate as is.
    Plain,
    /// Pairwise products with other generators until no product is lighter.
    Greedy,
    /// Lightest product of a candidate with the emitter-only subgroup.
    Subgroup,
}

/// Row gauge recomputed before each photon is absorbed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// Pivot columns cleared from every other row.
    Reduced,
    /// Pivot columns cleared below the pivot only.
    Echelon,
}

/// Which of the (at most two) absorbing candidates is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pick {
    /// Smallest emitter weight after reduction, ties to the first.
    Lightest,
    First,
    Last,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub gauge: Gauge,
    pub absorb: AbsorbChoice,
    pub pick: Pick,
    pub trm: ReduceChoice,
    pub end: ReduceChoice,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            gauge: Gauge::Reduced,
            absorb: AbsorbChoice::Greedy,
            pick: Pick::Lightest,
            trm: ReduceChoice::Generator,
            end: ReduceChoice::Subgroup,
        }
    }
}

/// CNOT tallies of one solve. `cnot_count = absorption + measurement + end`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolveStats {
    pub n_emitters: usize,
    pub cnot_count: usize,
    pub n_trm: usize,
    pub absorption: usize,
    pub measurement: usize,
    pub end: usize,
}

/// Bookkeeping for one photon, taken from the RREF before it is absorbed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepTrace {
    /// 1-based emission time.
    pub time: usize,
    /// Generators whose leftmost position is at most `time`.
    pub a: usize,
    pub trm: bool,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub circuit: GenerationCircuit,
    pub stats: SolveStats,
    pub ordering: EmissionOrdering,
    pub steps: Vec<StepTrace>,
}

/// Maximum height of the target under `ordering`, and at least one.
///
/// An isolated vertex emitted at time `t` needs an emitter in a `Z`
/// eigenstate while `h(t)` emitters hold the entanglement of earlier photons,
/// so it raises the requirement to `h(t) + 1`. Graphs without isolated
/// vertices get the plain maximum height.
pub fn min_emitters(g: &Graph, ordering: &EmissionOrdering) -> Result<usize, SolveError> {
    check_ordering(g, ordering)?;
    Ok(required_emitters(g, ordering, &target_state(g, ordering)))
}

fn required_emitters(g: &Graph, ordering: &EmissionOrdering, target: &Tableau) -> usize {
    let h = target.height_natural();
    let isolated = ordering
        .order()
        .iter()
        .enumerate()
        .filter(|&(_, &v)| g.degree(v) == 0)
        .map(|(k, _)| h.values()[k] + 1);
    isolated.fold(h.max(), usize::max).max(1)
}

pub fn solve(g: &Graph, ordering: &EmissionOrdering) -> Result<Solution, SolveError> {
    solve_with(g, ordering, &SolveOptions::default())
}

pub fn solve_with(
    g: &Graph,
    ordering: &EmissionOrdering,
    opts: &SolveOptions,
) -> Result<Solution, SolveError> {
    check_ordering(g, ordering)?;
    let target = target_state(g, ordering);
    let np = g.n_vertices();
    let ne = required_emitters(g, ordering, &target);
    if np + ne > MAX_QUBITS {
        return Err(SolveError::TooManyQubits {
            photons: np,
            emitters: ne,
        });
    }
    let mut t = target;
    t.extend_zero(ne)?;
    let mut b = Backward {
        t,
        np,
        ne,
        record: Vec::new(),
        stats: SolveStats {
            n_emitters: ne,
            ..SolveStats::default()
        },
        opts: *opts,
    };
    let mut steps = Vec::with_capacity(np);
    for p in (0..np).rev() {
        b.gauge();
        let a =
            b.t.generators()
                .iter()
                .filter(|r| r.leftmost().is_some_and(|l| l <= p))
                .count();
        let time = p + 1;
        debug_assert!(
            time <= a && a <= (2 * time).min(time + ne),
            "a = {a} at j = {time}"
        );
        let trm = !b.has_leftmost(p);
        if trm {
            b.time_reversed_measurement(p)?;
            b.gauge();
            if !b.has_leftmost(p) {
                return Err(SolveError::Internal(format!(
                    "no generator starts at photon {time} after a measurement"
                )));
            }
        }
        steps.push(StepTrace { time, a, trm });
        b.absorb(p)?;
    }
    b.disentangle_emitters()?;
    if b.t.canonical() != Tableau::zero_state(np + ne)?.canonical() {
        return Err(SolveError::Internal(
            "register is not back in |0...0>".into(),
        ));
    }
    let stats = b.stats;
    // the per-measurement bound can fail when a single heavy emitter-only
    // generator remains, so only the other stages are asserted
    debug_assert!(
        stats.cnot_count == stats.absorption + stats.measurement + stats.end
            && stats.absorption as u64
                <= crate::bounds::absorption_bound(np as u64, ne as u64).unwrap_or(0)
            && stats.end as u64 <= crate::bounds::end_bound(ne as u64).unwrap_or(0),
        "{stats:?}"
    );
    steps.reverse();
    let mut gates = b.record;
    gates.reverse();
    Ok(Solution {
        circuit: GenerationCircuit::new(np, ne, gates)?,
        stats,
        ordering: ordering.clone(),
        steps,
    })
}

impl SolveStats {
    /// Whether each stage's CNOT count respects its closed-form bound.
    pub fn within_bounds(&self, n_photons: usize) -> bool {
        let (np, ne, k) = (n_photons as u64, self.n_emitters as u64, self.n_trm as u64);
        let a = crate::bounds::absorption_bound(np, ne).unwrap_or(0);
        let m = crate::bounds::trm_bound(ne, Some(k), None).unwrap_or(0);
        let e = crate::bounds::end_bound(ne).unwrap_or(0);
        self.cnot_count == self.absorption + self.measurement + self.end
            && self.absorption as u64 <= a
            && self.measurement as u64 <= m
            && self.end as u64 <= e
    }
}

fn check_ordering(g: &Graph, ordering: &EmissionOrdering) -> Result<(), SolveError> {
    if ordering.len() != g.n_vertices() {
        return Err(SolveError::OrderingMismatch {
            ordering: ordering.len(),
            graph: g.n_vertices(),
        });
    }
    Ok(())
}

/// Target state with photon `k` being the vertex emitted at time `k + 1`.
fn target_state(g: &Graph, ordering: &EmissionOrdering) -> Tableau {
    g.relabeled(ordering.order()).state()
}

struct Backward {
    t: Tableau,
    np: usize,
    ne: usize,
    /// Forward inverses of the applied gates, in application order.
    record: Vec<Gate>,
    stats: SolveStats,
    opts: SolveOptions,
}

impl Backward {
    fn emitter_mask(&self) -> u64 {
        qubit_mask(self.np + self.ne) & !qubit_mask(self.np)
    }

    fn emitter_weight(&self, r: &PauliString) -> u32 {
        (r.support() & self.emitter_mask()).count_ones()
    }

    fn gauge(&mut self) {
        match self.opts.gauge {
            Gauge::Reduced => self.t.rref_in_place(),
            Gauge::Echelon => self.t.echelon_in_place(),
        }
    }

    fn has_leftmost(&self, p: usize) -> bool {
        self.t.generators().iter().any(|r| r.leftmost() == Some(p))
    }

    fn h(&mut self, q: usize) {
        self.t.h(q);
        self.record.push(Gate::H(q));
    }

    /// Conjugation by `S^dagger`, undone forward by `S`.
    fn s_dagger(&mut self, q: usize) {
        self.t.s(q);
        self.t.pauli_z(q);
        self.record.push(Gate::S(q));
    }

    fn x(&mut self, q: usize) {
        self.t.pauli_x(q);
        self.record.push(Gate::X(q));
    }

    fn cnot(&mut self, control: usize, target: usize) {
        self.t.cnot(control, target);
        self.record.push(Gate::Cnot { control, target });
    }

    /// Local Clifford turning the row's factor on `q` into `Z`.
    fn rotate_to_z(&mut self, row: usize, q: usize) {
        match self.t.generators()[row].get(q) {
            Pauli::X => self.h(q),
            Pauli::Y => {
                self.s_dagger(q);
                self.h(q);
            }
            Pauli::Z | Pauli::I => {}
        }
    }

    /// Turns the emitter part of `row` into `Z_e` on its lowest emitter `e`,
    /// returning `e` and the CNOTs spent. With `fix_sign` the result is `+Z_e`.
    fn collapse_emitters(&mut self, row: usize, fix_sign: bool) -> (usize, usize) {
        let support = self.t.generators()[row].support() & self.emitter_mask();
        debug_assert!(support != 0);
        let mut s = support;
        while s != 0 {
            let q = s.trailing_zeros() as usize;
            self.rotate_to_z(row, q);
            s &= s - 1;
        }
        let e0 = support.trailing_zeros() as usize;
        let mut cnots = 0;
        let mut rest = support & (support - 1);
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            self.cnot(e, e0);
            cnots += 1;
            rest &= rest - 1;
        }
        if fix_sign && self.t.generators()[row].is_negative() {
            self.x(e0);
        }
        (e0, cnots)
    }

    /// Row indices whose support lies on emitters only.
    fn emitter_rows(&self) -> Vec<usize> {
        let em = self.emitter_mask();
        self.t
            .generators()
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_identity() && r.support() & !em == 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rewrites one row among `rows` into the lightest element found under
    /// `choice`, returning its index.
    fn lightest(&mut self, rows: &[usize], choice: ReduceChoice) -> Result<usize, SolveError> {
        if rows.is_empty() {
            return Err(SolveError::Internal("no emitter-only generator".into()));
        }
        let weight = |r: &PauliString| r.weight();
        let best_row = *rows
            .iter()
            .min_by_key(|&&i| (weight(&self.t.generators()[i]), i))
            .unwrap();
        if choice == ReduceChoice::Generator || rows.len() > SUBGROUP_LIMIT {
            return Ok(best_row);
        }
        let gens: Vec<PauliString> = rows.iter().map(|&i| self.t.generators()[i]).collect();
        let (mask, prod) = lightest_product(&gens, None, weight);
        if prod.weight() >= weight(&self.t.generators()[best_row]) {
            return Ok(best_row);
        }
        // the highest member of the product is replaced, keeping a basis
        let slot = rows[63 - mask.leading_zeros() as usize];
        self.t.rows_mut()[slot] = prod;
        Ok(slot)
    }

    fn time_reversed_measurement(&mut self, p: usize) -> Result<(), SolveError> {
        let rows = self.emitter_rows();
        let row = self.lightest(&rows, self.opts.trm)?;
        let (e, cnots) = self.collapse_emitters(row, true);
        debug_assert!(self.t.generators()[row] == PauliString::z(e));
        self.t.h(e);
        self.t.cnot(e, p);
        self.record.push(Gate::Measure {
            emitter: e,
            photon: p,
        });
        self.stats.measurement += cnots;
        self.stats.cnot_count += cnots;
        self.stats.n_trm += 1;
        Ok(())
    }

    fn absorb(&mut self, p: usize) -> Result<(), SolveError> {
        let pbit = 1u64 << p;
        let photons = qubit_mask(self.np);
        let candidates: Vec<usize> = (0..self.t.generators().len())
            .filter(|&i| self.t.generators()[i].leftmost() == Some(p))
            .collect();
        debug_assert!(candidates
            .iter()
            .all(|&i| { self.t.generators()[i].support() & photons == pbit }));
        let mut options = Vec::with_capacity(candidates.len());
        for &c in &candidates {
            let row = self.t.generators()[c];
            let reduced = match self.opts.absorb {
                AbsorbChoice::Plain => row,
                AbsorbChoice::Greedy => self.greedy_reduce(c, pbit),
                AbsorbChoice::Subgroup => {
                    let em_rows: Vec<PauliString> = self
                        .emitter_rows()
                        .iter()
                        .map(|&i| self.t.generators()[i])
                        .collect();
                    if em_rows.len() > SUBGROUP_LIMIT {
                        self.greedy_reduce(c, pbit)
                    } else {
                        let ew = |r: &PauliString| self.emitter_weight(r);
                        lightest_product(&em_rows, Some(row), ew).1
                    }
                }
            };
            options.push((self.emitter_weight(&reduced), c, reduced));
        }
        let chosen = match self.opts.pick {
            Pick::Lightest => options.iter().min_by_key(|(w, c, _)| (*w, *c)),
            Pick::First => options.first(),
            Pick::Last => options.last(),
        };
        let &(_, row, reduced) = chosen
            .ok_or_else(|| SolveError::Internal(format!("photon {} cannot be absorbed", p + 1)))?;
        self.t.rows_mut()[row] = reduced;

        if self.emitter_weight(&reduced) == 0 {
            // product-state photon: borrow an emitter already in a Z eigenstate
            let rows = self.emitter_rows();
            let helper = self.lightest(&rows, self.opts.trm)?;
            let (_, cnots) = self.collapse_emitters(helper, false);
            self.stats.absorption += cnots;
            self.stats.cnot_count += cnots;
            let prod = self.t.generators()[row].mul(&self.t.generators()[helper]);
            self.t.rows_mut()[row] = prod;
        }

        self.rotate_to_z(row, p);
        let (e, cnots) = self.collapse_emitters(row, true);
        self.stats.absorption += cnots;
        self.stats.cnot_count += cnots;
        self.t.cnot(e, p);
        self.record.push(Gate::Emit {
            emitter: e,
            photon: p,
        });
        let zp = self.t.generators()[row];
        debug_assert!(zp == PauliString::z(p), "absorbed row {zp}");
        for (i, r) in self.t.rows_mut().iter_mut().enumerate() {
            if i != row && r.z & pbit != 0 {
                *r = r.mul(&zp);
            }
        }
        Ok(())
    }

    /// Lightest emitter part reachable from row `c` by pairwise products that
    /// keep the photon support at `pbit`.
    fn greedy_reduce(&self, c: usize, pbit: u64) -> PauliString {
        let photons = qubit_mask(self.np);
        let mut cur = self.t.generators()[c];
        loop {
            let mut improved = false;
            for (i, r) in self.t.generators().iter().enumerate() {
                if i == c {
                    continue;
                }
                let prod = cur.mul(r);
                if prod.support() & photons == pbit
                    && self.emitter_weight(&prod) < self.emitter_weight(&cur)
                {
                    cur = prod;
                    improved = true;
                }
            }
            if !improved {
                return cur;
            }
        }
    }

    fn disentangle_emitters(&mut self) -> Result<(), SolveError> {
        let mut done = 0u64;
        let em = self.emitter_mask();
        while done != em {
            self.t.rref_in_place();
            let open: Vec<usize> = self
                .emitter_rows()
                .into_iter()
                .filter(|&i| self.t.generators()[i].support() & done == 0)
                .collect();
            let row = match self.opts.end {
                ReduceChoice::Generator => *open
                    .first()
                    .ok_or_else(|| SolveError::Internal("emitters left entangled".into()))?,
                ReduceChoice::Subgroup => self.lightest(&open, ReduceChoice::Subgroup)?,
            };
            let (e, cnots) = self.collapse_emitters(row, true);
            self.stats.end += cnots;
            self.stats.cnot_count += cnots;
            let ze = self.t.generators()[row];
            debug_assert!(ze == PauliString::z(e));
            let ebit = 1u64 << e;
            for (i, r) in self.t.rows_mut().iter_mut().enumerate() {
                if i != row && r.z & ebit != 0 {
                    *r = r.mul(&ze);
                }
            }
            done |= ebit;
        }
        Ok(())
    }
}

/// Minimum of `weight(base * prod(subset))` over the nonempty subsets of
/// `gens` (all subsets, including the empty one, when `base` is given).
/// Returns the subset mask and the product; ties go to the first mask in
/// Gray-code order.
fn lightest_product<W: Fn(&PauliString) -> u32>(
    gens: &[PauliString],
    base: Option<PauliString>,
    weight: W,
) -> (u64, PauliString) {
    debug_assert!(gens.len() <= SUBGROUP_LIMIT);
    let start = base.unwrap_or(PauliString::IDENTITY);
    let mut cur = start;
    let mut best: Option<(u32, u64, PauliString)> = base.map(|b| (weight(&b), 0, b));
    let mut mask = 0u64;
    for step in 1u64..(1u64 << gens.len()) {
        let flip = step.trailing_zeros() as usize;
        mask ^= 1 << flip;
        cur = cur.mul(&gens[flip]);
        let w = weight(&cur);
        if best.is_none_or(|(bw, _, _)| w < bw) {
            best = Some((w, mask, cur));
        }
    }
    let (_, m, p) = best.expect("at least one generator");
    (m, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{path, ring};

    #[test]
    fn lightest_product_finds_minimum() {
        let gens = [
            PauliString::parse("+XXX").unwrap(),
            PauliString::parse("+ZZI").unwrap(),
            PauliString::parse("+IZZ").unwrap(),
        ];
        let (mask, p) = lightest_product(&gens, None, |r| r.weight());
        assert_eq!(p.weight(), 2);
        assert_eq!(mask, 0b010);
    }

    #[test]
    fn path_needs_one_emitter() {
        let g = path(5).unwrap();
        let sol = solve(&g, &EmissionOrdering::identity(5)).unwrap();
        assert_eq!(sol.stats.n_emitters, 1);
        assert_eq!(sol.stats.cnot_count, 0);
        assert_eq!(sol.circuit.n_photons(), 5);
    }

    #[test]
    fn ring_natural_order() {
        let g = ring(6).unwrap();
        let o = EmissionOrdering::identity(6);
        assert_eq!(min_emitters(&g, &o).unwrap(), 2);
        let sol = solve(&g, &o).unwrap();
        let s = sol.stats;
        assert_eq!(s.cnot_count, s.absorption + s.measurement + s.end);
        assert_eq!(sol.circuit.cnot_count(), s.cnot_count);
        assert_eq!(sol.circuit.measurement_count(), s.n_trm);
        assert_eq!(sol.steps.len(), 6);
    }

    #[test]
    fn isolated_vertex_inside_an_entangled_block_needs_a_spare_emitter() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let o = EmissionOrdering::new(vec![0, 2, 1]).unwrap();
        assert_eq!(min_emitters(&g, &o).unwrap(), 2);
        let sol = solve(&g, &o).unwrap();
        assert!(
            crate::solver::verify(&sol.circuit, &g, &o, 0, 4)
                .unwrap()
                .passed
        );
        let last = EmissionOrdering::new(vec![0, 1, 2]).unwrap();
        assert_eq!(min_emitters(&g, &last).unwrap(), 1);
    }

    #[test]
    fn ordering_length_mismatch() {
        let g = ring(4).unwrap();
        assert!(matches!(
            solve(&g, &EmissionOrdering::identity(5)),
            Err(SolveError::OrderingMismatch { .. })
        ));
    }
}
