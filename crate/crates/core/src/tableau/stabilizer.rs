use std::fmt;

use rand::Rng;

use super::pauli::{PauliString, MAX_QUBITS};
use super::TableauError;

/// A Clifford gate acting on the qubits of a [`Tableau`]. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clifford {
    H(usize),
    S(usize),
    X(usize),
    Z(usize),
    Cz(usize, usize),
    Cnot { control: usize, target: usize },
}

/// Outcome of a computational-basis measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measurement {
    pub outcome: bool,
    pub deterministic: bool,
}

/// Stabilizer generators of a pure n-qubit state.
///
/// Rows are bit-packed [`PauliString`]s; generator multiplication is a pair of
/// word XORs plus a popcount phase update.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliString>,
}

impl Tableau {
    /// `|0...0>` on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self, TableauError> {
        check_size(n)?;
        Ok(Tableau {
            n,
            rows: (0..n).map(PauliString::z).collect(),
        })
    }

    /// Builds a tableau from explicit generators, rejecting sets that are not
    /// a valid pure stabilizer state.
    pub fn from_generators(n: usize, rows: Vec<PauliString>) -> Result<Self, TableauError> {
        check_size(n)?;
        if rows.len() != n {
            return Err(TableauError::WrongGeneratorCount {
                expected: n,
                found: rows.len(),
            });
        }
        let mask = qubit_mask(n);
        if let Some(r) = rows.iter().find(|r| r.support() & !mask != 0) {
            return Err(TableauError::Inconsistent(format!(
                "generator {r} acts outside {n} qubits"
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.phase % 2 != 0) {
            return Err(TableauError::Inconsistent(format!(
                "generator {r} is not Hermitian"
            )));
        }
        let t = Tableau { n, rows };
        t.check_valid()?;
        Ok(t)
    }

    /// Parses whitespace-separated generator strings (`"+XX -ZZ"`).
    pub fn parse(s: &str) -> Result<Self, TableauError> {
        let words: Vec<&str> = s.split_whitespace().collect();
        let rows = words
            .iter()
            .map(|w| {
                PauliString::parse(w)
                    .ok_or_else(|| TableauError::Inconsistent(format!("bad generator {w}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let n = words
            .iter()
            .map(|w| w.trim_start_matches(['+', '-']).len())
            .max()
            .unwrap_or(0);
        Self::from_generators(n, rows)
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn generators(&self) -> &[PauliString] {
        &self.rows
    }

    pub(crate) fn rows_mut(&mut self) -> &mut [PauliString] {
        &mut self.rows
    }

    /// Verifies mutual commutation, independence and Hermiticity.
    pub fn check_valid(&self) -> Result<(), TableauError> {
        for (i, a) in self.rows.iter().enumerate() {
            if a.phase % 2 != 0 {
                return Err(TableauError::Inconsistent(format!(
                    "generator {i} has imaginary phase"
                )));
            }
            for b in &self.rows[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(TableauError::Inconsistent(format!(
                        "generators {} and {} anticommute",
                        a.to_string_n(self.n),
                        b.to_string_n(self.n)
                    )));
                }
            }
        }
        if symplectic_rank(&self.rows) != self.n {
            return Err(TableauError::Inconsistent(
                "generators are not independent".into(),
            ));
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<(), TableauError> {
        if q >= self.n {
            Err(TableauError::QubitOutOfRange {
                qubit: q,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    /// Conjugates every generator by `gate`.
    pub fn apply(&mut self, gate: Clifford) -> Result<(), TableauError> {
        match gate {
            Clifford::H(q) | Clifford::S(q) | Clifford::X(q) | Clifford::Z(q) => {
                self.check_qubit(q)?
            }
            Clifford::Cz(a, b)
            | Clifford::Cnot {
                control: a,
                target: b,
            } => {
                self.check_qubit(a)?;
                self.check_qubit(b)?;
                if a == b {
                    return Err(TableauError::RepeatedQubit(a));
                }
            }
        }
        self.apply_unchecked(gate);
        debug_assert!(self.check_valid().is_ok());
        Ok(())
    }

    #[inline]
    pub(crate) fn apply_unchecked(&mut self, gate: Clifford) {
        match gate {
            Clifford::H(q) => self.h(q),
            Clifford::S(q) => self.s(q),
            Clifford::X(q) => self.pauli_x(q),
            Clifford::Z(q) => self.pauli_z(q),
            Clifford::Cz(a, b) => self.cz(a, b),
            Clifford::Cnot { control, target } => self.cnot(control, target),
        }
    }

    #[inline]
    pub(crate) fn h(&mut self, q: usize) {
        for r in &mut self.rows {
            let x = r.x >> q & 1;
            let z = r.z >> q & 1;
            if x & z == 1 {
                r.phase ^= 2;
            }
            if x != z {
                r.x ^= 1 << q;
                r.z ^= 1 << q;
            }
        }
    }

    #[inline]
    pub(crate) fn s(&mut self, q: usize) {
        for r in &mut self.rows {
            let x = r.x >> q & 1;
            if x & (r.z >> q) & 1 == 1 {
                r.phase ^= 2;
            }
            r.z ^= x << q;
        }
    }

    #[inline]
    pub(crate) fn pauli_x(&mut self, q: usize) {
        for r in &mut self.rows {
            if r.z >> q & 1 == 1 {
                r.phase ^= 2;
            }
        }
    }

    #[inline]
    pub(crate) fn pauli_z(&mut self, q: usize) {
        for r in &mut self.rows {
            if r.x >> q & 1 == 1 {
                r.phase ^= 2;
            }
        }
    }

    #[inline]
    pub(crate) fn cnot(&mut self, c: usize, t: usize) {
        for r in &mut self.rows {
            let xc = r.x >> c & 1;
            let zc = r.z >> c & 1;
            let xt = r.x >> t & 1;
            let zt = r.z >> t & 1;
            if xc & zt & (xt ^ zc ^ 1) == 1 {
                r.phase ^= 2;
            }
            r.x ^= xc << t;
            r.z ^= zt << c;
        }
    }

    #[inline]
    pub(crate) fn cz(&mut self, a: usize, b: usize) {
        for r in &mut self.rows {
            let xa = r.x >> a & 1;
            let za = r.z >> a & 1;
            let xb = r.x >> b & 1;
            let zb = r.z >> b & 1;
            if xa & xb & (za ^ zb) == 1 {
                r.phase ^= 2;
            }
            r.z ^= xb << a;
            r.z ^= xa << b;
        }
    }

    /// Photon emission: a CNOT from `emitter` onto a photon that must still be
    /// in `|0>`.
    pub fn emit(&mut self, emitter: usize, photon: usize) -> Result<(), TableauError> {
        self.check_qubit(emitter)?;
        self.check_qubit(photon)?;
        if emitter == photon {
            return Err(TableauError::RepeatedQubit(emitter));
        }
        if !self.stabilizes(&PauliString::z(photon)) {
            return Err(TableauError::PhotonNotFresh(photon));
        }
        self.cnot(emitter, photon);
        Ok(())
    }

    /// Whether `p` (with its sign) belongs to the stabilizer group.
    pub fn stabilizes(&self, p: &PauliString) -> bool {
        if self.rows.iter().any(|r| !r.commutes_with(p)) {
            return false;
        }
        matches!(self.express(p), Some(prod) if prod.phase == p.phase)
    }

    /// Finds the product of generators equal to `±target`, assuming `target`
    /// commutes with the whole group. Returns that product.
    fn express(&self, target: &PauliString) -> Option<PauliString> {
        let reduced = self.to_rref_natural();
        let mut remaining = (target.x, target.z);
        let mut acc = PauliString::IDENTITY;
        for row in reduced.rows.iter() {
            let (col_x, col) = pivot_column(row);
            let hit = if col_x {
                remaining.0 >> col & 1 == 1
            } else {
                remaining.1 >> col & 1 == 1
            };
            if hit {
                acc = acc.mul(row);
                remaining.0 ^= row.x;
                remaining.1 ^= row.z;
            }
        }
        (remaining == (0, 0)).then_some(acc)
    }

    /// Z-basis measurement of qubit `q`.
    ///
    /// A deterministic outcome leaves the state unchanged and ignores both
    /// `forced` and `rng`. A random outcome uses `forced` when given and
    /// otherwise draws one bit from `rng`.
    pub fn measure_z<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        forced: Option<bool>,
        rng: &mut R,
    ) -> Result<Measurement, TableauError> {
        self.check_qubit(q)?;
        let anti = self.rows.iter().position(|r| r.x >> q & 1 == 1);
        let Some(p) = anti else {
            let prod = self
                .express(&PauliString::z(q))
                .ok_or_else(|| TableauError::Inconsistent("Z not in stabilizer group".into()))?;
            return Ok(Measurement {
                outcome: prod.is_negative(),
                deterministic: true,
            });
        };
        let outcome = forced.unwrap_or_else(|| rng.gen());
        let pivot = self.rows[p];
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != p && r.x >> q & 1 == 1 {
                *r = r.mul(&pivot);
            }
        }
        let mut zq = PauliString::z(q);
        if outcome {
            zq.phase = 2;
        }
        self.rows[p] = zq;
        debug_assert!(self.check_valid().is_ok());
        Ok(Measurement {
            outcome,
            deterministic: false,
        })
    }

    /// Reduced row-echelon gauge with respect to the natural qubit order.
    ///
    /// Columns are eliminated in the order `x_0, z_0, x_1, z_1, ...`, and every
    /// pivot column is cleared from all other rows. At most two generators
    /// share a leftmost index; when they do, the first leads with `X` and the
    /// second with `Z`. The result depends only on the stabilizer group.
    pub fn to_rref_natural(&self) -> Tableau {
        let mut t = self.clone();
        t.rref_in_place();
        t
    }

    pub(crate) fn rref_in_place(&mut self) {
        rref_rows(&mut self.rows, self.n);
    }

    pub(crate) fn echelon_in_place(&mut self) {
        echelon_rows(&mut self.rows, self.n);
    }

    /// RREF gauge with respect to `order`: `order[k]` is the qubit placed at
    /// position `k`. Returned generators keep the original qubit labels.
    pub fn to_rref(&self, order: &[usize]) -> Result<Tableau, TableauError> {
        check_permutation(order, self.n)?;
        if order.iter().enumerate().all(|(k, &q)| k == q) {
            return Ok(self.to_rref_natural());
        }
        let mut inverse = vec![0; self.n];
        for (k, &q) in order.iter().enumerate() {
            inverse[q] = k;
        }
        let mut rows: Vec<_> = self.rows.iter().map(|r| r.permuted(order)).collect();
        rref_rows(&mut rows, self.n);
        Ok(Tableau {
            n: self.n,
            rows: rows.iter().map(|r| r.permuted(&inverse)).collect(),
        })
    }

    /// Unique generator list for the state: `to_rref` in natural order.
    pub fn canonical(&self) -> Tableau {
        self.to_rref_natural()
    }

    /// Height function over positions `0..=n` of `order`.
    pub fn height(&self, order: &[usize]) -> Result<HeightProfile, TableauError> {
        check_permutation(order, self.n)?;
        let mut position = vec![0; self.n];
        for (k, &q) in order.iter().enumerate() {
            position[q] = k;
        }
        let rref = self.to_rref(order)?;
        let leftmost: Vec<usize> = rref
            .rows
            .iter()
            .map(|r| {
                let mut s = r.support();
                let mut best = usize::MAX;
                while s != 0 {
                    let q = s.trailing_zeros() as usize;
                    best = best.min(position[q]);
                    s &= s - 1;
                }
                best + 1
            })
            .collect();
        Ok(HeightProfile::from_leftmost(self.n, &leftmost))
    }

    /// Height function in natural qubit order.
    pub fn height_natural(&self) -> HeightProfile {
        let rref = self.to_rref_natural();
        let leftmost: Vec<usize> = rref
            .rows
            .iter()
            .map(|r| r.leftmost().map_or(usize::MAX, |l| l + 1))
            .collect();
        HeightProfile::from_leftmost(self.n, &leftmost)
    }

    /// Appends `k` qubits in `|0>`.
    pub fn extend_zero(&mut self, k: usize) -> Result<(), TableauError> {
        check_size(self.n + k)?;
        for q in self.n..self.n + k {
            self.rows.push(PauliString::z(q));
        }
        self.n += k;
        Ok(())
    }
}

impl fmt::Debug for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.rows.iter().map(|r| r.to_string_n(self.n)).collect();
        write!(f, "Tableau[{}]", gens.join(", "))
    }
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{}", r.to_string_n(self.n))?;
        }
        Ok(())
    }
}

/// Bipartite entanglement profile `h(0), ..., h(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightProfile {
    values: Vec<usize>,
}

impl HeightProfile {
    /// `h(x) = (n - x) - |{g : l(g) > x}|`, with 1-based leftmost positions.
    fn from_leftmost(n: usize, leftmost: &[usize]) -> Self {
        let mut count_at = vec![0usize; n + 2];
        for &l in leftmost {
            count_at[l.min(n + 1)] += 1;
        }
        let mut values = Vec::with_capacity(n + 1);
        let mut above = leftmost.len();
        for (x, &c) in count_at.iter().enumerate().take(n + 1) {
            above -= c;
            values.push((n - x).saturating_sub(above));
        }
        HeightProfile { values }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn max(&self) -> usize {
        self.values.iter().copied().max().unwrap_or(0)
    }
}

pub(crate) fn qubit_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_size(n: usize) -> Result<(), TableauError> {
    if n == 0 {
        Err(TableauError::Empty)
    } else if n > MAX_QUBITS {
        Err(TableauError::TooManyQubits(n))
    } else {
        Ok(())
    }
}

fn check_permutation(order: &[usize], n: usize) -> Result<(), TableauError> {
    let mut seen = 0u64;
    if order.len() != n {
        return Err(TableauError::BadOrder);
    }
    for &q in order {
        if q >= n || seen >> q & 1 == 1 {
            return Err(TableauError::BadOrder);
        }
        seen |= 1 << q;
    }
    Ok(())
}

/// `(is_x_column, qubit)` of a row's first set bit in `x_0, z_0, x_1, ...`.
#[inline]
fn pivot_column(row: &PauliString) -> (bool, usize) {
    let q = row.support().trailing_zeros() as usize;
    (row.x >> q & 1 == 1, q)
}

pub(crate) fn rref_rows(rows: &mut [PauliString], n: usize) {
    eliminate(rows, n, true);
}

/// Row echelon form without back-substitution: pivot columns are cleared
/// only below their pivot row.
pub(crate) fn echelon_rows(rows: &mut [PauliString], n: usize) {
    eliminate(rows, n, false);
}

fn eliminate(rows: &mut [PauliString], n: usize, reduce: bool) {
    let mut top = 0;
    for q in 0..n {
        if top == rows.len() {
            break;
        }
        let bit = 1u64 << q;
        for x_column in [true, false] {
            let has = |r: &PauliString| {
                if x_column {
                    r.x & bit != 0
                } else {
                    r.z & bit != 0
                }
            };
            let Some(p) = (top..rows.len()).find(|&i| has(&rows[i])) else {
                continue;
            };
            rows.swap(top, p);
            let pivot = rows[top];
            for (i, r) in rows.iter_mut().enumerate() {
                if (i > top || (reduce && i < top)) && has(r) {
                    *r = r.mul(&pivot);
                }
            }
            top += 1;
            if top == rows.len() {
                break;
            }
        }
    }
}

/// GF(2) rank of the symplectic vectors of `rows`.
pub(crate) fn symplectic_rank(rows: &[PauliString]) -> usize {
    let mut v: Vec<u128> = rows
        .iter()
        .map(|r| (r.x as u128) | ((r.z as u128) << 64))
        .collect();
    let mut rank = 0;
    for bit in 0..128 {
        let m = 1u128 << bit;
        let Some(p) = (rank..v.len()).find(|&i| v[i] & m != 0) else {
            continue;
        };
        v.swap(rank, p);
        let pv = v[rank];
        for (i, w) in v.iter_mut().enumerate() {
            if i != rank && *w & m != 0 {
                *w ^= pv;
            }
        }
        rank += 1;
    }
    rank
}
