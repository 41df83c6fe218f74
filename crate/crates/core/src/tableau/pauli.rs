use std::fmt;

/// Largest register a bit-packed row can address.
pub const MAX_QUBITS: usize = 64;

/// Single-qubit Pauli operator, used when reading or writing one site of a
/// [`PauliString`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// An n-qubit Pauli operator `i^phase * P_0 ⊗ P_1 ⊗ ...` stored as two bit
/// masks. Bit `q` of `x`/`z` describes qubit `q`; `(1, 1)` is `Y`.
///
/// The phase is kept as an exponent of `i` modulo 4 so that products of
/// anticommuting operators compose correctly; stabilizer generators only
/// ever carry `0` or `2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
    pub phase: u8,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString {
        x: 0,
        z: 0,
        phase: 0,
    };

    pub fn single(q: usize, p: Pauli) -> Self {
        let (x, z) = p.bits();
        PauliString {
            x: (x as u64) << q,
            z: (z as u64) << q,
            phase: 0,
        }
    }

    pub fn z(q: usize) -> Self {
        Self::single(q, Pauli::Z)
    }

    pub fn x(q: usize) -> Self {
        Self::single(q, Pauli::X)
    }

    /// Parses strings like `"+XZI"`, `"-YY"` or `"ZZ"`; qubit 0 is leftmost.
    pub fn parse(s: &str) -> Option<Self> {
        let (phase, body) = match s.as_bytes().first()? {
            b'+' => (0, &s[1..]),
            b'-' => (2, &s[1..]),
            _ => (0, s),
        };
        if body.len() > MAX_QUBITS {
            return None;
        }
        let mut p = PauliString { x: 0, z: 0, phase };
        for (q, c) in body.chars().enumerate() {
            let pauli = match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return None,
            };
            p.set(q, pauli);
        }
        Some(p)
    }

    #[inline]
    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        let m = 1u64 << q;
        self.x = (self.x & !m) | if x { m } else { 0 };
        self.z = (self.z & !m) | if z { m } else { 0 };
    }

    #[inline]
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    #[inline]
    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    /// Lowest qubit index with a non-identity factor.
    #[inline]
    pub fn leftmost(&self) -> Option<usize> {
        let s = self.support();
        (s != 0).then(|| s.trailing_zeros() as usize)
    }

    #[inline]
    pub fn is_negative(&self) -> bool {
        self.phase == 2
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    #[inline]
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z) ^ (self.z & other.x))
            .count_ones()
            .is_multiple_of(2)
    }

    #[inline]
    pub fn same_operator(&self, other: &PauliString) -> bool {
        self.x == other.x && self.z == other.z
    }

    /// The product `self * rhs`.
    #[inline]
    pub fn mul(&self, rhs: &PauliString) -> PauliString {
        let (x1, z1, x2, z2) = (self.x, self.z, rhs.x, rhs.z);
        let y1 = x1 & z1;
        let xo1 = x1 & !z1;
        let zo1 = z1 & !x1;
        let y2 = x2 & z2;
        let xo2 = x2 & !z2;
        let zo2 = z2 & !x2;
        // XY = iZ, YZ = iX, ZX = iY and the reverses pick up -i.
        let pos = (xo1 & y2) | (y1 & zo2) | (zo1 & xo2);
        let neg = (y1 & xo2) | (xo1 & zo2) | (zo1 & y2);
        let exp = self.phase as i64 + rhs.phase as i64 + pos.count_ones() as i64
            - neg.count_ones() as i64;
        PauliString {
            x: x1 ^ x2,
            z: z1 ^ z2,
            phase: exp.rem_euclid(4) as u8,
        }
    }

    /// Relabels qubit `perm[k]` to `k`.
    pub fn permuted(&self, perm: &[usize]) -> PauliString {
        let mut out = PauliString {
            x: 0,
            z: 0,
            phase: self.phase,
        };
        for (k, &q) in perm.iter().enumerate() {
            out.x |= (self.x >> q & 1) << k;
            out.z |= (self.z >> q & 1) << k;
        }
        out
    }

    /// Writes the operator over `n` qubits, e.g. `+XZZI`.
    pub fn to_string_n(&self, n: usize) -> String {
        let mut s = String::with_capacity(n + 2);
        s.push_str(match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        });
        s.extend((0..n).map(|q| self.get(q).symbol()));
        s
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = (64 - self.support().leading_zeros()) as usize;
        f.write_str(&self.to_string_n(n.max(1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_products() {
        let x = PauliString::x(0);
        let z = PauliString::z(0);
        let y = PauliString::single(0, Pauli::Y);
        // XZ = -iY
        let xz = x.mul(&z);
        assert!(xz.same_operator(&y));
        assert_eq!(xz.phase, 3);
        // ZX = iY
        assert_eq!(z.mul(&x).phase, 1);
        // XY = iZ
        let xy = x.mul(&y);
        assert!(xy.same_operator(&z));
        assert_eq!(xy.phase, 1);
        // YY = I
        assert_eq!(y.mul(&y), PauliString::IDENTITY);
    }

    #[test]
    fn two_qubit_commuting_product() {
        // (XX)(ZZ) = -YY
        let a = PauliString::parse("XX").unwrap();
        let b = PauliString::parse("ZZ").unwrap();
        let c = a.mul(&b);
        assert_eq!(c, PauliString::parse("-YY").unwrap());
        assert!(a.commutes_with(&b));
    }

    #[test]
    fn leftmost_and_weight() {
        let p = PauliString::parse("IIXIZ").unwrap();
        assert_eq!(p.leftmost(), Some(2));
        assert_eq!(p.weight(), 2);
        assert_eq!(PauliString::IDENTITY.leftmost(), None);
        assert_eq!(p.to_string_n(5), "+IIXIZ");
    }

    #[test]
    fn permutation_relabels() {
        let p = PauliString::parse("XIZ").unwrap();
        let q = p.permuted(&[2, 0, 1]);
        assert_eq!(q.to_string_n(3), "+ZXI");
    }
}
