use num_complex::Complex64;

use super::pauli::PauliString;
use super::stabilizer::Tableau;
use super::TableauError;

/// Largest register the state-vector oracle accepts.
pub const DENSE_MAX_QUBITS: usize = 14;

const EPS: f64 = 1e-9;

/// Amplitudes of the state stabilized by `t`. Basis index bit `q` is qubit
/// `q`. The global phase makes the first nonzero amplitude positive real.
pub fn dense_state(t: &Tableau) -> Result<Vec<Complex64>, TableauError> {
    let n = t.n_qubits();
    if n > DENSE_MAX_QUBITS {
        return Err(TableauError::TooManyQubits(n));
    }
    t.check_valid()?;
    let dim = 1usize << n;
    // A generic start vector has nonzero overlap with the target ray.
    let start: Vec<Complex64> = (0..dim)
        .map(|b| Complex64::from_polar(1.0, 0.7 + b as f64 * 2.399_963_229_728_653))
        .collect();
    let mut psi = start;
    let mut scratch = vec![Complex64::new(0.0, 0.0); dim];
    for g in t.generators() {
        apply_pauli(g, &psi, &mut scratch);
        for (a, b) in psi.iter_mut().zip(&scratch) {
            *a = (*a + *b) * 0.5;
        }
    }
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-6 {
        return Err(TableauError::Inconsistent(
            "projection onto stabilizer space vanished".into(),
        ));
    }
    let first = psi
        .iter()
        .copied()
        .find(|a| a.norm() > EPS)
        .expect("nonzero vector");
    let fix = first.conj() / first.norm() / norm;
    for a in &mut psi {
        *a *= fix;
        if a.re.abs() < EPS {
            a.re = 0.0;
        }
        if a.im.abs() < EPS {
            a.im = 0.0;
        }
    }
    Ok(psi)
}

/// `out = g |psi>`.
pub fn apply_pauli(g: &PauliString, psi: &[Complex64], out: &mut [Complex64]) {
    let base = (g.phase as u32 + (g.x & g.z).count_ones()) % 4;
    let unit = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    let x = g.x as usize;
    let z = g.z as usize;
    for (b, &amp) in psi.iter().enumerate() {
        let k = (base + 2 * ((b & z).count_ones() % 2)) % 4;
        out[b ^ x] = unit[k as usize] * amp;
    }
}

/// Whether two state vectors agree up to a global phase.
pub fn equal_up_to_phase(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    (overlap.norm() - (na * nb).sqrt()).abs() < tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[Complex64], b: &[f64]) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(x, y)| (x.re - y).abs() < 1e-9 && x.im.abs() < 1e-9)
    }

    #[test]
    fn single_qubit_zero() {
        let psi = dense_state(&Tableau::parse("Z").unwrap()).unwrap();
        assert!(close(&psi, &[1.0, 0.0]));
        let one = dense_state(&Tableau::parse("-Z").unwrap()).unwrap();
        assert!(close(&one, &[0.0, 1.0]));
    }

    #[test]
    fn bell_pair() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let psi = dense_state(&Tableau::parse("XX ZZ").unwrap()).unwrap();
        assert!(close(&psi, &[r, 0.0, 0.0, r]));
        let minus = dense_state(&Tableau::parse("-XX ZZ").unwrap()).unwrap();
        assert!(close(&minus, &[r, 0.0, 0.0, -r]));
    }

    #[test]
    fn size_limit() {
        let t = Tableau::zero_state(15).unwrap();
        assert_eq!(dense_state(&t), Err(TableauError::TooManyQubits(15)));
    }
}
