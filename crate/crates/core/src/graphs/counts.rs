//! Closed-form orbit counts `n! / |Aut|` for the ring families.

use num_bigint::BigUint;
use num_traits::One;

use super::GraphError;

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

fn check(n: u64) -> Result<(), GraphError> {
    if n < 3 {
        Err(GraphError::RingTooSmall(n as usize))
    } else {
        Ok(())
    }
}

/// Inequivalent orderings of an `n`-ring: `(n-1)!/2`.
pub fn orbit_count_ring(n: u64) -> Result<BigUint, GraphError> {
    check(n)?;
    Ok(factorial(n - 1) / 2u32)
}

/// Inequivalent orderings of the (2,2)-encoded `n`-ring: `(4n)!/(2n·2^n)`.
pub fn orbit_count_encoded(n: u64) -> Result<BigUint, GraphError> {
    check(n)?;
    Ok(factorial(4 * n) / (BigUint::from(2 * n) << n as usize))
}

/// Inequivalent orderings of the encoded ring's core: `(2n)!/(n·2^(n+1))`.
pub fn orbit_count_core(n: u64) -> Result<BigUint, GraphError> {
    check(n)?;
    Ok(factorial(2 * n) / (BigUint::from(n) << (n as usize + 1)))
}

/// `n! / group_order`, exact.
pub fn orbit_count(n_vertices: u64, group_order: u64) -> BigUint {
    factorial(n_vertices) / group_order
}

/// Scientific notation with `digits` significant digits, e.g. `8.079e20`.
pub fn to_scientific(x: &BigUint, digits: usize) -> String {
    let s = x.to_string();
    if s.len() <= digits {
        return format!("{s}e0");
    }
    let head: u128 = s[..digits + 1].parse().expect("digits");
    let rounded = (head + 5) / 10;
    let mut mant = rounded.to_string();
    let mut exp = s.len() - 1;
    if mant.len() > digits {
        mant.truncate(digits);
        exp += 1;
    }
    let (a, b) = mant.split_at(1);
    if b.is_empty() {
        format!("{a}e{exp}")
    } else {
        format!("{a}.{b}e{exp}")
    }
}
