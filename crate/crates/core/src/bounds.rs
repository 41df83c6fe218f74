//! Upper bounds on emitter-emitter CNOTs spent by the time-reversed solver.
//!
//! The budget splits into photon absorption (`A`), time-reversed measurements
//! (`M`) and the final emitter disentangling (`E`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("{0} must be at least 1")]
    Zero(&'static str),
    #[error("the TRM-agnostic bound needs a photon count")]
    MissingPhotonCount,
}

/// `A <= floor(np * ne / 2)`.
pub fn absorption_bound(np: u64, ne: u64) -> Result<u64, BoundsError> {
    nonzero(np, "np")?;
    nonzero(ne, "ne")?;
    Ok(np * ne / 2)
}

/// `M <= n_trm * floor(ne / 2)`, or `np * floor(ne / 2)` when the TRM count
/// is not known.
pub fn trm_bound(ne: u64, n_trm: Option<u64>, np: Option<u64>) -> Result<u64, BoundsError> {
    nonzero(ne, "ne")?;
    let steps = match (n_trm, np) {
        (Some(k), _) => k,
        (None, Some(np)) => np,
        (None, None) => return Err(BoundsError::MissingPhotonCount),
    };
    Ok(steps * (ne / 2))
}

/// `E <= ne(ne+1)/2 - floor((ne+1)^2 / 4)`.
pub fn end_bound(ne: u64) -> Result<u64, BoundsError> {
    nonzero(ne, "ne")?;
    Ok(ne * (ne + 1) / 2 - (ne + 1) * (ne + 1) / 4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrmMode {
    TrmExact,
    TrmAgnostic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub np: u64,
    pub ne: u64,
    pub n_trm: Option<u64>,
    pub a_bound: u64,
    pub m_bound: u64,
    pub e_bound: u64,
    pub total: u64,
    pub m_mode: TrmMode,
}

pub fn total_bound(np: u64, ne: u64, n_trm: Option<u64>) -> Result<BoundReport, BoundsError> {
    let a_bound = absorption_bound(np, ne)?;
    let m_bound = trm_bound(ne, n_trm, Some(np))?;
    let e_bound = end_bound(ne)?;
    Ok(BoundReport {
        np,
        ne,
        n_trm,
        a_bound,
        m_bound,
        e_bound,
        total: a_bound + m_bound + e_bound,
        m_mode: if n_trm.is_some() {
            TrmMode::TrmExact
        } else {
            TrmMode::TrmAgnostic
        },
    })
}

impl BoundReport {
    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        let n_trm = self
            .n_trm
            .map_or_else(|| "none".to_string(), |k| k.to_string());
        let mode = match self.m_mode {
            TrmMode::TrmExact => "trm_exact",
            TrmMode::TrmAgnostic => "trm_agnostic",
        };
        format!(
            "np = {}\nne = {}\nn_trm = {}\nm_mode = {}\na_bound = {}\nm_bound = {}\ne_bound = {}\ntotal = {}\n",
            self.np, self.ne, n_trm, mode, self.a_bound, self.m_bound, self.e_bound, self.total
        )
    }
}

fn nonzero(v: u64, name: &'static str) -> Result<(), BoundsError> {
    if v == 0 {
        Err(BoundsError::Zero(name))
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn component_values() {
        assert_eq!(absorption_bound(6, 2), Ok(6));
        assert_eq!(absorption_bound(24, 3), Ok(36));
        assert_eq!(absorption_bound(1, 1), Ok(0));
        assert_eq!(trm_bound(2, None, Some(6)), Ok(6));
        assert_eq!(trm_bound(3, None, Some(24)), Ok(24));
        assert_eq!(trm_bound(5, Some(0), None), Ok(0));
        assert_eq!(
            trm_bound(2, None, None),
            Err(BoundsError::MissingPhotonCount)
        );
        assert_eq!(end_bound(1), Ok(0));
        assert_eq!(end_bound(2), Ok(1));
        assert_eq!(end_bound(3), Ok(2));
        assert_eq!(absorption_bound(0, 2), Err(BoundsError::Zero("np")));
    }

    #[test]
    fn totals() {
        let r = total_bound(6, 2, None).unwrap();
        assert_eq!((r.a_bound, r.m_bound, r.e_bound, r.total), (6, 6, 1, 13));
        let r = total_bound(24, 3, None).unwrap();
        assert_eq!((r.a_bound, r.m_bound, r.e_bound, r.total), (36, 24, 2, 62));
        assert_eq!(total_bound(17, 1, None).unwrap().total, 8);
        let exact = total_bound(6, 2, Some(0)).unwrap();
        assert_eq!(exact.total, 7);
        assert_eq!(exact.m_mode, TrmMode::TrmExact);
    }

    proptest! {
        #[test]
        fn bounds_are_monotone(np in 1u64..50, ne in 1u64..12) {
            let here = total_bound(np, ne, None).unwrap();
            let more_p = total_bound(np + 1, ne, None).unwrap();
            let more_e = total_bound(np, ne + 1, None).unwrap();
            prop_assert!(more_p.a_bound >= here.a_bound && more_e.a_bound >= here.a_bound);
            prop_assert!(more_p.m_bound >= here.m_bound && more_e.m_bound >= here.m_bound);
            prop_assert!(more_e.e_bound >= here.e_bound);
            prop_assert_eq!(here.total, here.a_bound + here.m_bound + here.e_bound);
        }
    }
}
