use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::spec::{Alpha, Degeneration};
use crate::error::{Error, Result};

/// The roots `j/e_i` of the residue's characteristic polynomial, with the
/// index set `I_α` of each.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenvalueTable {
    pub entries: Vec<(Alpha, Vec<u32>)>,
}

impl EigenvalueTable {
    pub fn alphas(&self) -> Vec<Alpha> {
        self.entries.iter().map(|e| e.0.clone()).collect()
    }

    pub fn i_alpha(&self, alpha: &Alpha) -> Option<&[u32]> {
        self.entries.iter().find(|e| &e.0 == alpha).map(|e| e.1.as_slice())
    }
}

pub fn eigenvalue_set(deg: &Degeneration) -> EigenvalueTable {
    let mut alphas = BTreeSet::new();
    for c in deg.components() {
        let e = deg.multiplicity(c) as i64;
        for j in 0..e {
            alphas.insert(Alpha::new(j, e));
        }
    }
    let entries = alphas
        .into_iter()
        .map(|a| {
            let i = deg.i_alpha(&a).into_iter().collect();
            (a, i)
        })
        .collect();
    EigenvalueTable { entries }
}

/// `J ↦ Σ_{j∈J} e_j` over the nonempty strata.
pub fn characteristic_cycle(deg: &Degeneration) -> BTreeMap<Vec<u32>, u64> {
    deg.geometric_strata()
        .into_iter()
        .map(|j| {
            let m = j.iter().map(|&c| deg.multiplicity(c) as u64).sum();
            (j, m)
        })
        .collect()
}

/// `J ↦ #(I_α ∩ J)` over the nonempty strata.
pub fn characteristic_cycle_alpha(deg: &Degeneration, alpha: &Alpha) -> Result<BTreeMap<Vec<u32>, u64>> {
    let table = eigenvalue_set(deg);
    let i_alpha = table.i_alpha(alpha).ok_or_else(|| Error::UnknownEigenvalue(alpha.to_string()))?;
    Ok(deg
        .geometric_strata()
        .into_iter()
        .map(|j| {
            let m = j.iter().filter(|c| i_alpha.contains(c)).count() as u64;
            (j, m)
        })
        .collect())
}
