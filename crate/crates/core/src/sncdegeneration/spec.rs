use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactcore::{parse_rational_literal, rat, ExactMatrix, Rational};

/// A rational eigenvalue in `[0, 1)` written `p/q` in documents.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alpha(pub Rational);

impl Alpha {
    pub fn zero() -> Self {
        Alpha(rat(0, 1))
    }

    pub fn new(n: i64, d: i64) -> Self {
        Alpha(rat(n, d))
    }

    pub fn is_zero(&self) -> bool {
        num::Zero::is_zero(&self.0)
    }

    /// `α·e ∈ ℤ`.
    pub fn divides(&self, e: u32) -> bool {
        (&self.0 * Rational::from_integer(e.into())).is_integer()
    }
}

impl Default for Alpha {
    fn default() -> Self {
        Alpha::zero()
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for Alpha {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let q = parse_rational_literal(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if q < rat(0, 1) || q >= rat(1, 1) {
            return Err(Error::InvalidInput(format!("eigenvalue {s} is not in [0, 1)")));
        }
        Ok(Alpha(q))
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// How the Gysin half of the E1 differential is weighted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GysinWeights {
    /// Unweighted, as in the reduced case.
    #[default]
    Unit,
    /// Each Gysin component along `Y_j` is multiplied by `e_j`.
    Multiplicity,
}

/// Cohomological data of one stratum `Y^J`, or of the eigen-data for `α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumData {
    #[serde(rename = "J")]
    pub j: Vec<u32>,
    /// Complex dimension; defaults to `rel_dim + 1 − |J|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// `betti[m] = dim H^m`.
    pub betti: Vec<usize>,
    /// `hodge[m][p] = h^{p, m−p}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hodge: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Alpha::is_zero")]
    pub alpha: Alpha,
    /// Hodge level of each basis vector of `H^m`, for a basis adapted to `F`.
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<Vec<i64>>>,
}

/// Restriction `H^m(Y^from) → H^m(Y^to)` and Gysin `H^m(Y^to) → H^{m+2}(Y^from)`
/// for `to = from ∪ {j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapData {
    pub from: Vec<u32>,
    pub to: Vec<u32>,
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Alpha::is_zero")]
    pub alpha: Alpha,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restriction: Option<ExactMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gysin: Option<ExactMatrix>,
}

/// A per-stratum, per-degree matrix: a Lefschetz map `H^m → H^{m+2}` or a
/// base pairing `H^m × H^{2d−m} → ℂ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorData {
    #[serde(rename = "J")]
    pub j: Vec<u32>,
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Alpha::is_zero")]
    pub alpha: Alpha,
    pub matrix: ExactMatrix,
}

/// Combinatorial description of a simple normal crossing central fiber.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegenerationSpec {
    pub rel_dim: usize,
    /// Component ids; defaults to `0..multiplicities.len()`.
    #[serde(default)]
    pub components: Vec<u32>,
    pub multiplicities: Vec<u32>,
    pub strata: Vec<StratumData>,
    #[serde(default)]
    pub maps: Vec<MapData>,
    #[serde(default)]
    pub lefschetz: Vec<OperatorData>,
    #[serde(default)]
    pub pairings: Vec<OperatorData>,
    #[serde(default)]
    pub gysin_weights: GysinWeights,
}

pub(crate) type Key = (Alpha, Vec<u32>);

/// A validated spec with lookup tables. Index sets are sorted component
/// ids throughout.
#[derive(Clone, Debug)]
pub struct Degeneration {
    pub spec: DegenerationSpec,
    mult: BTreeMap<u32, u32>,
    strata: BTreeMap<Key, usize>,
    maps: BTreeMap<(Alpha, Vec<u32>, u32, usize), usize>,
    lefschetz: BTreeMap<(Alpha, Vec<u32>, usize), usize>,
    pairings: BTreeMap<(Alpha, Vec<u32>, usize), usize>,
}

fn sorted_set(j: &[u32], what: &str) -> Result<Vec<u32>> {
    let mut s = j.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != j.len() || j.is_empty() {
        return Err(Error::InvalidInput(format!("{what} {j:?} must be a nonempty set of distinct ids")));
    }
    Ok(s)
}

impl Degeneration {
    pub fn new(mut spec: DegenerationSpec) -> Result<Self> {
        if spec.components.is_empty() {
            spec.components = (0..spec.multiplicities.len() as u32).collect();
        }
        if spec.components.len() != spec.multiplicities.len() {
            return Err(Error::InvalidInput(format!(
                "{} components but {} multiplicities",
                spec.components.len(),
                spec.multiplicities.len()
            )));
        }
        let mut mult = BTreeMap::new();
        for (&c, &e) in spec.components.iter().zip(&spec.multiplicities) {
            if e == 0 {
                return Err(Error::InvalidInput(format!("multiplicity of component {c} must be positive")));
            }
            if mult.insert(c, e).is_some() {
                return Err(Error::InvalidInput(format!("component {c} listed twice")));
            }
        }
        let n = spec.rel_dim;
        let mut strata = BTreeMap::new();
        for (idx, st) in spec.strata.iter_mut().enumerate() {
            st.j = sorted_set(&st.j, "stratum")?;
            if let Some(c) = st.j.iter().find(|c| !mult.contains_key(c)) {
                return Err(Error::InvalidInput(format!("stratum {:?} names unknown component {c}", st.j)));
            }
            if st.j.len() > n + 1 {
                return Err(Error::InvalidInput(format!("stratum {:?} has negative dimension", st.j)));
            }
            let d = n + 1 - st.j.len();
            if st.dim.is_some_and(|x| x != d) {
                return Err(Error::InvalidInput(format!("stratum {:?} must have dimension {d}", st.j)));
            }
            st.dim = Some(d);
            if st.betti.len() > 2 * d + 1 {
                return Err(Error::InvalidInput(format!("stratum {:?} has cohomology above degree {}", st.j, 2 * d)));
            }
            st.betti.resize(2 * d + 1, 0);
            for m in 0..=2 * d {
                if st.betti[m] != st.betti[2 * d - m] {
                    return Err(Error::InvalidInput(format!("stratum {:?} violates Poincaré symmetry in degree {m}", st.j)));
                }
            }
            if let Some(h) = &mut st.hodge {
                h.resize(2 * d + 1, vec![]);
                for (m, row) in h.iter_mut().enumerate() {
                    row.resize(m + 1, 0);
                    if row.iter().sum::<usize>() != st.betti[m] {
                        return Err(Error::InvalidInput(format!(
                            "stratum {:?}: Hodge numbers in degree {m} do not sum to the Betti number",
                            st.j
                        )));
                    }
                }
            }
            if let Some(f) = &mut st.f {
                f.resize(2 * d + 1, vec![]);
                for (m, levels) in f.iter().enumerate() {
                    if levels.len() != st.betti[m] || levels.iter().any(|&p| p < 0 || p > m as i64) {
                        return Err(Error::InvalidInput(format!("stratum {:?}: bad Hodge levels in degree {m}", st.j)));
                    }
                }
            }
            if strata.insert((st.alpha.clone(), st.j.clone()), idx).is_some() {
                return Err(Error::InvalidInput(format!("stratum {:?} listed twice for alpha {}", st.j, st.alpha)));
            }
        }
        for (alpha, j) in strata.keys() {
            if j.len() < 2 || !alpha.is_zero() {
                continue;
            }
            for drop in 0..j.len() {
                let mut sub = j.clone();
                sub.remove(drop);
                if !strata.contains_key(&(Alpha::zero(), sub.clone())) {
                    return Err(Error::MissingStratum(sub.iter().map(|&x| x as usize).collect()));
                }
            }
        }
        let mut deg = Degeneration {
            spec,
            mult,
            strata,
            maps: BTreeMap::new(),
            lefschetz: BTreeMap::new(),
            pairings: BTreeMap::new(),
        };
        deg.index_maps()?;
        deg.index_operators()?;
        Ok(deg)
    }

    fn index_maps(&mut self) -> Result<()> {
        for idx in 0..self.spec.maps.len() {
            let mp = &mut self.spec.maps[idx];
            mp.from = sorted_set(&mp.from, "map source")?;
            mp.to = sorted_set(&mp.to, "map target")?;
            let extra: Vec<u32> = mp.to.iter().copied().filter(|c| !mp.from.contains(c)).collect();
            if extra.len() != 1 || mp.to.len() != mp.from.len() + 1 {
                return Err(Error::MapShapeMismatch(format!("{:?} -> {:?} is not a codimension-one inclusion", mp.from, mp.to)));
            }
            let key = (mp.alpha.clone(), mp.from.clone(), extra[0], mp.degree);
            let mp = self.spec.maps[idx].clone();
            let (bf, bt) = (self.betti(&mp.alpha, &mp.from)?, self.betti(&mp.alpha, &mp.to)?);
            let at = |b: &Vec<usize>, m: usize| b.get(m).copied().unwrap_or(0);
            if let Some(r) = &mp.restriction {
                if (r.rows(), r.cols()) != (at(&bt, mp.degree), at(&bf, mp.degree)) {
                    return Err(Error::MapShapeMismatch(format!(
                        "restriction {:?} -> {:?} in degree {} is {}x{}, expected {}x{}",
                        mp.from,
                        mp.to,
                        mp.degree,
                        r.rows(),
                        r.cols(),
                        at(&bt, mp.degree),
                        at(&bf, mp.degree)
                    )));
                }
            }
            if let Some(g) = &mp.gysin {
                if (g.rows(), g.cols()) != (at(&bf, mp.degree + 2), at(&bt, mp.degree)) {
                    return Err(Error::MapShapeMismatch(format!(
                        "Gysin {:?} -> {:?} in degree {} is {}x{}, expected {}x{}",
                        mp.to,
                        mp.from,
                        mp.degree,
                        g.rows(),
                        g.cols(),
                        at(&bf, mp.degree + 2),
                        at(&bt, mp.degree)
                    )));
                }
            }
            if self.maps.insert(key, idx).is_some() {
                return Err(Error::MapShapeMismatch(format!("map {:?} -> {:?} listed twice", mp.from, mp.to)));
            }
        }
        Ok(())
    }

    fn index_operators(&mut self) -> Result<()> {
        for (is_lef, list) in [(true, self.spec.lefschetz.clone()), (false, self.spec.pairings.clone())] {
            for (idx, op) in list.iter().enumerate() {
                let j = sorted_set(&op.j, "operator stratum")?;
                let b = self.betti(&op.alpha, &j)?;
                let d = self.stratum_dim(&j);
                let at = |m: usize| b.get(m).copied().unwrap_or(0);
                let expected = if is_lef {
                    (at(op.degree + 2), at(op.degree))
                } else {
                    (at(op.degree), if op.degree <= 2 * d { at(2 * d - op.degree) } else { 0 })
                };
                if (op.matrix.rows(), op.matrix.cols()) != expected {
                    return Err(Error::MapShapeMismatch(format!(
                        "{} on {:?} in degree {} is {}x{}, expected {}x{}",
                        if is_lef { "Lefschetz map" } else { "pairing" },
                        j,
                        op.degree,
                        op.matrix.rows(),
                        op.matrix.cols(),
                        expected.0,
                        expected.1
                    )));
                }
                let table = if is_lef { &mut self.lefschetz } else { &mut self.pairings };
                if table.insert((op.alpha.clone(), j.clone(), op.degree), idx).is_some() {
                    return Err(Error::InvalidInput(format!("operator on {j:?} degree {} listed twice", op.degree)));
                }
            }
        }
        Ok(())
    }

    pub fn rel_dim(&self) -> usize {
        self.spec.rel_dim
    }

    /// Component ids in ascending order.
    pub fn components(&self) -> Vec<u32> {
        self.mult.keys().copied().collect()
    }

    pub fn multiplicity(&self, c: u32) -> u32 {
        self.mult[&c]
    }

    /// `C_J = Π_{j∈J} e_j`.
    pub fn c_j(&self, j: &[u32]) -> u64 {
        j.iter().map(|c| self.mult[c] as u64).product()
    }

    pub fn stratum_dim(&self, j: &[u32]) -> usize {
        self.spec.rel_dim + 1 - j.len()
    }

    /// Nonempty strata `Y^J` of the central fiber.
    pub fn geometric_strata(&self) -> Vec<Vec<u32>> {
        self.strata.keys().filter(|(a, _)| a.is_zero()).map(|(_, j)| j.clone()).collect()
    }

    pub fn stratum(&self, alpha: &Alpha, j: &[u32]) -> Result<&StratumData> {
        self.strata
            .get(&(alpha.clone(), j.to_vec()))
            .map(|&i| &self.spec.strata[i])
            .ok_or_else(|| Error::MissingStratum(j.iter().map(|&x| x as usize).collect()))
    }

    pub fn betti(&self, alpha: &Alpha, j: &[u32]) -> Result<Vec<usize>> {
        Ok(self.stratum(alpha, j)?.betti.clone())
    }

    pub(crate) fn map_data(&self, alpha: &Alpha, from: &[u32], j: u32, degree: usize) -> Option<&MapData> {
        self.maps.get(&(alpha.clone(), from.to_vec(), j, degree)).map(|&i| &self.spec.maps[i])
    }

    pub(crate) fn lefschetz_matrix(&self, alpha: &Alpha, j: &[u32], degree: usize) -> Option<&ExactMatrix> {
        self.lefschetz.get(&(alpha.clone(), j.to_vec(), degree)).map(|&i| &self.spec.lefschetz[i].matrix)
    }

    pub(crate) fn pairing_matrix(&self, alpha: &Alpha, j: &[u32], degree: usize) -> Option<&ExactMatrix> {
        self.pairings.get(&(alpha.clone(), j.to_vec(), degree)).map(|&i| &self.spec.pairings[i].matrix)
    }

    /// `I_α = {i : α e_i ∈ ℤ}`.
    pub fn i_alpha(&self, alpha: &Alpha) -> BTreeSet<u32> {
        self.mult.iter().filter(|(_, &e)| alpha.divides(e)).map(|(&c, _)| c).collect()
    }
}
