use std::collections::BTreeMap;

use serde::Serialize;

use super::spec::{Alpha, Degeneration, GysinWeights};
use crate::error::{Error, Result};
use crate::exactcore::{epsilon, sign_pow, ExactFlag, ExactMatrix, ExactScalar, ExactSubspace, Field, Flag};
use crate::hlcohomology::DifferentialPBHL;
use crate::hodgelefschetz::{BigradedHL, Piece};
use crate::weightfilt::coordinate_subspace;

/// One summand `H^degree(Y^J)(−twist)` of `V_{l,k}`, where `|J| = r + 1`,
/// `k = r − 2m`, `l = degree − (n − r)` and `twist = r − m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub stratum: Vec<u32>,
    pub degree: usize,
    pub m: usize,
    pub l: i64,
    pub k: i64,
    pub twist: i64,
    pub dim: usize,
    #[serde(skip)]
    pub offset: usize,
}

impl Cell {
    pub fn r(&self) -> usize {
        self.stratum.len() - 1
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.dim
    }
}

/// The E1 differential and its two halves.
#[derive(Clone, Debug)]
pub struct Differential {
    pub restriction: ExactMatrix,
    pub gysin: ExactMatrix,
    pub d: ExactMatrix,
}

/// The first page of the weight spectral sequence for one eigenvalue.
///
/// Coordinates are grouped by `(l, k)` in increasing order, and by cell
/// within each group.
#[derive(Clone, Debug)]
pub struct E1Page {
    pub alpha: Alpha,
    pub n: i64,
    pub cells: Vec<Cell>,
    pub pieces: Vec<Piece>,
    /// The residue action `m ↦ m + 1`, of bidegree `(0, −2)`.
    pub r: ExactMatrix,
    pub differential: Option<Differential>,
}

/// `(−1)^{#{i ∈ set : i < x}}`.
fn position_sign(x: u32, set: &[u32]) -> i64 {
    sign_pow(set.iter().filter(|&&i| i < x).count() as i64)
}

fn strata_for(deg: &Degeneration, alpha: &Alpha) -> Vec<Vec<u32>> {
    let i_alpha = deg.i_alpha(alpha);
    deg.geometric_strata().into_iter().filter(|j| j.iter().all(|c| i_alpha.contains(c))).collect()
}

/// `V_{l,k}` for eigenvalue `α`, with the residue action.
pub fn e1_page(deg: &Degeneration, alpha: &Alpha) -> Result<E1Page> {
    let n = deg.rel_dim() as i64;
    let mut keyed = Vec::new();
    for j in strata_for(deg, alpha) {
        let betti = deg.betti(alpha, &j)?;
        let r = j.len() - 1;
        for (degree, &dim) in betti.iter().enumerate() {
            if dim == 0 {
                continue;
            }
            for m in 0..=r {
                let k = r as i64 - 2 * m as i64;
                let l = degree as i64 - (n - r as i64);
                keyed.push(Cell { stratum: j.clone(), degree, m, l, k, twist: (r - m) as i64, dim, offset: 0 });
            }
        }
    }
    keyed.sort_by(|a, b| (a.l, a.k, &a.stratum, a.degree, a.m).cmp(&(b.l, b.k, &b.stratum, b.degree, b.m)));
    let mut offset = 0;
    let mut pieces: Vec<Piece> = Vec::new();
    for c in keyed.iter_mut() {
        c.offset = offset;
        offset += c.dim;
        match pieces.last_mut() {
            Some(p) if (p.l, p.k) == (c.l, c.k) => p.dim += c.dim,
            _ => pieces.push(Piece { l: c.l, k: c.k, dim: c.dim }),
        }
    }
    let mut page = E1Page { alpha: alpha.clone(), n, cells: keyed, pieces, r: ExactMatrix::zeros(offset, offset), differential: None };
    let mut r = ExactMatrix::zeros(offset, offset);
    for c in &page.cells {
        if let Some(t) = page.find(&c.stratum, c.degree, c.m + 1) {
            r.set_block(page.cells[t].offset, c.offset, &ExactMatrix::identity(c.dim));
        }
    }
    page.r = r;
    Ok(page)
}

/// E1 with the differential: multiplicity-weighted restrictions with
/// position signs plus negatively signed Gysin maps.
pub fn d1_assemble(deg: &Degeneration, alpha: &Alpha) -> Result<E1Page> {
    let mut page = e1_page(deg, alpha)?;
    let total = page.dim();
    let mut restriction = ExactMatrix::zeros(total, total);
    let mut gysin = ExactMatrix::zeros(total, total);
    for c in &page.cells {
        for &j in deg.i_alpha(alpha).iter().filter(|j| !c.stratum.contains(j)) {
            let mut to = c.stratum.clone();
            to.push(j);
            to.sort_unstable();
            let Some(t) = page.find(&to, c.degree, c.m + 1) else { continue };
            let rho = map_matrix(deg, alpha, &c.stratum, j, c.degree, true, page.cells[t].dim, c.dim)?;
            let coef = ExactScalar::from_int(deg.multiplicity(j) as i64 * position_sign(j, &c.stratum));
            restriction.set_block(page.cells[t].offset, c.offset, &rho.scale(&coef));
        }
        if c.m + 1 > c.r() {
            continue;
        }
        for &j in &c.stratum {
            let from: Vec<u32> = c.stratum.iter().copied().filter(|&x| x != j).collect();
            let Some(t) = page.find(&from, c.degree + 2, c.m) else { continue };
            let gamma = map_matrix(deg, alpha, &from, j, c.degree, false, page.cells[t].dim, c.dim)?;
            let weight = match deg.spec.gysin_weights {
                GysinWeights::Unit => 1,
                GysinWeights::Multiplicity => deg.multiplicity(j) as i64,
            };
            let coef = ExactScalar::from_int(-weight * position_sign(j, &from));
            gysin.set_block(page.cells[t].offset, c.offset, &gamma.scale(&coef));
        }
    }
    let d = restriction.add(&gysin);
    if !d.mul(&d).is_zero() {
        return Err(Error::D1SquareNonzero);
    }
    if !page.r.commutator(&d).is_zero() {
        return Err(Error::InvariantViolation("R does not commute with d1".into()));
    }
    page.differential = Some(Differential { restriction, gysin, d });
    Ok(page)
}

#[allow(clippy::too_many_arguments)]
fn map_matrix(
    deg: &Degeneration,
    alpha: &Alpha,
    from: &[u32],
    j: u32,
    degree: usize,
    restriction: bool,
    rows: usize,
    cols: usize,
) -> Result<ExactMatrix> {
    let data = deg.map_data(alpha, from, j, degree);
    let m = data.and_then(|d| if restriction { d.restriction.as_ref() } else { d.gysin.as_ref() });
    match m {
        Some(m) => Ok(m.clone()),
        None if rows == 0 || cols == 0 => Ok(ExactMatrix::zeros(rows, cols)),
        None => Err(Error::MapShapeMismatch(format!(
            "missing {} map for {:?} and component {j} in degree {degree}",
            if restriction { "restriction" } else { "Gysin" },
            from
        ))),
    }
}

impl E1Page {
    pub fn dim(&self) -> usize {
        self.cells.last().map_or(0, |c| c.offset + c.dim)
    }

    pub fn find(&self, stratum: &[u32], degree: usize, m: usize) -> Option<usize> {
        self.cells.iter().position(|c| c.stratum == stratum && c.degree == degree && c.m == m)
    }

    pub fn dims(&self) -> BTreeMap<(i64, i64), usize> {
        self.pieces.iter().map(|p| ((p.l, p.k), p.dim)).collect()
    }

    pub fn piece_dim(&self, l: i64, k: i64) -> usize {
        self.pieces.iter().find(|p| (p.l, p.k) == (l, k)).map_or(0, |p| p.dim)
    }

    /// `V_{l,k}` in total coordinates.
    pub fn spot(&self, l: i64, k: i64) -> ExactSubspace {
        let idx = self.cells.iter().filter(|c| (c.l, c.k) == (l, k)).flat_map(|c| c.range());
        coordinate_subspace(self.dim(), idx)
    }

    /// Block of a total matrix from spot `src` to spot `dst`.
    pub fn block(&self, m: &ExactMatrix, src: (i64, i64), dst: (i64, i64)) -> ExactMatrix {
        let rng = |key: (i64, i64)| {
            let cs: Vec<&Cell> = self.cells.iter().filter(|c| (c.l, c.k) == key).collect();
            match (cs.first(), cs.last()) {
                (Some(a), Some(b)) => a.offset..b.offset + b.dim,
                _ => 0..0,
            }
        };
        let (rs, cs) = (rng(dst), rng(src));
        m.block(rs.start, rs.end, cs.start, cs.end)
    }

    pub fn d(&self) -> Result<&ExactMatrix> {
        self.differential.as_ref().map(|x| &x.d).ok_or_else(|| Error::InvalidInput("page has no differential".into()))
    }

    /// `Σ (−1)^l dim V_{l,k}`.
    pub fn euler_characteristic(&self) -> i64 {
        self.pieces.iter().map(|p| sign_pow(p.l) * p.dim as i64).sum()
    }

    /// Decreasing Hodge filtration: `F^p` of a cell is `F^{p−twist}` of the
    /// stratum cohomology.
    pub fn hodge_filtration(&self, deg: &Degeneration) -> Result<ExactFlag> {
        let mut levels = Vec::with_capacity(self.dim());
        for c in &self.cells {
            let st = deg.stratum(&self.alpha, &c.stratum)?;
            let base = stratum_levels(st, c.degree)?;
            for (i, p) in base.into_iter().enumerate() {
                let mut v = vec![ExactScalar::zero(); self.dim()];
                v[c.offset + i] = ExactScalar::one();
                levels.push((p + c.twist, v));
            }
        }
        Ok(Flag::decreasing_from_levels(self.dim(), &levels))
    }

    /// `X1` from the strata Lefschetz maps, acting `degree ↦ degree + 2`.
    pub fn lefschetz(&self, deg: &Degeneration) -> Result<ExactMatrix> {
        let mut x1 = ExactMatrix::zeros(self.dim(), self.dim());
        for c in &self.cells {
            let Some(t) = self.find(&c.stratum, c.degree + 2, c.m) else { continue };
            let l = deg
                .lefschetz_matrix(&self.alpha, &c.stratum, c.degree)
                .ok_or_else(|| Error::MissingLefschetzData(c.stratum.iter().map(|&x| x as usize).collect()))?;
            x1.set_block(self.cells[t].offset, c.offset, l);
        }
        Ok(x1)
    }

    /// The pairing `S` pairing `(J, degree, m)` with `(J, 2d_J − degree, r − m)`
    /// by `ε(l)(−1)^{l d_J} C_J^{−1} B_J`.
    pub fn pairing(&self, deg: &Degeneration) -> Result<ExactMatrix> {
        let mut s = ExactMatrix::zeros(self.dim(), self.dim());
        for c in &self.cells {
            let dj = deg.stratum_dim(&c.stratum);
            let dual = 2 * dj - c.degree;
            let t = self
                .find(&c.stratum, dual, c.r() - c.m)
                .ok_or_else(|| Error::InvariantViolation(format!("no dual cell for {:?}", c.stratum)))?;
            let b = base_pairing(deg, &self.alpha, &c.stratum, c.degree, dj)?;
            let sign = epsilon(c.l) * sign_pow(c.l * dj as i64);
            let coef = ExactScalar::frac(sign, deg.c_j(&c.stratum) as i64);
            s.set_block(c.offset, self.cells[t].offset, &b.scale(&coef));
        }
        Ok(s)
    }

    /// The page as a bigraded structure with differential.
    pub fn differential_pbhl(&self, deg: &Degeneration) -> Result<DifferentialPBHL> {
        let base = BigradedHL::new(
            self.n,
            self.pieces.clone(),
            self.lefschetz(deg)?,
            self.r.clone(),
            self.hodge_filtration(deg)?,
            self.pairing(deg)?,
        )?;
        DifferentialPBHL::new(base, self.d()?.clone())
    }
}

/// Hodge level of each basis vector of `H^degree`; points and Hodge–Tate
/// data need no explicit levels.
fn stratum_levels(st: &super::spec::StratumData, degree: usize) -> Result<Vec<i64>> {
    let b = st.betti[degree];
    if let Some(f) = &st.f {
        return Ok(f[degree].clone());
    }
    let tate = match &st.hodge {
        Some(h) => h[degree].iter().enumerate().all(|(p, &x)| x == 0 || 2 * p == degree),
        None => st.dim == Some(0),
    };
    if tate && (b == 0 || degree % 2 == 0) {
        return Ok(vec![degree as i64 / 2; b]);
    }
    Err(Error::MissingHodgeData(format!("stratum {:?} degree {degree}", st.j)))
}

/// `B_J` on `H^degree × H^{2d−degree}`. A missing matrix is recovered from
/// its partner through `B(b, a) = (−1)^{degree−d} conj B(a, b)`.
fn base_pairing(deg: &Degeneration, alpha: &Alpha, j: &[u32], degree: usize, d: usize) -> Result<ExactMatrix> {
    if let Some(m) = deg.pairing_matrix(alpha, j, degree) {
        return Ok(m.clone());
    }
    let dual = 2 * d - degree;
    if dual != degree {
        if let Some(m) = deg.pairing_matrix(alpha, j, dual) {
            return Ok(m.adjoint().scale(&ExactScalar::from_int(sign_pow(degree as i64 - d as i64))));
        }
    }
    if deg.stratum_dim(j) == 0 && degree == 0 {
        let b = deg.betti(alpha, j)?[0];
        return Ok(ExactMatrix::identity(b));
    }
    Err(Error::MissingHodgeData(format!("pairing on {j:?} in degree {degree}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::kodaira;

    #[test]
    fn position_signs() {
        assert_eq!(position_sign(3, &[0, 5]), -1);
        assert_eq!(position_sign(0, &[1, 2]), 1);
        assert_eq!(position_sign(9, &[1, 2]), 1);
    }

    #[test]
    fn kodaira_cells() {
        let d = Degeneration::new(kodaira(4)).unwrap();
        let p = e1_page(&d, &Alpha::zero()).unwrap();
        assert_eq!(p.dims(), BTreeMap::from([((-1, 0), 4), ((0, -1), 4), ((0, 1), 4), ((1, 0), 4)]));
        for c in &p.cells {
            assert!(c.m <= c.r());
            assert_eq!(c.l + c.k + p.n, c.degree as i64 + 2 * c.twist);
        }
    }

    #[test]
    fn scaling_multiplicities_scales_restriction() {
        let base = Degeneration::new(kodaira(3)).unwrap();
        let mut spec = kodaira(3);
        spec.multiplicities = vec![5; 3];
        let scaled = Degeneration::new(spec).unwrap();
        let a = d1_assemble(&base, &Alpha::zero()).unwrap().differential.unwrap();
        let b = d1_assemble(&scaled, &Alpha::zero()).unwrap().differential.unwrap();
        assert_eq!(b.restriction, a.restriction.scale(&ExactScalar::from_int(5)));
        assert_eq!(b.gysin, a.gysin);
        assert_eq!(a.d.rank(), b.d.rank());
    }
}
