use std::collections::BTreeMap;

use serde::Serialize;

use super::page::{d1_assemble, E1Page};
use super::spec::{Alpha, Degeneration};
use crate::error::{Error, Result};
use crate::exactcore::{sign_pow, ExactMatrix, ExactScalar, ExactSubspace, Subspace};
use crate::hlcohomology::cohomology;

/// Cycles and boundaries of the E1 page, spot by spot.
struct Homology<'a> {
    page: &'a E1Page,
    cycles: BTreeMap<(i64, i64), ExactSubspace>,
    boundaries: BTreeMap<(i64, i64), ExactSubspace>,
}

impl<'a> Homology<'a> {
    fn new(page: &'a E1Page) -> Result<Self> {
        let d = page.d()?;
        let (kerd, imd) = (d.kernel(), d.image());
        let mut cycles = BTreeMap::new();
        let mut boundaries = BTreeMap::new();
        for p in &page.pieces {
            let v = page.spot(p.l, p.k);
            cycles.insert((p.l, p.k), kerd.intersection(&v));
            boundaries.insert((p.l, p.k), imd.intersection(&v));
        }
        Ok(Homology { page, cycles, boundaries })
    }

    fn zero(&self) -> ExactSubspace {
        Subspace::zero(self.page.dim())
    }

    fn z(&self, spot: (i64, i64)) -> ExactSubspace {
        self.cycles.get(&spot).cloned().unwrap_or_else(|| self.zero())
    }

    fn b(&self, spot: (i64, i64)) -> ExactSubspace {
        self.boundaries.get(&spot).cloned().unwrap_or_else(|| self.zero())
    }

    fn dim(&self, spot: (i64, i64)) -> usize {
        self.z(spot).dim() - self.b(spot).dim()
    }

    /// Rank of the map induced by `t` from `E2_src` to `E2_dst`.
    fn induced_rank(&self, t: &ExactMatrix, src: (i64, i64), dst: (i64, i64)) -> usize {
        let b = self.b(dst);
        self.z(src).image(t).sum(&b).dim() - b.dim()
    }

    /// `dim F^p E2_spot` for the image filtration.
    fn filtered_dim(&self, fp: &ExactSubspace, spot: (i64, i64)) -> usize {
        let b = self.b(spot);
        fp.intersection(&self.z(spot)).sum(&b).dim() - b.dim()
    }
}

/// A map between two E2 spots that is expected to be an isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpotIso {
    pub from: (i64, i64),
    pub to: (i64, i64),
    pub rank: usize,
    pub from_dim: usize,
    pub to_dim: usize,
}

impl SpotIso {
    pub fn holds(&self) -> bool {
        self.rank == self.from_dim && self.rank == self.to_dim
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct E2Page {
    pub alpha: Alpha,
    pub e1_dims: BTreeMap<(i64, i64), usize>,
    pub dims: BTreeMap<(i64, i64), usize>,
    /// Rank of `d1` on each E1 spot.
    pub d1_ranks: BTreeMap<(i64, i64), usize>,
    pub euler_e1: i64,
    pub euler_e2: i64,
    /// `R^k : E2_{l,k} → E2_{l,−k}` for `k > 0`.
    pub monodromy_weight: Vec<SpotIso>,
    /// Limit degree `n + l` ↦ weight `n + l + k` ↦ dimension.
    pub limit_gr: BTreeMap<i64, BTreeMap<i64, usize>>,
    /// E2 degeneration is assumed, not derived from the data.
    pub degeneration_assumed: bool,
}

impl E2Page {
    pub fn monodromy_weight_holds(&self) -> bool {
        self.monodromy_weight.iter().all(SpotIso::holds)
    }
}

fn e2_from(page: &E1Page, h: &Homology) -> Result<E2Page> {
    let d = page.d()?;
    let mut dims = BTreeMap::new();
    let mut d1_ranks = BTreeMap::new();
    let mut limit_gr: BTreeMap<i64, BTreeMap<i64, usize>> = BTreeMap::new();
    for p in &page.pieces {
        let spot = (p.l, p.k);
        let e2 = h.dim(spot);
        d1_ranks.insert(spot, page.spot(p.l, p.k).image(d).dim());
        if e2 > 0 {
            dims.insert(spot, e2);
            *limit_gr.entry(page.n + p.l).or_default().entry(page.n + p.l + p.k).or_default() += e2;
        }
    }
    let mut monodromy_weight = Vec::new();
    for p in page.pieces.iter().filter(|p| p.k > 0) {
        let rk = page.r.pow(p.k as u32);
        monodromy_weight.push(SpotIso {
            from: (p.l, p.k),
            to: (p.l, -p.k),
            rank: h.induced_rank(&rk, (p.l, p.k), (p.l, -p.k)),
            from_dim: h.dim((p.l, p.k)),
            to_dim: h.dim((p.l, -p.k)),
        });
    }
    let euler_e2 = dims.iter().map(|((l, _), &x)| sign_pow(*l) * x as i64).sum();
    Ok(E2Page {
        alpha: page.alpha.clone(),
        e1_dims: page.dims(),
        dims,
        d1_ranks,
        euler_e1: page.euler_characteristic(),
        euler_e2,
        monodromy_weight,
        limit_gr,
        degeneration_assumed: true,
    })
}

/// `E2 = ker d1 / im d1` per spot, with the monodromy-weight check.
pub fn e2_page(deg: &Degeneration, alpha: &Alpha) -> Result<E2Page> {
    let page = d1_assemble(deg, alpha)?;
    let h = Homology::new(&page)?;
    e2_from(&page, &h)
}

/// Hodge numbers of one graded piece of the limit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimitHodgeNumbers {
    pub degree: i64,
    pub weight: i64,
    /// `(p, q, h^{p,q})`, nonzero entries only.
    pub numbers: Vec<(i64, i64, usize)>,
}

/// Hodge numbers of each `gr^W_w H^{n+l}` of the limit, from the image
/// filtration on E2.
pub fn limit_hodge_numbers(deg: &Degeneration, alpha: &Alpha) -> Result<Vec<LimitHodgeNumbers>> {
    let page = d1_assemble(deg, alpha)?;
    let f = page.hodge_filtration(deg)?;
    let h = Homology::new(&page)?;
    let mut out = Vec::new();
    let ps = f.dec_support();
    for piece in &page.pieces {
        let spot = (piece.l, piece.k);
        if h.dim(spot) == 0 {
            continue;
        }
        let w = page.n + piece.l + piece.k;
        let dims: Vec<usize> = ps.clone().map(|p| h.filtered_dim(&f.dec(p), spot)).collect();
        let mut numbers = Vec::new();
        for (i, p) in ps.clone().enumerate().take(dims.len() - 1) {
            let hpq = dims[i] - dims[i + 1];
            if hpq > 0 {
                numbers.push((p, w - p, hpq));
            }
        }
        out.push(LimitHodgeNumbers { degree: page.n + piece.l, weight: w, numbers });
    }
    let symmetric_input = strata_hodge_symmetric(deg, alpha);
    if symmetric_input {
        for entry in &out {
            for &(p, q, x) in &entry.numbers {
                let mirror = entry.numbers.iter().find(|e| (e.0, e.1) == (q, p)).map_or(0, |e| e.2);
                if mirror != x {
                    return Err(Error::InvariantViolation(format!(
                        "h^{{{p},{q}}} != h^{{{q},{p}}} in degree {} weight {}",
                        entry.degree, entry.weight
                    )));
                }
            }
        }
    }
    Ok(out)
}

fn strata_hodge_symmetric(deg: &Degeneration, alpha: &Alpha) -> bool {
    let i_alpha = deg.i_alpha(alpha);
    deg.geometric_strata().iter().filter(|j| j.iter().all(|c| i_alpha.contains(c))).all(|j| {
        match deg.stratum(alpha, j).ok().and_then(|s| s.hodge.clone()) {
            Some(h) => h.iter().all(|row| (0..row.len()).all(|p| row[p] == row[row.len() - 1 - p])),
            None => deg.stratum_dim(j) == 0,
        }
    })
}

/// Local invariant cycle check in one limit degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantCycleDegree {
    pub degree: i64,
    /// `dim H^degree(Y)` from the unweighted Čech complex of the strata.
    pub central_fiber: usize,
    /// Rank of `H^degree(Y) → H^degree(limit)` on weight-graded pieces.
    pub image: usize,
    /// `dim ker N` on the limit, from `R` acting on E2.
    pub ker_n: usize,
}

impl InvariantCycleDegree {
    pub fn exact(&self) -> bool {
        self.image == self.ker_n
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantCycleReport {
    pub degrees: Vec<InvariantCycleDegree>,
}

impl InvariantCycleReport {
    pub fn exact(&self) -> bool {
        self.degrees.iter().all(InvariantCycleDegree::exact)
    }
}

/// Čech complex `⊕_J H^q(Y^J)` with the unweighted alternating restriction.
struct Cech {
    cells: Vec<(Vec<u32>, usize, usize, usize)>,
    delta: ExactMatrix,
}

fn cech_complex(deg: &Degeneration) -> Result<Cech> {
    let alpha = Alpha::zero();
    let mut cells = Vec::new();
    let mut offset = 0;
    for j in deg.geometric_strata() {
        for (q, &b) in deg.betti(&alpha, &j)?.iter().enumerate() {
            if b > 0 {
                cells.push((j.clone(), q, offset, b));
                offset += b;
            }
        }
    }
    let mut delta = ExactMatrix::zeros(offset, offset);
    for (j, q, off, b) in &cells {
        for c in deg.components().into_iter().filter(|c| !j.contains(c)) {
            let mut to = j.clone();
            to.push(c);
            to.sort_unstable();
            let Some((_, _, toff, tb)) = cells.iter().find(|x| x.0 == to && x.1 == *q) else { continue };
            let rho = deg
                .map_data(&alpha, j, c, *q)
                .and_then(|m| m.restriction.clone())
                .ok_or_else(|| Error::MapShapeMismatch(format!("missing restriction {j:?} -> {to:?} in degree {q}")))?;
            debug_assert_eq!((rho.rows(), rho.cols()), (*tb, *b));
            let sign = sign_pow(j.iter().filter(|&&i| i < c).count() as i64);
            delta.set_block(*toff, *off, &rho.scale(&ExactScalar::from_int(sign)));
        }
    }
    if !delta.mul(&delta).is_zero() {
        return Err(Error::InvariantViolation("Čech differential does not square to zero".into()));
    }
    Ok(Cech { cells, delta })
}

/// Exactness of `H(Y) → H(limit) → H(limit)` (the second map `N`) at the
/// middle, on weight-graded pieces.
pub fn local_invariant_cycle_report(deg: &Degeneration) -> Result<InvariantCycleReport> {
    let alpha = Alpha::zero();
    let page = d1_assemble(deg, &alpha)?;
    let h = Homology::new(&page)?;
    let cech = cech_complex(deg)?;
    let (kerd, imd) = (cech.delta.kernel(), cech.delta.image());
    let total = cech.delta.rows();

    // φ(J, q) = C_J · (J, q, m = r) identifies the Čech complex with the
    // kernel of R on E1.
    let mut phi = ExactMatrix::zeros(page.dim(), total);
    for (j, q, off, b) in &cech.cells {
        let t = page.find(j, *q, j.len() - 1).expect("every Čech cell has an E1 cell with m = r");
        let c = ExactScalar::from_int(deg.c_j(j) as i64);
        phi.set_block(page.cells[t].offset, *off, &ExactMatrix::identity(*b).scale(&c));
    }
    if page.d()?.mul(&phi) != phi.mul(&cech.delta) {
        return Err(Error::InvariantViolation("Čech complex does not embed into E1".into()));
    }

    let mut by_degree: BTreeMap<i64, InvariantCycleDegree> = BTreeMap::new();
    let entry = |m: &mut BTreeMap<i64, InvariantCycleDegree>, q: i64| {
        m.entry(q).or_insert(InvariantCycleDegree { degree: q, central_fiber: 0, image: 0, ker_n: 0 }).clone()
    };
    let mut by_total: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (j, q, off, b) in &cech.cells {
        by_total.entry((*q + j.len() - 1) as i64).or_default().extend(*off..off + b);
    }
    for (deg_total, idx) in by_total {
        let coords = crate::weightfilt::coordinate_subspace(total, idx);
        let mut e = entry(&mut by_degree, deg_total);
        e.central_fiber += kerd.intersection(&coords).dim() - imd.intersection(&coords).dim();
        by_degree.insert(deg_total, e);
    }
    for p in &page.pieces {
        let spot = (p.l, p.k);
        let q = page.n + p.l;
        let mut e = entry(&mut by_degree, q);
        let lower = (p.l, p.k - 2);
        e.ker_n += h.dim(spot) - h.induced_rank(&page.r, spot, lower);
        let cycles_here = kerd.image(&phi).intersection(&page.spot(p.l, p.k));
        let b = h.b(spot);
        e.image += cycles_here.sum(&b).dim() - b.dim();
        by_degree.insert(q, e);
    }
    Ok(InvariantCycleReport { degrees: by_degree.into_values().collect() })
}

/// Outcome of packaging E1 as a differential structure and taking cohomology.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum PbhlOutcome {
    Passed { dims_agree: bool, dims: BTreeMap<String, usize> },
    Failed { reason: String },
    Skipped { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct HardLefschetzReport {
    /// `X1^l : E2_{−l,k} → E2_{l,k}` for `l > 0`.
    pub isomorphisms: Vec<SpotIso>,
    pub pbhl: PbhlOutcome,
}

impl HardLefschetzReport {
    pub fn first_failure(&self) -> Option<(i64, i64)> {
        self.isomorphisms.iter().find(|s| !s.holds()).map(|s| s.from)
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none() && matches!(self.pbhl, PbhlOutcome::Passed { dims_agree: true, .. })
    }
}

/// Hard Lefschetz on E2 from the strata Lefschetz maps, and the full
/// polarized check through the cohomology of the differential structure.
pub fn hard_lefschetz_check(deg: &Degeneration, alpha: &Alpha) -> Result<HardLefschetzReport> {
    let page = d1_assemble(deg, alpha)?;
    let x1 = page.lefschetz(deg)?;
    let h = Homology::new(&page)?;
    let e2 = e2_from(&page, &h)?;
    let mut isomorphisms = Vec::new();
    for p in page.pieces.iter().filter(|p| p.l < 0) {
        let l = -p.l;
        isomorphisms.push(SpotIso {
            from: (p.l, p.k),
            to: (l, p.k),
            rank: h.induced_rank(&x1.pow(l as u32), (p.l, p.k), (l, p.k)),
            from_dim: h.dim((p.l, p.k)),
            to_dim: h.dim((l, p.k)),
        });
    }
    let pbhl = match page.differential_pbhl(deg) {
        Err(e @ (Error::MissingHodgeData(_) | Error::MissingLefschetzData(_))) => PbhlOutcome::Skipped { reason: e.to_string() },
        Err(e) => PbhlOutcome::Failed { reason: e.to_string() },
        Ok(dp) => match cohomology(&dp) {
            Err(e) => PbhlOutcome::Failed { reason: e.to_string() },
            Ok(c) => match c.verification.failure {
                Some(f) => PbhlOutcome::Failed { reason: format!("{}: {}", f.condition, f.detail) },
                None if !c.presentations_agree => PbhlOutcome::Failed { reason: "presentations disagree".into() },
                None => {
                    let got: BTreeMap<(i64, i64), usize> =
                        c.structure.pieces().iter().map(|p| ((p.l, p.k), p.dim)).collect();
                    PbhlOutcome::Passed {
                        dims_agree: got == e2.dims,
                        dims: got.iter().map(|((l, k), d)| (format!("{l},{k}"), *d)).collect(),
                    }
                }
            },
        },
    };
    Ok(HardLefschetzReport { isomorphisms, pbhl })
}
