//! Hodge structures, polarizations, Tate twists, Weil elements and polarized
//! bigraded Hodge–Lefschetz structures.
//!
//! Pairings are sesquilinear in the second argument: with Gram matrix `M`,
//! `S(a, b) = aᵀ M b̄`. Hermitian symmetry `S(a, b) = conj S(b, a)` is
//! `M = M*`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactcore::{
    hermitian_positive_definite, Convention, ExactFlag, ExactMatrix, ExactScalar, ExactSubspace, Field, Flag,
    Subspace,
};
use crate::weightfilt::{complete_lowering, complete_raising, NilpotentEndo};

/// `S(a, b) = aᵀ M b̄`.
pub fn pair(m: &ExactMatrix, a: &[ExactScalar], b: &[ExactScalar]) -> ExactScalar {
    let conj_b: Vec<ExactScalar> = b.iter().map(Field::conj).collect();
    let mb = m.apply(&conj_b);
    a.iter().zip(&mb).fold(ExactScalar::zero(), |acc, (x, y)| acc.plus(&x.times(y)))
}

/// Gram matrix `G_ij = S(a_i, b_j)`.
pub fn gram(m: &ExactMatrix, a: &[Vec<ExactScalar>], b: &[Vec<ExactScalar>]) -> ExactMatrix {
    let rows = a.iter().map(|x| b.iter().map(|y| pair(m, x, y)).collect()).collect();
    ExactMatrix::from_rows(b.len(), rows)
}

/// `{a : S(a, b) = 0 for all b ∈ sub}`.
pub fn left_orthogonal(m: &ExactMatrix, sub: &ExactSubspace) -> ExactSubspace {
    if sub.is_zero() {
        return Subspace::full(m.rows());
    }
    sub.basis_rows().conj().mul(&m.transpose()).kernel()
}

/// `Σ x^k / k!` for nilpotent `x`.
pub fn exp_nilpotent(x: &ExactMatrix) -> ExactMatrix {
    let n = x.rows();
    let mut out = ExactMatrix::identity(n);
    let mut term = ExactMatrix::identity(n);
    for k in 1..=n as i64 {
        term = term.mul(x).scale(&ExactScalar::frac(1, k));
        if term.is_zero() {
            break;
        }
        out = out.add(&term);
    }
    out
}

/// Weil element `w = e^X e^{−Y} e^X`.
pub fn weil_element(x: &ExactMatrix, y: &ExactMatrix) -> Result<ExactMatrix> {
    NilpotentEndo::new(x.clone())?;
    NilpotentEndo::new(y.clone())?;
    let ex = exp_nilpotent(x);
    Ok(ex.mul(&exp_nilpotent(&y.neg())).mul(&ex))
}

/// `p` range covering every jump of `F^p` and of `G^{n+1−p}`.
fn p_range(f: &ExactFlag, g: &ExactFlag, n: i64) -> std::ops::RangeInclusive<i64> {
    let fs = f.dec_support();
    let gs = g.dec_support();
    let lo = (*fs.start()).min(n + 1 - gs.end());
    let hi = (*fs.end()).max(n + 1 - gs.start());
    lo..=hi
}

/// A Hodge structure of weight `n` given by two decreasing filtrations.
#[derive(Clone, Debug)]
pub struct HodgeStructure {
    pub weight: i64,
    pub f: ExactFlag,
    pub g: ExactFlag,
}

#[derive(Clone, Debug)]
pub struct HsReport {
    /// First `p` with `V ≠ F^p ⊕ G^{n+1−p}`.
    pub failing_p: Option<i64>,
    /// `V^{p,q} = F^p ∩ G^q`, nonzero pieces only.
    pub pieces: Vec<(i64, i64, ExactSubspace)>,
    /// The pieces span `V` with dimensions adding up.
    pub pieces_direct: bool,
}

impl HsReport {
    pub fn passed(&self) -> bool {
        self.failing_p.is_none() && self.pieces_direct
    }
}

/// Checks the opposedness condition for every `p` and, independently, that
/// the `(p, q)` pieces decompose `V`.
pub fn hs_verify(hs: &HodgeStructure) -> HsReport {
    let n = hs.weight;
    let dim = hs.f.ambient_dim();
    let mut failing_p = None;
    for p in p_range(&hs.f, &hs.g, n) {
        let (a, b) = (hs.f.dec(p), hs.g.dec(n + 1 - p));
        if !(a.sum(&b).is_full() && a.intersection(&b).is_zero()) {
            failing_p = Some(p);
            break;
        }
    }
    let mut pieces = Vec::new();
    for p in p_range(&hs.f, &hs.g, n) {
        let piece = hs.f.dec(p).intersection(&hs.g.dec(n - p));
        if !piece.is_zero() {
            pieces.push((p, n - p, piece));
        }
    }
    let total: usize = pieces.iter().map(|x| x.2.dim()).sum();
    let pieces_direct = total == dim && Subspace::sum_all(dim, pieces.iter().map(|x| &x.2)).is_full();
    HsReport { failing_p, pieces, pieces_direct }
}

/// A polarized Hodge structure stored as `(F, S)`; `G` is recovered from
/// the pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarizedHS {
    pub weight: i64,
    /// Decreasing Hodge filtration.
    pub f: ExactFlag,
    pub s: ExactMatrix,
}

impl PolarizedHS {
    pub fn new(weight: i64, f: ExactFlag, s: ExactMatrix) -> Result<Self> {
        if !s.is_square() || s.rows() != f.ambient_dim() {
            return Err(Error::InvalidInput(format!(
                "pairing is {}x{} but the space has dimension {}",
                s.rows(),
                s.cols(),
                f.ambient_dim()
            )));
        }
        Ok(PolarizedHS { weight, f: f.reindexed(Convention::Decreasing), s })
    }

    pub fn dim(&self) -> usize {
        self.s.rows()
    }
}

/// `G^{n+1−p} = {a : S(a, F^p) = 0}` for every `p`.
pub fn phs_recover_g(p: &PolarizedHS) -> Result<ExactFlag> {
    if p.s.rank() < p.dim() {
        return Err(Error::DegeneratePairing);
    }
    let n = p.weight;
    let fs = p.f.dec_support();
    // G^q for q = n+1−p over the support of F, read decreasingly in q.
    let (qlo, qhi) = (n + 1 - fs.end(), n + 1 - fs.start());
    let pieces: Vec<ExactSubspace> = (qlo..=qhi).map(|q| left_orthogonal(&p.s, &p.f.dec(n + 1 - q))).collect();
    Ok(Flag::new(p.dim(), Convention::Decreasing, qlo, pieces)?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhsFailure {
    NotHermitian,
    Degenerate,
    /// `V ≠ F^p ⊕ G^{n+1−p}`.
    NotOpposed { p: i64 },
    NotOrthogonal { p: i64 },
    /// `(−1)^q S` is not positive definite on `V^{p,q}`.
    NotPositive { p: i64, q: i64 },
}

#[derive(Clone, Debug)]
pub struct PhsReport {
    pub failure: Option<PhsFailure>,
    /// `(p, q, dim V^{p,q})` for the nonzero pieces.
    pub hodge_numbers: Vec<(i64, i64, usize)>,
}

impl PhsReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn phs_verify(p: &PolarizedHS) -> PhsReport {
    let fail = |f| PhsReport { failure: Some(f), hodge_numbers: vec![] };
    if p.s != p.s.adjoint() {
        return fail(PhsFailure::NotHermitian);
    }
    let g = match phs_recover_g(p) {
        Ok(g) => g,
        Err(_) => return fail(PhsFailure::Degenerate),
    };
    let n = p.weight;
    let hs = HodgeStructure { weight: n, f: p.f.clone(), g: g.clone() };
    let report = hs_verify(&hs);
    if let Some(bad) = report.failing_p {
        return fail(PhsFailure::NotOpposed { p: bad });
    }
    for q in p_range(&p.f, &g, n) {
        let (fp, gq) = (p.f.dec(q), g.dec(n + 1 - q));
        if !gram(&p.s, &fp.vectors(), &gq.vectors()).is_zero() {
            return fail(PhsFailure::NotOrthogonal { p: q });
        }
    }
    let mut hodge_numbers = Vec::new();
    for (pp, qq, piece) in report.pieces.iter().rev() {
        let basis = piece.vectors();
        let mut gm = gram(&p.s, &basis, &basis);
        if qq.rem_euclid(2) == 1 {
            gm = gm.neg();
        }
        if !hermitian_positive_definite(&gm).unwrap_or(false) {
            return fail(PhsFailure::NotPositive { p: *pp, q: *qq });
        }
        hodge_numbers.push((*pp, *qq, piece.dim()));
    }
    hodge_numbers.reverse();
    PhsReport { failure: None, hodge_numbers }
}

/// `(V, F^{•+r}, (−1)^r S)` of weight `n − 2r`.
pub fn tate_twist(p: &PolarizedHS, r: i64) -> PolarizedHS {
    let s = if r.rem_euclid(2) == 1 { p.s.neg() } else { p.s.clone() };
    PolarizedHS { weight: p.weight - 2 * r, f: p.f.shifted(r), s }
}

/// A bigraded piece `V_{l,k}` of a given dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub l: i64,
    pub k: i64,
    pub dim: usize,
}

/// A bigraded filtered space with operators `X1` of bidegree `(2, 0)`,
/// `Y2` of bidegree `(0, −2)` and a Hermitian pairing, all given as total
/// matrices in the concatenated basis of the pieces (in listed order).
#[derive(Clone, Debug, PartialEq)]
pub struct BigradedHL {
    pub n: i64,
    pieces: Vec<Piece>,
    offsets: Vec<usize>,
    pub x1: ExactMatrix,
    pub y2: ExactMatrix,
    /// Decreasing Hodge filtration on the total space.
    pub f: ExactFlag,
    /// Gram matrix of `S` on the total space.
    pub s: ExactMatrix,
}

impl BigradedHL {
    /// Checks shapes, the bidegrees of `X1`, `Y2`, `S` and compatibility of
    /// `F` with the grading.
    pub fn new(
        n: i64,
        pieces: Vec<Piece>,
        x1: ExactMatrix,
        y2: ExactMatrix,
        f: ExactFlag,
        s: ExactMatrix,
    ) -> Result<Self> {
        let mut offsets = Vec::with_capacity(pieces.len());
        let mut total = 0;
        for (i, p) in pieces.iter().enumerate() {
            if pieces[..i].iter().any(|q| (q.l, q.k) == (p.l, p.k)) {
                return Err(Error::InvalidInput(format!("piece ({}, {}) listed twice", p.l, p.k)));
            }
            offsets.push(total);
            total += p.dim;
        }
        for (name, m) in [("X1", &x1), ("Y2", &y2), ("S", &s)] {
            if m.rows() != total || m.cols() != total {
                return Err(Error::InvalidInput(format!(
                    "{name} is {}x{}, expected {total}x{total}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if f.ambient_dim() != total {
            return Err(Error::InvalidInput(format!("F lives on dimension {}, expected {total}", f.ambient_dim())));
        }
        let b = BigradedHL { n, pieces, offsets, x1, y2, f: f.reindexed(Convention::Decreasing), s };
        b.check_bidegree(&b.x1, 2, 0, "X1")?;
        b.check_bidegree(&b.y2, 0, -2, "Y2")?;
        for (i, pi) in b.pieces.iter().enumerate() {
            for (j, pj) in b.pieces.iter().enumerate() {
                if (pj.l, pj.k) != (-pi.l, -pi.k) && !b.block(&b.s, i, j).is_zero() {
                    return Err(Error::InvalidInput(format!(
                        "S pairs ({}, {}) with ({}, {})",
                        pi.l, pi.k, pj.l, pj.k
                    )));
                }
            }
        }
        for p in b.f.dec_support() {
            let fp = b.f.dec(p);
            let split = Subspace::sum_all(total, (0..b.pieces.len()).map(|i| fp.intersection(&b.piece_subspace(i))).collect::<Vec<_>>().iter());
            if split != fp {
                return Err(Error::InvalidInput(format!("F^{p} is not compatible with the bigrading")));
            }
        }
        Ok(b)
    }

    fn check_bidegree(&self, m: &ExactMatrix, dl: i64, dk: i64, name: &str) -> Result<()> {
        for (j, pj) in self.pieces.iter().enumerate() {
            for (i, pi) in self.pieces.iter().enumerate() {
                if (pi.l, pi.k) != (pj.l + dl, pj.k + dk) && !self.block(m, i, j).is_zero() {
                    return Err(Error::InvalidInput(format!(
                        "{name} maps ({}, {}) to ({}, {})",
                        pj.l, pj.k, pi.l, pi.k
                    )));
                }
            }
        }
        Ok(())
    }

    /// `m` maps every `V_{l,k}` into `V_{l+dl,k+dk}`.
    pub fn is_homogeneous(&self, m: &ExactMatrix, dl: i64, dk: i64) -> bool {
        self.check_bidegree(m, dl, dk, "").is_ok()
    }

    pub fn dim(&self) -> usize {
        self.offsets.last().map_or(0, |o| o + self.pieces.last().unwrap().dim)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn index_of(&self, l: i64, k: i64) -> Option<usize> {
        self.pieces.iter().position(|p| (p.l, p.k) == (l, k))
    }

    pub fn piece_dim(&self, l: i64, k: i64) -> usize {
        self.index_of(l, k).map_or(0, |i| self.pieces[i].dim)
    }

    /// Coordinate range of piece `i`.
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i] + self.pieces[i].dim
    }

    /// Block of a total matrix from piece `j` to piece `i`.
    pub fn block(&self, m: &ExactMatrix, i: usize, j: usize) -> ExactMatrix {
        let (ri, rj) = (self.range(i), self.range(j));
        m.block(ri.start, ri.end, rj.start, rj.end)
    }

    /// `V_{l,k}` as a coordinate subspace of the total space.
    pub fn piece_subspace(&self, i: usize) -> ExactSubspace {
        crate::weightfilt::coordinate_subspace(self.dim(), self.range(i))
    }

    pub fn v(&self, l: i64, k: i64) -> ExactSubspace {
        self.index_of(l, k).map_or_else(|| Subspace::zero(self.dim()), |i| self.piece_subspace(i))
    }

    /// `F^p V_{l,k}` in total coordinates.
    pub fn fv(&self, p: i64, l: i64, k: i64) -> ExactSubspace {
        self.f.dec(p).intersection(&self.v(l, k))
    }

    /// `H1` and `H2` eigenvalues per coordinate.
    pub fn weights(&self) -> (Vec<i64>, Vec<i64>) {
        let mut w1 = Vec::with_capacity(self.dim());
        let mut w2 = Vec::with_capacity(self.dim());
        for p in &self.pieces {
            w1.extend(std::iter::repeat(p.l).take(p.dim));
            w2.extend(std::iter::repeat(p.k).take(p.dim));
        }
        (w1, w2)
    }

    /// `Y1` with `(X1, Y1, H1)` an sl₂-triple.
    pub fn y1(&self) -> Result<ExactMatrix> {
        complete_raising(&self.x1, &self.weights().0)
    }

    /// `X2` with `(X2, Y2, H2)` an sl₂-triple.
    pub fn x2(&self) -> Result<ExactMatrix> {
        complete_lowering(&self.y2, &self.weights().1)
    }

    /// Weil elements `w1 = e^{X1} e^{−Y1} e^{X1}` and `w2 = e^{X2} e^{−Y2} e^{X2}`.
    pub fn weil_elements(&self) -> Result<(ExactMatrix, ExactMatrix)> {
        let w1 = weil_element(&self.x1, &self.y1()?)?;
        let w2 = weil_element(&self.x2()?, &self.y2)?;
        Ok((w1, w2))
    }

    /// `p` range outside of which `F^p` is `V` or `0`.
    pub fn p_support(&self) -> std::ops::RangeInclusive<i64> {
        self.f.dec_support()
    }

    fn sorted_keys(&self) -> Vec<(i64, i64)> {
        let mut keys: Vec<(i64, i64)> = self.pieces.iter().map(|p| (p.l, p.k)).collect();
        keys.sort_unstable();
        keys
    }
}

/// Which pbHL condition failed, and where.
#[derive(Clone, Debug, PartialEq)]
pub struct PbhlFailure {
    pub condition: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct PbhlReport {
    pub failure: Option<PbhlFailure>,
    /// `(−l, k)` and Hodge numbers of each nonzero bi-primitive part.
    pub primitive_parts: Vec<((i64, i64), Vec<(i64, i64, usize)>)>,
}

impl PbhlReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn filtered_iso(b: &BigradedHL, m: &ExactMatrix, src: (i64, i64), dst: (i64, i64), shift: i64) -> Option<String> {
    if b.piece_dim(src.0, src.1) != b.piece_dim(dst.0, dst.1) {
        return Some(format!("dim V{src:?} != dim V{dst:?}"));
    }
    let img = b.v(src.0, src.1).image(m);
    if img.dim() != b.piece_dim(src.0, src.1) {
        return Some(format!("map V{src:?} -> V{dst:?} is not injective"));
    }
    for p in b.p_support() {
        if b.fv(p, src.0, src.1).image(m) != b.fv(p + shift, dst.0, dst.1) {
            return Some(format!("F^{p}V{src:?} does not map onto F^{}V{dst:?}", p + shift));
        }
    }
    None
}

/// Verifies (pbHL1)–(pbHL3); the report names the first failing condition.
pub fn pbhl_verify(b: &BigradedHL) -> PbhlReport {
    let fail = |condition, detail| PbhlReport { failure: Some(PbhlFailure { condition, detail }), primitive_parts: vec![] };
    // (pbHL1)
    if b.x1.mul(&b.y2) != b.y2.mul(&b.x1) {
        return fail("pbHL1", "X1 and Y2 do not commute".into());
    }
    for p in b.p_support() {
        let fp = b.f.dec(p);
        if !b.f.dec(p + 1).contains(&fp.image(&b.x1)) {
            return fail("pbHL1", format!("X1 F^{p} is not contained in F^{}", p + 1));
        }
        if !b.f.dec(p - 1).contains(&fp.image(&b.y2)) {
            return fail("pbHL1", format!("Y2 F^{p} is not contained in F^{}", p - 1));
        }
    }
    for (l, k) in b.sorted_keys() {
        if l >= 0 {
            if let Some(e) = filtered_iso(b, &b.x1.pow(l as u32), (-l, k), (l, k), l) {
                return fail("pbHL1", format!("X1^{l}: {e}"));
            }
        }
        if k >= 0 {
            if let Some(e) = filtered_iso(b, &b.y2.pow(k as u32), (l, k), (l, -k), -k) {
                return fail("pbHL1", format!("Y2^{k}: {e}"));
            }
        }
    }
    // (pbHL2)
    if b.s != b.s.adjoint() {
        return fail("pbHL2", "S is not Hermitian".into());
    }
    if b.x1.transpose().mul(&b.s) != b.s.mul(&b.x1.conj()) {
        return fail("pbHL2", "S(X1 a, b) != S(a, X1 b)".into());
    }
    if b.y2.transpose().mul(&b.s) != b.s.mul(&b.y2.conj()) {
        return fail("pbHL2", "S(a, Y2 b) != S(Y2 a, b)".into());
    }
    // (pbHL3)
    let mut primitive_parts = Vec::new();
    for (ml, k) in b.sorted_keys() {
        if ml > 0 || k < 0 {
            continue;
        }
        let l = -ml;
        let prim = b
            .v(ml, k)
            .intersection(&b.x1.pow(l as u32 + 1).kernel())
            .intersection(&b.y2.pow(k as u32 + 1).kernel());
        if prim.is_zero() {
            continue;
        }
        let basis = prim.vectors();
        let xl = b.x1.pow(l as u32);
        let yk = b.y2.neg().pow(k as u32);
        let left: Vec<Vec<ExactScalar>> = basis.iter().map(|v| xl.apply(v)).collect();
        let right: Vec<Vec<ExactScalar>> = basis.iter().map(|v| yk.apply(v)).collect();
        let q = gram(&b.s, &left, &right);
        let f_prim = {
            let pieces: Vec<ExactSubspace> = b.p_support().map(|p| prim.relative(&b.f.dec(p).intersection(&prim))).collect();
            match Flag::new(prim.dim(), Convention::Decreasing, *b.p_support().start(), pieces) {
                Ok(f) => f,
                Err(e) => return fail("pbHL3", format!("induced flag on P({ml},{k}): {e}")),
            }
        };
        let phs = PolarizedHS { weight: b.n - l + k, f: f_prim, s: q };
        let rep = phs_verify(&phs);
        if let Some(f) = rep.failure {
            return fail("pbHL3", format!("P({ml},{k}) at weight {}: {f:?}", b.n - l + k));
        }
        primitive_parts.push(((ml, k), rep.hodge_numbers));
    }
    PbhlReport { failure: None, primitive_parts }
}

/// `V^{p,q}_{j,k}` for all pieces and all `p`.
#[derive(Clone, Debug)]
pub struct HodgeDecomposition {
    /// Keyed by `(j, k, p, q)`; nonzero pieces only.
    pub pieces: BTreeMap<(i64, i64, i64, i64), ExactSubspace>,
    /// The pieces of every `V_{j,k}` form a direct sum equal to `V_{j,k}`.
    pub direct_sum: bool,
    /// `X1 V^{p,q}_{j,k} ⊆ V^{p+1,q+1}_{j+2,k}`.
    pub x1_compatible: bool,
}

impl HodgeDecomposition {
    /// The operator acting as `(−1)^q` on `V^{p,q}`.
    pub fn c_operator(&self, dim: usize) -> ExactMatrix {
        let mut cols = Vec::new();
        let mut images = Vec::new();
        for ((_, _, _, q), sub) in &self.pieces {
            let sign = ExactScalar::from_int(if q.rem_euclid(2) == 0 { 1 } else { -1 });
            for v in sub.vectors() {
                images.push(v.iter().map(|x| x.times(&sign)).collect());
                cols.push(v);
            }
        }
        let basis = ExactMatrix::from_columns(dim, &cols);
        ExactMatrix::from_columns(dim, &images).mul(&basis.inverse().expect("Hodge pieces form a basis"))
    }
}

fn hodge_pieces(b: &BigradedHL) -> BTreeMap<(i64, i64, i64, i64), ExactSubspace> {
    let mut out = BTreeMap::new();
    for pc in b.pieces() {
        let (j, k) = (pc.l, pc.k);
        for p in b.p_support() {
            let q = b.n + j + k - p;
            let partner = b.fv(p - j - k + 1, -j, -k);
            let piece = b.fv(p, j, k).intersection(&left_orthogonal(&b.s, &partner));
            if !piece.is_zero() {
                out.insert((j, k, p, q), piece);
            }
        }
    }
    out
}

/// Hodge decomposition of each `V_{j,k}` from `F` and `S`; refuses when
/// the structure does not verify.
pub fn pbhl_hodge_decomposition(b: &BigradedHL) -> Result<HodgeDecomposition> {
    if let Some(f) = pbhl_verify(b).failure {
        return Err(Error::VerificationFailed(format!("{}: {}", f.condition, f.detail)));
    }
    let pieces = hodge_pieces(b);
    let mut direct_sum = true;
    for pc in b.pieces() {
        let parts: Vec<&ExactSubspace> = pieces
            .iter()
            .filter(|((j, k, _, _), _)| (*j, *k) == (pc.l, pc.k))
            .map(|(_, s)| s)
            .collect();
        let total: usize = parts.iter().map(|s| s.dim()).sum();
        direct_sum &= total == pc.dim && Subspace::sum_all(b.dim(), parts.iter().copied()) == b.v(pc.l, pc.k);
    }
    let x1_compatible = pieces.iter().all(|((j, k, p, q), sub)| {
        let img = sub.image(&b.x1);
        img.is_zero() || pieces.get(&(j + 2, *k, p + 1, q + 1)).is_some_and(|t| t.contains(&img))
    });
    Ok(HodgeDecomposition { pieces, direct_sum, x1_compatible })
}

#[derive(Serialize, Deserialize)]
struct SBlock {
    l: i64,
    k: i64,
    matrix: ExactMatrix,
}

#[derive(Serialize, Deserialize)]
struct BigradedRepr {
    #[serde(rename = "n")]
    n: i64,
    #[serde(rename = "pieces")]
    pieces: Vec<Piece>,
    #[serde(rename = "X1")]
    x1: ExactMatrix,
    #[serde(rename = "Y2")]
    y2: ExactMatrix,
    #[serde(rename = "F")]
    f: ExactFlag,
    #[serde(rename = "S")]
    s: Vec<SBlock>,
}

impl BigradedHL {
    /// Assembles the total Gram matrix from blocks `S_{l,k}` (rows indexed by
    /// `V_{l,k}`, columns by `V_{−l,−k}`). A block whose partner
    /// `S_{−l,−k}` is absent determines it by `S_{−l,−k} = S_{l,k}*`.
    pub fn assemble_pairing(pieces: &[Piece], blocks: &[(i64, i64, ExactMatrix)]) -> Result<ExactMatrix> {
        let mut offsets = Vec::new();
        let mut total = 0;
        for p in pieces {
            offsets.push(total);
            total += p.dim;
        }
        let idx = |l: i64, k: i64| pieces.iter().position(|p| (p.l, p.k) == (l, k));
        let mut s = ExactMatrix::zeros(total, total);
        let given: Vec<(i64, i64)> = blocks.iter().map(|b| (b.0, b.1)).collect();
        for (l, k, m) in blocks {
            let (Some(i), Some(j)) = (idx(*l, *k), idx(-l, -k)) else {
                return Err(Error::InvalidInput(format!("S block ({l}, {k}) refers to a missing piece")));
            };
            if m.rows() != pieces[i].dim || m.cols() != pieces[j].dim {
                return Err(Error::InvalidInput(format!(
                    "S block ({l}, {k}) is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    pieces[i].dim,
                    pieces[j].dim
                )));
            }
            s.set_block(offsets[i], offsets[j], m);
            if !given.contains(&(-l, -k)) {
                s.set_block(offsets[j], offsets[i], &m.adjoint());
            }
        }
        Ok(s)
    }

    /// Blocks `S_{l,k}` for every piece whose partner exists.
    pub fn pairing_blocks(&self) -> Vec<(i64, i64, ExactMatrix)> {
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if let Some(j) = self.index_of(-p.l, -p.k) {
                out.push((p.l, p.k, self.block(&self.s, i, j)));
            }
        }
        out
    }
}

impl Serialize for BigradedHL {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        BigradedRepr {
            n: self.n,
            pieces: self.pieces.clone(),
            x1: self.x1.clone(),
            y2: self.y2.clone(),
            f: self.f.clone(),
            s: self.pairing_blocks().into_iter().map(|(l, k, matrix)| SBlock { l, k, matrix }).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BigradedHL {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = BigradedRepr::deserialize(deserializer)?;
        let blocks: Vec<(i64, i64, ExactMatrix)> = r.s.into_iter().map(|b| (b.l, b.k, b.matrix)).collect();
        let s = BigradedHL::assemble_pairing(&r.pieces, &blocks).map_err(D::Error::custom)?;
        BigradedHL::new(r.n, r.pieces, r.x1, r.y2, r.f, s).map_err(D::Error::custom)
    }
}

/// Cohomology of a compact Kähler manifold with one Lefschetz operator, as
/// a bigraded structure concentrated in `k = 0`.
///
/// `betti[m]`, `lefschetz[m] : H^m → H^{m+2}`, `hodge_levels[m][i]` is the
/// `p` of basis vector `i` of `H^m` (a Hodge basis), and `base[m]` is the
/// Gram matrix of `B(a, b) = ε(n+1)/(2πi)^n ∫ a ∧ b̄` on `H^m × H^{2n−m}`.
/// The pairing is `S_ℓ = ε(ℓ)(−1)^{ℓn} B`.
pub fn kahler_hl(
    n: i64,
    betti: &[usize],
    lefschetz: &[ExactMatrix],
    hodge_levels: &[Vec<i64>],
    base: &[ExactMatrix],
) -> Result<BigradedHL> {
    use crate::exactcore::{epsilon, sign_pow};
    let degrees: Vec<usize> = (0..betti.len()).filter(|&m| betti[m] > 0).collect();
    let pieces: Vec<Piece> = degrees.iter().map(|&m| Piece { l: m as i64 - n, k: 0, dim: betti[m] }).collect();
    let mut offsets = BTreeMap::new();
    let mut total = 0;
    for &m in &degrees {
        offsets.insert(m, total);
        total += betti[m];
    }
    let mut x1 = ExactMatrix::zeros(total, total);
    for &m in &degrees {
        if let (Some(&to), Some(l)) = (offsets.get(&(m + 2)), lefschetz.get(m)) {
            x1.set_block(to, offsets[&m], l);
        }
    }
    let mut levels = Vec::new();
    for &m in &degrees {
        for (i, &p) in hodge_levels[m].iter().enumerate() {
            let mut v = vec![ExactScalar::zero(); total];
            v[offsets[&m] + i] = ExactScalar::one();
            levels.push((p, v));
        }
    }
    let f = Flag::decreasing_from_levels(total, &levels);
    let mut s = ExactMatrix::zeros(total, total);
    for &m in &degrees {
        let dual = (2 * n) as usize - m;
        if let Some(&to) = offsets.get(&dual) {
            let l = m as i64 - n;
            let c = ExactScalar::from_int(epsilon(l) * sign_pow(l * n));
            s.set_block(offsets[&m], to, &base[m].scale(&c));
        }
    }
    let y2 = ExactMatrix::zeros(total, total);
    BigradedHL::new(n, pieces, x1, y2, f, s)
}
