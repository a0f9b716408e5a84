//! Monodromy weight filtration of a nilpotent operator, its primitive parts,
//! the Lefschetz decomposition of `gr^W`, the sl₂ completion, and the
//! strictness and filtered-Lefschetz checks for filtered nilpotent operators.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactcore::{
    Convention, ExactError, ExactFlag, ExactMatrix, ExactScalar, ExactSubspace, Field, Flag, Subspace,
};

/// A nilpotent square matrix together with its nilpotency index.
#[derive(Clone, Debug, PartialEq)]
pub struct NilpotentEndo {
    matrix: ExactMatrix,
    nilpotency_index: usize,
}

impl NilpotentEndo {
    pub fn new(matrix: ExactMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(ExactError::NotSquare { rows: matrix.rows(), cols: matrix.cols() }.into());
        }
        let n = matrix.rows();
        let mut p = ExactMatrix::identity(n);
        for k in 0..=n {
            if p.is_zero() {
                return Ok(NilpotentEndo { matrix, nilpotency_index: k });
            }
            p = p.mul(&matrix);
        }
        Err(Error::NotNilpotent)
    }

    pub fn zero(dim: usize) -> Self {
        NilpotentEndo { matrix: ExactMatrix::zeros(dim, dim), nilpotency_index: usize::from(dim > 0) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ExactMatrix {
        &self.matrix
    }

    /// Smallest `k` with `N^k = 0`.
    pub fn nilpotency_index(&self) -> usize {
        self.nilpotency_index
    }

    pub fn power(&self, k: usize) -> ExactMatrix {
        if k >= self.nilpotency_index {
            return ExactMatrix::zeros(self.dim(), self.dim());
        }
        self.matrix.pow(k as u32)
    }

    fn kernel_of_power(&self, k: i64) -> ExactSubspace {
        if k <= 0 {
            Subspace::zero(self.dim())
        } else if k as usize >= self.nilpotency_index {
            Subspace::full(self.dim())
        } else {
            self.power(k as usize).kernel()
        }
    }
}

/// An increasing filtration centered at weight 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CenteredFiltration {
    pub flag: ExactFlag,
}

impl CenteredFiltration {
    pub fn w(&self, k: i64) -> ExactSubspace {
        self.flag.inc(k)
    }

    pub fn gr_dim(&self, k: i64) -> usize {
        self.w(k).dim() - self.w(k - 1).dim()
    }
}

/// The monodromy weight filtration `W(N)`.
///
/// Built from `W_k = Σ_{j ≥ max(0,-k)} N^j ker N^{k+2j+1}`; both defining
/// axioms are re-verified before returning.
pub fn monodromy_filtration(n: &NilpotentEndo) -> Result<CenteredFiltration> {
    let d = n.dim();
    let m = n.nilpotency_index();
    let mut pows = vec![ExactMatrix::identity(d)];
    for j in 1..m {
        pows.push(pows[j - 1].mul(n.matrix()));
    }
    // kers[i] = ker N^i for 0 ≤ i ≤ m.
    let kers: Vec<ExactSubspace> = (0..=m).map(|i| n.kernel_of_power(i as i64)).collect();
    let mi = m as i64;
    let pieces: Vec<ExactSubspace> = (-mi..mi)
        .map(|k| {
            let mut vecs = Vec::new();
            for j in 0i64.max(-k)..mi {
                let e = (k + 2 * j + 1).min(mi);
                if e > 0 {
                    vecs.extend(kers[e as usize].image(&pows[j as usize]).vectors());
                }
            }
            Subspace::span(d, &vecs)
        })
        .collect();
    let flag = Flag::new(d, Convention::Increasing, -mi, pieces)?;
    let w = CenteredFiltration { flag };
    verify_monodromy_axioms(n, &w)?;
    Ok(w)
}

/// Checks `N W_k ⊆ W_{k-2}` and that `N^ℓ : gr_ℓ → gr_{-ℓ}` is bijective.
pub fn verify_monodromy_axioms(n: &NilpotentEndo, w: &CenteredFiltration) -> Result<()> {
    let m = n.nilpotency_index() as i64 + 1;
    for k in -m..=m {
        if !w.w(k - 2).contains(&w.w(k).image(n.matrix())) {
            return Err(Error::InvariantViolation(format!("N W_{k} is not contained in W_{}", k - 2)));
        }
    }
    for l in 1..=m {
        let nl = n.power(l as usize);
        let killed = w.w(l).intersection(&Subspace::preimage(&nl, &w.w(-l - 1)));
        if killed != w.w(l - 1) || w.gr_dim(l) != w.gr_dim(-l) {
            return Err(Error::InvariantViolation(format!("N^{l} is not an isomorphism gr_{l} -> gr_-{l}")));
        }
    }
    Ok(())
}

/// Coordinate subspace spanned by the given standard basis vectors.
pub fn coordinate_subspace(dim: usize, indices: impl IntoIterator<Item = usize>) -> ExactSubspace {
    let vecs: Vec<Vec<ExactScalar>> = indices
        .into_iter()
        .map(|i| {
            let mut v = vec![ExactScalar::zero(); dim];
            v[i] = ExactScalar::one();
            v
        })
        .collect();
    Subspace::span(dim, &vecs)
}

/// The span of coordinates whose weight equals `l`.
pub fn weight_space(weights: &[i64], l: i64) -> ExactSubspace {
    coordinate_subspace(weights.len(), (0..weights.len()).filter(|&i| weights[i] == l))
}

pub fn weight_operator(weights: &[i64]) -> ExactMatrix {
    let diag: Vec<ExactScalar> = weights.iter().map(|&w| ExactScalar::from_int(w)).collect();
    ExactMatrix::diagonal(&diag)
}

/// `ker Y^{l+1} ∩ V_l` for a weight-lowering `y`.
pub fn primitive_subspace(y: &ExactMatrix, weights: &[i64], l: i64) -> ExactSubspace {
    weight_space(weights, l).intersection(&y.pow((l + 1).max(0) as u32).kernel())
}

/// Completes a lowering operator `y` (weight −2) to an sl₂-triple with
/// `H = diag(weights)`; returns the raising operator `X`.
///
/// On each primitive string `v, Yv, …, Y^l v` the completion is
/// `X Y^k v = k(l−k+1) Y^{k−1} v`.
pub fn complete_lowering(y: &ExactMatrix, weights: &[i64]) -> Result<ExactMatrix> {
    let d = weights.len();
    let mut basis = Vec::with_capacity(d);
    let mut images = Vec::with_capacity(d);
    let mut ls: Vec<i64> = weights.iter().copied().filter(|&l| l >= 0).collect();
    ls.sort_unstable();
    ls.dedup();
    for l in ls {
        for v in primitive_subspace(y, weights, l).vectors() {
            let mut string = vec![v];
            for _ in 0..l {
                let next = y.apply(string.last().unwrap());
                string.push(next);
            }
            for k in 0..=l as usize {
                basis.push(string[k].clone());
                let img = if k == 0 {
                    vec![ExactScalar::zero(); d]
                } else {
                    let c = ExactScalar::from_int(k as i64 * (l - k as i64 + 1));
                    string[k - 1].iter().map(|x| x.times(&c)).collect()
                };
                images.push(img);
            }
        }
    }
    let b = ExactMatrix::from_columns(d, &basis);
    let inv = b
        .inverse()
        .ok_or_else(|| Error::InvariantViolation("lowering operator does not satisfy hard Lefschetz".into()))?;
    Ok(ExactMatrix::from_columns(d, &images).mul(&inv))
}

/// Completes a raising operator `x` (weight +2); returns the lowering
/// operator `Y` with `[X, Y] = H`.
pub fn complete_raising(x: &ExactMatrix, weights: &[i64]) -> Result<ExactMatrix> {
    let neg: Vec<i64> = weights.iter().map(|w| -w).collect();
    complete_lowering(x, &neg)
}

/// `[X,Y] = H`, `[H,X] = 2X`, `[H,Y] = −2Y` exactly.
pub fn sl2_relations_hold(x: &ExactMatrix, y: &ExactMatrix, weights: &[i64]) -> bool {
    let h = weight_operator(weights);
    let two = ExactScalar::from_int(2);
    x.commutator(y) == h && h.commutator(x) == x.scale(&two) && h.commutator(y) == y.scale(&two).neg()
}

/// `gr^W` in coordinates of an adapted basis of `V`.
#[derive(Clone, Debug)]
pub struct WeightGraded {
    /// Weight of each graded coordinate, ascending.
    pub weights: Vec<i64>,
    /// Columns are lifts to `V` of the graded basis.
    pub lift: ExactMatrix,
    pub lift_inv: ExactMatrix,
    /// `gr N` in graded coordinates.
    pub y: ExactMatrix,
    blocks: BTreeMap<i64, (usize, usize)>,
}

impl WeightGraded {
    pub fn new(n: &NilpotentEndo, w: &CenteredFiltration) -> Self {
        let d = n.dim();
        let m = n.nilpotency_index() as i64;
        let mut weights = Vec::with_capacity(d);
        let mut cols = Vec::with_capacity(d);
        let mut blocks = BTreeMap::new();
        for l in -m..=m {
            let lifts = w.w(l).quotient_basis(&w.w(l - 1));
            if lifts.is_empty() {
                continue;
            }
            blocks.insert(l, (cols.len(), lifts.len()));
            weights.extend(std::iter::repeat(l).take(lifts.len()));
            cols.extend(lifts);
        }
        let lift = ExactMatrix::from_columns(d, &cols);
        let lift_inv = lift.inverse().expect("adapted basis is a basis");
        let full = lift_inv.mul(n.matrix()).mul(&lift);
        let mut y = ExactMatrix::zeros(d, d);
        for (i, wi) in weights.iter().enumerate() {
            for (j, wj) in weights.iter().enumerate() {
                if *wi == wj - 2 {
                    y.set(i, j, full.get(i, j).clone());
                }
            }
        }
        WeightGraded { weights, lift, lift_inv, y, blocks }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn gr_dim(&self, l: i64) -> usize {
        self.blocks.get(&l).map_or(0, |b| b.1)
    }

    pub fn gr_subspace(&self, l: i64) -> ExactSubspace {
        weight_space(&self.weights, l)
    }

    /// The occurring weights, ascending.
    pub fn support(&self) -> Vec<i64> {
        self.blocks.keys().copied().collect()
    }

    /// Image in `gr_l` (graded coordinates) of a subspace of `W_l`.
    pub fn project(&self, sub: &ExactSubspace, l: i64) -> ExactSubspace {
        let vecs: Vec<Vec<ExactScalar>> = sub
            .vectors()
            .iter()
            .map(|v| {
                let mut c = self.lift_inv.apply(v);
                for (x, w) in c.iter_mut().zip(&self.weights) {
                    if *w != l {
                        *x = ExactScalar::zero();
                    }
                }
                c
            })
            .collect();
        Subspace::span(self.dim(), &vecs)
    }
}

/// Weight filtration with graded data, computed once and queried by the
/// per-operation functions below.
#[derive(Clone, Debug)]
pub struct Monodromy {
    pub op: NilpotentEndo,
    pub filtration: CenteredFiltration,
    pub graded: WeightGraded,
}

/// `P_ℓ ⊆ gr_ℓ` together with its quotient presentation in `V`.
#[derive(Clone, Debug)]
pub struct PrimitivePart {
    pub weight: i64,
    /// `ker Y^{ℓ+1} ∩ gr_ℓ` in graded coordinates.
    pub graded: ExactSubspace,
    /// Lifts of a basis of `ker N^{ℓ+1} / (ker N^ℓ + im N ∩ ker N^{ℓ+1})`.
    pub quotient_basis: Vec<Vec<ExactScalar>>,
}

impl PrimitivePart {
    pub fn dim(&self) -> usize {
        self.graded.dim()
    }
}

#[derive(Clone, Debug)]
pub struct LefschetzPiece {
    pub k: u32,
    /// Weight `ℓ + 2k` of the primitive part this piece comes from.
    pub primitive_weight: i64,
    /// `Y^k P_{ℓ+2k}` in graded coordinates.
    pub subspace: ExactSubspace,
}

/// `gr_ℓ = ⊕_k N^k P_{ℓ+2k}` for every weight, with a direct-sum certificate.
#[derive(Clone, Debug)]
pub struct LefschetzDecomposition {
    pub rows: BTreeMap<i64, Vec<LefschetzPiece>>,
    /// Dimensions add up, the sum is all of `gr_ℓ`, and pairwise
    /// intersections vanish, for every `ℓ`.
    pub certified: bool,
}

impl Monodromy {
    pub fn new(op: &NilpotentEndo) -> Result<Self> {
        let filtration = monodromy_filtration(op)?;
        let graded = WeightGraded::new(op, &filtration);
        Ok(Monodromy { op: op.clone(), filtration, graded })
    }

    pub fn primitive_part(&self, l: i64) -> Result<PrimitivePart> {
        if l < 0 {
            return Err(Error::NegativeIndex(l));
        }
        let graded = primitive_subspace(&self.graded.y, &self.graded.weights, l);
        let top = self.op.kernel_of_power(l + 1);
        let lower = self
            .op
            .kernel_of_power(l)
            .sum(&self.op.matrix().image().intersection(&top));
        let quotient_basis = top.quotient_basis(&lower);
        if quotient_basis.len() != graded.dim() {
            return Err(Error::InvariantViolation(format!(
                "primitive part P_{l}: graded dim {} but quotient dim {}",
                graded.dim(),
                quotient_basis.len()
            )));
        }
        Ok(PrimitivePart { weight: l, graded, quotient_basis })
    }

    pub fn lefschetz_decomposition(&self) -> LefschetzDecomposition {
        let g = &self.graded;
        let support = g.support();
        let mut rows = BTreeMap::new();
        let mut certified = true;
        for &l in &support {
            let mut pieces = Vec::new();
            let max_l = support.last().copied().unwrap_or(0);
            let mut k = 0i64.max(-l);
            while l + 2 * k <= max_l {
                let p = primitive_subspace(&g.y, &g.weights, l + 2 * k);
                let sub = p.image(&g.y.pow(k as u32));
                if !sub.is_zero() {
                    pieces.push(LefschetzPiece { k: k as u32, primitive_weight: l + 2 * k, subspace: sub });
                }
                k += 1;
            }
            let total: usize = pieces.iter().map(|p| p.subspace.dim()).sum();
            let sum = Subspace::sum_all(g.dim(), pieces.iter().map(|p| &p.subspace));
            let pairwise = pieces.iter().enumerate().all(|(i, a)| {
                pieces[i + 1..].iter().all(|b| a.subspace.intersection(&b.subspace).is_zero())
            });
            certified &= total == g.gr_dim(l) && sum == g.gr_subspace(l) && pairwise;
            rows.insert(l, pieces);
        }
        LefschetzDecomposition { rows, certified }
    }

    /// Raising operator `X` on `gr^W` completing `(X, gr N, H)` to an
    /// sl₂-triple.
    pub fn sl2_complete(&self) -> Result<ExactMatrix> {
        let x = complete_lowering(&self.graded.y, &self.graded.weights)?;
        if !sl2_relations_hold(&x, &self.graded.y, &self.graded.weights) {
            return Err(Error::InvariantViolation("sl2 relations fail after completion".into()));
        }
        Ok(x)
    }
}

pub fn primitive_part(n: &NilpotentEndo, l: i64) -> Result<PrimitivePart> {
    if l < 0 {
        return Err(Error::NegativeIndex(l));
    }
    Monodromy::new(n)?.primitive_part(l)
}

pub fn lefschetz_decomposition(n: &NilpotentEndo) -> Result<LefschetzDecomposition> {
    Ok(Monodromy::new(n)?.lefschetz_decomposition())
}

pub fn sl2_complete(n: &NilpotentEndo) -> Result<ExactMatrix> {
    Monodromy::new(n)?.sl2_complete()
}

/// A nilpotent operator with an increasing filtration `F_•` such that
/// `N F_b ⊆ F_{b+1}`.
#[derive(Clone, Debug)]
pub struct FilteredOperator {
    hodge_flag: ExactFlag,
    op: NilpotentEndo,
}

/// Index range of `F_b` (increasing reading) outside of which the flag is
/// constant.
fn inc_support(f: &ExactFlag) -> (i64, i64) {
    let (lo, hi) = f.range();
    match f.convention() {
        Convention::Increasing => (lo - 1, hi + 1),
        Convention::Decreasing => (-hi - 1, -lo + 1),
    }
}

impl FilteredOperator {
    pub fn new(hodge_flag: ExactFlag, op: NilpotentEndo) -> Result<Self> {
        if hodge_flag.ambient_dim() != op.dim() {
            return Err(ExactError::AmbientMismatch { left: hodge_flag.ambient_dim(), right: op.dim() }.into());
        }
        let (lo, hi) = inc_support(&hodge_flag);
        for b in lo..=hi {
            if !hodge_flag.inc(b + 1).contains(&hodge_flag.inc(b).image(op.matrix())) {
                return Err(Error::FiltrationNotPreserved { index: b });
            }
        }
        Ok(FilteredOperator { hodge_flag, op })
    }

    pub fn flag(&self) -> &ExactFlag {
        &self.hodge_flag
    }

    pub fn op(&self) -> &NilpotentEndo {
        &self.op
    }

    fn f(&self, b: i64) -> ExactSubspace {
        self.hodge_flag.inc(b)
    }
}

/// `N^a F_b = F_{a+b} ∩ N^a V`.
pub fn check_strictness(fo: &FilteredOperator, a: u32, b: i64) -> bool {
    let na = fo.op.power(a as usize);
    fo.f(b).image(&na) == fo.f(a as i64 + b).intersection(&na.image())
}

#[derive(Clone, Debug, PartialEq)]
pub enum LefschetzFailureKind {
    /// `F_b gr_r ≠ ⊕_k N^k F_{b−k} P_{r+2k}`.
    Decomposition,
    /// `N^r : F_b gr_r → F_{b+r} gr_{−r}` is not bijective.
    Isomorphism,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LefschetzFailure {
    pub kind: LefschetzFailureKind,
    pub r: i64,
    pub b: i64,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
}

#[derive(Clone, Debug)]
pub struct FilteredLefschetzReport {
    pub checks: usize,
    pub first_failure: Option<LefschetzFailure>,
}

impl FilteredLefschetzReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Verifies the filtered Lefschetz decomposition of `gr^W` and the filtered
/// isomorphisms `N^r : F_b gr_r → F_{b+r} gr_{−r}` after checking
/// strictness on the whole range where it can fail.
pub fn check_filtered_lefschetz(fo: &FilteredOperator) -> Result<FilteredLefschetzReport> {
    let nu = fo.op.nilpotency_index() as i64;
    let (lo, hi) = inc_support(&fo.hodge_flag);
    for a in 0..=nu as u32 {
        for b in (lo - nu - 1)..=(hi + 1) {
            if !check_strictness(fo, a, b) {
                return Err(Error::StrictnessPrereqFailed { a, b });
            }
        }
    }
    let mono = Monodromy::new(&fo.op)?;
    let g = &mono.graded;
    let w = &mono.filtration;
    let f_gr = |b: i64, r: i64| g.project(&fo.f(b).intersection(&w.w(r)), r);
    let mut checks = 0;
    for &r in &g.support() {
        for b in (lo - 2 * nu - 1)..=(hi + nu + 1) {
            checks += 1;
            let lhs = f_gr(b, r);
            let mut rhs = Subspace::zero(g.dim());
            let mut k = 0i64.max(-r);
            while r + 2 * k <= nu {
                let prim = primitive_subspace(&g.y, &g.weights, r + 2 * k).intersection(&f_gr(b - k, r + 2 * k));
                rhs = rhs.sum(&prim.image(&g.y.pow(k as u32)));
                k += 1;
            }
            if lhs != rhs {
                return Ok(FilteredLefschetzReport {
                    checks,
                    first_failure: Some(LefschetzFailure {
                        kind: LefschetzFailureKind::Decomposition,
                        r,
                        b,
                        lhs_dim: lhs.dim(),
                        rhs_dim: rhs.dim(),
                    }),
                });
            }
            if r >= 0 {
                let img = lhs.image(&g.y.pow(r as u32));
                let target = f_gr(b + r, -r);
                if img.dim() != lhs.dim() || img != target {
                    return Ok(FilteredLefschetzReport {
                        checks,
                        first_failure: Some(LefschetzFailure {
                            kind: LefschetzFailureKind::Isomorphism,
                            r,
                            b,
                            lhs_dim: lhs.dim(),
                            rhs_dim: target.dim(),
                        }),
                    });
                }
            }
        }
    }
    Ok(FilteredLefschetzReport { checks, first_failure: None })
}

/// Direct sum of nilpotent Jordan blocks `J_{λ}` with `N e_{j+1} = e_j`
/// inside each block.
pub fn jordan_nilpotent(partition: &[usize]) -> ExactMatrix {
    let d: usize = partition.iter().sum();
    let mut m = ExactMatrix::zeros(d, d);
    let mut off = 0;
    for &l in partition {
        for j in 1..l {
            m.set(off + j - 1, off + j, ExactScalar::one());
        }
        off += l;
    }
    m
}
