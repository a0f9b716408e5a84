//! Differentials on polarized bigraded Hodge–Lefschetz structures, the
//! Hodge metric `h⁺`, the formal Laplacian and the induced structure on
//! cohomology.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactcore::{
    hermitian_positive_definite, hermitian_positive_semidefinite, Convention, ExactMatrix, ExactScalar,
    ExactSubspace, Flag, Subspace,
};
use crate::hodgelefschetz::{gram, pbhl_hodge_decomposition, pbhl_verify, BigradedHL, PbhlReport, Piece};

/// A bigraded structure with a differential of bidegree `(+1, −1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifferentialPBHL {
    pub base: BigradedHL,
    pub d: ExactMatrix,
}

#[derive(Deserialize)]
struct DifferentialRepr {
    base: BigradedHL,
    d: ExactMatrix,
}

impl<'de> Deserialize<'de> for DifferentialPBHL {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = DifferentialRepr::deserialize(deserializer)?;
        DifferentialPBHL::new(r.base, r.d).map_err(D::Error::custom)
    }
}

impl DifferentialPBHL {
    /// Checks `d² = 0`, skewness against `S`, `[X1, d] = [Y2, d] = 0`,
    /// the bidegree and `d F^p ⊆ F^p`.
    pub fn new(base: BigradedHL, d: ExactMatrix) -> Result<Self> {
        let n = base.dim();
        if d.rows() != n || d.cols() != n {
            return Err(Error::InvalidInput(format!("d is {}x{}, expected {n}x{n}", d.rows(), d.cols())));
        }
        let bad = |m: &str| Err(Error::InvariantViolation(m.to_string()));
        if !base.is_homogeneous(&d, 1, -1) {
            return bad("d does not have bidegree (1, -1)");
        }
        if !d.mul(&d).is_zero() {
            return bad("d^2 != 0");
        }
        if !d.transpose().mul(&base.s).add(&base.s.mul(&d.conj())).is_zero() {
            return bad("d is not skew with respect to S");
        }
        if !base.x1.commutator(&d).is_zero() {
            return bad("[X1, d] != 0");
        }
        if !base.y2.commutator(&d).is_zero() {
            return bad("[Y2, d] != 0");
        }
        for p in base.p_support() {
            let fp = base.f.dec(p);
            if !fp.contains(&fp.image(&d)) {
                return Err(Error::InvariantViolation(format!("d does not preserve F^{p}")));
            }
        }
        Ok(DifferentialPBHL { base, d })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }
}

/// The Hodge operator `C`, the Weil elements and the Gram matrix of
/// `h⁺(a, b) = S(Ca, w1 w2 b)`.
#[derive(Clone, Debug)]
pub struct HodgeMetric {
    pub c: ExactMatrix,
    pub w1: ExactMatrix,
    pub w2: ExactMatrix,
    pub h_plus: ExactMatrix,
}

impl HodgeMetric {
    /// `h⁺(a, b)` as a scalar.
    pub fn eval(&self, a: &[ExactScalar], b: &[ExactScalar]) -> ExactScalar {
        crate::hodgelefschetz::pair(&self.h_plus, a, b)
    }
}

/// Fails unless the base verifies and `h⁺` is positive definite.
pub fn hodge_metric(base: &BigradedHL) -> Result<HodgeMetric> {
    let dec = pbhl_hodge_decomposition(base).map_err(|e| Error::InvariantViolation(e.to_string()))?;
    if !dec.direct_sum {
        return Err(Error::InvariantViolation("Hodge pieces do not decompose V".into()));
    }
    let c = dec.c_operator(base.dim());
    let (w1, w2) = base.weil_elements()?;
    let h_plus = c.transpose().mul(&base.s).mul(&w1.mul(&w2).conj());
    if !hermitian_positive_definite(&h_plus).unwrap_or(false) {
        return Err(Error::InvariantViolation("h+ is not positive definite".into()));
    }
    Ok(HodgeMetric { c, w1, w2, h_plus })
}

/// `d* = −w2⁻¹ w1⁻¹ d w1 w2`, checked against the `h⁺`-adjoint
/// `conj(H⁺⁻¹ dᵀ H⁺)`.
pub fn adjoint(dp: &DifferentialPBHL) -> Result<ExactMatrix> {
    adjoint_with(dp, &hodge_metric(&dp.base)?)
}

fn adjoint_with(dp: &DifferentialPBHL, m: &HodgeMetric) -> Result<ExactMatrix> {
    let w = m.w1.mul(&m.w2);
    let winv = w.inverse().ok_or_else(|| Error::InvariantViolation("w1 w2 is singular".into()))?;
    let formula = winv.mul(&dp.d).mul(&w).neg();
    let hinv = m.h_plus.inverse().expect("positive definite");
    let direct = hinv.mul(&dp.d.transpose()).mul(&m.h_plus).conj();
    if formula != direct {
        return Err(Error::InvariantViolation("d* formula disagrees with the h+-adjoint".into()));
    }
    Ok(formula)
}

/// `Δ = d d* + d* d`, asserted to commute with `X1`, `Y2` and to preserve
/// bidegree.
pub fn laplacian(dp: &DifferentialPBHL) -> Result<ExactMatrix> {
    let ds = adjoint(dp)?;
    laplacian_from(dp, &ds)
}

fn laplacian_from(dp: &DifferentialPBHL, ds: &ExactMatrix) -> Result<ExactMatrix> {
    let lap = dp.d.mul(ds).add(&ds.mul(&dp.d));
    if !dp.base.x1.commutator(&lap).is_zero() {
        return Err(Error::InvariantViolation("[X1, Laplacian] != 0".into()));
    }
    if !dp.base.y2.commutator(&lap).is_zero() {
        return Err(Error::InvariantViolation("[Y2, Laplacian] != 0".into()));
    }
    if !dp.base.is_homogeneous(&lap, 0, 0) {
        return Err(Error::InvariantViolation("Laplacian does not preserve bidegree".into()));
    }
    Ok(lap)
}

/// `d1 = [Y1, d]` and `d2 = −[X2, d]`.
pub fn derived_operators(dp: &DifferentialPBHL) -> Result<(ExactMatrix, ExactMatrix)> {
    let y1 = dp.base.y1()?;
    let x2 = dp.base.x2()?;
    Ok((y1.commutator(&dp.d), x2.commutator(&dp.d).neg()))
}

/// Identities relating `d`, `d*`, `d1`, `d2` and the Weil elements; each
/// entry is a named identity and whether it holds.
pub fn operator_identities(dp: &DifferentialPBHL) -> Result<Vec<(&'static str, bool)>> {
    let m = hodge_metric(&dp.base)?;
    let ds = adjoint_with(dp, &m)?;
    let (d1, d2) = derived_operators(dp)?;
    let w1inv = m.w1.inverse().expect("Weil element is invertible");
    let w2inv = m.w2.inverse().expect("Weil element is invertible");
    let y1 = dp.base.y1()?;
    let x2 = dp.base.x2()?;
    let d = &dp.d;
    Ok(vec![
        ("w1 d1 w1^-1 = d", &m.w1.mul(&d1).mul(&w1inv) == d),
        ("w2 d2 w2^-1 = d", &m.w2.mul(&d2).mul(&w2inv) == d),
        ("d* = -[Y1, d2]", y1.commutator(&d2).neg() == ds),
        ("d* = [X2, d1]", x2.commutator(&d1) == ds),
        ("d* d* = 0", ds.mul(&ds).is_zero()),
        ("d* has bidegree (-1, 1)", dp.base.is_homogeneous(&ds, -1, 1)),
        ("[C, d] = 0", m.c.commutator(d).is_zero()),
    ])
}

/// `V = ker Δ ⊕ im d ⊕ im d*`.
#[derive(Clone, Debug)]
pub struct HodgeDecompositionCheck {
    pub harmonic: usize,
    pub exact: usize,
    pub coexact: usize,
    pub direct: bool,
    /// `h⁺(Δa, b)` is Hermitian positive semidefinite.
    pub laplacian_nonnegative: bool,
}

pub fn complex_decomposition(dp: &DifferentialPBHL) -> Result<HodgeDecompositionCheck> {
    let m = hodge_metric(&dp.base)?;
    let ds = adjoint_with(dp, &m)?;
    let lap = laplacian_from(dp, &ds)?;
    let (h, e, c) = (lap.kernel(), dp.d.image(), ds.image());
    let pairwise = h.intersection(&e).is_zero() && h.intersection(&c).is_zero() && e.intersection(&c).is_zero();
    let direct = pairwise && h.dim() + e.dim() + c.dim() == dp.dim() && h.sum(&e).sum(&c).is_full();
    let form = lap.transpose().mul(&m.h_plus);
    let laplacian_nonnegative = hermitian_positive_semidefinite(&form).unwrap_or(false);
    Ok(HodgeDecompositionCheck { harmonic: h.dim(), exact: e.dim(), coexact: c.dim(), direct, laplacian_nonnegative })
}

/// Output of [`cohomology`].
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub structure: BigradedHL,
    /// Harmonic representatives as columns, in the order of the output
    /// coordinates.
    pub harmonic_basis: ExactMatrix,
    pub verification: PbhlReport,
    /// The quotient presentation `ker d / im d` gives the same `F` and `S`
    /// after the change of basis to harmonic representatives.
    pub presentations_agree: bool,
}

/// `ker d / im d` with induced `F`, `X1`, `Y2`, `S`, computed on harmonic
/// representatives and cross-checked against the quotient presentation.
pub fn cohomology(dp: &DifferentialPBHL) -> Result<Cohomology> {
    let base = &dp.base;
    let m = hodge_metric(base)?;
    let ds = adjoint_with(dp, &m)?;
    let lap = laplacian_from(dp, &ds)?;
    let total = dp.dim();
    let harmonic = lap.kernel();
    let kerd = dp.d.kernel();
    let imd = dp.d.image();
    if kerd.dim() != harmonic.dim() + imd.dim() || !kerd.contains(&harmonic) {
        return Err(Error::InvariantViolation("ker d != ker Laplacian + im d".into()));
    }

    let mut pieces = Vec::new();
    let mut cols: Vec<Vec<ExactScalar>> = Vec::new();
    for (i, pc) in base.pieces().iter().enumerate() {
        let h = harmonic.intersection(&base.piece_subspace(i));
        if h.dim() > 0 {
            pieces.push(Piece { l: pc.l, k: pc.k, dim: h.dim() });
            cols.extend(h.vectors());
        }
    }
    if cols.len() != harmonic.dim() {
        return Err(Error::InvariantViolation("harmonic space is not bigraded".into()));
    }
    let hb = ExactMatrix::from_columns(total, &cols);
    let restrict = |op: &ExactMatrix| -> Result<ExactMatrix> {
        hb.solve(&op.mul(&hb)).ok_or_else(|| Error::InvariantViolation("operator does not preserve ker Laplacian".into()))
    };
    let x1 = restrict(&base.x1)?;
    let y2 = restrict(&base.y2)?;
    let s = gram(&base.s, &cols, &cols);

    // Projection ker d → ker Δ along im d, in harmonic coordinates.
    let split = hb.hstack(&imd.basis_matrix());
    let project = |v: &[ExactScalar]| -> Vec<ExactScalar> {
        let x = split.solve(&ExactMatrix::from_columns(total, &[v.to_vec()])).expect("v lies in ker d");
        x.column(0)[..cols.len()].to_vec()
    };
    let p_range = base.p_support();
    let h_flag_pieces: Vec<ExactSubspace> = p_range
        .clone()
        .map(|p| {
            let fk = base.f.dec(p).intersection(&kerd);
            Subspace::span(cols.len(), &fk.vectors().iter().map(|v| project(v)).collect::<Vec<_>>())
        })
        .collect();
    let f = Flag::new(cols.len(), Convention::Decreasing, *p_range.start(), h_flag_pieces)?;

    // Quotient presentation: complement of im d in ker d.
    let reps = kerd.quotient_basis(&imd);
    let quot_split = ExactMatrix::from_columns(total, &reps).hstack(&imd.basis_matrix());
    let t = ExactMatrix::from_columns(cols.len(), &reps.iter().map(|v| project(v)).collect::<Vec<_>>());
    let s_quot = gram(&base.s, &reps, &reps);
    let mut presentations_agree = t.transpose().mul(&s).mul(&t.conj()) == s_quot;
    for p in p_range.clone() {
        let fk = base.f.dec(p).intersection(&kerd);
        let quot_coords = Subspace::span(
            reps.len(),
            &fk.vectors()
                .iter()
                .map(|v| {
                    let x = quot_split
                        .solve(&ExactMatrix::from_columns(total, std::slice::from_ref(v)))
                        .expect("v lies in ker d");
                    x.column(0)[..reps.len()].to_vec()
                })
                .collect::<Vec<_>>(),
        );
        presentations_agree &= quot_coords.image(&t) == f.dec(p);
    }

    let structure = BigradedHL::new(base.n, pieces, x1, y2, f, s)?;
    let verification = pbhl_verify(&structure);
    Ok(Cohomology { structure, harmonic_basis: hb, verification, presentations_agree })
}

/// The cohomology as a verified bigraded structure.
pub fn cohomology_pbhl(dp: &DifferentialPBHL) -> Result<BigradedHL> {
    let c = cohomology(dp)?;
    if let Some(f) = c.verification.failure {
        return Err(Error::InvariantViolation(format!("cohomology fails {}: {}", f.condition, f.detail)));
    }
    if !c.presentations_agree {
        return Err(Error::InvariantViolation("harmonic and quotient presentations disagree".into()));
    }
    Ok(c.structure)
}
