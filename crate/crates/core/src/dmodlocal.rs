//! Associated-graded local model of the nearby-cycle module on the chart
//! `t = z_0^{e_0} ⋯ z_k^{e_k}`: the quotient
//! `ℚ[z, ζ] / (t_α, D_1, …, D_n)` computed degree by degree, the kernel of
//! powers of the residue, and Artinian lengths.
//!
//! Every relation is homogeneous both for total degree and for the weight
//! `wt(z_i) = +ε_i`, `wt(ζ_i) = −ε_i`, so each graded piece splits into
//! small weight pieces that are reduced independently.

use std::collections::{BTreeMap, HashMap};

use num::{BigInt, One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactcore::{Matrix, Rational, Subspace};
use crate::sncdegeneration::Alpha;

/// Exponent vector `(a_0, …, a_n, b_0, …, b_n)` of `z^a ζ^b`.
pub type Mono = Vec<u8>;
type Poly = Vec<(Mono, Rational)>;
type Key = (usize, Vec<i64>);

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalModel {
    /// Coordinates are `z_0..z_n`.
    pub n: usize,
    /// Divisor coordinates are `z_0..z_k`.
    pub k: usize,
    pub e: Vec<u32>,
    pub alpha: Alpha,
    /// Truncation degree `D`.
    pub degree: usize,
}

impl LocalModel {
    pub fn new(n: usize, e: Vec<u32>, alpha: Alpha, degree: usize) -> Result<Self> {
        if e.is_empty() || e.len() > n + 1 {
            return Err(Error::InvalidInput(format!("need 1..={} multiplicities, got {}", n + 1, e.len())));
        }
        if e.contains(&0) {
            return Err(Error::InvalidInput("multiplicities must be positive".into()));
        }
        let m = LocalModel { n, k: e.len() - 1, e, alpha, degree };
        if m.i_alpha().is_empty() {
            return Err(Error::UnknownEigenvalue(m.alpha.to_string()));
        }
        Ok(m)
    }

    /// Local `I_α = {i ≤ k : α e_i ∈ ℤ}`.
    pub fn i_alpha(&self) -> Vec<usize> {
        (0..=self.k).filter(|&i| self.alpha.divides(self.e[i])).collect()
    }

    /// `μ` with `μ + 1 = #I_α`.
    pub fn mu(&self) -> usize {
        self.i_alpha().len() - 1
    }

    /// Eigenvalues `j / e_i` of the residue on this chart.
    pub fn eigenvalues(e: &[u32]) -> Vec<Alpha> {
        let mut out: Vec<Alpha> = e.iter().flat_map(|&ei| (0..ei as i64).map(move |j| Alpha::new(j, ei as i64))).collect();
        out.sort();
        out.dedup();
        out
    }

    fn nvars(&self) -> usize {
        2 * (self.n + 1)
    }

    fn var_z(&self, i: usize) -> usize {
        i
    }

    fn var_zeta(&self, i: usize) -> usize {
        self.n + 1 + i
    }

    fn mono(&self, pairs: &[(usize, u8)]) -> Mono {
        let mut m = vec![0; self.nvars()];
        for &(v, p) in pairs {
            m[v] += p;
        }
        m
    }

    /// `t_α = Π_{i∈I_α} z_i` and the symbols `D_i = z_iζ_i/e_i − z_0ζ_0/e_0`
    /// (`i ≤ k`), `D_i = ζ_i` (`i > k`).
    fn relations(&self) -> Vec<Poly> {
        let mut rels = vec![vec![(self.mono(&self.i_alpha().iter().map(|&i| (self.var_z(i), 1)).collect::<Vec<_>>()), Rational::one())]];
        let zz = |i: usize| self.mono(&[(self.var_z(i), 1), (self.var_zeta(i), 1)]);
        for i in 1..=self.n {
            if i <= self.k {
                rels.push(vec![(zz(i), q(1, self.e[i] as i64)), (zz(0), q(-1, self.e[0] as i64))]);
            } else {
                rels.push(vec![(self.mono(&[(self.var_zeta(i), 1)]), Rational::one())]);
            }
        }
        rels
    }

    fn weight(&self, m: &Mono) -> Vec<i64> {
        (0..=self.n).map(|i| m[self.var_z(i)] as i64 - m[self.var_zeta(i)] as i64).collect()
    }

    /// `[R] = z_0ζ_0 / e_0`.
    fn residue(&self, i: usize) -> (Mono, Rational) {
        (self.mono(&[(self.var_z(i), 1), (self.var_zeta(i), 1)]), q(1, self.e[i] as i64))
    }

    pub fn display_mono(&self, m: &Mono) -> String {
        let mut parts = Vec::new();
        for (v, &p) in m.iter().enumerate() {
            if p == 0 {
                continue;
            }
            let name = if v <= self.n { format!("z{v}") } else { format!("ζ{}", v - self.n - 1) };
            parts.push(if p == 1 { name } else { format!("{name}^{p}") });
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

fn mul_mono(a: &Mono, b: &Mono) -> Mono {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn degree_of(m: &Mono) -> usize {
    m.iter().map(|&x| x as usize).sum()
}

/// All monomials of total degree `d` in `nvars` variables.
fn monomials(nvars: usize, d: usize) -> Vec<Mono> {
    fn go(i: usize, left: usize, cur: &mut Mono, out: &mut Vec<Mono>) {
        if i + 1 == cur.len() {
            cur[i] = left as u8;
            out.push(cur.clone());
            return;
        }
        for p in (0..=left).rev() {
            cur[i] = p as u8;
            go(i + 1, left - p, cur, out);
        }
    }
    let mut out = Vec::new();
    if nvars > 0 {
        go(0, d, &mut vec![0; nvars], &mut out);
    } else if d == 0 {
        out.push(vec![]);
    }
    out
}

/// One weight piece of one degree: the ideal in reduced echelon form over
/// the monomials of the piece, whose non-pivot monomials form the standard
/// basis of the quotient.
#[derive(Clone, Debug)]
struct QPiece {
    monomials: Vec<Mono>,
    index: HashMap<Mono, usize>,
    rows: Matrix<Rational>,
    pivots: Vec<usize>,
    standard: Vec<usize>,
}

impl QPiece {
    fn build(monomials: Vec<Mono>, products: Vec<Poly>) -> QPiece {
        let index: HashMap<Mono, usize> = monomials.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let cols = monomials.len();
        let rows: Vec<Vec<Rational>> = products
            .iter()
            .map(|p| {
                let mut v = vec![Rational::zero(); cols];
                for (m, c) in p {
                    v[index[m]] += c;
                }
                v
            })
            .collect();
        let rref = Matrix::from_rows(cols, rows).rref();
        let mut is_pivot = vec![false; cols];
        for &p in &rref.pivots {
            is_pivot[p] = true;
        }
        let rank = rref.pivots.len();
        QPiece {
            standard: (0..cols).filter(|&j| !is_pivot[j]).collect(),
            rows: rref.matrix.block(0, rank, 0, cols),
            pivots: rref.pivots,
            monomials,
            index,
        }
    }

    fn dim(&self) -> usize {
        self.standard.len()
    }

    /// Coordinates of `p` on the standard monomials modulo the ideal.
    fn reduce(&self, p: &Poly) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.monomials.len()];
        for (m, c) in p {
            v[self.index[m]] += c;
        }
        for (r, &piv) in self.pivots.iter().enumerate() {
            let c = v[piv].clone();
            if c.is_zero() {
                continue;
            }
            for (j, x) in self.rows.row(r).iter().enumerate() {
                if !x.is_zero() {
                    v[j] -= &c * x;
                }
            }
        }
        self.standard.iter().map(|&j| v[j].clone()).collect()
    }
}

/// Homogeneous quotient `ℚ[x] / (relations)` computed piece by piece up to a
/// degree bound.
#[derive(Clone, Debug)]
struct Presentation {
    nvars: usize,
    relations: Vec<Poly>,
    weight: fn(&LocalModel, &Mono) -> Vec<i64>,
}

fn build_pieces(model: &LocalModel, pres: &Presentation, max_degree: usize) -> BTreeMap<Key, QPiece> {
    let groups: Vec<BTreeMap<Vec<i64>, Vec<Mono>>> = (0..=max_degree)
        .map(|d| {
            let mut g: BTreeMap<Vec<i64>, Vec<Mono>> = BTreeMap::new();
            for m in monomials(pres.nvars, d) {
                g.entry((pres.weight)(model, &m)).or_default().push(m);
            }
            g
        })
        .collect();
    let rel_meta: Vec<(usize, Vec<i64>)> =
        pres.relations.iter().map(|r| (degree_of(&r[0].0), (pres.weight)(model, &r[0].0))).collect();
    let keys: Vec<Key> = groups.iter().enumerate().flat_map(|(d, g)| g.keys().map(move |w| (d, w.clone()))).collect();
    keys.into_par_iter()
        .map(|(d, w)| {
            let mut products = Vec::new();
            for (rel, (rd, rw)) in pres.relations.iter().zip(&rel_meta) {
                if *rd > d {
                    continue;
                }
                let cw: Vec<i64> = w.iter().zip(rw).map(|(a, b)| a - b).collect();
                for m in groups[d - rd].get(&cw).into_iter().flatten() {
                    products.push(rel.iter().map(|(rm, c)| (mul_mono(rm, m), c.clone())).collect());
                }
            }
            let piece = QPiece::build(groups[d][&w].clone(), products);
            ((d, w), piece)
        })
        .collect()
}

/// The truncated graded quotient with a monomial basis of every piece.
#[derive(Clone, Debug)]
pub struct GradedQuotient {
    pub model: LocalModel,
    pub max_degree: usize,
    pieces: BTreeMap<Key, QPiece>,
}

/// Serializable view of a quotient.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientSummary {
    pub hilbert: Vec<usize>,
    pub standard_monomials: BTreeMap<usize, Vec<String>>,
}

impl GradedQuotient {
    fn piece(&self, d: usize, w: &[i64]) -> Option<&QPiece> {
        self.pieces.get(&(d, w.to_vec()))
    }

    /// `dim` of the quotient in each total degree.
    pub fn hilbert(&self) -> Vec<usize> {
        let mut h = vec![0; self.max_degree + 1];
        for ((d, _), p) in &self.pieces {
            h[*d] += p.dim();
        }
        h
    }

    pub fn standard_monomials(&self, d: usize) -> Vec<Mono> {
        let mut out: Vec<Mono> = self
            .pieces
            .range((d, vec![])..)
            .take_while(|((dd, _), _)| *dd == d)
            .flat_map(|(_, p)| p.standard.iter().map(|&j| p.monomials[j].clone()))
            .collect();
        out.sort();
        out
    }

    pub fn summary(&self) -> QuotientSummary {
        QuotientSummary {
            hilbert: self.hilbert(),
            standard_monomials: (0..=self.max_degree)
                .map(|d| (d, self.standard_monomials(d).iter().map(|m| self.model.display_mono(m)).collect()))
                .collect(),
        }
    }

    /// Reduces `c · mono · basis` into the piece containing it.
    fn times(&self, factor: &(Mono, Rational), src: &QPiece, j: usize) -> Vec<Rational> {
        let m = mul_mono(&factor.0, &src.monomials[src.standard[j]]);
        let target = self.piece(degree_of(&m), &self.model.weight(&m)).expect("target degree within bound");
        target.reduce(&vec![(m, factor.1.clone())])
    }
}

fn model_presentation(m: &LocalModel) -> Presentation {
    Presentation { nvars: m.nvars(), relations: m.relations(), weight: |m, x| m.weight(x) }
}

fn quotient_to(m: &LocalModel, max_degree: usize) -> GradedQuotient {
    let pieces = build_pieces(m, &model_presentation(m), max_degree);
    GradedQuotient { model: m.clone(), max_degree, pieces }
}

/// The quotient up to the model's truncation degree.
pub fn build_truncated_quotient(m: &LocalModel) -> GradedQuotient {
    quotient_to(m, m.degree)
}

/// Kernel against generated submodule in one total degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelDegree {
    pub degree: usize,
    pub kernel_dim: usize,
    pub generated_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelCheck {
    pub r: usize,
    pub mu: usize,
    /// Claims are made for degrees `≤ D − (r + 1)`.
    pub checked_up_to: usize,
    pub generators: Vec<String>,
    pub degrees: Vec<KernelDegree>,
    /// A class in one side but not the other, written in standard monomials.
    pub witness: Option<String>,
    pub passed: bool,
}

/// The degree-`(μ−r)` monomials dividing `t_α`.
fn generator_monomials(m: &LocalModel, r: usize) -> Vec<Mono> {
    let ia = m.i_alpha();
    let size = m.mu() - r;
    let mut out = Vec::new();
    for mask in 0u32..(1 << ia.len()) {
        if mask.count_ones() as usize == size {
            let pairs: Vec<(usize, u8)> = ia.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| (m.var_z(i), 1)).collect();
            out.push(m.mono(&pairs));
        }
    }
    out.sort();
    out
}

fn residue_power(m: &LocalModel, r: usize) -> (Mono, Rational) {
    let (mono, c) = m.residue(0);
    let p = r as u8 + 1;
    (mono.iter().map(|x| x * p).collect(), num::pow(c, r + 1))
}

fn display_poly(m: &LocalModel, piece: &QPiece, coords: &[Rational]) -> String {
    let terms: Vec<String> = piece
        .standard
        .iter()
        .zip(coords)
        .filter(|(_, c)| !c.is_zero())
        .map(|(&j, c)| format!("({c})*{}", m.display_mono(&piece.monomials[j])))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// `ker [R]^{r+1}` against the submodule generated by the degree-`(μ−r)`
/// monomials dividing `t_α`, weight piece by weight piece.
pub fn kernel_generators_check(m: &LocalModel, r: usize) -> Result<KernelCheck> {
    let mu = m.mu();
    if r > mu {
        return Err(Error::InvalidInput(format!("r = {r} exceeds μ = {mu}")));
    }
    let needed = mu + 1;
    if m.degree < needed {
        return Err(Error::TruncationTooSmall { degree: m.degree, needed });
    }
    let top = m.degree - (r + 1);
    let quot = quotient_to(m, m.degree + r + 1);
    let rp = residue_power(m, r);
    let gens = generator_monomials(m, r);
    let mut by_degree: BTreeMap<usize, KernelDegree> = BTreeMap::new();
    let mut witness = None;
    for ((d, w), src) in quot.pieces.range((0, vec![])..).take_while(|((d, _), _)| *d <= top) {
        let entry = by_degree.entry(*d).or_insert(KernelDegree { degree: *d, kernel_dim: 0, generated_dim: 0 });
        if src.dim() == 0 {
            continue;
        }
        let target = quot.piece(d + 2 * (r + 1), w).expect("residue preserves weight");
        let cols: Vec<Vec<Rational>> = (0..src.dim()).map(|j| quot.times(&rp, src, j)).collect();
        let kernel = Matrix::from_columns(target.dim(), &cols).kernel();
        let mut spanning = Vec::new();
        for g in &gens {
            let gd = degree_of(g);
            if gd > *d {
                continue;
            }
            let gw = m.weight(g);
            let cw: Vec<i64> = w.iter().zip(&gw).map(|(a, b)| a - b).collect();
            for mm in monomials(m.nvars(), d - gd).into_iter().filter(|x| m.weight(x) == cw) {
                spanning.push(src.reduce(&vec![(mul_mono(g, &mm), Rational::one())]));
            }
        }
        let generated = Subspace::span(src.dim(), &spanning);
        entry.kernel_dim += kernel.dim();
        entry.generated_dim += generated.dim();
        if witness.is_none() && kernel != generated {
            let stray = kernel
                .vectors()
                .into_iter()
                .find(|v| !generated.contains_vector(v))
                .or_else(|| generated.vectors().into_iter().find(|v| !kernel.contains_vector(v)))
                .expect("distinct subspaces differ in a basis vector");
            witness = Some(display_poly(m, src, &stray));
        }
    }
    let passed = witness.is_none();
    Ok(KernelCheck {
        r,
        mu,
        checked_up_to: top,
        generators: gens.iter().map(|g| m.display_mono(g)).collect(),
        degrees: by_degree.into_values().collect(),
        witness,
        passed,
    })
}

/// `[R]^{r+1}` kills each degree-`(μ−r)` monomial dividing `t_α`, checked by
/// multiplying and reducing.
pub fn generators_annihilated(m: &LocalModel, r: usize) -> Result<bool> {
    let mu = m.mu();
    if r > mu {
        return Err(Error::InvalidInput(format!("r = {r} exceeds μ = {mu}")));
    }
    let rp = residue_power(m, r);
    let quot = quotient_to(m, mu - r + 2 * (r + 1));
    Ok(generator_monomials(m, r).iter().all(|g| {
        let p = mul_mono(&rp.0, g);
        let piece = quot.piece(degree_of(&p), &m.weight(&p)).expect("within bound");
        piece.reduce(&vec![(p, rp.1.clone())]).iter().all(Zero::is_zero)
    }))
}

/// Every `z_iζ_i / e_i` with `i ∈ I_α` acts as `[R]` on the quotient up to
/// the truncation degree.
pub fn residue_representatives_agree(m: &LocalModel) -> bool {
    let quot = quotient_to(m, m.degree + 2);
    let r0 = m.residue(0);
    m.i_alpha().into_iter().all(|i| {
        let ri = m.residue(i);
        quot.pieces
            .iter()
            .filter(|((d, _), _)| *d <= m.degree)
            .all(|(_, src)| (0..src.dim()).all(|j| quot.times(&ri, src, j) == quot.times(&r0, src, j)))
    })
}

/// Length of `ℚ[z_0] / (z_0^{Σ_{j∈J} e_j})`, counted as the number of
/// standard monomials of the one-variable quotient.
pub fn char_multiplicity_local(m: &LocalModel, j: &[usize]) -> Result<u64> {
    if let Some(bad) = j.iter().find(|&&x| x > m.k) {
        return Err(Error::InvalidInput(format!("index {bad} is not a divisor coordinate (k = {})", m.k)));
    }
    let s: u32 = j.iter().map(|&i| m.e[i]).sum();
    let pres = Presentation { nvars: 1, relations: vec![vec![(vec![s as u8], Rational::one())]], weight: |_, _| vec![] };
    let pieces = build_pieces(m, &pres, s as usize);
    Ok(pieces.values().map(|p| p.dim() as u64).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::two_three;
    use crate::sncdegeneration::{characteristic_cycle, Degeneration};
    use proptest::prelude::*;

    fn model(n: usize, e: &[u32], alpha: Alpha, degree: usize) -> LocalModel {
        LocalModel::new(n, e.to_vec(), alpha, degree).unwrap()
    }

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    /// Oracle: dense rank of the ideal's degree-`d` piece over all
    /// monomials, without weight splitting.
    fn dense_hilbert(m: &LocalModel, d: usize) -> usize {
        let all = monomials(m.nvars(), d);
        let index: HashMap<Mono, usize> = all.iter().cloned().enumerate().map(|(i, x)| (x, i)).collect();
        let mut rows = Vec::new();
        for rel in m.relations() {
            let rd = degree_of(&rel[0].0);
            if rd > d {
                continue;
            }
            for x in monomials(m.nvars(), d - rd) {
                let mut v = vec![Rational::zero(); all.len()];
                for (rm, c) in &rel {
                    v[index[&mul_mono(rm, &x)]] += c;
                }
                rows.push(v);
            }
        }
        all.len() - Matrix::from_rows(all.len(), rows).rank()
    }

    #[test]
    fn smooth_chart_eliminates_two_variables() {
        let m = model(1, &[1], Alpha::zero(), 6);
        // ℚ[z_1, ζ_0] has d + 1 monomials in degree d.
        assert_eq!(build_truncated_quotient(&m).hilbert(), (0..=6).map(|d| d + 1).collect::<Vec<_>>());
    }

    #[test]
    fn normal_crossing_matches_dense_oracle() {
        let m = model(1, &[1, 1], Alpha::zero(), 5);
        let h = build_truncated_quotient(&m).hilbert();
        let oracle: Vec<usize> = (0..=5).map(|d| dense_hilbert(&m, d)).collect();
        assert_eq!(h, oracle);
        // Frozen: a complete intersection of two quadrics in four variables.
        assert_eq!(h, vec![1, 4, 8, 12, 16, 20]);
        for d in 0..=5 {
            assert_eq!(h[d], binom(d + 3, 3) - 2 * binom(d + 1, 3) + if d >= 4 { binom(d - 1, 3) } else { 0 });
        }
    }

    #[test]
    fn other_models_match_dense_oracle() {
        for (n, e, a) in [(2, vec![1, 1, 1], Alpha::zero()), (2, vec![2, 3], Alpha::new(1, 2)), (1, vec![2, 2], Alpha::new(1, 2))] {
            let m = model(n, &e, a, 4);
            let h = build_truncated_quotient(&m).hilbert();
            assert_eq!(h, (0..=4).map(|d| dense_hilbert(&m, d)).collect::<Vec<_>>(), "{m:?}");
        }
    }

    #[test]
    fn truncation_is_stable() {
        let lo = build_truncated_quotient(&model(2, &[2, 3], Alpha::zero(), 4));
        let hi = build_truncated_quotient(&model(2, &[2, 3], Alpha::zero(), 6));
        for d in 0..=4 {
            assert_eq!(lo.standard_monomials(d), hi.standard_monomials(d));
        }
        assert_eq!(lo.hilbert()[..], hi.hilbert()[..5]);
    }

    #[test]
    fn kernel_generated_by_constant() {
        let c = kernel_generators_check(&model(1, &[1, 1], Alpha::zero(), 8), 1).unwrap();
        assert_eq!(c.generators, vec!["1"]);
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn triple_point_generators() {
        let c = kernel_generators_check(&model(2, &[1, 1, 1], Alpha::zero(), 6), 0).unwrap();
        let mut g = c.generators.clone();
        g.sort();
        assert_eq!(g, vec!["z0*z1", "z0*z2", "z1*z2"]);
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn two_three_generators() {
        let m = model(1, &[2, 3], Alpha::zero(), 8);
        assert_eq!(m.mu(), 1);
        let c = kernel_generators_check(&m, 0).unwrap();
        let mut g = c.generators.clone();
        g.sort();
        assert_eq!(g, vec!["z0", "z1"]);
        assert!(c.passed, "{c:?}");
    }

    #[test]
    fn truncation_too_small() {
        let m = model(2, &[1, 1, 1], Alpha::zero(), 2);
        assert_eq!(kernel_generators_check(&m, 0).unwrap_err(), Error::TruncationTooSmall { degree: 2, needed: 3 });
    }

    #[test]
    fn unknown_eigenvalue_rejected() {
        assert_eq!(LocalModel::new(1, vec![2, 3], Alpha::new(1, 5), 4).unwrap_err(), Error::UnknownEigenvalue("1/5".into()));
    }

    #[test]
    fn residue_representatives() {
        for (n, e) in [(1, vec![1, 1]), (2, vec![2, 3]), (2, vec![1, 1, 1])] {
            for a in LocalModel::eigenvalues(&e) {
                assert!(residue_representatives_agree(&model(n, &e, a, 4)));
            }
        }
    }

    #[test]
    fn artinian_lengths() {
        let m = model(1, &[2, 3], Alpha::zero(), 4);
        assert_eq!(char_multiplicity_local(&m, &[0, 1]).unwrap(), 5);
        assert_eq!(char_multiplicity_local(&m, &[0]).unwrap(), 2);
        let reduced = model(2, &[1, 1, 1], Alpha::zero(), 4);
        assert_eq!(char_multiplicity_local(&reduced, &[0, 2]).unwrap(), 2);
        assert!(char_multiplicity_local(&m, &[2]).is_err());
    }

    #[test]
    fn artinian_lengths_match_cycle() {
        let deg = Degeneration::new(two_three()).unwrap();
        let m = model(1, &[2, 3], Alpha::zero(), 4);
        for (j, mult) in characteristic_cycle(&deg) {
            let idx: Vec<usize> = j.iter().map(|&x| x as usize).collect();
            assert_eq!(char_multiplicity_local(&m, &idx).unwrap(), mult);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn generators_are_annihilated(e0 in 1u32..4, e1 in 1u32..4, extra in 0usize..2, pick in 0usize..16) {
            let e = vec![e0, e1];
            let alphas = LocalModel::eigenvalues(&e);
            let a = alphas[pick % alphas.len()].clone();
            let m = model(1 + extra, &e, a, 4);
            for r in 0..=m.mu() {
                prop_assert!(generators_annihilated(&m, r).unwrap());
            }
        }

        #[test]
        fn hilbert_function_stable_under_truncation(e0 in 1u32..3, e1 in 1u32..3, d in 2usize..5) {
            let m = model(1, &[e0, e1], Alpha::zero(), d);
            let h = build_truncated_quotient(&m).hilbert();
            let h2 = build_truncated_quotient(&LocalModel { degree: d + 1, ..m }).hilbert();
            prop_assert_eq!(&h[..], &h2[..=d]);
        }
    }
}
