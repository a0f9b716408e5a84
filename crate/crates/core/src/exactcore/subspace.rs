use super::field::Field;
use super::matrix::Matrix;
use super::ExactError;

/// A linear subspace of `F^n`, stored as the reduced row-echelon basis
/// (one basis vector per row).
///
/// The echelon basis is canonical, so derived equality and hashing are
/// equality and hashing of subspaces.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace<F> {
    ambient: usize,
    rows: Matrix<F>,
    pivots: Vec<usize>,
}

/// Results of the pairwise operations on two subspaces.
#[derive(Clone, Debug)]
pub struct SubspaceOps<F> {
    pub sum: Subspace<F>,
    pub intersection: Subspace<F>,
    /// Lifts of a basis of `a / (a ∩ b)`.
    pub quotient_basis: Vec<Vec<F>>,
    pub a_in_b: bool,
    pub b_in_a: bool,
}

/// Checked pairwise operations; fails on differing ambient dimensions.
pub fn subspace_ops<F: Field>(a: &Subspace<F>, b: &Subspace<F>) -> Result<SubspaceOps<F>, ExactError> {
    if a.ambient != b.ambient {
        return Err(ExactError::AmbientMismatch { left: a.ambient, right: b.ambient });
    }
    Ok(SubspaceOps {
        sum: a.sum(b),
        intersection: a.intersection(b),
        quotient_basis: a.quotient_basis(b),
        a_in_b: b.contains(a),
        b_in_a: a.contains(b),
    })
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, rows: Matrix::zeros(0, ambient), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, rows: Matrix::identity(ambient), pivots: (0..ambient).collect() }
    }

    /// Span of arbitrary (possibly dependent) vectors of length `ambient`.
    pub fn span(ambient: usize, vectors: &[Vec<F>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = Matrix::from_rows(ambient, vectors.to_vec());
        Self::from_row_space(&m)
    }

    /// Row space of `m`.
    pub fn from_row_space(m: &Matrix<F>) -> Self {
        let r = m.rref();
        let k = r.pivots.len();
        Subspace { ambient: m.cols(), rows: r.matrix.block(0, k, 0, m.cols()), pivots: r.pivots }
    }

    /// Column space of `m`.
    pub fn from_columns(m: &Matrix<F>) -> Self {
        Self::from_row_space(&m.transpose())
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.pivots.len() == self.ambient
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Echelon basis, one vector per row.
    pub fn basis_rows(&self) -> &Matrix<F> {
        &self.rows
    }

    /// Echelon basis as columns of an `ambient × dim` matrix.
    pub fn basis_matrix(&self) -> Matrix<F> {
        self.rows.transpose()
    }

    pub fn vectors(&self) -> Vec<Vec<F>> {
        self.rows.to_rows()
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
    }

    /// Coefficients of `v` in the echelon basis, or `None` if `v ∉ self`.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let coeffs: Vec<F> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rest = v.to_vec();
        for (r, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, x) in self.rows.row(r).iter().enumerate() {
                rest[j].sub_mul_assign(c, x);
            }
        }
        rest.iter().all(Field::is_zero).then_some(coeffs)
    }

    pub fn contains_vector(&self, v: &[F]) -> bool {
        self.coordinates(v).is_some()
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Self) -> bool {
        self.check(other);
        other.dim() <= self.dim() && other.rows.to_rows().iter().all(|v| self.contains_vector(v))
    }

    pub fn sum(&self, other: &Self) -> Self {
        self.check(other);
        if self.is_zero() || other.contains(self) {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        Self::from_row_space(&self.rows.vstack(&other.rows))
    }

    pub fn sum_all<'a>(ambient: usize, parts: impl IntoIterator<Item = &'a Self>) -> Self {
        let mut vecs = Vec::new();
        for p in parts {
            assert_eq!(p.ambient, ambient, "ambient dimension mismatch");
            vecs.extend(p.vectors());
        }
        Self::span(ambient, &vecs)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ambient);
        }
        if self.is_full() {
            return other.clone();
        }
        if other.is_full() {
            return self.clone();
        }
        let da = self.dim();
        let stacked = self.basis_matrix().hstack(&other.basis_matrix().neg());
        let ker = stacked.kernel();
        let vecs: Vec<Vec<F>> = ker
            .vectors()
            .iter()
            .map(|st| {
                let s = Matrix::from_vec(1, da, st[..da].to_vec());
                s.mul(&self.rows).row(0).to_vec()
            })
            .collect();
        Self::span(self.ambient, &vecs)
    }

    /// Vectors of `self` whose classes form a basis of `self / (self ∩ other)`.
    pub fn quotient_basis(&self, other: &Self) -> Vec<Vec<F>> {
        let base = self.intersection(other);
        extend_basis(&base, &self.vectors())
    }

    /// Lifts of a basis of `ambient / self`, chosen among coordinate vectors.
    pub fn complement_basis(&self) -> Vec<Vec<F>> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient)
            .filter(|&j| !is_pivot[j])
            .map(|j| {
                let mut v = vec![F::zero(); self.ambient];
                v[j] = F::one();
                v
            })
            .collect()
    }

    /// `m·self`, a subspace of the codomain of `m`.
    pub fn image(&self, m: &Matrix<F>) -> Self {
        assert_eq!(m.cols(), self.ambient, "image: shape mismatch");
        if self.is_zero() {
            return Self::zero(m.rows());
        }
        Self::from_columns(&m.mul(&self.basis_matrix()))
    }

    /// `{v : m·v ∈ target}`.
    pub fn preimage(m: &Matrix<F>, target: &Self) -> Self {
        assert_eq!(m.rows(), target.ambient, "preimage: shape mismatch");
        let ann = target.annihilator();
        if ann.rows() == 0 {
            return Self::full(m.cols());
        }
        ann.mul(m).kernel()
    }

    /// A matrix whose kernel is exactly `self`.
    pub fn annihilator(&self) -> Matrix<F> {
        let perp = self.rows.kernel();
        Matrix::from_rows(self.ambient, perp.vectors())
    }

    /// Coordinates of the subspace `sub ⊆ self` relative to the echelon basis
    /// of `self`.
    pub fn relative(&self, sub: &Self) -> Self {
        let coords: Vec<Vec<F>> = sub
            .vectors()
            .iter()
            .map(|v| self.coordinates(v).expect("relative: not a subspace"))
            .collect();
        Self::span(self.dim(), &coords)
    }

    pub fn conj(&self) -> Self {
        Self::from_row_space(&self.rows.conj())
    }
}

/// Greedily extends `base` by vectors from `candidates`; returns the chosen
/// candidates, whose classes form a basis of `span(base, candidates) / base`.
pub fn extend_basis<F: Field>(base: &Subspace<F>, candidates: &[Vec<F>]) -> Vec<Vec<F>> {
    let mut current = base.clone();
    let mut chosen = Vec::new();
    for v in candidates {
        if !current.contains_vector(v) {
            let next = current.sum(&Subspace::span(current.ambient, std::slice::from_ref(v)));
            current = next;
            chosen.push(v.clone());
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::field::{rat, Rational};
    use proptest::prelude::*;

    type S = Subspace<Rational>;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x, 1)).collect()
    }

    #[test]
    fn equal_subspaces() {
        let a = S::span(3, &[v(&[1, 2, 0]), v(&[0, 1, 1])]);
        let ops = subspace_ops(&a, &a).unwrap();
        assert_eq!(ops.sum, a);
        assert_eq!(ops.intersection, a);
        assert!(ops.quotient_basis.is_empty());
        assert!(ops.a_in_b && ops.b_in_a);
    }

    #[test]
    fn complementary_lines() {
        let a = S::span(2, &[v(&[1, 1])]);
        let b = S::span(2, &[v(&[1, -1])]);
        let ops = subspace_ops(&a, &b).unwrap();
        assert!(ops.sum.is_full());
        assert!(ops.intersection.is_zero());
        assert_eq!(ops.quotient_basis.len(), 1);
    }

    #[test]
    fn ambient_mismatch_is_an_error() {
        let err = subspace_ops(&S::zero(2), &S::zero(3)).unwrap_err();
        assert_eq!(err, ExactError::AmbientMismatch { left: 2, right: 3 });
    }

    #[test]
    fn preimage_and_image() {
        let n = Matrix::<Rational>::from_i64_rows(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let line = S::span(3, &[v(&[1, 0, 0])]);
        let pre = S::preimage(&n, &line);
        assert_eq!(pre, S::span(3, &[v(&[1, 0, 0]), v(&[0, 1, 0])]));
        assert_eq!(pre.image(&n), line);
    }

    fn subspace_of_dim(dim: usize) -> impl Strategy<Value = S> {
        prop::collection::vec(-2i64..=2, 6 * dim).prop_map(move |xs| {
            let vecs: Vec<Vec<Rational>> = xs.chunks(6).map(v).collect();
            S::span(6, &vecs)
        })
    }

    /// Rank oracle independent of the subspace code: rank of stacked rows.
    fn rank_of(vecs: &[Vec<Rational>]) -> usize {
        if vecs.is_empty() {
            0
        } else {
            Matrix::from_rows(6, vecs.to_vec()).rank()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn dimension_identity(a in subspace_of_dim(3), b in subspace_of_dim(4)) {
            let ops = subspace_ops(&a, &b).unwrap();
            prop_assert_eq!(ops.sum.dim() + ops.intersection.dim(), a.dim() + b.dim());
            let mut all = a.vectors();
            all.extend(b.vectors());
            prop_assert_eq!(ops.sum.dim(), rank_of(&all));
            prop_assert!(a.contains(&ops.intersection) && b.contains(&ops.intersection));
            prop_assert_eq!(ops.quotient_basis.len(), a.dim() - ops.intersection.dim());
        }

        #[test]
        fn lattice_laws(a in subspace_of_dim(2), b in subspace_of_dim(3), c in subspace_of_dim(2)) {
            prop_assert_eq!(a.sum(&b).sum(&c), a.sum(&b.sum(&c)));
            prop_assert_eq!(a.intersection(&b).intersection(&c), a.intersection(&b.intersection(&c)));
            // Modular law: a ⊆ c implies a + (b ∩ c) = (a + b) ∩ c.
            let ac = a.sum(&c);
            prop_assert_eq!(a.sum(&b.intersection(&ac)), a.sum(&b).intersection(&ac));
        }
    }
}
