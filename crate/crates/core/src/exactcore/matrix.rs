use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::field::Field;
use super::scalar::ExactScalar;
use super::subspace::Subspace;

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Matrix over the Gaussian rationals.
pub type ExactMatrix = Matrix<ExactScalar>;

/// Reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref<F> {
    pub matrix: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length does not match {rows}x{cols}");
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from equal-length rows; `cols` is needed for the
    /// zero-row case.
    pub fn from_rows(cols: usize, rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<F>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| r.iter().map(|&v| F::from_i64(v)).collect()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = F::one();
        }
        m
    }

    pub fn diagonal(diag: &[F]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = d.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut F {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Field::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn conj(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Field::conj).collect() }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn map(&self, f: impl Fn(&F) -> F) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(|x| x.times(c))
    }

    pub fn neg(&self) -> Self {
        self.map(Field::negated)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols, "shape mismatch in add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.plus(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert!(self.rows == o.rows && self.cols == o.cols, "shape mismatch in sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.minus(b)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in mul: {}x{} * {}x{}", self.rows, self.cols, o.rows, o.cols);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let t = a.times(b);
                        let slot = &mut out.data[i * o.cols + j];
                        *slot = slot.plus(&t);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.plus(&a.times(b));
                    }
                }
                acc
            })
            .collect()
    }

    /// Commutator `self·o − o·self`.
    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square(), "pow of non-square matrix");
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// The block `rows r0..r1`, `cols c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut m = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m.data[(i - r0) * (c1 - c0) + (j - c0)] = self.get(i, j).clone();
            }
        }
        m
    }

    /// Writes `b` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.data[(r0 + i) * self.cols + c0 + j] = b.get(i, j).clone();
            }
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m.data[i * idx.len() + jj] = self.get(i, j).clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_rows(self.cols, idx.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    pub fn hstack(&self, o: &Self) -> Self {
        assert_eq!(self.rows, o.rows, "hstack row mismatch");
        let mut m = Self::zeros(self.rows, self.cols + o.cols);
        m.set_block(0, 0, self);
        m.set_block(0, self.cols, o);
        m
    }

    pub fn vstack(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    pub fn block_diag(blocks: &[Self]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(r, c);
        let (mut i, mut j) = (0, 0);
        for b in blocks {
            m.set_block(i, j, b);
            i += b.rows;
            j += b.cols;
        }
        m
    }

    /// Reduced row-echelon form by Gauss–Jordan elimination.
    pub fn rref(&self) -> Rref<F> {
        let mut m = self.clone();
        let pivots = rref_in_place(&mut m);
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        rref_in_place(&mut m).len()
    }

    /// Null space `{v : self·v = 0}`.
    pub fn kernel(&self) -> Subspace<F> {
        let Rref { matrix, pivots } = self.rref();
        let n = self.cols;
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut vecs = Vec::new();
        for free in (0..n).filter(|&j| !is_pivot[j]) {
            let mut v = vec![F::zero(); n];
            v[free] = F::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = matrix.get(r, free).negated();
            }
            vecs.push(v);
        }
        Subspace::span(n, &vecs)
    }

    /// Column space.
    pub fn image(&self) -> Subspace<F> {
        Subspace::span(self.rows, &self.columns())
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&Self::identity(n));
        let Rref { matrix, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(matrix.block(0, n, n, 2 * n))
    }

    /// Some solution `X` of `self·X = b`, if one exists.
    pub fn solve(&self, b: &Self) -> Option<Self> {
        assert_eq!(self.rows, b.rows, "solve: row mismatch");
        let n = self.cols;
        let aug = self.hstack(b);
        let Rref { matrix, pivots } = aug.rref();
        if pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut x = Self::zeros(n, b.cols);
        for (r, &p) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(p, j, matrix.get(r, n + j).clone());
            }
        }
        Some(x)
    }

    /// Determinant by elimination; panics on non-square input.
    pub fn determinant(&self) -> F {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m.get(r, c).is_zero()) else {
                return F::zero();
            };
            if p != c {
                m.swap_rows(p, c);
                det = det.negated();
            }
            let piv = m.get(c, c).clone();
            det = det.times(&piv);
            let inv = piv.inverse().expect("nonzero pivot");
            for r in c + 1..n {
                let f = m.get(r, c).times(&inv);
                if !f.is_zero() {
                    m.row_sub_mul(r, c, &f, c);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// `row[target] -= f * row[src]` for columns `from..`.
    fn row_sub_mul(&mut self, target: usize, src: usize, f: &F, from: usize) {
        let c = self.cols;
        let (t, s) = if target < src {
            let (lo, hi) = self.data.split_at_mut(src * c);
            (&mut lo[target * c..(target + 1) * c], &hi[..c])
        } else {
            let (lo, hi) = self.data.split_at_mut(target * c);
            (&mut hi[..c], &lo[src * c..(src + 1) * c])
        };
        for j in from..c {
            if !s[j].is_zero() {
                t[j].sub_mul_assign(f, &s[j]);
            }
        }
    }
}

/// Gauss–Jordan elimination; returns the pivot columns.
fn rref_in_place<F: Field>(m: &mut Matrix<F>) -> Vec<usize> {
    let (rows, cols) = (m.rows, m.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).filter(|&i| !m.get(i, c).is_zero()).min_by_key(|&i| m.get(i, c).bits()) else {
            continue;
        };
        m.swap_rows(p, r);
        let inv = m.get(r, c).inverse().expect("nonzero pivot");
        if !inv.is_one() {
            for j in c..cols {
                let v = m.get(r, j).times(&inv);
                m.set(r, j, v);
            }
        }
        for i in 0..rows {
            if i != r && !m.get(i, c).is_zero() {
                let f = m.get(i, c).clone();
                m.row_sub_mul(i, r, &f, c);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.data.truncate(rows * cols);
    pivots
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.data[i * self.cols..(i + 1) * self.cols].iter().map(|x| format!("{x:?}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr<T> {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<T>>,
}

impl Serialize for Matrix<ExactScalar> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MatrixRepr { rows: self.rows, cols: self.cols, entries: self.to_rows() }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matrix<ExactScalar> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MatrixRepr::<ExactScalar>::deserialize(deserializer)?;
        if repr.entries.len() != repr.rows {
            return Err(de::Error::custom(format!(
                "matrix declares {} rows but has {} entry rows",
                repr.rows,
                repr.entries.len()
            )));
        }
        if let Some((i, r)) = repr.entries.iter().enumerate().find(|(_, r)| r.len() != repr.cols) {
            return Err(de::Error::custom(format!(
                "matrix row {i} has {} entries, expected {}",
                r.len(),
                repr.cols
            )));
        }
        Ok(Matrix::from_rows(repr.cols, repr.entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcore::field::{rat, Rational};
    use proptest::prelude::*;

    type Q = Matrix<Rational>;

    #[test]
    fn rref_fixed_points_and_rank_one() {
        let id = Q::identity(3);
        assert_eq!(id.rref().matrix, id);
        let m = Q::from_i64_rows(&[&[2, 4], &[1, 2]]);
        assert_eq!(m.rref().matrix, Q::from_i64_rows(&[&[1, 2], &[0, 0]]));
    }

    #[test]
    fn kernel_examples() {
        let z = Q::zeros(2, 3);
        assert_eq!(z.kernel().dim(), 3);
        assert_eq!(Q::identity(4).kernel().dim(), 0);
        let j3 = Q::from_i64_rows(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        let k = j3.kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains_vector(&[rat(1, 1), rat(0, 1), rat(0, 1)]));
    }

    #[test]
    fn inverse_and_solve() {
        let m = Q::from_i64_rows(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Q::identity(2));
        assert!(Q::from_i64_rows(&[&[1, 2], &[2, 4]]).inverse().is_none());
        let b = Q::from_i64_rows(&[&[3], &[2]]);
        assert_eq!(m.mul(&m.solve(&b).unwrap()), b);
    }

    #[test]
    fn json_round_trip() {
        let m: ExactMatrix = serde_json::from_str(r#"{"rows":1,"cols":2,"entries":[["1/2","0/1+-1/3i"]]}"#).unwrap();
        assert_eq!(m.get(0, 1), &"0/1+-1/3i".parse().unwrap());
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"entries":[["1/2","0/1+-1/3i"]]}"#);
        assert!(serde_json::from_str::<ExactMatrix>(r#"{"rows":2,"cols":1,"entries":[["1"]]}"#).is_err());
    }

    /// Rank oracle: largest k with a nonzero k×k minor, by brute force.
    fn minor_rank(m: &Q) -> usize {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        fn det(m: &Q, rows: &[usize], cols: &[usize]) -> Rational {
            if rows.is_empty() {
                return rat(1, 1);
            }
            let mut acc = rat(0, 1);
            for (jj, &c) in cols.iter().enumerate() {
                let a = m.get(rows[0], c).clone();
                if a == rat(0, 1) {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let sub = det(m, &rows[1..], &rest);
                let term = a * sub;
                acc = if jj % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
        let mut best = 0;
        for k in 1..=m.rows().min(m.cols()) {
            let found = subsets(m.rows(), k)
                .iter()
                .any(|rs| subsets(m.cols(), k).iter().any(|cs| det(m, rs, cs) != rat(0, 1)));
            if found {
                best = k;
            } else {
                break;
            }
        }
        best
    }

    fn low_rank_matrix() -> impl Strategy<Value = Q> {
        (1usize..=6, prop::collection::vec(-3i64..=3, 72)).prop_map(|(r, v)| {
            let a = Q::from_vec(6, r, v[..6 * r].iter().map(|&x| rat(x, 1)).collect());
            let b = Q::from_vec(r, 6, v[36..36 + 6 * r].iter().map(|&x| rat(x, 2)).collect());
            a.mul(&b)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn rank_matches_minor_oracle(m in low_rank_matrix()) {
            prop_assert_eq!(m.rank(), minor_rank(&m));
        }

        #[test]
        fn rref_idempotent_and_kernel_exact(m in low_rank_matrix()) {
            let r = m.rref().matrix;
            prop_assert_eq!(r.rref().matrix, r.clone());
            let k = m.kernel();
            prop_assert_eq!(k.dim(), m.cols() - m.rank());
            for v in k.vectors() {
                prop_assert!(m.apply(&v).iter().all(|x| x == &rat(0, 1)));
            }
            prop_assert_eq!(r.image().dim(), m.rank());
            prop_assert_eq!(m.transpose().image(), Subspace::span(6, &r.to_rows()));
        }
    }
}
