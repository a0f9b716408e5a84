//! Exact arithmetic over the rationals and the Gaussian rationals, with dense
//! matrices, echelon-form subspaces and finite flags.

mod field;
mod flag;
mod matrix;
mod scalar;
mod subspace;

pub use field::{epsilon, is_positive, rat, sign_pow, Field, Rational};
pub use flag::{Convention, Flag};
pub use matrix::{ExactMatrix, Matrix, Rref};
pub use scalar::{is_positive_real, parse_rational_literal, rational_to_f64, ExactScalar, ScalarParseError};
pub use subspace::{extend_basis, subspace_ops, Subspace, SubspaceOps};

pub type ExactSubspace = Subspace<ExactScalar>;
pub type ExactFlag = Flag<ExactScalar>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not equal to its conjugate transpose")]
    NotHermitian,
    #[error("flag is not monotone at index {index}")]
    NotMonotone { index: i64 },
}

fn hermitian_pivots<F: Field>(m: &Matrix<F>) -> Result<Matrix<F>, ExactError> {
    if !m.is_square() {
        return Err(ExactError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if *m != m.adjoint() {
        return Err(ExactError::NotHermitian);
    }
    Ok(m.clone())
}

/// Exact test that a Hermitian matrix is positive definite.
///
/// Elimination without pivoting produces pivots `d_k = D_k / D_{k-1}` where
/// `D_k` is the `k`-th leading principal minor, so all minors are positive
/// iff every pivot is a positive rational.
pub fn hermitian_positive_definite<F: Field>(m: &Matrix<F>) -> Result<bool, ExactError> {
    let mut a = hermitian_pivots(m)?;
    let n = a.rows();
    for k in 0..n {
        let piv = a.get(k, k).clone();
        match piv.as_real() {
            Some(q) if is_positive(&q) => {}
            _ => return Ok(false),
        }
        let inv = piv.inverse().expect("positive pivot");
        for i in k + 1..n {
            let f = a.get(i, k).times(&inv);
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = a.get(k, j).clone();
                a.get_mut(i, j).sub_mul_assign(&f, &t);
            }
        }
    }
    Ok(true)
}

/// Exact test that a Hermitian matrix is positive semidefinite.
///
/// Symmetric elimination: a zero diagonal entry forces its row to vanish.
pub fn hermitian_positive_semidefinite<F: Field>(m: &Matrix<F>) -> Result<bool, ExactError> {
    let mut a = hermitian_pivots(m)?;
    let n = a.rows();
    for k in 0..n {
        let piv = a.get(k, k).clone();
        if piv.is_zero() {
            if (k..n).any(|j| !a.get(k, j).is_zero()) {
                return Ok(false);
            }
            continue;
        }
        match piv.as_real() {
            Some(q) if is_positive(&q) => {}
            _ => return Ok(false),
        }
        let inv = piv.inverse().expect("positive pivot");
        for i in k + 1..n {
            let f = a.get(i, k).times(&inv);
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let t = a.get(k, j).clone();
                a.get_mut(i, j).sub_mul_assign(&f, &t);
            }
        }
    }
    Ok(true)
}

/// Leading principal minors by independent determinant evaluation.
pub fn leading_principal_minors<F: Field>(m: &Matrix<F>) -> Vec<F> {
    (1..=m.rows().min(m.cols())).map(|k| m.block(0, k, 0, k).determinant()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(x: &str) -> ExactScalar {
        x.parse().unwrap()
    }

    #[test]
    fn positive_definite_examples() {
        assert!(hermitian_positive_definite(&ExactMatrix::identity(3)).unwrap());
        let d = ExactMatrix::diagonal(&[s("1"), s("-1")]);
        assert!(!hermitian_positive_definite(&d).unwrap());
        let m = ExactMatrix::from_rows(2, vec![vec![s("2"), s("0/1+1/1i")], vec![s("0/1+-1/1i"), s("2")]]);
        assert!(hermitian_positive_definite(&m).unwrap());
        assert_eq!(leading_principal_minors(&m), vec![s("2"), s("3")]);
        let not_h = ExactMatrix::from_rows(2, vec![vec![s("2"), s("1")], vec![s("0"), s("2")]]);
        assert_eq!(hermitian_positive_definite(&not_h), Err(ExactError::NotHermitian));
        assert!(matches!(
            hermitian_positive_definite(&ExactMatrix::zeros(1, 2)),
            Err(ExactError::NotSquare { .. })
        ));
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ExactScalar::from_int(rng.gen_range(-2..=6)));
            for j in i + 1..n {
                let x = ExactScalar::new(rat(rng.gen_range(-3..=3), 2), rat(rng.gen_range(-3..=3), 2));
                m.set(j, i, x.conj());
                m.set(i, j, x);
            }
        }
        m
    }

    fn quadratic(m: &ExactMatrix, v: &[ExactScalar]) -> ExactScalar {
        let mv = m.apply(v);
        v.iter().zip(&mv).fold(ExactScalar::zero(), |acc, (a, b)| acc.plus(&a.conj().times(b)))
    }

    /// Minor criterion and pivots agree; positive definite forms are positive
    /// on sampled vectors.
    #[test]
    fn agrees_with_minors_and_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(1..=4);
            let m = random_hermitian(&mut rng, n);
            let pd = hermitian_positive_definite(&m).unwrap();
            let minors_ok = leading_principal_minors(&m).iter().all(is_positive_real);
            assert_eq!(pd, minors_ok);
            if pd {
                assert!(hermitian_positive_semidefinite(&m).unwrap());
                for _ in 0..100 {
                    let v: Vec<ExactScalar> = (0..n)
                        .map(|_| ExactScalar::new(rat(rng.gen_range(-4..=4), 1), rat(rng.gen_range(-4..=4), 3)))
                        .collect();
                    if v.iter().all(Field::is_zero) {
                        continue;
                    }
                    assert!(is_positive_real(&quadratic(&m, &v)));
                }
            }
        }
    }

    #[test]
    fn semidefinite_detects_kernel_and_negatives() {
        let m = ExactMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]);
        assert!(hermitian_positive_semidefinite(&m).unwrap());
        assert!(!hermitian_positive_definite(&m).unwrap());
        let m = ExactMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert!(!hermitian_positive_semidefinite(&m).unwrap());
    }
}
