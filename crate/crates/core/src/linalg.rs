//! Dense matrix helpers: exponentials and Hilbert–Schmidt norms.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// `exp(m)`.
///
/// Exactly symmetric input goes through a symmetric eigendecomposition,
/// `V diag(e^λ) Vᵀ`, which is both faster and more accurate than a generic
/// method for the operators built here. Anything else falls back to
/// scaling-and-squaring with a Padé approximant.
pub fn matrix_exponential(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch {
            expected: (m.nrows(), m.nrows()),
            found: m.shape(),
        });
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteExponential);
    }
    let out = if is_symmetric(m) {
        symmetric_exponential(m)
    } else {
        m.exp()
    };
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NonFiniteExponential)
    }
}

pub fn is_symmetric(m: &DMatrix<f64>) -> bool {
    m.is_square() && (0..m.nrows()).all(|i| (0..i).all(|j| m[(i, j)] == m[(j, i)]))
}

/// `exp(m)` for symmetric `m`; the result is symmetrized to remove rounding
/// asymmetry from the reconstruction.
pub fn symmetric_exponential(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    match n {
        0 => return DMatrix::zeros(0, 0),
        1 => return DMatrix::from_element(1, 1, m[(0, 0)].exp()),
        _ => {}
    }
    let (values, vectors) = symmetric_eigen(m);
    let mut scaled = vectors.clone();
    for (mut col, lambda) in scaled.column_iter_mut().zip(values.iter()) {
        col *= lambda.exp();
    }
    let mut out = scaled * vectors.transpose();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = avg;
            out[(j, i)] = avg;
        }
    }
    out
}

/// Eigenvalues (ascending) and orthonormal eigenvectors (as columns) of a
/// symmetric matrix. Only the lower triangle is read.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    match a.self_adjoint_eigen(faer::Side::Lower) {
        Ok(eig) => {
            let s = eig.S().column_vector();
            let u = eig.U();
            (
                DVector::from_fn(n, |i, _| s[i]),
                DMatrix::from_fn(n, n, |i, j| u[(i, j)]),
            )
        }
        // faer only fails on non-finite input; let nalgebra report it the same way
        Err(_) => {
            let eig = nalgebra::SymmetricEigen::new(m.clone());
            (eig.eigenvalues, eig.eigenvectors)
        }
    }
}

/// `sqrt(sum of squared entries)`, the Hilbert–Schmidt (Frobenius) norm.
pub fn hs_norm(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `hs_norm(a - b)` without materializing the difference.
pub fn hs_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            expected: a.shape(),
            found: b.shape(),
        });
    }
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Truncated Taylor series, summed term by term.
    fn taylor_exp(m: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
        let n = m.nrows();
        let mut term = DMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..terms {
            term = &term * m / k as f64;
            sum += &term;
        }
        sum
    }

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn zero_matrix_gives_identity() {
        let e = matrix_exponential(&DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(e, DMatrix::identity(4, 4));
    }

    #[test]
    fn diagonal_case() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, -2.0]));
        let e = matrix_exponential(&m).unwrap();
        assert!((e[(0, 0)] - 0.5f64.exp()).abs() < 1e-15);
        assert!((e[(1, 1)] - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn symmetric_matches_taylor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut m = random_symmetric(5, &mut rng);
            let rho = nalgebra::SymmetricEigen::new(m.clone())
                .eigenvalues
                .iter()
                .fold(0.0f64, |a, v| a.max(v.abs()));
            m *= 0.9 / rho;
            let e = matrix_exponential(&m).unwrap();
            let oracle = taylor_exp(&m, 30);
            assert!((e - oracle).amax() < 1e-10);
        }
    }

    #[test]
    fn non_symmetric_uses_pade_and_matches_taylor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = DMatrix::from_fn(5, 5, |_, _| rng.random_range(-0.3..0.3));
        assert!(!is_symmetric(&m));
        let e = matrix_exponential(&m).unwrap();
        assert!((e - taylor_exp(&m, 30)).amax() < 1e-10);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(
            matrix_exponential(&m),
            Err(Error::NonFiniteExponential)
        ));
        let huge = DMatrix::from_element(1, 1, 1e6);
        assert!(matches!(
            matrix_exponential(&huge),
            Err(Error::NonFiniteExponential)
        ));
    }

    #[test]
    fn hs_norm_examples() {
        assert!((hs_norm(&DMatrix::identity(7, 7)) - 7f64.sqrt()).abs() < 1e-15);
        let a = DMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64);
        assert_eq!(hs_distance(&a, &a).unwrap(), 0.0);
        assert!(hs_distance(&a, &DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn hs_norm_trace_formula_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: DMatrix<f64> = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-2.0..2.0));
        let trace = (a.transpose() * &a).trace().sqrt();
        assert!((hs_norm(&a) - trace).abs() < 1e-12);
    }
}
