//! Dense factorization kernels.
//!
//! Singular values and singular bases are computed with a one-sided Jacobi
//! orthogonalization: right rotations make the working columns orthogonal,
//! their norms are the singular values, and the accumulated rotations form a
//! full unitary basis. This is accurate at the sizes this crate handles and,
//! unlike the thin SVDs of general-purpose crates, always yields complete
//! null-space bases. QR, LU solves, and Schur-form eigenvalues are backed by
//! nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// One-sided Jacobi: returns `(W, V)` with `M V = W`, `V` unitary, and the
/// columns of `W` pairwise orthogonal (their norms are the singular values).
fn jacobi_columns(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let rows = m.rows();
    let cols = m.cols();
    let mut w = m.clone();
    let mut v = ComplexMatrix::identity(cols);
    if rows == 0 || cols <= 1 {
        return (w, v);
    }
    let tol = 1e-15;
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..cols - 1 {
            for q in (p + 1)..cols {
                let mut a = 0.0;
                let mut b = 0.0;
                let mut cross = Complex64::ZERO;
                for i in 0..rows {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    a += wp.norm_sqr();
                    b += wq.norm_sqr();
                    cross += wp.conj() * wq;
                }
                let gamma = cross.norm();
                let (sa, sb) = (a.sqrt(), b.sqrt());
                // the √a·√b form avoids underflow of a·b; columns this far
                // below any working scale are numerically zero and rotating
                // them only churns denormal noise
                if gamma <= tol * sa * sb || sa <= 1e-150 || sb <= 1e-150 {
                    continue;
                }
                rotated = true;
                // absorb the phase of the cross term into column q (exactly
                // unit modulus), then apply the real Jacobi rotation zeroing
                // the off-diagonal of [[a, γ], [γ, b]]
                let omega_bar = Complex64::from_polar(1.0, -cross.arg());
                let tau = (b - a) / (2.0 * gamma);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                for i in 0..rows {
                    let vp = w[(i, p)];
                    let vq = omega_bar * w[(i, q)];
                    w[(i, p)] = cs * vp - sn * vq;
                    w[(i, q)] = sn * vp + cs * vq;
                }
                for i in 0..cols {
                    let vp = v[(i, p)];
                    let vq = omega_bar * v[(i, q)];
                    v[(i, p)] = cs * vp - sn * vq;
                    v[(i, q)] = sn * vp + cs * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    (w, v)
}

fn column_norms(w: &ComplexMatrix) -> Vec<f64> {
    (0..w.cols())
        .map(|j| {
            (0..w.rows())
                .map(|i| w[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// Singular values in descending order (`min(rows, cols)` of them).
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let (w, _) = jacobi_columns(m);
    let mut s = column_norms(&w);
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s.truncate(m.rows().min(m.cols()));
    s
}

/// Singular values of `m` together with a full `cols x cols` unitary whose
/// columns are right singular vectors in descending σ order; the trailing
/// columns span the numerical null space.
pub fn right_singular_basis(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    if cols == 0 {
        return (Vec::new(), ComplexMatrix::zeros(0, 0));
    }
    if rows == 0 {
        return (Vec::new(), ComplexMatrix::identity(cols));
    }
    let (w, v) = jacobi_columns(m);
    let norms = column_norms(&w);
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());
    let v_sorted = v.select_columns(&order);
    let mut svals: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    svals.truncate(rows.min(cols));
    (svals, v_sorted)
}

/// Singular values of `m` together with a full `rows x rows` unitary whose
/// columns are left singular vectors in descending σ order.
pub fn left_singular_basis(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (svals, u) = right_singular_basis(&m.adjoint());
    (svals, u)
}

/// 2-norm condition number, `inf` for numerically singular input.
pub fn condition_2(m: &ComplexMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&smax), Some(&smin)) if smin > 0.0 => smax / smin,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Solves `A X = B` for square `A` via LU with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if a.rows() == 0 {
        return Ok(ComplexMatrix::zeros(0, b.cols()));
    }
    let lu = a.to_na().lu();
    match lu.solve(&b.to_na()) {
        Some(x) if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
            Ok(ComplexMatrix::from_na(&x))
        }
        _ => Err(Error::SingularTransform),
    }
}

pub fn try_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

/// QR factorization of a square matrix: `m = Q R` with `Q` unitary and `R`
/// upper triangular.
pub fn qr_square(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    assert!(m.is_square(), "qr_square requires a square matrix");
    if m.rows() == 0 {
        return (ComplexMatrix::zeros(0, 0), ComplexMatrix::zeros(0, 0));
    }
    let qr = m.to_na().qr();
    (ComplexMatrix::from_na(&qr.q()), ComplexMatrix::from_na(&qr.r()))
}

/// Eigenvalues of a square complex matrix via the Schur form.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    assert!(m.is_square(), "eigenvalues requires a square matrix");
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let schur = m
        .to_na()
        .try_schur(f64::EPSILON, 100_000)
        .ok_or(Error::EigenConvergence)?;
    let (_, t): (DMatrix<Complex64>, DMatrix<Complex64>) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}
