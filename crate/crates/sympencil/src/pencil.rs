//! Matrix pencils `λA + B` and the symmetric wrapper.
//!
//! A pencil is a pair of same-sized complex matrices. Evaluation treats the
//! point at infinity as first class (it returns the leading coefficient `A`),
//! which avoids a separate reversal API. All values are immutable after
//! construction and every operation is a pure function.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ComplexMatrix;

/// Point of `C ∪ {∞}` at which a pencil can be evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalPoint {
    Finite(Complex64),
    Infinity,
}

impl EvalPoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, EvalPoint::Infinity)
    }
}

impl From<Complex64> for EvalPoint {
    fn from(z: Complex64) -> Self {
        EvalPoint::Finite(z)
    }
}

impl From<f64> for EvalPoint {
    fn from(x: f64) -> Self {
        EvalPoint::Finite(Complex64::new(x, 0.0))
    }
}

impl std::fmt::Display for EvalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalPoint::Finite(z) => write!(f, "{z}"),
            EvalPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Matrix pencil `λA + B` with `A`, `B` of identical size.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    a: ComplexMatrix,
    b: ComplexMatrix,
}

impl Pencil {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        if a.rows() != b.rows() || a.cols() != b.cols() {
            return Err(Error::DimensionMismatch(format!(
                "pencil coefficients {}x{} vs {}x{}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        Ok(Self { a, b })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            a: ComplexMatrix::zeros(rows, cols),
            b: ComplexMatrix::zeros(rows, cols),
        }
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn is_square(&self) -> bool {
        self.a.is_square()
    }

    /// `sqrt(‖A‖_F² + ‖B‖_F²)`, the norm used for every relative tolerance.
    pub fn norm(&self) -> f64 {
        self.a.frobenius_norm().hypot(self.b.frobenius_norm())
    }

    /// `λ0·A + B` for finite `λ0`, the leading coefficient `A` for `λ0 = ∞`.
    pub fn evaluate(&self, at: impl Into<EvalPoint>) -> ComplexMatrix {
        match at.into() {
            EvalPoint::Finite(z) => &self.a.scale(z) + &self.b,
            EvalPoint::Infinity => self.a.clone(),
        }
    }

    /// Pencil with the roles of `A` and `B` swapped, i.e. `λB + A`. Its value
    /// at 0 is the original's value at ∞.
    pub fn reversal(&self) -> Pencil {
        Pencil {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }

    pub fn transpose(&self) -> Pencil {
        Pencil {
            a: self.a.transpose(),
            b: self.b.transpose(),
        }
    }

    pub fn add(&self, rhs: &Pencil) -> Result<Pencil> {
        if self.rows() != rhs.rows() || self.cols() != rhs.cols() {
            return Err(Error::DimensionMismatch("pencil add".into()));
        }
        Ok(Pencil {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        })
    }

    pub fn sub(&self, rhs: &Pencil) -> Result<Pencil> {
        if self.rows() != rhs.rows() || self.cols() != rhs.cols() {
            return Err(Error::DimensionMismatch("pencil sub".into()));
        }
        Ok(Pencil {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
        })
    }

    pub fn scale(&self, z: Complex64) -> Pencil {
        Pencil {
            a: self.a.scale(z),
            b: self.b.scale(z),
        }
    }

    /// Frobenius inner product `⟨λA+B, λC+D⟩ = tr(AC*) + tr(BD*)`, linear in
    /// the first argument and conjugate-linear in the second.
    pub fn frobenius_inner(&self, other: &Pencil) -> Result<Complex64> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::DimensionMismatch("frobenius inner product".into()));
        }
        let mut acc = Complex64::ZERO;
        for (x, y) in self.a.entries().iter().zip(other.a.entries()) {
            acc += x * y.conj();
        }
        for (x, y) in self.b.entries().iter().zip(other.b.entries()) {
            acc += x * y.conj();
        }
        Ok(acc)
    }

    /// Strict equivalence transform `U⁻¹ (λA+B) V`.
    pub fn strict_equivalence(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Pencil> {
        if u.rows() != self.rows() || !u.is_square() {
            return Err(Error::DimensionMismatch("left transform".into()));
        }
        if v.rows() != self.cols() || !v.is_square() {
            return Err(Error::DimensionMismatch("right transform".into()));
        }
        let a = linalg::solve(u, &(&self.a * v))?;
        let b = linalg::solve(u, &(&self.b * v))?;
        Ok(Pencil { a, b })
    }
}

/// Square pencil with exactly symmetric coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricPencil {
    inner: Pencil,
}

impl SymmetricPencil {
    /// Wraps a pencil whose coefficients are symmetric exactly (bit level),
    /// as produced by the canonical constructors.
    pub fn new(p: Pencil) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::DimensionMismatch("symmetric pencil must be square".into()));
        }
        let asym = p.a.asymmetry().hypot(p.b.asymmetry());
        if asym != 0.0 {
            return Err(Error::NotSymmetric {
                asymmetry: asym,
                tolerance: 0.0,
            });
        }
        Ok(Self { inner: p })
    }

    /// Symmetrizes measured data, rejecting it when the drift exceeds
    /// `tol · ‖p‖`.
    pub fn new_symmetrized(p: Pencil, tol: f64) -> Result<Self> {
        if !p.is_square() {
            return Err(Error::DimensionMismatch("symmetric pencil must be square".into()));
        }
        let asym = p.a.asymmetry().hypot(p.b.asymmetry());
        let bound = tol * p.norm();
        if asym > bound {
            return Err(Error::NotSymmetric {
                asymmetry: asym,
                tolerance: bound,
            });
        }
        Ok(Self {
            inner: Pencil {
                a: p.a.symmetrize(),
                b: p.b.symmetrize(),
            },
        })
    }

    pub fn pencil(&self) -> &Pencil {
        &self.inner
    }

    pub fn into_pencil(self) -> Pencil {
        self.inner
    }

    pub fn size(&self) -> usize {
        self.inner.rows()
    }

    pub fn a(&self) -> &ComplexMatrix {
        self.inner.a()
    }

    pub fn b(&self) -> &ComplexMatrix {
        self.inner.b()
    }

    pub fn norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn evaluate(&self, at: impl Into<EvalPoint>) -> ComplexMatrix {
        self.inner.evaluate(at)
    }

    /// Congruence `Wᵀ (λA+B) W`. The result is re-symmetrized by averaging
    /// with its transpose so downstream symmetry invariants hold exactly.
    pub fn congruence(&self, w: &ComplexMatrix) -> Result<SymmetricPencil> {
        if w.rows() != self.size() || !w.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "congruence transform {}x{} on size {}",
                w.rows(),
                w.cols(),
                self.size()
            )));
        }
        let wt = w.transpose();
        let a = (&(&wt * self.a()) * w).symmetrize();
        let b = (&(&wt * self.b()) * w).symmetrize();
        Ok(SymmetricPencil {
            inner: Pencil { a, b },
        })
    }

    /// Congruence that first checks `W` for invertibility through a condition
    /// estimate.
    pub fn congruence_strict(&self, w: &ComplexMatrix) -> Result<SymmetricPencil> {
        if w.rows() == self.size() && w.is_square() && linalg::condition_2(w) > 1e14 {
            return Err(Error::SingularTransform);
        }
        self.congruence(w)
    }
}

// --- JSON wire format -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct PencilJson {
    n: usize,
    m: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "B")]
    b: Vec<Vec<[f64; 2]>>,
}

fn matrix_to_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>], m: usize, n: usize) -> Result<ComplexMatrix> {
    if rows.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "expected {m} rows, found {}",
            rows.len()
        )));
    }
    let lifted: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    let mat = ComplexMatrix::from_rows(&lifted)?;
    if mat.cols() != n && m > 0 {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} columns, found {}",
            mat.cols()
        )));
    }
    Ok(mat)
}

impl Pencil {
    /// Serializes to the `{"n":..,"m":..,"A":[[[re,im],..],..],"B":..}` wire
    /// format (`m` rows of `n` entries).
    pub fn to_json(&self) -> String {
        let j = PencilJson {
            n: self.cols(),
            m: self.rows(),
            a: matrix_to_rows(&self.a),
            b: matrix_to_rows(&self.b),
        };
        serde_json::to_string(&j).expect("pencil serialization cannot fail")
    }

    /// Parses the wire format, rejecting ragged rows, size mismatches, and
    /// non-finite entries.
    pub fn from_json(s: &str) -> Result<Pencil> {
        let j: PencilJson = serde_json::from_str(s)?;
        let a = matrix_from_rows(&j.a, j.m, j.n)?;
        let b = matrix_from_rows(&j.b, j.m, j.n)?;
        Pencil::new(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{build_block, CanonicalBlock};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m1() -> SymmetricPencil {
        build_block(&CanonicalBlock::MinimalPair { d: 1 })
    }

    #[test]
    fn evaluate_constant_pencil() {
        let p = Pencil::new(ComplexMatrix::zeros(2, 2), ComplexMatrix::identity(2)).unwrap();
        assert_eq!(p.evaluate(5.0), ComplexMatrix::identity(2));
    }

    #[test]
    fn evaluate_m1_at_zero_gives_constant_part() {
        // M_1 = λ[[0,G₁ᵀ],[G₁,0]] + [[0,F₁ᵀ],[F₁,0]] with F₁ = [0 1], G₁ = [1 0]:
        // value at 0 is the F-pattern, ones at (2,3) and (3,2) in 1-based terms.
        let v = m1().evaluate(0.0);
        let mut expect = ComplexMatrix::zeros(3, 3);
        expect[(1, 2)] = c(1.0, 0.0);
        expect[(2, 1)] = c(1.0, 0.0);
        assert_eq!(v, expect);
    }

    #[test]
    fn evaluate_at_infinity_returns_leading_coefficient() {
        // P(λ) of the 3x3 example: diag(λ-λ1, λ-λ2, 0) has leading term diag(1,1,0).
        let p = example_p(c(1.0, 0.0), c(2.0, 0.0));
        let lead = p.evaluate(EvalPoint::Infinity);
        let expect =
            ComplexMatrix::from_real_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0]])
                .unwrap();
        assert_eq!(lead, expect);
    }

    fn example_p(l1: Complex64, l2: Complex64) -> Pencil {
        let mut a = ComplexMatrix::zeros(3, 3);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(1.0, 0.0);
        let mut b = ComplexMatrix::zeros(3, 3);
        b[(0, 0)] = -l1;
        b[(1, 1)] = -l2;
        Pencil::new(a, b).unwrap()
    }

    #[test]
    fn frobenius_inner_is_squared_norm_on_diagonal() {
        let p = example_p(c(1.0, 0.0), c(2.0, -1.0));
        let ip = p.frobenius_inner(&p).unwrap();
        assert!(ip.im.abs() < 1e-15);
        let expect = p.a().frobenius_norm().powi(2) + p.b().frobenius_norm().powi(2);
        assert!((ip.re - expect).abs() < 1e-12);
        assert!(ip.re >= 0.0);
    }

    #[test]
    fn frobenius_inner_disjoint_supports_is_zero() {
        let p = Pencil::new(ComplexMatrix::identity(2), ComplexMatrix::zeros(2, 2)).unwrap();
        let q = Pencil::new(ComplexMatrix::zeros(2, 2), ComplexMatrix::identity(2)).unwrap();
        assert_eq!(p.frobenius_inner(&q).unwrap(), Complex64::ZERO);
    }

    #[test]
    fn frobenius_inner_m1_self_counts_unit_entries() {
        // M_1 has two unit entries in A (the G-part) and two in B (the F-part),
        // so ⟨M_1, M_1⟩ = 4.
        let ip = m1().pencil().frobenius_inner(m1().pencil()).unwrap();
        assert_eq!(ip, c(4.0, 0.0));
    }

    #[test]
    fn congruence_identity_is_noop() {
        let s = m1();
        let t = s.congruence(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn congruence_by_permutation_swaps_diagonal() {
        let s = SymmetricPencil::new(example_p(c(1.0, 0.0), c(2.0, 0.0))).unwrap();
        let w = ComplexMatrix::permutation(&[1, 0, 2]);
        let t = s.congruence(&w).unwrap();
        let expect = SymmetricPencil::new(example_p(c(2.0, 0.0), c(1.0, 0.0))).unwrap();
        assert_eq!(t, expect);
    }

    #[test]
    fn congruence_preserves_evaluation_rank() {
        // K_1 at (n=3, r=2) is the M_1 block; any invertible congruence
        // keeps its normal rank 2, checked at a random evaluation point.
        let s = m1();
        let w = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.3), c(0.4, -0.2), c(0.0, 0.5)],
            vec![c(0.2, 0.0), c(1.2, 0.1), c(0.3, 0.0)],
            vec![c(0.0, -0.4), c(0.1, 0.2), c(0.9, 0.0)],
        ])
        .unwrap();
        let moved = s.congruence(&w).unwrap();
        let sv = linalg::singular_values(&moved.evaluate(c(0.29, 0.53)));
        assert_eq!(sv.iter().filter(|&&x| x > 1e-10).count(), 2);
    }

    #[test]
    fn congruence_strict_rejects_singular_w() {
        let s = m1();
        let w = ComplexMatrix::zeros(3, 3);
        assert!(matches!(
            s.congruence_strict(&w),
            Err(Error::SingularTransform)
        ));
    }

    #[test]
    fn strict_equivalence_identity_is_noop() {
        let p = example_p(c(0.5, 0.0), c(-1.0, 0.5));
        let q = p
            .strict_equivalence(&ComplexMatrix::identity(3), &ComplexMatrix::identity(3))
            .unwrap();
        assert!(q.sub(&p).unwrap().norm() < 1e-14);
    }

    #[test]
    fn strict_equivalence_preserves_evaluation_rank() {
        // L_1 = [λ, 1]: normal rank 1, preserved by any invertible U, V.
        let l1 = crate::canonical::build_L(1);
        let u = ComplexMatrix::from_rows(&[vec![c(2.0, 1.0)]]).unwrap();
        let v = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.5, 0.2)],
            vec![c(0.0, 1.0), c(3.0, 0.0)],
        ])
        .unwrap();
        let q = l1.strict_equivalence(&u, &v).unwrap();
        let sv = linalg::singular_values(&q.evaluate(c(0.37, 0.21)));
        assert_eq!(sv.iter().filter(|&&s| s > 1e-10).count(), 1);
    }

    #[test]
    fn strict_equivalence_rejects_singular_u() {
        let p = example_p(c(1.0, 0.0), c(2.0, 0.0));
        let u = ComplexMatrix::zeros(3, 3);
        assert!(p
            .strict_equivalence(&u, &ComplexMatrix::identity(3))
            .is_err());
    }

    #[test]
    fn evaluation_commutes_with_strict_equivalence() {
        let p = example_p(c(1.0, 2.0), c(-0.3, 0.4));
        let u = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, 0.0)],
            vec![c(0.0, 1.0), c(1.0, 0.0), c(0.5, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let v = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, 0.0), c(1.0, -1.0)],
            vec![c(0.0, 0.0), c(1.0, 1.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.5), c(1.0, 0.0)],
        ])
        .unwrap();
        let q = p.strict_equivalence(&u, &v).unwrap();
        let z = c(0.6, -0.8);
        let lhs = q.evaluate(z);
        let rhs = linalg::solve(&u, &(&p.evaluate(z) * &v)).unwrap();
        let scale = p.norm().max(1.0);
        assert!((&lhs - &rhs).frobenius_norm() <= 1e-12 * scale);
    }

    #[test]
    fn congruence_composes() {
        let s = m1();
        let w1 = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.2, 0.1), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.3, -0.2)],
            vec![c(0.1, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let w2 = ComplexMatrix::from_rows(&[
            vec![c(0.9, 0.0), c(0.0, 0.0), c(0.4, 0.0)],
            vec![c(0.0, 0.2), c(1.1, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.1, 0.1), c(1.0, 0.0)],
        ])
        .unwrap();
        let seq = s.congruence(&w1).unwrap().congruence(&w2).unwrap();
        let combined = s.congruence(&(&w1 * &w2)).unwrap();
        let diff = seq.pencil().sub(combined.pencil()).unwrap().norm();
        assert!(diff <= 1e-12 * s.norm().max(1.0));
    }

    #[test]
    fn json_round_trip_and_ragged_rejection() {
        let p = example_p(c(1.0, 0.5), c(2.0, 0.0));
        let s = p.to_json();
        let q = Pencil::from_json(&s).unwrap();
        assert_eq!(p, q);

        let ragged = r#"{"n":2,"m":2,"A":[[[1,0],[0,0]],[[0,0]]],"B":[[[0,0],[0,0]],[[0,0],[0,0]]]}"#;
        assert!(Pencil::from_json(ragged).is_err());
    }
}
