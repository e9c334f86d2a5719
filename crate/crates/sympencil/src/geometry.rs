//! Tangent spaces and codimensions of congruence orbits and bundles.
//!
//! The congruence orbit of a symmetric pencil `λA + B` has tangent space
//! `{λ(XᵀA + AX) + (XᵀB + BX) : X ∈ C^{n×n}}` at that pencil. Its dimension
//! is the rank of the linear map from the `n²` entries of `X` into the
//! `n(n+1)`-complex-dimensional space of symmetric pencils; the codimension
//! is the rest. For the generic forms `K_a` the codimensions collapse to
//! closed forms, which the numeric route must reproduce exactly.

use crate::canonical::GenericComponent;
use crate::error::Result;
use crate::extract::{complete_eigenstructure_with, ExtractOptions};
use crate::linalg;
use crate::matrix::ComplexMatrix;
use crate::pencil::SymmetricPencil;

/// Ambient complex dimension of the space of symmetric pencils: two
/// symmetric matrices with `n(n+1)/2` independent entries each.
pub fn ambient_dimension(n: usize) -> usize {
    n * (n + 1)
}

/// Dense matrix of the map `X ↦ (XᵀA + AX, XᵀB + BX)`, with `n²` columns
/// (entries of `X`) and `n(n+1)` rows (upper triangles of both symmetric
/// outputs, unscaled; rank is scaling-invariant).
pub fn tangent_map(s: &SymmetricPencil) -> ComplexMatrix {
    let n = s.size();
    let half = n * (n + 1) / 2;
    let tri_index = |i: usize, j: usize| -> usize {
        // upper triangle (i <= j), row-major: rows above i hold n-k entries each
        i * (2 * n - i + 1) / 2 + (j - i)
    };
    let mut map = ComplexMatrix::zeros(2 * half, n * n);
    for p in 0..n {
        for q in 0..n {
            let col = p * n + q;
            // X = e_p e_qᵀ: XᵀM + MX = e_q (M row p) + (M col p) e_qᵀ
            for (coeff, offset) in [(s.a(), 0usize), (s.b(), half)] {
                for j in 0..n {
                    let (r, cc) = if q <= j { (q, j) } else { (j, q) };
                    map[(offset + tri_index(r, cc), col)] += coeff[(p, j)];
                }
                for i in 0..n {
                    let (r, cc) = if i <= q { (i, q) } else { (q, i) };
                    map[(offset + tri_index(r, cc), col)] += coeff[(i, p)];
                }
            }
        }
    }
    map
}

/// Orbit codimension `n(n+1) - rank(tangent map)`, decided numerically.
pub fn codim_orbit_numeric(s: &SymmetricPencil, tol: f64) -> Result<usize> {
    codim_orbit_numeric_with(s, &ExtractOptions::with_tol(tol))
}

pub fn codim_orbit_numeric_with(s: &SymmetricPencil, opts: &ExtractOptions) -> Result<usize> {
    let n = s.size();
    if n == 0 {
        return Ok(0);
    }
    let map = tangent_map(s);
    let sv = linalg::singular_values(&map);
    let scale = s.norm().max(map.max_abs());
    if scale == 0.0 {
        return Ok(ambient_dimension(n));
    }
    let rank = decide_tangent_rank(&sv, opts, scale)?;
    Ok(ambient_dimension(n) - rank)
}

fn decide_tangent_rank(sv: &[f64], opts: &ExtractOptions, scale: f64) -> Result<usize> {
    let tolerance = opts.tol * scale;
    let rank = sv.iter().filter(|&&x| x > tolerance).count();
    if rank > 0 && rank < sv.len() {
        let (retained, discarded) = (sv[rank - 1], sv[rank]);
        if discarded > 0.0 && retained / discarded < opts.gap_factor {
            return Err(crate::error::Error::IndeterminateRank {
                retained,
                discarded,
                tolerance,
                context: "tangent map rank".into(),
            });
        }
    }
    Ok(rank)
}

/// Closed-form orbit codimension of `K_a`: `(n-a)(n-r+1)`.
pub fn codim_orbit_generic(c: &GenericComponent) -> usize {
    (c.n - c.a) * (c.n - c.r + 1)
}

/// Closed-form bundle codimension of `K_a`: `(n+1)(n-r) - a(n-r-1)`, which
/// equals the orbit codimension minus the `r - 2a` distinct eigenvalues.
pub fn codim_bundle_generic(c: &GenericComponent) -> usize {
    (c.n + 1) * (c.n - c.r) - c.a * (c.n - c.r - 1)
}

/// Bundle codimension of an arbitrary symmetric pencil: orbit codimension
/// minus the number of distinct eigenvalue clusters of its extracted
/// structure.
pub fn codim_bundle_numeric(s: &SymmetricPencil, tol: f64) -> Result<usize> {
    codim_bundle_numeric_with(s, &ExtractOptions::with_tol(tol))
}

pub fn codim_bundle_numeric_with(s: &SymmetricPencil, opts: &ExtractOptions) -> Result<usize> {
    let orbit = codim_orbit_numeric_with(s, opts)?;
    let es = complete_eigenstructure_with(s.pencil(), opts)?;
    Ok(orbit - es.distinct_eigenvalue_count())
}
