//! Complete-eigenstructure extraction.
//!
//! Two independent routes are provided. [`complete_eigenstructure`] runs a
//! staircase deflation: unitary column/row compressions driven by SVD rank
//! decisions peel off the right minimal indices together with the structure
//! at infinity, a second pass on the transposed core peels off the left
//! minimal indices, and the remaining regular core is clustered and probed
//! with shifted staircases for the Jordan structure of each eigenvalue.
//! [`toeplitz_rank_counts`] recovers the same Weyr characteristics purely
//! from numerical ranks of stacked block matrices, with no deflation, and
//! serves as the cross-checking oracle.
//!
//! Every rank decision must show a clear singular-value gap; an ambiguous
//! decision raises [`Error::IndeterminateRank`] instead of guessing.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::canonical::{sample_distinct_unit_disc, CanonicalBlock, StructureDescriptor};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ComplexMatrix;
use crate::order::IntegerPartition;
use crate::pencil::{EvalPoint, Pencil};

/// Tolerances for extraction. `tol` is relative to the pencil norm
/// `sqrt(‖A‖² + ‖B‖²)`; a rank decision keeps singular values above
/// `tol * norm` and requires a ratio of at least `gap_factor` across the cut.
#[derive(Clone, Copy, Debug)]
pub struct ExtractOptions {
    pub tol: f64,
    pub gap_factor: f64,
    pub cluster_tol: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            gap_factor: 10.0,
            cluster_tol: 1e-6,
        }
    }
}

impl ExtractOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Outcome of a single numerical rank decision: the retained/discarded
/// singular values around the cut.
#[derive(Clone, Copy, Debug)]
pub struct RankDecision {
    pub rank: usize,
    pub tolerance: f64,
    pub retained: f64,
    pub discarded: f64,
}

/// Accepts a rank when the discarded singular values sit below `tol * scale`
/// and the retained-to-discarded ratio is at least `gap_factor`.
fn decide_rank(
    svals: &[f64],
    tol: f64,
    scale: f64,
    gap_factor: f64,
    context: &str,
) -> Result<RankDecision> {
    let tolerance = tol * scale;
    let rank = svals.iter().filter(|&&s| s > tolerance).count();
    let retained = if rank > 0 { svals[rank - 1] } else { f64::INFINITY };
    let discarded = if rank < svals.len() { svals[rank] } else { 0.0 };
    if rank > 0 && rank < svals.len() && discarded > 0.0 && retained / discarded < gap_factor {
        return Err(Error::IndeterminateRank {
            retained,
            discarded,
            tolerance,
            context: context.to_string(),
        });
    }
    Ok(RankDecision {
        rank,
        tolerance,
        retained,
        discarded,
    })
}

const EVAL_POINT_SEED: u64 = 0x70656e63_696c5f31;

/// Normal rank: the maximum numerical rank over three deterministic
/// pseudo-random unit-disc evaluation points plus the point at infinity.
/// A hit on the finite eigenvalue set has probability zero; taking the max
/// makes any such hit harmless.
pub fn normal_rank(p: &Pencil, tol: f64) -> Result<usize> {
    normal_rank_with(p, &ExtractOptions::with_tol(tol))
}

pub fn normal_rank_with(p: &Pencil, opts: &ExtractOptions) -> Result<usize> {
    let scale = p.norm();
    if scale == 0.0 {
        return Ok(0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(EVAL_POINT_SEED);
    let mut points: Vec<EvalPoint> = sample_distinct_unit_disc(3, 1e-2, &mut rng)
        .into_iter()
        .map(EvalPoint::Finite)
        .collect();
    points.push(EvalPoint::Infinity);
    let mut best = 0;
    for pt in points {
        let sv = linalg::singular_values(&p.evaluate(pt));
        let d = decide_rank(
            &sv,
            opts.tol,
            scale,
            opts.gap_factor,
            &format!("normal rank at λ0 = {pt}"),
        )?;
        best = best.max(d.rank);
    }
    Ok(best)
}

// --- staircase deflation -----------------------------------------------------

struct StairOutcome {
    /// `(s_j, t_j)` per stage: column nullity found and the rank of the other
    /// coefficient restricted to those columns.
    stages: Vec<(usize, usize)>,
    core_c: ComplexMatrix,
    core_d: ComplexMatrix,
}

/// One-sided staircase on the matrix pair `(C, D)`. Columns of `C` are
/// compressed onto its null space, `D` restricted to those columns is row
/// compressed, the deflated trailing pair continues. For `(C, D) = (A, B)`
/// this peels the right minimal indices and the eigenvalue at infinity; for
/// `(C, D) = (μA+B, A)` it peels the structure at the finite eigenvalue `μ`.
fn staircase(
    c0: &ComplexMatrix,
    d0: &ComplexMatrix,
    tol: f64,
    scale: f64,
    gap_factor: f64,
    context: &str,
) -> Result<StairOutcome> {
    let mut c = c0.clone();
    let mut d = d0.clone();
    let mut stages = Vec::new();
    loop {
        let (m, n) = (c.rows(), c.cols());
        if n == 0 {
            break;
        }
        let (svals, v) = linalg::right_singular_basis(&c);
        let rc = decide_rank(&svals, tol, scale, gap_factor, context)?.rank;
        let s = n - rc;
        if s == 0 {
            break;
        }
        // null columns first
        let order: Vec<usize> = (rc..n).chain(0..rc).collect();
        let vp = v.select_columns(&order);
        let c1 = &c * &vp;
        let d1 = &d * &vp;
        let d_null = d1.submatrix(0, m, 0, s);
        let (sv2, u) = linalg::left_singular_basis(&d_null);
        let t = decide_rank(&sv2, tol, scale, gap_factor, context)?.rank;
        if t > s {
            return Err(Error::InconsistentStructure(format!(
                "{context}: row compression rank {t} exceeds column nullity {s}"
            )));
        }
        let uh = u.adjoint();
        let c2 = &uh * &c1;
        let d2 = &uh * &d1;
        stages.push((s, t));
        c = c2.submatrix(t, m, s, n);
        d = d2.submatrix(t, m, s, n);
    }
    Ok(StairOutcome {
        stages,
        core_c: c,
        core_d: d,
    })
}

/// Minimal indices read off the stage counts: stage `j` (0-based) found
/// `s_j - t_j` minimal indices equal to `j`. Descending.
fn minimal_indices_from_stages(stages: &[(usize, usize)]) -> Vec<usize> {
    let mut out = Vec::new();
    for (j, &(s, t)) in stages.iter().enumerate() {
        for _ in 0..(s - t) {
            out.push(j);
        }
    }
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Weyr counts of the deflated eigenvalue: `h_j = t_j - #{minimal indices >= j}`.
fn eigen_weyr_from_stages(stages: &[(usize, usize)]) -> Result<IntegerPartition> {
    let mut parts = Vec::with_capacity(stages.len());
    for j in 0..stages.len() {
        let t = stages[j].1;
        let deeper: usize = stages[j + 1..].iter().map(|&(s, t2)| s - t2).sum();
        if t < deeper {
            return Err(Error::InconsistentStructure(
                "staircase produced a negative Weyr count".into(),
            ));
        }
        parts.push(t - deeper);
    }
    IntegerPartition::new(parts)
        .map_err(|_| Error::InconsistentStructure("staircase Weyr counts not monotone".into()))
}

/// Jordan block sizes of `μ` inside a regular pencil `(a2, b2)` via the
/// shifted staircase; descending, empty when `μ` is not an eigenvalue.
fn jordan_sizes_in_regular(
    a2: &ComplexMatrix,
    b2: &ComplexMatrix,
    mu: Complex64,
    tol: f64,
    scale: f64,
    gap_factor: f64,
) -> Result<Vec<usize>> {
    let shifted = &a2.scale(mu) + b2;
    let st = staircase(&shifted, a2, tol, scale, gap_factor, "shifted staircase")?;
    if !minimal_indices_from_stages(&st.stages).is_empty() {
        return Err(Error::InconsistentStructure(
            "regular core produced minimal indices under a shift".into(),
        ));
    }
    let weyr = eigen_weyr_from_stages(&st.stages)?;
    Ok(weyr.conjugate().parts().to_vec())
}

// --- complete eigenstructure --------------------------------------------------

/// Strict-equivalence invariants of a pencil: minimal indices and elementary
/// divisors.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenstructure {
    /// Right minimal indices, descending.
    pub right_minimal: Vec<usize>,
    /// Left minimal indices, descending.
    pub left_minimal: Vec<usize>,
    /// Finite eigenvalues with their Jordan block sizes (descending).
    pub finite: Vec<(Complex64, Vec<usize>)>,
    /// Jordan block sizes at infinity, descending.
    pub infinite: Vec<usize>,
}

impl Eigenstructure {
    /// Number of distinct eigenvalues in `C ∪ {∞}`.
    pub fn distinct_eigenvalue_count(&self) -> usize {
        self.finite.len() + usize::from(!self.infinite.is_empty())
    }
}

const SHIFT_SEED: u64 = 0x73686966_745f7074;

/// Eigenvalues of a square regular pencil with no infinite structure, via a
/// shift-and-invert spectral transform: `θ ∈ spec((σA+B)⁻¹A)` maps to the
/// pencil eigenvalue `λ = σ - 1/θ`.
fn regular_eigenvalues(a2: &ComplexMatrix, b2: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let rho = a2.rows();
    if rho == 0 {
        return Ok(Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SHIFT_SEED);
    let mut last_err = Error::EigenConvergence;
    for _ in 0..8 {
        let sigma = sample_distinct_unit_disc(1, 0.0, &mut rng)[0] * Complex64::new(1.5, 0.0);
        let m = &a2.scale(sigma) + b2;
        if linalg::condition_2(&m) > 1e12 {
            continue;
        }
        match linalg::solve(&m, a2) {
            Ok(t) => {
                let thetas = linalg::eigenvalues(&t)?;
                let mut out = Vec::with_capacity(rho);
                for th in thetas {
                    if th.norm() < 1e-10 {
                        return Err(Error::InconsistentStructure(
                            "infinite eigenvalue leaked into the regular core".into(),
                        ));
                    }
                    out.push(sigma - Complex64::ONE / th);
                }
                return Ok(out);
            }
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// Greedy transitive clustering of complex points at threshold `tau`.
fn cluster_indices(vals: &[Complex64], tau: f64) -> Vec<Vec<usize>> {
    let n = vals.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (vals[i] - vals[j]).norm() <= tau {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut parent, i);
        groups[r].push(i);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

/// Clusters computed eigenvalues and validates each cluster against the
/// shifted staircase. Eigenvalues of a Jordan block of size ℓ are only
/// accurate to about `eps^(1/ℓ)`, so the clustering threshold is raised
/// stepwise until every cluster's staircase multiplicity matches its size.
fn clustered_jordan_structure(
    a2: &ComplexMatrix,
    b2: &ComplexMatrix,
    eigs: &[Complex64],
    opts: &ExtractOptions,
    scale: f64,
) -> Result<Vec<(Complex64, Vec<usize>)>> {
    if eigs.is_empty() {
        return Ok(Vec::new());
    }
    let lam_mag = 1.0 + eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut taus = vec![opts.cluster_tol * scale];
    for t in [1e-6, 1e-5, 1e-4, 4e-4, 1.6e-3] {
        taus.push(t * lam_mag);
    }
    taus.sort_by(f64::total_cmp);
    taus.dedup();

    let mut last_err: Option<Error> = None;
    'ladder: for &tau in &taus {
        let clusters = cluster_indices(eigs, tau);
        let mut found = Vec::with_capacity(clusters.len());
        for cluster in &clusters {
            let count = cluster.len();
            let sum: Complex64 = cluster.iter().map(|&i| eigs[i]).sum();
            let mean = sum / count as f64;
            let spread = cluster
                .iter()
                .map(|&i| (eigs[i] - mean).norm())
                .fold(0.0, f64::max);
            // The cluster mean is accurate to roughly spread²; loosen the
            // shifted rank tolerance accordingly.
            let tol_shift = opts.tol.max(30.0 * spread * spread).max(1e3 * f64::EPSILON);
            match jordan_sizes_in_regular(a2, b2, mean, tol_shift, scale, opts.gap_factor) {
                Ok(sizes) if sizes.iter().sum::<usize>() == count => {
                    found.push((mean, sizes));
                }
                Ok(sizes) => {
                    last_err = Some(Error::IndeterminateRank {
                        retained: spread,
                        discarded: tau,
                        tolerance: tol_shift * scale,
                        context: format!(
                            "eigenvalue cluster of size {count} validated as multiplicity {}",
                            sizes.iter().sum::<usize>()
                        ),
                    });
                    continue 'ladder;
                }
                Err(e) => {
                    last_err = Some(e);
                    continue 'ladder;
                }
            }
        }
        return Ok(found);
    }
    Err(last_err.unwrap_or_else(|| {
        Error::InconsistentStructure("eigenvalue clustering failed".into())
    }))
}

/// Computes minimal indices and elementary divisors of an arbitrary pencil.
pub fn complete_eigenstructure(p: &Pencil, tol: f64) -> Result<Eigenstructure> {
    complete_eigenstructure_with(p, &ExtractOptions::with_tol(tol))
}

pub fn complete_eigenstructure_with(p: &Pencil, opts: &ExtractOptions) -> Result<Eigenstructure> {
    let (m, n) = (p.rows(), p.cols());
    let scale = p.norm();
    if scale == 0.0 {
        return Ok(Eigenstructure {
            right_minimal: vec![0; n],
            left_minimal: vec![0; m],
            finite: Vec::new(),
            infinite: Vec::new(),
        });
    }
    let r = normal_rank_with(p, opts)?;

    // Right minimal indices and the structure at infinity.
    let st1 = staircase(
        p.a(),
        p.b(),
        opts.tol,
        scale,
        opts.gap_factor,
        "staircase at infinity",
    )?;
    let right_minimal = minimal_indices_from_stages(&st1.stages);
    if right_minimal.len() != n - r {
        return Err(Error::InconsistentStructure(format!(
            "found {} right minimal indices, rank count predicts {}",
            right_minimal.len(),
            n - r
        )));
    }
    let infinite = eigen_weyr_from_stages(&st1.stages)?.conjugate().parts().to_vec();

    // Left minimal indices from the transposed core.
    let st2 = staircase(
        &st1.core_c.transpose(),
        &st1.core_d.transpose(),
        opts.tol,
        scale,
        opts.gap_factor,
        "transposed staircase",
    )?;
    let left_minimal = minimal_indices_from_stages(&st2.stages);
    if left_minimal.len() != m - r {
        return Err(Error::InconsistentStructure(format!(
            "found {} left minimal indices, rank count predicts {}",
            left_minimal.len(),
            m - r
        )));
    }
    if !eigen_weyr_from_stages(&st2.stages)?.is_empty() {
        return Err(Error::InconsistentStructure(
            "infinite structure survived the first deflation pass".into(),
        ));
    }

    // Regular core with finite eigenvalues only.
    let a2 = st2.core_c.transpose();
    let b2 = st2.core_d.transpose();
    let right_sum: usize = right_minimal.iter().sum();
    let left_sum: usize = left_minimal.iter().sum();
    let inf_sum: usize = infinite.iter().sum();
    let rho = r
        .checked_sub(right_sum + left_sum + inf_sum)
        .ok_or_else(|| {
            Error::InconsistentStructure("minimal/infinite structure exceeds the rank".into())
        })?;
    if a2.rows() != rho || a2.cols() != rho {
        return Err(Error::InconsistentStructure(format!(
            "regular core is {}x{}, expected {rho}x{rho}",
            a2.rows(),
            a2.cols()
        )));
    }

    let eigs = regular_eigenvalues(&a2, &b2)?;
    let finite = clustered_jordan_structure(&a2, &b2, &eigs, opts, scale)?;

    Ok(Eigenstructure {
        right_minimal,
        left_minimal,
        finite,
        infinite,
    })
}

/// Extracts the complete eigenstructure as a [`StructureDescriptor`],
/// pairing equal left and right minimal indices into `M_d` blocks. Differing
/// left/right lists cannot be represented; on symmetric input they signal a
/// rank-decision failure and are reported as a hard error.
pub fn extract_structure(p: &Pencil, tol: f64) -> Result<StructureDescriptor> {
    extract_structure_with(p, &ExtractOptions::with_tol(tol))
}

pub fn extract_structure_with(p: &Pencil, opts: &ExtractOptions) -> Result<StructureDescriptor> {
    let es = complete_eigenstructure_with(p, opts)?;
    if es.right_minimal != es.left_minimal {
        return Err(Error::UnpairedMinimalIndices {
            right: es.right_minimal,
            left: es.left_minimal,
        });
    }
    let mut blocks = Vec::new();
    for &d in &es.right_minimal {
        blocks.push(CanonicalBlock::MinimalPair { d });
    }
    for (mu, sizes) in &es.finite {
        for &size in sizes {
            blocks.push(CanonicalBlock::JordanFinite { size, mu: *mu });
        }
    }
    for &size in &es.infinite {
        blocks.push(CanonicalBlock::JordanInfinite { size });
    }
    let desc = StructureDescriptor::orbit(blocks)?;
    if desc.realized_size() != p.rows() {
        return Err(Error::InconsistentStructure(format!(
            "block sizes sum to {}, input has size {}",
            desc.realized_size(),
            p.rows()
        )));
    }
    Ok(desc)
}

// --- block-Toeplitz rank oracle ------------------------------------------------

fn stacked_nullity_minimal(p: &Pencil, d: usize, opts: &ExtractOptions, scale: f64) -> Result<usize> {
    let (m, n) = (p.rows(), p.cols());
    let rows = (d + 2) * m;
    let cols = (d + 1) * n;
    let mut stack = ComplexMatrix::zeros(rows, cols);
    for i in 0..=(d + 1) {
        if i <= d {
            stack.set_block(i * m, i * n, p.b());
        }
        if i >= 1 {
            stack.set_block(i * m, (i - 1) * n, p.a());
        }
    }
    let sv = linalg::singular_values(&stack);
    let rank = decide_rank(
        &sv,
        opts.tol,
        scale,
        opts.gap_factor,
        &format!("Toeplitz stack for degree {d}"),
    )?
    .rank;
    Ok(cols - rank)
}

fn stacked_nullity_shifted(
    cmat: &ComplexMatrix,
    dmat: &ComplexMatrix,
    k: usize,
    opts: &ExtractOptions,
    scale: f64,
) -> Result<usize> {
    let (m, n) = (cmat.rows(), cmat.cols());
    let mut stack = ComplexMatrix::zeros(k * m, k * n);
    for i in 0..k {
        stack.set_block(i * m, i * n, cmat);
        if i >= 1 {
            stack.set_block(i * m, (i - 1) * n, dmat);
        }
    }
    let sv = linalg::singular_values(&stack);
    let rank = decide_rank(
        &sv,
        opts.tol,
        scale,
        opts.gap_factor,
        &format!("shifted Toeplitz stack of depth {k}"),
    )?
    .rank;
    Ok(k * n - rank)
}

/// Weyr characteristics from ranks of block-Toeplitz expansions; no
/// deflation is involved, which makes this the independent oracle for the
/// staircase route.
///
/// Without `mu` the result is `ε`, the Weyr partition of the right minimal
/// indices; with `mu` it is `δ^μ`. `kmax` bounds the stack depth.
pub fn toeplitz_rank_counts(
    p: &Pencil,
    mu: Option<EvalPoint>,
    kmax: usize,
) -> Result<IntegerPartition> {
    toeplitz_rank_counts_with(p, mu, kmax, &ExtractOptions::default())
}

pub fn toeplitz_rank_counts_with(
    p: &Pencil,
    mu: Option<EvalPoint>,
    kmax: usize,
    opts: &ExtractOptions,
) -> Result<IntegerPartition> {
    if kmax == 0 {
        return Err(Error::Precondition("kmax must be at least 1".into()));
    }
    let n = p.cols();
    let scale = p.norm();
    if scale == 0.0 {
        return match mu {
            None => IntegerPartition::new(vec![n]),
            Some(_) => Ok(IntegerPartition::empty()),
        };
    }
    let r = normal_rank_with(p, opts)?;
    let null_count = n - r;

    match mu {
        None => {
            // ε_k = null_count − #{indices <= k-1}; the count of indices
            // <= d is the increment of polynomial null-space dimensions.
            let mut parts = vec![null_count];
            if null_count == 0 {
                return Ok(IntegerPartition::empty());
            }
            let mut nu_prev2 = 0usize; // ν_{k-2}
            let mut nu_prev1 = 0usize; // ν_{k-1}
            for k in 1..=kmax {
                let nu = stacked_nullity_minimal(p, k - 1, opts, scale)?;
                let found = nu.checked_sub(nu_prev1).ok_or_else(|| {
                    Error::InconsistentStructure("Toeplitz nullities decreased".into())
                })?;
                let _ = nu_prev2;
                nu_prev2 = nu_prev1;
                nu_prev1 = nu;
                let eps_k = null_count.checked_sub(found).ok_or_else(|| {
                    Error::InconsistentStructure("Toeplitz counts exceed the nullity".into())
                })?;
                if eps_k == 0 {
                    break;
                }
                parts.push(eps_k);
            }
            IntegerPartition::new(parts).map_err(|_| {
                Error::InconsistentStructure("Toeplitz minimal-index counts not monotone".into())
            })
        }
        Some(pt) => {
            let (cmat, dmat) = match pt {
                EvalPoint::Finite(z) => (p.evaluate(z), p.a().clone()),
                EvalPoint::Infinity => (p.a().clone(), p.b().clone()),
            };
            let mut parts = Vec::new();
            let mut nu_prev = 0usize;
            for k in 1..=kmax {
                let nu = stacked_nullity_shifted(&cmat, &dmat, k, opts, scale)?;
                let h = nu
                    .checked_sub(nu_prev + null_count)
                    .ok_or_else(|| {
                        Error::InconsistentStructure("shifted Toeplitz nullities decreased".into())
                    })?;
                if h == 0 {
                    break;
                }
                parts.push(h);
                nu_prev = nu;
            }
            IntegerPartition::new(parts).map_err(|_| {
                Error::InconsistentStructure("shifted Toeplitz counts not monotone".into())
            })
        }
    }
}
