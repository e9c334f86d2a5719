//! Canonical blocks for symmetric pencils, structure descriptors, and the
//! generic forms `K_a`.
//!
//! The three block families are the symmetric pair block `M_d` (one right and
//! one left minimal index `d`), the Jordan-like block for a finite eigenvalue,
//! and the Jordan-like block for the eigenvalue at infinity. Every symmetric
//! pencil is congruent to a direct sum of these, with the block multiset
//! unique per eigenvalue.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::order::IntegerPartition;
use crate::pencil::{EvalPoint, Pencil, SymmetricPencil};

/// Relative tolerance under which two descriptor eigenvalues are the same.
/// Cluster means recovered from a defective eigenvalue of multiplicity ℓ are
/// only accurate to about `eps^(2/ℓ)`, so this sits well above that for
/// ℓ <= 4 while staying far below the 1e-3 sampling gap.
pub const EIGENVALUE_MATCH_TOL: f64 = 1e-7;

/// One diagonal block of the congruence canonical form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CanonicalBlock {
    /// `M_d`, a `(2d+1) x (2d+1)` singular block pairing a right and a left
    /// minimal index `d`. `M_0` is a 1x1 zero.
    MinimalPair { d: usize },
    /// `J^s_size(mu)`, anti-triangular Jordan block at a finite eigenvalue.
    JordanFinite { size: usize, mu: Complex64 },
    /// `J^s_size(∞)`, anti-triangular Jordan block at infinity.
    JordanInfinite { size: usize },
}

impl CanonicalBlock {
    /// Side length of the realized square block.
    pub fn realized_size(&self) -> usize {
        match *self {
            CanonicalBlock::MinimalPair { d } => 2 * d + 1,
            CanonicalBlock::JordanFinite { size, .. } => size,
            CanonicalBlock::JordanInfinite { size } => size,
        }
    }

    pub fn is_minimal(&self) -> bool {
        matches!(self, CanonicalBlock::MinimalPair { .. })
    }
}

/// Whether eigenvalue identities are fixed (orbit) or anonymous (bundle).
///
/// A bundle keeps the partition of block sizes per anonymous eigenvalue and
/// treats ∞ as an ordinary anonymous eigenvalue, since congruence bundles let
/// eigenvalues move anywhere in `C ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Orbit,
    Bundle,
}

/// Multiset of canonical blocks with an interpretation level.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureDescriptor {
    blocks: Vec<CanonicalBlock>,
    level: Level,
}

fn same_eigenvalue(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= EIGENVALUE_MATCH_TOL * 1.0_f64.max(a.norm()).max(b.norm())
}

fn block_sort_key(b: &CanonicalBlock) -> (u8, f64, f64, i64) {
    match *b {
        CanonicalBlock::MinimalPair { d } => (0, 0.0, 0.0, -(d as i64)),
        CanonicalBlock::JordanFinite { size, mu } => (1, mu.re, mu.im, -(size as i64)),
        CanonicalBlock::JordanInfinite { size } => (2, 0.0, 0.0, -(size as i64)),
    }
}

impl StructureDescriptor {
    /// Builds a descriptor; blocks are stored in the canonical sort order
    /// (minimal pairs by decreasing `d`, then finite Jordan blocks by
    /// eigenvalue lexicographically and decreasing size, then infinite Jordan
    /// blocks by decreasing size).
    pub fn new(blocks: Vec<CanonicalBlock>, level: Level) -> Result<Self> {
        for b in &blocks {
            match *b {
                CanonicalBlock::JordanFinite { size, mu } => {
                    if size == 0 {
                        return Err(Error::InvalidDescriptor("Jordan block of size 0".into()));
                    }
                    if !mu.re.is_finite() || !mu.im.is_finite() {
                        return Err(Error::InvalidDescriptor("non-finite eigenvalue".into()));
                    }
                }
                CanonicalBlock::JordanInfinite { size } => {
                    if size == 0 {
                        return Err(Error::InvalidDescriptor("Jordan block of size 0".into()));
                    }
                }
                CanonicalBlock::MinimalPair { .. } => {}
            }
        }
        let mut blocks = blocks;
        blocks.sort_by(|x, y| {
            let (kx, rx, ix, sx) = block_sort_key(x);
            let (ky, ry, iy, sy) = block_sort_key(y);
            kx.cmp(&ky)
                .then(rx.total_cmp(&ry))
                .then(ix.total_cmp(&iy))
                .then(sx.cmp(&sy))
        });
        Ok(Self { blocks, level })
    }

    pub fn orbit(blocks: Vec<CanonicalBlock>) -> Result<Self> {
        Self::new(blocks, Level::Orbit)
    }

    pub fn blocks(&self) -> &[CanonicalBlock] {
        &self.blocks
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// Total realized size `n = Σ(2d_i+1) + Σℓ_j + Σk_t`.
    pub fn realized_size(&self) -> usize {
        self.blocks.iter().map(CanonicalBlock::realized_size).sum()
    }

    pub fn minimal_pair_count(&self) -> usize {
        self.blocks.iter().filter(|b| b.is_minimal()).count()
    }

    /// Normal rank of any realization: `n` minus the number of `M_d` blocks.
    pub fn normal_rank(&self) -> usize {
        self.realized_size() - self.minimal_pair_count()
    }

    /// Degrees of the (paired) minimal indices, descending.
    pub fn minimal_degrees(&self) -> Vec<usize> {
        let mut ds: Vec<usize> = self
            .blocks
            .iter()
            .filter_map(|b| match b {
                CanonicalBlock::MinimalPair { d } => Some(*d),
                _ => None,
            })
            .collect();
        ds.sort_unstable_by(|a, b| b.cmp(a));
        ds
    }

    /// Distinct eigenvalues (finite up to the match tolerance, plus ∞ if
    /// present) with the sizes of their Jordan blocks, descending.
    pub fn eigenvalue_groups(&self) -> Vec<(EvalPoint, Vec<usize>)> {
        let mut finite: Vec<(Complex64, Vec<usize>)> = Vec::new();
        let mut infinite: Vec<usize> = Vec::new();
        for b in &self.blocks {
            match *b {
                CanonicalBlock::JordanFinite { size, mu } => {
                    if let Some((_, sizes)) =
                        finite.iter_mut().find(|(m, _)| same_eigenvalue(*m, mu))
                    {
                        sizes.push(size);
                    } else {
                        finite.push((mu, vec![size]));
                    }
                }
                CanonicalBlock::JordanInfinite { size } => infinite.push(size),
                CanonicalBlock::MinimalPair { .. } => {}
            }
        }
        let mut out: Vec<(EvalPoint, Vec<usize>)> = finite
            .into_iter()
            .map(|(mu, mut sizes)| {
                sizes.sort_unstable_by(|a, b| b.cmp(a));
                (EvalPoint::Finite(mu), sizes)
            })
            .collect();
        if !infinite.is_empty() {
            infinite.sort_unstable_by(|a, b| b.cmp(a));
            out.push((EvalPoint::Infinity, infinite));
        }
        out
    }

    /// Number of distinct eigenvalues in `C ∪ {∞}`.
    pub fn distinct_eigenvalue_count(&self) -> usize {
        self.eigenvalue_groups().len()
    }

    /// Number of simple eigenvalues (total multiplicity one).
    pub fn simple_eigenvalue_count(&self) -> usize {
        self.eigenvalue_groups()
            .iter()
            .filter(|(_, sizes)| sizes.len() == 1 && sizes[0] == 1)
            .count()
    }

    /// Forgets eigenvalue identities.
    pub fn to_bundle(&self) -> StructureDescriptor {
        StructureDescriptor {
            blocks: self.blocks.clone(),
            level: Level::Bundle,
        }
    }

    /// Orbit-level equality up to the eigenvalue match tolerance.
    pub fn same_orbit(&self, other: &StructureDescriptor) -> bool {
        if self.blocks.len() != other.blocks.len() {
            return false;
        }
        self.blocks.iter().zip(&other.blocks).all(|(x, y)| match (x, y) {
            (CanonicalBlock::MinimalPair { d: a }, CanonicalBlock::MinimalPair { d: b }) => a == b,
            (
                CanonicalBlock::JordanFinite { size: sa, mu: ma },
                CanonicalBlock::JordanFinite { size: sb, mu: mb },
            ) => sa == sb && same_eigenvalue(*ma, *mb),
            (
                CanonicalBlock::JordanInfinite { size: sa },
                CanonicalBlock::JordanInfinite { size: sb },
            ) => sa == sb,
            _ => false,
        })
    }

    /// Bundle-level equality: same minimal-pair multiset and same multiset of
    /// per-eigenvalue size partitions, with ∞ anonymous like any other
    /// eigenvalue.
    pub fn same_bundle(&self, other: &StructureDescriptor) -> bool {
        if self.minimal_degrees() != other.minimal_degrees() {
            return false;
        }
        let mut a: Vec<Vec<usize>> = self.eigenvalue_groups().into_iter().map(|(_, s)| s).collect();
        let mut b: Vec<Vec<usize>> = other.eigenvalue_groups().into_iter().map(|(_, s)| s).collect();
        a.sort();
        b.sort();
        a == b
    }
}

/// One irreducible component of the rank-bounded symmetric pencil set,
/// identified by `(n, r, a)` with the Euclidean division `a = (n-r)α + s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenericComponent {
    pub n: usize,
    pub r: usize,
    pub a: usize,
    pub alpha: usize,
    pub s: usize,
}

impl GenericComponent {
    pub fn new(n: usize, r: usize, a: usize) -> Result<Self> {
        if n < 2 || r < 1 || r > n - 1 {
            return Err(Error::InvalidComponent(format!(
                "need n >= 2 and 1 <= r <= n-1, got n={n}, r={r}"
            )));
        }
        if a > r / 2 {
            return Err(Error::InvalidComponent(format!(
                "need 0 <= a <= floor(r/2) = {}, got a={a}",
                r / 2
            )));
        }
        let alpha = a / (n - r);
        let s = a % (n - r);
        Ok(Self { n, r, a, alpha, s })
    }

    /// All components for the given `(n, r)`, in increasing `a`.
    pub fn all(n: usize, r: usize) -> Result<Vec<GenericComponent>> {
        (0..=r / 2).map(|a| GenericComponent::new(n, r, a)).collect()
    }

    /// Number of finite simple eigenvalues `r - 2a` in `K_a`.
    pub fn eigenvalue_count(&self) -> usize {
        self.r - 2 * self.a
    }
}

/// `L_d(λ) = λ G_d + F_d`, the `d x (d+1)` right singular building block.
/// `d = 0` yields the empty 0x1 pencil.
#[allow(non_snake_case)]
pub fn build_L(d: usize) -> Pencil {
    let mut a = ComplexMatrix::zeros(d, d + 1);
    let mut b = ComplexMatrix::zeros(d, d + 1);
    for i in 0..d {
        a[(i, i)] = Complex64::ONE;
        b[(i, i + 1)] = Complex64::ONE;
    }
    Pencil::new(a, b).expect("same dimensions by construction")
}

/// Realizes a canonical block as an exactly symmetric pencil.
pub fn build_block(block: &CanonicalBlock) -> SymmetricPencil {
    let p = match *block {
        CanonicalBlock::MinimalPair { d } => {
            let n = 2 * d + 1;
            let l = build_L(d);
            let mut a = ComplexMatrix::zeros(n, n);
            let mut b = ComplexMatrix::zeros(n, n);
            a.set_block(0, d + 1, &l.a().transpose());
            a.set_block(d + 1, 0, l.a());
            b.set_block(0, d + 1, &l.b().transpose());
            b.set_block(d + 1, 0, l.b());
            Pencil::new(a, b).unwrap()
        }
        CanonicalBlock::JordanFinite { size, mu } => {
            let mut a = ComplexMatrix::zeros(size, size);
            let mut b = ComplexMatrix::zeros(size, size);
            for i in 0..size {
                for j in 0..size {
                    if i + j == size - 1 {
                        a[(i, j)] = Complex64::ONE;
                        b[(i, j)] = -mu;
                    } else if i + j + 2 == size {
                        b[(i, j)] = Complex64::ONE;
                    }
                }
            }
            Pencil::new(a, b).unwrap()
        }
        CanonicalBlock::JordanInfinite { size } => {
            let mut a = ComplexMatrix::zeros(size, size);
            let mut b = ComplexMatrix::zeros(size, size);
            for i in 0..size {
                for j in 0..size {
                    if i + j == size - 1 {
                        b[(i, j)] = Complex64::ONE;
                    } else if i + j + 2 == size {
                        a[(i, j)] = Complex64::ONE;
                    }
                }
            }
            Pencil::new(a, b).unwrap()
        }
    };
    SymmetricPencil::new(p).expect("canonical blocks are symmetric by construction")
}

/// Block-diagonal direct sum; the empty sum is the 0x0 pencil.
pub fn direct_sum(parts: &[SymmetricPencil]) -> SymmetricPencil {
    let n: usize = parts.iter().map(SymmetricPencil::size).sum();
    let mut a = ComplexMatrix::zeros(n, n);
    let mut b = ComplexMatrix::zeros(n, n);
    let mut off = 0;
    for p in parts {
        a.set_block(off, off, p.a());
        b.set_block(off, off, p.b());
        off += p.size();
    }
    SymmetricPencil::new(Pencil::new(a, b).unwrap()).unwrap()
}

fn check_distinct(eigs: &[Complex64], min_gap: f64) -> Result<()> {
    for i in 0..eigs.len() {
        for j in (i + 1)..eigs.len() {
            if (eigs[i] - eigs[j]).norm() < min_gap {
                return Err(Error::InvalidEigenvalues(format!(
                    "eigenvalues {} and {} closer than {min_gap:.1e}",
                    eigs[i], eigs[j]
                )));
            }
        }
    }
    Ok(())
}

/// Samples `count` pairwise-distinct points of the open unit disc, resampling
/// on collisions closer than `min_gap`.
pub fn sample_distinct_unit_disc(
    count: usize,
    min_gap: f64,
    rng: &mut impl Rng,
) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(count);
    while out.len() < count {
        let re: f64 = rng.random_range(-1.0..1.0);
        let im: f64 = rng.random_range(-1.0..1.0);
        let z = Complex64::new(re, im);
        if z.norm() >= 1.0 {
            continue;
        }
        if out.iter().all(|w| (w - z).norm() >= min_gap) {
            out.push(z);
        }
    }
    out
}

/// Structure descriptor of the generic form `K_a`: `s` copies of `M_{α+1}`,
/// `n-r-s` copies of `M_α`, and `r-2a` simple finite eigenvalues.
///
/// Omitted eigenvalues are sampled from the unit disc with a deterministic
/// seed derived from `(n, r, a)`.
pub fn generic_kcf(
    c: &GenericComponent,
    eigenvalues: Option<&[Complex64]>,
) -> Result<StructureDescriptor> {
    let need = c.eigenvalue_count();
    let eigs: Vec<Complex64> = match eigenvalues {
        Some(list) => {
            if list.len() != need {
                return Err(Error::InvalidEigenvalues(format!(
                    "expected {need} eigenvalues, got {}",
                    list.len()
                )));
            }
            check_distinct(list, 1e-6)?;
            list.to_vec()
        }
        None => {
            let seed = 0x73796d70_u64 ^ ((c.n as u64) << 32) ^ ((c.r as u64) << 16) ^ c.a as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample_distinct_unit_disc(need, 1e-6, &mut rng)
        }
    };
    let mut blocks = Vec::new();
    for _ in 0..c.s {
        blocks.push(CanonicalBlock::MinimalPair { d: c.alpha + 1 });
    }
    for _ in 0..(c.n - c.r - c.s) {
        blocks.push(CanonicalBlock::MinimalPair { d: c.alpha });
    }
    for mu in eigs {
        blocks.push(CanonicalBlock::JordanFinite { size: 1, mu });
    }
    StructureDescriptor::orbit(blocks)
}

/// Bundle-level descriptor of `K_a` (anonymous eigenvalues; the stored ones
/// are placeholders).
pub fn generic_bundle(c: &GenericComponent) -> StructureDescriptor {
    let d = generic_kcf(c, None).expect("component already validated");
    d.to_bundle()
}

/// Realizes an orbit-level descriptor as the direct sum of its blocks in the
/// canonical sort order.
pub fn descriptor_to_pencil(d: &StructureDescriptor) -> Result<SymmetricPencil> {
    if d.level() == Level::Bundle {
        return Err(Error::InvalidDescriptor(
            "cannot realize a bundle-level descriptor; eigenvalues are anonymous".into(),
        ));
    }
    let parts: Vec<SymmetricPencil> = d.blocks().iter().map(build_block).collect();
    Ok(direct_sum(&parts))
}

/// Weyr characteristic of the minimal indices: `ε_k` is the number of `M_d`
/// blocks with `d >= k`, trimmed of trailing zeros.
pub fn weyr_minimal(d: &StructureDescriptor) -> IntegerPartition {
    let degrees = d.minimal_degrees();
    if degrees.is_empty() {
        return IntegerPartition::empty();
    }
    let dmax = degrees[0];
    let parts: Vec<usize> = (0..=dmax)
        .map(|k| degrees.iter().filter(|&&dd| dd >= k).count())
        .collect();
    IntegerPartition::new(parts).expect("counts are weakly decreasing")
}

/// Weyr characteristic `δ^μ`: entry `k` counts Jordan blocks at `μ` of size
/// `>= k+1`. Empty when `μ` is not an eigenvalue.
pub fn weyr_eigenvalue(d: &StructureDescriptor, mu: &EvalPoint) -> IntegerPartition {
    let sizes: Vec<usize> = d
        .blocks()
        .iter()
        .filter_map(|b| match (b, mu) {
            (CanonicalBlock::JordanFinite { size, mu: m }, EvalPoint::Finite(target))
                if same_eigenvalue(*m, *target) =>
            {
                Some(*size)
            }
            (CanonicalBlock::JordanInfinite { size }, EvalPoint::Infinity) => Some(*size),
            _ => None,
        })
        .collect();
    if sizes.is_empty() {
        return IntegerPartition::empty();
    }
    let lmax = *sizes.iter().max().unwrap();
    let parts: Vec<usize> = (1..=lmax)
        .map(|k| sizes.iter().filter(|&&l| l >= k).count())
        .collect();
    IntegerPartition::new(parts).expect("counts are weakly decreasing")
}

// --- JSON wire format -------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "type")]
enum BlockJson {
    M { d: usize },
    J { size: usize, mu: [f64; 2] },
    Jinf { size: usize },
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    level: String,
    blocks: Vec<BlockJson>,
}

impl StructureDescriptor {
    pub fn to_json(&self) -> String {
        let blocks = self
            .blocks
            .iter()
            .map(|b| match *b {
                CanonicalBlock::MinimalPair { d } => BlockJson::M { d },
                CanonicalBlock::JordanFinite { size, mu } => BlockJson::J {
                    size,
                    mu: [mu.re, mu.im],
                },
                CanonicalBlock::JordanInfinite { size } => BlockJson::Jinf { size },
            })
            .collect();
        let j = DescriptorJson {
            level: match self.level {
                Level::Orbit => "orbit".into(),
                Level::Bundle => "bundle".into(),
            },
            blocks,
        };
        serde_json::to_string(&j).expect("descriptor serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<StructureDescriptor> {
        let j: DescriptorJson = serde_json::from_str(s)?;
        let level = match j.level.as_str() {
            "orbit" => Level::Orbit,
            "bundle" => Level::Bundle,
            other => {
                return Err(Error::InvalidDescriptor(format!(
                    "unknown level {other:?}"
                )))
            }
        };
        let blocks = j
            .blocks
            .into_iter()
            .map(|b| match b {
                BlockJson::M { d } => CanonicalBlock::MinimalPair { d },
                BlockJson::J { size, mu } => CanonicalBlock::JordanFinite {
                    size,
                    mu: Complex64::new(mu[0], mu[1]),
                },
                BlockJson::Jinf { size } => CanonicalBlock::JordanInfinite { size },
            })
            .collect();
        StructureDescriptor::new(blocks, level)
    }

    /// Short human-readable block list, e.g. `M_1, M_0, J_1(0.5+0i)`.
    pub fn block_summary(&self) -> Vec<String> {
        self.blocks
            .iter()
            .map(|b| match *b {
                CanonicalBlock::MinimalPair { d } => format!("M_{d}"),
                CanonicalBlock::JordanFinite { size, mu } => {
                    format!("J_{size}({:.6}{:+.6}i)", mu.re, mu.im)
                }
                CanonicalBlock::JordanInfinite { size } => format!("J_{size}(inf)"),
            })
            .collect()
    }
}
