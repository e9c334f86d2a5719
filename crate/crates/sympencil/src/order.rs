//! Integer partitions with the dominance order, and the combinatorial
//! obstructions that keep the generic bundles' closures incomparable.

use serde::Serialize;

use crate::canonical::{generic_bundle, weyr_minimal, GenericComponent, StructureDescriptor};
use crate::error::{Error, Result};

/// Weakly decreasing sequence of nonnegative integers, trailing zeros
/// trimmed. The empty partition is allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegerPartition(Vec<usize>);

impl IntegerPartition {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotAPartition(format!(
                "parts must be weakly decreasing, got {parts:?}"
            )));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Self(parts))
    }

    /// Sorts the parts first; convenient for partitions built from counts.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(parts).expect("sorted descending")
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Dominance comparison `self ⪯ other`: every prefix sum of `self` is at
    /// most the corresponding prefix sum of `other`, padding with zeros.
    pub fn dominated_by(&self, other: &IntegerPartition) -> bool {
        let len = self.len().max(other.len());
        let mut lhs = 0usize;
        let mut rhs = 0usize;
        for i in 0..len {
            lhs += self.part(i);
            rhs += other.part(i);
            if lhs > rhs {
                return false;
            }
        }
        true
    }

    /// Componentwise sum `η + a` over an explicitly declared length. Adding a
    /// positive constant to implicit trailing zeros would change the length
    /// semantics, so the length must be supplied in that case.
    pub fn add(&self, a: usize, declared_len: Option<usize>) -> Result<IntegerPartition> {
        let len = match declared_len {
            Some(l) => {
                if l < self.len() {
                    return Err(Error::Precondition(format!(
                        "declared length {l} is shorter than the partition ({})",
                        self.len()
                    )));
                }
                l
            }
            None => {
                if a > 0 {
                    return Err(Error::MissingPartitionLength);
                }
                self.len()
            }
        };
        let parts: Vec<usize> = (0..len).map(|i| self.part(i) + a).collect();
        IntegerPartition::new(parts)
    }

    /// Conjugate partition: entry `k` counts parts `>= k+1`.
    pub fn conjugate(&self) -> IntegerPartition {
        if self.is_empty() {
            return IntegerPartition::empty();
        }
        let max = self.0[0];
        let parts: Vec<usize> = (1..=max)
            .map(|k| self.0.iter().filter(|&&p| p >= k).count())
            .collect();
        IntegerPartition::new(parts).expect("counts are weakly decreasing")
    }
}

impl std::fmt::Display for IntegerPartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Why one generic bundle's closure cannot contain another's.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Obstruction {
    /// The candidate limit's minimal-index Weyr partition is not dominated by
    /// the approximating family's, so no degenerating sequence exists.
    MinimalIndexMajorization {
        limit: IntegerPartition,
        family: IntegerPartition,
    },
    /// The candidate limit demands more simple eigenvalues than any limit of
    /// the family can carry; extra eigenvalues arrive with multiplicity >= 2.
    SimpleEigenvalueMultiplicity { required: usize, available: usize },
    /// No implemented necessary condition is violated.
    None,
}

impl Obstruction {
    pub fn is_none(&self) -> bool {
        matches!(self, Obstruction::None)
    }
}

/// Obstruction to `K_{a'} ∈ closure(bun(K_a))`, where `family` carries `a`
/// and `limit` carries `a'`. The two components must share `(n, r)` and have
/// `a != a'`.
pub fn closure_obstruction(
    family: &GenericComponent,
    limit: &GenericComponent,
) -> Result<Obstruction> {
    if family.n != limit.n || family.r != limit.r {
        return Err(Error::Precondition(format!(
            "components must share (n, r): ({}, {}) vs ({}, {})",
            family.n, family.r, limit.n, limit.r
        )));
    }
    if family.a == limit.a {
        return Err(Error::Precondition(
            "obstruction is only defined for a != a'".into(),
        ));
    }
    if limit.a > family.a {
        let eps_limit = weyr_minimal(&generic_bundle(limit));
        let eps_family = weyr_minimal(&generic_bundle(family));
        debug_assert!(!eps_limit.dominated_by(&eps_family));
        Ok(Obstruction::MinimalIndexMajorization {
            limit: eps_limit,
            family: eps_family,
        })
    } else {
        Ok(Obstruction::SimpleEigenvalueMultiplicity {
            required: limit.eigenvalue_count(),
            available: family.eigenvalue_count(),
        })
    }
}

/// Number of independent polynomial right null vectors of degree `<= d` for a
/// pencil whose right minimal indices are `indices`.
fn nullity_at_degree(d: usize, indices: &[usize]) -> usize {
    indices
        .iter()
        .map(|&e| (d + 1).saturating_sub(e))
        .sum()
}

/// Necessary-condition filter for `bun(desc) ⊆ closure(bun(K_a))`: the set of
/// `a` that survive the rank bound, the minimal-index semicontinuity (which
/// reduces to Weyr dominance when the ranks agree), and the simple-eigenvalue
/// count. The conditions are necessary, not sufficient.
pub fn candidate_components(
    desc: &StructureDescriptor,
    n: usize,
    r: usize,
) -> Result<Vec<GenericComponent>> {
    if desc.realized_size() != n {
        return Err(Error::Precondition(format!(
            "descriptor realizes size {}, expected {n}",
            desc.realized_size()
        )));
    }
    if n < 2 || r < 1 || r > n - 1 {
        return Err(Error::InvalidComponent(format!(
            "need n >= 2 and 1 <= r <= n-1, got n={n}, r={r}"
        )));
    }
    let rank_d = desc.normal_rank();
    if rank_d > r {
        return Ok(Vec::new());
    }
    let degrees = desc.minimal_degrees();
    let mut out = Vec::new();
    for a in 0..=(r / 2) {
        let comp = GenericComponent::new(n, r, a)?;
        let k_degrees = generic_bundle(&comp).minimal_degrees();
        // Rank of every Toeplitz null-space count is lower semicontinuous, so
        // a limit of bundle members must have at least as many polynomial
        // null vectors at every degree.
        let semicontinuous =
            (0..=n).all(|d| nullity_at_degree(d, &degrees) >= nullity_at_degree(d, &k_degrees));
        if !semicontinuous {
            continue;
        }
        if rank_d == r && desc.simple_eigenvalue_count() > comp.eigenvalue_count() {
            continue;
        }
        out.push(comp);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{generic_kcf, CanonicalBlock};
    use num_complex::Complex64;

    fn part(v: &[usize]) -> IntegerPartition {
        IntegerPartition::new(v.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dominance_examples() {
        assert!(part(&[2, 1]).dominated_by(&part(&[2, 1])));
        assert!(part(&[2, 1]).dominated_by(&part(&[2, 2])));
        assert!(!part(&[3]).dominated_by(&part(&[2, 1])));
        // padding: (1) vs (1,1)
        assert!(part(&[1]).dominated_by(&part(&[1, 1])));
        assert!(!part(&[1, 1]).dominated_by(&part(&[1])));
    }

    #[test]
    fn partition_add_examples() {
        assert_eq!(part(&[2, 1]).add(0, None).unwrap(), part(&[2, 1]));
        assert_eq!(part(&[2, 1]).add(1, Some(3)).unwrap(), part(&[3, 2, 1]));
        assert_eq!(part(&[0]).add(2, Some(2)).unwrap(), part(&[2, 2]));
        assert!(matches!(
            part(&[2, 1]).add(1, None),
            Err(Error::MissingPartitionLength)
        ));
        assert!(part(&[2, 1]).add(1, Some(1)).is_err());
    }

    #[test]
    fn constructor_rejects_increasing_parts() {
        assert!(IntegerPartition::new(vec![1, 2]).is_err());
        assert_eq!(part(&[2, 1, 0, 0]).parts(), &[2, 1]);
    }

    #[test]
    fn conjugate_round_trip() {
        let p = part(&[4, 2, 1]);
        assert_eq!(p.conjugate().parts(), &[3, 2, 1, 1]);
        assert_eq!(p.conjugate().conjugate(), p);
        assert!(IntegerPartition::empty().conjugate().is_empty());
    }

    #[test]
    fn obstruction_table_for_three_by_three() {
        let c0 = GenericComponent::new(3, 2, 0).unwrap();
        let c1 = GenericComponent::new(3, 2, 1).unwrap();

        // a = 0 family, a' = 1 limit: majorization fails, ε_{K_1}=(1,1) vs ε_{K_0}=(1).
        match closure_obstruction(&c0, &c1).unwrap() {
            Obstruction::MinimalIndexMajorization { limit, family } => {
                assert_eq!(limit.parts(), &[1, 1]);
                assert_eq!(family.parts(), &[1]);
                assert!(!limit.dominated_by(&family));
            }
            other => panic!("expected majorization obstruction, got {other:?}"),
        }

        // a = 1 family, a' = 0 limit: eigenvalue count (2 required, 0 available).
        match closure_obstruction(&c1, &c0).unwrap() {
            Obstruction::SimpleEigenvalueMultiplicity { required, available } => {
                assert_eq!((required, available), (2, 0));
            }
            other => panic!("expected eigenvalue-count obstruction, got {other:?}"),
        }

        assert!(closure_obstruction(&c0, &c0).is_err());
    }

    #[test]
    fn obstruction_everywhere_for_n6_r4() {
        let comps = GenericComponent::all(6, 4).unwrap();
        assert_eq!(comps.len(), 3);
        for x in &comps {
            for y in &comps {
                if x.a == y.a {
                    continue;
                }
                assert!(!closure_obstruction(x, y).unwrap().is_none());
            }
        }
    }

    #[test]
    fn candidates_contain_own_component() {
        for n in 2..=7 {
            for r in 1..=(n - 1) {
                for a in 0..=(r / 2) {
                    let comp = GenericComponent::new(n, r, a).unwrap();
                    let d = generic_kcf(&comp, None).unwrap();
                    let cands = candidate_components(&d, n, r).unwrap();
                    assert!(
                        cands.iter().any(|k| k.a == a),
                        "own component missing for ({n},{r},{a})"
                    );
                }
            }
        }
    }

    #[test]
    fn candidates_for_example_pencil_exclude_a1() {
        // {M_0, J_1(λ1), J_1(λ2)} at (n=3, r=2): in K_0's closure candidates,
        // excluded from K_1's by the simple-eigenvalue count.
        let d = StructureDescriptor::orbit(vec![
            CanonicalBlock::MinimalPair { d: 0 },
            CanonicalBlock::JordanFinite { size: 1, mu: c(1.0, 0.0) },
            CanonicalBlock::JordanFinite { size: 1, mu: c(2.0, 0.0) },
        ])
        .unwrap();
        let cands = candidate_components(&d, 3, 2).unwrap();
        let a_values: Vec<usize> = cands.iter().map(|k| k.a).collect();
        assert_eq!(a_values, vec![0]);
    }

    #[test]
    fn candidates_for_zero_pencil_pass_all_components() {
        // The 3x3 zero pencil scales into every orbit's closure; the
        // semicontinuity condition keeps every a.
        let d = StructureDescriptor::orbit(vec![
            CanonicalBlock::MinimalPair { d: 0 },
            CanonicalBlock::MinimalPair { d: 0 },
            CanonicalBlock::MinimalPair { d: 0 },
        ])
        .unwrap();
        let cands = candidate_components(&d, 3, 2).unwrap();
        let a_values: Vec<usize> = cands.iter().map(|k| k.a).collect();
        assert_eq!(a_values, vec![0, 1]);
    }

    #[test]
    fn dominance_is_partial_order_on_small_samples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let random_partition = |rng: &mut rand_chacha::ChaCha8Rng| {
            let len = rng.random_range(0..5usize);
            let mut v: Vec<usize> = (0..len).map(|_| rng.random_range(0..6usize)).collect();
            v.sort_unstable_by(|a, b| b.cmp(a));
            IntegerPartition::new(v).unwrap()
        };
        for _ in 0..500 {
            let a = random_partition(&mut rng);
            let b = random_partition(&mut rng);
            let cc = random_partition(&mut rng);
            assert!(a.dominated_by(&a));
            if a.dominated_by(&b) && b.dominated_by(&a) {
                // equal prefix sums at every index force equal parts
                assert_eq!(a, b);
            }
            if a.dominated_by(&b) && b.dominated_by(&cc) {
                assert!(a.dominated_by(&cc));
            }
        }
    }
}
