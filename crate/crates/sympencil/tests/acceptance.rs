//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers (visible with `--nocapture`).

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sympencil::canonical::{
    descriptor_to_pencil, generic_kcf, weyr_eigenvalue, weyr_minimal,
    CanonicalBlock, GenericComponent, StructureDescriptor,
};
use sympencil::error::Error;
use sympencil::experiments::{
    degenerate_jordan_finite, degenerate_jordan_infinite, genericity_trial, verify_example_1_1,
    SeededSampler,
};
use sympencil::extract::{extract_structure, toeplitz_rank_counts};
use sympencil::geometry::{codim_bundle_generic, codim_orbit_generic, codim_orbit_numeric};
use sympencil::order::IntegerPartition;
use sympencil::pencil::EvalPoint;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Criterion 1: the explicit 3x3 strict equivalence identity holds to
/// relative residual 1e-12 for the reference parameters and for 20 random
/// admissible draws, in under a second.
#[test]
fn criterion_1_example_identity() {
    let start = Instant::now();
    let reference = verify_example_1_1(
        c64(1.0, 0.0),
        c64(2.0, 0.0),
        c64(1e-3, 0.0),
        c64(1e-3, 0.0),
    )
    .expect("reference parameters must verify");
    assert!(reference.passed());

    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0001);
    for draw in 0..20 {
        let l1 = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let l2 = loop {
            let z = c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if (z - l1).norm() > 1e-2 {
                break z;
            }
        };
        let mag1 = 10f64.powf(rng.random_range(-4.0..-1.0));
        let mag2 = 10f64.powf(rng.random_range(-4.0..-1.0));
        let ph1 = rng.random_range(0.0..std::f64::consts::TAU);
        let ph2 = rng.random_range(0.0..std::f64::consts::TAU);
        let e1 = Complex64::from_polar(mag1, ph1);
        let e2 = Complex64::from_polar(mag2, ph2);
        let report = verify_example_1_1(l1, l2, e1, e2)
            .unwrap_or_else(|e| panic!("draw {draw} failed: {e}"));
        assert!(report.passed(), "draw {draw} did not pass");
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "criterion 1 took {elapsed:?}, budget is 1 s"
    );
    println!(
        "ACCEPTANCE 1 (example identity): PASS — reference + 20 draws in {:.0} ms",
        elapsed.as_secs_f64() * 1e3
    );
}

/// Criterion 2: `generic --n N --r R` lists exactly floor(r/2)+1 pairwise
/// distinct bundle descriptors for all 2 <= n <= 10, 1 <= r <= n-1.
#[test]
fn criterion_2_component_count_via_cli() {
    let bin = env!("CARGO_BIN_EXE_sympencil");
    let mut checked = 0;
    for n in 2..=10usize {
        for r in 1..=(n - 1) {
            let out = std::process::Command::new(bin)
                .args(["generic", "--n", &n.to_string(), "--r", &r.to_string()])
                .output()
                .expect("binary runs");
            assert!(out.status.success(), "generic --n {n} --r {r} failed");
            let v: serde_json::Value =
                serde_json::from_slice(&out.stdout).expect("stdout is JSON");
            assert_eq!(
                v["component_count"].as_u64().unwrap() as usize,
                r / 2 + 1,
                "count for ({n},{r})"
            );
            assert_eq!(v["components"].as_array().unwrap().len(), r / 2 + 1);
            assert_eq!(v["pairwise_distinct"], serde_json::Value::Bool(true));
            checked += 1;
        }
    }
    println!("ACCEPTANCE 2 (component count): PASS — {checked} (n, r) pairs via the CLI");
}

/// Criterion 3: numeric orbit codimension equals (n-a)(n-r+1) as exact
/// integers for every (n, r, a) with n <= 6, 50 seeded samples each at
/// condition cap 50, zero failures, in under two minutes.
#[test]
fn criterion_3_codimension_cross_check() {
    let start = Instant::now();
    let sampler = SeededSampler::new(0xacce_0003, 50.0);
    let mut configs = 0;
    let mut samples = 0;
    for n in 2..=6usize {
        for r in 1..=(n - 1) {
            for a in 0..=(r / 2) {
                let comp = GenericComponent::new(n, r, a).unwrap();
                let expected = codim_orbit_generic(&comp);
                for trial in 0..50u64 {
                    let mut rng = sampler.rng_for_trial((configs as u64) << 16 | trial);
                    let eigs = sampler.distinct_eigenvalues(comp.eigenvalue_count(), &mut rng);
                    let kcf = generic_kcf(&comp, Some(&eigs)).unwrap();
                    let canonical = descriptor_to_pencil(&kcf).unwrap();
                    let w = sampler.random_invertible(n, &mut rng);
                    let s = canonical.congruence(&w).unwrap();
                    let got = codim_orbit_numeric(&s, 1e-8).unwrap_or_else(|e| {
                        panic!("({n},{r},{a}) trial {trial}: {e}")
                    });
                    assert_eq!(got, expected, "({n},{r},{a}) trial {trial}");
                    samples += 1;
                }
                configs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "criterion 3 took {elapsed:?}, budget is 2 min"
    );
    println!(
        "ACCEPTANCE 3 (codimension cross-check): PASS — {samples} samples over {configs} \
         configurations in {:.1} s",
        elapsed.as_secs_f64()
    );
}

/// Criterion 4: for r < n-1 the bundle codimension strictly decreases in a,
/// for all n <= 10.
#[test]
fn criterion_4_bundle_codimension_monotonicity() {
    let mut checked = 0;
    for n in 2..=10usize {
        for r in 1..=(n - 1) {
            let comps = GenericComponent::all(n, r).unwrap();
            for pair in comps.windows(2) {
                let lo = codim_bundle_generic(&pair[0]);
                let hi = codim_bundle_generic(&pair[1]);
                if r < n - 1 {
                    assert!(hi < lo, "({n},{r}): a={} -> {lo}, a={} -> {hi}", pair[0].a, pair[1].a);
                } else {
                    assert_eq!(hi, lo, "({n},{r}) with r = n-1");
                }
                checked += 1;
            }
        }
    }
    println!("ACCEPTANCE 4 (bundle monotonicity): PASS — {checked} adjacent pairs");
}

/// Criterion 5: for all (n, r, a) with n <= 5, 100 seeded trials each,
/// the extracted structure of P·K_a·Pᵀ matches the bundle in >= 99% of
/// trials, and every mismatch is an indeterminate-rank error.
#[test]
fn criterion_5_genericity_monte_carlo() {
    let start = Instant::now();
    let sampler = SeededSampler::new(0xacce_0005, 100.0);
    let mut configs = 0;
    for n in 2..=5usize {
        for r in 1..=(n - 1) {
            for a in 0..=(r / 2) {
                let comp = GenericComponent::new(n, r, a).unwrap();
                let report = genericity_trial(&comp, &sampler, 100).unwrap();
                assert!(
                    report.successes >= 99,
                    "({n},{r},{a}): only {}/100 trials matched: {:?}",
                    report.successes,
                    report.failures
                );
                for failure in &report.failures {
                    assert!(
                        failure.diagnosis.contains("indeterminate rank"),
                        "({n},{r},{a}): failure is not an indeterminate-rank error: {}",
                        failure.diagnosis
                    );
                }
                configs += 1;
            }
        }
    }
    println!(
        "ACCEPTANCE 5 (genericity Monte Carlo): PASS — {configs} configurations x 100 trials \
         in {:.1} s",
        start.elapsed().as_secs_f64()
    );
}

fn random_structured_descriptor(n: usize, rng: &mut ChaCha8Rng) -> StructureDescriptor {
    let eig_pool = sympencil::canonical::sample_distinct_unit_disc(3, 5e-2, rng);
    let mut blocks = Vec::new();
    let mut remaining = n;
    while remaining > 0 {
        let choice = rng.random_range(0..6u8);
        match choice {
            0..=1 => {
                let dmax = (remaining.saturating_sub(1)) / 2;
                let d = rng.random_range(0..=dmax.min(2));
                blocks.push(CanonicalBlock::MinimalPair { d });
                remaining -= 2 * d + 1;
            }
            2..=4 => {
                let size = rng.random_range(1..=remaining.min(3));
                let mu = eig_pool[rng.random_range(0..eig_pool.len())];
                blocks.push(CanonicalBlock::JordanFinite { size, mu });
                remaining -= size;
            }
            _ => {
                let size = rng.random_range(1..=remaining.min(3));
                blocks.push(CanonicalBlock::JordanInfinite { size });
                remaining -= size;
            }
        }
    }
    StructureDescriptor::orbit(blocks).unwrap()
}

/// Criterion 6: staircase extraction and block-Toeplitz rank counts agree on
/// ε and every δ^μ for 200 seeded random structured pencils (n <= 8) in at
/// least 99% of cases; the rest must fail loudly, never disagree silently.
#[test]
fn criterion_6_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0006);
    let sampler = SeededSampler::new(0xacce_0066, 100.0);
    let mut agreements = 0;
    let mut failures = 0;
    for sample in 0..200 {
        let n = rng.random_range(2..=8usize);
        let planted = random_structured_descriptor(n, &mut rng);
        let canonical = descriptor_to_pencil(&planted).unwrap();
        let mut trial_rng = sampler.rng_for_trial(sample);
        let w = sampler.random_invertible(n, &mut trial_rng);
        let s = canonical.congruence(&w).unwrap();

        // every distinct planted eigenvalue, plus infinity when present
        let mut probes: Vec<EvalPoint> =
            planted.eigenvalue_groups().iter().map(|(pt, _)| *pt).collect();
        probes.dedup_by(|a, b| format!("{a}") == format!("{b}"));

        let extracted = match extract_structure(s.pencil(), 1e-8) {
            Ok(d) => d,
            Err(Error::IndeterminateRank { .. }) => {
                failures += 1;
                continue;
            }
            Err(e) => panic!("sample {sample}: unexpected error {e}"),
        };
        let eps_oracle = match toeplitz_rank_counts(s.pencil(), None, n) {
            Ok(p) => p,
            Err(Error::IndeterminateRank { .. }) => {
                failures += 1;
                continue;
            }
            Err(e) => panic!("sample {sample}: unexpected oracle error {e}"),
        };
        assert_eq!(
            weyr_minimal(&extracted),
            eps_oracle,
            "sample {sample}: ε disagrees silently (planted {planted:?})"
        );
        let mut all_match = true;
        for pt in &probes {
            let delta_oracle = match toeplitz_rank_counts(s.pencil(), Some(*pt), n) {
                Ok(p) => p,
                Err(Error::IndeterminateRank { .. }) => {
                    all_match = false;
                    break;
                }
                Err(e) => panic!("sample {sample}: unexpected oracle error {e}"),
            };
            assert_eq!(
                weyr_eigenvalue(&extracted, pt),
                delta_oracle,
                "sample {sample}: δ^μ at {pt} disagrees silently (planted {planted:?})"
            );
        }
        if all_match {
            agreements += 1;
        } else {
            failures += 1;
        }
    }
    assert!(
        agreements >= 198,
        "only {agreements}/200 samples agreed ({failures} failures)"
    );
    println!(
        "ACCEPTANCE 6 (oracle equivalence): PASS — {agreements}/200 agreements, {failures} \
         indeterminate, in {:.1} s",
        start.elapsed().as_secs_f64()
    );
}

/// Criterion 7: a non-none obstruction for every ordered pair a != a' over
/// all n <= 8, 1 <= r <= n-1, reproducing the introductory 3x3 asymmetry.
#[test]
fn criterion_7_obstruction_completeness() {
    use sympencil::order::{closure_obstruction, Obstruction};
    let mut pairs = 0;
    for n in 2..=8usize {
        for r in 1..=(n - 1) {
            let comps = GenericComponent::all(n, r).unwrap();
            for family in &comps {
                for limit in &comps {
                    if family.a == limit.a {
                        continue;
                    }
                    let obs = closure_obstruction(family, limit).unwrap();
                    assert!(!obs.is_none(), "({n},{r}): a={} a'={}", family.a, limit.a);
                    match obs {
                        Obstruction::MinimalIndexMajorization { limit: lp, family: fp } => {
                            assert!(limit.a > family.a);
                            assert!(!lp.dominated_by(&fp));
                        }
                        Obstruction::SimpleEigenvalueMultiplicity { required, available } => {
                            assert!(limit.a < family.a);
                            assert!(required > available);
                        }
                        Obstruction::None => unreachable!(),
                    }
                    pairs += 1;
                }
            }
        }
    }

    // the 3x3 asymmetry: Q = K_1 escapes bun(K_0) by majorization,
    // P = K_0 escapes bun(K_1) by the simple-eigenvalue count (2 vs 0)
    let k0 = GenericComponent::new(3, 2, 0).unwrap();
    let k1 = GenericComponent::new(3, 2, 1).unwrap();
    match closure_obstruction(&k0, &k1).unwrap() {
        Obstruction::MinimalIndexMajorization { limit, family } => {
            assert_eq!(limit.parts(), &[1, 1]);
            assert_eq!(family.parts(), &[1]);
        }
        other => panic!("expected majorization, got {other:?}"),
    }
    match closure_obstruction(&k1, &k0).unwrap() {
        Obstruction::SimpleEigenvalueMultiplicity { required, available } => {
            assert_eq!((required, available), (2, 0));
        }
        other => panic!("expected eigenvalue count, got {other:?}"),
    }
    println!("ACCEPTANCE 7 (obstruction completeness): PASS — {pairs} ordered pairs");
}

/// Criterion 8: perturbed Jordan blocks (sizes <= 4, t in {1e-1, 1e-2, 1e-4})
/// split into pairwise-distinct simple eigenvalues and sit at distance
/// exactly t from the unperturbed block.
#[test]
fn criterion_8_degeneration_limits() {
    let ts = [1e-1, 1e-2, 1e-4];
    let mut cases = 0;
    for size in 1..=4usize {
        for &t in &ts {
            // finite eigenvalue block
            let mu = c64(0.7, -0.2);
            let pert = degenerate_jordan_finite(size, mu, t);
            let base = degenerate_jordan_finite(size, mu, 0.0);
            let diff = pert.pencil().sub(base.pencil()).unwrap();
            // single-entry perturbation of exactly t; subtracting the base
            // entry back out reintroduces at most an ulp of its magnitude
            let ulp = 2.0 * f64::EPSILON * (1.0 + mu.norm());
            assert!((diff.b()[(size - 1, size - 1)] - c64(t, 0.0)).norm() <= ulp);
            assert_eq!(diff.a().frobenius_norm(), 0.0);
            assert!((diff.norm() - t).abs() <= ulp);
            let d = extract_structure(pert.pencil(), 1e-8)
                .unwrap_or_else(|e| panic!("finite size {size}, t {t:e}: {e}"));
            assert_eq!(
                d.simple_eigenvalue_count(),
                size,
                "finite size {size}, t {t:e}: {d:?}"
            );
            let eigs: Vec<Complex64> = d
                .eigenvalue_groups()
                .iter()
                .filter_map(|(pt, _)| match pt {
                    EvalPoint::Finite(z) => Some(*z),
                    EvalPoint::Infinity => None,
                })
                .collect();
            for i in 0..eigs.len() {
                for j in (i + 1)..eigs.len() {
                    assert!((eigs[i] - eigs[j]).norm() > 1e-10);
                }
            }

            // infinite eigenvalue block
            let pert_inf = degenerate_jordan_infinite(size, t);
            let base_inf = degenerate_jordan_infinite(size, 0.0);
            let diff_inf = pert_inf.pencil().sub(base_inf.pencil()).unwrap();
            assert!((diff_inf.a()[(size - 1, size - 1)] - c64(t, 0.0)).norm() <= ulp);
            assert!((diff_inf.norm() - t).abs() <= ulp);
            let d_inf = extract_structure(pert_inf.pencil(), 1e-8)
                .unwrap_or_else(|e| panic!("infinite size {size}, t {t:e}: {e}"));
            assert_eq!(
                d_inf.simple_eigenvalue_count(),
                size,
                "infinite size {size}, t {t:e}: {d_inf:?}"
            );
            cases += 2;
        }
    }
    println!("ACCEPTANCE 8 (degeneration limits): PASS — {cases} perturbed blocks");
}

fn random_partition(rng: &mut ChaCha8Rng, max_total: usize) -> IntegerPartition {
    let total = rng.random_range(0..=max_total);
    let mut parts = Vec::new();
    let mut left = total;
    while left > 0 {
        let p = rng.random_range(1..=left);
        parts.push(p);
        left -= p;
    }
    IntegerPartition::from_unsorted(parts)
}

/// Criterion 9: 10,000 random partition triples of total <= 20 satisfy
/// reflexivity, antisymmetry, and transitivity of the dominance order,
/// within 10 seconds.
#[test]
fn criterion_9_partition_order_properties() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0009);
    for _ in 0..10_000 {
        let a = random_partition(&mut rng, 20);
        let b = random_partition(&mut rng, 20);
        let c = random_partition(&mut rng, 20);
        assert!(a.dominated_by(&a), "reflexivity at {a}");
        if a.dominated_by(&b) && b.dominated_by(&a) {
            assert_eq!(a, b, "antisymmetry at {a}, {b}");
        }
        if a.dominated_by(&b) && b.dominated_by(&c) {
            assert!(a.dominated_by(&c), "transitivity at {a}, {b}, {c}");
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "criterion 9 took {elapsed:?}, budget is 10 s"
    );
    println!(
        "ACCEPTANCE 9 (partition order): PASS — 10000 triples in {:.2} s",
        elapsed.as_secs_f64()
    );
}
