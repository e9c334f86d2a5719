//! Command-line front end. Every subcommand prints a JSON report on stdout
//! and exits 0 exactly when all of its assertions pass.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use sympencil::canonical::{generic_bundle, GenericComponent};
use sympencil::error::{Error, Result};
use sympencil::experiments::{
    degenerate_jordan_finite, degenerate_jordan_infinite, genericity_trial, verify_example_1_1,
    SeededSampler,
};
use sympencil::extract::{extract_structure_with, normal_rank_with, ExtractOptions};
use sympencil::geometry::{
    codim_bundle_generic, codim_bundle_numeric_with, codim_orbit_generic, codim_orbit_numeric_with,
};
use sympencil::order::closure_obstruction;
use sympencil::pencil::{Pencil, SymmetricPencil};

#[derive(Parser)]
#[command(
    name = "sympencil",
    version,
    about = "Canonical structure of complex symmetric matrix pencils of bounded rank"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DegenerateKind {
    Jordan,
    JordanInf,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the complete eigenstructure of a pencil stored as JSON
    Kcf {
        pencil: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Closed-form codimension table for (n, r), with optional numeric check
    Codim {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        a: Option<usize>,
        /// Pencil JSON whose numeric codimensions are cross-checked
        #[arg(long)]
        numeric: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Pairwise closure-obstruction table for the generic bundles of (n, r)
    ClosureCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
    },
    /// Seeded Monte Carlo genericity trials for one component
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        a: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100.0)]
        cap: f64,
    },
    /// Perturbed Jordan blocks from the explicit degeneration sequences
    Degenerate {
        #[arg(long, value_enum)]
        kind: DegenerateKind,
        #[arg(long)]
        size: usize,
        /// Eigenvalue as RE or RE,IM (finite kind only)
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        mu: String,
        #[arg(long)]
        t: f64,
    },
    /// Verify the explicit 3x3 strict equivalence identity
    VerifyExample {
        #[arg(long, allow_hyphen_values = true)]
        l1: String,
        #[arg(long, allow_hyphen_values = true)]
        l2: String,
        #[arg(long, allow_hyphen_values = true)]
        e1: String,
        #[arg(long, allow_hyphen_values = true)]
        e2: String,
    },
    /// List all generic bundles of (n, r) with their codimensions
    Generic {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
    },
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = |_| Error::Precondition(format!("cannot parse complex number from {s:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(re.trim().parse().map_err(bad)?, 0.0)),
        [re, im] => Ok(Complex64::new(
            re.trim().parse().map_err(bad)?,
            im.trim().parse().map_err(bad)?,
        )),
        _ => Err(Error::Precondition(format!(
            "cannot parse complex number from {s:?}"
        ))),
    }
}

fn load_pencil(path: &PathBuf) -> Result<Pencil> {
    let text = std::fs::read_to_string(path)?;
    Pencil::from_json(&text)
}

fn descriptor_value(d: &sympencil::canonical::StructureDescriptor) -> Value {
    serde_json::from_str(&d.to_json()).expect("descriptor JSON is valid")
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Kcf { pencil, tol } => {
            let p = load_pencil(&pencil)?;
            let opts = ExtractOptions::with_tol(tol);
            let desc = extract_structure_with(&p, &opts)?;
            let rank = normal_rank_with(&p, &opts)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "descriptor": descriptor_value(&desc),
                    "normal_rank": rank,
                    "size": [p.rows(), p.cols()],
                    "tol": tol,
                }))?
            );
            for line in desc.block_summary() {
                println!("  {line}");
            }
            Ok(true)
        }

        Command::Codim { n, r, a, numeric, tol } => {
            let components = match a {
                Some(a) => vec![GenericComponent::new(n, r, a)?],
                None => GenericComponent::all(n, r)?,
            };
            let table: Vec<Value> = components
                .iter()
                .map(|c| {
                    json!({
                        "a": c.a,
                        "alpha": c.alpha,
                        "s": c.s,
                        "codim_orbit": codim_orbit_generic(c),
                        "codim_bundle": codim_bundle_generic(c),
                    })
                })
                .collect();
            let mut pass = true;
            let numeric_report = match numeric {
                Some(path) => {
                    let p = load_pencil(&path)?;
                    let s = SymmetricPencil::new_symmetrized(p, 1e-12)?;
                    let opts = ExtractOptions::with_tol(tol);
                    let orbit = codim_orbit_numeric_with(&s, &opts)?;
                    let bundle = codim_bundle_numeric_with(&s, &opts)?;
                    let matched: Vec<usize> = components
                        .iter()
                        .filter(|c| codim_orbit_generic(c) == orbit)
                        .map(|c| c.a)
                        .collect();
                    pass = !matched.is_empty();
                    json!({
                        "codim_orbit_numeric": orbit,
                        "codim_bundle_numeric": bundle,
                        "matching_components": matched,
                    })
                }
                None => Value::Null,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "n": n,
                    "r": r,
                    "ambient_dimension": n * (n + 1),
                    "components": table,
                    "numeric": numeric_report,
                }))?
            );
            Ok(pass)
        }

        Command::ClosureCheck { n, r } => {
            let components = GenericComponent::all(n, r)?;
            let mut rows = Vec::new();
            let mut all_obstructed = true;
            for family in &components {
                for limit in &components {
                    if family.a == limit.a {
                        continue;
                    }
                    let obs = closure_obstruction(family, limit)?;
                    all_obstructed &= !obs.is_none();
                    rows.push(json!({
                        "family_a": family.a,
                        "limit_a": limit.a,
                        "obstruction": serde_json::to_value(&obs)?,
                    }));
                }
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "n": n,
                    "r": r,
                    "component_count": components.len(),
                    "table": rows,
                    "all_pairs_obstructed": all_obstructed,
                }))?
            );
            // text matrix: rows = family a, cols = limit a'
            println!("family \\ limit");
            print!("      ");
            for limit in &components {
                print!(" a'={:<3}", limit.a);
            }
            println!();
            for family in &components {
                print!("a={:<4}", family.a);
                for limit in &components {
                    let cell = if family.a == limit.a {
                        "."
                    } else if limit.a > family.a {
                        "M" // minimal-index majorization
                    } else {
                        "E" // simple-eigenvalue multiplicity
                    };
                    print!("   {cell}  ");
                }
                println!();
            }
            Ok(all_obstructed)
        }

        Command::Sample { n, r, a, trials, seed, cap } => {
            let comp = GenericComponent::new(n, r, a)?;
            let sampler = SeededSampler::new(seed, cap);
            let report = genericity_trial(&comp, &sampler, trials)?;
            println!("{}", report.to_json());
            let silent_wrong = report
                .failures
                .iter()
                .any(|f| f.diagnosis.starts_with("wrong structure"));
            Ok(!silent_wrong && report.success_rate() >= 0.99)
        }

        Command::Degenerate { kind, size, mu, t } => {
            let (pencil, label) = match kind {
                DegenerateKind::Jordan => {
                    let mu = parse_complex(&mu)?;
                    (degenerate_jordan_finite(size, mu, t), format!("J_{size}({mu})"))
                }
                DegenerateKind::JordanInf => {
                    (degenerate_jordan_infinite(size, t), format!("J_{size}(inf)"))
                }
            };
            let extracted = extract_structure_with(pencil.pencil(), &ExtractOptions::default())?;
            let simple = extracted.simple_eigenvalue_count();
            // t = 0 must recover the block itself; t > 0 splits it into
            // `size` simple eigenvalues.
            let pass = if t == 0.0 {
                extracted.blocks().len() == 1
            } else {
                simple == size
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "kind": label,
                    "t": t,
                    "pencil": serde_json::from_str::<Value>(&pencil.pencil().to_json())?,
                    "extracted": descriptor_value(&extracted),
                    "simple_eigenvalues": simple,
                    "pass": pass,
                }))?
            );
            Ok(pass)
        }

        Command::VerifyExample { l1, l2, e1, e2 } => {
            let report = verify_example_1_1(
                parse_complex(&l1)?,
                parse_complex(&l2)?,
                parse_complex(&e1)?,
                parse_complex(&e2)?,
            )?;
            println!("{}", report.to_json());
            Ok(report.passed())
        }

        Command::Generic { n, r } => {
            let components = GenericComponent::all(n, r)?;
            let bundles: Vec<_> = components.iter().map(generic_bundle).collect();
            let mut pairwise_distinct = true;
            for i in 0..bundles.len() {
                for j in (i + 1)..bundles.len() {
                    pairwise_distinct &= !bundles[i].same_bundle(&bundles[j]);
                }
            }
            let list: Vec<Value> = components
                .iter()
                .zip(&bundles)
                .map(|(c, b)| {
                    json!({
                        "a": c.a,
                        "alpha": c.alpha,
                        "s": c.s,
                        "codim_orbit": codim_orbit_generic(c),
                        "codim_bundle": codim_bundle_generic(c),
                        "descriptor": descriptor_value(b),
                        "blocks": b.block_summary(),
                    })
                })
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "n": n,
                    "r": r,
                    "component_count": components.len(),
                    "pairwise_distinct": pairwise_distinct,
                    "components": list,
                }))?
            );
            Ok(pairwise_distinct)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
