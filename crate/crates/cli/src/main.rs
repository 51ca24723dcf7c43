use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hia_core::catalog::{build_catalog, write_catalog, RunConfig};
use hia_core::discriminator::{
    discriminator_from_killer, killer_from_discriminator, killer_failure, synthesize_killer, verify_discriminator,
};
use hia_core::filters::{all_congruences, all_filters, involutive_center, involutive_filters, is_subdirectly_irreducible};
use hia_core::format::{algebra_to_json, load_algebra, parse_candidate, CandidateFile};
use hia_core::power::{
    bounded_injectivity_check, direct_power, boolean_power_finite, Candidate, InjectivityBounds, InjectivityStatus,
    Subalgebra,
};
use hia_core::term::{assignment_count, eval_term, holds_identity, parse_environment, IdentityVerdict};
use hia_core::algebra::check_derived_identities;
use hia_core::{parse_term, Error, HIAlgebra};

const IDENTITY_WARN_THRESHOLD: u128 = 10_000_000;

#[derive(Parser)]
#[command(name = "hia", version, about = "Finite Heyting algebras with involution")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an algebra file and check identities i1 to i9.
    Check { algebra: PathBuf },
    /// Involutive center.
    Center { algebra: PathBuf },
    /// Filters and involutive filters.
    Filters { algebra: PathBuf },
    /// Congruences as block lists.
    Congruences { algebra: PathBuf },
    /// Subdirect irreducibility.
    Si { algebra: PathBuf },
    /// Synthesize and verify the killer term.
    Killer { algebra: PathBuf },
    /// Build the discriminator term from the killer.
    Discriminator {
        algebra: PathBuf,
        /// Also re-derive the killer from the discriminator and check it.
        #[arg(long)]
        verify: bool,
    },
    /// Evaluate a term under an environment such as `x=1,y=2`.
    Eval {
        algebra: PathBuf,
        #[arg(long)]
        term: String,
        #[arg(long, default_value = "")]
        env: String,
    },
    /// Check an identity exhaustively.
    Identity {
        algebra: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
    },
    /// Direct power A^n.
    Power {
        algebra: PathBuf,
        #[arg(short = 'n', long)]
        exponent: usize,
    },
    /// Finite Boolean power C[2^k].
    BooleanPower {
        algebra: PathBuf,
        #[arg(short = 'k', long)]
        atoms: usize,
    },
    /// Bounded search for a counterexample to injectivity.
    Injective {
        #[arg(long)]
        generator: PathBuf,
        /// An algebra file, or `{"power": n, "members": [...]}` naming a
        /// subalgebra of a power of the generator.
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        #[arg(long, default_value_t = 16)]
        m_max: usize,
    },
    /// Enumerate algebras up to isomorphism into a directory.
    Enumerate {
        #[arg(long)]
        max_size: usize,
        #[arg(long)]
        si_only: bool,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
}

/// What a subcommand produced: a JSON document, its text rendering and the
/// exit code.
struct Outcome {
    json: String,
    text: String,
    code: u8,
}

impl Outcome {
    fn new(value: impl Serialize, text: impl Into<String>, ok: bool) -> Result<Self, Error> {
        Ok(Outcome { json: serde_json::to_string_pretty(&value)?, text: text.into(), code: if ok { 0 } else { 1 } })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", out.json.trim_end()),
                Format::Text => println!("{}", out.text.trim_end()),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            ExitCode::from(2)
        }
    }
}

fn list(xs: &[usize]) -> String {
    let parts: Vec<String> = xs.iter().map(usize::to_string).collect();
    format!("{{{}}}", parts.join(", "))
}

fn run(cmd: Command) -> Result<Outcome, Error> {
    match cmd {
        Command::Check { algebra } => {
            let a = load_algebra(&algebra)?;
            let report = check_derived_identities(&a);
            Outcome::new(&report, report.to_string(), report.ok)
        }
        Command::Center { algebra } => {
            let a = load_algebra(&algebra)?;
            let ic = involutive_center(&a);
            let text = format!("involutive center: {}\nboolean: {}", list(&ic.members), ic.boolean);
            Outcome::new(&ic, text, true)
        }
        Command::Filters { algebra } => {
            let a = load_algebra(&algebra)?;
            let filters = all_filters(&a);
            let inv = involutive_filters(&a);
            let mut text = format!("filters ({}):\n", filters.len());
            for f in &filters {
                let mark = if inv.contains(f) { " involutive" } else { "" };
                text.push_str(&format!("  {}{mark}\n", list(f.members())));
            }
            #[derive(Serialize)]
            struct Doc<'a> {
                filters: &'a [hia_core::filters::Filter],
                involutive_filters: &'a [hia_core::filters::Filter],
            }
            Outcome::new(Doc { filters: &filters, involutive_filters: &inv }, text, true)
        }
        Command::Congruences { algebra } => {
            let a = load_algebra(&algebra)?;
            let cons = all_congruences(&a);
            let mut text = format!("congruences ({}):\n", cons.len());
            for c in &cons {
                let blocks: Vec<String> = c.blocks().iter().map(|b| list(b)).collect();
                text.push_str(&format!("  {}\n", blocks.join(" ")));
            }
            Outcome::new(&cons, text, true)
        }
        Command::Si { algebra } => {
            let a = load_algebra(&algebra)?;
            let v = is_subdirectly_irreducible(&a)?;
            let mut text = format!("subdirectly irreducible: {}", v.subdirectly_irreducible);
            if let Some(w) = v.center_witness {
                text.push_str(&format!("\nwitness: {w} (¬{w} = ∼{w})"));
            }
            Outcome::new(&v, text, true)
        }
        Command::Killer { algebra } => {
            let a = load_algebra(&algebra)?;
            let k = synthesize_killer(&a)?;
            let mut text = format!("killer (depth {}): {}\nverified: {}", k.depth, k.term, k.verified);
            if let (Some(w), Some(v)) = (k.witness, k.witness_value) {
                text.push_str(&format!("\nwitness: k({w}) = {v}"));
            }
            let ok = k.verified;
            Outcome::new(&k, text, ok)
        }
        Command::Discriminator { algebra, verify } => {
            let a = load_algebra(&algebra)?;
            let k = synthesize_killer(&a)?;
            let t = discriminator_from_killer(&k.term);
            let d = verify_discriminator(&a, &t);
            let mut text = format!("discriminator: {}\nverified: {}", d.term, d.verified);
            if let Some([x, y, z]) = d.witness {
                text.push_str(&format!("\nwitness: t({x}, {y}, {z})"));
            }
            #[derive(Serialize)]
            struct Doc {
                discriminator: hia_core::discriminator::DiscriminatorSynthesis,
                #[serde(skip_serializing_if = "Option::is_none")]
                recovered_killer: Option<Recovered>,
            }
            #[derive(Serialize)]
            struct Recovered {
                term: String,
                verified: bool,
                witness: Option<usize>,
            }
            let mut ok = d.verified;
            let recovered_killer = verify.then(|| {
                let rk = killer_from_discriminator(&d.term);
                let fail = killer_failure(&a, &rk);
                text.push_str(&format!("\nrecovered killer verified: {}", fail.is_none()));
                ok &= fail.is_none();
                Recovered { term: rk.to_string(), verified: fail.is_none(), witness: fail.map(|f| f.0) }
            });
            Outcome::new(Doc { discriminator: d, recovered_killer }, text, ok)
        }
        Command::Eval { algebra, term, env } => {
            let a = load_algebra(&algebra)?;
            let t = parse_term(&term)?;
            let env = parse_environment(&env)?;
            let v = eval_term(&a, &t, &env)?;
            Outcome::new(serde_json::json!({ "term": t.to_string(), "value": v }), v.to_string(), true)
        }
        Command::Identity { algebra, lhs, rhs } => {
            let a = load_algebra(&algebra)?;
            let (l, r) = (parse_term(&lhs)?, parse_term(&rhs)?);
            let mut vars = l.free_vars();
            vars.extend(r.free_vars());
            let count = assignment_count(hia_core::HiOps::size(&a), vars.len());
            if count > IDENTITY_WARN_THRESHOLD {
                eprintln!("warning: checking {count} assignments");
            }
            match holds_identity(&a, &l, &r) {
                IdentityVerdict::Holds => Outcome::new(serde_json::json!({ "holds": true }), "holds", true),
                IdentityVerdict::Counterexample { env, lhs, rhs } => {
                    let assignment: Vec<String> = env.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    let text = format!("counterexample: {} (lhs = {lhs}, rhs = {rhs})", assignment.join(","));
                    let doc = serde_json::json!({ "holds": false, "env": env, "lhs": lhs, "rhs": rhs });
                    Outcome::new(doc, text, false)
                }
            }
        }
        Command::Power { algebra, exponent } => {
            let a = load_algebra(&algebra)?;
            let p = direct_power(&a, exponent)?;
            let m = p.to_algebra()?.with_name(format!("{}^{exponent}", a.name().unwrap_or("A")));
            algebra_outcome(&m)
        }
        Command::BooleanPower { algebra, atoms } => {
            let a = load_algebra(&algebra)?;
            let bp = boolean_power_finite(&a, atoms)?;
            eprintln!("note: {}", bp.note);
            let m = bp.power.to_algebra()?.with_name(format!("{}[2^{atoms}]", a.name().unwrap_or("C")));
            algebra_outcome(&m)
        }
        Command::Injective { generator, candidate, n_max, m_max } => {
            let a = load_algebra(&generator)?;
            let c = load_candidate(&a, &candidate)?;
            let v = bounded_injectivity_check(&a, &c, InjectivityBounds { n_max, m_max })?;
            let mut text = match v.status {
                InjectivityStatus::Counterexample => "counterexample found".to_string(),
                InjectivityStatus::NoCounterexampleWithinBounds => "no counterexample within bounds".to_string(),
            };
            if let Some(w) = &v.witness {
                text.push_str(&format!(
                    "\nD ≤ A^{}: {}\nB: {}\nh: {:?}",
                    w.exponent,
                    list(&w.d_members),
                    list(&w.b_members),
                    w.h
                ));
            }
            text.push_str(&format!(
                "\ncandidate diagonal: {}\ncandidate complete: {}\n{}",
                v.candidate_diagonal, v.candidate_complete, v.note
            ));
            let ok = v.status == InjectivityStatus::NoCounterexampleWithinBounds;
            Outcome::new(&v, text, ok)
        }
        Command::Enumerate { max_size, si_only, output } => {
            let cfg = RunConfig { si_only, output: Some(output.clone()), ..RunConfig::new(max_size) };
            let entries = build_catalog(&cfg)?;
            write_catalog(&entries, &output)?;
            let text = format!("{} algebras written to {}", entries.len(), output.display());
            Outcome::new(&entries, text, true)
        }
    }
}

fn algebra_outcome(a: &HIAlgebra) -> Result<Outcome, Error> {
    let text = algebra_to_json(a);
    Ok(Outcome { json: text.clone(), text, code: 0 })
}

fn load_candidate(generator: &HIAlgebra, path: &Path) -> Result<Candidate, Error> {
    match parse_candidate(&fs::read_to_string(path)?)? {
        CandidateFile::Algebra(f) => Ok(Candidate::Algebra(f.into_algebra()?)),
        CandidateFile::Subalgebra(s) => {
            let p = direct_power(generator, s.power)?;
            Ok(Candidate::Subalgebra(Subalgebra::new(&p, s.members)?))
        }
    }
}
