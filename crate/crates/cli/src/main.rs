//! `garside`: computations in the self-distributivity monoid and the positive
//! braid monoid, plus the named verification suites.

use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use garside_core::braid::{self, BraidInstance, Sigma};
use garside_core::garside::{self, GarsideInstance};
use garside_core::mld::{self, LdInstance};
use garside_core::reversing::{self, Budget, ReversingError, Word};
use garside_core::suites::{self, Suite, VerifyOptions};
use garside_core::{Address, Term};

#[derive(Parser, Debug)]
#[command(name = "garside", version, about = "Locally left-Garside computations for M_LD and positive braids")]
struct Cli {
    /// Maximum elementary reversing steps per reversal.
    #[arg(long, global = true, env = "GARSIDE_BUDGET", default_value_t = Budget::DEFAULT_STEPS)]
    budget: u64,

    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply an LD word to a term: `act 'x1*(x2*x3)' 'D:'`.
    Act { term: String, word: String },
    /// Greedy normal form of a word acting on an object.
    Normalize(Operand),
    /// Right-lcm of two words.
    Lcm(Pair),
    /// Left-gcd of two words acting on the same object.
    Gcd(Pair),
    /// The element Δ_t (or δ_t with `--small`) of a term.
    Delta {
        term: String,
        #[arg(long)]
        small: bool,
    },
    /// Braid image π(a) of an LD word acting on a term.
    Project { term: String, word: String },
    /// Run a named verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Instance {
    Ld,
    Braid,
}

/// `<instance> <object> <word>`; the braid object is a strand count.
#[derive(Args, Debug)]
struct Operand {
    #[arg(value_enum)]
    instance: Instance,
    object: String,
    word: String,
}

#[derive(Args, Debug)]
struct Pair {
    #[arg(value_enum)]
    instance: Instance,
    object: String,
    left: String,
    right: String,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// relations-action, cube-ld, cube-braid, lgloc, coherence,
    /// delta-projection, proj-compat, lcm-preservation, phi-injective,
    /// nf-domino, regularity, gcd-preservation, dual or assoc-trivial.
    suite: Suite,
    /// Largest term size (number of operations) enumerated.
    #[arg(long)]
    max_size: Option<usize>,
    /// Largest term size whose simple divisors are enumerated.
    #[arg(long)]
    max_simple_size: Option<usize>,
    /// Longest address in pattern and atom enumerations.
    #[arg(long)]
    max_addr_len: Option<usize>,
    /// Largest braid generator index.
    #[arg(long)]
    max_index: Option<u32>,
    /// Number of random cases in sampled suites.
    #[arg(long)]
    samples: Option<usize>,
    /// Seed for sampled suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run only the case with this key (as printed in reproduction lines).
    #[arg(long)]
    only: Option<String>,
}

/// Exit code 2: the input could not be processed (bad syntax, undefined
/// action, exhausted budget).
struct Invalid(anyhow::Error);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Invalid> {
    let budget = Budget::new(cli.budget)
        .ok_or_else(|| anyhow!("--budget must be positive"))
        .map_err(Invalid)?;
    if let Command::Verify(args) = &cli.command {
        let report = suites::verify(args.suite, &verify_options(args, budget));
        if cli.json {
            emit(&report.to_json());
        } else {
            emit(&report.to_string());
        }
        return Ok(report.exit_code() as u8);
    }
    let (text, json) = compute(&cli.command, budget).map_err(Invalid)?;
    if cli.json {
        emit(&json.to_string());
    } else {
        emit(&text);
    }
    Ok(0)
}

/// Prints one block to stdout; a closed pipe (`garside … | head`) is not an
/// error.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = writeln!(out, "{text}") {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
        }
    }
}

fn verify_options(args: &VerifyArgs, budget: Budget) -> VerifyOptions {
    VerifyOptions {
        max_size: args.max_size,
        max_simple_size: args.max_simple_size,
        max_addr_len: args.max_addr_len,
        max_index: args.max_index,
        samples: args.samples,
        seed: args.seed,
        budget,
        only: args.only.clone(),
    }
}

fn compute(command: &Command, budget: Budget) -> Result<(String, serde_json::Value)> {
    use serde_json::json;
    match command {
        Command::Act { term, word } => {
            let t = parse_term(term)?;
            let w = parse_ld(word)?;
            let image = t.act_word(w.iter()).map(|s| s.to_string());
            let text = image.clone().unwrap_or_else(|| "undefined".into());
            Ok((text, json!({ "term": t.to_string(), "word": w.to_string(), "result": image })))
        }
        Command::Normalize(op) => {
            let rendered = match op.instance {
                Instance::Ld => {
                    let inst = LdInstance { budget };
                    let t = parse_term(&op.object)?;
                    let w = parse_ld(&op.word)?;
                    normalize(&inst, &t, &w)?
                }
                Instance::Braid => {
                    let inst = BraidInstance { budget };
                    let n = parse_strands(&op.object)?;
                    let w = parse_braid(&op.word, n)?;
                    normalize(&inst, &n, &w)?
                }
            };
            let json = json!({ "factors": rendered.1 });
            Ok((rendered.0, json))
        }
        Command::Lcm(pair) | Command::Gcd(pair) => {
            let is_lcm = matches!(command, Command::Lcm(_));
            let result = match pair.instance {
                Instance::Ld => {
                    let inst = LdInstance { budget };
                    let t = parse_term(&pair.object)?;
                    let (u, v) = (parse_ld(&pair.left)?, parse_ld(&pair.right)?);
                    lcm_or_gcd(&inst, &t, &u, &v, is_lcm)?
                }
                Instance::Braid => {
                    let inst = BraidInstance { budget };
                    let n = parse_strands(&pair.object)?;
                    let (u, v) = (parse_braid(&pair.left, n)?, parse_braid(&pair.right, n)?);
                    lcm_or_gcd(&inst, &n, &u, &v, is_lcm)?
                }
            };
            let key = if is_lcm { "lcm" } else { "gcd" };
            Ok((result.clone(), json!({ key: result })))
        }
        Command::Delta { term, small } => {
            let t = parse_term(term)?;
            let w = if *small { mld::delta_small(&t) } else { mld::delta_big(&t) };
            Ok((show(&w), json!({ "term": t.to_string(), "small": small, "delta": w.to_string() })))
        }
        Command::Project { term, word } => {
            let t = parse_term(term)?;
            let w = parse_ld(word)?;
            let (n, image, _) = braid::project_term_morphism(&t, &w)?;
            Ok((
                format!("{} (on {n} strands)", show(&image)),
                json!({ "strands": n, "braid": image.to_string() }),
            ))
        }
        Command::Verify(_) => unreachable!("handled by run"),
    }
}

fn normalize<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    w: &[I::Atom],
) -> Result<(String, Vec<String>)>
where
    I::Object: std::fmt::Display,
{
    let nf = garside::normal_form(inst, x, w)?;
    let factors = nf.factors.iter().map(|f| f.to_string()).collect();
    Ok((nf.to_string(), factors))
}

fn lcm_or_gcd<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    u: &[I::Atom],
    v: &[I::Atom],
    is_lcm: bool,
) -> Result<String>
where
    I::Object: std::fmt::Display,
{
    for w in [u, v] {
        if inst.act(x, w).is_none() {
            bail!("word {} does not act on {x}", Word(w.to_vec()));
        }
    }
    let result = if is_lcm {
        reversing::lcm(inst.complement(), u, v, inst.budget()).map_err(anyhow::Error::new::<ReversingError>)?
    } else {
        garside::gcd_at(inst, x, u, v)?
    };
    Ok(show(&result))
}

fn show<A: reversing::Atom>(w: &Word<A>) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.to_string()
    }
}

fn parse_term(s: &str) -> Result<Term> {
    s.parse().with_context(|| format!("invalid term {s:?}"))
}

fn parse_ld(s: &str) -> Result<Word<Address>> {
    s.parse().with_context(|| format!("invalid LD word {s:?} (expected atoms like `D: D:1 D:01`)"))
}

fn parse_strands(s: &str) -> Result<usize> {
    let n: usize = s.parse().with_context(|| format!("invalid strand count {s:?}"))?;
    if n == 0 {
        bail!("strand count must be positive");
    }
    Ok(n)
}

fn parse_braid(s: &str, n: usize) -> Result<Word<Sigma>> {
    let w: Word<Sigma> = s
        .parse()
        .with_context(|| format!("invalid braid word {s:?} (expected atoms like `s1 s2 s1`)"))?;
    if !braid::in_strands(&w, n) {
        bail!("braid word {w} needs more than {n} strands");
    }
    Ok(w)
}
