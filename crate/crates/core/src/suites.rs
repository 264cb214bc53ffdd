//! Named verification suites and their machine-readable reports.
//!
//! Every suite enumerates (or samples, with a fixed seed) a list of cases,
//! checks them in parallel and assembles a deterministic [`Report`]. Each
//! case has a textual key; `--only <key>` replays exactly that case.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::braid::{self, BraidComplement, BraidInstance, Permutation, RightProjection, Sigma};
use crate::garside::{self, GarsideError, GarsideInstance, RightProduct};
use crate::mld::{self, LdComplement, LdError, LdInstance, SimpleDivisor};
use crate::reversing::{self, Budget, ReversingError, Word};
use crate::term::{distinct_labelling, shapes, shapes_up_to, Address, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    RelationsAction,
    CubeLd,
    CubeBraid,
    Lgloc,
    Coherence,
    DeltaProjection,
    ProjCompat,
    LcmPreservation,
    PhiInjective,
    NfDomino,
    Regularity,
    GcdPreservation,
    Dual,
    AssocTrivial,
}

impl Suite {
    pub const ALL: [Suite; 14] = [
        Suite::RelationsAction,
        Suite::CubeLd,
        Suite::CubeBraid,
        Suite::Lgloc,
        Suite::Coherence,
        Suite::DeltaProjection,
        Suite::ProjCompat,
        Suite::LcmPreservation,
        Suite::PhiInjective,
        Suite::NfDomino,
        Suite::Regularity,
        Suite::GcdPreservation,
        Suite::Dual,
        Suite::AssocTrivial,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::RelationsAction => "relations-action",
            Suite::CubeLd => "cube-ld",
            Suite::CubeBraid => "cube-braid",
            Suite::Lgloc => "lgloc",
            Suite::Coherence => "coherence",
            Suite::DeltaProjection => "delta-projection",
            Suite::ProjCompat => "proj-compat",
            Suite::LcmPreservation => "lcm-preservation",
            Suite::PhiInjective => "phi-injective",
            Suite::NfDomino => "nf-domino",
            Suite::Regularity => "regularity",
            Suite::GcdPreservation => "gcd-preservation",
            Suite::Dual => "dual",
            Suite::AssocTrivial => "assoc-trivial",
        }
    }

    /// Suites whose statements are open conjectures: a failure is a
    /// candidate counterexample, not a bug report.
    pub fn is_conjecture(&self) -> bool {
        matches!(self, Suite::Regularity | Suite::GcdPreservation)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(Suite::name).collect();
                format!("unknown suite {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// Bounds and knobs; `None` means the suite default.
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub max_size: Option<usize>,
    pub max_simple_size: Option<usize>,
    pub max_addr_len: Option<usize>,
    pub max_index: Option<u32>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub budget: Budget,
    pub only: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Exhausted,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Exhausted => "exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Failure {
    pub inputs: String,
    pub expected: String,
    pub actual: String,
    pub reproduce: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub params: BTreeMap<String, Value>,
    pub cases_checked: u64,
    pub failures: Vec<Failure>,
    pub status: Status,
    pub conjecture: bool,
    pub reproduce: String,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Exhausted => 2,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} ({} cases checked)",
            self.suite, self.status, self.cases_checked
        )?;
        for (k, v) in &self.params {
            writeln!(f, "  {k} = {v}")?;
        }
        for failure in &self.failures {
            if self.conjecture && self.status == Status::Fail {
                writeln!(f, "CANDIDATE COUNTEREXAMPLE ({}):", self.suite)?;
            } else {
                writeln!(f, "FAILURE:")?;
            }
            writeln!(f, "  inputs:    {}", failure.inputs)?;
            writeln!(f, "  expected:  {}", failure.expected)?;
            writeln!(f, "  actual:    {}", failure.actual)?;
            writeln!(f, "  reproduce: {}", failure.reproduce)?;
        }
        write!(f, "reproduce suite: {}", self.reproduce)
    }
}

/// Result of checking one case.
enum Verdict {
    Pass,
    Fail { expected: String, actual: String },
}

impl Verdict {
    fn check(ok: bool, expected: impl Into<String>, actual: impl FnOnce() -> String) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail {
                expected: expected.into(),
                actual: actual(),
            }
        }
    }
}

/// An error raised while checking a case.
#[derive(Clone)]
struct CaseError {
    exhausted: bool,
    message: String,
}

impl From<ReversingError> for CaseError {
    fn from(e: ReversingError) -> Self {
        CaseError {
            exhausted: matches!(e, ReversingError::Exhausted(_)),
            message: e.to_string(),
        }
    }
}

impl From<LdError> for CaseError {
    fn from(e: LdError) -> Self {
        match e {
            LdError::Reversing(r) => r.into(),
            other => CaseError {
                exhausted: false,
                message: other.to_string(),
            },
        }
    }
}

impl From<GarsideError> for CaseError {
    fn from(e: GarsideError) -> Self {
        match e {
            GarsideError::Reversing(r) => r.into(),
            other => CaseError {
                exhausted: false,
                message: other.to_string(),
            },
        }
    }
}

type CaseResult = Result<Verdict, CaseError>;

/// One enumerated case: a replay key and the work to do.
struct Case<'a> {
    key: String,
    run: Box<dyn Fn() -> CaseResult + Send + Sync + 'a>,
}

impl<'a> Case<'a> {
    fn new(key: impl Into<String>, run: impl Fn() -> CaseResult + Send + Sync + 'a) -> Case<'a> {
        Case {
            key: key.into(),
            run: Box::new(run),
        }
    }
}

struct Params {
    suite: Suite,
    entries: BTreeMap<String, Value>,
    flags: Vec<(String, String)>,
    seed: u64,
    budget: Budget,
}

impl Params {
    fn new(suite: Suite, opts: &VerifyOptions) -> Params {
        let mut p = Params {
            suite,
            entries: BTreeMap::new(),
            flags: Vec::new(),
            seed: opts.seed,
            budget: opts.budget,
        };
        p.entries.insert("budget".into(), json!(opts.budget.max_steps()));
        p
    }

    fn size(&mut self, flag: &str, value: Option<usize>, default: usize) -> usize {
        let v = value.unwrap_or(default);
        self.entries.insert(flag.replace('-', "_"), json!(v));
        self.flags.push((format!("--{flag}"), v.to_string()));
        v
    }

    fn seeded(&mut self) -> u64 {
        self.entries.insert("seed".into(), json!(self.seed));
        self.flags.push(("--seed".into(), self.seed.to_string()));
        self.seed
    }

    fn command(&self) -> String {
        let mut cmd = format!("garside verify {}", self.suite);
        for (flag, value) in &self.flags {
            cmd.push_str(&format!(" {flag} {value}"));
        }
        cmd.push_str(&format!(" --budget {}", self.budget.max_steps()));
        cmd
    }
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

fn run(params: Params, cases: Vec<Case<'_>>, only: Option<&str>) -> Report {
    let base = params.command();
    let selected: Vec<&Case> = cases
        .iter()
        .filter(|c| only.is_none_or(|k| c.key == k))
        .collect();
    let outcomes: Vec<(Option<Failure>, bool)> = selected
        .par_iter()
        .map(|case| {
            let reproduce = format!("{base} --only {}", quote(&case.key));
            match (case.run)() {
                Ok(Verdict::Pass) => (None, false),
                Ok(Verdict::Fail { expected, actual }) => (
                    Some(Failure {
                        inputs: case.key.clone(),
                        expected,
                        actual,
                        reproduce,
                    }),
                    false,
                ),
                Err(e) => (
                    Some(Failure {
                        inputs: case.key.clone(),
                        expected: "computation completes".into(),
                        actual: e.message,
                        reproduce,
                    }),
                    e.exhausted,
                ),
            }
        })
        .collect();
    let exhausted = outcomes.iter().any(|(f, e)| f.is_some() && *e);
    let failed = outcomes.iter().any(|(f, e)| f.is_some() && !*e);
    let mut failures: Vec<Failure> = outcomes.into_iter().filter_map(|(f, _)| f).collect();
    failures.sort();
    // A key selecting nothing is invalid input, not a vacuous pass.
    let unmatched = only.is_some() && selected.is_empty();
    if let (true, Some(k)) = (unmatched, only) {
        failures.push(Failure {
            inputs: k.to_string(),
            expected: "a case with this key under the given bounds".into(),
            actual: "no such case".into(),
            reproduce: base.clone(),
        });
    }
    let status = if failed {
        Status::Fail
    } else if exhausted || unmatched {
        Status::Exhausted
    } else {
        Status::Pass
    };
    let mut entries = params.entries;
    if let Some(k) = only {
        entries.insert("only".into(), json!(k));
    }
    Report {
        suite: params.suite.name().to_string(),
        params: entries,
        cases_checked: selected.len() as u64,
        failures,
        status,
        conjecture: params.suite.is_conjecture(),
        reproduce: base,
    }
}

/// Runs one suite.
pub fn verify(suite: Suite, opts: &VerifyOptions) -> Report {
    let mut p = Params::new(suite, opts);
    let only = opts.only.as_deref();
    let budget = opts.budget;
    match suite {
        Suite::RelationsAction => {
            let len = p.size("max-addr-len", opts.max_addr_len, 2);
            let size = p.size("max-size", opts.max_size, 7);
            run(p, relations_action(len, size), only)
        }
        Suite::CubeLd => {
            let len = p.size("max-addr-len", opts.max_addr_len, 3);
            run(p, cube_ld(len, budget), only)
        }
        Suite::CubeBraid => {
            let n = p.size("max-index", opts.max_index.map(|i| i as usize), 5);
            run(p, cube_braid(n as u32, budget), only)
        }
        Suite::Lgloc => {
            let size = p.size("max-size", opts.max_size, 6);
            run(p, lgloc(size, budget), only)
        }
        Suite::Coherence => {
            let size = p.size("max-size", opts.max_size, 5);
            let samples = p.size("samples", opts.samples, 2000);
            let seed = p.seeded();
            run(p, coherence(size, samples, seed, budget), only)
        }
        Suite::DeltaProjection => {
            let size = p.size("max-size", opts.max_size, 7);
            run(p, delta_projection(size, budget), only)
        }
        Suite::ProjCompat => {
            let len = p.size("max-addr-len", opts.max_addr_len, 3);
            run(p, proj_compat(len, budget), only)
        }
        Suite::LcmPreservation => {
            let len = p.size("max-addr-len", opts.max_addr_len, 3);
            run(p, lcm_preservation(len, budget), only)
        }
        Suite::PhiInjective => {
            let size = p.size("max-size", opts.max_size, 8);
            let simple = p.size("max-simple-size", opts.max_simple_size, 4);
            run(p, phi_injective(size, simple, budget), only)
        }
        Suite::NfDomino => {
            let size = p.size("max-size", opts.max_size, 3);
            let samples = p.size("samples", opts.samples, 1000);
            let seed = p.seeded();
            run(p, nf_domino(size, samples, seed, budget), only)
        }
        Suite::Regularity => {
            let size = p.size("max-size", opts.max_size, 4);
            let samples = p.size("samples", opts.samples, 200);
            let seed = p.seeded();
            run(p, regularity(size, samples, seed, budget), only)
        }
        Suite::GcdPreservation => {
            let size = p.size("max-size", opts.max_size, 4);
            run(p, gcd_preservation(size, budget), only)
        }
        Suite::Dual => {
            let size = p.size("max-size", opts.max_size, 4);
            run(p, dual(size, budget), only)
        }
        Suite::AssocTrivial => {
            let size = p.size("max-size", opts.max_size, 6);
            run(p, assoc_trivial(size), only)
        }
    }
}

/// All addresses of length at most `len`, in enumeration order.
pub fn addresses_up_to(len: usize) -> Vec<Address> {
    let mut out = vec![Address::ROOT];
    let mut level = vec![Address::ROOT];
    for _ in 0..len {
        level = level.iter().flat_map(|a| [a.left(), a.right()]).collect();
        out.extend(&level);
    }
    out.sort();
    out
}

fn show<T: fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "undefined".to_string(), T::to_string)
}

fn relations_action(len: usize, size: usize) -> Vec<Case<'static>> {
    let addrs = addresses_up_to(len);
    let terms: Vec<Term> = shapes_up_to(size).iter().map(distinct_labelling).collect();
    let mut cases = Vec::new();
    for &a in &addrs {
        for &b in &addrs {
            if a >= b {
                continue;
            }
            let lhs = Word::atom(a).concat(&LdComplement::entry(&a, &b));
            let rhs = Word::atom(b).concat(&LdComplement::entry(&b, &a));
            for t in &terms {
                let (Some(l), Some(r)) = (t.act_word(lhs.iter()), t.act_word(rhs.iter())) else {
                    continue;
                };
                let key = format!("{lhs} = {rhs} @ {t}");
                cases.push(Case::new(key, move || {
                    Ok(Verdict::check(l == r, l.to_string(), || r.to_string()))
                }));
            }
        }
    }
    cases
}

fn cube_ld(len: usize, budget: Budget) -> Vec<Case<'static>> {
    let addrs = addresses_up_to(len);
    let mut cases = Vec::new();
    for &a in &addrs {
        for &b in &addrs {
            for &c in &addrs {
                let key = Word(vec![a, b, c]).to_string();
                cases.push(Case::new(key, move || {
                    let ok = reversing::cube_check(&LdComplement, &a, &b, &c, budget)?;
                    Ok(Verdict::check(ok, "empty cube remainder", || "nonempty".into()))
                }));
            }
        }
    }
    cases
}

fn cube_braid(max_index: u32, budget: Budget) -> Vec<Case<'static>> {
    let mut cases = Vec::new();
    for i in 1..=max_index {
        for j in 1..=max_index {
            for k in 1..=max_index {
                let (a, b, c) = (Sigma(i), Sigma(j), Sigma(k));
                let key = Word(vec![a, b, c]).to_string();
                cases.push(Case::new(key, move || {
                    let ok = reversing::cube_check(&BraidComplement, &a, &b, &c, budget)?;
                    Ok(Verdict::check(ok, "empty cube remainder", || "nonempty".into()))
                }));
            }
        }
    }
    cases
}

fn lgloc(size: usize, budget: Budget) -> Vec<Case<'static>> {
    let mut cases = Vec::new();
    for t in shapes_up_to(size) {
        let t0 = t.clone();
        cases.push(Case::new(format!("Δ @ {t}"), move || {
            let reached = t0.act_word(mld::delta_big(&t0).iter());
            let phi = t0.phi();
            Ok(Verdict::check(reached.as_ref() == Some(&phi), phi.to_string(), || show(&reached)))
        }));
        for a in mld::enabled_atoms(&t) {
            let t = t.clone();
            cases.push(Case::new(format!("D:{a} @ {t}"), move || {
                let c = LdComplement;
                let delta = mld::delta_big(&t);
                if !reversing::divides(&c, &[a], &delta, budget)? {
                    return Ok(Verdict::Fail {
                        expected: format!("D:{a} ⪯ Δ_t"),
                        actual: format!("D:{a} does not divide {delta}"),
                    });
                }
                let next = t.apply_ld(&a).expect("enabled atom acts");
                let bound = Word::atom(a).concat(&mld::delta_big(&next));
                let ok = reversing::divides(&c, &delta, &bound, budget)?;
                Ok(Verdict::check(ok, "Δ_t ⪯ D_α·Δ_(t•D_α)", || {
                    format!("{delta} does not divide {bound}")
                }))
            }));
        }
    }
    cases
}

/// Simple divisors of `Δ_t` for every shape up to `size`, computed in
/// parallel.
fn divisor_table(size: usize, budget: Budget) -> Result<Vec<(Term, Vec<SimpleDivisor>)>, LdError> {
    shapes_up_to(size)
        .into_par_iter()
        .map(|t| {
            let d = mld::simple_divisors(&t, budget)?;
            Ok((t, d))
        })
        .collect()
}

fn table_or_error(size: usize, budget: Budget) -> Result<Vec<(Term, Vec<SimpleDivisor>)>, Vec<Case<'static>>> {
    divisor_table(size, budget).map_err(|e| {
        let message = CaseError::from(e);
        vec![Case::new("enumerate simple divisors", move || {
            Err(CaseError {
                exhausted: message.exhausted,
                message: message.message.clone(),
            })
        })]
    })
}

fn coherence(size: usize, samples: usize, seed: u64, budget: Budget) -> Vec<Case<'static>> {
    let table = match table_or_error(size, budget) {
        Ok(t) => t,
        Err(cases) => return cases,
    };
    let terms: Vec<Term> = table.iter().map(|(t, _)| t.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    let mut seen = HashSet::new();
    for _ in 0..samples {
        let (t_prime, divisors) = table.choose(&mut rng).expect("at least one shape");
        let a = divisors.choose(&mut rng).expect("ε always divides").word.clone();
        let acting: Vec<&Term> = terms.iter().filter(|t| t.act_word(a.iter()).is_some()).collect();
        let t = (*acting.choose(&mut rng).expect("t′ itself acts")).clone();
        let key = format!("{t} | {t_prime} | {a}");
        if !seen.insert(key.clone()) {
            continue;
        }
        let t_prime = t_prime.clone();
        cases.push(Case::new(key, move || {
            let ok = mld::coherence_check(&t, &t_prime, &a, budget)?;
            Ok(Verdict::check(ok, "a ⪯ Δ_t", || "a does not divide Δ_t".into()))
        }));
    }
    cases
}

/// One case per term: `π(Δ_t) = Δ_RH(t)`, and `π̂` factors through the
/// right-projection LD-system on the distinct labelling.
fn delta_projection(size: usize, budget: Budget) -> Vec<Case<'static>> {
    let mut cases = Vec::new();
    for t in shapes_up_to(size).into_iter().filter(|t| !t.is_var()) {
        cases.push(Case::new(format!("π(Δ) @ {t}"), move || {
            let n = t.right_height();
            let image = braid::pi(&mld::delta_big(&t));
            let expected = braid::delta_n(n);
            let ok = braid::in_strands(&image, n)
                && reversing::equal(&BraidComplement, &image, &expected, budget)?;
            if !ok {
                return Ok(Verdict::Fail {
                    expected: expected.to_string(),
                    actual: image.to_string(),
                });
            }
            let generic = distinct_labelling(&t);
            let hat = generic.pi_hat();
            let via = braid::project_pi_s(&RightProjection, &|p| p, &generic);
            Ok(Verdict::check(hat == via, format!("π̂ = {hat:?}"), || format!("π_S = {via:?}")))
        }));
    }
    cases
}

fn proj_compat(len: usize, budget: Budget) -> Vec<Case<'static>> {
    let addrs = addresses_up_to(len);
    let mut cases = Vec::new();
    for &a in &addrs {
        for &b in &addrs {
            cases.push(Case::new(format!("D:{a} D:{b}"), move || {
                let ok = braid::check_proj_compat(&a, &b, budget)?;
                Ok(Verdict::check(ok, "π(C(D_α,D_β)) = C̄(π D_α, π D_β)", || {
                    format!("π(C) = {}", braid::pi(&LdComplement::entry(&a, &b)))
                }))
            }));
        }
    }
    cases
}

fn lcm_preservation(len: usize, budget: Budget) -> Vec<Case<'static>> {
    let addrs = addresses_up_to(len);
    let mut cases = Vec::new();
    for &a in &addrs {
        for &b in &addrs {
            cases.push(Case::new(format!("D:{a} D:{b}"), move || {
                let ok = braid::check_lcm_preservation(&a, &b, budget)?;
                Ok(Verdict::check(ok, "π(lcm) = lcm(π, π)", || {
                    let lcm = reversing::lcm(&LdComplement, &[a], &[b], budget)
                        .map(|w| braid::pi(&w).to_string())
                        .unwrap_or_else(|e| e.to_string());
                    format!("π(lcm) = {lcm}")
                }))
            }));
        }
    }
    cases
}

fn phi_injective(size: usize, simple_size: usize, budget: Budget) -> Vec<Case<'static>> {
    let mut cases = Vec::new();
    // Terms: group by φ(t); each shape is one case.
    let all = shapes_up_to(size);
    let mut by_image: HashMap<Term, Vec<Term>> = HashMap::new();
    for t in &all {
        by_image.entry(t.phi()).or_default().push(t.clone());
    }
    for t in all {
        let clash: Vec<String> = by_image[&t.phi()]
            .iter()
            .filter(|u| **u != t)
            .map(Term::to_string)
            .collect();
        cases.push(Case::new(format!("φ @ {t}"), move || {
            Ok(Verdict::check(clash.is_empty(), "no other term with the same φ", || {
                format!("same φ as {}", clash.join(", "))
            }))
        }));
    }
    // Simple elements: one case per shape, all pairs of divisors.
    for t in shapes_up_to(simple_size) {
        cases.push(Case::new(format!("φ_t @ {t}"), move || {
            let divisors = mld::simple_divisors(&t, budget)?;
            let images: Vec<(Term, Word<Address>)> = divisors
                .iter()
                .map(|d| Ok((d.target.clone(), mld::phi_t(&t, &d.word, budget)?)))
                .collect::<Result<_, LdError>>()?;
            // Images with different targets act differently, so only equal
            // targets need comparing.
            for i in 0..images.len() {
                for j in i + 1..images.len() {
                    if images[i].0 == images[j].0
                        && reversing::equal(&LdComplement, &images[i].1, &images[j].1, budget)?
                    {
                        return Ok(Verdict::Fail {
                            expected: "distinct φ_t images".into(),
                            actual: format!(
                                "φ_t({}) = φ_t({}) = {}",
                                divisors[i].word, divisors[j].word, images[i].1
                            ),
                        });
                    }
                }
            }
            Ok(Verdict::Pass)
        }));
    }
    cases
}

/// A random walk of enabled atoms from `t`.
fn random_ld_word(rng: &mut ChaCha8Rng, t: &Term, max_len: usize) -> Word<Address> {
    let len = rng.gen_range(0..=max_len);
    let mut here = t.clone();
    let mut out = Vec::new();
    for _ in 0..len {
        let atoms = mld::enabled_atoms(&here);
        let Some(a) = atoms.choose(rng) else { break };
        here = here.apply_ld(a).expect("enabled");
        out.push(*a);
    }
    Word(out)
}

fn random_braid_word(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Word<Sigma> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| Sigma(rng.gen_range(1..n as u32))).collect()
}

fn random_permutation_braid(rng: &mut ChaCha8Rng, n: usize) -> Word<Sigma> {
    let mut p = Permutation::identity(n);
    p.0.shuffle(rng);
    p.braid()
}

/// Checks shared by LD and braid samples: local/global agreement,
/// idempotence, head-versus-coprime agreement, left domino, and the lcm
/// bound for forms of at most `max_lcm_factors` entries (the LD bound
/// involves `Δ` at `φ^(d-1)(x)`, whose size grows like a tower).
fn check_nf_sample<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    g: &[I::Atom],
    w: &[I::Atom],
    max_lcm_factors: usize,
) -> CaseResult {
    let base = inst.act(x, g).expect("g acts on x");
    let nf = garside::normal_form(inst, &base, w)?;
    if !garside::equal(inst, &nf.product(), w)? {
        return Ok(Verdict::Fail {
            expected: format!("product equal to {}", Word(w.to_vec())),
            actual: nf.to_string(),
        });
    }
    if !garside::local_check(inst, &nf)? {
        return Ok(Verdict::Fail {
            expected: "every adjacent pair normal".into(),
            actual: nf.to_string(),
        });
    }
    let again = garside::normal_form(inst, &base, &nf.product())?;
    if !garside::nf_equal(inst, &nf, &again)? {
        return Ok(Verdict::Fail {
            expected: nf.to_string(),
            actual: format!("renormalized to {again}"),
        });
    }
    // Normality by coprimality agrees with normality by heads, on the
    // normal pairs of the form and on the (g, f_1) pair.
    let mut pairs: Vec<(I::Object, Word<I::Atom>, Word<I::Atom>)> = (1..nf.len())
        .map(|i| (nf.objects[i - 1].clone(), nf.factors[i - 1].clone(), nf.factors[i].clone()))
        .collect();
    if let Some(first) = nf.factors.first() {
        if !g.is_empty() {
            pairs.push((x.clone(), Word(g.to_vec()), first.clone()));
        }
    }
    for (y, f1, f2) in pairs {
        let by_gcd = garside::is_normal_pair(inst, &y, &f1, &f2)?;
        let by_head = garside::is_normal_pair_by_head(inst, &y, &f1, &f2)?;
        if by_gcd != by_head {
            return Ok(Verdict::Fail {
                expected: format!("coprime test = head test for ({f1}, {f2})"),
                actual: format!("coprime {by_gcd}, head {by_head}"),
            });
        }
    }
    let domino = garside::left_multiply_nf(inst, x, g, &nf)?;
    let full = Word(g.to_vec()).concat(&Word(w.to_vec()));
    let scratch = garside::normal_form(inst, x, &full)?;
    if !garside::nf_equal(inst, &domino, &scratch)? {
        return Ok(Verdict::Fail {
            expected: scratch.to_string(),
            actual: format!("left domino gave {domino}"),
        });
    }
    if scratch.len() <= max_lcm_factors && !garside::lcm_bound_check(inst, x, &scratch.factors)? {
        return Ok(Verdict::Fail {
            expected: "product of d simples divides the d-fold Δ product".into(),
            actual: scratch.to_string(),
        });
    }
    Ok(Verdict::Pass)
}

fn nf_domino(size: usize, samples: usize, seed: u64, budget: Budget) -> Vec<Case<'static>> {
    let table = match table_or_error(size, budget) {
        Ok(t) => t,
        Err(cases) => return cases,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    let ld = LdInstance { budget };
    for _ in 0..samples {
        let (x, divisors) = table.choose(&mut rng).expect("shapes");
        let g = divisors.choose(&mut rng).expect("ε").clone();
        let w = random_ld_word(&mut rng, &g.target, 4);
        let x = x.clone();
        let key = format!("ld | {x} | {} | {w}", g.word);
        cases.push(Case::new(key, move || check_nf_sample(&ld, &x, &g.word, &w, 2)));
    }
    let br = BraidInstance { budget };
    for _ in 0..samples {
        let n = rng.gen_range(3..=5usize);
        let g = random_permutation_braid(&mut rng, n);
        let w = random_braid_word(&mut rng, n, 8);
        let h = random_permutation_braid(&mut rng, n);
        let key = format!("braid | {n} | {g} | {w} | {h}");
        cases.push(Case::new(key, move || {
            if let Verdict::Fail { expected, actual } = check_nf_sample(&br, &n, &g, &w, usize::MAX)? {
                return Ok(Verdict::Fail { expected, actual });
            }
            let nf = garside::normal_form(&br, &n, &w)?;
            match garside::right_multiply_nf(&br, &nf, &h)? {
                RightProduct::Normal(_) => Ok(Verdict::Pass),
                RightProduct::Violation { domino, expected } => Ok(Verdict::Fail {
                    expected: expected.to_string(),
                    actual: format!("right domino gave {domino}"),
                }),
            }
        }));
    }
    cases
}

fn regularity(size: usize, samples: usize, seed: u64, budget: Budget) -> Vec<Case<'static>> {
    let table = match table_or_error(size, budget) {
        Ok(t) => t,
        Err(cases) => return cases,
    };
    let inst = LdInstance { budget };
    let mut cases = Vec::new();
    // Normal pairs drawn from Div(Δ_t) × Div(Δ_t): f2 must act on t•f1,
    // which by coherence makes it simple there.
    for (t, divisors) in &table {
        for f1 in divisors.iter().filter(|d| !d.word.is_empty()) {
            for f2 in divisors.iter().filter(|d| !d.word.is_empty()) {
                if f1.target.act_word(f2.word.iter()).is_none() {
                    continue;
                }
                let key = format!("{t} | {} | {}", f1.word, f2.word);
                let (t, f1, f2) = (t.clone(), f1.word.clone(), f2.word.clone());
                cases.push(Case::new(key, move || {
                    if !garside::is_normal_pair(&inst, &t, &f1, &f2)? {
                        return Ok(Verdict::Pass);
                    }
                    let ok = garside::regularity_pair_check(&inst, &t, &f1, &f2)?;
                    Ok(Verdict::check(ok, "(φ(f1), φ(f2)) normal at φ(t)", || {
                        regularity_witness(&inst, &t, &f1, &f2)
                            .unwrap_or_else(|e| format!("φ images not computable: {e}"))
                    }))
                }));
            }
        }
    }
    // Right domino consistency on sampled LD normal forms.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let (x, _) = table.choose(&mut rng).expect("shapes");
        let w = random_ld_word(&mut rng, x, 4);
        let target = x.act_word(w.iter()).expect("walk acts");
        let h = random_ld_word(&mut rng, &target, 2);
        let x = x.clone();
        let key = format!("right | {x} | {w} | {h}");
        cases.push(Case::new(key, move || {
            let nf = garside::normal_form(&inst, &x, &w)?;
            // Only simple right factors enter the domino; take the head.
            let g = garside::head(&inst, nf.target(), &h)?;
            match garside::right_multiply_nf(&inst, &nf, &g)? {
                RightProduct::Normal(_) => Ok(Verdict::Pass),
                RightProduct::Violation { domino, expected } => Ok(Verdict::Fail {
                    expected: expected.to_string(),
                    actual: format!("right domino gave {domino}"),
                }),
            }
        }));
    }
    cases
}

/// Describes why `(φ(f1), φ(f2))` is not normal: an atom dividing both
/// `φ(f1)*` and `φ(f2)`.
fn regularity_witness(inst: &LdInstance, t: &Term, f1: &Word<Address>, f2: &Word<Address>) -> Result<String, GarsideError> {
    let s = t.act_word(f1.iter()).ok_or(GarsideError::Undefined {
        object: t.to_string(),
        word: f1.to_string(),
    })?;
    let y = garside::phi_object(inst, t)?;
    let p1 = garside::phi_op(inst, t, f1)?;
    let p2 = garside::phi_op(inst, &s, f2)?;
    let star = garside::star(inst, &y, &p1)?;
    let z = y.act_word(p1.iter()).expect("φ(f1) acts on φ(t)");
    let atom = garside::common_atom(inst, &z, &star, &p2)?;
    let atom = atom.map_or_else(|| "none found".to_string(), |a| Word::atom(a).to_string());
    Ok(format!("φ(f1) = {p1}, φ(f2) = {p2}; common left-divisor of φ(f1)* and φ(f2): {atom}"))
}

fn gcd_preservation(size: usize, budget: Budget) -> Vec<Case<'static>> {
    let table = match table_or_error(size, budget) {
        Ok(t) => t,
        Err(cases) => return cases,
    };
    let inst = LdInstance { budget };
    let mut cases = Vec::new();
    for (t, divisors) in &table {
        for (i, a) in divisors.iter().enumerate() {
            for b in &divisors[i..] {
                let key = format!("{t} | {} | {}", a.word, b.word);
                let (t, a, b) = (t.clone(), a.word.clone(), b.word.clone());
                cases.push(Case::new(key, move || {
                    let ok = garside::gcd_preservation_check(&inst, &t, &a, &b)?;
                    if !ok {
                        let y = garside::phi_object(&inst, &t)?;
                        let (pa, pb) = (garside::phi_op(&inst, &t, &a)?, garside::phi_op(&inst, &t, &b)?);
                        let lhs = garside::gcd_at(&inst, &y, &pa, &pb)?;
                        let rhs = garside::phi_op(&inst, &t, &garside::gcd_at(&inst, &t, &a, &b)?)?;
                        return Ok(Verdict::Fail {
                            expected: format!("φ_t(gcd) = {rhs}"),
                            actual: format!("gcd(φ_t(a), φ_t(b)) = {lhs}"),
                        });
                    }
                    let coprime = garside::coprime_preservation_check(&inst, &t, &a, &b)?;
                    Ok(Verdict::check(coprime, "coprime simples have coprime images", || {
                        "coprimeness lost".into()
                    }))
                }));
            }
        }
    }
    cases
}

fn dual(size: usize, budget: Budget) -> Vec<Case<'static>> {
    let table = match table_or_error(size, budget) {
        Ok(t) => t,
        Err(cases) => return cases,
    };
    let inst = LdInstance { budget };
    let mut cases = Vec::new();
    for (t, divisors) in &table {
        for d in divisors {
            let key = format!("{t} | {}", d.word);
            let (t, f) = (t.clone(), d.word.clone());
            cases.push(Case::new(key, move || {
                let ok = garside::dual_check(&inst, &t, &f)?;
                Ok(Verdict::check(ok, "φ(f*) = φ(f)*", || "φ(f*) ≠ φ(f)*".into()))
            }));
        }
    }
    let br = BraidInstance { budget };
    for n in 1..=4usize {
        for p in permutations(n) {
            let f = p.braid();
            cases.push(Case::new(format!("braid {n} | {f}"), move || {
                let ok = garside::dual_check(&br, &n, &f)?;
                Ok(Verdict::check(ok, "φ(f*) = φ(f)*", || "φ(f*) ≠ φ(f)*".into()))
            }));
        }
    }
    cases
}

/// All permutations of `{1..n}` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Permutation> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
        if prefix.len() == used.len() {
            out.push(Permutation(prefix.clone()));
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i + 1);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Every term reachable from `t` by associativity expansions.
pub fn assoc_expansions(t: &Term) -> Vec<Term> {
    let mut seen = HashSet::from([t.clone()]);
    let mut queue = VecDeque::from([t.clone()]);
    let mut out = Vec::new();
    while let Some(u) = queue.pop_front() {
        for a in assoc_redexes(&u) {
            let v = u.apply_assoc(&a).expect("redex");
            if seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
        out.push(u);
    }
    out
}

fn assoc_redexes(t: &Term) -> Vec<Address> {
    // Same shape condition as LD: a right child that is a node.
    t.ld_redexes()
}

fn assoc_trivial(size: usize) -> Vec<Case<'static>> {
    let mut cases = Vec::new();
    for shape in shapes_up_to(size) {
        let t = distinct_labelling(&shape);
        cases.push(Case::new(format!("A @ {t}"), move || {
            let comb = t.left_comb();
            for u in assoc_expansions(&t) {
                if !assoc_expansions(&u).contains(&comb) {
                    return Ok(Verdict::Fail {
                        expected: format!("{comb} reachable from {u}"),
                        actual: "unreachable".into(),
                    });
                }
            }
            Ok(Verdict::Pass)
        }));
    }
    cases
}

/// Runs every suite at its defaults.
pub fn verify_all(opts: &VerifyOptions) -> Vec<Report> {
    Suite::ALL.iter().map(|s| verify(*s, opts)).collect()
}

/// Number of shapes with `1 ≤ size ≤ max`.
pub fn nonleaf_shape_count(max: usize) -> usize {
    (1..=max).map(|s| shapes(s).len()).sum()
}
