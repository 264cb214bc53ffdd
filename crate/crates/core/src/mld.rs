//! The monoid of labelled LD-expansions, generated by one atom `D_α` per
//! address `α`.
//!
//! `D_α` acts on a term by expanding `t0∘(t1∘t2)` at `α`. The defining
//! relations come in five families (parallel, three nested cases and the
//! critical case) and form a complement, so every question about words is
//! answered by [`crate::reversing`].

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::garside::GarsideInstance;
use crate::reversing::{self, Atom, Budget, Complement, ReversingError, Word};
use crate::term::{Address, ParseError, Term};

pub type LdWord = Word<Address>;

impl Atom for Address {
    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D:{self}")
    }

    fn parse_atom(s: &str) -> Result<Self, ParseError> {
        let bits = s
            .strip_prefix("D:")
            .ok_or_else(|| ParseError::BadAtom(s.to_string()))?;
        bits.parse()
    }
}

/// Shorthand for building words in tests and examples: `ld_word(&["", "1"])`
/// is `D_ε D_1`. Panics on malformed addresses.
pub fn ld_word(addresses: &[&str]) -> LdWord {
    addresses
        .iter()
        .map(|a| a.parse::<Address>().expect("valid address"))
        .collect()
}

/// The complement associated with the LD relations.
#[derive(Debug, Clone, Copy, Default)]
pub struct LdComplement;

impl LdComplement {
    /// `C(D_α, D_β)`, total on all address pairs.
    pub fn entry(alpha: &Address, beta: &Address) -> LdWord {
        if alpha == beta {
            return Word::empty();
        }
        if alpha.is_parallel(beta) {
            return Word::atom(*beta);
        }
        if let Some(rest) = beta.strip_prefix(alpha) {
            // β extends α: read off which nested or critical case applies.
            let gamma = rest;
            let first = gamma.bit(0);
            if !first {
                // β = α0γ': D_β·D_α = D_α·D_{α00γ'}·D_{α10γ'}
                let tail = tail_after(&gamma, 1);
                return Word(vec![
                    alpha.left().left().concat(&tail),
                    alpha.right().left().concat(&tail),
                ]);
            }
            if gamma.len() == 1 {
                // β = α1, the critical case.
                return Word(vec![alpha.right(), *alpha]);
            }
            let tail = tail_after(&gamma, 2);
            return if gamma.bit(1) {
                // β = α11γ'
                Word::atom(alpha.right().right().concat(&tail))
            } else {
                // β = α10γ' ↦ α01γ'
                Word::atom(alpha.left().right().concat(&tail))
            };
        }
        // α extends β.
        if alpha.len() == beta.len() + 1 && alpha.bit(beta.len()) {
            // α = β1: C(D_β1, D_β) = D_β·D_β1·D_β0
            Word(vec![*beta, beta.right(), beta.left()])
        } else {
            Word::atom(*beta)
        }
    }
}

fn tail_after(a: &Address, skip: usize) -> Address {
    Address::from_bits(a.bits().skip(skip))
}

impl Complement<Address> for LdComplement {
    fn complement(&self, a: &Address, b: &Address) -> Option<LdWord> {
        Some(LdComplement::entry(a, b))
    }
}

/// Prepends `gamma` to every address of `w`.
pub fn shift(gamma: &Address, w: &[Address]) -> LdWord {
    w.iter().map(|a| gamma.concat(a)).collect()
}

/// `δ_t`: empty for a variable, `D_ε · sh_0(δ_t0) · sh_1(δ_t1)` otherwise.
pub fn delta_small(t: &Term) -> LdWord {
    let mut out = Vec::new();
    push_delta_small(t, Address::ROOT, &mut out);
    Word(out)
}

fn push_delta_small(t: &Term, at: Address, out: &mut Vec<Address>) {
    if let Some((l, r)) = t.children() {
        out.push(at);
        push_delta_small(l, at.left(), out);
        push_delta_small(r, at.right(), out);
    }
}

/// `Δ_t`: empty for a variable, `sh_0(Δ_t0) · sh_1(Δ_t1) · δ_φ(t1)` otherwise.
pub fn delta_big(t: &Term) -> LdWord {
    let mut out = Vec::new();
    push_delta_big(t, Address::ROOT, &mut out);
    Word(out)
}

fn push_delta_big(t: &Term, at: Address, out: &mut Vec<Address>) {
    if let Some((l, r)) = t.children() {
        push_delta_big(l, at.left(), out);
        push_delta_big(r, at.right(), out);
        push_delta_small(&r.phi(), at, out);
    }
}

/// Length of `Δ_t`, saturating, computed without building the word.
pub fn delta_big_len(t: &Term) -> u64 {
    match t.children() {
        None => 0,
        Some((l, r)) => delta_big_len(l)
            .saturating_add(delta_big_len(r))
            .saturating_add(r.phi_leaves() - 1),
    }
}

/// The atoms `D_α` acting on `t`, in enumeration order.
pub fn enabled_atoms(t: &Term) -> Vec<Address> {
    t.ld_redexes()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LdError {
    #[error("word {word} does not act on term {term}")]
    Undefined { term: String, word: String },
    #[error("{word} is not a left-divisor of Δ at {term}")]
    NotSimple { term: String, word: String },
    #[error("simple element {word} at {term} has no coordinate form (remainder {remainder})")]
    NoCoordinateForm {
        term: String,
        word: String,
        remainder: String,
    },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Reversing(#[from] ReversingError),
}

fn act(t: &Term, w: &[Address]) -> Result<Term, LdError> {
    t.act_word(w).ok_or_else(|| LdError::Undefined {
        term: t.to_string(),
        word: Word(w.to_vec()).to_string(),
    })
}

/// The functor component `φ_t(a)`, defined by `Δ_t · φ_t(a) = a · Δ_{t•a}`.
pub fn phi_t(t: &Term, a: &[Address], budget: Budget) -> Result<LdWord, LdError> {
    let target = act(t, a)?;
    let rhs = Word(a.to_vec()).concat(&delta_big(&target));
    reversing::quotient(&LdComplement, &delta_big(t), &rhs, budget).map_err(|e| match e {
        ReversingError::NotDivisor { divisor, word } => LdError::Invariant(format!(
            "Δ_t = {divisor} does not divide a·Δ_(t•a) = {word} at t = {t}"
        )),
        other => other.into(),
    })
}

/// Left-gcd of two words acting on `t`, candidates taken from the running
/// object.
pub fn gcd_at(t: &Term, u: &[Address], v: &[Address], budget: Budget) -> Result<LdWord, LdError> {
    // Both words act on t, so every atomic divisor of the stripped remainders
    // acts on the term reached by the stripped prefix.
    act(t, u)?;
    act(t, v)?;
    let g = reversing::gcd(
        &LdComplement,
        u,
        v,
        |prefix| {
            t.act_word(prefix.iter())
                .map(|s| enabled_atoms(&s))
                .unwrap_or_default()
        },
        budget,
    )?;
    Ok(g)
}

/// A left-divisor of `Δ_t` together with its complement `a·a* = Δ_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleDivisor {
    pub word: LdWord,
    pub star: LdWord,
    pub target: Term,
}

/// All left-divisors of `Δ_t`, breadth first from the empty word,
/// deduplicated by monoid equality. The first word reaching an element is
/// its representative.
pub fn simple_divisors(t: &Term, budget: Budget) -> Result<Vec<SimpleDivisor>, LdError> {
    let delta = delta_big(t);
    let c = LdComplement;
    let mut found: Vec<SimpleDivisor> = vec![SimpleDivisor {
        word: Word::empty(),
        star: delta.clone(),
        target: t.clone(),
    }];
    // Equal elements reach the same term, so buckets keyed by target keep the
    // dedup comparisons local.
    let mut by_target: HashMap<Term, Vec<usize>> = HashMap::new();
    by_target.entry(t.clone()).or_default().push(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        let here = found[idx].clone();
        for atom in enabled_atoms(&here.target) {
            let (rest, remainder) = reversing::reverse(&c, &[atom], &here.star, budget)?;
            if !remainder.is_empty() {
                continue;
            }
            let word = here.word.concat(&Word::atom(atom));
            let target = here.target.apply_ld(&atom).expect("enabled atom acts");
            let bucket = by_target.entry(target.clone()).or_default();
            let mut duplicate = false;
            for &j in bucket.iter() {
                if reversing::equal(&c, &found[j].word, &word, budget)? {
                    duplicate = true;
                    break;
                }
            }
            if duplicate {
                continue;
            }
            bucket.push(found.len());
            queue.push_back(found.len());
            found.push(SimpleDivisor {
                word,
                star: rest,
                target,
            });
        }
    }
    Ok(found)
}

/// A word known to left-divide `Δ_witness`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleElement {
    word: LdWord,
    witness: Term,
}

impl SimpleElement {
    /// Checks `word ⪯ Δ_witness` (which also makes `witness • word` defined).
    pub fn new(word: LdWord, witness: Term, budget: Budget) -> Result<SimpleElement, LdError> {
        if !reversing::divides(&LdComplement, &word, &delta_big(&witness), budget)? {
            return Err(LdError::NotSimple {
                term: witness.to_string(),
                word: word.to_string(),
            });
        }
        Ok(SimpleElement { word, witness })
    }

    pub fn word(&self) -> &LdWord {
        &self.word
    }

    pub fn witness(&self) -> &Term {
        &self.witness
    }
}

/// Exponents `e_α` of a simple element, keyed by address.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Coordinates(pub BTreeMap<String, u32>);

impl Coordinates {
    pub fn get(&self, a: &Address) -> u32 {
        self.0.get(&a.to_bit_string()).copied().unwrap_or(0)
    }

    pub fn set(&mut self, a: &Address, e: u32) {
        if e == 0 {
            self.0.remove(&a.to_bit_string());
        } else {
            self.0.insert(a.to_bit_string(), e);
        }
    }

    fn addresses(&self) -> Vec<(Address, u32)> {
        self.0
            .iter()
            .map(|(k, &e)| (k.parse().expect("coordinate keys are addresses"), e))
            .collect()
    }
}

/// `D_α^(e) = D_α · D_α1 · … · D_α1^(e-1)`.
pub fn power(alpha: &Address, e: u32) -> LdWord {
    let mut out = Vec::with_capacity(e as usize);
    let mut a = *alpha;
    for _ in 0..e {
        out.push(a);
        a = a.right();
    }
    Word(out)
}

/// Order in which the factors `D_α^(e_α)` of a simple element are
/// multiplied: right subtree, then the root, then the left subtree. This is
/// increasing for the order `a > a0b > a1c` restricted to comparable
/// addresses, with `a0b` placed after `a`.
pub fn coordinate_order(a: &Address, b: &Address) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    if a == b {
        return Equal;
    }
    let common = (0..a.len().min(b.len()))
        .find(|&i| a.bit(i) != b.bit(i))
        .unwrap_or(a.len().min(b.len()));
    let next = |x: &Address| if common < x.len() { Some(x.bit(common)) } else { None };
    // Position relative to the branching node: right subtree < node < left subtree.
    let rank = |bit: Option<bool>| match bit {
        Some(true) => 0,
        None => 1,
        Some(false) => 2,
    };
    rank(next(a)).cmp(&rank(next(b)))
}

/// Every address with `α11` inside some term reachable from `t` by a simple
/// element. LD-expansions never decrease depth and `φ(t)` expands every
/// such term, so addresses of length at most `depth(φ(t)) - 2` suffice.
pub fn relevant_addresses(t: &Term) -> Vec<Address> {
    let depth = t.phi().depth();
    let mut out = Vec::new();
    if depth < 2 {
        return out;
    }
    let mut level = vec![Address::ROOT];
    for _ in 0..=(depth - 2) {
        let mut next = Vec::with_capacity(level.len() * 2);
        for a in &level {
            out.push(*a);
            next.push(a.left());
            next.push(a.right());
        }
        level = next;
    }
    out.sort_by(coordinate_order);
    out
}

/// Coordinates of a simple element: visit the relevant addresses in product
/// order, strip the largest `D_α^(e)` dividing what remains. Elements left
/// with a nonempty remainder are reported as [`LdError::NoCoordinateForm`].
pub fn coordinates(a: &SimpleElement, budget: Budget) -> Result<Coordinates, LdError> {
    let c = LdComplement;
    let mut coords = Coordinates::default();
    let mut remaining = a.word.clone();
    for alpha in relevant_addresses(&a.witness) {
        if remaining.is_empty() {
            break;
        }
        let mut e = 0u32;
        loop {
            let next = power(&alpha.concat(&Address::right_spine(e as usize)), 1);
            let (q, r) = reversing::reverse(&c, &next, &remaining, budget)?;
            if !r.is_empty() {
                break;
            }
            remaining = q;
            e += 1;
        }
        coords.set(&alpha, e);
    }
    if !remaining.is_empty() {
        return Err(LdError::NoCoordinateForm {
            term: a.witness.to_string(),
            word: a.word.to_string(),
            remainder: remaining.to_string(),
        });
    }
    Ok(coords)
}

/// The ordered product of the factors `D_α^(e_α)`.
pub fn from_coordinates(c: &Coordinates) -> LdWord {
    let mut entries = c.addresses();
    entries.sort_by(|x, y| coordinate_order(&x.0, &y.0));
    entries
        .iter()
        .flat_map(|(alpha, e)| power(alpha, *e).into_vec())
        .collect()
}

/// `M_LD` acting on terms, with `Δ_t` as Garside element.
#[derive(Debug, Clone, Copy, Default)]
pub struct LdInstance {
    pub budget: Budget,
}

impl GarsideInstance for LdInstance {
    type Object = Term;
    type Atom = Address;
    type Complement = LdComplement;

    fn complement(&self) -> &LdComplement {
        &LdComplement
    }

    fn atoms(&self, t: &Term) -> Vec<Address> {
        enabled_atoms(t)
    }

    fn act(&self, t: &Term, w: &[Address]) -> Option<Term> {
        t.act_word(w)
    }

    fn delta(&self, t: &Term) -> LdWord {
        delta_big(t)
    }

    fn delta_cost(&self, t: &Term) -> u64 {
        delta_big_len(t).max(t.phi_leaves())
    }

    fn budget(&self) -> Budget {
        self.budget
    }
}

/// `(t•a defined ∧ a ⪯ Δ_t') ⟹ a ⪯ Δ_t`.
pub fn coherence_check(t: &Term, t_prime: &Term, a: &[Address], budget: Budget) -> Result<bool, LdError> {
    if t.act_word(a).is_none() {
        return Ok(true);
    }
    let c = LdComplement;
    if !reversing::divides(&c, a, &delta_big(t_prime), budget)? {
        return Ok(true);
    }
    Ok(reversing::divides(&c, a, &delta_big(t), budget)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    fn eq(u: &LdWord, v: &LdWord) -> bool {
        reversing::equal(&LdComplement, u, v, Budget::default()).unwrap()
    }

    #[test]
    fn complement_cases() {
        let e = |a: &str, b: &str| LdComplement::entry(&a.parse().unwrap(), &b.parse().unwrap());
        assert_eq!(e("", ""), Word::empty());
        assert_eq!(e("0", "1"), ld_word(&["1"]));
        assert_eq!(e("", "1"), ld_word(&["1", ""]));
        assert_eq!(e("1", ""), ld_word(&["", "1", "0"]));
        assert_eq!(e("", "01"), ld_word(&["001", "101"]));
        assert_eq!(e("01", ""), ld_word(&[""]));
        assert_eq!(e("", "101"), ld_word(&["011"]));
        assert_eq!(e("", "110"), ld_word(&["110"]));
        assert_eq!(e("1", "10"), ld_word(&["100", "110"]));
        assert_eq!(e("10", "1"), ld_word(&["1"]));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift(&"0".parse().unwrap(), &ld_word(&["", "1"])), ld_word(&["0", "01"]));
        let w = ld_word(&["1", "01"]);
        assert_eq!(shift(&Address::ROOT, &w), w);
    }

    #[test]
    fn deltas() {
        assert_eq!(delta_small(&t("x*x")), ld_word(&[""]));
        assert_eq!(delta_small(&t("(x*x)*(x*x)")), ld_word(&["", "0", "1"]));
        assert_eq!(delta_big(&t("x")), Word::empty());
        let comb = t("x*(x*(x*x))");
        assert_eq!(delta_big(&comb), ld_word(&["1", "", "0", "1"]));
        assert!(eq(&delta_big(&comb), &ld_word(&["", "1", ""])));
    }

    #[test]
    fn delta_length_formula_matches_words() {
        for t in crate::term::shapes_up_to(6) {
            assert_eq!(delta_big_len(&t), delta_big(&t).len() as u64, "{t}");
            assert_eq!(t.phi_leaves(), t.phi().leaves().len() as u64, "{t}");
        }
    }

    #[test]
    fn enabled() {
        assert!(enabled_atoms(&t("x*x")).is_empty());
        assert_eq!(enabled_atoms(&t("x*(x*(x*x))")), vec![Address::ROOT, "1".parse().unwrap()]);
    }

    #[test]
    fn phi_t_values() {
        let b = Budget::default();
        let comb = t("x*(x*(x*x))");
        assert_eq!(phi_t(&comb, &ld_word(&["1"]), b).unwrap(), ld_word(&[""]));
        assert!(eq(&phi_t(&comb, &ld_word(&[""]), b).unwrap(), &ld_word(&["0", "1"])));
        assert_eq!(phi_t(&comb, &[], b).unwrap(), Word::empty());
        let two = t("(x*(x*x))*(x*(x*x))");
        assert!(eq(
            &phi_t(&two, &ld_word(&["0"]), b).unwrap(),
            &ld_word(&["000", "010", "100", "110"])
        ));
        assert!(eq(&phi_t(&two, &ld_word(&["1"]), b).unwrap(), &ld_word(&[""])));
        assert!(matches!(
            phi_t(&t("x*x"), &ld_word(&[""]), b),
            Err(LdError::Undefined { .. })
        ));
    }

    #[test]
    fn divisors_of_small_deltas() {
        let b = Budget::default();
        // Δ_(x∘x) = δ_φ(x) is trivial; one level up, Δ_(x∘(x∘x)) = D_ε.
        assert_eq!(simple_divisors(&t("x*x"), b).unwrap().len(), 1);
        let d = simple_divisors(&t("x*(x*x)"), b).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[1].word, ld_word(&[""]));
        let comb = t("x*(x*(x*x))");
        let d = simple_divisors(&comb, b).unwrap();
        for expected in [
            ld_word(&[""]),
            ld_word(&["1"]),
            ld_word(&["", "1"]),
            ld_word(&["1", ""]),
            ld_word(&["", "1", ""]),
        ] {
            assert!(d.iter().any(|s| eq(&s.word, &expected)), "missing {expected}");
        }
        for s in &d {
            assert!(eq(&s.word.concat(&s.star), &delta_big(&comb)));
        }
    }

    #[test]
    fn coordinates_round_trip_small() {
        let b = Budget::default();
        let d = SimpleElement::new(ld_word(&[""]), t("x*(x*x)"), b).unwrap();
        let c = coordinates(&d, b).unwrap();
        assert_eq!(c.0.len(), 1);
        assert_eq!(c.get(&Address::ROOT), 1);
        let mut two = Coordinates::default();
        two.set(&Address::ROOT, 2);
        assert_eq!(from_coordinates(&two), ld_word(&["", "1"]));
        assert!(SimpleElement::new(ld_word(&["", ""]), t("x*(x*x)"), b).is_err());
    }

    #[test]
    fn delta_coordinates_of_three_comb() {
        let b = Budget::default();
        let comb = t("x*(x*(x*x))");
        let d = SimpleElement::new(delta_big(&comb), comb, b).unwrap();
        let c = coordinates(&d, b).unwrap();
        let expected: BTreeMap<String, u32> =
            [("1".to_string(), 1), (String::new(), 2), ("0".to_string(), 1)].into();
        assert_eq!(c.0, expected);
        assert!(eq(&from_coordinates(&c), d.word()));
    }

    /// Regression values: simple divisors reachable by BFS versus those with a
    /// coordinate form, over all shapes of size at most 4.
    #[test]
    fn coordinate_form_counts() {
        let b = Budget::default();
        let (mut simples, mut expressible) = (0, 0);
        for shape in crate::term::shapes_up_to(4) {
            for d in simple_divisors(&shape, b).unwrap() {
                simples += 1;
                let s = SimpleElement::new(d.word.clone(), shape.clone(), b).unwrap();
                match coordinates(&s, b) {
                    Ok(c) => {
                        assert!(eq(&from_coordinates(&c), &d.word), "round trip of {}", d.word);
                        expressible += 1;
                    }
                    Err(LdError::NoCoordinateForm { .. }) => {
                        assert_eq!(shape.size(), 4, "only size-4 shapes lack forms");
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert_eq!((simples, expressible), (203, 175));
    }
}
