//! Right subword reversing for monoids presented by a complement.
//!
//! A complement `C` assigns to each pair of atoms `(a, b)` a word `C(a, b)`
//! such that `a·C(a,b) = b·C(b,a)` is the unique defining relation for the
//! pair. Reversing extends `C` to words, `Ĉ(u, v)`, and yields right-lcms,
//! divisibility, quotients and the word problem.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::num::NonZeroU64;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::term::ParseError;

/// A generator. `Ord` is the enumeration order used when stripping gcds.
pub trait Atom: Clone + Eq + Hash + Ord + fmt::Debug + Send + Sync {
    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result;
    fn parse_atom(s: &str) -> Result<Self, ParseError>;
}

/// A finite sequence of atoms; the empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word<A>(pub Vec<A>);

impl<A> Word<A> {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn atom(a: A) -> Self {
        Word(vec![a])
    }

    pub fn into_vec(self) -> Vec<A> {
        self.0
    }
}

impl<A: Clone> Word<A> {
    pub fn concat(&self, other: &Word<A>) -> Word<A> {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl<A> Deref for Word<A> {
    type Target = [A];

    fn deref(&self) -> &[A] {
        &self.0
    }
}

impl<A> FromIterator<A> for Word<A> {
    fn from_iter<I: IntoIterator<Item = A>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<A> From<Vec<A>> for Word<A> {
    fn from(v: Vec<A>) -> Self {
        Word(v)
    }
}

impl<'a, A> IntoIterator for &'a Word<A> {
    type Item = &'a A;
    type IntoIter = std::slice::Iter<'a, A>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

struct AtomDisplay<'a, A>(&'a A);

impl<A: Atom> fmt::Display for AtomDisplay<'_, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_atom(f)
    }
}

/// Whitespace-separated atoms; the empty word prints as `ε`.
impl<A: Atom> fmt::Display for Word<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            a.fmt_atom(f)?;
        }
        Ok(())
    }
}

impl<A: Atom> fmt::Debug for Word<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl<A: Atom> std::str::FromStr for Word<A> {
    type Err = ParseError;

    /// Whitespace-separated atoms; empty input, `ε` and `1` denote the empty
    /// word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "1" {
            return Ok(Word::empty());
        }
        s.split_whitespace().map(A::parse_atom).collect()
    }
}

pub fn render<A: Atom>(a: &A) -> String {
    AtomDisplay(a).to_string()
}

/// Pair-of-atoms to word map defining a presentation.
pub trait Complement<A: Atom>: Sync {
    /// `C(a, b)`; `None` when the table has no relation for the pair.
    fn complement(&self, a: &A, b: &A) -> Option<Word<A>>;
}

/// A complement given by an explicit finite table. `C(a, a)` is implicitly
/// empty.
#[derive(Debug, Clone, Default)]
pub struct TableComplement<A: Atom> {
    entries: HashMap<(A, A), Word<A>>,
}

impl<A: Atom> TableComplement<A> {
    pub fn new() -> Self {
        TableComplement {
            entries: HashMap::new(),
        }
    }

    /// Records the relation `a·ca = b·cb`.
    pub fn relation(mut self, a: A, ca: Word<A>, b: A, cb: Word<A>) -> Self {
        self.entries.insert((a.clone(), b.clone()), ca);
        self.entries.insert((b, a), cb);
        self
    }
}

impl<A: Atom> Complement<A> for TableComplement<A> {
    fn complement(&self, a: &A, b: &A) -> Option<Word<A>> {
        if a == b {
            return Some(Word::empty());
        }
        self.entries.get(&(a.clone(), b.clone())).cloned()
    }
}

impl<A: Atom, C: Complement<A> + ?Sized> Complement<A> for &C {
    fn complement(&self, a: &A, b: &A) -> Option<Word<A>> {
        (**self).complement(a, b)
    }
}

/// Maximum number of elementary reversing steps for one reversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget(NonZeroU64);

impl Budget {
    pub const DEFAULT_STEPS: u64 = 1_000_000;
    pub const DEFAULT: Budget = match NonZeroU64::new(Self::DEFAULT_STEPS) {
        Some(n) => Budget(n),
        None => panic!("the default budget is positive"),
    };

    pub fn new(max_steps: u64) -> Option<Budget> {
        NonZeroU64::new(max_steps).map(Budget)
    }

    pub fn max_steps(&self) -> u64 {
        self.0.get()
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReversingError {
    #[error("reversing exhausted its budget of {0} steps")]
    Exhausted(u64),
    #[error("complement undefined for the pair ({0}, {1})")]
    Undefined(String, String),
    #[error("{divisor} does not left-divide {word}")]
    NotDivisor { divisor: String, word: String },
}

#[derive(Clone)]
enum Letter<A> {
    Pos(A),
    Neg(A),
}

/// Computes `(Ĉ(u, v), Ĉ(v, u))` by reversing `u⁻¹v` into `Ĉ(u,v)·Ĉ(v,u)⁻¹`,
/// always rewriting the leftmost `a⁻¹b` pattern.
pub fn reverse<A: Atom, C: Complement<A> + ?Sized>(
    c: &C,
    u: &[A],
    v: &[A],
    budget: Budget,
) -> Result<(Word<A>, Word<A>), ReversingError> {
    // `done` holds the already reversed prefix (positive letters, then
    // negative ones); `todo` holds the rest, next letter on top. Rewriting
    // the pattern at the junction and pushing the replacement back onto
    // `todo` is the leftmost-first strategy at O(1) cost per step.
    let mut done: Vec<Letter<A>> = Vec::with_capacity(u.len() + v.len());
    done.extend(u.iter().rev().cloned().map(Letter::Neg));
    let mut todo: Vec<Letter<A>> = v.iter().rev().cloned().map(Letter::Pos).collect();

    let mut steps = 0u64;
    while let Some(next) = todo.pop() {
        let (a, b) = match (done.last(), &next) {
            (Some(Letter::Neg(a)), Letter::Pos(b)) => (a, b),
            _ => {
                done.push(next);
                continue;
            }
        };
        steps += 1;
        if steps > budget.max_steps() {
            return Err(ReversingError::Exhausted(budget.max_steps()));
        }
        let undefined = || ReversingError::Undefined(render(a), render(b));
        let cab = c.complement(a, b).ok_or_else(undefined)?;
        let cba = c.complement(b, a).ok_or_else(undefined)?;
        done.pop();
        // Replacement `Ĉ(a,b)·Ĉ(b,a)⁻¹`, pushed so that its first letter is on top.
        todo.extend(cba.0.into_iter().map(Letter::Neg));
        todo.extend(cab.0.into_iter().rev().map(Letter::Pos));
    }
    let mut w = done;

    let split = w
        .iter()
        .position(|l| matches!(l, Letter::Neg(_)))
        .unwrap_or(w.len());
    let neg_part = w.split_off(split);
    let pos: Word<A> = w
        .into_iter()
        .map(|l| match l {
            Letter::Pos(a) => a,
            Letter::Neg(_) => unreachable!("reversed word is positive then negative"),
        })
        .collect();
    let neg: Word<A> = neg_part
        .into_iter()
        .rev()
        .map(|l| match l {
            Letter::Neg(a) => a,
            Letter::Pos(_) => unreachable!("reversed word is positive then negative"),
        })
        .collect();
    Ok((pos, neg))
}

/// `u ⪯ v`: `v = u·w` for some `w`.
pub fn divides<A: Atom, C: Complement<A> + ?Sized>(
    c: &C,
    u: &[A],
    v: &[A],
    budget: Budget,
) -> Result<bool, ReversingError> {
    Ok(reverse(c, u, v, budget)?.1.is_empty())
}

/// The right-lcm `u·Ĉ(u, v)`.
pub fn lcm<A: Atom, C: Complement<A> + ?Sized>(
    c: &C,
    u: &[A],
    v: &[A],
    budget: Budget,
) -> Result<Word<A>, ReversingError> {
    let (uv, _) = reverse(c, u, v, budget)?;
    Ok(Word(u.to_vec()).concat(&uv))
}

/// Equality in the presented monoid.
pub fn equal<A: Atom, C: Complement<A> + ?Sized>(
    c: &C,
    u: &[A],
    v: &[A],
    budget: Budget,
) -> Result<bool, ReversingError> {
    if u == v {
        return Ok(true);
    }
    let (uv, vu) = reverse(c, u, v, budget)?;
    Ok(uv.is_empty() && vu.is_empty())
}

/// The `w` with `u·w = v`, when `u ⪯ v`.
pub fn quotient<A: Atom, C: Complement<A> + ?Sized>(
    c: &C,
    u: &[A],
    v: &[A],
    budget: Budget,
) -> Result<Word<A>, ReversingError> {
    let (uv, vu) = reverse(c, u, v, budget)?;
    if vu.is_empty() {
        Ok(uv)
    } else {
        Err(ReversingError::NotDivisor {
            divisor: Word(u.to_vec()).to_string(),
            word: Word(v.to_vec()).to_string(),
        })
    }
}

/// Left-gcd by iterative stripping of common atomic left-divisors.
///
/// `candidates` receives the common prefix stripped so far and must return
/// every atom that could left-divide the remaining quotients. They are tried
/// in enumeration order.
pub fn gcd<A, C, F>(
    c: &C,
    u: &[A],
    v: &[A],
    mut candidates: F,
    budget: Budget,
) -> Result<Word<A>, ReversingError>
where
    A: Atom,
    C: Complement<A> + ?Sized,
    F: FnMut(&Word<A>) -> Vec<A>,
{
    let mut g = Word::empty();
    let mut u = Word(u.to_vec());
    let mut v = Word(v.to_vec());
    'strip: loop {
        if u.is_empty() || v.is_empty() {
            return Ok(g);
        }
        let mut atoms = candidates(&g);
        atoms.sort();
        atoms.dedup();
        for a in atoms {
            let a_word = [a.clone()];
            let (qu, ru) = reverse(c, &a_word, &u, budget)?;
            if !ru.is_empty() {
                continue;
            }
            let (qv, rv) = reverse(c, &a_word, &v, budget)?;
            if !rv.is_empty() {
                continue;
            }
            g.0.push(a);
            u = qu;
            v = qv;
            continue 'strip;
        }
        return Ok(g);
    }
}

/// The cube condition for one triple:
/// `Ĉ(Ĉ(Ĉ(a,b), Ĉ(a,c)), Ĉ(Ĉ(b,a), Ĉ(b,c)))` is empty.
pub fn cube_check<A: Atom, C: Complement<A> + ?Sized>(
    comp: &C,
    a: &A,
    b: &A,
    c: &A,
    budget: Budget,
) -> Result<bool, ReversingError> {
    let (a, b, c) = ([a.clone()], [b.clone()], [c.clone()]);
    let (ab, ba) = reverse(comp, &a, &b, budget)?;
    let (ac, _) = reverse(comp, &a, &c, budget)?;
    let (bc, _) = reverse(comp, &b, &c, budget)?;
    let (left, _) = reverse(comp, &ab, &ac, budget)?;
    let (right, _) = reverse(comp, &ba, &bc, budget)?;
    let (outer, _) = reverse(comp, &left, &right, budget)?;
    Ok(outer.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two letters with the single relation `x·y = y·x`.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
    enum Letter2 {
        X,
        Y,
    }

    impl Atom for Letter2 {
        fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str(match self {
                Letter2::X => "x",
                Letter2::Y => "y",
            })
        }

        fn parse_atom(s: &str) -> Result<Self, ParseError> {
            match s {
                "x" => Ok(Letter2::X),
                "y" => Ok(Letter2::Y),
                other => Err(ParseError::BadAtom(other.to_string())),
            }
        }
    }

    fn commutative() -> TableComplement<Letter2> {
        TableComplement::new().relation(
            Letter2::X,
            Word::atom(Letter2::Y),
            Letter2::Y,
            Word::atom(Letter2::X),
        )
    }

    /// `x·x = y` style table whose reversing never ends: `x⁻¹y -> x·y⁻¹·…`.
    fn divergent() -> TableComplement<Letter2> {
        TableComplement::new().relation(
            Letter2::X,
            Word(vec![Letter2::Y, Letter2::Y]),
            Letter2::Y,
            Word(vec![Letter2::X, Letter2::X]),
        )
    }

    #[test]
    fn free_commutative_monoid() {
        use Letter2::*;
        let c = commutative();
        let b = Budget::default();
        assert!(equal(&c, &[X, Y, X], &[X, X, Y], b).unwrap());
        assert!(!equal(&c, &[X, Y], &[X, X], b).unwrap());
        assert!(divides(&c, &[Y], &[X, Y], b).unwrap());
        assert_eq!(quotient(&c, &[Y], &[X, Y, Y], b).unwrap(), Word(vec![X, Y]));
        assert_eq!(lcm(&c, &[X, X], &[X, Y], b).unwrap().len(), 3);
        let g = gcd(&c, &[X, X, Y], &[Y, X], |_| vec![X, Y], b).unwrap();
        assert!(equal(&c, &g, &[X, Y], b).unwrap());
    }

    #[test]
    fn empty_word_reversal() {
        use Letter2::*;
        let c = commutative();
        let (l, r) = reverse(&c, &[X, Y], &[], Budget::default()).unwrap();
        assert!(l.is_empty());
        assert_eq!(r, Word(vec![X, Y]));
    }

    #[test]
    fn divergence_is_reported() {
        use Letter2::*;
        let c = divergent();
        let err = reverse(&c, &[X], &[Y, Y], Budget::new(1000).unwrap());
        assert_eq!(err, Err(ReversingError::Exhausted(1000)));
    }

    #[test]
    fn missing_relation() {
        use Letter2::*;
        let c: TableComplement<Letter2> = TableComplement::new();
        assert!(matches!(
            reverse(&c, &[X], &[Y], Budget::default()),
            Err(ReversingError::Undefined(_, _))
        ));
        assert!(cube_check(&c, &X, &X, &X, Budget::default()).unwrap());
    }

    #[test]
    fn word_text_round_trip() {
        use Letter2::*;
        let w: Word<Letter2> = "x y  x".parse().unwrap();
        assert_eq!(w, Word(vec![X, Y, X]));
        assert_eq!(w.to_string(), "x y x");
        assert_eq!("ε".parse::<Word<Letter2>>().unwrap(), Word::empty());
        assert!("x z".parse::<Word<Letter2>>().is_err());
    }
}
