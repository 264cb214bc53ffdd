//! Binary terms, subterm addresses, and the two expansion actions on terms:
//! left self-distributivity `x(yz) -> (xy)(xz)` and associativity
//! `x(yz) -> (xy)z`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

/// Longest address representable by [`Address`].
pub const MAX_ADDRESS_LEN: usize = 127;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unexpected end of input while parsing {0}")]
    UnexpectedEnd(&'static str),
    #[error("unexpected character {found:?} at offset {offset}, expected {expected}")]
    Unexpected {
        found: char,
        offset: usize,
        expected: &'static str,
    },
    #[error("trailing input at offset {0}")]
    Trailing(usize),
    #[error("invalid variable index {0:?}")]
    BadVariable(String),
    #[error("address longer than {MAX_ADDRESS_LEN} bits")]
    AddressTooLong,
    #[error("invalid atom {0:?}")]
    BadAtom(String),
}

/// A finite sequence of bits locating a subterm: `0` forks left, `1` forks
/// right, the empty address is the root.
///
/// The bits are packed most-significant-first into a `u128`, so addresses are
/// `Copy` and same-length addresses compare lexicographically as integers.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Address {
    bits: u128,
    len: u8,
}

impl Address {
    pub const ROOT: Address = Address { bits: 0, len: 0 };

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Address {
        let mut a = Address::ROOT;
        for b in bits {
            a = a.child(b);
        }
        a
    }

    /// `1^n`, the address of the n-th node on the rightmost branch.
    pub fn right_spine(n: usize) -> Address {
        Address::from_bits(std::iter::repeat(true).take(n))
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_root(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len());
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.bit(i))
    }

    /// Appends one bit. Panics past [`MAX_ADDRESS_LEN`].
    pub fn child(&self, right: bool) -> Address {
        assert!(self.len() < MAX_ADDRESS_LEN, "address overflow");
        Address {
            bits: (self.bits << 1) | right as u128,
            len: self.len + 1,
        }
    }

    pub fn left(&self) -> Address {
        self.child(false)
    }

    pub fn right(&self) -> Address {
        self.child(true)
    }

    /// `self` followed by `suffix`.
    pub fn concat(&self, suffix: &Address) -> Address {
        assert!(self.len() + suffix.len() <= MAX_ADDRESS_LEN, "address overflow");
        if suffix.len == 0 {
            return *self;
        }
        Address {
            bits: (self.bits << suffix.len) | suffix.bits,
            len: self.len + suffix.len,
        }
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        self.len <= other.len && (self.len == 0 || other.bits >> (other.len - self.len) == self.bits)
    }

    /// Neither address is a prefix of the other.
    pub fn is_parallel(&self, other: &Address) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    /// The part of `self` after `prefix`, if `prefix` is a prefix.
    pub fn strip_prefix(&self, prefix: &Address) -> Option<Address> {
        if !prefix.is_prefix_of(self) {
            return None;
        }
        let len = self.len - prefix.len;
        let mask = if len == 0 { 0 } else { (1u128 << len) - 1 };
        Some(Address {
            bits: self.bits & mask,
            len,
        })
    }

    /// The linear order with `a > a0b > a1c`: an address dominates all of
    /// its extensions, and the left subtree dominates the right one.
    pub fn cmp_tree_order(&self, other: &Address) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        if self.is_prefix_of(other) {
            return Ordering::Greater;
        }
        if other.is_prefix_of(self) {
            return Ordering::Less;
        }
        let first_diff = (0..self.len().min(other.len()))
            .find(|&i| self.bit(i) != other.bit(i))
            .expect("parallel addresses differ somewhere");
        if self.bit(first_diff) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    pub fn to_bit_string(&self) -> String {
        self.bits().map(|b| if b { '1' } else { '0' }).collect()
    }
}

/// Length first, then lexicographic: the enumeration order of atom names.
impl Ord for Address {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then(self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for Address {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            f.write_str("ε")
        } else {
            f.write_str(&self.to_bit_string())
        }
    }
}

impl FromStr for Address {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_ADDRESS_LEN {
            return Err(ParseError::AddressTooLong);
        }
        let mut a = Address::ROOT;
        for (offset, c) in s.char_indices() {
            a = match c {
                '0' => a.left(),
                '1' => a.right(),
                found => {
                    return Err(ParseError::Unexpected {
                        found,
                        offset,
                        expected: "0 or 1",
                    })
                }
            };
        }
        Ok(a)
    }
}

/// A finite binary tree whose leaves carry positive variable indices.
///
/// Children are reference counted: rebuilding a spine shares every untouched
/// subtree with the original.
#[derive(Clone, Eq, Hash)]
pub enum Term {
    Var(u64),
    Node(Arc<Term>, Arc<Term>),
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Node(l1, r1), Term::Node(l2, r2)) => {
                (Arc::ptr_eq(l1, l2) || l1 == l2) && (Arc::ptr_eq(r1, r2) || r1 == r2)
            }
            _ => false,
        }
    }
}

impl Term {
    /// The variable `x_index`; indices start at 1.
    pub fn var(index: u64) -> Term {
        assert!(index >= 1, "variable indices start at 1");
        Term::Var(index)
    }

    /// `left ∘ right`.
    pub fn op(left: Term, right: Term) -> Term {
        Term::Node(Arc::new(left), Arc::new(right))
    }

    /// `x ∘ (x ∘ (⋯ ∘ x))` with `n` operations, all leaves `x1`.
    pub fn right_comb(n: usize) -> Term {
        (0..n).fold(Term::var(1), |acc, _| Term::op(Term::var(1), acc))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn children(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::Var(_) => None,
            Term::Node(l, r) => Some((l, r)),
        }
    }

    /// Number of inner nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Node(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Node(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Variable indices in left-to-right order.
    pub fn leaves(&self) -> Vec<u64> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<u64>) {
        match self {
            Term::Var(i) => out.push(*i),
            Term::Node(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    /// Index of the rightmost variable.
    pub fn rightmost_var(&self) -> u64 {
        let mut t = self;
        loop {
            match t {
                Term::Var(i) => return *i,
                Term::Node(_, r) => t = r,
            }
        }
    }

    /// Length of the rightmost branch.
    pub fn right_height(&self) -> usize {
        let mut t = self;
        let mut n = 0;
        while let Term::Node(_, r) = t {
            n += 1;
            t = r;
        }
        n
    }

    pub fn subterm(&self, at: &Address) -> Option<&Term> {
        let mut t = self;
        for bit in at.bits() {
            let (l, r) = t.children()?;
            t = if bit { r } else { l };
        }
        Some(t)
    }

    /// Replaces the subterm at `at` by `f(subterm)`; `None` when the address
    /// is missing or `f` declines.
    pub fn rewrite_at<F>(&self, at: &Address, f: F) -> Option<Term>
    where
        F: FnOnce(&Term) -> Option<Term>,
    {
        self.rewrite_from(at, 0, f)
    }

    fn rewrite_from<F>(&self, at: &Address, depth: usize, f: F) -> Option<Term>
    where
        F: FnOnce(&Term) -> Option<Term>,
    {
        if depth == at.len() {
            return f(self);
        }
        match self {
            Term::Var(_) => None,
            Term::Node(l, r) => {
                if at.bit(depth) {
                    let r2 = r.rewrite_from(at, depth + 1, f)?;
                    Some(Term::Node(l.clone(), Arc::new(r2)))
                } else {
                    let l2 = l.rewrite_from(at, depth + 1, f)?;
                    Some(Term::Node(Arc::new(l2), r.clone()))
                }
            }
        }
    }

    /// Expands `t0 ∘ (t1 ∘ t2)` at `at` into `(t0 ∘ t1) ∘ (t0 ∘ t2)`.
    pub fn apply_ld(&self, at: &Address) -> Option<Term> {
        self.rewrite_at(at, |s| {
            let (t0, rest) = match s {
                Term::Node(l, r) => (l, r),
                Term::Var(_) => return None,
            };
            match rest.as_ref() {
                Term::Node(t1, t2) => Some(Term::Node(
                    Arc::new(Term::Node(t0.clone(), t1.clone())),
                    Arc::new(Term::Node(t0.clone(), t2.clone())),
                )),
                Term::Var(_) => None,
            }
        })
    }

    /// Applies `apply_ld` successively at each address.
    pub fn act_word<'a, I>(&self, word: I) -> Option<Term>
    where
        I: IntoIterator<Item = &'a Address>,
    {
        let mut t = self.clone();
        for a in word {
            t = t.apply_ld(a)?;
        }
        Some(t)
    }

    /// Addresses where an LD expansion applies, i.e. where `α11` exists.
    /// Sorted in atom enumeration order.
    pub fn ld_redexes(&self) -> Vec<Address> {
        let mut out = Vec::new();
        self.collect_redexes(Address::ROOT, &mut out);
        out.sort();
        out
    }

    fn collect_redexes(&self, here: Address, out: &mut Vec<Address>) {
        if let Term::Node(l, r) = self {
            if !r.is_var() {
                out.push(here);
            }
            l.collect_redexes(here.left(), out);
            r.collect_redexes(here.right(), out);
        }
    }

    /// `self ⊙ u`: distributes `self` over every leaf of `u`.
    pub fn dist(&self, u: &Term) -> Term {
        match u {
            Term::Var(_) => Term::op(self.clone(), u.clone()),
            Term::Node(u1, u2) => Term::op(self.dist(u1), self.dist(u2)),
        }
    }

    /// The fundamental LD-expansion: `φ(t0 ∘ t1) = φ(t0) ⊙ φ(t1)`.
    pub fn phi(&self) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::Node(l, r) => l.phi().dist(&r.phi()),
        }
    }

    /// Number of leaves of `φ(t)`, saturating at `u64::MAX`, computed without
    /// building `φ(t)`: every leaf of `φ(t1)` becomes `φ(t0) ∘ x`.
    pub fn phi_leaves(&self) -> u64 {
        match self {
            Term::Var(_) => 1,
            Term::Node(l, r) => r.phi_leaves().saturating_mul(l.phi_leaves().saturating_add(1)),
        }
    }

    /// Rightmost variables of the subterms at `0, 10, …, 1^(n-1)0`, where
    /// `n` is the right height. `None` for a bare variable.
    pub fn pi_hat(&self) -> Option<Vec<u64>> {
        if self.is_var() {
            return None;
        }
        let mut out = Vec::new();
        let mut t = self;
        while let Term::Node(l, r) = t {
            out.push(l.rightmost_var());
            t = r;
        }
        Some(out)
    }

    /// Associativity in the expanding direction: `t1 ∘ (t2 ∘ t3)` at `at`
    /// becomes `(t1 ∘ t2) ∘ t3`.
    pub fn apply_assoc(&self, at: &Address) -> Option<Term> {
        self.rewrite_at(at, |s| {
            let (t1, rest) = match s {
                Term::Node(l, r) => (l, r),
                Term::Var(_) => return None,
            };
            match rest.as_ref() {
                Term::Node(t2, t3) => Some(Term::Node(
                    Arc::new(Term::Node(t1.clone(), t2.clone())),
                    t3.clone(),
                )),
                Term::Var(_) => None,
            }
        })
    }

    /// The fully left-bracketed term with the same leaf sequence.
    pub fn left_comb(&self) -> Term {
        let leaves = self.leaves();
        let mut it = leaves.into_iter();
        let first = Term::Var(it.next().expect("terms have at least one leaf"));
        it.fold(first, |acc, v| Term::op(acc, Term::Var(v)))
    }

    fn fmt_inner(&self, f: &mut fmt::Formatter<'_>, outer: bool) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::Node(l, r) => {
                if !outer {
                    f.write_str("(")?;
                }
                l.fmt_inner(f, false)?;
                f.write_str("*")?;
                r.fmt_inner(f, false)?;
                if !outer {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Prints the text grammar with the outer parentheses dropped, e.g.
/// `x1*(x2*x3)`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_inner(f, true)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Term {
    type Err = ParseError;

    /// `term := var | "(" term "*" term ")"`, `var := "x" [1-9][0-9]*`; a
    /// bare `x` reads as `x1` and the outermost parentheses may be omitted.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = TermParser {
            src: s.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let first = p.term()?;
        p.skip_ws();
        let t = if p.peek() == Some(b'*') {
            p.pos += 1;
            let second = p.term()?;
            Term::op(first, second)
        } else {
            first
        };
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(ParseError::Trailing(p.pos));
        }
        Ok(t)
    }
}

struct TermParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TermParser<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8, what: &'static str) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(found) if found == c => {
                self.pos += 1;
                Ok(())
            }
            Some(found) => Err(ParseError::Unexpected {
                found: found as char,
                offset: self.pos,
                expected: what,
            }),
            None => Err(ParseError::UnexpectedEnd(what)),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let l = self.term()?;
                self.expect(b'*', "'*'")?;
                let r = self.term()?;
                self.expect(b')', "')'")?;
                Ok(Term::op(l, r))
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                if digits.is_empty() {
                    return Ok(Term::var(1));
                }
                if digits.starts_with('0') {
                    return Err(ParseError::BadVariable(format!("x{digits}")));
                }
                digits
                    .parse::<u64>()
                    .map(Term::var)
                    .map_err(|_| ParseError::BadVariable(format!("x{digits}")))
            }
            Some(found) => Err(ParseError::Unexpected {
                found: found as char,
                offset: self.pos,
                expected: "'(' or a variable",
            }),
            None => Err(ParseError::UnexpectedEnd("term")),
        }
    }
}

/// All tree shapes with exactly `size` inner nodes, every leaf `x1`, in a
/// fixed order (left subtree size ascending, then recursively).
pub fn shapes(size: usize) -> Vec<Term> {
    let mut table: Vec<Vec<Term>> = vec![vec![Term::var(1)]];
    for n in 1..=size {
        let mut level = Vec::new();
        for left in 0..n {
            let right = n - 1 - left;
            for l in &table[left] {
                for r in &table[right] {
                    level.push(Term::op(l.clone(), r.clone()));
                }
            }
        }
        table.push(level);
    }
    table.swap_remove(size)
}

/// All shapes with at most `max_size` inner nodes, smallest first.
pub fn shapes_up_to(max_size: usize) -> Vec<Term> {
    (0..=max_size).flat_map(shapes).collect()
}

/// `shape` with leaves relabelled `x1, x2, …` from left to right. Any
/// identity between actions on this labelling holds for every labelling.
pub fn distinct_labelling(shape: &Term) -> Term {
    fn go(t: &Term, next: &mut u64) -> Term {
        match t.children() {
            None => {
                *next += 1;
                Term::var(*next)
            }
            Some((l, r)) => {
                let l = go(l, next);
                Term::op(l, go(r, next))
            }
        }
    }
    go(shape, &mut 0)
}

/// Every labelling of `shape`'s leaves with variables `x1..=x_vars`.
pub fn labellings(shape: &Term, vars: u64) -> Vec<Term> {
    match shape {
        Term::Var(_) => (1..=vars).map(Term::var).collect(),
        Term::Node(l, r) => {
            let ls = labellings(l, vars);
            let rs = labellings(r, vars);
            let mut out = Vec::with_capacity(ls.len() * rs.len());
            for a in &ls {
                for b in &rs {
                    out.push(Term::op(a.clone(), b.clone()));
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    fn a(s: &str) -> Address {
        s.parse().unwrap()
    }

    #[test]
    fn subterm_lookup() {
        let x = t("x1*(x2*x3)");
        assert_eq!(x.subterm(&a("10")), Some(&Term::var(2)));
        assert_eq!(x.subterm(&Address::ROOT), Some(&x));
        assert_eq!(x.subterm(&a("00")), None);
    }

    #[test]
    fn apply_ld_examples() {
        let x = t("x*(x*(x*x))");
        assert_eq!(x.apply_ld(&Address::ROOT), Some(t("(x*x)*(x*(x*x))")));
        assert_eq!(t("x*x").apply_ld(&Address::ROOT), None);
        let lhs = x.act_word(&[a(""), a("1"), a("")]);
        let rhs = x.act_word(&[a("1"), a(""), a("1"), a("0")]);
        assert!(lhs.is_some());
        assert_eq!(lhs, rhs);
        assert_eq!(x.act_word(&[]), Some(x.clone()));
    }

    #[test]
    fn dist_and_phi() {
        let x1 = Term::var(1);
        assert_eq!(t("x5*x6").dist(&x1), t("(x5*x6)*x1"));
        assert_eq!(x1.dist(&t("x2*x3")), t("(x1*x2)*(x1*x3)"));
        // x1 ⊙ (x2 ⊙ (x3 ∘ x4)), unfolded by hand:
        // x2 ⊙ (x3∘x4) = (x2∘x3)∘(x2∘x4), then x1 distributes over both leaves
        // of each factor.
        let inner = Term::var(2).dist(&t("x3*x4"));
        assert_eq!(
            x1.dist(&inner),
            t("((x1*x2)*(x1*x3))*((x1*x2)*(x1*x4))")
        );
        assert_eq!(x1.phi(), x1);
        assert_eq!(
            t("x1*(x2*(x3*x4))").phi().leaves(),
            vec![1, 2, 1, 3, 1, 2, 1, 4]
        );
    }

    #[test]
    fn right_height_and_pi_hat() {
        assert_eq!(Term::var(1).right_height(), 0);
        assert_eq!(t("x*(x*(x*x))").right_height(), 3);
        assert_eq!(t("x1*(x2*x3)").pi_hat(), Some(vec![1, 2]));
        assert_eq!(Term::var(4).pi_hat(), None);
        assert_eq!(t("(x*x)*((x*x)*x)").pi_hat(), Some(vec![1, 1]));
    }

    #[test]
    fn associativity_action() {
        assert_eq!(
            t("x1*(x2*x3)").apply_assoc(&Address::ROOT),
            Some(t("(x1*x2)*x3"))
        );
        assert_eq!(t("x1*(x2*(x3*x4))").left_comb(), t("((x1*x2)*x3)*x4"));
        assert_eq!(t("(x1*x2)*x3").apply_assoc(&Address::ROOT), None);
    }

    #[test]
    fn address_orders() {
        assert!(a("").cmp_tree_order(&a("0")).is_gt());
        assert!(a("0").cmp_tree_order(&a("1")).is_gt());
        assert!(a("01").cmp_tree_order(&a("1")).is_gt());
        assert!(a("1").cmp_tree_order(&a("11")).is_gt());
        assert!(a("1") < a("00"));
        assert!(a("0").is_parallel(&a("1")));
        assert!(a("1").is_prefix_of(&a("10")));
        assert_eq!(a("1011").strip_prefix(&a("10")), Some(a("11")));
        assert_eq!(a("0").concat(&a("11")), a("011"));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(t("x"), Term::var(1));
        assert_eq!(t("(x1*x2)"), t("x1*x2"));
        assert_eq!(t("x12").to_string(), "x12");
        assert_eq!(t("(x1*x2)*(x3*x4)").to_string(), "(x1*x2)*(x3*x4)");
        assert!("x1*x2*x3".parse::<Term>().is_err());
        assert!("x0".parse::<Term>().is_err());
        assert!("(x1*x2".parse::<Term>().is_err());
        assert_eq!("".parse::<Address>(), Ok(Address::ROOT));
        assert!("012".parse::<Address>().is_err());
    }

    #[test]
    fn catalan_counts() {
        let counts: Vec<usize> = (0..=7).map(|n| shapes(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14, 42, 132, 429]);
        assert_eq!(labellings(&t("x*x"), 2).len(), 4);
    }

    #[test]
    fn ld_preserves_right_height_and_grows() {
        for s in shapes_up_to(6) {
            for r in s.ld_redexes() {
                let e = s.apply_ld(&r).unwrap();
                assert_eq!(e.right_height(), s.right_height());
                assert!(e.size() > s.size());
            }
        }
    }
}
