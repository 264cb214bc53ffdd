//! Positive braids: the complement of the braid relations, the Garside
//! elements `Δ_n`, permutation braids, actions on sequences and on
//! LD-systems, and the projection `π` from `M_LD`.

use std::fmt;

use thiserror::Error;

use crate::garside::GarsideInstance;
use crate::mld::{self, LdComplement};
use crate::reversing::{self, Atom, Budget, Complement, ReversingError, Word};
use crate::term::{Address, ParseError, Term};

/// The generator `σ_i`, `i ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sigma(pub u32);

impl Sigma {
    pub fn new(i: u32) -> Sigma {
        assert!(i >= 1, "braid generators start at σ1");
        Sigma(i)
    }

    pub fn index(&self) -> u32 {
        self.0
    }
}

impl Atom for Sigma {
    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }

    fn parse_atom(s: &str) -> Result<Self, ParseError> {
        let digits = s
            .strip_prefix('s')
            .ok_or_else(|| ParseError::BadAtom(s.to_string()))?;
        match digits.parse::<u32>() {
            Ok(i) if i >= 1 && !digits.starts_with('0') && !digits.starts_with('+') => Ok(Sigma(i)),
            _ => Err(ParseError::BadAtom(s.to_string())),
        }
    }
}

pub type BraidWord = Word<Sigma>;

/// `braid(&[1, 2, 1])` is `σ1 σ2 σ1`.
pub fn braid(indices: &[u32]) -> BraidWord {
    indices.iter().map(|&i| Sigma::new(i)).collect()
}

/// The complement of the positive braid presentation.
#[derive(Debug, Clone, Copy, Default)]
pub struct BraidComplement;

impl BraidComplement {
    pub fn entry(a: Sigma, b: Sigma) -> BraidWord {
        match a.0.abs_diff(b.0) {
            0 => Word::empty(),
            1 => Word(vec![b, a]),
            _ => Word::atom(b),
        }
    }
}

impl Complement<Sigma> for BraidComplement {
    fn complement(&self, a: &Sigma, b: &Sigma) -> Option<BraidWord> {
        Some(BraidComplement::entry(*a, *b))
    }
}

/// `π`: `D_(1^i) ↦ σ_(i+1)`, every other generator is dropped.
pub fn pi(w: &[Address]) -> BraidWord {
    w.iter()
        .filter(|a| a.bits().all(|b| b))
        .map(|a| Sigma(a.len() as u32 + 1))
        .collect()
}

/// `Δ_n = π(Δ_t)` for the right comb `t` of right height `n`.
pub fn delta_n(n: usize) -> BraidWord {
    pi(&mld::delta_big(&Term::right_comb(n)))
}

/// Every index is below `n` (the word lives in `B_n⁺`).
pub fn in_strands(w: &[Sigma], n: usize) -> bool {
    w.iter().all(|s| (s.0 as usize) < n)
}

/// `w ⪯ Δ_n`.
pub fn is_simple_braid(w: &[Sigma], n: usize, budget: Budget) -> Result<bool, ReversingError> {
    Ok(in_strands(w, n) && reversing::divides(&BraidComplement, w, &delta_n(n), budget)?)
}

/// Crossing criterion: no two strands cross twice. `None` if an index
/// exceeds the strand count.
pub fn crosses_at_most_once(w: &[Sigma], n: usize) -> Option<bool> {
    let mut at: Vec<usize> = (0..n).collect();
    let mut crossed = vec![false; n * n];
    for s in w {
        let i = s.0 as usize;
        if i >= n {
            return None;
        }
        let (a, b) = (at[i - 1], at[i]);
        let key = a.min(b) * n + a.max(b);
        if crossed[key] {
            return Some(false);
        }
        crossed[key] = true;
        at.swap(i - 1, i);
    }
    Some(true)
}

/// A permutation of `{1..n}` as the sequence of images.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation((1..=n).collect())
    }

    pub fn is_valid(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        self.0.iter().all(|&p| {
            p >= 1 && p <= seen.len() && !std::mem::replace(&mut seen[p - 1], true)
        })
    }

    /// The permutation induced by a braid: entry `k` is the strand that ends
    /// at position `k`.
    pub fn of_braid(w: &[Sigma], n: usize) -> Option<Permutation> {
        let mut at = Permutation::identity(n).0;
        for s in w {
            let i = s.0 as usize;
            if i >= n {
                return None;
            }
            at.swap(i - 1, i);
        }
        Some(Permutation(at))
    }

    /// The permutation braid of `self`: each pair of strands crosses at most
    /// once, read off by bubble sort.
    pub fn braid(&self) -> BraidWord {
        let mut target = self.0.clone();
        let mut out = Vec::new();
        // Sort `target` back to the identity, recording swaps; the recorded
        // word reversed realizes the permutation.
        loop {
            let Some(i) = (1..target.len()).find(|&i| target[i - 1] > target[i]) else {
                break;
            };
            target.swap(i - 1, i);
            out.push(Sigma(i as u32));
        }
        out.reverse();
        Word(out)
    }
}

/// The object `n` acted on by `w ∈ B_n⁺`.
pub fn act_nat(n: usize, w: &[Sigma]) -> Option<usize> {
    in_strands(w, n).then_some(n)
}

/// `σ_i` swaps entries `i` and `i+1`.
pub fn act_seq<T: Clone>(s: &[T], w: &[Sigma]) -> Option<Vec<T>> {
    let mut out = s.to_vec();
    for g in w {
        let i = g.0 as usize;
        if i >= out.len() {
            return None;
        }
        out.swap(i - 1, i);
    }
    Some(out)
}

/// A set with a binary operation meant to satisfy `x(yz) = (xy)(xz)`.
pub trait LdSystem {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn op(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
}

/// `σ_i: (…, x_i, x_(i+1), …) ↦ (…, x_i·x_(i+1), x_i, …)`.
pub fn act_ld<S: LdSystem>(sys: &S, s: &[S::Elem], w: &[Sigma]) -> Option<Vec<S::Elem>> {
    let mut out = s.to_vec();
    for g in w {
        let i = g.0 as usize;
        if i >= out.len() {
            return None;
        }
        let product = sys.op(&out[i - 1], &out[i]);
        out[i] = out[i - 1].clone();
        out[i - 1] = product;
    }
    Some(out)
}

/// `x·(y·z) = (x·y)·(x·z)` on one triple.
pub fn ld_law_holds<S: LdSystem>(sys: &S, x: &S::Elem, y: &S::Elem, z: &S::Elem) -> bool {
    sys.op(x, &sys.op(y, z)) == sys.op(&sys.op(x, y), &sys.op(x, z))
}

/// `(ℕ, x·y = y)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct RightProjection;

impl LdSystem for RightProjection {
    type Elem = u64;

    fn op(&self, _x: &u64, y: &u64) -> u64 {
        *y
    }
}

/// The Laver table on `{1, …, 2^k}`: `p·1 = p+1 mod 2^k`,
/// `p·(q+1) = (p·q)·(p+1)`.
#[derive(Debug, Clone)]
pub struct LaverTable {
    size: usize,
    rows: Vec<Vec<usize>>,
}

impl LaverTable {
    pub fn new(k: u32) -> LaverTable {
        assert!(k <= 12, "Laver tables are tabulated up to 2^12");
        let size = 1usize << k;
        let mut rows = vec![vec![0usize; size + 1]; size + 1];
        for q in 1..=size {
            rows[size][q] = q;
        }
        for p in (1..size).rev() {
            rows[p][1] = p + 1;
            for q in 1..size {
                let pq = rows[p][q];
                rows[p][q + 1] = rows[pq][p + 1];
            }
        }
        LaverTable { size, rows }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        1..=self.size
    }
}

impl LdSystem for LaverTable {
    type Elem = usize;

    fn op(&self, x: &usize, y: &usize) -> usize {
        self.rows[*x][*y]
    }
}

/// A signed braid word, freely reduced; `±i` stands for `σ_i^(±1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SignedBraid(pub Vec<i32>);

impl SignedBraid {
    pub fn generator(i: i32) -> SignedBraid {
        SignedBraid(vec![i])
    }

    fn reduced(letters: impl IntoIterator<Item = i32>) -> SignedBraid {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        SignedBraid(out)
    }

    pub fn inverse(&self) -> SignedBraid {
        SignedBraid(self.0.iter().rev().map(|l| -l).collect())
    }

    /// `σ_i ↦ σ_(i+1)`.
    pub fn shift(&self) -> SignedBraid {
        SignedBraid(self.0.iter().map(|&l| l + l.signum()).collect())
    }
}

impl fmt::Display for SignedBraid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if *l > 0 {
                write!(f, "s{l}")?;
            } else {
                write!(f, "s{}^-1", -l)?;
            }
        }
        Ok(())
    }
}

/// Braids with `x·y = x·sh(y)·σ1·sh(x)⁻¹`, on freely reduced words. Only
/// free reduction is performed, so equality of elements is not decided.
#[derive(Debug, Clone, Copy, Default)]
pub struct BraidExponentiation;

impl LdSystem for BraidExponentiation {
    type Elem = SignedBraid;

    fn op(&self, x: &SignedBraid, y: &SignedBraid) -> SignedBraid {
        SignedBraid::reduced(
            x.0.iter()
                .copied()
                .chain(y.shift().0)
                .chain([1])
                .chain(x.shift().inverse().0),
        )
    }
}

/// `eval_S(t)` with leaves `x_p ↦ assign(p)`.
pub fn eval_term<S: LdSystem>(sys: &S, assign: &impl Fn(u64) -> S::Elem, t: &Term) -> S::Elem {
    match t.children() {
        None => match t {
            Term::Var(p) => assign(*p),
            Term::Node(..) => unreachable!(),
        },
        Some((l, r)) => sys.op(&eval_term(sys, assign, l), &eval_term(sys, assign, r)),
    }
}

/// `π_S(t) = (eval(t/0), eval(t/10), …, eval(t/1^(n-1)0))`, `None` for a
/// variable.
pub fn project_pi_s<S: LdSystem>(
    sys: &S,
    assign: &impl Fn(u64) -> S::Elem,
    t: &Term,
) -> Option<Vec<S::Elem>> {
    if t.is_var() {
        return None;
    }
    let mut out = Vec::new();
    let mut here = t;
    while let Some((l, r)) = here.children() {
        out.push(eval_term(sys, assign, l));
        here = r;
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProjectionError {
    #[error("word {word} does not act on term {term}")]
    Undefined { term: String, word: String },
}

/// `(RH(t), π(a), RH(t))` for `a` acting on `t`.
pub fn project_term_morphism(t: &Term, a: &[Address]) -> Result<(usize, BraidWord, usize), ProjectionError> {
    if t.act_word(a).is_none() {
        return Err(ProjectionError::Undefined {
            term: t.to_string(),
            word: Word(a.to_vec()).to_string(),
        });
    }
    let n = t.right_height();
    let image = pi(a);
    debug_assert!(in_strands(&image, n.max(1)));
    Ok((n, image, n))
}

/// `π(C(D_α, D_β)) = C̄(π(D_α), π(D_β))` in `B⁺`.
pub fn check_proj_compat(alpha: &Address, beta: &Address, budget: Budget) -> Result<bool, ReversingError> {
    let lhs = pi(&LdComplement::entry(alpha, beta));
    let (rhs, _) = reversing::reverse(&BraidComplement, &pi(&[*alpha]), &pi(&[*beta]), budget)?;
    reversing::equal(&BraidComplement, &lhs, &rhs, budget)
}

/// `π(lcm(D_α, D_β)) = lcm(π(D_α), π(D_β))` in `B⁺`.
pub fn check_lcm_preservation(alpha: &Address, beta: &Address, budget: Budget) -> Result<bool, ReversingError> {
    let lhs = pi(&reversing::lcm(&LdComplement, &[*alpha], &[*beta], budget)?);
    let rhs = reversing::lcm(&BraidComplement, &pi(&[*alpha]), &pi(&[*beta]), budget)?;
    reversing::equal(&BraidComplement, &lhs, &rhs, budget)
}

/// `B_n⁺` as a one-object-per-`n` Garside instance.
#[derive(Debug, Clone, Copy, Default)]
pub struct BraidInstance {
    pub budget: Budget,
}

impl GarsideInstance for BraidInstance {
    type Object = usize;
    type Atom = Sigma;
    type Complement = BraidComplement;

    fn complement(&self) -> &BraidComplement {
        &BraidComplement
    }

    fn atoms(&self, n: &usize) -> Vec<Sigma> {
        (1..*n as u32).map(Sigma).collect()
    }

    fn act(&self, n: &usize, w: &[Sigma]) -> Option<usize> {
        act_nat(*n, w)
    }

    fn delta(&self, n: &usize) -> BraidWord {
        delta_n(*n)
    }

    fn delta_cost(&self, n: &usize) -> u64 {
        (*n as u64) * (n.saturating_sub(1) as u64) / 2
    }

    fn budget(&self) -> Budget {
        self.budget
    }
}
