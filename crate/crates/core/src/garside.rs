//! Locally left-Garside machinery over any instance: heads, greedy normal
//! forms, the two domino products, and the checks behind regularity.

use std::fmt;
use std::hash::Hash;

use thiserror::Error;

use crate::reversing::{self, Atom, Budget, Complement, ReversingError, Word};

/// Objects, a partial action of words on them, a Garside element at every
/// object, and the complement presenting the monoid.
pub trait GarsideInstance: Sync {
    type Object: Clone + Eq + Hash + fmt::Debug + fmt::Display + Send + Sync;
    type Atom: Atom;
    type Complement: Complement<Self::Atom>;

    fn complement(&self) -> &Self::Complement;

    /// Atoms acting on `x`; every left-divisor of a word acting on `x`
    /// starts with one of them.
    fn atoms(&self, x: &Self::Object) -> Vec<Self::Atom>;

    fn act(&self, x: &Self::Object, w: &[Self::Atom]) -> Option<Self::Object>;

    fn delta(&self, x: &Self::Object) -> Word<Self::Atom>;

    /// Size estimate of `Δ(x)` and `φ(x)`, computed without building them;
    /// `Δ(x)` is only materialized when this stays within the budget.
    fn delta_cost(&self, x: &Self::Object) -> u64;

    fn budget(&self) -> Budget;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GarsideError {
    #[error("word {word} does not act on {object}")]
    Undefined { object: String, word: String },
    #[error("{word} is not simple at {object}")]
    NotSimple { object: String, word: String },
    #[error(transparent)]
    Reversing(#[from] ReversingError),
}

type W<I> = Word<<I as GarsideInstance>::Atom>;

/// `Δ(x)`, or an exhaustion error when it is too large to build.
fn delta<I: GarsideInstance>(inst: &I, x: &I::Object) -> Result<W<I>, GarsideError> {
    let max = inst.budget().max_steps();
    if inst.delta_cost(x) > max {
        return Err(ReversingError::Exhausted(max).into());
    }
    Ok(inst.delta(x))
}

fn act<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    w: &[I::Atom],
) -> Result<I::Object, GarsideError> {
    inst.act(x, w).ok_or_else(|| GarsideError::Undefined {
        object: x.to_string(),
        word: Word(w.to_vec()).to_string(),
    })
}

/// Left-gcd of two words acting on `x`, candidates read off the object
/// reached by the common prefix.
pub fn gcd_at<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    u: &[I::Atom],
    v: &[I::Atom],
) -> Result<W<I>, GarsideError> {
    act(inst, x, u)?;
    act(inst, x, v)?;
    Ok(reversing::gcd(
        inst.complement(),
        u,
        v,
        |prefix| {
            inst.act(x, prefix)
                .map(|y| inst.atoms(&y))
                .unwrap_or_default()
        },
        inst.budget(),
    )?)
}

/// The first atom acting on `x` that left-divides both `u` and `v`, if any.
pub fn common_atom<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    u: &[I::Atom],
    v: &[I::Atom],
) -> Result<Option<I::Atom>, GarsideError> {
    act(inst, x, u)?;
    act(inst, x, v)?;
    if u.is_empty() || v.is_empty() {
        return Ok(None);
    }
    for a in inst.atoms(x) {
        let atom = [a];
        if divides(inst, &atom, u)? && divides(inst, &atom, v)? {
            let [a] = atom;
            return Ok(Some(a));
        }
    }
    Ok(None)
}

/// Whether `u` and `v` are left-coprime; cheaper than computing the gcd.
pub fn coprime_at<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    u: &[I::Atom],
    v: &[I::Atom],
) -> Result<bool, GarsideError> {
    Ok(common_atom(inst, x, u, v)?.is_none())
}

pub fn equal<I: GarsideInstance>(inst: &I, u: &[I::Atom], v: &[I::Atom]) -> Result<bool, GarsideError> {
    Ok(reversing::equal(inst.complement(), u, v, inst.budget())?)
}

pub fn divides<I: GarsideInstance>(inst: &I, u: &[I::Atom], v: &[I::Atom]) -> Result<bool, GarsideError> {
    Ok(reversing::divides(inst.complement(), u, v, inst.budget())?)
}

fn quotient<I: GarsideInstance>(inst: &I, u: &[I::Atom], v: &[I::Atom]) -> Result<W<I>, GarsideError> {
    Ok(reversing::quotient(inst.complement(), u, v, inst.budget())?)
}

/// The maximal simple left-divisor `gcd(a, Δ(x))`.
pub fn head<I: GarsideInstance>(inst: &I, x: &I::Object, a: &[I::Atom]) -> Result<W<I>, GarsideError> {
    gcd_at(inst, x, a, &delta(inst, x)?)
}

/// Checks that `f` left-divides `Δ(x)` and acts on `x`.
pub fn is_simple<I: GarsideInstance>(inst: &I, x: &I::Object, f: &[I::Atom]) -> Result<bool, GarsideError> {
    Ok(inst.act(x, f).is_some() && divides(inst, f, &delta(inst, x)?)?)
}

fn require_simple<I: GarsideInstance>(inst: &I, x: &I::Object, f: &[I::Atom]) -> Result<(), GarsideError> {
    if is_simple(inst, x, f)? {
        Ok(())
    } else {
        Err(GarsideError::NotSimple {
            object: x.to_string(),
            word: Word(f.to_vec()).to_string(),
        })
    }
}

/// A greedy decomposition `(f_1, …, f_d)` with the objects it passes
/// through: `objects[i]` is the source of `factors[i]` and the last entry is
/// the final target.
#[derive(Clone, PartialEq, Eq)]
pub struct NormalForm<O, A> {
    pub factors: Vec<Word<A>>,
    pub objects: Vec<O>,
}

impl<O: Clone, A: Clone> NormalForm<O, A> {
    pub fn base(&self) -> &O {
        &self.objects[0]
    }

    pub fn target(&self) -> &O {
        self.objects.last().expect("at least the base object")
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn product(&self) -> Word<A> {
        Word(self.factors.iter().flat_map(|f| f.iter().cloned()).collect())
    }
}

impl<O, A: Atom> fmt::Display for NormalForm<O, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, factor) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{factor}")?;
        }
        write!(f, ")")
    }
}

impl<O: fmt::Display, A: Atom> fmt::Debug for NormalForm<O, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} from {}", self.objects[0])
    }
}

pub type Nf<I> = NormalForm<<I as GarsideInstance>::Object, <I as GarsideInstance>::Atom>;

/// Peels heads off `a` from the left until nothing remains.
pub fn normal_form<I: GarsideInstance>(inst: &I, x: &I::Object, a: &[I::Atom]) -> Result<Nf<I>, GarsideError> {
    act(inst, x, a)?;
    let mut factors = Vec::new();
    let mut objects = vec![x.clone()];
    let mut rest = Word(a.to_vec());
    let mut here = x.clone();
    while !rest.is_empty() {
        let h = head(inst, &here, &rest)?;
        assert!(!h.is_empty(), "a nonempty word acting on {here} has a nonempty head");
        rest = quotient(inst, &h, &rest)?;
        here = act(inst, &here, &h)?;
        factors.push(h);
        objects.push(here.clone());
    }
    Ok(NormalForm { factors, objects })
}

/// Builds a form from explicit factors, caching the objects; no greediness
/// is checked.
pub fn from_factors<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    factors: Vec<W<I>>,
) -> Result<Nf<I>, GarsideError> {
    let mut objects = vec![x.clone()];
    for f in &factors {
        let next = act(inst, objects.last().unwrap(), f)?;
        objects.push(next);
    }
    Ok(NormalForm { factors, objects })
}

/// Entrywise equality of two forms from the same base.
pub fn nf_equal<I: GarsideInstance>(inst: &I, a: &Nf<I>, b: &Nf<I>) -> Result<bool, GarsideError> {
    if a.len() != b.len() {
        return Ok(false);
    }
    for (f, g) in a.factors.iter().zip(&b.factors) {
        if !equal(inst, f, g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f1*` and `f2` are left-coprime.
pub fn is_normal_pair<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    f1: &[I::Atom],
    f2: &[I::Atom],
) -> Result<bool, GarsideError> {
    let star1 = star(inst, x, f1)?;
    let y = act(inst, x, f1)?;
    coprime_at(inst, &y, &star1, f2)
}

/// The head-based reading of normality: `head(f1·f2) = f1`.
pub fn is_normal_pair_by_head<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    f1: &[I::Atom],
    f2: &[I::Atom],
) -> Result<bool, GarsideError> {
    let product = Word(f1.to_vec()).concat(&Word(f2.to_vec()));
    equal(inst, &head(inst, x, &product)?, f1)
}

/// Every adjacent pair is normal and every factor is nonempty and simple.
pub fn local_check<I: GarsideInstance>(inst: &I, nf: &Nf<I>) -> Result<bool, GarsideError> {
    for (i, f) in nf.factors.iter().enumerate() {
        if f.is_empty() || !is_simple(inst, &nf.objects[i], f)? {
            return Ok(false);
        }
    }
    for i in 1..nf.len() {
        if !is_normal_pair(inst, &nf.objects[i - 1], &nf.factors[i - 1], &nf.factors[i])? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn trim<I: GarsideInstance>(inst: &I, x: &I::Object, factors: Vec<W<I>>) -> Result<Nf<I>, GarsideError> {
    from_factors(inst, x, factors.into_iter().filter(|f| !f.is_empty()).collect())
}

/// Normal form of `g·nf` by the left-to-right domino pass: `g_0 = g`,
/// `f'_i = head(g_(i-1)·f_i)`, `g_i = f'_i \ g_(i-1)·f_i`, result
/// `(f'_1, …, f'_d, g_d)`.
pub fn left_multiply_nf<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    g: &[I::Atom],
    nf: &Nf<I>,
) -> Result<Nf<I>, GarsideError> {
    require_simple(inst, x, g)?;
    if act(inst, x, g)? != *nf.base() {
        return Err(GarsideError::Undefined {
            object: x.to_string(),
            word: format!("{} followed by a form based elsewhere", Word(g.to_vec())),
        });
    }
    let mut out = Vec::with_capacity(nf.len() + 1);
    let mut carry = Word(g.to_vec());
    let mut here = x.clone();
    for f in &nf.factors {
        let block = carry.concat(f);
        let h = head(inst, &here, &block)?;
        carry = quotient(inst, &h, &block)?;
        here = act(inst, &here, &h)?;
        out.push(h);
    }
    out.push(carry);
    trim(inst, x, out)
}

/// Outcome of the right domino pass.
#[derive(Clone)]
pub enum RightProduct<O, A> {
    /// The domino output is the normal form of the product.
    Normal(NormalForm<O, A>),
    /// The domino output disagrees with the normal form of the product: the
    /// instance is not regular at this input.
    Violation {
        domino: NormalForm<O, A>,
        expected: NormalForm<O, A>,
    },
}

impl<O: fmt::Display, A: Atom> fmt::Debug for RightProduct<O, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RightProduct::Normal(nf) => write!(f, "Normal({nf:?})"),
            RightProduct::Violation { domino, expected } => {
                write!(f, "Violation {{ domino: {domino:?}, expected: {expected:?} }}")
            }
        }
    }
}

/// Normal form of `nf·g` by the right-to-left domino pass:
/// `g_d = g`, `f_i·g_i = g_(i-1)·f'_i` with `g_(i-1)` the head, result
/// `(g_0, f'_1, …, f'_d)`, cross-checked against [`normal_form`].
pub fn right_multiply_nf<I: GarsideInstance>(
    inst: &I,
    nf: &Nf<I>,
    g: &[I::Atom],
) -> Result<RightProduct<I::Object, I::Atom>, GarsideError> {
    require_simple(inst, nf.target(), g)?;
    let d = nf.len();
    let mut primes = vec![Word::empty(); d];
    let mut carry = Word(g.to_vec());
    for i in (0..d).rev() {
        let block = nf.factors[i].concat(&carry);
        let h = head(inst, &nf.objects[i], &block)?;
        primes[i] = quotient(inst, &h, &block)?;
        carry = h;
    }
    let mut factors = vec![carry];
    factors.extend(primes);
    let domino = trim(inst, nf.base(), factors)?;
    let expected = normal_form(inst, nf.base(), &nf.product().concat(&Word(g.to_vec())))?;
    Ok(if nf_equal(inst, &domino, &expected)? {
        RightProduct::Normal(domino)
    } else {
        RightProduct::Violation { domino, expected }
    })
}

/// `f*` with `f·f* = Δ(x)`.
pub fn star<I: GarsideInstance>(inst: &I, x: &I::Object, f: &[I::Atom]) -> Result<W<I>, GarsideError> {
    require_simple(inst, x, f)?;
    quotient(inst, f, &delta(inst, x)?)
}

/// `φ(f)` with `Δ(x)·φ(f) = f·Δ(x•f)`.
pub fn phi_op<I: GarsideInstance>(inst: &I, x: &I::Object, f: &[I::Atom]) -> Result<W<I>, GarsideError> {
    let y = act(inst, x, f)?;
    let rhs = Word(f.to_vec()).concat(&delta(inst, &y)?);
    quotient(inst, &delta(inst, x)?, &rhs)
}

/// `φ(x) = x•Δ(x)`.
pub fn phi_object<I: GarsideInstance>(inst: &I, x: &I::Object) -> Result<I::Object, GarsideError> {
    act(inst, x, &delta(inst, x)?)
}

/// For a normal pair `(f1, f2)` at `x`: `(φ(f1), φ(f2))` is normal at `φ(x)`.
pub fn regularity_pair_check<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    f1: &[I::Atom],
    f2: &[I::Atom],
) -> Result<bool, GarsideError> {
    let y = phi_object(inst, x)?;
    let p1 = phi_op(inst, x, f1)?;
    let p2 = phi_op(inst, &act(inst, x, f1)?, f2)?;
    is_normal_pair(inst, &y, &p1, &p2)
}

/// `gcd(φ(a), φ(b)) = φ(gcd(a, b))` for simples `a`, `b` at `x`.
pub fn gcd_preservation_check<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    a: &[I::Atom],
    b: &[I::Atom],
) -> Result<bool, GarsideError> {
    let y = phi_object(inst, x)?;
    let lhs = gcd_at(inst, &y, &phi_op(inst, x, a)?, &phi_op(inst, x, b)?)?;
    let rhs = phi_op(inst, x, &gcd_at(inst, x, a, b)?)?;
    equal(inst, &lhs, &rhs)
}

/// Corollary of gcd preservation: left-coprime simples have left-coprime
/// images.
pub fn coprime_preservation_check<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    a: &[I::Atom],
    b: &[I::Atom],
) -> Result<bool, GarsideError> {
    if !coprime_at(inst, x, a, b)? {
        return Ok(true);
    }
    let y = phi_object(inst, x)?;
    coprime_at(inst, &y, &phi_op(inst, x, a)?, &phi_op(inst, x, b)?)
}

/// `φ(f*) = φ(f)*` for a simple `f` at `x`.
pub fn dual_check<I: GarsideInstance>(inst: &I, x: &I::Object, f: &[I::Atom]) -> Result<bool, GarsideError> {
    let y = act(inst, x, f)?;
    let lhs = phi_op(inst, &y, &star(inst, x, f)?)?;
    let rhs = star(inst, &phi_object(inst, x)?, &phi_op(inst, x, f)?)?;
    equal(inst, &lhs, &rhs)
}

/// A product of `d` simples divides `Δ(x)·Δ(φ(x))·…·Δ(φ^(d-1)(x))`.
pub fn lcm_bound_check<I: GarsideInstance>(
    inst: &I,
    x: &I::Object,
    factors: &[W<I>],
) -> Result<bool, GarsideError> {
    let product: Vec<I::Atom> = factors.iter().flat_map(|f| f.iter().cloned()).collect();
    act(inst, x, &product)?;
    let mut bound = Vec::new();
    let mut here = x.clone();
    for i in 0..factors.len() {
        let d = delta(inst, &here)?;
        if i + 1 < factors.len() {
            here = act(inst, &here, &d)?;
        }
        bound.extend(d.into_vec());
    }
    divides(inst, &product, &bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{braid, BraidInstance, Sigma};
    use crate::mld::{self, ld_word, LdInstance};
    use crate::term::Term;
    use proptest::prelude::*;

    const LD: LdInstance = LdInstance { budget: BUDGET };
    const BR: BraidInstance = BraidInstance { budget: BUDGET };
    const BUDGET: Budget = Budget::DEFAULT;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    #[test]
    fn head_of_delta_is_delta() {
        for s in ["x*x", "x*(x*x)", "x*(x*(x*x))", "(x*x)*(x*x)", "x*((x*x)*x)"] {
            let x = t(s);
            let d = mld::delta_big(&x);
            assert!(equal(&LD, &head(&LD, &x, &d).unwrap(), &d).unwrap(), "{s}");
        }
        for n in 1..6 {
            let d = crate::braid::delta_n(n);
            assert!(equal(&BR, &head(&BR, &n, &d).unwrap(), &d).unwrap());
        }
    }

    #[test]
    fn ld_heads_and_normal_forms() {
        let x = t("x*(x*(x*x))");
        let w = ld_word(&["", "1", "", "0", "1"]);
        let h = head(&LD, &x, &w).unwrap();
        assert!(equal(&LD, &h, &ld_word(&["", "1", ""])).unwrap());
        let nf = normal_form(&LD, &x, &w).unwrap();
        assert_eq!(nf.to_string(), "(D: D:1 D: | D:0 D:1)");
        assert!(local_check(&LD, &nf).unwrap());
        // D_1 D_1 does not divide Δ_t: the head stops after one letter.
        assert_eq!(normal_form(&LD, &x, &ld_word(&["1", "1"])).unwrap().len(), 2);
    }

    #[test]
    fn braid_heads_and_normal_forms() {
        assert_eq!(head(&BR, &3, &braid(&[1, 1])).unwrap(), braid(&[1]));
        let nf = normal_form(&BR, &3, &braid(&[1, 2, 1, 1])).unwrap();
        assert_eq!(nf.to_string(), "(s1 s2 s1 | s1)");
        let nf = normal_form(&BR, &4, &braid(&[1, 3, 2])).unwrap();
        assert_eq!(nf.len(), 1);
        assert!(is_simple(&BR, &3, &braid(&[2, 1])).unwrap());
        assert!(!is_simple(&BR, &3, &braid(&[2, 2])).unwrap());
    }

    #[test]
    fn gcd_and_normality() {
        let x = t("x*(x*(x*x))");
        assert!(gcd_at(&LD, &x, &ld_word(&[""]), &ld_word(&["1"])).unwrap().is_empty());
        assert_eq!(gcd_at(&BR, &3, &braid(&[1, 2]), &braid(&[2, 1, 2])).unwrap().len(), 2);
        assert!(is_normal_pair(&BR, &3, &braid(&[1, 2, 1]), &braid(&[1])).unwrap());
        assert!(!is_normal_pair(&BR, &3, &braid(&[1]), &braid(&[2, 1])).unwrap());
        assert_eq!(
            is_normal_pair(&BR, &3, &braid(&[1]), &braid(&[1])).unwrap(),
            is_normal_pair_by_head(&BR, &3, &braid(&[1]), &braid(&[1])).unwrap()
        );
    }

    #[test]
    fn phi_on_braids_is_conjugation_by_delta() {
        // φ(σ_i) = σ_(n-i) on n strands.
        assert_eq!(phi_op(&BR, &4, &braid(&[1])).unwrap(), braid(&[3]));
        assert!(regularity_pair_check(&BR, &3, &braid(&[1, 2]), &braid(&[2])).unwrap());
    }

    #[test]
    fn delta_guard_reports_exhaustion() {
        let tiny = LdInstance { budget: Budget::new(4).unwrap() };
        let x = t("((x*x)*(x*x))*((x*x)*(x*x))");
        assert!(matches!(
            head(&tiny, &x, &ld_word(&[""])),
            Err(GarsideError::Reversing(ReversingError::Exhausted(_)))
        ));
    }

    fn braid_word(n: usize, max_len: usize) -> impl Strategy<Value = Word<Sigma>> {
        prop::collection::vec(1..n as u32, 0..=max_len).prop_map(|v| braid(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn braid_normal_form_invariants(w in braid_word(4, 10), g in braid_word(4, 3)) {
            let nf = normal_form(&BR, &4, &w).unwrap();
            prop_assert!(equal(&BR, &nf.product(), &w).unwrap());
            prop_assert!(local_check(&BR, &nf).unwrap());
            let again = normal_form(&BR, &4, &nf.product()).unwrap();
            prop_assert!(nf_equal(&BR, &nf, &again).unwrap());
            if is_simple(&BR, &4, &g).unwrap() {
                let gw = g.concat(&w);
                let domino = left_multiply_nf(&BR, &4, &g, &nf).unwrap();
                prop_assert!(nf_equal(&BR, &domino, &normal_form(&BR, &4, &gw).unwrap()).unwrap());
            }
        }

        #[test]
        fn braid_head_is_greatest_simple_divisor(w in braid_word(4, 8), f in braid_word(4, 4)) {
            let h = head(&BR, &4, &w).unwrap();
            prop_assert!(divides(&BR, &h, &w).unwrap());
            prop_assert!(is_simple(&BR, &4, &h).unwrap());
            if is_simple(&BR, &4, &f).unwrap() && divides(&BR, &f, &w).unwrap() {
                prop_assert!(divides(&BR, &f, &h).unwrap());
            }
        }

        #[test]
        fn ld_normal_form_invariants(shape in 0usize..14, picks in prop::collection::vec(0usize..8, 0..5)) {
            let x = crate::term::shapes_up_to(4)[shape].clone();
            let mut here = x.clone();
            let mut w = Vec::new();
            for p in picks {
                let atoms = mld::enabled_atoms(&here);
                if atoms.is_empty() {
                    break;
                }
                let a = atoms[p % atoms.len()].clone();
                here = here.apply_ld(&a).unwrap();
                w.push(a);
            }
            let nf = normal_form(&LD, &x, &w).unwrap();
            prop_assert!(equal(&LD, &nf.product(), &w).unwrap());
            prop_assert_eq!(nf.target(), &here);
            prop_assert!(local_check(&LD, &nf).unwrap());
        }
    }
}
