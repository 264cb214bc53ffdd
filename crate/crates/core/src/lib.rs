//! Symbolic computation in locally left-Garside monoids: binary terms and
//! the self-distributivity monoid `M_LD`, positive braids, subword
//! reversing, greedy normal forms, and a verification harness.

pub mod braid;
pub mod garside;
pub mod mld;
pub mod reversing;
pub mod suites;
pub mod term;

pub use reversing::{Atom, Budget, Complement, ReversingError, Word};
pub use term::{Address, ParseError, Term};
