//! Elenchus: dialectical construction of material bases and NMMS proof
//! search over them.
//!
//! A respondent commits to and denies atomic propositions while an opponent
//! proposes tensions; every accepted tension becomes an atomic implication.
//! The resulting [`MaterialBase`] is then queried with [`prover::derivable`].

pub mod base;
pub mod dialectic;
pub mod fixtures;
pub mod formula;
pub mod opponent;
pub mod par;
pub mod prover;

pub use base::{load_base, save_base, AtomicImplication, BaseError, ContainmentMode, MaterialBase};
pub use dialectic::{extract_base, replay, DialecticError, DialecticalState, Session};
pub use formula::{parse_formula, parse_sequent, AtomId, Formula, ParseError, Sequent};
pub use prover::{derivable, Prover, ProverConfig, ProverError, QueryResult};
