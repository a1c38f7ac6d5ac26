//! Generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod dialogue;

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;

use elenchus_core::base::AtomicImplication;
use elenchus_core::formula::{AtomId, Formula, Sequent};
use elenchus_core::MaterialBase;

pub const ATOMS: [&str; 4] = ["a", "b", "c", "d"];

pub fn atom_ids(n: usize) -> Vec<AtomId> {
    ATOMS[..n]
        .iter()
        .map(|a| AtomId::new(*a).unwrap())
        .collect()
}

fn subset<R: Rng>(rng: &mut R, atoms: &[AtomId], max: usize) -> BTreeSet<AtomId> {
    let k = rng.random_range(0..=max);
    (0..k).map(|_| atoms.choose(rng).unwrap().clone()).collect()
}

/// A base over the first `n` atoms with up to `max_imps` random
/// implications. Sides may be empty.
pub fn random_base<R: Rng>(rng: &mut R, n: usize, max_imps: usize) -> MaterialBase {
    let atoms = atom_ids(n);
    let imps: Vec<(AtomicImplication, Option<String>)> = (0..rng.random_range(0..=max_imps))
        .map(|_| {
            (
                AtomicImplication::new(subset(rng, &atoms, 2), subset(rng, &atoms, 2)),
                None,
            )
        })
        .collect();
    MaterialBase::from_parts(atoms, imps).unwrap()
}

pub fn random_formula<R: Rng>(rng: &mut R, atoms: &[AtomId], depth: u32) -> Formula {
    if depth == 0 || rng.random_bool(0.35) {
        return Formula::Atom(atoms.choose(rng).unwrap().clone());
    }
    match rng.random_range(0..4) {
        0 => Formula::neg(random_formula(rng, atoms, depth - 1)),
        1 => Formula::and(
            random_formula(rng, atoms, depth - 1),
            random_formula(rng, atoms, depth - 1),
        ),
        2 => Formula::or(
            random_formula(rng, atoms, depth - 1),
            random_formula(rng, atoms, depth - 1),
        ),
        _ => Formula::imp(
            random_formula(rng, atoms, depth - 1),
            random_formula(rng, atoms, depth - 1),
        ),
    }
}

pub fn random_sequent<R: Rng>(rng: &mut R, atoms: &[AtomId], depth: u32) -> Sequent {
    let lhs: Vec<Formula> = (0..rng.random_range(0..=2))
        .map(|_| random_formula(rng, atoms, depth))
        .collect();
    let rhs: Vec<Formula> = (0..rng.random_range(0..=2))
        .map(|_| random_formula(rng, atoms, depth))
        .collect();
    Sequent::new(lhs, rhs)
}

pub fn random_atomic_sequent<R: Rng>(rng: &mut R, atoms: &[AtomId]) -> Sequent {
    Sequent::atomic(&subset(rng, atoms, 3), &subset(rng, atoms, 3))
}

/// Classical truth value under a valuation.
pub fn eval(f: &Formula, v: &BTreeMap<AtomId, bool>) -> bool {
    match f {
        Formula::Atom(a) => v[a],
        Formula::Neg(a) => !eval(a, v),
        Formula::And(a, b) => eval(a, v) && eval(b, v),
        Formula::Or(a, b) => eval(a, v) || eval(b, v),
        Formula::Imp(a, b) => !eval(a, v) || eval(b, v),
    }
}

/// Truth-table validity: every valuation making all of the antecedent true
/// makes some member of the succedent true.
pub fn classically_valid(s: &Sequent) -> bool {
    let atoms: Vec<AtomId> = s.atoms().into_iter().collect();
    (0u32..1 << atoms.len()).all(|bits| {
        let v: BTreeMap<AtomId, bool> = atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), bits & (1 << i) != 0))
            .collect();
        !s.antecedent.iter().all(|f| eval(f, &v)) || s.succedent.iter().any(|f| eval(f, &v))
    })
}

/// Atomic leaves of a full decomposition. Every rule is invertible, so the
/// order of decomposition does not matter and a sequent is derivable
/// exactly when all of these leaves are axioms. This decomposes succedent
/// formulas first, in reverse structural order, which is deliberately not
/// the order the prover uses.
pub fn atomic_leaves(s: &Sequent) -> Vec<(BTreeSet<AtomId>, BTreeSet<AtomId>)> {
    let mut out = Vec::new();
    let mut stack = vec![(s.antecedent.clone(), s.succedent.clone())];
    while let Some((mut lhs, mut rhs)) = stack.pop() {
        if let Some(f) = rhs.iter().rev().find(|f| !f.is_atom()).cloned() {
            rhs.remove(&f);
            match f {
                Formula::Neg(a) => {
                    lhs.insert(*a);
                    stack.push((lhs, rhs));
                }
                Formula::And(a, b) => {
                    let (mut r1, mut r2) = (rhs.clone(), rhs);
                    r1.insert(*a);
                    r2.insert(*b);
                    stack.push((lhs.clone(), r1));
                    stack.push((lhs, r2));
                }
                Formula::Or(a, b) => {
                    rhs.insert(*a);
                    rhs.insert(*b);
                    stack.push((lhs, rhs));
                }
                Formula::Imp(a, b) => {
                    lhs.insert(*a);
                    rhs.insert(*b);
                    stack.push((lhs, rhs));
                }
                Formula::Atom(_) => unreachable!(),
            }
        } else if let Some(f) = lhs.iter().rev().find(|f| !f.is_atom()).cloned() {
            lhs.remove(&f);
            match f {
                Formula::Neg(a) => {
                    rhs.insert(*a);
                    stack.push((lhs, rhs));
                }
                Formula::And(a, b) => {
                    lhs.insert(*a);
                    lhs.insert(*b);
                    stack.push((lhs, rhs));
                }
                Formula::Or(a, b) => {
                    let (mut l1, mut l2) = (lhs.clone(), lhs);
                    l1.insert(*a);
                    l2.insert(*b);
                    stack.push((l1, rhs.clone()));
                    stack.push((l2, rhs));
                }
                Formula::Imp(a, b) => {
                    let mut r1 = rhs.clone();
                    r1.insert(*a);
                    stack.push((lhs.clone(), r1));
                    lhs.insert(*b);
                    stack.push((lhs, rhs));
                }
                Formula::Atom(_) => unreachable!(),
            }
        } else {
            let atoms =
                |set: &BTreeSet<Formula>| set.iter().filter_map(|f| f.as_atom().cloned()).collect();
            out.push((atoms(&lhs), atoms(&rhs)));
        }
    }
    out
}

/// Axiom check written against the definition: exact membership in I, or
/// overlapping sides.
pub fn atomic_axiom(base: &MaterialBase, lhs: &BTreeSet<AtomId>, rhs: &BTreeSet<AtomId>) -> bool {
    !lhs.is_disjoint(rhs) || base.implications().any(|i| &i.lhs == lhs && &i.rhs == rhs)
}

pub fn leaf_oracle(base: &MaterialBase, s: &Sequent) -> bool {
    atomic_leaves(s)
        .iter()
        .all(|(l, r)| atomic_axiom(base, l, r))
}
