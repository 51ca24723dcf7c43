//! Killer and discriminator terms.
//!
//! The killer of depth `N` is the iterate `k₁(x) = x ∧ ¬∼x`,
//! `kᵢ(x) = kᵢ₋₁(x) ∧ ¬∼kᵢ₋₁(x)`, with `N` the length of a longest chain. A
//! killer `k` yields the discriminator
//! `t(x,y,z) = (k((x → y) ∧ (y → x)) ∧ z) ∨ (∼k((x → y) ∧ (y → x)) ∧ x)`,
//! and a discriminator `t` yields the killer `∼t(1, x, 0)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{HIAlgebra, HiOps};
use crate::error::{Error, Result};
use crate::term::{eval_term, Environment, Term};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KillerSynthesis {
    pub depth: usize,
    #[serde(serialize_with = "crate::serialize_display")]
    pub term: Term,
    pub verified: bool,
    /// Least element on which the term is not the killer function.
    pub witness: Option<usize>,
    /// Value of the term at the witness.
    pub witness_value: Option<usize>,
    /// Smallest depth at which the iterate already kills, for diagnostics.
    pub minimal_depth: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminatorSynthesis {
    #[serde(serialize_with = "crate::serialize_display")]
    pub term: Term,
    pub verified: bool,
    /// Least failing triple in lexicographic order.
    pub witness: Option<[usize; 3]>,
}

/// `kᵢ` for `i ≥ 1` in the variable `x`.
pub fn killer_term(depth: usize) -> Term {
    assert!(depth >= 1, "killer depth starts at 1");
    let mut k = Term::var("x");
    for _ in 0..depth {
        k = Term::meet(k.clone(), Term::neg_inv(k));
    }
    k
}

fn unary(alg: &(impl HiOps + ?Sized), t: &Term, x: usize) -> usize {
    let var = t.free_vars().into_iter().next().unwrap_or_else(|| "x".into());
    let env: Environment = [(var, x)].into_iter().collect();
    eval_term(alg, t, &env).expect("unary term")
}

/// Least element where `t` disagrees with the killer function, with the
/// value `t` takes there.
pub fn killer_failure(alg: &(impl HiOps + ?Sized), t: &Term) -> Option<(usize, usize)> {
    let top = alg.top();
    (0..alg.size()).find_map(|a| {
        let v = unary(alg, t, a);
        let expected = if a == top { top } else { alg.bottom() };
        (v != expected).then_some((a, v))
    })
}

/// Values of `k₁(a), k₂(a), …, k_depth(a)`, computed by iterating the step.
pub fn killer_iterates(alg: &(impl HiOps + ?Sized), a: usize, depth: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(depth);
    let mut cur = a;
    for _ in 0..depth {
        cur = alg.meet(cur, alg.neg_inv(cur));
        out.push(cur);
    }
    out
}

fn synthesize_at_depth(alg: &HIAlgebra, depth: usize) -> KillerSynthesis {
    let term = killer_term(depth);
    let failure = killer_failure(alg, &term);
    let top = alg.top();
    // iterates are monotone in depth, so the minimal depth is found pointwise
    let minimal_depth = (1..=depth).find(|&i| {
        (0..alg.size()).all(|a| a == top || killer_iterates(alg, a, i)[i - 1] == alg.bottom())
    });
    KillerSynthesis {
        depth,
        term,
        verified: failure.is_none(),
        witness: failure.map(|f| f.0),
        witness_value: failure.map(|f| f.1),
        minimal_depth,
    }
}

/// Builds `k_N` with `N` the longest chain length and verifies it
/// exhaustively.
pub fn synthesize_killer(alg: &HIAlgebra) -> Result<KillerSynthesis> {
    if alg.is_trivial() {
        return Err(Error::TrivialAlgebra);
    }
    Ok(synthesize_at_depth(alg, alg.max_chain_length()))
}

/// One killer for a whole family, at the largest chain length among them.
pub fn common_killer(algebras: &[HIAlgebra]) -> Result<KillerSynthesis> {
    if algebras.iter().any(HIAlgebra::is_trivial) {
        return Err(Error::TrivialAlgebra);
    }
    let depth = algebras.iter().map(HIAlgebra::max_chain_length).max().unwrap_or(1);
    let mut synth = None;
    for (i, a) in algebras.iter().enumerate() {
        let s = synthesize_at_depth(a, depth);
        if let Some(w) = s.witness {
            return Err(Error::NotVerified { algebra: i, witness: w });
        }
        synth = Some(s);
    }
    Ok(synth.unwrap_or_else(|| KillerSynthesis {
        depth,
        term: killer_term(depth),
        verified: true,
        witness: None,
        witness_value: None,
        minimal_depth: None,
    }))
}

/// The ternary term built from a unary killer, in variables `x`, `y`, `z`.
pub fn discriminator_from_killer(k: &Term) -> Term {
    let (x, y, z) = (Term::var("x"), Term::var("y"), Term::var("z"));
    let equiv = Term::meet(Term::imp(x.clone(), y.clone()), Term::imp(y, x.clone()));
    let var = k.free_vars().into_iter().next();
    let applied = match &var {
        Some(v) => k.substitute(&BTreeMap::from([(v.as_str(), equiv)])),
        None => k.clone(),
    };
    Term::join(Term::meet(applied.clone(), z), Term::meet(Term::inv(applied), x))
}

/// `∼t(1, x, 0)` for a ternary term in `x`, `y`, `z`.
pub fn killer_from_discriminator(t: &Term) -> Term {
    let map = BTreeMap::from([("x", Term::One), ("y", Term::var("x")), ("z", Term::Zero)]);
    Term::inv(t.substitute(&map))
}

/// Checks the discriminator function on all triples.
pub fn verify_discriminator(alg: &(impl HiOps + ?Sized), t: &Term) -> DiscriminatorSynthesis {
    let n = alg.size();
    let mut env = Environment::new();
    let mut witness = None;
    'search: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                env.insert("x".into(), a);
                env.insert("y".into(), b);
                env.insert("z".into(), c);
                let v = eval_term(alg, t, &env).expect("ternary term in x, y, z");
                let expected = if a != b { a } else { c };
                if v != expected {
                    witness = Some([a, b, c]);
                    break 'search;
                }
            }
        }
    }
    DiscriminatorSynthesis { term: t.clone(), verified: witness.is_none(), witness }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuasiPrimality {
    pub quasi_primal: bool,
    pub killer: KillerSynthesis,
    /// Present when the killer verified.
    pub discriminator: Option<DiscriminatorSynthesis>,
    pub note: &'static str,
}

pub const CONSTRUCTION_NOTE: &str =
    "decided by the killer construction; a negative answer means no discriminator was found by this construction";

/// Quasi-primality through the killer: if the killer verifies, the derived
/// discriminator is checked as well.
pub fn quasi_primality(alg: &HIAlgebra) -> Result<QuasiPrimality> {
    let killer = synthesize_killer(alg)?;
    let discriminator = if killer.verified {
        let d = verify_discriminator(alg, &discriminator_from_killer(&killer.term));
        if !d.verified {
            return Err(Error::InternalInconsistency(format!(
                "killer verified but derived discriminator fails at {:?}",
                d.witness
            )));
        }
        Some(d)
    } else {
        None
    };
    Ok(QuasiPrimality { quasi_primal: killer.verified, killer, discriminator, note: CONSTRUCTION_NOTE })
}

pub fn is_quasi_primal(alg: &HIAlgebra) -> Result<bool> {
    Ok(quasi_primality(alg)?.quasi_primal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::known;
    use crate::term::parse_term;

    #[test]
    fn killer_term_shape() {
        assert_eq!(killer_term(1).to_string(), "x & !~x");
        assert_eq!(killer_term(2), parse_term("(x & !~x) & !~(x & !~x)").unwrap());
    }

    #[test]
    fn chain_killer() {
        let s = synthesize_killer(&known::chain(3)).unwrap();
        assert_eq!(s.depth, 3);
        assert!(s.verified);
        assert_eq!(s.minimal_depth, Some(1));
        assert_eq!(killer_iterates(&known::chain(3), 1, 1), vec![0]);
    }

    #[test]
    fn boolean_square_killer_fails_at_atom() {
        let b = known::boolean_square();
        let s = synthesize_killer(&b).unwrap();
        assert!(!s.verified);
        assert_eq!(s.witness, Some(1));
        assert_eq!(s.witness_value, Some(1));
        assert_eq!(killer_iterates(&b, 1, 5), vec![1; 5]);
        assert_eq!(s.minimal_depth, None);
    }

    #[test]
    fn two_element_killer() {
        let s = synthesize_killer(&known::chain(2)).unwrap();
        assert_eq!(s.depth, 2);
        assert!(s.verified);
        assert!(matches!(synthesize_killer(&known::trivial()), Err(Error::TrivialAlgebra)));
    }

    #[test]
    fn common_killers() {
        let s = common_killer(&[known::chain(3), known::chain(4)]).unwrap();
        assert_eq!(s.depth, 4);
        assert!(s.verified);
        for a in [known::chain(3), known::chain(4)] {
            assert!(killer_failure(&a, &s.term).is_none());
        }
        assert_eq!(common_killer(&[known::chain(2)]).unwrap().depth, 2);
        assert!(matches!(
            common_killer(&[known::chain(3), known::boolean_square()]),
            Err(Error::NotVerified { algebra: 1, witness: 1 })
        ));
    }

    #[test]
    fn discriminator_shape() {
        let t = discriminator_from_killer(&killer_term(1));
        let e = "(x -> y) & (y -> x)";
        let k = format!("({e}) & !~({e})");
        let expected = parse_term(&format!("(({k}) & z) | (~(({k})) & x)")).unwrap();
        assert_eq!(t, expected);
        let degenerate = discriminator_from_killer(&Term::var("x"));
        assert_eq!(degenerate.free_vars().len(), 3);
    }

    #[test]
    fn chain_discriminator_values() {
        let c = known::chain(3);
        let t = discriminator_from_killer(&synthesize_killer(&c).unwrap().term);
        let env = |a, b, cc| -> Environment {
            [("x".to_string(), a), ("y".to_string(), b), ("z".to_string(), cc)].into_iter().collect()
        };
        assert_eq!(eval_term(&c, &t, &env(1, 2, 0)).unwrap(), 1);
        assert_eq!(eval_term(&c, &t, &env(0, 0, 1)).unwrap(), 1);
        assert!(verify_discriminator(&c, &t).verified);
        let k = killer_from_discriminator(&t);
        assert!(killer_failure(&c, &k).is_none());
    }

    #[test]
    fn four_chain_discriminator_from_depth_three() {
        let c = known::chain(4);
        assert!(verify_discriminator(&c, &discriminator_from_killer(&killer_term(3))).verified);
    }

    #[test]
    fn degenerate_terms_fail() {
        let c = known::chain(3);
        let k = killer_from_discriminator(&Term::var("z"));
        assert_eq!(k, Term::inv(Term::Zero));
        assert_eq!(killer_failure(&c, &k), Some((0, 2)));
        let v = verify_discriminator(&c, &Term::var("x"));
        assert_eq!(v.witness, Some([0, 0, 1]));
    }

    #[test]
    fn round_trip_on_two_elements() {
        let two = known::chain(2);
        let k = synthesize_killer(&two).unwrap().term;
        let k2 = killer_from_discriminator(&discriminator_from_killer(&k));
        assert!(killer_failure(&two, &k2).is_none());
    }

    #[test]
    fn quasi_primality_examples() {
        assert!(is_quasi_primal(&known::chain(2)).unwrap());
        assert!(is_quasi_primal(&known::diamond_fixed_atoms()).unwrap());
        let q = quasi_primality(&known::boolean_square()).unwrap();
        assert!(!q.quasi_primal);
        assert!(q.discriminator.is_none());
    }
}
