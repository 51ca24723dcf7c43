//! Finite Heyting algebras with involution.
//!
//! An algebra is stored as its order relation and its involution. The lattice
//! operations, the relative pseudocomplement and the pseudocomplement are
//! always derived from the order, so two algebras with the same order and
//! involution are equal as values.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Operation interface shared by concrete algebras, direct powers and
/// subalgebras. Elements are indices `0..size()`, with `0` the bottom and
/// `size() - 1` the top.
pub trait HiOps {
    fn size(&self) -> usize;
    fn leq(&self, a: usize, b: usize) -> bool;
    fn meet(&self, a: usize, b: usize) -> usize;
    fn join(&self, a: usize, b: usize) -> usize;
    fn imp(&self, a: usize, b: usize) -> usize;
    fn neg(&self, a: usize) -> usize;
    fn inv(&self, a: usize) -> usize;

    fn bottom(&self) -> usize {
        0
    }

    fn top(&self) -> usize {
        self.size() - 1
    }

    /// `¬∼a`
    fn neg_inv(&self, a: usize) -> usize {
        self.neg(self.inv(a))
    }
}

/// A square operation table over `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpTable {
    n: usize,
    data: Vec<usize>,
}

impl OpTable {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.data[i * self.n + j]
    }

    pub fn size(&self) -> usize {
        self.n
    }
}

/// A bounded partial order on `0..n` with bottom `0` and top `n - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinitePoset {
    n: usize,
    leq: Vec<bool>,
}

impl FinitePoset {
    /// Validates reflexivity, antisymmetry, transitivity and the position of
    /// the bounds.
    pub fn new(rows: Vec<Vec<bool>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Malformed("empty order relation".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Malformed(format!(
                "row {i} of the order relation has length {}, expected {n}",
                rows[i].len()
            )));
        }
        let leq: Vec<bool> = rows.into_iter().flatten().collect();
        let p = FinitePoset { n, leq };
        for a in 0..n {
            if !p.leq(a, a) {
                return Err(Error::NotPoset { law: "reflexivity", witness: vec![a] });
            }
        }
        for a in 0..n {
            for b in 0..n {
                if a != b && p.leq(a, b) && p.leq(b, a) {
                    return Err(Error::NotPoset { law: "antisymmetry", witness: vec![a, b] });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if !p.leq(a, b) {
                    continue;
                }
                for c in 0..n {
                    if p.leq(b, c) && !p.leq(a, c) {
                        return Err(Error::NotPoset {
                            law: "transitivity",
                            witness: vec![a, b, c],
                        });
                    }
                }
            }
        }
        if let Some(a) = (0..n).find(|&a| !p.leq(0, a)) {
            return Err(Error::BottomNotZero(a));
        }
        if let Some(a) = (0..n).find(|&a| !p.leq(a, n - 1)) {
            return Err(Error::TopNotLast(a));
        }
        Ok(p)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        Self::new((0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.n + b]
    }

    pub fn rows(&self) -> Vec<Vec<bool>> {
        self.leq.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

/// Greatest-lower-bound and least-upper-bound tables of a poset.
pub fn derive_lattice_ops(p: &FinitePoset) -> Result<(OpTable, OpTable)> {
    let n = p.size();
    let bound = |i: usize, j: usize, lower: bool| -> Option<usize> {
        let cands: Vec<usize> = (0..n)
            .filter(|&x| if lower { p.leq(x, i) && p.leq(x, j) } else { p.leq(i, x) && p.leq(j, x) })
            .collect();
        cands
            .iter()
            .copied()
            .find(|&x| cands.iter().all(|&y| if lower { p.leq(y, x) } else { p.leq(x, y) }))
    };
    let mut meet = vec![0; n * n];
    let mut join = vec![0; n * n];
    for i in 0..n {
        for j in 0..n {
            meet[i * n + j] = bound(i, j, true).ok_or(Error::NotLattice(i, j))?;
            join[i * n + j] = bound(i, j, false).ok_or(Error::NotLattice(i, j))?;
        }
    }
    Ok((OpTable { n, data: meet }, OpTable { n, data: join }))
}

/// Relative pseudocomplement table: `impl[a][b] = max {x : a ∧ x ≤ b}`.
pub fn derive_heyting(meet: &OpTable, p: &FinitePoset) -> Result<OpTable> {
    let n = p.size();
    let mut data = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let set: Vec<usize> = (0..n).filter(|&x| p.leq(meet.get(a, x), b)).collect();
            let max = set
                .iter()
                .copied()
                .find(|&x| set.iter().all(|&y| p.leq(y, x)))
                .ok_or(Error::NotHeyting(a, b))?;
            data[a * n + b] = max;
        }
    }
    Ok(OpTable { n, data })
}

/// Identities checked by [`validate_involution`] and
/// [`check_derived_identities`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Law {
    /// `∼(a ∨ b) = ∼a ∧ ∼b`
    #[serde(rename = "i1")]
    I1,
    /// `∼∼a = a`
    #[serde(rename = "i2")]
    I2,
    /// `∼(a ∧ b) = ∼a ∨ ∼b`
    #[serde(rename = "i3")]
    I3,
    /// `∼0 = 1`, `∼1 = 0`
    #[serde(rename = "i4")]
    I4,
    /// `a ≤ b ⇒ ∼b ≤ ∼a`
    #[serde(rename = "i5")]
    I5,
    /// `¬∼(a ∧ b) = ¬∼a ∧ ¬∼b`
    #[serde(rename = "i6")]
    I6,
    /// `¬∼1 = 1`, `¬∼0 = 0`
    #[serde(rename = "i7")]
    I7,
    /// `a ≤ b ⇒ ¬∼a ≤ ¬∼b`
    #[serde(rename = "i8")]
    I8,
    /// `¬∼(a → b) ∧ ∼b ≤ ∼a` and `¬∼(a → b) ≤ ∼b → ∼a`
    #[serde(rename = "i9")]
    I9,
}

impl Law {
    pub const ALL: [Law; 9] = [
        Law::I1,
        Law::I2,
        Law::I3,
        Law::I4,
        Law::I5,
        Law::I6,
        Law::I7,
        Law::I8,
        Law::I9,
    ];

    /// i6 to i8 are reconstructed from the Heyting facts they follow from.
    pub fn is_reconstructed(self) -> bool {
        matches!(self, Law::I6 | Law::I7 | Law::I8)
    }

    /// Number of elements in a witness for this law.
    pub fn arity(self) -> usize {
        match self {
            Law::I2 | Law::I4 | Law::I7 => 1,
            _ => 2,
        }
    }

    /// Evaluates the law at one witness tuple. For the constant laws i4 and
    /// i7 the witness is the bound being checked; any other element holds
    /// vacuously.
    pub fn holds_at<A: HiOps + ?Sized>(self, alg: &A, w: &[usize]) -> bool {
        let (top, bot) = (alg.top(), alg.bottom());
        match self {
            Law::I1 => alg.inv(alg.join(w[0], w[1])) == alg.meet(alg.inv(w[0]), alg.inv(w[1])),
            Law::I2 => alg.inv(alg.inv(w[0])) == w[0],
            Law::I3 => alg.inv(alg.meet(w[0], w[1])) == alg.join(alg.inv(w[0]), alg.inv(w[1])),
            Law::I4 => {
                (w[0] != bot || alg.inv(bot) == top) && (w[0] != top || alg.inv(top) == bot)
            }
            Law::I5 => !alg.leq(w[0], w[1]) || alg.leq(alg.inv(w[1]), alg.inv(w[0])),
            Law::I6 => {
                alg.neg_inv(alg.meet(w[0], w[1])) == alg.meet(alg.neg_inv(w[0]), alg.neg_inv(w[1]))
            }
            Law::I7 => {
                (w[0] != bot || alg.neg_inv(bot) == bot) && (w[0] != top || alg.neg_inv(top) == top)
            }
            Law::I8 => !alg.leq(w[0], w[1]) || alg.leq(alg.neg_inv(w[0]), alg.neg_inv(w[1])),
            Law::I9 => {
                let (a, b) = (w[0], w[1]);
                let lhs = alg.neg_inv(alg.imp(a, b));
                alg.leq(alg.meet(lhs, alg.inv(b)), alg.inv(a))
                    && alg.leq(lhs, alg.imp(alg.inv(b), alg.inv(a)))
            }
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = Law::ALL.iter().position(|l| l == self).unwrap() + 1;
        write!(f, "i{i}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: Law,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
    /// Laws whose statement is reconstructed rather than quoted.
    pub reconstructed: Vec<Law>,
    /// Set for the one-element algebra, where every law holds vacuously.
    pub trivial: bool,
}

impl ValidationReport {
    fn new(violations: Vec<Violation>, laws: &[Law], trivial: bool) -> Self {
        ValidationReport {
            ok: violations.is_empty(),
            violations,
            reconstructed: laws.iter().copied().filter(|l| l.is_reconstructed()).collect(),
            trivial,
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok {
            return write!(f, "ok");
        }
        let shown: Vec<String> = self
            .violations
            .iter()
            .take(4)
            .map(|v| format!("{} at {:?}", v.law, v.witness))
            .collect();
        write!(f, "{} violation(s): {}", self.violations.len(), shown.join("; "))?;
        if self.violations.len() > shown.len() {
            write!(f, "; ...")?;
        }
        Ok(())
    }
}

/// Checks i1 and i2 for a candidate involution against given lattice tables.
pub fn validate_involution(inv: &[usize], join: &OpTable, meet: &OpTable) -> ValidationReport {
    let n = inv.len();
    let mut violations = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if inv[join.get(a, b)] != meet.get(inv[a], inv[b]) {
                violations.push(Violation { law: Law::I1, witness: vec![a, b] });
            }
        }
    }
    for a in 0..n {
        if inv.get(inv[a]) != Some(&a) {
            violations.push(Violation { law: Law::I2, witness: vec![a] });
        }
    }
    ValidationReport::new(violations, &[Law::I1, Law::I2], n == 1)
}

/// Exhaustively checks i1 to i9 on an algebra.
pub fn check_derived_identities<A: HiOps + ?Sized>(alg: &A) -> ValidationReport {
    let n = alg.size();
    let mut violations = Vec::new();
    for law in Law::ALL {
        match law.arity() {
            1 => {
                let range: Vec<usize> = match law {
                    Law::I4 | Law::I7 => {
                        let mut v = vec![alg.bottom(), alg.top()];
                        v.dedup();
                        v
                    }
                    _ => (0..n).collect(),
                };
                for a in range {
                    if !law.holds_at(alg, &[a]) {
                        violations.push(Violation { law, witness: vec![a] });
                    }
                }
            }
            _ => {
                for a in 0..n {
                    for b in 0..n {
                        if !law.holds_at(alg, &[a, b]) {
                            violations.push(Violation { law, witness: vec![a, b] });
                        }
                    }
                }
            }
        }
    }
    ValidationReport::new(violations, &Law::ALL, n == 1)
}

/// A finite Heyting algebra with involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HIAlgebra {
    poset: FinitePoset,
    meet: OpTable,
    join: OpTable,
    imp: OpTable,
    neg: Vec<usize>,
    inv: Vec<usize>,
    name: Option<String>,
}

impl HIAlgebra {
    /// Derives all operations from the order and checks the involution.
    pub fn new(poset: FinitePoset, inv: Vec<usize>) -> Result<Self> {
        let n = poset.size();
        if inv.len() != n {
            return Err(Error::Malformed(format!(
                "involution has length {}, expected {n}",
                inv.len()
            )));
        }
        let mut seen = vec![false; n];
        for &x in &inv {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Malformed(format!("involution {inv:?} is not a permutation")));
            }
        }
        let (meet, join) = derive_lattice_ops(&poset)?;
        let imp = derive_heyting(&meet, &poset)?;
        let report = validate_involution(&inv, &join, &meet);
        if !report.ok {
            return Err(Error::InvalidInvolution(report));
        }
        let neg = (0..n).map(|a| imp.get(a, 0)).collect();
        Ok(HIAlgebra { poset, meet, join, imp, neg, inv, name: None })
    }

    pub fn from_order(rows: Vec<Vec<bool>>, inv: Vec<usize>) -> Result<Self> {
        Self::new(FinitePoset::new(rows)?, inv)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn involution(&self) -> &[usize] {
        &self.inv
    }

    pub fn meet_table(&self) -> &OpTable {
        &self.meet
    }

    pub fn join_table(&self) -> &OpTable {
        &self.join
    }

    pub fn impl_table(&self) -> &OpTable {
        &self.imp
    }

    pub fn is_trivial(&self) -> bool {
        self.poset.size() == 1
    }

    /// Replaces the involution without validation. Only for building
    /// deliberately broken algebras in tests.
    #[doc(hidden)]
    pub fn with_unchecked_involution(mut self, inv: Vec<usize>) -> Self {
        self.inv = inv;
        self
    }

    /// Number of elements in a longest chain of the order.
    pub fn max_chain_length(&self) -> usize {
        let n = self.size();
        // a < b implies |↓a| < |↓b|, so this order is a linear extension
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&b| (0..n).filter(|&a| self.leq(a, b)).count());
        let mut len = vec![1usize; n];
        for (pos, &b) in order.iter().enumerate() {
            for &a in &order[..pos] {
                if a != b && self.leq(a, b) {
                    len[b] = len[b].max(len[a] + 1);
                }
            }
        }
        len.into_iter().max().unwrap_or(1)
    }
}

impl HiOps for HIAlgebra {
    fn size(&self) -> usize {
        self.poset.size()
    }
    #[inline]
    fn leq(&self, a: usize, b: usize) -> bool {
        self.poset.leq(a, b)
    }
    #[inline]
    fn meet(&self, a: usize, b: usize) -> usize {
        self.meet.get(a, b)
    }
    #[inline]
    fn join(&self, a: usize, b: usize) -> usize {
        self.join.get(a, b)
    }
    #[inline]
    fn imp(&self, a: usize, b: usize) -> usize {
        self.imp.get(a, b)
    }
    #[inline]
    fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }
    #[inline]
    fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }
}

/// Number of elements in a longest chain.
pub fn max_chain_length(a: &HIAlgebra) -> usize {
    a.max_chain_length()
}

/// Small algebras that recur throughout the test corpus.
pub mod known {
    use super::*;

    /// The `n`-element chain with the order-reversing involution.
    pub fn chain(n: usize) -> HIAlgebra {
        HIAlgebra::new(
            FinitePoset::from_fn(n, |i, j| i <= j).expect("chain order"),
            (0..n).rev().collect(),
        )
        .expect("chain algebra")
        .with_name(format!("chain{n}"))
    }

    /// Order of the four-element diamond `0 < 1, 2 < 3` with incomparable atoms.
    pub fn diamond_poset() -> FinitePoset {
        FinitePoset::from_fn(4, |i, j| i == j || i == 0 || j == 3).expect("diamond order")
    }

    /// The four-element Boolean algebra with `∼` the Boolean complement.
    pub fn boolean_square() -> HIAlgebra {
        HIAlgebra::new(diamond_poset(), vec![3, 2, 1, 0])
            .expect("boolean square")
            .with_name("boolean2x2")
    }

    /// The four-element diamond with `∼` fixing both atoms.
    pub fn diamond_fixed_atoms() -> HIAlgebra {
        HIAlgebra::new(diamond_poset(), vec![3, 1, 2, 0])
            .expect("diamond with fixed atoms")
            .with_name("diamond_fixed")
    }

    /// The non-distributive five-element lattice M3.
    pub fn m3_poset() -> FinitePoset {
        FinitePoset::from_fn(5, |i, j| i == j || i == 0 || j == 4).expect("M3 order")
    }

    pub fn trivial() -> HIAlgebra {
        HIAlgebra::new(FinitePoset::from_fn(1, |_, _| true).expect("one point"), vec![0])
            .expect("trivial algebra")
            .with_name("trivial")
    }
}
