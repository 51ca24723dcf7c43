//! Filters, involutive filters and congruences of a finite algebra.
//!
//! Enumerated objects are returned in canonical order: by size, then by the
//! lexicographic order of their sorted member lists.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::{HIAlgebra, HiOps};
use crate::error::{Error, Result};

/// Largest algebra whose filters are found by a raw subset scan.
const SUBSET_SCAN_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Filter {
    members: Vec<usize>,
}

impl Filter {
    /// Builds a filter from a member set, checking the filter laws.
    pub fn new(a: &HIAlgebra, members: impl IntoIterator<Item = usize>) -> Option<Filter> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        let f = Filter { members: members.into_iter().collect() };
        is_filter(a, &f.members).then_some(f)
    }

    fn from_mask(mask: &[bool]) -> Filter {
        Filter { members: (0..mask.len()).filter(|&i| mask[i]).collect() }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &Filter) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    fn canonical_key(&self) -> (usize, &[usize]) {
        (self.members.len(), &self.members)
    }
}

fn mask_of(n: usize, members: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &x in members {
        m[x] = true;
    }
    m
}

/// Contains the top, is closed under meets and is upward closed.
pub fn is_filter<A: HiOps + ?Sized>(a: &A, members: &[usize]) -> bool {
    let n = a.size();
    if members.iter().any(|&x| x >= n) {
        return false;
    }
    let m = mask_of(n, members);
    if !m[a.top()] {
        return false;
    }
    for &x in members {
        for &y in members {
            if !m[a.meet(x, y)] {
                return false;
            }
        }
        if (0..n).any(|y| a.leq(x, y) && !m[y]) {
            return false;
        }
    }
    true
}

pub fn all_filters(a: &HIAlgebra) -> Vec<Filter> {
    let n = a.size();
    let mut out: Vec<Filter> = if n <= SUBSET_SCAN_LIMIT {
        (0u32..1 << n)
            .filter_map(|bits| {
                let members: Vec<usize> = (0..n).filter(|&i| bits >> i & 1 == 1).collect();
                is_filter(a, &members).then_some(Filter { members })
            })
            .collect()
    } else {
        principal_filters(a)
    };
    out.sort_by(|x, y| x.canonical_key().cmp(&y.canonical_key()));
    out
}

/// `↑x` for every element. In a finite lattice every filter has a least
/// element, so these are all the filters.
fn principal_filters(a: &HIAlgebra) -> Vec<Filter> {
    let n = a.size();
    (0..n).map(|x| Filter { members: (0..n).filter(|&y| a.leq(x, y)).collect() }).collect()
}

/// Closed under `x ↦ ¬∼x`.
pub fn is_involutive_filter(a: &HIAlgebra, f: &Filter) -> bool {
    first_non_involutive(a, f).is_none()
}

fn first_non_involutive(a: &HIAlgebra, f: &Filter) -> Option<usize> {
    f.members.iter().copied().find(|&x| !f.contains(a.neg_inv(x)))
}

pub fn involutive_filters(a: &HIAlgebra) -> Vec<Filter> {
    all_filters(a).into_iter().filter(|f| is_involutive_filter(a, f)).collect()
}

/// Smallest involutive filter containing `seed`, by saturation under meets,
/// upward closure and `x ↦ ¬∼x`.
pub fn generated_involutive_filter(a: &HIAlgebra, seed: &[usize]) -> Filter {
    let n = a.size();
    let mut mask = vec![false; n];
    let mut work: Vec<usize> = Vec::new();
    let add = |x: usize, mask: &mut Vec<bool>, work: &mut Vec<usize>| {
        if !mask[x] {
            mask[x] = true;
            work.push(x);
        }
    };
    add(a.top(), &mut mask, &mut work);
    for &x in seed {
        add(x, &mut mask, &mut work);
    }
    while let Some(x) = work.pop() {
        add(a.neg_inv(x), &mut mask, &mut work);
        for y in 0..n {
            if a.leq(x, y) {
                add(y, &mut mask, &mut work);
            }
            if mask[y] {
                add(a.meet(x, y), &mut mask, &mut work);
            }
        }
    }
    Filter::from_mask(&mask)
}

/// A partition of the carrier compatible with every operation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Congruence {
    blocks: Vec<Vec<usize>>,
    #[serde(skip)]
    block_of: Vec<usize>,
}

impl Congruence {
    /// Canonical form from any labelling: blocks sorted by least element.
    fn from_labels(labels: &[usize]) -> Congruence {
        let mut ids = std::collections::HashMap::new();
        let mut block_of = Vec::with_capacity(labels.len());
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (x, l) in labels.iter().enumerate() {
            let id = *ids.entry(*l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[id].push(x);
            block_of.push(id);
        }
        Congruence { blocks, block_of }
    }

    pub fn identity(n: usize) -> Congruence {
        Congruence::from_labels(&(0..n).collect::<Vec<_>>())
    }

    pub fn all(n: usize) -> Congruence {
        Congruence::from_labels(&vec![0; n])
    }

    /// Builds a partition from blocks; `None` if they do not partition `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Option<Congruence> {
        let mut labels = vec![usize::MAX; n];
        for (i, b) in blocks.iter().enumerate() {
            for &x in b {
                if x >= n || labels[x] != usize::MAX {
                    return None;
                }
                labels[x] = i;
            }
        }
        labels.iter().all(|&l| l != usize::MAX).then(|| Congruence::from_labels(&labels))
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_of(&self, x: usize) -> usize {
        self.block_of[x]
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.block_of[x] == self.block_of[y]
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.len() == self.block_of.len()
    }

    /// Number of related ordered pairs.
    pub fn pair_count(&self) -> usize {
        self.blocks.iter().map(|b| b.len() * b.len()).sum()
    }

    pub fn is_finer_than(&self, other: &Congruence) -> bool {
        self.blocks.iter().all(|b| b.iter().all(|&x| other.related(b[0], x)))
    }

    fn canonical_key(&self) -> (usize, &[Vec<usize>]) {
        (self.pair_count(), &self.blocks)
    }
}

/// Canonical order: by number of related pairs, then block list.
impl Ord for Congruence {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical_key().cmp(&other.canonical_key())
    }
}

impl PartialOrd for Congruence {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Checks that a partition is compatible with all operations.
pub fn is_congruence<A: HiOps + ?Sized>(a: &A, c: &Congruence) -> bool {
    let n = a.size();
    for x in 0..n {
        for y in 0..n {
            if !c.related(x, y) {
                continue;
            }
            if !c.related(a.inv(x), a.inv(y)) || !c.related(a.neg(x), a.neg(y)) {
                return false;
            }
            for z in 0..n {
                if !c.related(a.meet(x, z), a.meet(y, z))
                    || !c.related(a.join(x, z), a.join(y, z))
                    || !c.related(a.imp(x, z), a.imp(y, z))
                    || !c.related(a.imp(z, x), a.imp(z, y))
                {
                    return false;
                }
            }
        }
    }
    true
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.0[hi] = lo;
        true
    }

    /// Smallest congruence containing the current equivalence.
    fn close<A: HiOps + ?Sized>(&mut self, a: &A) {
        let n = a.size();
        loop {
            let mut changed = false;
            for x in 0..n {
                let y = self.find(x);
                if x == y {
                    continue;
                }
                changed |= self.union(a.inv(x), a.inv(y));
                changed |= self.union(a.neg(x), a.neg(y));
                for z in 0..n {
                    changed |= self.union(a.meet(x, z), a.meet(y, z));
                    changed |= self.union(a.join(x, z), a.join(y, z));
                    changed |= self.union(a.imp(x, z), a.imp(y, z));
                    changed |= self.union(a.imp(z, x), a.imp(z, y));
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn into_congruence(mut self) -> Congruence {
        let labels: Vec<usize> = (0..self.0.len()).map(|x| self.find(x)).collect();
        Congruence::from_labels(&labels)
    }
}

/// Congruence generated by identifying `x` and `y`.
pub fn principal_congruence<A: HiOps + ?Sized>(a: &A, x: usize, y: usize) -> Congruence {
    let mut uf = UnionFind::new(a.size());
    uf.union(x, y);
    uf.close(a);
    uf.into_congruence()
}

pub fn congruence_join<A: HiOps + ?Sized>(a: &A, c: &Congruence, d: &Congruence) -> Congruence {
    let mut uf = UnionFind::new(a.size());
    for b in c.blocks.iter().chain(d.blocks.iter()) {
        for &x in &b[1..] {
            uf.union(b[0], x);
        }
    }
    uf.close(a);
    uf.into_congruence()
}

/// All congruences: principal congruences closed under joins.
pub fn all_congruences(a: &HIAlgebra) -> Vec<Congruence> {
    let n = a.size();
    let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut list: Vec<Congruence> = Vec::new();
    let push = |c: Congruence, found: &mut BTreeSet<Vec<usize>>, list: &mut Vec<Congruence>| {
        if found.insert(c.block_of.clone()) {
            list.push(c);
        }
    };
    push(Congruence::identity(n), &mut found, &mut list);
    let mut principals = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            let c = principal_congruence(a, x, y);
            if !principals.contains(&c) {
                principals.push(c.clone());
            }
            push(c, &mut found, &mut list);
        }
    }
    // every congruence is a join of principal ones; join each new one with
    // the principals until nothing new appears
    let mut i = 0;
    while i < list.len() {
        let c = list[i].clone();
        for p in &principals {
            push(congruence_join(a, &c, p), &mut found, &mut list);
        }
        i += 1;
    }
    list.sort();
    list
}

/// `Θ(F)`: `x ~ y` iff `(x → y) ∧ (y → x) ∈ F`.
pub fn theta_of_filter(a: &HIAlgebra, f: &Filter) -> Result<Congruence> {
    if let Some(x) = first_non_involutive(a, f) {
        return Err(Error::NotInvolutive(x));
    }
    let n = a.size();
    let mut labels = vec![usize::MAX; n];
    for x in 0..n {
        if labels[x] != usize::MAX {
            continue;
        }
        for y in x..n {
            if f.contains(a.meet(a.imp(x, y), a.imp(y, x))) {
                labels[y] = x;
            }
        }
    }
    Ok(Congruence::from_labels(&labels))
}

/// `F(Θ)`: the block of the top.
pub fn filter_of_theta(a: &HIAlgebra, c: &Congruence) -> Filter {
    let top = a.top();
    Filter { members: (0..a.size()).filter(|&x| c.related(x, top)).collect() }
}

/// Elements with `¬a = ∼a`, together with a check of the Boolean structure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutiveCenter {
    pub members: Vec<usize>,
    /// `(a, ¬a)` for every member.
    pub complement: Vec<(usize, usize)>,
    /// Closed under `∨`, `∧`, `¬` with `a ∨ ¬a = 1` and `a ∧ ¬a = 0`.
    pub boolean: bool,
}

impl InvolutiveCenter {
    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn involutive_center<A: HiOps + ?Sized>(a: &A) -> InvolutiveCenter {
    let members: Vec<usize> = (0..a.size()).filter(|&x| a.neg(x) == a.inv(x)).collect();
    let inside = |x: usize| members.binary_search(&x).is_ok();
    let (top, bot) = (a.top(), a.bottom());
    let boolean = members.iter().all(|&x| {
        inside(a.neg(x))
            && a.join(x, a.neg(x)) == top
            && a.meet(x, a.neg(x)) == bot
            && members.iter().all(|&y| inside(a.join(x, y)) && inside(a.meet(x, y)))
    });
    let complement = members.iter().map(|&x| (x, a.neg(x))).collect();
    InvolutiveCenter { members, complement, boolean }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SiVerdict {
    pub subdirectly_irreducible: bool,
    /// A least congruence above the identity exists.
    pub by_congruences: bool,
    /// No element outside `{0, 1}` satisfies `¬a = ∼a`.
    pub by_center: bool,
    /// Least such element when the center criterion fails.
    pub center_witness: Option<usize>,
    /// The monolith, when it exists.
    pub monolith: Option<Congruence>,
}

/// Decides subdirect irreducibility by both the congruence lattice and the
/// involutive center, and fails if they disagree.
pub fn is_subdirectly_irreducible(a: &HIAlgebra) -> Result<SiVerdict> {
    if a.is_trivial() {
        return Err(Error::TrivialAlgebra);
    }
    let cons = all_congruences(a);
    let above: Vec<&Congruence> = cons.iter().filter(|c| !c.is_identity()).collect();
    let monolith = above
        .iter()
        .find(|c| above.iter().all(|d| c.is_finer_than(d)))
        .map(|c| (*c).clone());
    let by_congruences = monolith.is_some();
    let center = involutive_center(a);
    let center_witness = center.members.iter().copied().find(|&x| x != a.bottom() && x != a.top());
    let by_center = center_witness.is_none();
    if by_congruences != by_center {
        return Err(Error::InternalInconsistency(format!(
            "congruence criterion says {by_congruences}, center criterion says {by_center}"
        )));
    }
    Ok(SiVerdict { subdirectly_irreducible: by_center, by_congruences, by_center, center_witness, monolith })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IcBijection {
    pub involutive_filters: usize,
    pub center_filters: usize,
    /// `F ↦ F ∩ IC(A)` is injective.
    pub restriction_injective: bool,
    /// Every filter of `IC(A)` is some `F ∩ IC(A)`.
    pub restriction_surjective: bool,
    /// Generating from `G` and intersecting gives back `G`, and restricting
    /// then regenerating gives back `F`.
    pub inverse_is_generation: bool,
    pub holds: bool,
}

/// Filters of the involutive center taken as a lattice in its own right.
pub fn center_filters(a: &HIAlgebra, ic: &InvolutiveCenter) -> Vec<Filter> {
    let m = &ic.members;
    let k = m.len();
    let mut out: Vec<Filter> = Vec::new();
    if k <= SUBSET_SCAN_LIMIT {
        for bits in 0u32..1 << k {
            let members: Vec<usize> = (0..k).filter(|&i| bits >> i & 1 == 1).map(|i| m[i]).collect();
            if is_center_filter(a, m, &members) {
                out.push(Filter { members });
            }
        }
    } else {
        for &x in m {
            out.push(Filter { members: m.iter().copied().filter(|&y| a.leq(x, y)).collect() });
        }
    }
    out.sort_by(|x, y| x.canonical_key().cmp(&y.canonical_key()));
    out
}

fn is_center_filter(a: &HIAlgebra, center: &[usize], members: &[usize]) -> bool {
    let inside = |x: usize| members.binary_search(&x).is_ok();
    inside(a.top())
        && members.iter().all(|&x| {
            members.iter().all(|&y| inside(a.meet(x, y)))
                && center.iter().all(|&y| !a.leq(x, y) || inside(y))
        })
}

pub fn check_ic_filter_bijection(a: &HIAlgebra) -> IcBijection {
    let ic = involutive_center(a);
    let inv_filters = involutive_filters(a);
    let cfilters = center_filters(a, &ic);
    let restrict = |f: &Filter| Filter {
        members: f.members.iter().copied().filter(|&x| ic.contains(x)).collect(),
    };
    let images: Vec<Filter> = inv_filters.iter().map(restrict).collect();
    let distinct: BTreeSet<&Filter> = images.iter().collect();
    let restriction_injective = distinct.len() == images.len();
    let restriction_surjective = cfilters.iter().all(|g| distinct.contains(g))
        && images.iter().all(|g| cfilters.contains(g));
    let inverse_is_generation = cfilters.iter().all(|g| {
        let f = generated_involutive_filter(a, &g.members);
        restrict(&f) == *g
    }) && inv_filters
        .iter()
        .all(|f| generated_involutive_filter(a, &restrict(f).members) == *f);
    IcBijection {
        involutive_filters: inv_filters.len(),
        center_filters: cfilters.len(),
        restriction_injective,
        restriction_surjective,
        inverse_is_generation,
        holds: restriction_injective && restriction_surjective && inverse_is_generation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::known;

    fn members(fs: &[Filter]) -> Vec<Vec<usize>> {
        fs.iter().map(|f| f.members.clone()).collect()
    }

    #[test]
    fn filters_of_small_algebras() {
        assert_eq!(members(&all_filters(&known::chain(3))), vec![vec![2], vec![1, 2], vec![0, 1, 2]]);
        assert_eq!(all_filters(&known::chain(2)).len(), 2);
        assert_eq!(all_filters(&known::boolean_square()).len(), 4);
    }

    #[test]
    fn large_algebras_use_principal_filters() {
        let c = known::chain(14);
        let fs = all_filters(&c);
        assert_eq!(fs.len(), 14);
        assert!(fs.iter().all(|f| is_filter(&c, &f.members)));
        let small = known::chain(9);
        let mut principal = principal_filters(&small);
        principal.sort_by(|x, y| x.canonical_key().cmp(&y.canonical_key()));
        assert_eq!(principal, all_filters(&small));
    }

    #[test]
    fn involutive_filter_membership() {
        let c = known::chain(3);
        assert!(!is_involutive_filter(&c, &Filter::new(&c, [1, 2]).unwrap()));
        for a in [known::chain(3), known::boolean_square(), known::diamond_fixed_atoms()] {
            let top = Filter::new(&a, [a.top()]).unwrap();
            let all = Filter::new(&a, 0..a.size()).unwrap();
            assert!(is_involutive_filter(&a, &top));
            assert!(is_involutive_filter(&a, &all));
        }
    }

    #[test]
    fn generated_filters() {
        let c = known::chain(3);
        assert_eq!(generated_involutive_filter(&c, &[1]).members, vec![0, 1, 2]);
        assert_eq!(generated_involutive_filter(&c, &[]).members, vec![2]);
        assert_eq!(generated_involutive_filter(&c, &[2]).members, vec![2]);
    }

    #[test]
    fn congruence_counts() {
        assert_eq!(all_congruences(&known::chain(3)).len(), 2);
        assert_eq!(all_congruences(&known::trivial()).len(), 1);
        assert_eq!(all_congruences(&known::boolean_square()).len(), 4);
        assert_eq!(all_congruences(&known::diamond_fixed_atoms()).len(), 2);
    }

    #[test]
    fn theta_and_filter_examples() {
        let c = known::chain(3);
        let top = Filter::new(&c, [2]).unwrap();
        assert!(theta_of_filter(&c, &top).unwrap().is_identity());
        let all = Filter::new(&c, 0..3).unwrap();
        assert_eq!(theta_of_filter(&c, &all).unwrap().blocks(), &[vec![0, 1, 2]]);
        let mid = Filter::new(&c, [1, 2]).unwrap();
        assert!(matches!(theta_of_filter(&c, &mid), Err(Error::NotInvolutive(1))));

        let b = known::boolean_square();
        let f = Filter::new(&b, [1, 3]).unwrap();
        let theta = theta_of_filter(&b, &f).unwrap();
        assert_eq!(theta.blocks(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(filter_of_theta(&b, &theta), f);
        assert_eq!(filter_of_theta(&b, &Congruence::identity(4)).members, vec![3]);
        assert_eq!(filter_of_theta(&b, &Congruence::all(4)).members, vec![0, 1, 2, 3]);
    }

    #[test]
    fn centers() {
        assert_eq!(involutive_center(&known::chain(3)).members, vec![0, 2]);
        let b = involutive_center(&known::boolean_square());
        assert_eq!(b.members, vec![0, 1, 2, 3]);
        assert!(b.boolean);
        assert_eq!(involutive_center(&known::diamond_fixed_atoms()).members, vec![0, 3]);
    }

    #[test]
    fn si_examples() {
        let v = is_subdirectly_irreducible(&known::chain(3)).unwrap();
        assert!(v.subdirectly_irreducible);
        assert!(v.monolith.unwrap().blocks().len() == 1);
        let v = is_subdirectly_irreducible(&known::boolean_square()).unwrap();
        assert!(!v.subdirectly_irreducible);
        assert_eq!(v.center_witness, Some(1));
        assert!(is_subdirectly_irreducible(&known::diamond_fixed_atoms()).unwrap().subdirectly_irreducible);
        assert!(matches!(is_subdirectly_irreducible(&known::trivial()), Err(Error::TrivialAlgebra)));
    }

    #[test]
    fn center_bijection_examples() {
        let r = check_ic_filter_bijection(&known::chain(3));
        assert!(r.holds);
        assert_eq!((r.involutive_filters, r.center_filters), (2, 2));
        let r = check_ic_filter_bijection(&known::boolean_square());
        assert!(r.holds);
        assert_eq!((r.involutive_filters, r.center_filters), (4, 4));
        let r = check_ic_filter_bijection(&known::trivial());
        assert!(r.holds);
        assert_eq!((r.involutive_filters, r.center_filters), (1, 1));
    }

    #[test]
    fn partition_helpers() {
        assert!(Congruence::from_blocks(3, &[vec![0, 1], vec![1, 2]]).is_none());
        assert!(Congruence::from_blocks(3, &[vec![0, 1]]).is_none());
        let c = Congruence::from_blocks(3, &[vec![2], vec![0, 1]]).unwrap();
        assert_eq!(c.blocks(), &[vec![0, 1], vec![2]]);
        assert!(Congruence::identity(3).is_finer_than(&c));
        assert!(c.is_finer_than(&Congruence::all(3)));
        assert!(!c.is_finer_than(&Congruence::identity(3)));
    }
}
