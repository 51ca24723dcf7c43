//! Direct powers, subalgebras, finite Boolean powers, homomorphism search and
//! bounded injectivity checks.
//!
//! An element of `A^n` is a tuple `(a₀, …, aₙ₋₁)` encoded in base `|A|` with
//! the first coordinate most significant, so numeric order on encodings is
//! lexicographic order on tuples. The all-bottom tuple encodes to `0` and the
//! all-top tuple to `|A|^n - 1`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{HIAlgebra, HiOps};
use crate::error::{Error, Result};
use crate::filters::is_subdirectly_irreducible;

/// Default bound on the carrier of a direct power.
pub const DEFAULT_SIZE_LIMIT: usize = 1_000_000;
/// Largest carrier scanned when enumerating subalgebras.
pub const SUBALGEBRA_SCAN_LIMIT: usize = 1 << 16;
/// Largest carrier turned into explicit operation tables.
pub const MATERIALIZE_LIMIT: usize = 256;
/// Largest source algebra for homomorphism search.
pub const HOMOMORPHISM_LIMIT: usize = 4096;

#[derive(Clone, Debug)]
pub struct PowerAlgebra {
    base: Arc<HIAlgebra>,
    exponent: usize,
    size: usize,
}

impl PartialEq for PowerAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.exponent == other.exponent && self.base == other.base
    }
}

impl Eq for PowerAlgebra {}

impl PowerAlgebra {
    pub fn base(&self) -> &HIAlgebra {
        &self.base
    }

    pub fn exponent(&self) -> usize {
        self.exponent
    }

    pub fn encode(&self, coords: &[usize]) -> usize {
        let b = self.base.size();
        coords.iter().fold(0, |acc, &c| acc * b + c)
    }

    pub fn decode(&self, mut x: usize) -> Vec<usize> {
        let b = self.base.size();
        let mut out = vec![0; self.exponent];
        for slot in out.iter_mut().rev() {
            *slot = x % b;
            x /= b;
        }
        out
    }

    /// Encoding of the constant tuple `(a, …, a)`.
    pub fn constant(&self, a: usize) -> usize {
        self.encode(&vec![a; self.exponent])
    }

    #[inline]
    fn zip(&self, x: usize, y: usize, op: impl Fn(usize, usize) -> usize) -> usize {
        let b = self.base.size();
        let (mut x, mut y, mut place, mut out) = (x, y, 1, 0);
        for _ in 0..self.exponent {
            out += op(x % b, y % b) * place;
            x /= b;
            y /= b;
            place *= b;
        }
        out
    }

    #[inline]
    fn map(&self, x: usize, op: impl Fn(usize) -> usize) -> usize {
        self.zip(x, 0, |a, _| op(a))
    }

    /// Explicit operation tables, for small powers.
    pub fn to_algebra(&self) -> Result<HIAlgebra> {
        materialize(self)
    }
}

impl HiOps for PowerAlgebra {
    fn size(&self) -> usize {
        self.size
    }
    fn leq(&self, x: usize, y: usize) -> bool {
        let b = self.base.size();
        let (mut x, mut y) = (x, y);
        for _ in 0..self.exponent {
            if !self.base.leq(x % b, y % b) {
                return false;
            }
            x /= b;
            y /= b;
        }
        true
    }
    fn meet(&self, x: usize, y: usize) -> usize {
        self.zip(x, y, |a, b| self.base.meet(a, b))
    }
    fn join(&self, x: usize, y: usize) -> usize {
        self.zip(x, y, |a, b| self.base.join(a, b))
    }
    fn imp(&self, x: usize, y: usize) -> usize {
        self.zip(x, y, |a, b| self.base.imp(a, b))
    }
    fn neg(&self, x: usize) -> usize {
        self.map(x, |a| self.base.neg(a))
    }
    fn inv(&self, x: usize) -> usize {
        self.map(x, |a| self.base.inv(a))
    }
}

fn materialize(alg: &(impl HiOps + ?Sized)) -> Result<HIAlgebra> {
    let n = alg.size();
    if n > MATERIALIZE_LIMIT {
        return Err(Error::SizeBound { requested: n, limit: MATERIALIZE_LIMIT });
    }
    let rows = (0..n).map(|i| (0..n).map(|j| alg.leq(i, j)).collect()).collect();
    let a = HIAlgebra::from_order(rows, (0..n).map(|i| alg.inv(i)).collect())?;
    for x in 0..n {
        for y in 0..n {
            if a.meet(x, y) != alg.meet(x, y)
                || a.join(x, y) != alg.join(x, y)
                || a.imp(x, y) != alg.imp(x, y)
            {
                return Err(Error::InternalInconsistency(format!(
                    "derived tables disagree with the source operations at ({x}, {y})"
                )));
            }
        }
    }
    Ok(a)
}

pub fn direct_power(a: &HIAlgebra, exponent: usize) -> Result<PowerAlgebra> {
    direct_power_bounded(a, exponent, DEFAULT_SIZE_LIMIT)
}

pub fn direct_power_bounded(a: &HIAlgebra, exponent: usize, limit: usize) -> Result<PowerAlgebra> {
    if exponent == 0 {
        return Err(Error::Malformed("power exponent must be positive".into()));
    }
    let mut size: usize = 1;
    for _ in 0..exponent {
        size = size
            .checked_mul(a.size())
            .filter(|&s| s <= limit)
            .ok_or(Error::SizeBound { requested: size.saturating_mul(a.size()), limit })?;
    }
    Ok(PowerAlgebra { base: Arc::new(a.clone()), exponent, size })
}

/// An operation-closed subset of a direct power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subalgebra {
    parent: PowerAlgebra,
    members: Vec<usize>,
    diagonal: bool,
}

impl Subalgebra {
    /// Checks closure of a member set under every operation.
    pub fn new(parent: &PowerAlgebra, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: Vec<usize> = members.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        if let Some(&x) = members.iter().find(|&&x| x >= parent.size()) {
            return Err(Error::OutOfRange { element: x, size: parent.size() });
        }
        let closed = close(parent, &members, parent.size())?;
        if closed != members {
            return Err(Error::Malformed(format!(
                "member set is not closed under the operations ({} elements, closure has {})",
                members.len(),
                closed.len()
            )));
        }
        Ok(Self::from_closed(parent, members))
    }

    fn from_closed(parent: &PowerAlgebra, members: Vec<usize>) -> Self {
        let diagonal = (0..parent.base().size())
            .all(|a| members.binary_search(&parent.constant(a)).is_ok());
        Subalgebra { parent: parent.clone(), members, diagonal }
    }

    /// The whole power as a subalgebra of itself.
    pub fn full(parent: &PowerAlgebra) -> Self {
        Self::from_closed(parent, (0..parent.size()).collect())
    }

    pub fn parent(&self) -> &PowerAlgebra {
        &self.parent
    }

    /// Sorted tuple encodings.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    /// Local index of a member encoding.
    pub fn index_of(&self, x: usize) -> Option<usize> {
        self.members.binary_search(&x).ok()
    }

    pub fn is_subalgebra_of(&self, other: &Subalgebra) -> bool {
        self.parent == other.parent && self.members.iter().all(|&x| other.contains(x))
    }

    pub fn to_algebra(&self) -> Result<HIAlgebra> {
        materialize(self)
    }

    #[inline]
    fn local(&self, x: usize) -> usize {
        self.index_of(x).expect("subalgebra is closed")
    }
}

/// Local indices `0..len`, ordered like the member encodings.
impl HiOps for Subalgebra {
    fn size(&self) -> usize {
        self.members.len()
    }
    fn leq(&self, a: usize, b: usize) -> bool {
        self.parent.leq(self.members[a], self.members[b])
    }
    fn meet(&self, a: usize, b: usize) -> usize {
        self.local(self.parent.meet(self.members[a], self.members[b]))
    }
    fn join(&self, a: usize, b: usize) -> usize {
        self.local(self.parent.join(self.members[a], self.members[b]))
    }
    fn imp(&self, a: usize, b: usize) -> usize {
        self.local(self.parent.imp(self.members[a], self.members[b]))
    }
    fn neg(&self, a: usize) -> usize {
        self.local(self.parent.neg(self.members[a]))
    }
    fn inv(&self, a: usize) -> usize {
        self.local(self.parent.inv(self.members[a]))
    }
}

/// Least operation-closed set containing `gens` and both bounds, or
/// `SizeBound` once it grows past `limit`.
fn close(p: &PowerAlgebra, gens: &[usize], limit: usize) -> Result<Vec<usize>> {
    let mut seen: HashSet<usize> = HashSet::new();
    let mut elems: Vec<usize> = Vec::new();
    let add = |x: usize, seen: &mut HashSet<usize>, elems: &mut Vec<usize>| -> Result<()> {
        if seen.insert(x) {
            elems.push(x);
            if elems.len() > limit {
                return Err(Error::SizeBound { requested: elems.len(), limit });
            }
        }
        Ok(())
    };
    add(p.bottom(), &mut seen, &mut elems)?;
    add(p.top(), &mut seen, &mut elems)?;
    for &g in gens {
        if g >= p.size() {
            return Err(Error::OutOfRange { element: g, size: p.size() });
        }
        add(g, &mut seen, &mut elems)?;
    }
    let mut i = 0;
    while i < elems.len() {
        let x = elems[i];
        add(p.inv(x), &mut seen, &mut elems)?;
        add(p.neg(x), &mut seen, &mut elems)?;
        for j in 0..=i {
            let y = elems[j];
            add(p.meet(x, y), &mut seen, &mut elems)?;
            add(p.join(x, y), &mut seen, &mut elems)?;
            add(p.imp(x, y), &mut seen, &mut elems)?;
            add(p.imp(y, x), &mut seen, &mut elems)?;
        }
        i += 1;
    }
    elems.sort_unstable();
    Ok(elems)
}

pub fn subalgebra_generated(p: &PowerAlgebra, gens: &[usize]) -> Result<Subalgebra> {
    Ok(Subalgebra::from_closed(p, close(p, gens, p.size())?))
}

/// Like [`subalgebra_generated`], failing with `SizeBound` past `limit`.
pub fn subalgebra_generated_bounded(p: &PowerAlgebra, gens: &[usize], limit: usize) -> Result<Subalgebra> {
    Ok(Subalgebra::from_closed(p, close(p, gens, limit)?))
}

pub fn is_diagonal_subalgebra(s: &Subalgebra) -> bool {
    s.is_diagonal()
}

fn enumerate_closed(p: &PowerAlgebra, universe: &[usize], max_size: usize) -> Vec<Vec<usize>> {
    let least = match close(p, &[], max_size) {
        Ok(s) => s,
        Err(_) => return Vec::new(),
    };
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(least.clone());
    let mut queue = vec![least];
    let mut i = 0;
    while i < queue.len() {
        let s = queue[i].clone();
        for &x in universe {
            if s.binary_search(&x).is_ok() {
                continue;
            }
            let mut gens = s.clone();
            gens.push(x);
            if let Ok(t) = close(p, &gens, max_size) {
                if seen.insert(t.clone()) {
                    queue.push(t);
                }
            }
        }
        i += 1;
    }
    queue.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    queue
}

/// Every subalgebra with at most `max_size` elements, ordered by size then
/// member list.
pub fn enumerate_subalgebras(p: &PowerAlgebra, max_size: usize) -> Result<Vec<Subalgebra>> {
    if p.size() > SUBALGEBRA_SCAN_LIMIT {
        return Err(Error::SizeBound { requested: p.size(), limit: SUBALGEBRA_SCAN_LIMIT });
    }
    let universe: Vec<usize> = (0..p.size()).collect();
    Ok(enumerate_closed(p, &universe, max_size)
        .into_iter()
        .map(|m| Subalgebra::from_closed(p, m))
        .collect())
}

/// Subalgebras of `d` with at most `max_size` elements.
pub fn enumerate_subalgebras_within(d: &Subalgebra, max_size: usize) -> Vec<Subalgebra> {
    enumerate_closed(&d.parent, &d.members, max_size)
        .into_iter()
        .map(|m| Subalgebra::from_closed(&d.parent, m))
        .collect()
}

/// A finite Boolean power `C[2^k]`, realized as `C^k`.
#[derive(Clone, Debug)]
pub struct BooleanPower {
    pub power: PowerAlgebra,
    pub atoms: usize,
    pub note: String,
}

impl BooleanPower {
    /// Finite, hence complete as a lattice.
    pub fn is_complete_lattice(&self) -> bool {
        true
    }
}

pub fn boolean_power_finite(a: &HIAlgebra, atoms: usize) -> Result<BooleanPower> {
    let power = direct_power(a, atoms)?;
    let note = format!(
        "B = 2^{atoms} with atoms e1..e{atoms}; an element of C[B] is a partition of unity \
         (b_c) indexed by C, identified with the tuple whose i-th coordinate is the unique c \
         with e_i <= b_c"
    );
    Ok(BooleanPower { power, atoms, note })
}

/// The Boolean power `C[2^k]` built from partitions of unity: an element is
/// a map `f: C → 2^k` with pairwise disjoint values joining to the top, and
/// `(f ⊙ g)(c) = ⋁ {f(a) ∧ g(b) : a ⊙ b = c}`. The order is recovered from
/// the meet and the remaining operations are re-derived and cross-checked.
pub fn step_function_power(a: &HIAlgebra, atoms: usize) -> Result<HIAlgebra> {
    let n = a.size();
    if atoms == 0 || atoms > 16 {
        return Err(Error::Malformed(format!("atom count {atoms} outside 1..=16")));
    }
    let full: u32 = (1u32 << atoms) - 1;
    let candidates = (full as usize + 1)
        .checked_pow(n as u32)
        .filter(|&c| c <= DEFAULT_SIZE_LIMIT)
        .ok_or(Error::SizeBound { requested: usize::MAX, limit: DEFAULT_SIZE_LIMIT })?;
    let mut elems: Vec<Vec<u32>> = Vec::new();
    for code in 0..candidates {
        let mut f = Vec::with_capacity(n);
        let mut rest = code;
        for _ in 0..n {
            f.push((rest % (full as usize + 1)) as u32);
            rest /= full as usize + 1;
        }
        let mut union = 0u32;
        let disjoint = f.iter().all(|&m| {
            let ok = union & m == 0;
            union |= m;
            ok
        });
        if disjoint && union == full {
            elems.push(f);
        }
    }
    let point = |c: usize| -> Vec<u32> { (0..n).map(|x| if x == c { full } else { 0 }).collect() };
    let (bottom, top) = (point(a.bottom()), point(a.top()));
    elems.retain(|f| *f != bottom && *f != top);
    elems.sort();
    elems.insert(0, bottom.clone());
    if top != bottom {
        elems.push(top);
    }
    let index: HashMap<Vec<u32>, usize> = elems.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    let binary = |f: &[u32], g: &[u32], op: &dyn Fn(usize, usize) -> usize| -> usize {
        let mut h = vec![0u32; n];
        for x in 0..n {
            for y in 0..n {
                h[op(x, y)] |= f[x] & g[y];
            }
        }
        index[&h]
    };
    let unary = |f: &[u32], op: &dyn Fn(usize) -> usize| -> usize {
        let mut h = vec![0u32; n];
        for x in 0..n {
            h[op(x)] |= f[x];
        }
        index[&h]
    };
    let m = elems.len();
    let meet = |i: usize, j: usize| binary(&elems[i], &elems[j], &|x, y| a.meet(x, y));
    let rows: Vec<Vec<bool>> = (0..m).map(|i| (0..m).map(|j| meet(i, j) == i).collect()).collect();
    let inv: Vec<usize> = (0..m).map(|i| unary(&elems[i], &|x| a.inv(x))).collect();
    let alg = HIAlgebra::from_order(rows, inv)?;
    for i in 0..m {
        if alg.neg(i) != unary(&elems[i], &|x| a.neg(x)) {
            return Err(Error::InternalInconsistency(format!("step-function ¬ disagrees at {i}")));
        }
        for j in 0..m {
            if alg.join(i, j) != binary(&elems[i], &elems[j], &|x, y| a.join(x, y))
                || alg.imp(i, j) != binary(&elems[i], &elems[j], &|x, y| a.imp(x, y))
            {
                return Err(Error::InternalInconsistency(format!(
                    "step-function operations disagree at ({i}, {j})"
                )));
            }
        }
    }
    Ok(alg.with_name(format!("{}[2^{atoms}]", a.name().unwrap_or("C"))))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

impl Homomorphism {
    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn identity(n: usize) -> Self {
        Homomorphism { map: (0..n).collect() }
    }
}

/// Exhaustive check that `map` preserves every operation and both bounds.
pub fn is_homomorphism<S: HiOps + ?Sized, T: HiOps + ?Sized>(src: &S, tgt: &T, map: &[usize]) -> bool {
    let n = src.size();
    if map.len() != n || map.iter().any(|&y| y >= tgt.size()) {
        return false;
    }
    if map[src.bottom()] != tgt.bottom() || map[src.top()] != tgt.top() {
        return false;
    }
    (0..n).all(|x| {
        map[src.inv(x)] == tgt.inv(map[x])
            && map[src.neg(x)] == tgt.neg(map[x])
            && (0..n).all(|y| {
                map[src.meet(x, y)] == tgt.meet(map[x], map[y])
                    && map[src.join(x, y)] == tgt.join(map[x], map[y])
                    && map[src.imp(x, y)] == tgt.imp(map[x], map[y])
            })
    })
}

struct HomSearch<'a, S: ?Sized, T: ?Sized> {
    src: &'a S,
    tgt: &'a T,
    injective: bool,
    first_only: bool,
    nodes: usize,
    found: Vec<Homomorphism>,
}

impl<S: HiOps + ?Sized, T: HiOps + ?Sized> HomSearch<'_, S, T> {
    /// Assigns `x ↦ y` and everything it forces. `false` on conflict.
    fn assign(&self, map: &mut [Option<usize>], used: &mut [bool], x: usize, y: usize) -> bool {
        let mut pending = vec![(x, y)];
        let mut assigned: Vec<usize> = (0..map.len()).filter(|&i| map[i].is_some()).collect();
        while let Some((x, y)) = pending.pop() {
            match map[x] {
                Some(v) if v == y => continue,
                Some(_) => return false,
                None => {}
            }
            if self.injective {
                if used[y] {
                    return false;
                }
                used[y] = true;
            }
            map[x] = Some(y);
            assigned.push(x);
            let (s, t) = (self.src, self.tgt);
            pending.push((s.inv(x), t.inv(y)));
            pending.push((s.neg(x), t.neg(y)));
            for &z in &assigned {
                let w = map[z].expect("assigned");
                pending.push((s.meet(x, z), t.meet(y, w)));
                pending.push((s.join(x, z), t.join(y, w)));
                pending.push((s.imp(x, z), t.imp(y, w)));
                pending.push((s.imp(z, x), t.imp(w, y)));
            }
        }
        true
    }

    fn run(&mut self, map: Vec<Option<usize>>, used: Vec<bool>) {
        self.nodes += 1;
        let Some(x) = map.iter().position(Option::is_none) else {
            self.found.push(Homomorphism { map: map.into_iter().map(Option::unwrap).collect() });
            return;
        };
        for y in 0..self.tgt.size() {
            if self.injective && used[y] {
                continue;
            }
            let (mut m, mut u) = (map.clone(), used.clone());
            if self.assign(&mut m, &mut u, x, y) {
                self.run(m, u);
                if self.first_only && !self.found.is_empty() {
                    return;
                }
            }
        }
    }
}

fn search<S: HiOps + ?Sized, T: HiOps + ?Sized>(
    src: &S,
    tgt: &T,
    fixed: &[(usize, usize)],
    injective: bool,
    first_only: bool,
) -> (Vec<Homomorphism>, usize) {
    let mut s = HomSearch { src, tgt, injective, first_only, nodes: 0, found: Vec::new() };
    let mut map = vec![None; src.size()];
    let mut used = vec![false; tgt.size()];
    let mut seeds = vec![(src.bottom(), tgt.bottom()), (src.top(), tgt.top())];
    seeds.extend_from_slice(fixed);
    for (x, y) in seeds {
        if !s.assign(&mut map, &mut used, x, y) {
            return (Vec::new(), 1);
        }
    }
    s.run(map, used);
    (s.found, s.nodes)
}

fn check_hom_size(n: usize) -> Result<()> {
    if n > HOMOMORPHISM_LIMIT {
        return Err(Error::SizeBound { requested: n, limit: HOMOMORPHISM_LIMIT });
    }
    Ok(())
}

/// All homomorphisms in lexicographic order of their maps.
pub fn find_homomorphisms<S: HiOps + ?Sized, T: HiOps + ?Sized>(src: &S, tgt: &T) -> Result<Vec<Homomorphism>> {
    check_hom_size(src.size())?;
    Ok(search(src, tgt, &[], false, false).0)
}

/// First injective homomorphism, if any.
pub fn find_embedding<S: HiOps + ?Sized, T: HiOps + ?Sized>(src: &S, tgt: &T) -> Result<Option<Homomorphism>> {
    check_hom_size(src.size())?;
    if src.size() > tgt.size() {
        return Ok(None);
    }
    Ok(search(src, tgt, &[], true, true).0.into_iter().next())
}

/// First isomorphism in lexicographic order, or `None`.
pub fn find_isomorphism<S: HiOps + ?Sized, T: HiOps + ?Sized>(a: &S, b: &T) -> Option<Vec<usize>> {
    if a.size() != b.size() || a.size() > HOMOMORPHISM_LIMIT {
        return None;
    }
    search(a, b, &[], true, true).0.into_iter().next().map(|h| h.map)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extension {
    Extended(Homomorphism),
    /// Backtracking visited `nodes` search nodes and found no extension.
    NonExtendable { nodes: usize },
}

/// Extends `h: b → c` along the inclusion `b ⊆ d`. Maps are in local indices
/// of `b`, `d` and `c`.
pub fn extend_homomorphism<T: HiOps + ?Sized>(
    d: &Subalgebra,
    b: &Subalgebra,
    h: &Homomorphism,
    c: &T,
) -> Result<Extension> {
    check_hom_size(d.size())?;
    if !b.is_subalgebra_of(d) {
        return Err(Error::Malformed("inner subalgebra is not contained in the outer one".into()));
    }
    if !is_homomorphism(b, c, &h.map) {
        return Err(Error::Malformed("map is not a homomorphism on the inner subalgebra".into()));
    }
    let fixed: Vec<(usize, usize)> = b
        .members()
        .iter()
        .enumerate()
        .map(|(i, &x)| (d.local(x), h.map[i]))
        .collect();
    let (found, nodes) = search(d, c, &fixed, false, true);
    Ok(match found.into_iter().next() {
        Some(f) => Extension::Extended(f),
        None => Extension::NonExtendable { nodes },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityBounds {
    pub n_max: usize,
    pub m_max: usize,
}

impl Default for InjectivityBounds {
    fn default() -> Self {
        InjectivityBounds { n_max: 2, m_max: 16 }
    }
}

/// An algebra to test, presented either on its own (an embedding into a
/// power of the generator is searched for) or as a subalgebra of a power.
#[derive(Clone, Debug)]
pub enum Candidate {
    Algebra(HIAlgebra),
    Subalgebra(Subalgebra),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InjectivityStatus {
    NoCounterexampleWithinBounds,
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityWitness {
    /// `D` is a subalgebra of `A^exponent`.
    pub exponent: usize,
    pub d_members: Vec<usize>,
    /// `B ⊆ D`, as tuple encodings.
    pub b_members: Vec<usize>,
    /// `h: B → C` in local indices of `B` and `C`.
    pub h: Vec<usize>,
    /// Nodes explored while failing to extend `h`.
    pub search_nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectivityVerdict {
    pub status: InjectivityStatus,
    pub witness: Option<InjectivityWitness>,
    pub bounds: InjectivityBounds,
    /// The candidate as a subalgebra of `A^candidate_exponent`.
    pub candidate_exponent: usize,
    pub candidate_members: Vec<usize>,
    /// Contains every constant tuple of its power. Literal containment, not
    /// up to isomorphism.
    pub candidate_diagonal: bool,
    /// Finite, hence complete as a lattice.
    pub candidate_complete: bool,
    /// Triples `(D, B, h)` examined.
    pub triples_checked: usize,
    pub note: String,
}

/// Searches for `D ≤ A^n`, `B ≤ D` and `h: B → C` such that `h` does not
/// extend to `D`. The inclusion of `C` into its own power is tried first,
/// then every `D` with `n ≤ n_max` and `|D| ≤ m_max` in canonical order.
/// Finding nothing is not a proof of injectivity.
pub fn bounded_injectivity_check(
    generator: &HIAlgebra,
    candidate: &Candidate,
    bounds: InjectivityBounds,
) -> Result<InjectivityVerdict> {
    if !is_subdirectly_irreducible(generator)?.subdirectly_irreducible {
        return Err(Error::NotSubdirectlyIrreducible);
    }
    let c = match candidate {
        Candidate::Subalgebra(s) => {
            if s.parent().base().poset() != generator.poset()
                || s.parent().base().involution() != generator.involution()
            {
                return Err(Error::Malformed("candidate is not a subalgebra of a power of the generator".into()));
            }
            s.clone()
        }
        Candidate::Algebra(c) => embed_in_power(generator, c, bounds.n_max)?,
    };
    let mut verdict = InjectivityVerdict {
        status: InjectivityStatus::NoCounterexampleWithinBounds,
        witness: None,
        bounds,
        candidate_exponent: c.parent().exponent(),
        candidate_members: c.members().to_vec(),
        candidate_diagonal: c.is_diagonal(),
        candidate_complete: true,
        triples_checked: 0,
        note: String::new(),
    };

    // a retract test: C must extend its own identity over the power it sits in
    let own = c.parent();
    if own.exponent() <= bounds.n_max && own.size() <= bounds.m_max {
        let d = Subalgebra::full(own);
        verdict.triples_checked += 1;
        if let Extension::NonExtendable { nodes } =
            extend_homomorphism(&d, &c, &Homomorphism::identity(c.size()), &c)?
        {
            verdict.status = InjectivityStatus::Counterexample;
            verdict.witness = Some(InjectivityWitness {
                exponent: own.exponent(),
                d_members: d.members().to_vec(),
                b_members: c.members().to_vec(),
                h: Homomorphism::identity(c.size()).map,
                search_nodes: nodes,
            });
        }
    }

    if verdict.witness.is_none() {
        for exponent in 1..=bounds.n_max {
            let p = direct_power(generator, exponent)?;
            let ds = enumerate_subalgebras(&p, bounds.m_max)?;
            let outcomes: Vec<Result<(usize, Option<InjectivityWitness>)>> =
                ds.par_iter().map(|d| first_failure_over(d, &c)).collect();
            let mut found = None;
            for o in outcomes {
                let (count, w) = o?;
                verdict.triples_checked += count;
                if w.is_some() {
                    found = w;
                    break;
                }
            }
            if let Some(w) = found {
                verdict.status = InjectivityStatus::Counterexample;
                verdict.witness = Some(w);
                break;
            }
        }
    }

    verdict.note = match (verdict.status, verdict.candidate_diagonal) {
        (InjectivityStatus::Counterexample, _) => "the witness map does not extend: the candidate is not injective".into(),
        (_, true) => "no counterexample within bounds; the candidate is diagonal and complete, which characterizes injectivity over a finite subdirectly irreducible generator".into(),
        (_, false) => "no counterexample within bounds; the candidate is not literally diagonal, and a bounded search does not certify injectivity".into(),
    };
    Ok(verdict)
}

/// First non-extendable `(B, h)` for one `D`, with the number of triples seen.
fn first_failure_over(d: &Subalgebra, c: &Subalgebra) -> Result<(usize, Option<InjectivityWitness>)> {
    let mut count = 0;
    for b in enumerate_subalgebras_within(d, d.size()) {
        if b.size() == d.size() {
            continue;
        }
        for h in find_homomorphisms(&b, c)? {
            count += 1;
            if let Extension::NonExtendable { nodes } = extend_homomorphism(d, &b, &h, c)? {
                return Ok((
                    count,
                    Some(InjectivityWitness {
                        exponent: d.parent().exponent(),
                        d_members: d.members().to_vec(),
                        b_members: b.members().to_vec(),
                        h: h.map,
                        search_nodes: nodes,
                    }),
                ));
            }
        }
    }
    Ok((count, None))
}

/// Image of the first embedding of `c` into `A^n`, trying `n = 1, 2, …`.
pub fn embed_in_power(generator: &HIAlgebra, c: &HIAlgebra, n_max: usize) -> Result<Subalgebra> {
    for exponent in 1..=n_max {
        let p = direct_power(generator, exponent)?;
        if p.size() < c.size() {
            continue;
        }
        if let Some(h) = find_embedding(c, &p)? {
            return Subalgebra::new(&p, h.map);
        }
    }
    Err(Error::NoEmbedding { n_max })
}
