//! Enumeration of finite HI-algebras up to isomorphism.
//!
//! Distributive lattices come from posets: the downsets of a finite poset,
//! ordered by inclusion, form a distributive lattice and every finite
//! distributive lattice arises this way. Each lattice is paired with its
//! involutions up to lattice automorphism.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{check_derived_identities, FinitePoset, HIAlgebra, HiOps};
use crate::error::{Error, Result};
use crate::filters::{all_congruences, involutive_center, involutive_filters, is_subdirectly_irreducible};
use crate::format::algebra_to_json;
use crate::power::InjectivityBounds;

/// Largest lattice size accepted by the enumerators.
pub const MAX_CATALOG_SIZE: usize = 10;

fn check_cap(max_size: usize) -> Result<()> {
    if max_size > MAX_CATALOG_SIZE {
        return Err(Error::SizeBound { requested: max_size, limit: MAX_CATALOG_SIZE });
    }
    Ok(())
}

/// Lexicographically least `[n, order bits row-major, involution]` over all
/// relabelings fixing `0` and `n-1`, with the relabeling (old index to new)
/// that attains it. Without an involution only the order bits are used.
pub fn canonical_form(p: &FinitePoset, inv: Option<&[usize]>) -> (Vec<u8>, Vec<usize>) {
    let n = p.size();
    let mut order: Vec<usize> = (0..n).collect();
    let mut best: Option<(Vec<u8>, Vec<usize>)> = None;
    let mut new_of = vec![0usize; n];
    let mut buf = Vec::with_capacity(1 + n * n + n);

    let mut visit = |order: &[usize], best: &mut Option<(Vec<u8>, Vec<usize>)>| {
        for (i, &o) in order.iter().enumerate() {
            new_of[o] = i;
        }
        buf.clear();
        buf.push(n as u8);
        let mut state = std::cmp::Ordering::Equal;
        let mut push = |byte: u8, buf: &mut Vec<u8>| -> bool {
            if state == std::cmp::Ordering::Equal {
                if let Some((b, _)) = best.as_ref() {
                    state = byte.cmp(&b[buf.len()]);
                    if state == std::cmp::Ordering::Greater {
                        return false;
                    }
                }
            }
            buf.push(byte);
            true
        };
        for &oi in order {
            for &oj in order {
                if !push(p.leq(oi, oj) as u8, &mut buf) {
                    return;
                }
            }
        }
        if let Some(inv) = inv {
            for &oi in order {
                if !push(new_of[inv[oi]] as u8, &mut buf) {
                    return;
                }
            }
        }
        if best.is_none() || state == std::cmp::Ordering::Less {
            *best = Some((buf.clone(), new_of.clone()));
        }
    };

    if n <= 3 {
        visit(&order, &mut best);
    } else {
        // Heap's algorithm over the interior positions
        let k = n - 2;
        let mut c = vec![0usize; k];
        visit(&order, &mut best);
        let mut i = 0;
        while i < k {
            if c[i] < i {
                if i % 2 == 0 {
                    order.swap(1, 1 + i);
                } else {
                    order.swap(1 + c[i], 1 + i);
                }
                visit(&order, &mut best);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
    }
    best.expect("at least one relabeling")
}

/// Canonical key of an HI-algebra: equal keys exactly for isomorphic algebras.
pub fn canonical_key(a: &HIAlgebra) -> Vec<u8> {
    canonical_form(a.poset(), Some(a.involution())).0
}

/// The algebra with element `x` renamed to `new_of[x]`.
pub fn relabel(a: &HIAlgebra, new_of: &[usize]) -> Result<HIAlgebra> {
    let n = a.size();
    let mut old_of = vec![0; n];
    for (x, &y) in new_of.iter().enumerate() {
        old_of[y] = x;
    }
    let rows = (0..n).map(|i| (0..n).map(|j| a.leq(old_of[i], old_of[j])).collect()).collect();
    let inv = (0..n).map(|i| new_of[a.inv(old_of[i])]).collect();
    let b = HIAlgebra::from_order(rows, inv)?;
    Ok(match a.name() {
        Some(name) => b.with_name(name),
        None => b,
    })
}

/// Downset lattice from a list of downset bitmasks.
fn downset_lattice(downsets: &[u32]) -> FinitePoset {
    let mut d = downsets.to_vec();
    d.sort_by_key(|&m| (m.count_ones(), m));
    FinitePoset::from_fn(d.len(), |i, j| d[i] & !d[j] == 0).expect("inclusion of downsets is a bounded order")
}

/// Order-only canonical key restricted to linear extensions. Isomorphism
/// invariant and cheap on the narrow lattices seen here; used to drop
/// duplicates before the full canonical form is computed.
fn linear_extension_key(p: &FinitePoset) -> Vec<u8> {
    fn go(p: &FinitePoset, placed: &mut Vec<usize>, used: &mut [bool], best: &mut Option<Vec<u8>>) {
        let n = p.size();
        if placed.len() == n {
            let key: Vec<u8> = placed
                .iter()
                .flat_map(|&i| placed.iter().map(move |&j| p.leq(i, j) as u8))
                .collect();
            if best.as_ref().is_none_or(|b| key < *b) {
                *best = Some(key);
            }
            return;
        }
        for x in 0..n {
            if !used[x] && (0..n).all(|y| used[y] || y == x || !p.leq(y, x)) {
                used[x] = true;
                placed.push(x);
                go(p, placed, used, best);
                placed.pop();
                used[x] = false;
            }
        }
    }
    let mut best = None;
    go(p, &mut Vec::new(), &mut vec![false; p.size()], &mut best);
    best.unwrap_or_default()
}

/// All distributive lattices with at most `max_size` elements, one per
/// isomorphism class, ordered by size then canonical key.
pub fn enumerate_distributive_lattices(max_size: usize) -> Result<Vec<FinitePoset>> {
    check_cap(max_size)?;
    if max_size == 0 {
        return Ok(Vec::new());
    }
    let mut seen_exact: HashSet<Vec<bool>> = HashSet::new();
    let mut seen_iso: HashSet<Vec<u8>> = HashSet::new();
    let mut found: Vec<FinitePoset> = Vec::new();

    // naturally labeled posets, grown one maximal-in-label element at a time;
    // adding an element never shrinks the downset count, so it prunes
    let mut stack: Vec<(usize, Vec<u32>)> = vec![(0, vec![0])];
    while let Some((k, downsets)) = stack.pop() {
        let lattice = downset_lattice(&downsets);
        if seen_exact.insert(lattice.rows().concat()) && seen_iso.insert(linear_extension_key(&lattice)) {
            found.push(lattice);
        }
        for &below in &downsets {
            let mut next = downsets.clone();
            next.extend(downsets.iter().filter(|&&s| s & below == below).map(|&s| s | 1 << k));
            if next.len() <= max_size {
                stack.push((k + 1, next));
            }
        }
    }
    let mut keyed: Vec<(Vec<u8>, FinitePoset)> = found
        .into_iter()
        .map(|l| {
            let (key, new_of) = canonical_form(&l, None);
            let n = l.size();
            let mut old_of = vec![0; n];
            for (x, &y) in new_of.iter().enumerate() {
                old_of[y] = x;
            }
            (key, FinitePoset::from_fn(n, |i, j| l.leq(old_of[i], old_of[j])).expect("relabeling fixes the bounds"))
        })
        .collect();
    keyed.sort_by(|a, b| a.1.size().cmp(&b.1.size()).then_with(|| a.0.cmp(&b.0)));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(keyed.into_iter().map(|(_, l)| l).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvolutionListing {
    /// Every involution, in lexicographic order.
    pub exact: Vec<Vec<usize>>,
    /// One representative per conjugacy class under lattice automorphisms:
    /// the lexicographically least member of its class.
    pub up_to_automorphism: Vec<Vec<usize>>,
}

/// Order automorphisms of a finite poset, in lexicographic order.
pub fn order_automorphisms(p: &FinitePoset) -> Vec<Vec<usize>> {
    fn go(p: &FinitePoset, map: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let x = map.len();
        if x == p.size() {
            out.push(map.clone());
            return;
        }
        for y in 0..p.size() {
            if !used[y] && (0..x).all(|z| p.leq(z, x) == p.leq(map[z], y) && p.leq(x, z) == p.leq(y, map[z])) {
                used[y] = true;
                map.push(y);
                go(p, map, used, out);
                map.pop();
                used[y] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(p, &mut Vec::new(), &mut vec![false; p.size()], &mut out);
    out
}

/// Order-reversing self-inverse permutations of a lattice. On a lattice these
/// are exactly the maps with `σ(a ∨ b) = σa ∧ σb` and `σσa = a`.
pub fn enumerate_involutions(l: &FinitePoset) -> InvolutionListing {
    fn go(l: &FinitePoset, sigma: &mut Vec<Option<usize>>, out: &mut Vec<Vec<usize>>) {
        let n = l.size();
        let Some(a) = sigma.iter().position(Option::is_none) else {
            out.push(sigma.iter().map(|s| s.unwrap()).collect());
            return;
        };
        for b in 0..n {
            if sigma[b].is_some() && b != a {
                continue;
            }
            let ok = (0..n).all(|x| match sigma[x] {
                Some(sx) => {
                    l.leq(a, x) == l.leq(sx, b)
                        && l.leq(x, a) == l.leq(b, sx)
                        && l.leq(b, x) == l.leq(sx, a)
                        && l.leq(x, b) == l.leq(a, sx)
                }
                None => true,
            });
            if !ok {
                continue;
            }
            sigma[a] = Some(b);
            sigma[b] = Some(a);
            go(l, sigma, out);
            sigma[a] = None;
            sigma[b] = None;
        }
    }
    let mut exact = Vec::new();
    go(l, &mut vec![None; l.size()], &mut exact);
    exact.sort();

    let autos = order_automorphisms(l);
    let mut up_to_automorphism = Vec::new();
    for s in &exact {
        let least = autos
            .iter()
            .map(|alpha| {
                let mut alpha_inv = vec![0; alpha.len()];
                for (x, &y) in alpha.iter().enumerate() {
                    alpha_inv[y] = x;
                }
                (0..s.len()).map(|x| alpha[s[alpha_inv[x]]]).collect::<Vec<_>>()
            })
            .min()
            .expect("identity automorphism");
        if &least == s {
            up_to_automorphism.push(s.clone());
        }
    }
    InvolutionListing { exact, up_to_automorphism }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub max_size: usize,
    pub si_only: bool,
    pub output: Option<PathBuf>,
    pub bounds: InjectivityBounds,
}

impl RunConfig {
    pub fn new(max_size: usize) -> Self {
        RunConfig { max_size, si_only: false, output: None, bounds: InjectivityBounds::default() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    #[serde(skip)]
    pub algebra: HIAlgebra,
    pub name: String,
    pub size: usize,
    pub si: bool,
    pub trivial: bool,
    pub ic_size: usize,
    pub congruence_count: usize,
    pub involutive_filter_count: usize,
    #[serde(serialize_with = "serialize_hex")]
    pub canonical_key: Vec<u8>,
}

fn serialize_hex<S: serde::Serializer>(key: &[u8], s: S) -> std::result::Result<S::Ok, S::Error> {
    let hex: String = key.iter().map(|b| format!("{b:02x}")).collect();
    s.serialize_str(&hex)
}

/// One entry per HI-algebra up to isomorphism, relabeled into canonical
/// form, annotated, and ordered by size then canonical key.
pub fn build_catalog(cfg: &RunConfig) -> Result<Vec<CatalogEntry>> {
    if cfg.max_size == 0 {
        return Err(Error::Malformed("max_size must be at least 1".into()));
    }
    let mut raw: BTreeMap<(usize, Vec<u8>), HIAlgebra> = BTreeMap::new();
    for l in enumerate_distributive_lattices(cfg.max_size)? {
        for inv in enumerate_involutions(&l).up_to_automorphism {
            let (key, new_of) = canonical_form(&l, Some(&inv));
            let a = HIAlgebra::new(l.clone(), inv)?;
            raw.entry((a.size(), key)).or_insert(relabel(&a, &new_of)?);
        }
    }
    let annotated: Vec<Result<CatalogEntry>> =
        raw.into_iter().collect::<Vec<_>>().into_par_iter().map(|((_, key), a)| annotate(a, key)).collect();
    let mut entries = Vec::new();
    let mut per_size: BTreeMap<usize, usize> = BTreeMap::new();
    for e in annotated {
        let mut e = e?;
        if cfg.si_only && !e.si {
            continue;
        }
        let idx = per_size.entry(e.size).or_insert(0);
        *idx += 1;
        e.name = format!("hi{:02}-{:03}", e.size, idx);
        e.algebra = e.algebra.with_name(e.name.clone());
        entries.push(e);
    }
    Ok(entries)
}

fn annotate(a: HIAlgebra, canonical_key: Vec<u8>) -> Result<CatalogEntry> {
    let report = check_derived_identities(&a);
    if !report.ok {
        return Err(Error::InternalInconsistency(format!("enumerated algebra fails its identities: {report}")));
    }
    let congruence_count = all_congruences(&a).len();
    let involutive_filter_count = involutive_filters(&a).len();
    if congruence_count != involutive_filter_count {
        return Err(Error::InternalInconsistency(format!(
            "{congruence_count} congruences but {involutive_filter_count} involutive filters"
        )));
    }
    let trivial = a.size() == 1;
    let si = !trivial && is_subdirectly_irreducible(&a)?.subdirectly_irreducible;
    Ok(CatalogEntry {
        name: String::new(),
        size: a.size(),
        si,
        trivial,
        ic_size: involutive_center(&a).len(),
        congruence_count,
        involutive_filter_count,
        canonical_key,
        algebra: a,
    })
}

#[derive(Serialize)]
struct IndexRow<'a> {
    file: String,
    #[serde(flatten)]
    entry: &'a CatalogEntry,
}

/// Writes `<name>.json` per entry plus `index.json`. Output depends only on
/// the entries.
pub fn write_catalog(entries: &[CatalogEntry], dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut index = Vec::with_capacity(entries.len());
    for e in entries {
        let file = format!("{}.json", e.name);
        fs::write(dir.join(&file), algebra_to_json(&e.algebra))?;
        index.push(IndexRow { file, entry: e });
    }
    let mut text = serde_json::to_string_pretty(&index)?;
    text.push('\n');
    fs::write(dir.join("index.json"), text)?;
    Ok(())
}
