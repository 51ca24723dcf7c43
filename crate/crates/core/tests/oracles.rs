//! Brute-force cross-checks for the enumerators and the injectivity search.

use std::collections::BTreeMap;
use std::fs;

use hia_core::algebra::{known, validate_involution, FinitePoset, HIAlgebra, HiOps};
use hia_core::catalog::{
    build_catalog, canonical_key, enumerate_distributive_lattices, enumerate_involutions, relabel, write_catalog,
    RunConfig,
};
use hia_core::format::load_algebra;
use hia_core::power::{
    bounded_injectivity_check, direct_power, enumerate_subalgebras, extend_homomorphism, find_homomorphisms,
    find_isomorphism, is_homomorphism, Candidate, Extension, InjectivityBounds, InjectivityStatus, Subalgebra,
};

/// Every bounded order on `0..n` with `0` bottom and `n-1` top.
fn raw_orders(n: usize) -> Vec<FinitePoset> {
    if n <= 2 {
        return vec![FinitePoset::from_fn(n, |i, j| i <= j).unwrap()];
    }
    let inner: Vec<(usize, usize)> =
        (1..n - 1).flat_map(|i| (1..n - 1).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1 << inner.len()) {
        let rel = |i: usize, j: usize| {
            i == j || i == 0 || j == n - 1 || inner.iter().position(|&p| p == (i, j)).is_some_and(|k| mask >> k & 1 == 1)
        };
        if let Ok(p) = FinitePoset::from_fn(n, rel) {
            out.push(p);
        }
    }
    out
}

fn glb(p: &FinitePoset, a: usize, b: usize) -> Option<usize> {
    let lower: Vec<usize> = (0..p.size()).filter(|&x| p.leq(x, a) && p.leq(x, b)).collect();
    lower.iter().copied().find(|&m| lower.iter().all(|&x| p.leq(x, m)))
}

fn lub(p: &FinitePoset, a: usize, b: usize) -> Option<usize> {
    let upper: Vec<usize> = (0..p.size()).filter(|&x| p.leq(a, x) && p.leq(b, x)).collect();
    upper.iter().copied().find(|&m| upper.iter().all(|&x| p.leq(m, x)))
}

fn is_distributive_lattice(p: &FinitePoset) -> bool {
    let n = p.size();
    let pairs = || (0..n).flat_map(|a| (0..n).map(move |b| (a, b)));
    if pairs().any(|(a, b)| glb(p, a, b).is_none() || lub(p, a, b).is_none()) {
        return false;
    }
    let m = |a, b| glb(p, a, b).unwrap();
    let j = |a, b| lub(p, a, b).unwrap();
    pairs().all(|(a, b)| (0..n).all(|c| m(a, j(b, c)) == j(m(a, b), m(a, c))))
}

fn order_isomorphic(p: &FinitePoset, q: &FinitePoset) -> bool {
    fn go(p: &FinitePoset, q: &FinitePoset, map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let x = map.len();
        if x == p.size() {
            return true;
        }
        for y in 0..q.size() {
            if !used[y] && (0..x).all(|z| p.leq(z, x) == q.leq(map[z], y) && p.leq(x, z) == q.leq(y, map[z])) {
                used[y] = true;
                map.push(y);
                if go(p, q, map, used) {
                    return true;
                }
                map.pop();
                used[y] = false;
            }
        }
        false
    }
    p.size() == q.size() && go(p, q, &mut Vec::new(), &mut vec![false; q.size()])
}

fn raw_lattices(max: usize) -> Vec<FinitePoset> {
    let mut classes: Vec<FinitePoset> = Vec::new();
    for n in 1..=max {
        for p in raw_orders(n).into_iter().filter(is_distributive_lattice) {
            if !classes.iter().any(|q| order_isomorphic(&p, q)) {
                classes.push(p);
            }
        }
    }
    classes
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == v.len() {
            out.push(v.clone());
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            go(v, k + 1, out);
            v.swap(k, i);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), 0, &mut out);
    out
}

fn per_size<T>(items: &[T], size: impl Fn(&T) -> usize) -> BTreeMap<usize, usize> {
    let mut m = BTreeMap::new();
    for x in items {
        *m.entry(size(x)).or_insert(0) += 1;
    }
    m
}

#[test]
fn lattice_enumeration_matches_raw_search() {
    let raw = raw_lattices(5);
    let birkhoff = enumerate_distributive_lattices(5).unwrap();
    assert_eq!(per_size(&raw, FinitePoset::size), per_size(&birkhoff, FinitePoset::size));
    for l in &birkhoff {
        assert!(is_distributive_lattice(l));
        assert_eq!(raw.iter().filter(|r| order_isomorphic(l, r)).count(), 1);
    }
}

#[test]
fn catalog_matches_raw_search() {
    // every involution on every raw lattice, deduplicated by isomorphism
    let mut raw: Vec<HIAlgebra> = Vec::new();
    for l in raw_lattices(6) {
        for perm in permutations(l.size()) {
            let Ok(alg) = HIAlgebra::new(l.clone(), perm) else { continue };
            if !raw.iter().any(|b| find_isomorphism(&alg, b).is_some()) {
                raw.push(alg);
            }
        }
    }
    let catalog = build_catalog(&RunConfig::new(6)).unwrap();
    assert_eq!(per_size(&raw, HiOps::size), per_size(&catalog, |e| e.size));
    for e in &catalog {
        assert_eq!(raw.iter().filter(|b| find_isomorphism(&e.algebra, *b).is_some()).count(), 1, "{}", e.name);
    }
}

#[test]
fn involution_listing_matches_permutation_scan() {
    for l in enumerate_distributive_lattices(6).unwrap() {
        let (meet, join) = hia_core::algebra::derive_lattice_ops(&l).unwrap();
        let mut scan: Vec<Vec<usize>> =
            permutations(l.size()).into_iter().filter(|s| validate_involution(s, &join, &meet).ok).collect();
        scan.sort();
        let listing = enumerate_involutions(&l);
        assert_eq!(listing.exact, scan);
        // representatives are pairwise non-isomorphic and cover every involution
        let algs: Vec<HIAlgebra> =
            listing.up_to_automorphism.iter().map(|s| HIAlgebra::new(l.clone(), s.clone()).unwrap()).collect();
        for (i, a) in algs.iter().enumerate() {
            for b in &algs[i + 1..] {
                assert!(find_isomorphism(a, b).is_none());
            }
        }
        for s in &scan {
            let a = HIAlgebra::new(l.clone(), s.clone()).unwrap();
            assert!(algs.iter().any(|b| find_isomorphism(&a, b).is_some()));
        }
    }
}

#[test]
fn lattice_counts_through_size_eight() {
    let counts = per_size(&enumerate_distributive_lattices(8).unwrap(), FinitePoset::size);
    let expected: BTreeMap<usize, usize> = [(1, 1), (2, 1), (3, 1), (4, 2), (5, 3), (6, 5), (7, 8), (8, 15)].into();
    assert_eq!(counts, expected);
}

#[test]
fn canonical_keys_agree_with_isomorphism() {
    let catalog = build_catalog(&RunConfig::new(7)).unwrap();
    for (i, a) in catalog.iter().enumerate() {
        for b in &catalog[i..] {
            let iso = find_isomorphism(&a.algebra, &b.algebra).is_some();
            assert_eq!(a.canonical_key == b.canonical_key, iso, "{} {}", a.name, b.name);
        }
        // every relabeling fixing the bounds keeps the key
        let n = a.size;
        if n >= 3 {
            for mid in permutations(n - 2) {
                let new_of: Vec<usize> =
                    std::iter::once(0).chain(mid.iter().map(|x| x + 1)).chain(std::iter::once(n - 1)).collect();
                let b = relabel(&a.algebra, &new_of).unwrap();
                assert_eq!(canonical_key(&b), a.canonical_key);
            }
        }
    }
}

#[test]
fn catalog_metadata_is_rederivable() {
    for e in build_catalog(&RunConfig::new(7)).unwrap() {
        let a = &e.algebra;
        assert_eq!(e.ic_size, hia_core::filters::involutive_center(a).len());
        assert_eq!(e.congruence_count, hia_core::filters::all_congruences(a).len());
        assert_eq!(e.involutive_filter_count, hia_core::filters::involutive_filters(a).len());
        assert_eq!(e.canonical_key, canonical_key(a));
        assert!(hia_core::algebra::check_derived_identities(a).ok);
    }
}

#[test]
fn catalog_output_is_deterministic() {
    let root = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("catalog-determinism");
    let _ = fs::remove_dir_all(&root);
    let cfg = RunConfig::new(6);
    for run in ["one", "two"] {
        write_catalog(&build_catalog(&cfg).unwrap(), &root.join(run)).unwrap();
    }
    let mut names: Vec<_> = fs::read_dir(root.join("one")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 1);
    for name in &names {
        assert_eq!(fs::read(root.join("one").join(name)).unwrap(), fs::read(root.join("two").join(name)).unwrap());
    }
    for name in names.iter().filter(|n| *n != "index.json") {
        load_algebra(root.join("one").join(name)).unwrap();
    }
}

/// Every map `d → c` agreeing with `h` on `b`, by plain enumeration.
fn brute_extensions(d: &Subalgebra, b: &Subalgebra, h: &[usize], c: &impl HiOps) -> usize {
    let free: Vec<usize> = (0..d.size()).filter(|&x| !b.contains(d.members()[x])).collect();
    let m = c.size();
    let total = m.checked_pow(free.len() as u32).expect("small search");
    let mut found = 0;
    for code in 0..total {
        let mut map = vec![0; d.size()];
        for (i, &x) in b.members().iter().enumerate() {
            map[d.index_of(x).unwrap()] = h[i];
        }
        let mut rest = code;
        for &x in &free {
            map[x] = rest % m;
            rest /= m;
        }
        found += is_homomorphism(d, c, &map) as usize;
    }
    found
}

#[test]
fn extension_search_matches_brute_force() {
    let a = known::chain(3);
    let p = direct_power(&a, 2).unwrap();
    let subs = enumerate_subalgebras(&p, 9).unwrap();
    let target = Subalgebra::full(&direct_power(&a, 1).unwrap());
    for d in &subs {
        for b in subs.iter().filter(|b| b.is_subalgebra_of(d)) {
            for h in find_homomorphisms(b, &target).unwrap() {
                let brute = brute_extensions(d, b, &h.map, &target);
                match extend_homomorphism(d, b, &h, &target).unwrap() {
                    Extension::Extended(f) => {
                        assert!(brute > 0);
                        assert!(is_homomorphism(d, &target, &f.map));
                    }
                    Extension::NonExtendable { .. } => assert_eq!(brute, 0),
                }
            }
        }
    }
}

#[test]
fn diagonal_candidates_survive_the_bounded_search() {
    // finite diagonal subalgebras over a finite SI generator are injective:
    // the search must never refute one, and every refutation must re-verify
    for a in [known::chain(2), known::chain(3), known::diamond_fixed_atoms()] {
        let bounds = InjectivityBounds { n_max: 2, m_max: 9 };
        for n in 1..=2 {
            let p = direct_power(&a, n).unwrap();
            for c in enumerate_subalgebras(&p, p.size()).unwrap() {
                let v = bounded_injectivity_check(&a, &Candidate::Subalgebra(c.clone()), bounds).unwrap();
                if c.is_diagonal() {
                    assert_eq!(v.status, InjectivityStatus::NoCounterexampleWithinBounds, "{:?}", c.members());
                }
                if let Some(w) = &v.witness {
                    let pw = direct_power(&a, w.exponent).unwrap();
                    let d = Subalgebra::new(&pw, w.d_members.iter().copied()).unwrap();
                    let b = Subalgebra::new(&pw, w.b_members.iter().copied()).unwrap();
                    assert!(b.is_subalgebra_of(&d));
                    assert!(is_homomorphism(&b, &c, &w.h));
                    if c.size().pow((d.size() - b.size()) as u32) <= 1 << 20 {
                        assert_eq!(brute_extensions(&d, &b, &w.h, &c), 0);
                    }
                }
            }
        }
    }
}
