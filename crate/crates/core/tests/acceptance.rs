//! Acceptance criteria 1 to 10. Runs as a plain binary so that one status
//! line per criterion is always printed.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hia_core::algebra::{check_derived_identities, HiOps};
use hia_core::catalog::{build_catalog, CatalogEntry, RunConfig};
use hia_core::discriminator::{
    discriminator_from_killer, killer_from_discriminator, killer_failure, synthesize_killer, verify_discriminator,
};
use hia_core::filters::{
    all_congruences, check_ic_filter_bijection, filter_of_theta, generated_involutive_filter,
    involutive_center, involutive_filters, is_congruence, is_subdirectly_irreducible, theta_of_filter, Congruence,
};
use hia_core::power::{
    bounded_injectivity_check, boolean_power_finite, direct_power, enumerate_subalgebras, find_isomorphism,
    is_homomorphism, step_function_power, subalgebra_generated, Candidate, InjectivityBounds, InjectivityStatus,
    Subalgebra,
};
use hia_core::term::{eval_term, holds_identity, Environment};
use hia_core::{algebra::known, parse_term, HIAlgebra};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Duration, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn upto(entries: &[CatalogEntry], n: usize) -> impl Iterator<Item = &CatalogEntry> {
    entries.iter().filter(move |e| e.size <= n)
}

/// The laws as equations between terms, checked through the evaluator.
const LAW_TERMS: &[(&str, &str, &str)] = &[
    ("i1", "~(x | y)", "~x & ~y"),
    ("i2", "~~x", "x"),
    ("i3", "~(x & y)", "~x | ~y"),
    ("i4", "~0", "1"),
    ("i4", "~1", "0"),
    ("i5", "~y & ~(x & y)", "~y"),
    ("i6", "!~(x & y)", "!~x & !~y"),
    ("i7", "!~1", "1"),
    ("i7", "!~0", "0"),
    ("i8", "!~(x & y) & !~y", "!~(x & y)"),
    ("i9", "!~(x -> y) & ~y & ~x", "!~(x -> y) & ~y"),
    ("i9", "!~(x -> y) & (~y -> ~x)", "!~(x -> y)"),
];

fn axioms(entries: &[CatalogEntry]) -> Outcome {
    let laws: Vec<_> = LAW_TERMS
        .iter()
        .map(|(l, a, b)| (*l, parse_term(a).unwrap(), parse_term(b).unwrap()))
        .collect();
    let mut count = 0;
    for e in upto(entries, 8) {
        let r = check_derived_identities(&e.algebra);
        ensure(r.ok && r.violations.is_empty(), || format!("{}: {r}", e.name))?;
        for (law, l, rhs) in &laws {
            ensure(holds_identity(&e.algebra, l, rhs).holds(), || format!("{}: {law} fails as an equation", e.name))?;
        }
        count += 1;
    }
    Ok(format!("{count} algebras, zero violations"))
}

/// Congruences by scanning every set partition.
fn partition_scan(a: &HIAlgebra) -> Vec<Congruence> {
    fn go(n: usize, x: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if x == n {
            out.push(blocks.clone());
            return;
        }
        for i in 0..blocks.len() {
            blocks[i].push(x);
            go(n, x + 1, blocks, out);
            blocks[i].pop();
        }
        blocks.push(vec![x]);
        go(n, x + 1, blocks, out);
        blocks.pop();
    }
    let mut parts = Vec::new();
    go(a.size(), 0, &mut Vec::new(), &mut parts);
    let mut cons: Vec<Congruence> = parts
        .iter()
        .filter_map(|p| Congruence::from_blocks(a.size(), p))
        .filter(|c| is_congruence(a, c))
        .collect();
    cons.sort();
    cons
}

fn congruence_filter_bijection(entries: &[CatalogEntry]) -> Outcome {
    let mut count = 0;
    for e in upto(entries, 6) {
        let a = &e.algebra;
        let cons = all_congruences(a);
        let filters = involutive_filters(a);
        ensure(cons.len() == filters.len(), || {
            format!("{}: {} congruences, {} involutive filters", e.name, cons.len(), filters.len())
        })?;
        ensure(cons == partition_scan(a), || format!("{}: congruences differ from the partition scan", e.name))?;
        for f in &filters {
            let theta = theta_of_filter(a, f).map_err(|err| format!("{}: {err}", e.name))?;
            ensure(filter_of_theta(a, &theta) == *f, || format!("{}: filter {:?} not recovered", e.name, f))?;
        }
        for c in &cons {
            let f = filter_of_theta(a, c);
            let back = theta_of_filter(a, &f).map_err(|err| format!("{}: {err}", e.name))?;
            ensure(back == *c, || format!("{}: congruence {:?} not recovered", e.name, c.blocks()))?;
        }
        count += 1;
    }
    Ok(format!("{count} algebras, maps mutually inverse"))
}

/// `(¬∼)^n b` for all `n ≥ 0` until the orbit repeats.
fn orbit(a: &HIAlgebra, b: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut x = b;
    while out.insert(x) {
        x = a.neg_inv(x);
    }
    out
}

fn generated_filter_oracle(entries: &[CatalogEntry]) -> Outcome {
    let mut seeds = 0;
    for e in upto(entries, 5) {
        let a = &e.algebra;
        let n = a.size();
        let filters = involutive_filters(a);
        for mask in 0u32..(1 << n) {
            let seed: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            let closure = generated_involutive_filter(a, &seed);
            let brute: Vec<usize> = (0..n)
                .filter(|&x| filters.iter().filter(|f| seed.iter().all(|&s| f.contains(s))).all(|f| f.contains(x)))
                .collect();
            ensure(closure.members() == brute, || {
                format!("{}: seed {seed:?} gives {:?}, intersection {brute:?}", e.name, closure.members())
            })?;
            // meets of iterates: the least such meet bounds every member
            let floor = seed.iter().flat_map(|&b| orbit(a, b)).fold(a.top(), |m, x| a.meet(m, x));
            let star: Vec<usize> = (0..n).filter(|&x| a.leq(floor, x)).collect();
            ensure(star == brute, || format!("{}: seed {seed:?} meet of iterates gives {star:?}", e.name))?;
            seeds += 1;
        }
    }
    Ok(format!("{seeds} seed sets, exact equality"))
}

fn center_bijection(entries: &[CatalogEntry]) -> Outcome {
    let mut count = 0;
    for e in upto(entries, 6) {
        let a = &e.algebra;
        let r = check_ic_filter_bijection(a);
        ensure(r.holds, || format!("{}: {r:?}", e.name))?;
        let ic = involutive_center(a).members;
        let restricted: BTreeSet<Vec<usize>> = involutive_filters(a)
            .iter()
            .map(|f| f.members().iter().copied().filter(|x| ic.contains(x)).collect())
            .collect();
        // filters of IC directly: nonempty, up-closed in IC, meet-closed
        let k = ic.len();
        let mut ic_filters = BTreeSet::new();
        for mask in 1u32..(1 << k) {
            let s: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| ic[i]).collect();
            let up = s.iter().all(|&x| ic.iter().all(|&y| !a.leq(x, y) || s.contains(&y)));
            let meets = s.iter().all(|&x| s.iter().all(|&y| s.contains(&a.meet(x, y))));
            if up && meets {
                ic_filters.insert(s);
            }
        }
        let inv_count = involutive_filters(a).len();
        ensure(restricted.len() == inv_count && restricted == ic_filters, || {
            format!("{}: {} involutive filters, {} center filters", e.name, inv_count, ic_filters.len())
        })?;
        count += 1;
    }
    Ok(format!("{count} algebras, bijection exact"))
}

fn si_criterion(entries: &[CatalogEntry]) -> Outcome {
    let (mut count, mut si) = (0, 0);
    for e in upto(entries, 8).filter(|e| !e.trivial) {
        let a = &e.algebra;
        let cons = all_congruences(a);
        let above: Vec<_> = cons.iter().filter(|c| !c.is_identity()).collect();
        let by_congruences = above.iter().any(|c| above.iter().all(|d| c.is_finer_than(d)));
        let by_center = involutive_center(a).members == [a.bottom(), a.top()];
        ensure(by_congruences == by_center, || format!("{}: criteria disagree", e.name))?;
        let v = is_subdirectly_irreducible(a).map_err(|err| format!("{}: {err}", e.name))?;
        ensure(v.subdirectly_irreducible == by_center, || format!("{}: verdict differs", e.name))?;
        count += 1;
        si += by_center as usize;
    }
    Ok(format!("{count} nontrivial algebras ({si} SI), zero disagreements"))
}

fn killer_construction(entries: &[CatalogEntry]) -> Outcome {
    let (mut si, mut non) = (0, 0);
    for e in upto(entries, 8).filter(|e| !e.trivial) {
        let a = &e.algebra;
        let k = synthesize_killer(a).map_err(|err| format!("{}: {err}", e.name))?;
        ensure(k.depth == a.max_chain_length(), || format!("{}: depth {}", e.name, k.depth))?;
        if e.si {
            ensure(k.verified, || format!("{}: killer fails at {:?}", e.name, k.witness))?;
            si += 1;
        } else {
            let ic = involutive_center(a);
            let ok = !k.verified
                && k.witness.is_some_and(|w| ic.contains(w) && w != a.bottom() && w != a.top());
            ensure(ok, || format!("{}: witness {:?} outside IC\\{{0,1}} {:?}", e.name, k.witness, ic.members))?;
            non += 1;
        }
    }
    Ok(format!("{si} SI algebras verified, {non} non-SI fail inside the center"))
}

fn discriminator_duality(entries: &[CatalogEntry]) -> Outcome {
    let (mut count, mut triples) = (0, 0);
    for e in upto(entries, 6).filter(|e| e.si) {
        let a = &e.algebra;
        let k = synthesize_killer(a).map_err(|err| format!("{}: {err}", e.name))?;
        let t = discriminator_from_killer(&k.term);
        let d = verify_discriminator(a, &t);
        ensure(d.verified, || format!("{}: discriminator fails at {:?}", e.name, d.witness))?;
        let n = a.size();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let env: Environment =
                        [("x".to_string(), x), ("y".to_string(), y), ("z".to_string(), z)].into_iter().collect();
                    let v = eval_term(a, &t, &env).map_err(|err| err.to_string())?;
                    ensure(v == if x != y { x } else { z }, || format!("{}: t({x},{y},{z}) = {v}", e.name))?;
                    triples += 1;
                }
            }
        }
        let back = killer_from_discriminator(&t);
        ensure(killer_failure(a, &back).is_none(), || format!("{}: recovered killer fails", e.name))?;
        count += 1;
    }
    Ok(format!("{count} SI algebras, {triples} triples, zero failures"))
}

fn boolean_power_realization(entries: &[CatalogEntry]) -> Outcome {
    let mut cases = 0;
    for e in upto(entries, 4) {
        for k in 1..=2 {
            let a = &e.algebra;
            let direct = direct_power(a, k).map_err(|err| err.to_string())?;
            let bp = boolean_power_finite(a, k).map_err(|err| err.to_string())?;
            let step = step_function_power(a, k).map_err(|err| err.to_string())?;
            ensure(find_isomorphism(&step, &direct).is_some(), || format!("{} k={k}: step functions", e.name))?;
            ensure(find_isomorphism(&bp.power, &direct).is_some(), || format!("{} k={k}", e.name))?;
            ensure(Subalgebra::full(&bp.power).is_diagonal(), || format!("{} k={k}: not diagonal", e.name))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases, isomorphism found in each"))
}

fn injectivity_desk_check() -> Outcome {
    let a = known::chain(3);
    let bounds = InjectivityBounds { n_max: 2, m_max: 9 };
    let v = bounded_injectivity_check(&a, &Candidate::Algebra(a.clone()), bounds).map_err(|e| e.to_string())?;
    ensure(v.status == InjectivityStatus::NoCounterexampleWithinBounds, || format!("(a) {:?}", v.witness))?;
    ensure(v.candidate_diagonal && v.candidate_complete, || "(a) candidate not diagonal".into())?;

    let p = direct_power(&a, 2).map_err(|e| e.to_string())?;
    let c = subalgebra_generated(&p, &[p.encode(&[0, 2])]).map_err(|e| e.to_string())?;
    ensure(c.members() == [0, 2, 6, 8], || format!("C = {:?}", c.members()))?;
    ensure(!c.is_diagonal(), || "(b) candidate is diagonal".into())?;
    let v = bounded_injectivity_check(&a, &Candidate::Subalgebra(c.clone()), bounds).map_err(|e| e.to_string())?;
    let w = v.witness.ok_or("(b) no counterexample")?;
    ensure(w.d_members == (0..9).collect::<Vec<_>>() && w.b_members == c.members(), || format!("(b) {w:?}"))?;
    ensure(w.h == [0, 1, 2, 3], || format!("(b) h = {:?}", w.h))?;
    // no map D → C extends the identity on C
    let d = Subalgebra::full(&p);
    let free: Vec<usize> = (0..9).filter(|x| !c.contains(*x)).collect();
    let mut extensions = 0;
    for code in 0..4usize.pow(free.len() as u32) {
        let mut map = vec![0; 9];
        for (i, &x) in c.members().iter().enumerate() {
            map[x] = i;
        }
        for (j, &x) in free.iter().enumerate() {
            map[x] = code / 4usize.pow(j as u32) % 4;
        }
        extensions += is_homomorphism(&d, &c, &map) as usize;
    }
    ensure(extensions == 0, || format!("(b) {extensions} extensions exist"))?;
    let fixed = p.constant(1);
    ensure(p.inv(fixed) == fixed && !c.contains(fixed), || "(b) constant (1,1) misplaced".into())?;
    Ok("(a) no counterexample, (b) identity on C fails to extend over A^2".into())
}

fn boolean_closing_remark() -> Outcome {
    let a = known::chain(2);
    let p = direct_power(&a, 2).map_err(|e| e.to_string())?;
    let subs = enumerate_subalgebras(&p, p.size()).map_err(|e| e.to_string())?;
    ensure(subs.iter().all(Subalgebra::is_diagonal), || "a non-diagonal subalgebra exists".into())?;
    let v = bounded_injectivity_check(&a, &Candidate::Subalgebra(Subalgebra::full(&p)), InjectivityBounds::default())
        .map_err(|e| e.to_string())?;
    ensure(v.status == InjectivityStatus::NoCounterexampleWithinBounds, || format!("{:?}", v.witness))?;
    Ok(format!("{} subalgebras, all diagonal; no counterexample", subs.len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let entries = match build_catalog(&RunConfig::new(8)) {
        Ok(e) => e,
        Err(e) => {
            println!("catalog build failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!("catalog: {} algebras of size <= 8 in {:.2?}", entries.len(), start.elapsed());

    let criteria: Vec<Criterion> = vec![
        ("axiom suite", Duration::from_secs(60), Box::new(|| axioms(&entries))),
        ("congruence-filter bijection", Duration::from_secs(120), Box::new(|| congruence_filter_bijection(&entries))),
        ("generated-filter oracle", Duration::from_secs(120), Box::new(|| generated_filter_oracle(&entries))),
        ("center bijection", Duration::from_secs(120), Box::new(|| center_bijection(&entries))),
        ("SI criterion", Duration::from_secs(120), Box::new(|| si_criterion(&entries))),
        ("killer construction", Duration::from_secs(120), Box::new(|| killer_construction(&entries))),
        ("discriminator duality", Duration::from_secs(120), Box::new(|| discriminator_duality(&entries))),
        ("Boolean power realization", Duration::from_secs(120), Box::new(|| boolean_power_realization(&entries))),
        ("injectivity desk check", Duration::from_secs(60), Box::new(injectivity_desk_check)),
        ("Boolean closing remark", Duration::from_secs(60), Box::new(boolean_closing_remark)),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let took = t.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > *budget => Err(format!("{detail}, but took {took:.2?} over {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({took:.2?})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({took:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
