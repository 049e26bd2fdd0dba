//! Acceptance suite: one test per shipped guarantee, each printing a
//! pass/fail line through the harness. Expected values come from
//! independent oracles computed in this file (chain enumeration, brute
//! force search, rank computations), never from the code under test.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use strathom::canonical::{self, SectionSide};
use strathom::cylinder;
use strathom::fos;
use strathom::homology::{betti_z2, strata_betti};
use strathom::iso::find_isomorphism;
use strathom::moves::{self, FreePair, HornSpec};
use strathom::pairing::{Pairing, Regularity};
use strathom::poset::{all_dflags, all_posets, DFlag, PElem, Poset};
use strathom::reduce::{reduce, Deformation, ExpStep, Leg, LegBody, ReduceStrategy};
use strathom::sset::{simplex, CellId, Fss, SimplicialMap, Sx};
use strathom::subdivision;
use strathom::tda;

fn assert_certificate(p: &Pairing, what: &str) {
    let proper = p.check_proper();
    assert!(proper.is_empty(), "{what}: not proper: {proper:?}");
    match p.check_regular().unwrap() {
        Regularity::Regular { .. } => {}
        Regularity::Cycle { cells } => panic!("{what}: ancestral cycle {cells:?}"),
    }
    p.to_presentation().unwrap_or_else(|e| panic!("{what}: presentation fails: {e}"));
}

// ---------------------------------------------------------------------
// criterion 1: the admissibility table over P = {0 < 1}
// ---------------------------------------------------------------------

#[test]
fn criterion_1_admissibility_table() {
    let p = Poset::chain(2);
    let j001 = DFlag::parse(&p, &["0", "0", "1"]).unwrap();
    let j011 = DFlag::parse(&p, &["0", "1", "1"]).unwrap();
    // the four reference cases
    assert!(moves::is_admissible(&j001, 0) && !moves::is_strictly_admissible(&j001, 0));
    assert!(moves::is_admissible(&j011, 2) && moves::is_strictly_admissible(&j011, 2));
    assert!(!moves::is_admissible(&j001, 2));
    assert!(!moves::is_admissible(&j011, 0));
    // exhaustively: admissibility must equal the repeated-entry oracle and
    // strictness must add maximality, over every d-flag of length <= 3
    for flag in all_dflags(&p, 3) {
        let n = flag.dim();
        for k in 0..=n {
            let repeat = (k > 0 && flag.get(k) == flag.get(k - 1))
                || (k < n && flag.get(k) == flag.get(k + 1));
            assert_eq!(moves::is_admissible(&flag, k), repeat, "{flag:?} k={k}");
            let maximal = flag.entries().iter().all(|&e| p.leq(e, flag.get(k)));
            assert_eq!(
                moves::is_strictly_admissible(&flag, k),
                repeat && maximal,
                "{flag:?} k={k} strict"
            );
        }
    }
    println!("criterion 1: admissibility table reproduced exactly");
}

// ---------------------------------------------------------------------
// criterion 2: the two-circle zigzag
// ---------------------------------------------------------------------

fn circle_with_arc() -> Fss {
    // S¹ whose 0-stratum is an arc: vertices a, b at 0, c at 1
    let p = Poset::chain(2);
    let mut x = Fss::empty(p.clone());
    x.insert_vertex("a".into(), p.elem("0").unwrap());
    x.insert_vertex("b".into(), p.elem("0").unwrap());
    x.insert_vertex("c".into(), p.elem("1").unwrap());
    x.insert_cell("ab".into(), vec![Sx::of("b".into()), Sx::of("a".into())]);
    x.insert_cell("ac".into(), vec![Sx::of("c".into()), Sx::of("a".into())]);
    x.insert_cell("bc".into(), vec![Sx::of("c".into()), Sx::of("b".into())]);
    x
}

fn circle_with_point() -> Fss {
    // S¹ whose 0-stratum is one point: b at 0, c at 1, two parallel edges
    let p = Poset::chain(2);
    let mut x = Fss::empty(p.clone());
    x.insert_vertex("b".into(), p.elem("0").unwrap());
    x.insert_vertex("c".into(), p.elem("1").unwrap());
    x.insert_cell("bc".into(), vec![Sx::of("c".into()), Sx::of("b".into())]);
    x.insert_cell("bc2".into(), vec![Sx::of("c".into()), Sx::of("b".into())]);
    x
}

fn two_circle_zigzag() -> Deformation {
    let lhs = circle_with_arc();
    // leg 1 (forward): fill the (0,0,1)-horn missing its 0th face over the
    // edges ab, ac; this attaches the triangle t and a second edge b -> c
    let leg1 = vec![ExpStep {
        top: "t".into(),
        top_faces: vec![Sx::of("bc2".into()), Sx::of("ac".into()), Sx::of("ab".into())],
        free: "bc2".into(),
        free_faces: vec![Sx::of("c".into()), Sx::of("b".into())],
        free_label: None,
        k: 0,
    }];
    // leg 2 (backward): collapse (t, ac) at the admissible index 1
    let leg2 = vec![ExpStep {
        top: "t".into(),
        top_faces: vec![Sx::of("bc2".into()), Sx::of("ac".into()), Sx::of("ab".into())],
        free: "ac".into(),
        free_faces: vec![Sx::of("c".into()), Sx::of("a".into())],
        free_label: None,
        k: 1,
    }];
    // leg 3 (backward): collapse (ab, a) at the strictly admissible index 1
    let leg3 = vec![ExpStep {
        top: "ab".into(),
        top_faces: vec![Sx::of("b".into()), Sx::of("a".into())],
        free: "a".into(),
        free_faces: vec![],
        free_label: Some("0".into()),
        k: 1,
    }];
    Deformation {
        start: lhs,
        end: circle_with_point(),
        legs: vec![
            Leg { forward: true, body: LegBody::Expansion { steps: leg1 } },
            Leg { forward: false, body: LegBody::Expansion { steps: leg2 } },
            Leg { forward: false, body: LegBody::Expansion { steps: leg3 } },
        ],
    }
}

/// Enumerates every stratum preserving map from a complex determined by
/// vertex sets into an arbitrary complex, by extending vertex assignments
/// cell by cell.
fn enumerate_maps(src: &Arc<Fss>, dst: &Arc<Fss>) -> Vec<SimplicialMap> {
    let mut order: Vec<CellId> = src.cell_ids().cloned().collect();
    order.sort_by_key(|id| (src.dim_of(id), id.clone()));
    let mut out = Vec::new();
    let mut assign: BTreeMap<CellId, Sx> = BTreeMap::new();
    fn candidates(src: &Fss, dst: &Fss, id: &CellId, assign: &BTreeMap<CellId, Sx>) -> Vec<Sx> {
        let data = src.cell(id);
        if data.dim == 0 {
            return dst
                .cells()
                .filter(|(v, d)| {
                    d.dim == 0 && dst.poset.name(dst.label(v)) == src.poset.name(src.label(id))
                })
                .map(|(v, _)| Sx::of(v.clone()))
                .collect();
        }
        let wanted: Vec<Sx> = data.faces.iter().map(|f| {
            let img = &assign[&f.cell];
            Sx { word: f.word.then(&img.word), cell: img.cell.clone() }
        }).collect();
        // candidates: nondegenerate cells of matching dimension, plus
        // degeneracies of lower cells
        let mut cands = Vec::new();
        for (c, d) in dst.cells() {
            if d.dim == data.dim {
                cands.push(Sx::of(c.clone()));
            } else if d.dim < data.dim {
                // all degeneracy words lifting c to this dimension
                let extra = data.dim - d.dim;
                for word in decreasing_words(data.dim, extra) {
                    cands.push(Sx { word: strathom::sset::DegWord::new(word), cell: c.clone() });
                }
            }
        }
        cands.retain(|sx| (0..=data.dim).all(|i| dst.face(sx, i) == wanted[i]));
        cands
    }
    fn decreasing_words(dim: usize, len: usize) -> Vec<Vec<u32>> {
        // strictly decreasing index sequences out of 0..dim
        let mut out = Vec::new();
        let mut stack: Vec<Vec<u32>> = vec![vec![]];
        while let Some(cur) = stack.pop() {
            if cur.len() == len {
                out.push(cur);
                continue;
            }
            let lo = cur.last().map_or(dim as u32, |&l| l);
            for next in 0..lo {
                let mut ext = cur.clone();
                ext.push(next);
                stack.push(ext);
            }
        }
        out
    }
    fn rec(
        src: &Arc<Fss>,
        dst: &Arc<Fss>,
        order: &[CellId],
        pos: usize,
        assign: &mut BTreeMap<CellId, Sx>,
        out: &mut Vec<SimplicialMap>,
    ) {
        let Some(id) = order.get(pos) else {
            if let Ok(m) = SimplicialMap::new(src.clone(), dst.clone(), assign.clone()) {
                out.push(m);
            }
            return;
        };
        for cand in candidates(src, dst, id, assign) {
            assign.insert(id.clone(), cand);
            rec(src, dst, order, pos + 1, assign, out);
        }
        assign.remove(id);
    }
    rec(src, dst, &order, 0, &mut assign, &mut out);
    out
}

/// All complexes reachable from `start` through strict moves, bounded by
/// total cell count; states deduplicated up to isomorphism.
fn strict_reachable(start: &Fss, max_cells: usize, max_flag_len: usize) -> Vec<Fss> {
    let mut states: Vec<Fss> = vec![start.clone()];
    let mut frontier = vec![start.clone()];
    let poset = start.poset.clone();
    let flags: Vec<DFlag> =
        all_dflags(&poset, max_flag_len).into_iter().filter(|f| f.len() >= 2).collect();
    while let Some(cur) = frontier.pop() {
        let mut nexts: Vec<Fss> = Vec::new();
        for pair in moves::find_free_pairs(&cur, &BTreeSet::new(), true) {
            nexts.push(moves::collapse(&cur, &pair).unwrap().0);
        }
        if cur.len() + 2 <= max_cells {
            let cur_arc = Arc::new(cur.clone());
            for flag in &flags {
                for k in 0..flag.len() {
                    if !moves::is_strictly_admissible(flag, k) {
                        continue;
                    }
                    let horn = Arc::new(simplex::horn(&poset, flag, k));
                    for attach in enumerate_maps(&horn, &cur_arc) {
                        let spec = HornSpec::new(flag.clone(), k).unwrap();
                        let (next, _) = moves::expand(&cur_arc, &spec, &attach).unwrap();
                        nexts.push((*next).clone());
                    }
                }
            }
        }
        for next in nexts {
            if states.iter().any(|s| find_isomorphism(s, &next).is_some()) {
                continue;
            }
            states.push(next.clone());
            frontier.push(next);
        }
    }
    states
}

#[test]
fn criterion_2_two_circle_zigzag() {
    let d = two_circle_zigzag();
    let report = d.verify();
    assert!(report.is_ok(), "zigzag fails: {:?}", report.diagnostics);
    assert_eq!(report.strict_steps.len(), 3);
    assert_eq!(report.strict_steps.iter().filter(|s| **s).count(), 1, "exactly one strict step");
    // endpoint invariants coincide
    assert_eq!(betti_z2(&d.start), betti_z2(&d.end));
    assert_eq!(strata_betti(&d.start), strata_betti(&d.end));
    // but no strict-only path connects them within the bound: eight cells
    // is exactly the budget the admissible zigzag itself needs
    let from_lhs = strict_reachable(&d.start, 8, 3);
    let from_rhs = strict_reachable(&d.end, 8, 3);
    for a in &from_lhs {
        for b in &from_rhs {
            assert!(
                find_isomorphism(a, b).is_none(),
                "strict path found through a {}-cell complex",
                a.len()
            );
        }
    }
    println!(
        "criterion 2: zigzag verifies (1 strict of 3), tables match, no strict path among {}+{} bounded states",
        from_lhs.len(),
        from_rhs.len()
    );
}

// ---------------------------------------------------------------------
// criterion 3: canonical certificates, exhaustively
// ---------------------------------------------------------------------

#[test]
fn criterion_3_canonical_certificates() {
    let mut count = 0usize;
    for poset in all_posets(1).into_iter().chain(all_posets(2)).chain(all_posets(3)) {
        for flag in all_dflags(&poset, 4) {
            // degeneracy sections at every duplicate position and side
            for dup in 0..flag.len() {
                for side in [SectionSide::Lower, SectionSide::Upper] {
                    let p = canonical::degeneracy_section(&poset, &flag, dup, side).unwrap();
                    assert_certificate(&p, &format!("degeneracy_section({flag:?},{dup},{side:?})"));
                    count += 1;
                }
            }
            let p = canonical::sd_section_pairing(&poset, &flag).unwrap();
            assert_certificate(&p, &format!("sd_section({flag:?})"));
            count += 1;
            if flag.is_nondegenerate() {
                let p = canonical::sdp_section_pairing(&poset, &flag).unwrap();
                assert_certificate(&p, &format!("sdp_section({flag:?})"));
                count += 1;
            }
            for k in 0..flag.len() {
                if !moves::is_admissible(&flag, k) {
                    continue;
                }
                for n in 0..=2 {
                    let pp = canonical::pushout_product(&poset, &flag, k, n, true).unwrap();
                    assert_certificate(&pp.pairing, &format!("pushout_product({flag:?},{k},{n})"));
                    count += 1;
                }
            }
        }
    }
    println!("criterion 3: {count} canonical certificates proper, regular, replayed");
}

// ---------------------------------------------------------------------
// criterion 4: subdivision counts against chain oracles
// ---------------------------------------------------------------------

/// Oracle: strictly increasing chains of nonempty subsets of {0..=n}.
fn subset_chain_oracle(n: usize) -> Vec<Vec<u32>> {
    let full: u32 = (1 << (n + 1)) - 1;
    let mut out: Vec<Vec<u32>> = Vec::new();
    let mut stack: Vec<Vec<u32>> = (1..=full).map(|m| vec![m]).collect();
    while let Some(chain) = stack.pop() {
        out.push(chain.clone());
        let top = *chain.last().unwrap();
        for bigger in (top + 1)..=full {
            if bigger & top == top {
                let mut ext = chain.clone();
                ext.push(bigger);
                stack.push(ext);
            }
        }
    }
    out
}

/// Oracle: chains of (subset, label) pairs for `sd_p` over a nondegenerate
/// flag, with every label drawn from the bottom subset.
fn sdp_chain_oracle(labels: &[u32]) -> Vec<Vec<(u32, u32)>> {
    let n = labels.len() - 1;
    let full: u32 = (1 << (n + 1)) - 1;
    let labels_of = |s: u32| -> BTreeSet<u32> {
        (0..=n).filter(|i| s & (1 << i) != 0).map(|i| labels[i]).collect()
    };
    let mut out: Vec<Vec<(u32, u32)>> = Vec::new();
    let mut stack: Vec<Vec<(u32, u32)>> = Vec::new();
    for s in 1..=full {
        for &p in &labels_of(s) {
            stack.push(vec![(s, p)]);
        }
    }
    while let Some(chain) = stack.pop() {
        // valid iff every label is a label of the bottom subset
        let bottom = labels_of(chain[0].0);
        if chain.iter().all(|&(_, p)| bottom.contains(&p)) {
            out.push(chain.clone());
        }
        let (s0, p0) = *chain.last().unwrap();
        for s in s0..=full {
            if s & s0 != s0 {
                continue;
            }
            for &p in &labels_of(s) {
                if (s, p) != (s0, p0) && p >= p0 {
                    let mut ext = chain.clone();
                    ext.push((s, p));
                    stack.push(ext);
                }
            }
        }
    }
    out
}

#[test]
fn criterion_4_subdivision_counts() {
    for n in 0..=4 {
        let p = Poset::chain(n + 1);
        let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let x = simplex::standard(&p, &DFlag::parse(&p, &refs).unwrap());
        let s = subdivision::sd(&x);
        let oracle = subset_chain_oracle(n);
        for d in 0..=n {
            let expect = oracle.iter().filter(|c| c.len() == d + 1).count();
            assert_eq!(s.cells_of_dim(d).len(), expect, "sd(Δ^{n}) dim {d}");
        }
        let fact: usize = (1..=n + 1).product();
        assert_eq!(s.cells_of_dim(n).len(), fact, "top cells of sd(Δ^{n})");
    }
    // sd_p of the filtered interval and triangle
    let p = Poset::chain(3);
    let interval = simplex::standard(&p, &DFlag::parse(&p, &["0", "1"]).unwrap());
    let si = subdivision::sd_p(&interval);
    assert_eq!(
        (si.cells_of_dim(0).len(), si.cells_of_dim(1).len(), si.cells_of_dim(2).len()),
        (4, 3, 0)
    );
    let triangle = simplex::standard(&p, &DFlag::parse(&p, &["0", "1", "2"]).unwrap());
    let st = subdivision::sd_p(&triangle);
    let oracle = sdp_chain_oracle(&[0, 1, 2]);
    let top_dim = st.dim().unwrap();
    for d in 0..=top_dim {
        let expect = oracle.iter().filter(|c| c.len() == d + 1).count();
        assert_eq!(st.cells_of_dim(d).len(), expect, "sd_p(Δ^(0,1,2)) dim {d}");
    }
    println!("criterion 4: subdivision cell counts match the chain oracles");
}

// ---------------------------------------------------------------------
// criterion 5: last-vertex and section identities
// ---------------------------------------------------------------------

#[test]
fn criterion_5_section_identities() {
    for poset in all_posets(2).into_iter().chain(all_posets(3)) {
        for flag in all_dflags(&poset, 3) {
            let x = Arc::new(simplex::standard(&poset, &flag));
            let s = Arc::new(subdivision::sd(&x));
            let lv = subdivision::lv(&x, &s).unwrap();
            let sec = subdivision::sd_section(&x, &s, &flag).unwrap();
            assert_eq!(
                sec.then(&lv).unwrap().assignment(),
                SimplicialMap::identity(x.clone()).assignment(),
                "lv ∘ sd_section on {flag:?}"
            );
            if flag.is_nondegenerate() {
                let sp = Arc::new(subdivision::sd_p(&x));
                let lvp = subdivision::lv_p(&x, &sp).unwrap();
                let secp = subdivision::sdp_section(&x, &sp, &flag).unwrap();
                assert_eq!(
                    secp.then(&lvp).unwrap().assignment(),
                    SimplicialMap::identity(x.clone()).assignment(),
                    "lv_p ∘ sdp_section on {flag:?}"
                );
            }
        }
    }
    // relative and iterated relative subdivision on a fixture suite
    let p = Poset::chain(2);
    let fixtures: Vec<(Fss, Vec<CellId>)> = vec![
        (simplex::standard(&p, &DFlag::parse(&p, &["0", "1"]).unwrap()), vec!["0".into()]),
        (simplex::standard(&p, &DFlag::parse(&p, &["0", "0", "1"]).unwrap()), vec!["0.1".into()]),
        (simplex::standard(&p, &DFlag::parse(&p, &["0", "1", "1"]).unwrap()), vec!["0".into()]),
    ];
    for (k, seed) in fixtures {
        let k = Arc::new(k);
        let a = k.close_faces(seed);
        let rel = subdivision::sd_rel(&k, &a).unwrap();
        let sdk = Arc::new(subdivision::sd(&k));
        let lv1 = subdivision::lv(&k, &sdk).unwrap();
        assert_eq!(rel.l0.then(&rel.l1).unwrap().assignment(), lv1.assignment(), "l1∘l0 = lv");
        // two-stage family: the composite is lv²
        let fam = vec![a.clone(), a.clone()];
        let family = subdivision::sd_family(&k, &fam).unwrap();
        let sd2 = Arc::new(subdivision::sd(&sdk));
        let lv2 = subdivision::sd_map(&lv1, &sd2, &sdk).unwrap().then(&lv1).unwrap();
        assert_eq!(
            family.l0.then(&family.l1).unwrap().assignment(),
            lv2.assignment(),
            "l1^A ∘ l0^A = lv²"
        );
    }
    println!("criterion 5: lv∘section identities and relative factorizations hold");
}

// ---------------------------------------------------------------------
// criterion 6: conservation along every collapse
// ---------------------------------------------------------------------

/// Random FOS complex: vertices with sorted labels, random downward-closed
/// simplex families, dimension <= 3.
fn random_fos(rng: &mut StdRng, max_vertices: usize, poset: &Arc<Poset>) -> Fss {
    let n = rng.random_range(3..=max_vertices);
    let labels: Vec<PElem> = {
        let mut ls: Vec<PElem> = (0..n)
            .map(|_| PElem(rng.random_range(0..poset.len() as u32)))
            .collect();
        ls.sort();
        ls
    };
    let mut chosen: BTreeSet<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let tops = rng.random_range(1..=2 * n);
    for _ in 0..tops {
        let size = rng.random_range(2..=4.min(n));
        let mut vs: BTreeSet<usize> = BTreeSet::new();
        while vs.len() < size {
            vs.insert(rng.random_range(0..n));
        }
        let top: Vec<usize> = vs.into_iter().collect();
        // close downward
        let mut stack = vec![top];
        while let Some(s) = stack.pop() {
            if !chosen.insert(s.clone()) || s.len() == 1 {
                continue;
            }
            for i in 0..s.len() {
                let mut f = s.clone();
                f.remove(i);
                stack.push(f);
            }
        }
    }
    let mut x = Fss::empty(poset.clone());
    let name = |vs: &[usize]| {
        CellId::new(vs.iter().map(|v| format!("v{v}")).collect::<Vec<_>>().join("-"))
    };
    for vs in &chosen {
        if vs.len() == 1 {
            x.insert_vertex(name(vs), labels[vs[0]]);
        } else {
            let faces = (0..vs.len())
                .map(|i| {
                    let mut f = vs.clone();
                    f.remove(i);
                    Sx::of(name(&f))
                })
                .collect();
            x.insert_cell(name(vs), faces);
        }
    }
    x
}

#[test]
fn criterion_6_conservation() {
    let mut rng = StdRng::seed_from_u64(61);
    let poset = Poset::chain(2);
    let mut total_moves = 0usize;
    for case in 0..200 {
        let x = random_fos(&mut rng, 9, &poset);
        assert!(x.len() <= 200);
        assert!(x.validate().is_empty());
        let mut cur = x.clone();
        let mut chi = cur.euler();
        let mut tables = strata_betti(&cur);
        loop {
            let pairs = moves::find_free_pairs(&cur, &BTreeSet::new(), false);
            let Some(pair) = pairs.into_iter().next() else {
                break;
            };
            let (next, _) = moves::collapse(&cur, &pair).unwrap();
            assert_eq!(next.euler(), chi, "case {case}: collapse changed χ");
            let next_tables = strata_betti(&next);
            assert_eq!(next_tables, tables, "case {case}: collapse changed a stratum table");
            chi = next.euler();
            tables = next_tables;
            cur = next;
            total_moves += 1;
        }
    }
    println!("criterion 6: χ and stratum tables preserved across {total_moves} collapses in 200 complexes");
}

// ---------------------------------------------------------------------
// criterion 7: conversion to FOS complexes
// ---------------------------------------------------------------------

/// Random finite filtered simplicial set: an FOS complex with parallel
/// copies of some cells, occasionally a loop edge glued on.
fn random_filtered_set(rng: &mut StdRng, poset: &Arc<Poset>) -> Fss {
    let mut x = random_fos(rng, 6, poset);
    // duplicate some positive-dimensional cells as parallel copies
    let ids: Vec<CellId> =
        x.cell_ids().filter(|id| x.dim_of(id) >= 1).cloned().collect();
    for id in ids {
        if rng.random_bool(0.3) {
            let data = x.cell(&id).clone();
            x.insert_cell_raw(CellId::new(format!("{id}+par")), data);
        }
    }
    if rng.random_bool(0.3) {
        let v: CellId = x.cells_of_dim(0)[0].clone();
        x.insert_cell("loop".into(), vec![Sx::of(v.clone()), Sx::of(v)]);
    }
    x
}

#[test]
fn criterion_7_fos_conversion() {
    let poset = Poset::chain(2);
    let mut cases: Vec<Fss> = Vec::new();
    // the named fixtures: degenerate-flag simplices and the doubled circle
    for names in [vec!["0", "0"], vec!["0", "0", "1"], vec!["1", "1", "1"]] {
        cases.push(simplex::standard(&poset, &DFlag::parse(&poset, &names).unwrap()));
    }
    {
        let mut c = Fss::empty(poset.clone());
        c.insert_vertex("a".into(), PElem(0));
        c.insert_vertex("b".into(), PElem(0));
        c.insert_cell("e1".into(), vec![Sx::of("b".into()), Sx::of("a".into())]);
        c.insert_cell("e2".into(), vec![Sx::of("b".into()), Sx::of("a".into())]);
        cases.push(c);
    }
    let mut rng = StdRng::seed_from_u64(7);
    while cases.len() < 50 {
        cases.push(random_filtered_set(&mut rng, &poset));
    }
    for (i, x) in cases.iter().enumerate() {
        let (k, cert) = fos::to_fos(x).unwrap_or_else(|e| panic!("case {i}: {e}"));
        assert!(fos::is_fos(&k), "case {i}: result not FOS");
        assert_eq!(k.dim(), x.dim(), "case {i}: dimension changed");
        let report = cert.verify();
        assert!(report.is_ok(), "case {i}: certificate fails: {:?}", report.diagnostics);
        assert_eq!(cert.start, *x, "case {i}: certificate start");
        assert_eq!(cert.end, k, "case {i}: certificate end");
        assert_eq!(betti_z2(&k), betti_z2(x), "case {i}: Betti changed");
        assert_eq!(strata_betti(&k), strata_betti(x), "case {i}: stratum tables changed");
    }
    println!("criterion 7: 50 conversions verified with equal dimension and tables");
}

// ---------------------------------------------------------------------
// criterion 8: the TDA pipeline on the unit square
// ---------------------------------------------------------------------

fn unit_square_cloud(singular_corner: bool) -> tda::LabeledPointCloud {
    let p = Poset::chain(2);
    let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    let labels: Vec<PElem> = (0..4)
        .map(|i| if singular_corner && i == 0 { p.elem("0").unwrap() } else { p.elem("1").unwrap() })
        .collect();
    tda::LabeledPointCloud::new(p, pts, labels).unwrap()
}

#[test]
fn criterion_8_tda_pipeline() {
    // scale 1: the 4-cycle survives reduction with Betti (1, 1)
    let cycle = tda::vietoris_rips(&unit_square_cloud(false), 1.0, 3, 1).unwrap();
    assert_eq!(cycle.len(), 8);
    let r = reduce(&cycle, &ReduceStrategy::default());
    assert!(r.certificate.verify().is_ok());
    assert_eq!(betti_z2(&r.result), vec![1, 1]);
    // scale 1.5: the solid simplex collapses to a point-like complex
    let solid = tda::vietoris_rips(&unit_square_cloud(false), 1.5, 3, 1).unwrap();
    assert_eq!(solid.len(), 15);
    let r = reduce(&solid, &ReduceStrategy::default());
    assert!(r.certificate.verify().is_ok());
    assert_eq!(r.result.euler(), 1);
    assert_eq!(betti_z2(&r.result), vec![1]);
    // one singular corner: moves stay admissible across strata, and the
    // label-0 subcomplex is the Vietoris-Rips complex of the subcloud
    let cloud = unit_square_cloud(true);
    let marked = tda::vietoris_rips(&cloud, 1.5, 3, 1).unwrap();
    let r = reduce(&marked, &ReduceStrategy::default());
    assert!(r.certificate.verify().is_ok());
    let mut replay = marked.clone();
    for record in &r.report.move_records {
        let strathom::moves::MoveRecord::Collapse { top, k } = record else {
            panic!("reducer only collapses");
        };
        // independent admissibility re-check on the pre-state
        let flag = replay.flag_of(top);
        assert!(moves::is_admissible(&flag, *k), "inadmissible move recorded");
        let free = replay.cell(top).faces[*k].cell.clone();
        let pair = FreePair { top: top.clone(), free, k: *k };
        replay = moves::collapse(&replay, &pair).unwrap().0;
    }
    assert_eq!(replay, r.result);
    let zero = cloud.poset.elem("0").unwrap();
    let vertices: BTreeSet<CellId> = marked
        .labels()
        .iter()
        .filter(|(_, &l)| l == zero)
        .map(|(id, _)| id.clone())
        .collect();
    let sub = marked.full_subcomplex(&vertices);
    let direct = tda::vietoris_rips(&tda::subcloud(&cloud, zero), 1.5, 3, 1).unwrap();
    assert_eq!(sub.len(), direct.len());
    println!("criterion 8: pipeline reduces the square correctly at both scales");
}

// ---------------------------------------------------------------------
// criterion 9: finite restriction of the sd(Δ²) section pairing
// ---------------------------------------------------------------------

#[test]
fn criterion_9_finite_restriction() {
    let p = Poset::chain(3);
    let flag = DFlag::parse(&p, &["0", "1", "2"]).unwrap();
    let pairing = canonical::sd_section_pairing(&p, &flag).unwrap();
    assert_eq!(pairing.len(), 9);
    let all: Vec<CellId> = pairing.cof.total.cell_ids().cloned().collect();
    let mut rng = StdRng::seed_from_u64(9);
    for draw in 0..25 {
        let seeds: BTreeSet<CellId> =
            all.iter().filter(|_| rng.random_bool(0.3)).cloned().collect();
        let c = pairing.cof.total.close_faces(seeds);
        let (_, inner, outer) = pairing.restrict_finite(&c).unwrap();
        assert_certificate_or_empty(&inner, draw, "inner");
        assert_certificate_or_empty(&outer, draw, "outer");
        let a = inner.to_presentation().map(|p| p.steps.len()).unwrap_or(0);
        let b = outer.to_presentation().map(|p| p.steps.len()).unwrap_or(0);
        assert_eq!(a + b, 9, "draw {draw}: presentation lengths must sum to 9");
    }
    println!("criterion 9: 25 random restrictions split the 9 steps regularly");
}

fn assert_certificate_or_empty(p: &Pairing, draw: usize, which: &str) {
    let proper = p.check_proper();
    assert!(proper.is_empty(), "draw {draw} {which}: {proper:?}");
    assert!(
        matches!(p.check_regular().unwrap(), Regularity::Regular { .. }),
        "draw {draw} {which}: irregular"
    );
}

// ---------------------------------------------------------------------
// invariants the modules promise beyond the numbered criteria
// ---------------------------------------------------------------------

#[test]
fn expansion_collapse_round_trip_on_random_complexes() {
    let poset = Poset::chain(2);
    let mut rng = StdRng::seed_from_u64(17);
    for _ in 0..20 {
        let x = Arc::new(random_fos(&mut rng, 6, &poset));
        // expand along some admissible horn, then collapse the new pair
        'search: for flag in all_dflags(&poset, 3) {
            for k in 0..flag.len() {
                if !moves::is_admissible(&flag, k) {
                    continue;
                }
                let horn = Arc::new(simplex::horn(&poset, &flag, k));
                let maps = enumerate_maps(&horn, &x);
                let Some(attach) = maps.first() else {
                    continue;
                };
                let spec = HornSpec::new(flag.clone(), k).unwrap();
                let (y, rec) = moves::expand(&x, &spec, attach).unwrap();
                let strathom::moves::MoveRecord::Expand { top, k: kk, .. } = &rec else {
                    unreachable!()
                };
                let free = y.cell(top).faces[*kk].cell.clone();
                let pair = FreePair { top: top.clone(), free, k: *kk };
                let (z, _) = moves::collapse(&y, &pair).unwrap();
                assert_eq!(z, *x.as_ref());
                break 'search;
            }
        }
    }
    println!("invariant: expand then collapse returns the original complex");
}

#[test]
fn cylinder_certificates_on_random_maps() {
    let poset = Poset::chain(2);
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..6 {
        let x = Arc::new(random_fos(&mut rng, 5, &poset));
        let y = Arc::new(random_fos(&mut rng, 5, &poset));
        let maps = enumerate_maps(&x, &y);
        let Some(f) = maps.first() else {
            continue;
        };
        let bundle = cylinder::mapping_cylinder(f).unwrap();
        assert!(bundle.total.validate().is_empty());
        assert_certificate(&bundle.tgt_pairing, "cylinder target inclusion");
        assert_eq!(
            bundle.i_src.then(&bundle.proj).unwrap().assignment(),
            f.assignment(),
            "proj ∘ i_src = f"
        );
        let idy = SimplicialMap::identity(y.clone());
        assert_eq!(bundle.i_tgt.then(&bundle.proj).unwrap().assignment(), idy.assignment());
    }
    println!("invariant: mapping cylinders certified on random maps");
}
