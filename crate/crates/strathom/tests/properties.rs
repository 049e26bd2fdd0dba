//! Property tests for the algebraic invariants: operator word identities,
//! colimit bookkeeping against brute-force oracles, and move conservation.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;

use strathom::homology::betti_z2;
use strathom::moves;
use strathom::poset::{DFlag, PElem, Poset};
use strathom::sset::{
    coproduct, outer_product, pushout, simplex, CellId, DegWord, Fss, SimplicialMap, Sx,
};

fn word_strategy() -> impl Strategy<Value = DegWord> {
    proptest::collection::btree_set(0u32..7, 0..4)
        .prop_map(|s| DegWord::new(s.into_iter().rev().collect()))
}

proptest! {
    /// The double-face identity survives word normalization: pushing d_i
    /// then d_j through any word agrees with the reordered composite.
    #[test]
    fn word_face_identities(w in word_strategy(), i in 0usize..6, j in 0usize..6) {
        prop_assume!(i < j);
        // d_i d_j = d_{j-1} d_i as operators through the word
        let (w1, r1) = w.face(j);
        let (w2, r2) = w1.face(i);
        let (v1, s1) = w.face(i);
        let (v2, s2) = v1.face(j - 1);
        // compare the residual faces after both routes; the residuals act on
        // the base cell, where the same identity is imposed by validation
        let lhs = (w2.clone(), r1, r2);
        let rhs = (v2.clone(), s1, s2);
        // normalize the residual pair with the same identity
        fn residuals(a: Option<usize>, b: Option<usize>) -> Vec<usize> {
            match (a, b) {
                (Some(x), Some(y)) => {
                    // first applied x (outer), then y: sort to normal form
                    if y < x { vec![y, x - 1] } else { vec![x, y] }
                }
                (Some(x), None) => vec![x],
                (None, Some(y)) => vec![y],
                (None, None) => vec![],
            }
        }
        prop_assert_eq!(lhs.0, rhs.0);
        prop_assert_eq!(residuals(lhs.1, lhs.2), residuals(rhs.1, rhs.2));
    }

    /// s_j then d_i either cancels or commutes per the simplicial identities.
    #[test]
    fn word_degenerate_then_face(w in word_strategy(), j in 0usize..6) {
        let up = w.degenerate(j);
        // d_j s_j = id and d_{j+1} s_j = id
        prop_assert_eq!(up.face(j), (w.clone(), None));
        prop_assert_eq!(up.face(j + 1), (w.clone(), None));
    }
}

fn chain2() -> Arc<Poset> {
    Poset::chain(2)
}

/// Brute-force oracle for product cell counts: enumerate all pairs of
/// possibly degenerate simplices of the factors in each dimension and keep
/// the jointly nondegenerate ones.
fn product_count_oracle(x: &Fss, s: &Fss, q: usize) -> usize {
    fn degenerate_sims(z: &Fss, q: usize) -> Vec<(CellId, Vec<u32>)> {
        let mut out = Vec::new();
        for (id, data) in z.cells() {
            if data.dim > q {
                continue;
            }
            let extra = q - data.dim;
            // all strictly decreasing words of length `extra` from 0..q
            let mut stack: Vec<Vec<u32>> = vec![vec![]];
            while let Some(cur) = stack.pop() {
                if cur.len() == extra {
                    out.push((id.clone(), cur));
                    continue;
                }
                let lo = cur.last().map_or(q as u32, |&l| l);
                for nxt in 0..lo {
                    let mut ext = cur.clone();
                    ext.push(nxt);
                    stack.push(ext);
                }
            }
        }
        out
    }
    let xs = degenerate_sims(x, q);
    let ss = degenerate_sims(s, q);
    let mut count = 0;
    for (_, u) in &xs {
        for (_, v) in &ss {
            let us: BTreeSet<&u32> = u.iter().collect();
            if v.iter().all(|i| !us.contains(i)) {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn product_counts_match_shuffle_oracle() {
    let p = chain2();
    let pt = Poset::point();
    let xs = [
        simplex::standard(&p, &DFlag::parse(&p, &["0", "1"]).unwrap()),
        simplex::standard(&p, &DFlag::parse(&p, &["0", "0", "1"]).unwrap()),
        simplex::boundary(&p, &DFlag::parse(&p, &["0", "1", "1"]).unwrap()),
    ];
    let ss = [
        simplex::standard(&pt, &DFlag::parse(&pt, &["0"]).unwrap()),
        simplex::standard(&pt, &DFlag::parse(&pt, &["0", "0"]).unwrap()),
        simplex::standard(&pt, &DFlag::parse(&pt, &["0", "0", "0"]).unwrap()),
    ];
    for x in &xs {
        for s in &ss {
            let prod = outer_product(x, s);
            assert!(prod.validate().is_empty());
            let top = x.dim().unwrap_or(0) + s.dim().unwrap_or(0);
            for q in 0..=top {
                assert_eq!(
                    prod.cells_of_dim(q).len(),
                    product_count_oracle(x, s, q),
                    "dim {q} of a product"
                );
            }
        }
    }
}

/// Pushing out twice equals pushing out along the composite, compared by a
/// brute-force cell-set oracle.
#[test]
fn pushout_stacks() {
    let p = chain2();
    let j = DFlag::parse(&p, &["0", "0", "1"]).unwrap();
    let horn = Arc::new(simplex::horn(&p, &j, 0));
    let full = Arc::new(simplex::standard(&p, &j));
    let i1 = SimplicialMap::inclusion(horn.clone(), full.clone()).unwrap();
    // glue two simplices onto the same horn in two stages
    let first = pushout(&i1, &SimplicialMap::identity(horn.clone())).unwrap();
    let horn_in_first = SimplicialMap::new(
        horn.clone(),
        first.total.clone(),
        horn.cell_ids().map(|id| (id.clone(), Sx::of(id.clone()))).collect(),
    )
    .unwrap();
    let second = pushout(&i1, &horn_in_first).unwrap();
    // oracle: the final cell count is |horn| + 2 + 2
    assert_eq!(second.total.len(), horn.len() + 4);
    assert!(second.total.validate().is_empty());
    // coproduct with the empty complex is the identity
    let (same, _, _) = coproduct(&full, &Fss::empty(p.clone())).unwrap();
    assert_eq!(*same, *full);
}

/// Maps preserve flags cellwise: the flag of an image equals the image of
/// the flag through the degeneracy positions.
#[test]
fn maps_preserve_flags() {
    let p = chain2();
    let x = Arc::new(simplex::standard(&p, &DFlag::parse(&p, &["0", "0", "1"]).unwrap()));
    let y = Arc::new(simplex::standard(&p, &DFlag::parse(&p, &["0", "1"]).unwrap()));
    let f = SimplicialMap::from_vertex_map(
        x.clone(),
        y.clone(),
        &[
            (simplex::subset_id(&[0]), simplex::subset_id(&[0])),
            (simplex::subset_id(&[1]), simplex::subset_id(&[0])),
            (simplex::subset_id(&[2]), simplex::subset_id(&[1])),
        ]
        .into_iter()
        .collect(),
    )
    .unwrap();
    for (id, data) in x.cells() {
        let flag = x.flag_of(id);
        let img = f.image_of(id);
        let img_sx = Sx { word: img.word.clone(), cell: img.cell.clone() };
        for i in 0..=data.dim {
            let v = y.vertex(&img_sx, i);
            assert_eq!(p.name(y.label(&v)), p.name(flag.get(i)), "vertex {i} of {id}");
        }
    }
}

/// Each collapse removes exactly one cell in two consecutive dimensions,
/// both inside the stratum of the top cell's flag maximum.
#[test]
fn collapse_changes_one_stratum() {
    let p = chain2();
    let fixtures = [
        simplex::standard(&p, &DFlag::parse(&p, &["0", "0", "1"]).unwrap()),
        simplex::standard(&p, &DFlag::parse(&p, &["0", "1", "1"]).unwrap()),
    ];
    for x in fixtures {
        for pair in moves::find_free_pairs(&x, &BTreeSet::new(), false) {
            let stratum = x.poset.name(x.stratum_of(&pair.top)).to_owned();
            let n = x.dim_of(&pair.top);
            let (y, _) = moves::collapse(&x, &pair).unwrap();
            let count = |z: &Fss, d: usize, s: &str| {
                z.cells_of_dim(d)
                    .iter()
                    .filter(|c| z.poset.name(z.stratum_of(c)) == s)
                    .count()
            };
            assert_eq!(count(&x, n, &stratum), count(&y, n, &stratum) + 1);
            assert_eq!(count(&x, n - 1, &stratum), count(&y, n - 1, &stratum) + 1);
            for q in x.poset.elements() {
                let s = x.poset.name(q);
                if s != stratum {
                    for d in 0..=n {
                        assert_eq!(count(&x, d, s), count(&y, d, s));
                    }
                }
            }
        }
    }
}

/// Z/2 homology is blind to relabeling and to coproduct order.
#[test]
fn betti_under_coproduct() {
    let p = chain2();
    let a = simplex::boundary(&p, &DFlag::parse(&p, &["0", "1", "1"]).unwrap());
    let b = simplex::standard(&p, &DFlag::parse(&p, &["0"]).unwrap());
    let (ab, _, _) = coproduct(&a, &b).unwrap();
    let (ba, _, _) = coproduct(&b, &a).unwrap();
    assert_eq!(betti_z2(&ab), betti_z2(&ba));
    assert_eq!(ab.euler(), a.euler() + b.euler());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Subsets of valid complexes validate; the subdivision of a subset
    /// embeds in the subdivision of the whole.
    #[test]
    fn subset_and_sd_compatible(seed in 0u64..1000) {
        let p = chain2();
        let j = DFlag::parse(&p, &["0", "0", "1"]).unwrap();
        let x = simplex::standard(&p, &j);
        // pick a face-closed subset from the seed
        let mut keep: BTreeSet<CellId> = BTreeSet::new();
        for (i, id) in x.cell_ids().enumerate() {
            if seed >> (i % 7) & 1 == 1 {
                keep.extend(x.face_closure(id));
            }
        }
        prop_assume!(!keep.is_empty());
        let y = x.subset(&keep).unwrap();
        prop_assert!(y.validate().is_empty());
        let sdy = strathom::subdivision::sd(&y);
        let sdx = strathom::subdivision::sd(&x);
        for id in sdy.cell_ids() {
            prop_assert!(sdx.contains(id));
        }
    }

    /// A Vietoris-Rips complex at a smaller scale embeds in the complex at
    /// a larger scale.
    #[test]
    fn vr_nests(points in proptest::collection::vec((0.0f64..4.0, 0.0f64..4.0), 3..9),
                e1 in 0.3f64..1.8, bump in 0.05f64..1.2) {
        let p = Poset::chain(1);
        let pts: Vec<Vec<f64>> = points.iter().map(|(a, b)| vec![*a, *b]).collect();
        let labels = vec![PElem(0); pts.len()];
        let cloud = strathom::tda::LabeledPointCloud::new(p, pts, labels).unwrap();
        let small = strathom::tda::vietoris_rips(&cloud, e1, 2, 1).unwrap();
        let big = strathom::tda::vietoris_rips(&cloud, e1 + bump, 2, 1).unwrap();
        for id in small.cell_ids() {
            prop_assert!(big.contains(id));
        }
    }
}

/// is_fos implies is_nonsingular on every complex generated from simplex
/// subsets and coproducts with up to eight cells.
#[test]
fn fos_implies_nonsingular() {
    let p = chain2();
    let mut generated: Vec<Fss> = Vec::new();
    for names in [vec!["0", "1"], vec!["0", "0"], vec!["0", "0", "1"]] {
        let x = simplex::standard(&p, &DFlag::parse(&p, &names).unwrap());
        let ids: Vec<CellId> = x.cell_ids().cloned().collect();
        for mask in 0u32..(1 << ids.len().min(7)) {
            let mut keep = BTreeSet::new();
            for (i, id) in ids.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    keep.extend(x.face_closure(id));
                }
            }
            if !keep.is_empty() && keep.len() <= 8 {
                generated.push(x.subset(&keep).unwrap());
            }
        }
    }
    let mut loops = Fss::empty(p.clone());
    loops.insert_vertex("v".into(), PElem(0));
    loops.insert_cell("e".into(), vec![Sx::of("v".into()), Sx::of("v".into())]);
    generated.push(loops);
    for x in &generated {
        if strathom::fos::is_fos(x) {
            assert!(strathom::fos::is_nonsingular(x));
        }
    }
}

// `.fss.json` round trips bit exactly: serialize, parse, serialize.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn json_round_trip_canonical(mask in 1u32..127) {
        let p = chain2();
        let x = simplex::standard(&p, &DFlag::parse(&p, &["0", "0", "1"]).unwrap());
        let ids: Vec<CellId> = x.cell_ids().cloned().collect();
        let mut keep = BTreeSet::new();
        for (i, id) in ids.iter().enumerate() {
            if mask & (1 << (i % 7)) != 0 {
                keep.extend(x.face_closure(id));
            }
        }
        prop_assume!(!keep.is_empty());
        let y = x.subset(&keep).unwrap();
        let text = y.to_json_string();
        let z = Fss::from_json_str(&text).unwrap();
        prop_assert_eq!(&z, &y);
        prop_assert_eq!(z.to_json_string(), text);
    }
}

/// The external move-record format: tag plus fields, snake case.
#[test]
fn move_record_json_shape() {
    let rec = moves::MoveRecord::Collapse { top: CellId::new("t"), k: 1 };
    let v = serde_json::to_value(&rec).unwrap();
    assert_eq!(v, serde_json::json!({"kind": "collapse", "top": "t", "k": 1}));
    let attach: BTreeMap<CellId, (Vec<u32>, CellId)> =
        [(CellId::new("0"), (vec![], CellId::new("a")))].into_iter().collect();
    let rec = moves::MoveRecord::Expand {
        dflag: vec!["0".into(), "0".into()],
        k: 1,
        attach,
        top: CellId::new("T"),
        free: CellId::new("F"),
    };
    let v = serde_json::to_value(&rec).unwrap();
    assert_eq!(v["kind"], "expand");
    assert_eq!(v["dflag"], serde_json::json!(["0", "0"]));
}

/// Steps within one level of a presentation commute: reversing each level
/// block still replays.
#[test]
fn presentation_levels_commute() {
    use strathom::pairing::{Presentation, Regularity};
    let p = Poset::chain(3);
    let flag = DFlag::parse(&p, &["0", "1", "2"]).unwrap();
    let pairing = strathom::canonical::sd_section_pairing(&p, &flag).unwrap();
    let Regularity::Regular { phi } = pairing.check_regular().unwrap() else {
        panic!("expected regular")
    };
    let pres = pairing.to_presentation().unwrap();
    let mut steps = pres.steps.clone();
    // reverse inside each level, keeping levels in order
    steps.sort_by_key(|s| phi[&s.free]);
    let mut reordered = Vec::new();
    let mut i = 0;
    while i < steps.len() {
        let level = phi[&steps[i].free];
        let mut block: Vec<_> =
            steps[i..].iter().take_while(|s| phi[&s.free] == level).cloned().collect();
        i += block.len();
        block.reverse();
        reordered.extend(block);
    }
    let shuffled = Presentation { cof: pres.cof.clone(), steps: reordered };
    shuffled.replay().unwrap();
}

/// The mirrored corner (horn on the unfiltered factor) certifies too; the
/// cylinder machinery relies on it.
#[test]
fn mirrored_pushout_product_certifies() {
    use strathom::canonical::pushout_product;
    use strathom::pairing::Regularity;
    let p = Poset::chain(2);
    for names in [vec!["0"], vec!["0", "1"], vec!["0", "0", "1"]] {
        let flag = DFlag::parse(&p, &names).unwrap();
        for n in 1..=2usize {
            for k in 0..=n {
                let pp = pushout_product(&p, &flag, k, n, false).unwrap();
                assert!(pp.pairing.check_proper().is_empty());
                assert!(matches!(pp.pairing.check_regular().unwrap(), Regularity::Regular { .. }));
                pp.pairing.to_presentation().unwrap();
            }
        }
    }
}

/// Stage-wise failures of the iterated relative subdivision name their
/// stage.
#[test]
fn family_failures_are_staged() {
    use std::sync::Arc;
    let p = Poset::chain(2);
    let x = Arc::new(simplex::standard(&p, &DFlag::parse(&p, &["0", "1"]).unwrap()));
    let a1: BTreeSet<CellId> = [simplex::subset_id(&[0])].into_iter().collect();
    // second subcomplex: both vertices but not the edge between them - not full
    let a2: BTreeSet<CellId> =
        [simplex::subset_id(&[0]), simplex::subset_id(&[1])].into_iter().collect();
    let Err(err) = strathom::subdivision::sd_family(&x, &[a1, a2]) else {
        panic!("expected a staged failure");
    };
    assert!(err.to_string().contains("stage 2"), "{err}");
    // non-nested families are rejected up front
    let b1: BTreeSet<CellId> = [simplex::subset_id(&[0])].into_iter().collect();
    let b2: BTreeSet<CellId> = [simplex::subset_id(&[1])].into_iter().collect();
    assert!(strathom::subdivision::sd_family(&x, &[b1, b2]).is_err());
}

/// The ascending scan order still reaches a local minimum and verifies.
#[test]
fn ascending_reduce_order() {
    use strathom::reduce::{reduce, ReduceStrategy};
    let p = Poset::chain(2);
    let x = simplex::standard(&p, &DFlag::parse(&p, &["0", "0", "1"]).unwrap());
    let r = reduce(&x, &ReduceStrategy { descending: false, ..Default::default() });
    assert!(r.certificate.verify().is_ok());
    assert_eq!(r.result.euler(), x.euler());
    let again = reduce(&r.result, &ReduceStrategy { descending: false, ..Default::default() });
    assert_eq!(again.report.moves, 0);
}

/// A move budget stops the reducer early and the partial certificate still
/// verifies.
#[test]
fn reduce_respects_move_budget() {
    use strathom::reduce::{reduce, ReduceStrategy};
    let p = Poset::chain(2);
    let x = simplex::standard(&p, &DFlag::parse(&p, &["0", "0", "1"]).unwrap());
    let r = reduce(&x, &ReduceStrategy { max_rounds: Some(1), ..Default::default() });
    assert_eq!(r.report.moves, 1);
    assert!(r.certificate.verify().is_ok());
}
