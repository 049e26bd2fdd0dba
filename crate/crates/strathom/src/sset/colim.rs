//! Colimits: coproducts, pushouts along cofibrations, and the outer
//! product with an unfiltered simplicial set. All are computed on the
//! underlying simplicial sets and filtered afterwards.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{CellData, CellId, DegWord, Fss, SimplicialMap, Sx};
use crate::error::{Error, Result};

fn fresh_id(base: &CellId, used: &BTreeSet<CellId>) -> CellId {
    if !used.contains(base) {
        return base.clone();
    }
    for k in 1.. {
        let cand = CellId::new(format!("{base}~{k}"));
        if !used.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// Disjoint union. Ids of `x` are kept; colliding ids of `y` get a
/// provenance suffix.
pub fn coproduct(x: &Fss, y: &Fss) -> Result<(Arc<Fss>, SimplicialMap, SimplicialMap)> {
    if x.poset != y.poset {
        return Err(Error::Poset("coproduct requires matching posets".into()));
    }
    let mut out = x.clone();
    let mut used: BTreeSet<CellId> = x.cell_ids().cloned().collect();
    let mut rename: BTreeMap<CellId, CellId> = BTreeMap::new();
    for id in y.cell_ids() {
        let fresh = fresh_id(id, &used);
        used.insert(fresh.clone());
        rename.insert(id.clone(), fresh);
    }
    for (id, data) in y.cells() {
        let faces = data
            .faces
            .iter()
            .map(|f| Sx { word: f.word.clone(), cell: rename[&f.cell].clone() })
            .collect();
        out.insert_cell_raw(rename[id].clone(), CellData { dim: data.dim, faces });
        if data.dim == 0 {
            out.set_label(rename[id].clone(), y.label(id));
        }
    }
    let out = Arc::new(out);
    let left = SimplicialMap::new(
        Arc::new(x.clone()),
        out.clone(),
        x.cell_ids().map(|id| (id.clone(), Sx::of(id.clone()))).collect(),
    )?;
    let right = SimplicialMap::new(
        Arc::new(y.clone()),
        out.clone(),
        y.cell_ids().map(|id| (id.clone(), Sx::of(rename[id].clone()))).collect(),
    )?;
    Ok((out, left, right))
}

/// Result of a pushout `D = C ∪_A B` along a cofibration `A ↪ B`.
pub struct PushoutResult {
    pub total: Arc<Fss>,
    /// `C ↪ D`, always injective.
    pub from_shared: SimplicialMap,
    /// `B → D`.
    pub from_attached: SimplicialMap,
    /// Ids of the freshly attached cells, image of `B \ A`.
    pub new_cells: BTreeSet<CellId>,
}

/// Pushout of `f: A → C` along the cofibration `i: A ↪ B`. The cofibration
/// must be injective on cells with empty words; `f` is arbitrary.
pub fn pushout(i: &SimplicialMap, f: &SimplicialMap) -> Result<PushoutResult> {
    if *i.src != *f.src {
        return Err(Error::Precondition("pushout legs must share their source".into()));
    }
    if i.dst.poset != f.dst.poset {
        return Err(Error::Poset("pushout requires matching posets".into()));
    }
    if !i.is_injective_on_cells() {
        return Err(Error::Precondition("pushout along a non-injective map".into()));
    }
    let b = &i.dst;
    let c = &f.dst;
    // image of A inside B, with the inverse correspondence
    let mut from_a: BTreeMap<CellId, CellId> = BTreeMap::new();
    for (a_id, sx) in i.assignment() {
        from_a.insert(sx.cell.clone(), a_id.clone());
    }
    let mut out = (**c).clone();
    let mut used: BTreeSet<CellId> = c.cell_ids().cloned().collect();
    let mut b_image: BTreeMap<CellId, Sx> = BTreeMap::new();
    let mut new_cells = BTreeSet::new();
    for id in b.cell_ids() {
        if let Some(a_id) = from_a.get(id) {
            b_image.insert(id.clone(), f.image_of(a_id).clone());
        } else {
            let fresh = fresh_id(id, &used);
            used.insert(fresh.clone());
            new_cells.insert(fresh.clone());
            b_image.insert(id.clone(), Sx::of(fresh));
        }
    }
    for (id, data) in b.cells() {
        let img = &b_image[id];
        if !img.word.is_empty() || !new_cells.contains(&img.cell) {
            continue; // lands in C
        }
        let faces = data
            .faces
            .iter()
            .map(|face| {
                let t = &b_image[&face.cell];
                Sx { word: face.word.then(&t.word), cell: t.cell.clone() }
            })
            .collect();
        out.insert_cell_raw(img.cell.clone(), CellData { dim: data.dim, faces });
        if data.dim == 0 {
            out.set_label(img.cell.clone(), b.label(id));
        }
    }
    let total = Arc::new(out);
    let from_shared = SimplicialMap::new(
        c.clone(),
        total.clone(),
        c.cell_ids().map(|id| (id.clone(), Sx::of(id.clone()))).collect(),
    )?;
    let from_attached = SimplicialMap::new(b.clone(), total.clone(), b_image)?;
    Ok(PushoutResult { total, from_shared, from_attached, new_cells })
}

/// Id of a product cell: the jointly nondegenerate pair
/// `(s_u x̄, s_v s̄)` with `u ∩ v = ∅`.
pub fn product_id(x: &CellId, u: &DegWord, s: &CellId, v: &DegWord) -> CellId {
    let fmt_word =
        |w: &DegWord| w.indices().iter().map(|i| i.to_string()).collect::<Vec<_>>().join("-");
    CellId::new(format!("({x})*({s})|{}|{}", fmt_word(u), fmt_word(v)))
}

/// The outer product `X ⊗ S` of a filtered simplicial set with an
/// unfiltered one, filtered through the projection to `X`. Nondegenerate
/// `q`-cells are the jointly nondegenerate pairs of `q`-simplices.
pub fn outer_product(x: &Fss, s: &Fss) -> Fss {
    let mut out = Fss::empty(x.poset.clone());
    // enumerate cells
    let mut cells: Vec<(CellId, DegWord, CellId, DegWord)> = Vec::new();
    for (xid, xdata) in x.cells() {
        for (sid, sdata) in s.cells() {
            let (m, n) = (xdata.dim, sdata.dim);
            let lo = m.max(n);
            let hi = m + n;
            for q in lo..=hi {
                for (u, v) in disjoint_words(q, q - m, q - n) {
                    cells.push((xid.clone(), u, sid.clone(), v));
                }
            }
        }
    }
    for (xid, u, sid, v) in &cells {
        let id = product_id(xid, u, sid, v);
        let q = x.dim_of(xid) + u.len();
        if q == 0 {
            out.insert_vertex(id, x.label(xid));
            continue;
        }
        let xs = Sx { word: u.clone(), cell: xid.clone() };
        let ss = Sx { word: v.clone(), cell: sid.clone() };
        let faces = (0..=q)
            .map(|i| {
                let fx = x.face(&xs, i);
                let fs = s.face(&ss, i);
                normalize_pair(&fx, &fs)
            })
            .collect();
        out.insert_cell(id, faces);
    }
    out
}

/// Joint normal form of a pair of abstract simplices of equal dimension:
/// strips the common degeneracies `w = u ∩ v` and returns
/// `s_w (cell of the reduced pair)`.
pub fn normalize_pair(fx: &Sx, fs: &Sx) -> Sx {
    let u: BTreeSet<u32> = fx.word.indices().iter().copied().collect();
    let v: BTreeSet<u32> = fs.word.indices().iter().copied().collect();
    let mut common: Vec<u32> = u.intersection(&v).copied().collect();
    common.sort_unstable_by(|a, b| b.cmp(a));
    let strip = |word: &DegWord| -> DegWord {
        let mut set: Vec<u32> = word.indices().to_vec();
        for &p in &common {
            set = set.iter().filter(|&&q| q != p).map(|&q| if q > p { q - 1 } else { q }).collect();
        }
        DegWord::new(set)
    };
    let (u0, v0) = (strip(&fx.word), strip(&fs.word));
    Sx {
        word: DegWord::new(common),
        cell: product_id(&fx.cell, &u0, &fs.cell, &v0),
    }
}

/// All pairs of disjoint subsets of `{0..q-1}` with the given sizes, as
/// decreasing words.
fn disjoint_words(q: usize, nu: usize, nv: usize) -> Vec<(DegWord, DegWord)> {
    let mut out = Vec::new();
    let positions: Vec<u32> = (0..q as u32).collect();
    for umask in 0u32..(1 << q) {
        if umask.count_ones() as usize != nu {
            continue;
        }
        for vmask in 0u32..(1 << q) {
            if vmask.count_ones() as usize != nv || umask & vmask != 0 {
                continue;
            }
            let mut u: Vec<u32> = positions.iter().copied().filter(|p| umask & (1 << p) != 0).collect();
            let mut v: Vec<u32> = positions.iter().copied().filter(|p| vmask & (1 << p) != 0).collect();
            u.reverse();
            v.reverse();
            out.push((DegWord::new(u), DegWord::new(v)));
        }
    }
    out
}

/// Projection `X ⊗ S → X`.
pub fn product_proj_x(prod: &Arc<Fss>, x: &Arc<Fss>, s: &Fss) -> Result<SimplicialMap> {
    let mut assign = BTreeMap::new();
    for (xid, xdata) in x.cells() {
        for (sid, sdata) in s.cells() {
            let (m, n) = (xdata.dim, sdata.dim);
            for q in m.max(n)..=m + n {
                for (u, v) in disjoint_words(q, q - m, q - n) {
                    let id = product_id(xid, &u, sid, &v);
                    if prod.contains(&id) {
                        assign.insert(id, Sx { word: u.clone(), cell: xid.clone() });
                    }
                }
            }
        }
    }
    SimplicialMap::new(prod.clone(), x.clone(), assign)
}
