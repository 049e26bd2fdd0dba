//! Mapping cylinders and their anodyne certificates: end inclusions,
//! target inclusions, subcylinders, the one-end-collapsed cylinder, the
//! comparison square for homotopic cofibrations, and the pushout-diagonal
//! sum of torsion representatives.
//!
//! Everything is assembled from two primitives and transported along
//! pushouts: the prism rule pairing a cylinder cell with the cell
//! duplicating its transition vertex, and the grid-walk rule for the
//! two-ended corner over an anodyne base inclusion.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pairing::{Cofibration, PairEntry, Pairing};
use crate::poset::{DFlag, Poset};
use crate::sset::{
    outer_product, product_id, product_proj_x, pushout, simplex, CellId, DegWord, Fss,
    PushoutResult, SimplicialMap, Sx,
};

/// The interval over the one-point poset, with vertices `0`, `1`.
pub fn interval() -> Arc<Fss> {
    let pt = Poset::point();
    Arc::new(simplex::standard(&pt, &DFlag::parse(&pt, &["0", "0"]).unwrap()))
}

/// All jointly nondegenerate pairs describing the cells of `X ⊗ Δ¹`,
/// tagged with the 0/1 vertex vector of the interval factor.
fn cylinder_cells(x: &Fss) -> Vec<(CellId, DegWord, CellId, DegWord, Vec<u8>)> {
    let seg = interval();
    let mut out = Vec::new();
    for (xid, xdata) in x.cells() {
        for (sid, sdata) in seg.cells() {
            let (m, n) = (xdata.dim, sdata.dim);
            for q in m.max(n)..=m + n {
                for (u, v) in disjoint_words(q, q - m, q - n) {
                    let vec = interval_vertex_vec(sid, &v, q);
                    out.push((xid.clone(), u, sid.clone(), v, vec));
                }
            }
        }
    }
    out
}

fn disjoint_words(q: usize, nu: usize, nv: usize) -> Vec<(DegWord, DegWord)> {
    let mut out = Vec::new();
    for umask in 0u32..(1 << q) {
        if umask.count_ones() as usize != nu {
            continue;
        }
        for vmask in 0u32..(1 << q) {
            if vmask.count_ones() as usize != nv || umask & vmask != 0 {
                continue;
            }
            let word = |mask: u32| {
                let mut w: Vec<u32> = (0..q as u32).filter(|p| mask & (1 << p) != 0).collect();
                w.reverse();
                DegWord::new(w)
            };
            out.push((word(umask), word(vmask)));
        }
    }
    out
}

/// The 0/1 vertex vector of an interval simplex `(s̄, v)` of dimension `q`.
fn interval_vertex_vec(sid: &CellId, v: &DegWord, q: usize) -> Vec<u8> {
    let eta = |pos: usize| pos - v.indices().iter().filter(|&&u| (u as usize) < pos).count();
    (0..=q)
        .map(|j| match sid.as_str() {
            "0" => 0,
            "1" => 1,
            _ => eta(j) as u8, // the edge runs from vertex 0 to vertex 1
        })
        .collect()
}

/// Rebuilds the interval simplex of a monotone 0/1 vector.
fn interval_sx_of_vec(vec: &[u8]) -> Sx {
    debug_assert!(vec.windows(2).all(|w| w[0] <= w[1]));
    let zeros = vec.iter().filter(|&&b| b == 0).count();
    let ones = vec.len() - zeros;
    if ones == 0 || zeros == 0 {
        let sid: CellId = if ones == 0 { "0".into() } else { "1".into() };
        let mut w: Vec<u32> = (0..vec.len() as u32 - 1).collect();
        w.reverse();
        Sx { word: DegWord::new(w), cell: sid }
    } else {
        let t = zeros - 1; // the only non-repeat position
        let mut w: Vec<u32> = (0..vec.len() as u32 - 1).filter(|&j| j as usize != t).collect();
        w.reverse();
        Sx { word: DegWord::new(w), cell: "0.1".into() }
    }
}

/// Product cell of a jointly nondegenerate pair of abstract simplices.
fn pair_cell(xs: &Sx, ss: &Sx) -> CellId {
    debug_assert!(
        xs.word.indices().iter().all(|i| !ss.word.indices().contains(i)),
        "pair must be jointly nondegenerate"
    );
    product_id(&xs.cell, &xs.word, &ss.cell, &ss.word)
}

/// Duplicates vertex `t` of an abstract simplex.
fn duplicate_vertex(x: &Fss, sx: &Sx, t: usize) -> Sx {
    let q = x.sx_dim(sx);
    let mut alpha: Vec<usize> = (0..=q).collect();
    alpha.insert(t, t);
    x.apply_monotone(sx, &alpha)
}

/// The nondegenerate cell of `X ⊗ Δ¹` presenting `x̄ ⊗ {end}`.
pub fn end_cell(x: &Fss, xid: &CellId, end: u8) -> CellId {
    let sid: CellId = if end == 0 { "0".into() } else { "1".into() };
    let mut w: Vec<u32> = (0..x.dim_of(xid) as u32).collect();
    w.reverse();
    product_id(xid, &DegWord::empty(), &sid, &DegWord::new(w))
}

/// Pairing for `Z ⊗ {end} ∪ A ⊗ Δ¹ ↪ Z ⊗ Δ¹` with `A` a face-closed set of
/// cells of `Z` (possibly empty). Every outside cell pairs with the cell
/// duplicating its vertex at the 0/1 transition.
pub fn corner_pairing(z: &Fss, prod: &Arc<Fss>, end: u8, a: &BTreeSet<CellId>) -> Result<Pairing> {
    let mut base: BTreeSet<CellId> = BTreeSet::new();
    let mut pairs: BTreeMap<CellId, PairEntry> = BTreeMap::new();
    for (xid, u, sid, v, vec) in cylinder_cells(z) {
        let id = product_id(&xid, &u, &sid, &v);
        if vec.iter().all(|&b| b == end) || a.contains(&xid) {
            base.insert(id);
            continue;
        }
        let q = vec.len() - 1;
        let xs = Sx { word: u.clone(), cell: xid.clone() };
        // the transition next to the free end; non-base cells always reach it
        let (t, insert_at, type_one) = if end == 0 {
            let t = vec.iter().position(|&b| b == 1).expect("non-base cells carry a 1");
            (t, t, t >= 1 && u.contains(t - 1))
        } else {
            let t = vec.iter().rposition(|&b| b == 0).expect("non-base cells carry a 0");
            (t, t + 1, t < q && u.contains(t))
        };
        if type_one {
            continue;
        }
        let top_x = duplicate_vertex(z, &xs, t);
        let mut new_vec = vec.clone();
        new_vec.insert(insert_at, end);
        let top_s = interval_sx_of_vec(&new_vec);
        pairs.insert(id, PairEntry { top: pair_cell(&top_x, &top_s), k: insert_at });
    }
    Ok(Pairing::new(Cofibration::new(prod.clone(), base)?, pairs))
}

/// The corner `B ⊗ {0} ∪ A ⊗ Δ¹ ∪ B ⊗ {1} ↪ B ⊗ Δ¹` over a certified
/// anodyne inclusion `A ↪ B`: the grid-walk pairing assembled pair by pair.
pub fn double_corner_pairing(b: &Arc<Fss>, s: &Pairing, prod: &Arc<Fss>) -> Result<Pairing> {
    if *s.cof.total != **b {
        return Err(Error::Precondition("pairing must certify the cylinder base".into()));
    }
    struct Owner {
        top: CellId,
        k: usize,
        skipped: bool,
    }
    let mut owner: BTreeMap<CellId, Owner> = BTreeMap::new();
    for (sigma, e) in &s.pairs {
        owner.insert(sigma.clone(), Owner { top: e.top.clone(), k: e.k, skipped: true });
        owner.insert(e.top.clone(), Owner { top: e.top.clone(), k: e.k, skipped: false });
    }
    let mut base: BTreeSet<CellId> = BTreeSet::new();
    let mut pairs: BTreeMap<CellId, PairEntry> = BTreeMap::new();
    for (xid, u, sid, v, vec) in cylinder_cells(b) {
        let id = product_id(&xid, &u, &sid, &v);
        if vec.windows(2).all(|w| w[0] == w[1]) || s.cof.base.contains(&xid) {
            base.insert(id);
            continue;
        }
        let own = owner
            .get(&xid)
            .ok_or_else(|| Error::Precondition(format!("cell `{xid}` not covered by the pairing")))?;
        let flag = b.flag_of(&own.top);
        let m = b.dim_of(&own.top);
        let k = own.k;
        // walk coordinates inside Δ^{flag(top)} × Δ¹
        let eta = |pos: usize| pos - u.indices().iter().filter(|&&w| (w as usize) < pos).count();
        let mu: Vec<usize> = (0..vec.len())
            .map(|j| {
                let p = eta(j);
                if own.skipped && p >= k {
                    p + 1
                } else {
                    p
                }
            })
            .collect();
        let case_next = k < m && flag.get(k) == flag.get(k + 1);
        let insert_at = if case_next {
            if (0..mu.len() - 1).any(|j| mu[j] == k && mu[j + 1] == k + 1 && vec[j] == vec[j + 1]) {
                continue; // type I: removable departure step
            }
            mu.iter().position(|&a| a == k + 1).expect("walks cover the column above k")
        } else {
            if (1..mu.len()).any(|j| mu[j] == k && mu[j - 1] == k - 1 && vec[j] == vec[j - 1]) {
                continue; // type I: removable arrival step
            }
            mu.iter().rposition(|&a| a == k - 1).expect("walks cover the column below k") + 1
        };
        let mut new_mu = mu.clone();
        new_mu.insert(insert_at, k);
        let mut new_vec = vec.clone();
        let nu = if case_next { vec[insert_at] } else { vec[insert_at - 1] };
        new_vec.insert(insert_at, nu);
        let top_x = b.apply_monotone(&Sx::of(own.top.clone()), &new_mu);
        let top_s = interval_sx_of_vec(&new_vec);
        pairs.insert(id, PairEntry { top: pair_cell(&top_x, &top_s), k: insert_at });
    }
    Ok(Pairing::new(Cofibration::new(prod.clone(), base)?, pairs))
}

/// A mapping cylinder with its structure maps. The cylinder is glued to the
/// target along the 0 end; the source includes at 1.
pub struct CylinderBundle {
    pub total: Arc<Fss>,
    pub i_src: SimplicialMap,
    pub i_tgt: SimplicialMap,
    pub proj: SimplicialMap,
    /// Certificate for `target ↪ cylinder`.
    pub tgt_pairing: Pairing,
    /// The pushout gluing `X ⊗ Δ¹` onto the target; its attached leg maps
    /// product cells into the cylinder.
    pub glue: PushoutResult,
    /// The product `X ⊗ Δ¹` the cylinder was glued from.
    pub prod: Arc<Fss>,
}

/// The end inclusion `X ≅ X ⊗ {e} ↪ X ⊗ Δ¹` as a map.
pub fn end_inclusion(x: &Arc<Fss>, prod: &Arc<Fss>, end: u8) -> Result<SimplicialMap> {
    let assign =
        x.cell_ids().map(|id| (id.clone(), Sx::of(end_cell(x, id, end)))).collect();
    SimplicialMap::new(x.clone(), prod.clone(), assign)
}

/// Builds `M_f` for `f: X → Y` as the pushout of the 0-end inclusion along
/// `f`, with the certificate that `Y ↪ M_f` is anodyne.
pub fn mapping_cylinder(f: &SimplicialMap) -> Result<CylinderBundle> {
    let x = &f.src;
    let y = &f.dst;
    let prod = Arc::new(outer_product(x, &interval()));
    let end_pairing = corner_pairing(x, &prod, 0, &BTreeSet::new())?;
    let end_map = {
        let base = Arc::new(end_pairing.cof.base_complex());
        let assign = x
            .cells()
            .map(|(id, _)| (end_cell(x, id, 0), f.image_of(id).clone()))
            .collect();
        SimplicialMap::new(base, y.clone(), assign)?
    };
    let (glue, tgt_pairing) = end_pairing.pushforward(&end_map)?;
    let total = glue.total.clone();
    let i_tgt = glue.from_shared.clone();
    let i_src = end_inclusion(x, &prod, 1)?.then(&glue.from_attached)?;
    // projection: collapse the cylinder coordinate, then apply f
    let to_y = product_proj_x(&prod, x, &interval())?.then(f)?;
    let mut assign: BTreeMap<CellId, Sx> = BTreeMap::new();
    for id in total.cell_ids() {
        if !glue.new_cells.contains(id) {
            assign.insert(id.clone(), Sx::of(id.clone()));
        }
    }
    for (pid, img) in glue.from_attached.assignment() {
        if img.word.is_empty() && glue.new_cells.contains(&img.cell) {
            assign.insert(img.cell.clone(), to_y.image_of(pid).clone());
        }
    }
    let proj = SimplicialMap::new(total.clone(), y.clone(), assign)?;
    Ok(CylinderBundle { total, i_src, i_tgt, proj, tgt_pairing, glue, prod })
}

/// Certificate for a subcylinder inclusion `M_{f∘i} ↪ M_f`, where `i` is
/// the inclusion of the face-closed subset `sub` of the source.
pub fn subcylinder_pairing(f: &SimplicialMap, sub: &BTreeSet<CellId>) -> Result<(CylinderBundle, Pairing)> {
    let bundle = mapping_cylinder(f)?;
    let corner = corner_pairing(&f.src, &bundle.prod, 0, sub)?;
    let transported = corner.transport(&bundle.glue)?;
    Ok((bundle, transported))
}

/// Certificate for `B ∪_A M_{f∘s} ↪ M_f`, where the anodyne inclusion
/// `A ↪ B` is given by its pairing `s` and `f` maps `B` onwards: the
/// two-ended corner over `s`, pushed through the cylinder gluing.
pub fn relative_cylinder_pairing(s: &Pairing, f: &SimplicialMap) -> Result<(CylinderBundle, Pairing)> {
    if *s.cof.total != *f.src {
        return Err(Error::Precondition("the pairing must certify a subcomplex of the map's source".into()));
    }
    let bundle = mapping_cylinder(f)?;
    let big = double_corner_pairing(&f.src, s, &bundle.prod)?;
    let transported = big.transport(&bundle.glue)?;
    Ok((bundle, transported))
}

/// The shapes of cylinder inclusions this module certifies.
pub enum CylinderInclusion<'a> {
    /// `Z ↪ Z ⊗ Δ¹` at the named end.
    End { z: &'a Arc<Fss>, end: u8 },
    /// `Y ↪ M_f`.
    Target { f: &'a SimplicialMap },
    /// `B ∪_A M_{f∘s} ↪ M_f` for a certified `A ↪ B`.
    Relative { s: &'a Pairing, f: &'a SimplicialMap },
    /// `M_{f∘i} ↪ M_f` for a face-closed subset of the source.
    Subcylinder { f: &'a SimplicialMap, sub: &'a BTreeSet<CellId> },
}

/// Dispatches to the matching constructor and returns its certificate.
pub fn cylinder_fsae(which: CylinderInclusion<'_>) -> Result<Pairing> {
    match which {
        CylinderInclusion::End { z, end } => {
            let prod = Arc::new(outer_product(z, &interval()));
            corner_pairing(z, &prod, end, &BTreeSet::new())
        }
        CylinderInclusion::Target { f } => Ok(mapping_cylinder(f)?.tgt_pairing),
        CylinderInclusion::Relative { s, f } => Ok(relative_cylinder_pairing(s, f)?.1),
        CylinderInclusion::Subcylinder { f, sub } => Ok(subcylinder_pairing(f, sub)?.1),
    }
}

/// Result of collapsing the source end of the cylinder over a homotopy.
pub struct MhatResult {
    /// `M̂_H`: the cylinder of `H` with its source end collapsed to `X`.
    pub total: Arc<Fss>,
    /// `X ↪ M̂_H`, the collapsed end.
    pub x_inclusion: SimplicialMap,
    /// Internal copies of `M_{H_0}` and `M_{H_1}` with certificates for
    /// their inclusions into `M̂_H`.
    pub from_h0: (Arc<Fss>, Pairing),
    pub from_h1: (Arc<Fss>, Pairing),
    /// The underlying cylinder of `H` with its collapse pushout.
    pub cylinder: CylinderBundle,
    pub collapse: PushoutResult,
}

/// For an elementary homotopy `H: X ⊗ Δ¹ → Z`, builds `M̂_H` and certifies
/// both composite inclusions `M_{H_e} ↪ M̂_H`.
pub fn mhat(x: &Arc<Fss>, h: &SimplicialMap) -> Result<MhatResult> {
    let c = &h.src; // X ⊗ Δ¹
    let m_h = mapping_cylinder(h)?;
    let proj_x = product_proj_x(c, x, &interval())?;
    let collapse = pushout(&m_h.i_src, &proj_x)?;
    let total = collapse.total.clone();
    let x_inclusion = collapse.from_shared.clone();
    let mut halves = Vec::new();
    for end in [0u8, 1u8] {
        let end_sub_pairing = corner_pairing(x, c, end, &BTreeSet::new())?;
        let big_corner = double_corner_pairing(c, &end_sub_pairing, &m_h.prod)?;
        let step1 = big_corner.transport(&m_h.glue)?;
        let step2 = step1.transport(&collapse)?;
        halves.push((Arc::new(step2.cof.base_complex()), step2));
    }
    let h1 = halves.pop().unwrap();
    let h0 = halves.pop().unwrap();
    Ok(MhatResult { total, x_inclusion, from_h0: h0, from_h1: h1, cylinder: m_h, collapse })
}

/// The comparison square for two homotopic cofibrations `f, g: X ↪ Y`:
/// both compose with certified anodyne maps into a common complex, and the
/// two composites out of `X` agree on the nose.
pub struct HomotopySquare {
    pub total: Arc<Fss>,
    pub via_f: SimplicialMap,
    pub via_g: SimplicialMap,
    /// Certificates for every constructed arrow: the `1`-end inclusion of
    /// `Y ⊗ Δ¹`, the subcylinder corners over `f` and `g`, the inclusions
    /// of both internal cylinders into `M̂_H`, and the four pushout legs.
    pub certificates: Vec<Pairing>,
}

/// Builds the square: `R` glues `Y ⊗ Δ¹` to `M̂_H` along both internal
/// mapping-cylinder copies.
pub fn homotopy_square(
    x: &Arc<Fss>,
    f: &SimplicialMap,
    g: &SimplicialMap,
    h: &SimplicialMap,
) -> Result<HomotopySquare> {
    if !f.is_injective_on_cells() || !g.is_injective_on_cells() {
        return Err(Error::Precondition("comparison square requires cofibrations".into()));
    }
    let y = &f.dst;
    let c = &h.src;
    if **c != outer_product(x, &interval()) {
        return Err(Error::Precondition("homotopy must start at X ⊗ Δ¹".into()));
    }
    for (end, expect) in [(0u8, f), (1u8, g)] {
        let composite = end_inclusion(x, c, end)?.then(h)?;
        if composite.assignment() != expect.assignment() {
            return Err(Error::Precondition(format!(
                "homotopy does not restrict to the end {end} map"
            )));
        }
    }
    let m = mhat(x, h)?;
    let mut certificates = Vec::new();
    let yprod = Arc::new(outer_product(y, &interval()));
    let i1_pairing = corner_pairing(y, &yprod, 1, &BTreeSet::new())?;
    // one side of the diamond per end
    let mut sides = Vec::new();
    for (end, leg, (m_copy, m_cert)) in
        [(0u8, f, &m.from_h0), (1u8, g, &m.from_h1)]
    {
        let leg_cells: BTreeSet<CellId> = leg.assignment().values().map(|s| s.cell.clone()).collect();
        let corner = corner_pairing(y, &yprod, 0, &leg_cells)?;
        // identify the corner base (Y at 0 ∪ leg(X) ⊗ Δ¹) with the internal
        // cylinder copy in M̂_H, cell by cell
        let ident = {
            let base = Arc::new(corner.cof.base_complex());
            let into_mhat = |cell: &CellId, xid: &CellId, u: &DegWord, sid: &CellId, v: &DegWord| -> Sx {
                // cylinder cell over leg(x̄): corresponds to the X ⊗ Δ¹ ⊗ Δ¹
                // cell over the `end`-slice, pushed through glue and collapse
                let inner = end_cell(x, xid, end);
                let big = product_id(&inner, u, sid, v);
                let step1 = m.cylinder.glue.from_attached.image_of(&big);
                let step2 = m.collapse.from_attached.apply(step1);
                let _ = cell;
                step2
            };
            let mut assign: BTreeMap<CellId, Sx> = BTreeMap::new();
            // inverse of the leg on cells
            let leg_inv: BTreeMap<CellId, CellId> =
                leg.assignment().iter().map(|(a, b)| (b.cell.clone(), a.clone())).collect();
            for (yid, u, sid, v, vec) in cylinder_cells(y) {
                let cell = product_id(&yid, &u, &sid, &v);
                if !base.contains(&cell) {
                    continue;
                }
                if vec.iter().all(|&b| b == 0) {
                    // Y ⊗ {0} is the Z part of the internal cylinder; its
                    // cells may have been freshened by the collapse pushout
                    assign.insert(cell.clone(), m.collapse.from_attached.image_of(&yid).clone());
                } else {
                    let xid = leg_inv
                        .get(&yid)
                        .ok_or_else(|| Error::Precondition("corner cylinder cell outside the leg".into()))?;
                    assign.insert(cell.clone(), into_mhat(&cell, xid, &u, &sid, &v));
                }
            }
            SimplicialMap::new(base, m_copy.clone(), assign)?
        };
        let (po, rf_cert) = corner.pushforward(&ident.then(&incl_of_base(m_cert)?)?)?;
        // po.total = R_end; from_shared: M̂ ↪ R_end; from_attached: Y⊗Δ¹ → R_end
        let prod_side_cert = reroot(m_cert, &po.total)?;
        sides.push((po, rf_cert, prod_side_cert, corner));
    }
    let (po_g, rg_cert, rg_prod_cert, corner_g) = sides.pop().unwrap();
    let (po_f, rf_cert, rf_prod_cert, corner_f) = sides.pop().unwrap();
    // R = pushout of R_f ← M̂ → R_g
    let r = pushout(&po_f.from_shared, &po_g.from_shared)?;
    let rg_into_r = r.from_shared.clone();
    let rf_into_r = r.from_attached.clone();
    let rg_leg_cert = rf_cert.transport(&r)?; // certifies R_g ↪ R
    let rf_leg_cert = reroot(&rg_cert, &r.total)?; // certifies R_f-side ↪ R
    certificates.push(i1_pairing);
    certificates.push(corner_f);
    certificates.push(corner_g);
    certificates.push(rf_cert.clone());
    certificates.push(rf_prod_cert);
    certificates.push(rg_prod_cert);
    certificates.push(rg_leg_cert);
    certificates.push(rf_leg_cert);
    let i1y = end_inclusion(y, &yprod, 1)?;
    let via_f = f.then(&i1y)?.then(&po_f.from_attached)?.then(&rf_into_r)?;
    let via_g = g.then(&i1y)?.then(&po_g.from_attached)?.then(&rg_into_r)?;
    Ok(HomotopySquare { total: r.total.clone(), via_f, via_g, certificates })
}

fn incl_of_base(p: &Pairing) -> Result<SimplicialMap> {
    SimplicialMap::inclusion(Arc::new(p.cof.base_complex()), p.cof.total.clone())
}

/// Rebases a pairing onto a larger complex that contains its total as a
/// subcomplex with identical ids.
fn reroot(p: &Pairing, total: &Arc<Fss>) -> Result<Pairing> {
    for s in p.pairs.keys() {
        if !total.contains(s) {
            return Err(Error::Precondition(format!("cell `{s}` missing in the rebased total")));
        }
    }
    let paired: BTreeSet<CellId> =
        p.pairs.iter().flat_map(|(s, e)| [s.clone(), e.top.clone()]).collect();
    let base: BTreeSet<CellId> =
        total.cell_ids().filter(|id| !paired.contains(*id)).cloned().collect();
    Ok(Pairing::new(Cofibration::new(total.clone(), base)?, p.pairs.clone()))
}

/// The pushout of two cofibrations with shared source, with its diagonal:
/// the representative-level sum of torsion classes.
pub struct TorsionSum {
    pub total: Arc<Fss>,
    pub diagonal: SimplicialMap,
    pub from_first: SimplicialMap,
    pub from_second: SimplicialMap,
}

pub fn torsion_sum(a: &SimplicialMap, b: &SimplicialMap) -> Result<TorsionSum> {
    if !a.is_injective_on_cells() || !b.is_injective_on_cells() {
        return Err(Error::Precondition("torsion representatives must be cofibrations".into()));
    }
    let po = pushout(a, b)?;
    let diagonal = b.then(&po.from_shared)?;
    Ok(TorsionSum {
        total: po.total.clone(),
        diagonal,
        from_first: po.from_attached,
        from_second: po.from_shared,
    })
}


#[cfg(test)]
mod dispatch_tests {
    use super::*;
    use crate::pairing::Regularity;
    use crate::poset::PElem;

    fn check(p: &Pairing) {
        assert!(p.check_proper().is_empty(), "{:?}", p.check_proper());
        assert!(matches!(p.check_regular().unwrap(), Regularity::Regular { .. }));
        p.to_presentation().unwrap();
    }

    #[test]
    fn all_inclusion_shapes_certify() {
        let p = Poset::chain(2);
        let x = Arc::new(simplex::standard(&p, &DFlag::parse(&p, &["0", "1"]).unwrap()));
        check(&cylinder_fsae(CylinderInclusion::End { z: &x, end: 0 }).unwrap());
        check(&cylinder_fsae(CylinderInclusion::End { z: &x, end: 1 }).unwrap());
        let id = SimplicialMap::identity(x.clone());
        check(&cylinder_fsae(CylinderInclusion::Target { f: &id }).unwrap());
        let sub: BTreeSet<CellId> = ["0".into()].into_iter().collect();
        check(&cylinder_fsae(CylinderInclusion::Subcylinder { f: &id, sub: &sub }).unwrap());
        // relative: certify the vertex inclusion Δ^(p) ↪ Δ^(p,p) first
        let p1 = Poset::chain(1);
        let seg = Arc::new(simplex::standard(&p1, &DFlag::parse(&p1, &["0", "0"]).unwrap()));
        let s = {
            let base: BTreeSet<CellId> = [simplex::subset_id(&[0])].into_iter().collect();
            let pairs = [(
                simplex::subset_id(&[1]),
                crate::pairing::PairEntry { top: simplex::subset_id(&[0, 1]), k: 0 },
            )]
            .into_iter()
            .collect();
            Pairing::new(Cofibration::new(seg.clone(), base).unwrap(), pairs)
        };
        let pt = Arc::new(simplex::standard(&p1, &DFlag::parse(&p1, &["0"]).unwrap()));
        let fold = SimplicialMap::from_vertex_map(
            seg,
            pt,
            &[
                (simplex::subset_id(&[0]), simplex::subset_id(&[0])),
                (simplex::subset_id(&[1]), simplex::subset_id(&[0])),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap();
        check(&cylinder_fsae(CylinderInclusion::Relative { s: &s, f: &fold }).unwrap());
    }

    #[test]
    fn complexes_cross_threads() {
        fn takes_send_sync<T: Send + Sync>(_: &T) {}
        let p = Poset::chain(1);
        let mut x = Fss::empty(p);
        x.insert_vertex("v".into(), PElem(0));
        takes_send_sync(&x);
        let handle = std::thread::spawn(move || x.len());
        assert_eq!(handle.join().unwrap(), 1);
    }
}
