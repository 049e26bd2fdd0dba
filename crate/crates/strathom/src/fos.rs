//! Filtered ordered simplicial complexes: recognition, non-singularity,
//! the join mapping cylinder, and conversion of arbitrary finite filtered
//! simplicial sets up to verified deformation.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pairing::{Cofibration, PairEntry, Pairing};
use crate::poset::PElem;
use crate::sset::{CellId, Fss, SimplicialMap, Sx};

fn spine(x: &Fss, id: &CellId) -> Vec<CellId> {
    let sx = Sx::of(id.clone());
    (0..=x.dim_of(id)).map(|i| x.vertex(&sx, i)).collect()
}

/// True iff every nondegenerate cell is determined by its set of vertices:
/// the vertex-set map is injective and no cell repeats a vertex.
pub fn is_fos(x: &Fss) -> bool {
    let mut seen: BTreeSet<BTreeSet<CellId>> = BTreeSet::new();
    for (id, _) in x.cells() {
        let sp = spine(x, id);
        let set: BTreeSet<CellId> = sp.iter().cloned().collect();
        if set.len() != sp.len() || !seen.insert(set) {
            return false;
        }
    }
    true
}

/// True iff every nondegenerate cell has pairwise distinct vertices, i.e.
/// its characteristic map is injective.
pub fn is_nonsingular(x: &Fss) -> bool {
    x.cells().all(|(id, _)| {
        let sp = spine(x, id);
        let set: BTreeSet<&CellId> = sp.iter().collect();
        set.len() == sp.len()
    })
}

/// The join mapping cylinder of a map `f: K → K'` of finite FOS complexes,
/// with its structure maps and the certificate for `sd(K') ↪ M`.
pub struct JoinCylinder {
    pub total: Arc<Fss>,
    /// `sd(K) → M`, the source inclusion.
    pub from_source: SimplicialMap,
    /// `sd(K') → M`, the target inclusion.
    pub from_target: SimplicialMap,
    /// The retraction `M → sd(K')`; `retraction ∘ from_target = id`.
    pub retraction: SimplicialMap,
    /// Certificate that `sd(K') ↪ M` is an anodyne extension.
    pub pairing: Pairing,
}

/// Vertex id for a barycenter on the source (`K`) side of the cylinder.
fn src_vertex(c: &CellId) -> CellId {
    CellId::new(format!("s({c})"))
}

/// Vertex id for a barycenter on the target (`K'`) side.
fn tgt_vertex(c: &CellId) -> CellId {
    CellId::new(format!("t({c})"))
}

/// Builds `M^cx_f` for a stratum preserving map of FOS complexes: the
/// subcomplex of the join of `sd(K')` and `sd(K)` on the simplices
/// `{σ_0 ⊊ ... ⊊ σ_a} ⋆ {τ_0 ⊊ ... ⊊ τ_b}` with every `σ_i ⊆ f(τ_j)`.
/// Target-side vertices precede source-side ones.
pub fn mcx(f: &SimplicialMap) -> Result<JoinCylinder> {
    let k = &f.src;
    let kp = &f.dst;
    if !is_fos(k) || !is_nonsingular(k) || !is_fos(kp) {
        return Err(Error::Precondition("join cylinders require FOS complexes".into()));
    }
    // vertex-set image of each source cell under f
    let image_set = |c: &CellId| -> BTreeSet<CellId> {
        let img = f.image_of(c);
        spine(kp, &img.cell).into_iter().collect()
    };
    let vertex_sets: BTreeMap<CellId, BTreeSet<CellId>> =
        kp.cells().map(|(id, _)| (id.clone(), spine(kp, id).into_iter().collect())).collect();
    let src_sets: BTreeMap<CellId, BTreeSet<CellId>> =
        k.cells().map(|(id, _)| (id.clone(), spine(k, id).into_iter().collect())).collect();

    // enumerate target-side chains (σ), source-side chains (τ) and their
    // admissible joins
    let tgt_chains = inclusion_chains(&vertex_sets);
    let src_chains = inclusion_chains(&src_sets);
    let mut simplices: BTreeSet<Vec<CellId>> = BTreeSet::new();
    let mut labels: BTreeMap<CellId, PElem> = BTreeMap::new();
    for (id, _) in kp.cells() {
        labels.insert(tgt_vertex(id), kp.stratum_of(id));
    }
    for (id, _) in k.cells() {
        labels.insert(src_vertex(id), k.stratum_of(id));
    }
    for sigma in tgt_chains.iter().chain([&Vec::new()]) {
        'tau: for tau in src_chains.iter().chain([&Vec::new()]) {
            if sigma.is_empty() && tau.is_empty() {
                continue;
            }
            if !tau.is_empty() {
                let bound = image_set(&tau[0]);
                for s in sigma {
                    if !vertex_sets[s].is_subset(&bound) {
                        continue 'tau;
                    }
                }
            }
            let mut cell: Vec<CellId> = sigma.iter().map(tgt_vertex).collect();
            cell.extend(tau.iter().map(src_vertex));
            simplices.insert(cell);
        }
    }
    let total = Arc::new(build_fos_from_spines(kp.poset.clone(), &labels, &simplices)?);
    debug_assert!(total.validate().is_empty());

    // structure maps
    let sdk = Arc::new(crate::subdivision::sd(k));
    let sdkp = Arc::new(crate::subdivision::sd(kp));
    let mut src_v = BTreeMap::new();
    for (id, _) in k.cells() {
        src_v.insert(
            crate::subdivision::sd_cell_id(id, &[((1u64 << (k.dim_of(id) + 1)) - 1) as u32]),
            src_vertex(id),
        );
    }
    let from_source = SimplicialMap::from_vertex_map(sdk, total.clone(), &src_v)?;
    let mut tgt_v = BTreeMap::new();
    for (id, _) in kp.cells() {
        tgt_v.insert(
            crate::subdivision::sd_cell_id(id, &[((1u64 << (kp.dim_of(id) + 1)) - 1) as u32]),
            tgt_vertex(id),
        );
    }
    let from_target = SimplicialMap::from_vertex_map(Arc::new((*sdkp).clone()), total.clone(), &tgt_v)?;
    // retraction: σ-vertices stay, τ-vertex goes to the barycenter of f(τ)
    let mut retr_v = BTreeMap::new();
    for (id, _) in kp.cells() {
        retr_v.insert(
            tgt_vertex(id),
            crate::subdivision::sd_cell_id(id, &[((1u64 << (kp.dim_of(id) + 1)) - 1) as u32]),
        );
    }
    for (id, _) in k.cells() {
        let img_cell = {
            let sets = image_set(id);
            let sp: Vec<CellId> = sets.into_iter().collect();
            cell_with_vertex_set(kp, &sp)?
        };
        retr_v.insert(
            src_vertex(id),
            crate::subdivision::sd_cell_id(&img_cell, &[((1u64 << (kp.dim_of(&img_cell) + 1)) - 1) as u32]),
        );
    }
    let retraction = SimplicialMap::from_vertex_map(total.clone(), sdkp, &retr_v)?;

    // the pairing on sd(K') ↪ M: type I cells have a nonempty σ-part ending
    // exactly at f(τ_0); T inserts that barycenter.
    let base: BTreeSet<CellId> = from_target.assignment().values().map(|s| s.cell.clone()).collect();
    let mut pairs: BTreeMap<CellId, PairEntry> = BTreeMap::new();
    for (id, data) in total.cells() {
        if base.contains(id) {
            continue;
        }
        let sp = spine(&total, id);
        let split = sp.iter().position(|v| v.as_str().starts_with("s(")).unwrap_or(sp.len());
        if split == sp.len() {
            continue; // pure target side is the base
        }
        let tau0 = CellId::new(&sp[split].as_str()[2..sp[split].as_str().len() - 1]);
        let ft = {
            let sets = image_set(&tau0);
            let sp2: Vec<CellId> = sets.into_iter().collect();
            cell_with_vertex_set(kp, &sp2)?
        };
        let marker = tgt_vertex(&ft);
        let is_type_one = split > 0 && sp[split - 1] == marker;
        if !is_type_one {
            // type II: insert the barycenter of f(τ_0) before the source part
            let mut up = sp.clone();
            up.insert(split, marker);
            let top = cell_with_spine(&total, &up)?;
            pairs.insert(id.clone(), PairEntry { top, k: split });
        }
        let _ = data;
    }
    let pairing = Pairing::new(Cofibration::new(total.clone(), base)?, pairs);
    Ok(JoinCylinder { total, from_source, from_target, retraction, pairing })
}

/// Strictly increasing chains of cells under vertex-set inclusion, written
/// smallest first; every nonempty chain.
fn inclusion_chains(sets: &BTreeMap<CellId, BTreeSet<CellId>>) -> Vec<Vec<CellId>> {
    let ids: Vec<&CellId> = sets.keys().collect();
    let mut out: Vec<Vec<CellId>> = Vec::new();
    let mut frontier: Vec<Vec<CellId>> = ids.iter().map(|&c| vec![c.clone()]).collect();
    while let Some(chain) = frontier.pop() {
        out.push(chain.clone());
        let top = chain.last().unwrap();
        for &c in &ids {
            if sets[top].len() < sets[c].len() && sets[top].is_subset(&sets[c]) {
                let mut ext = chain.clone();
                ext.push(c.clone());
                frontier.push(ext);
            }
        }
    }
    out
}

fn cell_with_vertex_set(x: &Fss, vs: &[CellId]) -> Result<CellId> {
    let want: BTreeSet<&CellId> = vs.iter().collect();
    for (id, data) in x.cells() {
        if data.dim + 1 == vs.len() {
            let sp = spine(x, id);
            if sp.iter().collect::<BTreeSet<_>>() == want {
                return Ok(id.clone());
            }
        }
    }
    Err(Error::Identifier("no cell with the requested vertex set".into()))
}

fn cell_with_spine(x: &Fss, sp: &[CellId]) -> Result<CellId> {
    for (id, data) in x.cells() {
        if data.dim + 1 == sp.len() && spine(x, id) == sp {
            return Ok(id.clone());
        }
    }
    Err(Error::Identifier("no cell with the requested spine".into()))
}

/// Builds an FOS complex from ordered vertex lists.
fn build_fos_from_spines(
    poset: Arc<crate::poset::Poset>,
    labels: &BTreeMap<CellId, PElem>,
    simplices: &BTreeSet<Vec<CellId>>,
) -> Result<Fss> {
    let name = |vs: &[CellId]| -> CellId {
        if vs.len() == 1 {
            vs[0].clone()
        } else {
            CellId::new(vs.iter().map(|v| v.as_str()).collect::<Vec<_>>().join("&"))
        }
    };
    let mut out = Fss::empty(poset);
    for vs in simplices {
        if vs.len() == 1 {
            out.insert_vertex(name(vs), labels[&vs[0]]);
        } else {
            let faces = (0..vs.len())
                .map(|i| {
                    let mut w = vs.clone();
                    w.remove(i);
                    if !simplices.contains(&w) {
                        return Err(Error::Closure {
                            kept: name(vs).to_string(),
                            missing: name(&w).to_string(),
                        });
                    }
                    Ok(Sx::of(name(&w)))
                })
                .collect::<Result<Vec<_>>>()?;
            out.insert_cell(name(vs), faces);
        }
    }
    Ok(out)
}


/// True iff every stored face of every cell is nondegenerate (empty
/// operator word). Subdivision of such a complex is non-singular, so at
/// most two rounds reach an FOS complex.
pub fn has_nondegenerate_faces(x: &Fss) -> bool {
    x.cells().all(|(_, data)| data.faces.iter().all(|f| f.word.is_empty()))
}

/// Converts a finite filtered simplicial set into an FOS complex of the
/// same dimension, with a verified deformation connecting them.
///
/// Each round replaces the complex by its subdivision through the cylinder
/// of the last vertex map: the complex expands into the cylinder (the
/// certified target inclusion), the cylinder collapses onto its source
/// end, and the source end is relabeled as the subdivision. One round
/// suffices for non-singular inputs. Cells attached along degenerate
/// faces never resolve under this subdivision, so such cells are removed
/// by a greedy collapse pass first; if any survive, conversion stops with
/// an error rather than looping.
pub fn to_fos(x: &Fss) -> Result<(Fss, crate::reduce::Deformation)> {
    use crate::reduce::{Deformation, Leg, LegBody, ReduceStrategy};
    let violations = x.validate();
    if !violations.is_empty() {
        return Err(Error::Precondition(format!("input invalid: {}", violations[0].message)));
    }
    let dim = x.dim();
    let mut deformation = Deformation::identity(x.clone());
    let mut cur = Arc::new(x.clone());
    if !is_fos(&cur) && !has_nondegenerate_faces(&cur) {
        // collapse degenerate attachments away where a free pair allows it
        let reduction = crate::reduce::reduce(&cur, &ReduceStrategy::default());
        if !reduction.certificate.legs.is_empty() {
            deformation = deformation.concat(&reduction.certificate)?;
            cur = Arc::new(reduction.result);
        }
        if !has_nondegenerate_faces(&cur) {
            return Err(Error::Search(
                "complex keeps cells attached along degenerate faces; this conversion only covers \
                 complexes whose faces are nondegenerate after greedy reduction"
                    .into(),
            ));
        }
    }
    for _round in 0..3 {
        if is_fos(&cur) {
            break;
        }
        // shrink before subdividing; the collapse legs are certified and any
        // dimension drop is repaired at the end
        let reduction = crate::reduce::reduce(&cur, &ReduceStrategy::default());
        if !reduction.certificate.legs.is_empty() {
            deformation = deformation.concat(&reduction.certificate)?;
            cur = Arc::new(reduction.result);
            if is_fos(&cur) {
                break;
            }
        }
        let sdx = Arc::new(crate::subdivision::sd(&cur));
        let last_vertex = crate::subdivision::lv(&cur, &sdx)?;
        let bundle = crate::cylinder::mapping_cylinder(&last_vertex)?;
        deformation.push_presentation(&bundle.tgt_pairing.to_presentation()?)?;
        let src_cells: BTreeSet<CellId> =
            bundle.i_src.assignment().values().map(|s| s.cell.clone()).collect();
        let steps = crate::reduce::collapse_onto(&bundle.total, &src_cells)?;
        deformation.legs.push(Leg { forward: false, body: LegBody::Expansion { steps } });
        deformation.end = bundle.total.subset(&src_cells)?;
        let rename: BTreeMap<CellId, CellId> = bundle
            .i_src
            .assignment()
            .iter()
            .map(|(sd_cell, img)| (img.cell.clone(), sd_cell.clone()))
            .collect();
        deformation.push_iso(rename)?;
        debug_assert_eq!(deformation.end, *sdx);
        cur = sdx;
    }
    if !is_fos(&cur) {
        return Err(Error::Search("subdivision did not reach an FOS complex".into()));
    }
    // a collapse pass may have lowered the dimension; certified prism
    // expansions over a top cell raise it back without leaving FOS land
    while cur.dim() < dim {
        let top = cur
            .ids_desc()
            .into_iter()
            .next()
            .ok_or_else(|| Error::Search("cannot raise the dimension of an empty complex".into()))?;
        let flag = cur.flag_of(&top);
        let delta = Arc::new(crate::sset::simplex::standard(&cur.poset, &flag));
        let prod = Arc::new(crate::sset::outer_product(&delta, &crate::cylinder::interval()));
        let corner = crate::cylinder::corner_pairing(&delta, &prod, 0, &BTreeSet::new())?;
        let char_map = {
            let base = Arc::new(corner.cof.base_complex());
            let top_sx = Sx::of(top.clone());
            let assign = delta
                .cells()
                .map(|(id, _)| {
                    let subset: Vec<usize> =
                        id.as_str().split('.').map(|v| v.parse().unwrap()).collect();
                    (
                        crate::cylinder::end_cell(&delta, id, 0),
                        cur.apply_monotone(&top_sx, &subset),
                    )
                })
                .collect();
            SimplicialMap::new(base, cur.clone(), assign)?
        };
        let (po, transported) = corner.pushforward(&char_map)?;
        deformation.push_presentation(&transported.to_presentation()?)?;
        cur = po.total.clone();
        if !is_fos(&cur) {
            return Err(Error::Search("prism expansion left the FOS class".into()));
        }
    }
    Ok(((*cur).clone(), deformation))
}
