//! The two subdivision endofunctors and their last-vertex maps, plus
//! relative subdivision of filtered ordered complexes and its iteration.
//!
//! Barycentric subdivision `sd` replaces every nondegenerate `n`-cell by the
//! nerve of its face poset; cells of `sd(X)` are pairs (base cell, chain of
//! vertex subsets with full top). The filtered subdivision `sd_p` thickens
//! strata: its cells over a base are chains of (subset, poset element)
//! pairs, every element drawn from the labels of the smallest subset.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poset::{DFlag, PElem};
use crate::sset::{simplex, CellId, DegWord, Fss, SimplicialMap, Sx};

pub type Mask = u32;

fn mask_vec(m: Mask) -> Vec<usize> {
    (0..32).filter(|i| m & (1 << i) != 0).collect()
}

pub fn full_mask(dim: usize) -> Mask {
    ((1u64 << (dim + 1)) - 1) as Mask
}

fn mask_str(m: Mask) -> String {
    mask_vec(m).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(".")
}

/// Position map of the epi underlying a degeneracy word: sends a vertex
/// position of the degenerate simplex to one of its base.
fn eta(word: &DegWord, pos: usize) -> usize {
    pos - word.indices().iter().filter(|&&u| (u as usize) < pos).count()
}

fn eta_mask(word: &DegWord, m: Mask) -> Mask {
    mask_vec(m).into_iter().fold(0, |acc, p| acc | (1 << eta(word, p)))
}

// ---------------------------------------------------------------------------
// sd
// ---------------------------------------------------------------------------

pub fn sd_cell_id(base: &CellId, chain: &[Mask]) -> CellId {
    let body = chain.iter().map(|&m| mask_str(m)).collect::<Vec<_>>().join("<");
    CellId::new(format!("{base}~[{body}]"))
}

/// Normal form of the subdivision simplex `(base, chain)` where `chain` is a
/// weakly increasing chain of nonempty vertex subsets of `base`, not
/// necessarily with full top. Resolves non-full tops through the face
/// structure and extracts repeats as degeneracies.
/// Public lookup: the abstract `sd` simplex of a chain over a base cell.
pub fn sd_cell_of_chain(x: &Fss, base: &CellId, chain: &[Mask]) -> Sx {
    sd_normalize(x, base, chain)
}

/// Public lookup for `sd_p` chains.
pub fn sdp_cell_of_chain(x: &Fss, base: &CellId, chain: &[(Mask, PElem)]) -> Sx {
    sdp_normalize(x, base, chain)
}

fn sd_normalize(x: &Fss, base: &CellId, chain: &[Mask]) -> Sx {
    // strip adjacent repeats into a degeneracy word
    let mut word: Vec<u32> = Vec::new();
    let mut core: Vec<Mask> = Vec::new();
    for (i, &m) in chain.iter().enumerate() {
        if core.last() == Some(&m) {
            word.push(i as u32 - 1);
        } else {
            core.push(m);
        }
    }
    word.reverse();
    let w = DegWord::new(word);
    let dim = x.dim_of(base);
    let top = *core.last().expect("chains are nonempty");
    if top == full_mask(dim) {
        return Sx { word: w, cell: sd_cell_id(base, &core) };
    }
    // push into the face spanned by the top subset
    let vs = mask_vec(top);
    let fx = x.apply_monotone(&Sx::of(base.clone()), &vs);
    let positions: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mapped: Vec<Mask> = core
        .iter()
        .map(|&m| {
            let rel = mask_vec(m).into_iter().fold(0, |acc, v| acc | (1 << positions[&v]));
            eta_mask(&fx.word, rel)
        })
        .collect();
    let inner = sd_normalize(x, &fx.cell, &mapped);
    Sx { word: w.then(&inner.word), cell: inner.cell }
}

/// Pushes a subdivision chain through an abstract simplex of `y`: the image
/// of the `sd`-cell `(z, chain)` under a map whose value on `z` is `target`.
fn sd_push(y: &Fss, target: &Sx, chain: &[Mask]) -> Sx {
    let mapped: Vec<Mask> = chain.iter().map(|&m| eta_mask(&target.word, m)).collect();
    sd_normalize(y, &target.cell, &mapped)
}

/// Chains of nonempty subsets of `{0..=n}`, strictly increasing, top full.
fn chains_top_full(n: usize) -> Vec<Vec<Mask>> {
    let full = full_mask(n);
    let mut out: Vec<Vec<Mask>> = vec![vec![full]];
    let mut frontier: Vec<Vec<Mask>> = vec![vec![full]];
    while let Some(chain) = frontier.pop() {
        let bottom = chain[0];
        // proper nonempty subsets of bottom
        let mut sub = (bottom.wrapping_sub(1)) & bottom;
        loop {
            if sub != 0 {
                let mut ext = Vec::with_capacity(chain.len() + 1);
                ext.push(sub);
                ext.extend_from_slice(&chain);
                out.push(ext.clone());
                frontier.push(ext);
            }
            if sub == 0 {
                break;
            }
            sub = (sub.wrapping_sub(1)) & bottom;
        }
    }
    out
}

/// Barycentric subdivision of a finite filtered simplicial set. Vertices of
/// the result are the nondegenerate cells of the input, labelled by the
/// maximum of their flags.
pub fn sd(x: &Fss) -> Fss {
    let mut out = Fss::empty(x.poset.clone());
    for (zid, zdata) in x.cells() {
        for chain in chains_top_full(zdata.dim) {
            let id = sd_cell_id(zid, &chain);
            if chain.len() == 1 {
                out.insert_vertex(id, x.stratum_of(zid));
                continue;
            }
            let faces = (0..chain.len())
                .map(|i| {
                    let mut sub = chain.clone();
                    sub.remove(i);
                    sd_normalize(x, zid, &sub)
                })
                .collect();
            out.insert_cell(id, faces);
        }
    }
    out
}

/// The last vertex map `sd(X) → X`.
pub fn lv(x: &Arc<Fss>, sdx: &Arc<Fss>) -> Result<SimplicialMap> {
    let mut assign = BTreeMap::new();
    for (zid, zdata) in x.cells() {
        for chain in chains_top_full(zdata.dim) {
            let alpha: Vec<usize> =
                chain.iter().map(|&m| *mask_vec(m).last().expect("nonempty subset")).collect();
            assign.insert(sd_cell_id(zid, &chain), x.apply_monotone(&Sx::of(zid.clone()), &alpha));
        }
    }
    SimplicialMap::new(sdx.clone(), x.clone(), assign)
}

/// Functorial action of `sd` on maps.
pub fn sd_map(f: &SimplicialMap, sd_src: &Arc<Fss>, sd_dst: &Arc<Fss>) -> Result<SimplicialMap> {
    let mut assign = BTreeMap::new();
    for (zid, zdata) in f.src.cells() {
        let target = f.image_of(zid);
        for chain in chains_top_full(zdata.dim) {
            assign.insert(sd_cell_id(zid, &chain), sd_push(&f.dst, target, &chain));
        }
    }
    SimplicialMap::new(sd_src.clone(), sd_dst.clone(), assign)
}

/// Section `Δ^J ↪ sd(Δ^J)` sending vertex `i` to the barycenter of the
/// initial segment `{0..=i}`; a section of the last vertex map.
pub fn sd_section(delta: &Arc<Fss>, sdd: &Arc<Fss>, flag: &DFlag) -> Result<SimplicialMap> {
    let n = flag.dim();
    let mut vertices = BTreeMap::new();
    for i in 0..=n {
        let seg: Vec<usize> = (0..=i).collect();
        let seg_cell = simplex::subset_id(&seg);
        vertices.insert(simplex::subset_id(&[i]), sd_cell_id(&seg_cell, &[full_mask(i)]));
    }
    SimplicialMap::from_vertex_map(delta.clone(), sdd.clone(), &vertices)
}

// ---------------------------------------------------------------------------
// sd_p
// ---------------------------------------------------------------------------

pub fn sdp_cell_id(base: &CellId, chain: &[(Mask, PElem)]) -> CellId {
    let body =
        chain.iter().map(|&(m, p)| format!("{}@{}", p.0, mask_str(m))).collect::<Vec<_>>().join("<");
    CellId::new(format!("{base}#[{body}]"))
}

/// Labels of the vertices of `base` at the positions in `m`.
fn labels_at(x: &Fss, base: &CellId, m: Mask) -> BTreeSet<PElem> {
    let sx = Sx::of(base.clone());
    mask_vec(m).into_iter().map(|i| x.label(&x.vertex(&sx, i))).collect()
}

/// Chains for `sd_p` over a base cell: entries `(subset, p)` strictly
/// increasing in the product order, top subset full, and every `p` drawn
/// from the labels of the smallest subset.
fn sdp_chains(x: &Fss, base: &CellId) -> Vec<Vec<(Mask, PElem)>> {
    let dim = x.dim_of(base);
    let full = full_mask(dim);
    let poset = &x.poset;
    let mut out: Vec<Vec<(Mask, PElem)>> = Vec::new();
    let mut frontier: Vec<Vec<(Mask, PElem)>> = Vec::new();
    for p in labels_at(x, base, full) {
        let seed = vec![(full, p)];
        out.push(seed.clone());
        frontier.push(seed);
    }
    while let Some(chain) = frontier.pop() {
        let (s0, p0) = chain[0];
        let used: BTreeSet<PElem> = chain.iter().map(|&(_, p)| p).collect();
        // candidate new bottoms: subsets of s0 (possibly s0 itself with a
        // smaller p), strictly below (s0, p0) in the product order
        let mut sub = s0;
        loop {
            if sub != 0 {
                let ls = labels_at(x, base, sub);
                for &p in &ls {
                    if (sub, p) == (s0, p0) || !poset.leq(p, p0) {
                        continue;
                    }
                    if !used.iter().all(|&q| ls.contains(&q)) || !ls.contains(&p) {
                        continue;
                    }
                    let mut ext = Vec::with_capacity(chain.len() + 1);
                    ext.push((sub, p));
                    ext.extend_from_slice(&chain);
                    out.push(ext.clone());
                    frontier.push(ext);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub.wrapping_sub(1)) & s0;
        }
    }
    out
}

/// Normal form of an `sd_p` simplex `(base, chain)` with weakly increasing
/// chain and arbitrary top subset.
fn sdp_normalize(x: &Fss, base: &CellId, chain: &[(Mask, PElem)]) -> Sx {
    let mut word: Vec<u32> = Vec::new();
    let mut core: Vec<(Mask, PElem)> = Vec::new();
    for (i, &e) in chain.iter().enumerate() {
        if core.last() == Some(&e) {
            word.push(i as u32 - 1);
        } else {
            core.push(e);
        }
    }
    word.reverse();
    let w = DegWord::new(word);
    let dim = x.dim_of(base);
    let top = core.last().expect("chains are nonempty").0;
    if top == full_mask(dim) {
        return Sx { word: w, cell: sdp_cell_id(base, &core) };
    }
    let vs = mask_vec(top);
    let fx = x.apply_monotone(&Sx::of(base.clone()), &vs);
    let positions: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mapped: Vec<(Mask, PElem)> = core
        .iter()
        .map(|&(m, p)| {
            let rel = mask_vec(m).into_iter().fold(0, |acc, v| acc | (1 << positions[&v]));
            (eta_mask(&fx.word, rel), p)
        })
        .collect();
    let inner = sdp_normalize(x, &fx.cell, &mapped);
    Sx { word: w.then(&inner.word), cell: inner.cell }
}

/// The filtered subdivision `sd_p(X)`, computed per nondegenerate cell via
/// the explicit chain description and glued along the face structure. The
/// label of a vertex `(subset, p)` is `p`.
pub fn sd_p(x: &Fss) -> Fss {
    let mut out = Fss::empty(x.poset.clone());
    for (zid, _) in x.cells() {
        for chain in sdp_chains(x, zid) {
            let id = sdp_cell_id(zid, &chain);
            if chain.len() == 1 {
                out.insert_vertex(id, chain[0].1);
                continue;
            }
            let faces = (0..chain.len())
                .map(|i| {
                    let mut sub = chain.clone();
                    sub.remove(i);
                    sdp_normalize(x, zid, &sub)
                })
                .collect();
            out.insert_cell(id, faces);
        }
    }
    out
}

/// The last vertex map `sd_p(X) → X`: a vertex `(subset, p)` goes to the
/// last base vertex in the subset lying over `p`.
pub fn lv_p(x: &Arc<Fss>, sdpx: &Arc<Fss>) -> Result<SimplicialMap> {
    let mut assign = BTreeMap::new();
    for (zid, _) in x.cells() {
        let sx = Sx::of(zid.clone());
        for chain in sdp_chains(x, zid) {
            let alpha: Vec<usize> = chain
                .iter()
                .map(|&(m, p)| {
                    mask_vec(m)
                        .into_iter()
                        .filter(|&t| x.label(&x.vertex(&sx, t)) == p)
                        .max()
                        .expect("chain entries carry labels of their subset")
                })
                .collect();
            assign.insert(sdp_cell_id(zid, &chain), x.apply_monotone(&sx, &alpha));
        }
    }
    SimplicialMap::new(sdpx.clone(), x.clone(), assign)
}

/// Section `Δ^J ↪ sd_p(Δ^J)` for a nondegenerate flag, sending the vertex
/// over `p` to `(full, p)`.
pub fn sdp_section(delta: &Arc<Fss>, sdpd: &Arc<Fss>, flag: &DFlag) -> Result<SimplicialMap> {
    if !flag.is_nondegenerate() {
        return Err(Error::Parameter("sd_p sections require a nondegenerate flag".into()));
    }
    let n = flag.dim();
    let top = simplex::subset_id(&(0..=n).collect::<Vec<_>>());
    let mut vertices = BTreeMap::new();
    for i in 0..=n {
        vertices.insert(simplex::subset_id(&[i]), sdp_cell_id(&top, &[(full_mask(n), flag.get(i))]));
    }
    SimplicialMap::from_vertex_map(delta.clone(), sdpd.clone(), &vertices)
}

// ---------------------------------------------------------------------------
// relative subdivision of FOS-complexes
// ---------------------------------------------------------------------------

/// Output of [`sd_rel`]: the relative subdivision with the factorization of
/// the last vertex map through it.
pub struct RelSubdivision {
    pub total: Arc<Fss>,
    /// `sd(K) → sd(K rel A)`.
    pub l0: SimplicialMap,
    /// `sd(K rel A) → K`.
    pub l1: SimplicialMap,
    /// The subcomplex of `total` that is `A`, unchanged.
    pub a_cells: BTreeSet<CellId>,
}

fn spine(x: &Fss, id: &CellId) -> Vec<CellId> {
    let sx = Sx::of(id.clone());
    (0..=x.dim_of(id)).map(|i| x.vertex(&sx, i)).collect()
}

/// Checks that `a_cells` is a full, face-closed subcomplex whose vertices
/// precede all others inside every shared cell.
fn check_rel_input(k: &Fss, a_cells: &BTreeSet<CellId>) -> Result<BTreeSet<CellId>> {
    for id in a_cells {
        if !k.contains(id) {
            return Err(Error::Identifier(format!("`{id}` is not a cell of the complex")));
        }
        for f in &k.cell(id).faces {
            if !a_cells.contains(&f.cell) {
                return Err(Error::Closure { kept: id.to_string(), missing: f.cell.to_string() });
            }
        }
    }
    let a_vertices: BTreeSet<CellId> =
        a_cells.iter().filter(|id| k.dim_of(id) == 0).cloned().collect();
    for (id, _) in k.cells() {
        let sp = spine(k, id);
        let inside = sp.iter().all(|v| a_vertices.contains(v));
        if inside && !a_cells.contains(id) {
            return Err(Error::Precondition(format!("subcomplex is not full: `{id}` spans its vertices")));
        }
        // ordering condition: A-vertices must form a prefix of the spine
        let mut seen_outside = false;
        for v in &sp {
            if a_vertices.contains(v) {
                if seen_outside {
                    return Err(Error::Precondition(format!(
                        "ordering condition fails on `{id}`: vertex `{v}` of the subcomplex follows an outside vertex"
                    )));
                }
            } else {
                seen_outside = true;
            }
        }
    }
    Ok(a_vertices)
}

/// Builds an FOS complex from a list of simplices given as ordered vertex
/// lists. Cells named in `preferred` keep those ids; everything else is
/// named by its vertex ids joined with `&`.
fn build_fos(
    poset: Arc<crate::poset::Poset>,
    vertex_labels: &BTreeMap<CellId, PElem>,
    simplices: &BTreeSet<Vec<CellId>>,
    preferred: &BTreeMap<Vec<CellId>, CellId>,
) -> Fss {
    let name = |vs: &[CellId]| -> CellId {
        if let Some(id) = preferred.get(vs) {
            id.clone()
        } else if vs.len() == 1 {
            vs[0].clone()
        } else {
            CellId::new(vs.iter().map(|v| v.as_str()).collect::<Vec<_>>().join("&"))
        }
    };
    let mut out = Fss::empty(poset);
    for vs in simplices {
        if vs.len() == 1 {
            out.insert_vertex(name(vs), vertex_labels[&vs[0]]);
        } else {
            let faces = (0..vs.len())
                .map(|i| {
                    let mut w = vs.clone();
                    w.remove(i);
                    debug_assert!(simplices.contains(&w));
                    Sx::of(name(&w))
                })
                .collect();
            out.insert_cell(name(vs), faces);
        }
    }
    out
}

/// Barycentric subdivision of `k` relative to the full subcomplex on
/// `a_cells`: the subcomplex of the join `A ⋆ sd(K − A)` on the simplices
/// `σ ⋆ {τ_0 ⊊ ... ⊊ τ_m}` with `σ ∪ τ_m` a simplex of `k`. Vertices of
/// `A` keep their ids; barycenters are named `b(τ)`.
pub fn sd_rel(k: &Arc<Fss>, a_cells: &BTreeSet<CellId>) -> Result<RelSubdivision> {
    if !crate::fos::is_fos(k) {
        return Err(Error::Precondition("relative subdivision requires an FOS complex".into()));
    }
    let a_vertices = check_rel_input(k, a_cells)?;
    // spine lookup for k
    let mut k_by_spine: BTreeMap<Vec<CellId>, CellId> = BTreeMap::new();
    for (id, _) in k.cells() {
        k_by_spine.insert(spine(k, id), id.clone());
    }
    // decompose each cell of k into its A-part and outside part
    let split = |id: &CellId| -> (Vec<CellId>, Vec<CellId>) {
        spine(k, id).into_iter().partition(|v| a_vertices.contains(v))
    };
    let bary = |id: &CellId| CellId::new(format!("b({id})"));
    // vertex labels for the result
    let mut labels: BTreeMap<CellId, PElem> = BTreeMap::new();
    for v in &a_vertices {
        labels.insert(v.clone(), k.label(v));
    }
    let mut outside_cells: Vec<CellId> = Vec::new();
    for (id, _) in k.cells() {
        let (a_part, _) = split(id);
        if a_part.is_empty() {
            outside_cells.push(id.clone());
            labels.insert(bary(id), k.stratum_of(id));
        }
    }
    // simplices: ordered vertex lists [σ-vertices..., b(τ_0), ..., b(τ_m)]
    let mut simplices: BTreeSet<Vec<CellId>> = BTreeSet::new();
    for id in a_cells {
        simplices.insert(spine(k, id));
    }
    // chains in K−A, each extended by every admissible σ
    let mut chains: Vec<Vec<CellId>> = outside_cells.iter().map(|c| vec![c.clone()]).collect();
    let mut i = 0;
    while i < chains.len() {
        let chain = chains[i].clone();
        i += 1;
        let top = chain.last().unwrap().clone();
        let top_spine: BTreeSet<CellId> = spine(k, &top).into_iter().collect();
        // record σ ⋆ chain for every A-simplex σ with σ ∪ top ∈ k
        let top_list = spine(k, &top);
        for sigma in a_cells.iter().map(|id| spine(k, id)).chain([Vec::new()]) {
            let mut joined = sigma.clone();
            joined.extend(top_list.iter().cloned());
            if sigma.is_empty() || k_by_spine.contains_key(&joined) {
                let mut cell: Vec<CellId> = sigma;
                cell.extend(chain.iter().map(&bary));
                simplices.insert(cell);
            }
        }
        // extend the chain upward by outside cells strictly containing top
        for bigger in &outside_cells {
            if *bigger == top || k.dim_of(bigger) <= k.dim_of(&top) {
                continue;
            }
            let sp: BTreeSet<CellId> = spine(k, bigger).into_iter().collect();
            if top_spine.is_subset(&sp) {
                let mut ext = chain.clone();
                ext.push(bigger.clone());
                chains.push(ext);
            }
        }
    }
    // A-simplices keep their original ids: the restriction to A is A itself
    let preferred: BTreeMap<Vec<CellId>, CellId> =
        a_cells.iter().map(|id| (spine(k, id), id.clone())).collect();
    let total = Arc::new(build_fos(k.poset.clone(), &labels, &simplices, &preferred));
    debug_assert!(total.validate().is_empty());
    // l0: sd(K) → sd(K rel A)
    let sdk = Arc::new(sd(k));
    let mut l0_vertices: BTreeMap<CellId, CellId> = BTreeMap::new();
    for (id, _) in k.cells() {
        let v = sd_cell_id(id, &[full_mask(k.dim_of(id))]);
        let (a_part, out_part) = split(id);
        let image = if out_part.is_empty() {
            a_part.last().expect("cells have vertices").clone() // last vertex in A
        } else {
            let outside = k_by_spine[&out_part].clone();
            bary(&outside)
        };
        l0_vertices.insert(v, image);
    }
    let l0 = SimplicialMap::from_vertex_map(sdk.clone(), total.clone(), &l0_vertices)?;
    // l1: sd(K rel A) → K
    let mut l1_vertices: BTreeMap<CellId, CellId> = BTreeMap::new();
    for v in &a_vertices {
        l1_vertices.insert(v.clone(), v.clone());
    }
    for c in &outside_cells {
        l1_vertices.insert(bary(c), spine(k, c).last().unwrap().clone());
    }
    let l1 = SimplicialMap::from_vertex_map(total.clone(), k.clone(), &l1_vertices)?;
    let result_a: BTreeSet<CellId> = total
        .cell_ids()
        .filter(|id| {
            let sp = spine(&total, id);
            sp.iter().all(|v| a_vertices.contains(v))
        })
        .cloned()
        .collect();
    Ok(RelSubdivision { total, l0, l1, a_cells: result_a })
}

/// Output of [`sd_family`].
pub struct FamilySubdivision {
    pub total: Arc<Fss>,
    /// `sd^n(K) → sd^𝒜(K)`.
    pub l0: SimplicialMap,
    /// `sd^𝒜(K) → K`.
    pub l1: SimplicialMap,
}

/// Iterated relative subdivision along a nested family of full subcomplexes
/// `A^1 ⊆ ... ⊆ A^n`, with the factorization `l1 ∘ l0 = lv^n`. Each stage
/// subdivides relative to the image of the next subcomplex inside the
/// complex built so far; fullness and the ordering condition are re-checked
/// at every stage.
pub fn sd_family(k: &Arc<Fss>, family: &[BTreeSet<CellId>]) -> Result<FamilySubdivision> {
    if family.is_empty() {
        return Err(Error::Parameter("family must be nonempty".into()));
    }
    for w in family.windows(2) {
        if !w[0].is_subset(&w[1]) {
            return Err(Error::Parameter("family must be nested".into()));
        }
    }
    // every member must already be full and order-compatible in K; the
    // image tracking below is only exact for full subcomplexes
    for (stage, a) in family.iter().enumerate() {
        check_rel_input(k, a)
            .map_err(|e| Error::Precondition(format!("stage {}: {e}", stage + 1)))?;
    }
    let mut cur: Arc<Fss> = k.clone();
    let mut src: Arc<Fss> = k.clone(); // sd^m(K)
    let mut tracked: Vec<BTreeSet<CellId>> = family.to_vec(); // images inside cur
    let mut l0: Option<SimplicialMap> = None; // sd^m(K) → cur
    let mut l1: Option<SimplicialMap> = None; // cur → K
    for m in 0..family.len() {
        let a_img = tracked[m].clone();
        let step =
            sd_rel(&cur, &a_img).map_err(|e| Error::Precondition(format!("stage {}: {e}", m + 1)))?;
        let new_src = Arc::new(sd(&src));
        let new_l0 = match &l0 {
            None => step.l0.clone(),
            Some(prev) => {
                let sd_cur = Arc::new(sd(&cur));
                sd_map(prev, &new_src, &sd_cur)?.then(&step.l0)?
            }
        };
        let new_l1 = match &l1 {
            None => step.l1.clone(),
            Some(prev) => step.l1.then(prev)?,
        };
        // Image of each later subcomplex inside the new stage: the full
        // subcomplex on the kept vertices of the current image plus the
        // barycenters of its outside cells.
        let a_vertices: BTreeSet<CellId> =
            a_img.iter().filter(|id| cur.dim_of(id) == 0).cloned().collect();
        #[allow(clippy::needless_range_loop)]
        for j in (m + 1)..family.len() {
            let c_j = tracked[j].clone();
            let mut allowed: BTreeSet<CellId> = a_vertices.clone();
            for id in &c_j {
                let sp = spine(&cur, id);
                if sp.iter().all(|v| !a_vertices.contains(v)) {
                    allowed.insert(CellId::new(format!("b({id})")));
                }
            }
            tracked[j] = step
                .total
                .cell_ids()
                .filter(|id| spine(&step.total, id).iter().all(|v| allowed.contains(v)))
                .cloned()
                .collect();
        }
        cur = step.total.clone();
        src = new_src;
        l0 = Some(new_l0);
        l1 = Some(new_l1);
    }
    Ok(FamilySubdivision { total: cur, l0: l0.unwrap(), l1: l1.unwrap() })
}
