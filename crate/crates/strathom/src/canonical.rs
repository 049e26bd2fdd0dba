//! Constructors for the canonical anodyne certificates: degeneracy
//! sections, the sections of both subdivision functors, and the
//! pushout-product of a horn with a boundary inclusion.
//!
//! Every constructor returns a [`Pairing`] whose properness and regularity
//! are re-checkable by the generic verifier; nothing here is trusted.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::moves::is_admissible;
use crate::pairing::{Cofibration, PairEntry, Pairing};
use crate::poset::{DFlag, PElem, Poset};
use crate::sset::{simplex, CellId, Fss, Sx};
use crate::subdivision::{self, full_mask, Mask};

/// Which face map splits the degeneracy `Δ^{J'} → Δ^J` collapsing the
/// duplicated entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectionSide {
    /// The `dup`-th coface: the image misses vertex `dup`.
    Lower,
    /// The `(dup+1)`-th coface: the image misses vertex `dup + 1`.
    Upper,
}

/// Section of the degeneracy map that collapses a duplicated flag entry:
/// `Δ^J ↪ Δ^{J'}` where `J'` repeats `J[dup]` at positions `dup, dup + 1`.
pub fn degeneracy_section(
    poset: &Arc<Poset>,
    flag: &DFlag,
    dup: usize,
    side: SectionSide,
) -> Result<Pairing> {
    let n = flag.dim();
    if dup > n {
        return Err(Error::Parameter(format!("duplicate position {dup} out of range")));
    }
    let mut entries = flag.entries().to_vec();
    entries.insert(dup, flag.get(dup));
    let doubled = DFlag::new(poset, entries)?;
    let total = Arc::new(simplex::standard(poset, &doubled));
    let missing = match side {
        SectionSide::Lower => dup,
        SectionSide::Upper => dup + 1,
    };
    let other = dup + (dup + 1) - missing;
    let base: BTreeSet<CellId> = total
        .cell_ids()
        .filter(|id| !subset_of(id).contains(&missing))
        .cloned()
        .collect();
    let mut pairs = BTreeMap::new();
    for id in total.cell_ids() {
        let vs = subset_of(id);
        if vs.contains(&missing) && !vs.contains(&other) {
            let mut up = vs.clone();
            let pos = up.iter().position(|&v| v > other).unwrap_or(up.len());
            up.insert(pos, other);
            pairs.insert(id.clone(), PairEntry { top: simplex::subset_id(&up), k: pos });
        }
    }
    Ok(Pairing::new(Cofibration::new(total, base)?, pairs))
}

fn subset_of(id: &CellId) -> Vec<usize> {
    id.as_str().split('.').map(|s| s.parse().expect("simplex ids are dotted subsets")).collect()
}

/// The section `Δ^J ↪ sd(Δ^J)` together with its staged pairing: cells are
/// classified by the largest flag position whose initial-segment condition
/// they violate, and each stage pairs a chain missing that position with
/// the chain that inserts it.
pub fn sd_section_pairing(poset: &Arc<Poset>, flag: &DFlag) -> Result<Pairing> {
    let q = flag.dim();
    let delta = simplex::standard(poset, flag);
    let total = Arc::new(subdivision::sd(&delta));
    let top = simplex::subset_id(&(0..=q).collect::<Vec<_>>());
    let chain_cell = |chain: &[Mask]| -> CellId {
        let sx = subdivision::sd_cell_of_chain(&delta, &top, chain);
        debug_assert!(sx.word.is_empty());
        sx.cell
    };
    // membership in D^p: every subset S in the chain satisfies
    // (p' ∈ S and r <= min(p', p)) => r ∈ S
    let in_dp = |chain: &[Mask], p: usize| -> bool {
        chain.iter().all(|&s| {
            (0..=q).filter(|i| s & (1 << i) != 0).all(|pp| {
                (0..=pp.min(p)).all(|r| s & (1 << r) != 0)
            })
        })
    };
    let mut base = BTreeSet::new();
    let mut pairs = BTreeMap::new();
    for chain in all_chains(q) {
        let id = chain_cell(&chain);
        if in_dp(&chain, q) {
            base.insert(id);
            continue;
        }
        let stage = (0..=q).find(|&p| !in_dp(&chain, p)).expect("outside cells fail some stage");
        // m: the largest position whose subset misses `stage`
        let m = (0..chain.len())
            .rev()
            .find(|&i| chain[i] & (1 << stage) == 0)
            .expect("a violating subset misses the stage element");
        let with_p = chain[m] | (1 << stage);
        if m + 1 < chain.len() && chain[m + 1] == with_p {
            continue; // type I: the insertion partner
        }
        let mut up = chain.clone();
        up.insert(m + 1, with_p);
        pairs.insert(id, PairEntry { top: chain_cell(&up), k: m + 1 });
    }
    Ok(Pairing::new(Cofibration::new(total, base)?, pairs))
}

/// All strictly increasing chains of nonempty subsets of `{0..=q}`.
fn all_chains(q: usize) -> Vec<Vec<Mask>> {
    let full: Mask = full_mask(q);
    let mut singles: Vec<Vec<Mask>> = (1..=full).map(|m| vec![m]).collect();
    let mut out = Vec::new();
    while let Some(chain) = singles.pop() {
        out.push(chain.clone());
        let bottom = chain[0];
        let mut sub = (bottom.wrapping_sub(1)) & bottom;
        while sub != 0 {
            let mut ext = vec![sub];
            ext.extend_from_slice(&chain);
            singles.push(ext);
            sub = (sub.wrapping_sub(1)) & bottom;
        }
    }
    out
}

/// The section `Δ^J ↪ sd_p(Δ^J)` for a nondegenerate flag with the pairing
/// that inserts `(J, p_m)` after the last entry whose subset is proper.
pub fn sdp_section_pairing(poset: &Arc<Poset>, flag: &DFlag) -> Result<Pairing> {
    if !flag.is_nondegenerate() {
        return Err(Error::Parameter("sd_p sections require a nondegenerate flag".into()));
    }
    let q = flag.dim();
    let delta = simplex::standard(poset, flag);
    let total = Arc::new(subdivision::sd_p(&delta));
    let top = simplex::subset_id(&(0..=q).collect::<Vec<_>>());
    let full = full_mask(q);
    let chain_cell = |chain: &[(Mask, PElem)]| -> CellId {
        let sx = subdivision::sdp_cell_of_chain(&delta, &top, chain);
        debug_assert!(sx.word.is_empty());
        sx.cell
    };
    let mut base = BTreeSet::new();
    let mut pairs = BTreeMap::new();
    for chain in sdp_all_chains(&delta, flag, q) {
        let id = chain_cell(&chain);
        if chain.iter().all(|&(s, _)| s == full) {
            base.insert(id);
            continue;
        }
        let m = (0..chain.len()).rev().find(|&i| chain[i].0 != full).expect("checked");
        if m + 1 < chain.len() && chain[m + 1] == (full, chain[m].1) {
            continue; // type I
        }
        let mut up = chain.clone();
        up.insert(m + 1, (full, chain[m].1));
        pairs.insert(id, PairEntry { top: chain_cell(&up), k: m + 1 });
    }
    Ok(Pairing::new(Cofibration::new(total, base)?, pairs))
}

/// Chains for `sd_p(Δ^J)` in grid coordinates: entries `(subset, p)`,
/// strictly increasing in the product order, every `p` a label of the
/// bottom subset.
fn sdp_all_chains(delta: &Fss, flag: &DFlag, q: usize) -> Vec<Vec<(Mask, PElem)>> {
    let poset = &delta.poset;
    let labels_of = |m: Mask| -> BTreeSet<PElem> {
        (0..=q).filter(|i| m & (1 << i) != 0).map(|i| flag.get(i)).collect()
    };
    let full = full_mask(q);
    let mut out: Vec<Vec<(Mask, PElem)>> = Vec::new();
    let mut frontier: Vec<Vec<(Mask, PElem)>> = Vec::new();
    for m in 1..=full {
        for &p in &labels_of(m) {
            let seed = vec![(m, p)];
            out.push(seed.clone());
            frontier.push(seed);
        }
    }
    // extend upward: chains grow at the top, keeping the bottom fixed so the
    // label condition stays a property of the bottom subset
    while let Some(chain) = frontier.pop() {
        let (s_top, p_top) = *chain.last().unwrap();
        let bottom_labels = labels_of(chain[0].0);
        for s in s_top..=full {
            if s & s_top != s_top {
                continue;
            }
            for &p in &labels_of(s) {
                if (s, p) == (s_top, p_top) || !poset.leq(p_top, p) || !bottom_labels.contains(&p) {
                    continue;
                }
                let mut ext = chain.clone();
                ext.push((s, p));
                out.push(ext.clone());
                frontier.push(ext);
            }
        }
    }
    out
}

/// A point of the `[m] × [n]` grid.
pub type GridPoint = (usize, usize);

pub fn grid_cell_id(points: &[GridPoint]) -> CellId {
    CellId::new(points.iter().map(|(a, b)| format!("{a}x{b}")).collect::<Vec<_>>().join("-"))
}

/// Result of the pushout-product constructor.
pub struct PushoutProduct {
    pub pairing: Pairing,
    /// Set when the flag admits both admissibility cases at `k`; the first
    /// case (`p_k = p_{k+1}`) is the one used.
    pub both_cases: bool,
}

/// The corner inclusion
/// `Δ^J ⊗ ∂Δ^n ∪ Λ^J_k ⊗ Δ^n ↪ Δ^J ⊗ Δ^n` with its grid-walk pairing.
/// With `horn_on_first = false` the roles swap: the horn (always admissible
/// over the one-point poset) sits on the unfiltered factor.
pub fn pushout_product(
    poset: &Arc<Poset>,
    flag: &DFlag,
    k: usize,
    n: usize,
    horn_on_first: bool,
) -> Result<PushoutProduct> {
    let m = flag.dim();
    if horn_on_first && !is_admissible(flag, k) {
        return Err(Error::Parameter(format!("index {k} is not admissible for {flag:?}")));
    }
    if !horn_on_first && k > n {
        return Err(Error::Parameter("horn index out of range".into()));
    }
    // build the product Δ^J ⊗ Δ^n as the nerve of the grid poset
    let mut total = Fss::empty(poset.clone());
    let mut chains: Vec<Vec<GridPoint>> = Vec::new();
    let mut frontier: Vec<Vec<GridPoint>> =
        (0..=m).flat_map(|a| (0..=n).map(move |b| vec![(a, b)])).collect();
    while let Some(chain) = frontier.pop() {
        chains.push(chain.clone());
        let &(a0, b0) = chain.last().unwrap();
        for a in a0..=m {
            for b in b0..=n {
                if (a, b) != (a0, b0) {
                    let mut ext = chain.clone();
                    ext.push((a, b));
                    frontier.push(ext);
                }
            }
        }
    }
    for chain in &chains {
        let id = grid_cell_id(chain);
        if chain.len() == 1 {
            total.insert_vertex(id, flag.get(chain[0].0));
        } else {
            let faces = (0..chain.len())
                .map(|i| {
                    let mut sub = chain.clone();
                    sub.remove(i);
                    Sx::of(grid_cell_id(&sub))
                })
                .collect();
            total.insert_cell(id, faces);
        }
    }
    let total = Arc::new(total);
    debug_assert!(total.validate().is_empty());
    // outside cells: cover the horn-free factor completely and the horn
    // factor except possibly k
    let outside = |chain: &[GridPoint]| -> bool {
        let mus: BTreeSet<usize> = chain.iter().map(|p| p.0).collect();
        let nus: BTreeSet<usize> = chain.iter().map(|p| p.1).collect();
        let (horn_vals, other_vals, horn_top) =
            if horn_on_first { (&mus, &nus, m) } else { (&nus, &mus, n) };
        let other_full = other_vals.len() == if horn_on_first { n + 1 } else { m + 1 };
        let horn_ok = (0..=horn_top).all(|v| v == k || horn_vals.contains(&v));
        other_full && horn_ok
    };
    // the two admissibility cases
    let case_next = if horn_on_first {
        k < m && flag.get(k) == flag.get(k + 1)
    } else {
        k < n
    };
    let case_prev = if horn_on_first {
        k > 0 && flag.get(k) == flag.get(k - 1)
    } else {
        k > 0
    };
    let both_cases = case_next && case_prev;
    if !case_next && !case_prev {
        return Err(Error::Parameter("no admissibility case applies".into()));
    }
    let horn_coord = |p: &GridPoint| if horn_on_first { p.0 } else { p.1 };
    let mut base = BTreeSet::new();
    let mut pairs = BTreeMap::new();
    for chain in &chains {
        let id = grid_cell_id(chain);
        if !outside(chain) {
            base.insert(id);
            continue;
        }
        if case_next {
            // type I: some point on the k-column departs with +1 on the horn
            // coordinate only; that point is the removable one
            let dep = (0..chain.len().saturating_sub(1)).find(|&i| {
                horn_coord(&chain[i]) == k
                    && horn_coord(&chain[i + 1]) == k + 1
                    && (if horn_on_first { chain[i].1 == chain[i + 1].1 } else { chain[i].0 == chain[i + 1].0 })
            });
            if dep.is_some() {
                continue; // type I
            }
            let t = chain
                .iter()
                .position(|p| horn_coord(p) == k + 1)
                .expect("walks cover the horn coordinate above k");
            let inserted: GridPoint =
                if horn_on_first { (k, chain[t].1) } else { (chain[t].0, k) };
            let mut up = chain.clone();
            up.insert(t, inserted);
            pairs.insert(id, PairEntry { top: grid_cell_id(&up), k: t });
        } else {
            // mirror case: arrivals on the k-column via +1 on the horn
            // coordinate only mark type I cells
            let arr = (1..chain.len()).find(|&i| {
                horn_coord(&chain[i]) == k
                    && horn_coord(&chain[i - 1]) == k - 1
                    && (if horn_on_first { chain[i].1 == chain[i - 1].1 } else { chain[i].0 == chain[i - 1].0 })
            });
            if arr.is_some() {
                continue;
            }
            let t = chain
                .iter()
                .rposition(|p| horn_coord(p) == k - 1)
                .expect("walks cover the horn coordinate below k");
            let inserted: GridPoint =
                if horn_on_first { (k, chain[t].1) } else { (chain[t].0, k) };
            let mut up = chain.clone();
            up.insert(t + 1, inserted);
            pairs.insert(id, PairEntry { top: grid_cell_id(&up), k: t + 1 });
        }
    }
    let pairing = Pairing::new(Cofibration::new(total, base)?, pairs);
    Ok(PushoutProduct { pairing, both_cases })
}
