//! Isomorphism search for finite filtered simplicial sets: refinement
//! hashing followed by backtracking, ordered so that every cell's faces are
//! matched before the cell itself.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use crate::sset::{CellId, Fss, SimplicialMap, Sx};
use std::sync::Arc;

fn refine_hashes(x: &Fss, rounds: usize) -> BTreeMap<CellId, u64> {
    let mut h: BTreeMap<CellId, u64> = x
        .cells()
        .map(|(id, data)| {
            let mut hasher = DefaultHasher::new();
            data.dim.hash(&mut hasher);
            if data.dim == 0 {
                x.poset.name(x.label(id)).hash(&mut hasher);
            } else {
                for e in x.flag_of(id).entries() {
                    x.poset.name(*e).hash(&mut hasher);
                }
            }
            (id.clone(), hasher.finish())
        })
        .collect();
    for _ in 0..rounds {
        // cofaces: cell -> (position, word length, holder hash)
        let mut coface_sig: BTreeMap<CellId, Vec<(usize, usize, u64)>> = BTreeMap::new();
        for (id, data) in x.cells() {
            for (i, f) in data.faces.iter().enumerate() {
                coface_sig.entry(f.cell.clone()).or_default().push((i, f.word.len(), h[id]));
            }
        }
        let mut next = BTreeMap::new();
        for (id, data) in x.cells() {
            let mut hasher = DefaultHasher::new();
            h[id].hash(&mut hasher);
            for f in &data.faces {
                (f.word.indices(), h[&f.cell]).hash(&mut hasher);
            }
            if let Some(mut sig) = coface_sig.remove(id) {
                sig.sort_unstable();
                sig.hash(&mut hasher);
            }
            next.insert(id.clone(), hasher.finish());
        }
        h = next;
    }
    h
}

/// Searches for an isomorphism `a → b`; complexes are assumed small.
pub fn find_isomorphism(a: &Fss, b: &Fss) -> Option<BTreeMap<CellId, CellId>> {
    if a.len() != b.len() || a.poset != b.poset {
        return None;
    }
    let ha = refine_hashes(a, 3);
    let hb = refine_hashes(b, 3);
    let mut count_a: BTreeMap<u64, usize> = BTreeMap::new();
    let mut count_b: BTreeMap<u64, usize> = BTreeMap::new();
    for v in ha.values() {
        *count_a.entry(*v).or_insert(0) += 1;
    }
    for v in hb.values() {
        *count_b.entry(*v).or_insert(0) += 1;
    }
    if count_a != count_b {
        return None;
    }
    // match cells in ascending dimension so faces are determined
    let mut order: Vec<CellId> = a.cell_ids().cloned().collect();
    order.sort_by_key(|id| (a.dim_of(id), id.clone()));
    let mut assignment: BTreeMap<CellId, CellId> = BTreeMap::new();
    let mut used: BTreeSet<CellId> = BTreeSet::new();
    #[allow(clippy::too_many_arguments)]
    fn backtrack(
        a: &Fss,
        b: &Fss,
        ha: &BTreeMap<CellId, u64>,
        hb: &BTreeMap<CellId, u64>,
        order: &[CellId],
        pos: usize,
        assignment: &mut BTreeMap<CellId, CellId>,
        used: &mut BTreeSet<CellId>,
    ) -> bool {
        let Some(id) = order.get(pos) else {
            return true;
        };
        let data = a.cell(id);
        let wanted_faces: Option<Vec<Sx>> = if data.dim == 0 {
            None
        } else {
            Some(
                data.faces
                    .iter()
                    .map(|f| Sx { word: f.word.clone(), cell: assignment[&f.cell].clone() })
                    .collect(),
            )
        };
        let candidates: Vec<CellId> = b
            .cell_ids()
            .filter(|c| !used.contains(*c) && hb[*c] == ha[id])
            .filter(|c| {
                let cd = b.cell(c);
                cd.dim == data.dim
                    && match &wanted_faces {
                        None => b.poset.name(b.label(c)) == a.poset.name(a.label(id)),
                        Some(w) => cd.faces == *w,
                    }
            })
            .cloned()
            .collect();
        for c in candidates {
            assignment.insert(id.clone(), c.clone());
            used.insert(c.clone());
            if backtrack(a, b, ha, hb, order, pos + 1, assignment, used) {
                return true;
            }
            assignment.remove(id);
            used.remove(&c);
        }
        false
    }
    if backtrack(a, b, &ha, &hb, &order, 0, &mut assignment, &mut used) {
        Some(assignment)
    } else {
        None
    }
}

/// Wraps a found isomorphism as a checked map.
pub fn isomorphism_map(a: &Arc<Fss>, b: &Arc<Fss>) -> Option<SimplicialMap> {
    let table = find_isomorphism(a, b)?;
    let assign = table.into_iter().map(|(k, v)| (k, Sx::of(v))).collect();
    SimplicialMap::new(a.clone(), b.clone(), assign).ok()
}
