//! Mod 2 simplicial homology of the normalized chain complex, total and
//! per stratum. Serves as the independent invariant oracle for every
//! deformation this crate produces.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::poset::PElem;
use crate::sset::{CellId, Fss};

/// Dense GF(2) rank via Gaussian elimination on u64-packed rows.
fn gf2_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let words = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..words * 64 {
        let (w, b) = (col / 64, col % 64);
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][w] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[w] >> b & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// The boundary of a nondegenerate cell: the mod 2 sum of its
/// nondegenerate face parts.
fn boundary_cells(x: &Fss, id: &CellId) -> Vec<CellId> {
    let mut count: BTreeMap<CellId, usize> = BTreeMap::new();
    for f in &x.cell(id).faces {
        if f.word.is_empty() {
            *count.entry(f.cell.clone()).or_insert(0) += 1;
        }
    }
    count.into_iter().filter(|(_, c)| c % 2 == 1).map(|(id, _)| id).collect()
}

/// The chain-complex view of a face-closed cell collection, possibly
/// relative to a subcollection.
fn betti_of(x: &Fss, cells: &[CellId], quotient: impl Fn(&CellId) -> bool) -> Vec<usize> {
    let kept: Vec<CellId> = cells.iter().filter(|c| !quotient(c)).cloned().collect();
    if kept.is_empty() {
        return Vec::new();
    }
    let top = kept.iter().map(|c| x.dim_of(c)).max().unwrap();
    let mut index: Vec<BTreeMap<CellId, usize>> = vec![BTreeMap::new(); top + 1];
    for c in &kept {
        let d = x.dim_of(c);
        let n = index[d].len();
        index[d].insert(c.clone(), n);
    }
    // rank of each boundary map d: C_d -> C_{d-1}
    let mut ranks = vec![0usize; top + 2];
    for d in 1..=top {
        let cols = &index[d];
        let rows = &index[d - 1];
        if cols.is_empty() || rows.is_empty() {
            continue;
        }
        let words = rows.len().div_ceil(64);
        let mut mat: Vec<Vec<u64>> = Vec::with_capacity(cols.len());
        for c in cols.keys() {
            let mut col = vec![0u64; words];
            for f in boundary_cells(x, c) {
                if let Some(&r) = rows.get(&f) {
                    col[r / 64] |= 1 << (r % 64);
                }
            }
            mat.push(col);
        }
        ranks[d] = gf2_rank(mat);
    }
    (0..=top).map(|d| index[d].len() - ranks[d] - ranks[d + 1]).collect()
}

fn trim(mut v: Vec<usize>) -> Vec<usize> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Betti numbers of the whole complex over Z/2, trailing zeros removed.
pub fn betti_z2(x: &Fss) -> Vec<usize> {
    let cells: Vec<CellId> = x.cell_ids().cloned().collect();
    trim(betti_of(x, &cells, |_| false))
}

/// Per-stratum invariants, both combinatorial readings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrataBetti {
    /// For each stratum `p`: relative homology of the closed piece
    /// `X_{<=p}` modulo the part below, `X_{<p}`.
    pub relative: BTreeMap<String, Vec<usize>>,
    /// For each stratum `p`: absolute homology of the full subcomplex on
    /// the vertices labelled exactly `p`.
    pub absolute: BTreeMap<String, Vec<usize>>,
}

/// Cells whose entire flag lies at or under `p` (resp. strictly under).
fn closed_piece(x: &Fss, p: PElem, strict: bool) -> Vec<CellId> {
    x.cell_ids()
        .filter(|id| {
            let m = x.stratum_of(id);
            if strict {
                x.poset.lt(m, p)
            } else {
                x.poset.leq(m, p)
            }
        })
        .cloned()
        .collect()
}

pub fn strata_betti(x: &Fss) -> StrataBetti {
    let mut relative = BTreeMap::new();
    let mut absolute = BTreeMap::new();
    for p in x.poset.elements() {
        let name = x.poset.name(p).to_owned();
        let le = closed_piece(x, p, false);
        let lt: std::collections::BTreeSet<CellId> = closed_piece(x, p, true).into_iter().collect();
        relative.insert(name.clone(), trim(betti_of(x, &le, |c| lt.contains(c))));
        let vertices: std::collections::BTreeSet<CellId> = x
            .labels()
            .iter()
            .filter(|(_, &l)| l == p)
            .map(|(id, _)| id.clone())
            .collect();
        let sub = x.full_subcomplex(&vertices);
        absolute.insert(name, betti_z2(&sub));
    }
    StrataBetti { relative, absolute }
}

/// Total and per-stratum Euler characteristics; a cell counts toward the
/// stratum of its flag maximum.
pub fn euler_by_stratum(x: &Fss) -> BTreeMap<String, i64> {
    let mut out: BTreeMap<String, i64> = BTreeMap::new();
    for p in x.poset.elements() {
        out.insert(x.poset.name(p).to_owned(), 0);
    }
    for (id, data) in x.cells() {
        let s = x.stratum_of(id);
        *out.get_mut(x.poset.name(s)).expect("stratum named") += if data.dim % 2 == 0 { 1 } else { -1 };
    }
    out
}

/// Brute-force rank of the full (non-normalized would be infinite; this is
/// the same normalized complex, recomputed without the packed-row pivoting)
/// used to cross-check `betti_z2` on small complexes.
pub fn betti_z2_naive(x: &Fss) -> Vec<usize> {
    let top = match x.dim() {
        Some(d) => d,
        None => return Vec::new(),
    };
    let mut index: Vec<Vec<CellId>> = vec![Vec::new(); top + 1];
    for (id, data) in x.cells() {
        index[data.dim].push(id.clone());
    }
    let rank_dense = |d: usize| -> usize {
        if d == 0 || d > top || index[d].is_empty() || index[d - 1].is_empty() {
            return 0;
        }
        let rows: BTreeMap<&CellId, usize> = index[d - 1].iter().enumerate().map(|(i, c)| (c, i)).collect();
        let mut mat: Vec<Vec<u8>> = index[d]
            .iter()
            .map(|c| {
                let mut col = vec![0u8; rows.len()];
                for f in boundary_cells(x, c) {
                    col[rows[&f]] ^= 1;
                }
                col
            })
            .collect();
        // textbook elimination over GF(2)
        let mut rank = 0;
        for col in 0..rows.len() {
            if let Some(pivot) = (rank..mat.len()).find(|&r| mat[r][col] == 1) {
                mat.swap(rank, pivot);
                let prow = mat[rank].clone();
                for (r, row) in mat.iter_mut().enumerate() {
                    if r != rank && row[col] == 1 {
                        for (a, b) in row.iter_mut().zip(&prow) {
                            *a ^= b;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    };
    trim((0..=top).map(|d| index[d].len() - rank_dense(d) - rank_dense(d + 1)).collect())
}
