//! Admissible horns and the two elementary moves.
//!
//! An expansion is the pushout of an admissible horn inclusion
//! `Λ^J_k ↪ Δ^J`; a collapse is its formal inverse, realized by removing a
//! maximal cell together with a free admissible face.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::DFlag;
use crate::sset::{pushout, simplex, CellId, Fss, SimplicialMap, Sx};

/// A horn `Λ^J_k ↪ Δ^J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornSpec {
    pub dflag: DFlag,
    pub k: usize,
}

impl HornSpec {
    pub fn new(dflag: DFlag, k: usize) -> Result<HornSpec> {
        if k > dflag.dim() {
            return Err(Error::Parameter(format!("horn index {k} out of range for dimension {}", dflag.dim())));
        }
        Ok(HornSpec { dflag, k })
    }
}

/// `k` is admissible for `J` iff the `k`-th flag entry is repeated next to
/// itself: `p_k = p_{k+1}` or `p_k = p_{k-1}`.
pub fn is_admissible(flag: &DFlag, k: usize) -> bool {
    let n = flag.dim();
    if k > n {
        return false;
    }
    (k < n && flag.get(k) == flag.get(k + 1)) || (k >= 1 && flag.get(k) == flag.get(k - 1))
}

/// Strict admissibility additionally requires `p_k` maximal in the flag.
pub fn is_strictly_admissible(flag: &DFlag, k: usize) -> bool {
    is_admissible(flag, k) && flag.get(k) == flag.max_elem()
}

impl HornSpec {
    pub fn is_admissible(&self) -> bool {
        is_admissible(&self.dflag, self.k)
    }

    pub fn is_strictly_admissible(&self) -> bool {
        is_strictly_admissible(&self.dflag, self.k)
    }
}

/// A replayable elementary move.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoveRecord {
    Collapse {
        top: CellId,
        k: usize,
    },
    Expand {
        dflag: Vec<String>,
        k: usize,
        /// Assignment of the horn's cells (named as vertex subsets) into the
        /// pre-state.
        attach: BTreeMap<CellId, (Vec<u32>, CellId)>,
        /// Ids given to the two attached cells: the top cell and its free face.
        top: CellId,
        free: CellId,
    },
}

/// A free pair: a maximal cell `top`, the unique index `k` with
/// `d_k top = free`, and the free face itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreePair {
    pub top: CellId,
    pub free: CellId,
    pub k: usize,
}

/// Returns the incidence counts `face cell -> number of (cell, index) slots
/// it appears in with an empty word`, over nondegenerate cells only.
fn nondegenerate_incidences(x: &Fss) -> BTreeMap<CellId, Vec<(CellId, usize)>> {
    let mut inc: BTreeMap<CellId, Vec<(CellId, usize)>> = BTreeMap::new();
    for (id, data) in x.cells() {
        for (i, f) in data.faces.iter().enumerate() {
            if f.word.is_empty() {
                inc.entry(f.cell.clone()).or_default().push((id.clone(), i));
            }
        }
    }
    inc
}

/// Enumerates the legal (strictly) admissible free pairs of `x`, in
/// descending dimension then lexicographic id order.
pub fn find_free_pairs(x: &Fss, protected: &BTreeSet<CellId>, strict_only: bool) -> Vec<FreePair> {
    let inc = nondegenerate_incidences(x);
    let empty: Vec<(CellId, usize)> = Vec::new();
    let mut out = Vec::new();
    for top in x.ids_desc() {
        if protected.contains(&top) || x.dim_of(&top) == 0 {
            continue;
        }
        // top must be maximal: a face of no stored cell (degenerate
        // incidences are determined by nondegenerate ones)
        if !inc.get(&top).unwrap_or(&empty).is_empty() {
            continue;
        }
        let flag = x.flag_of(&top);
        let data = x.cell(&top);
        for (k, f) in data.faces.iter().enumerate() {
            if !f.word.is_empty() {
                continue;
            }
            let free = &f.cell;
            if protected.contains(free) {
                continue;
            }
            // k must be the unique index realizing free as a face of top
            let slots = inc.get(free).unwrap_or(&empty);
            if slots.len() != 1 || slots[0] != (top.clone(), k) {
                continue;
            }
            let ok = if strict_only {
                is_strictly_admissible(&flag, k)
            } else {
                is_admissible(&flag, k)
            };
            if ok {
                out.push(FreePair { top: top.clone(), free: free.clone(), k });
            }
        }
    }
    out
}

/// Checks one candidate pair without enumerating everything.
pub fn check_free_pair(x: &Fss, pair: &FreePair, strict_only: bool) -> Result<()> {
    if !x.contains(&pair.top) || !x.contains(&pair.free) {
        return Err(Error::IllegalMove("pair names a missing cell".into()));
    }
    let inc = nondegenerate_incidences(x);
    if inc.get(&pair.top).is_some_and(|v| !v.is_empty()) {
        return Err(Error::IllegalMove(format!("`{}` is not maximal", pair.top)));
    }
    let slots = inc.get(&pair.free).cloned().unwrap_or_default();
    if slots.len() != 1 || slots[0] != (pair.top.clone(), pair.k) {
        return Err(Error::IllegalMove(format!(
            "`{}` is not free with unique index {} in `{}`",
            pair.free, pair.k, pair.top
        )));
    }
    let flag = x.flag_of(&pair.top);
    if strict_only {
        if !is_strictly_admissible(&flag, pair.k) {
            return Err(Error::IllegalMove(format!("index {} is not strictly admissible for {:?}", pair.k, flag)));
        }
    } else if !is_admissible(&flag, pair.k) {
        return Err(Error::IllegalMove(format!("index {} is not admissible for {:?}", pair.k, flag)));
    }
    Ok(())
}

/// Removes a free admissible pair. Returns the smaller complex and the
/// replayable record.
pub fn collapse(x: &Fss, pair: &FreePair) -> Result<(Fss, MoveRecord)> {
    check_free_pair(x, pair, false)?;
    let mut out = x.clone();
    out.remove_cell(&pair.top);
    out.remove_cell(&pair.free);
    Ok((out, MoveRecord::Collapse { top: pair.top.clone(), k: pair.k }))
}

/// Pushes out an admissible horn along an attaching map. Adds exactly one
/// top cell and its missing face.
pub fn expand(x: &Arc<Fss>, horn: &HornSpec, attach: &SimplicialMap) -> Result<(Arc<Fss>, MoveRecord)> {
    if !horn.is_admissible() {
        return Err(Error::IllegalMove(format!("index {} is not admissible for {:?}", horn.k, horn.dflag)));
    }
    let poset = &x.poset;
    let horn_complex = Arc::new(simplex::horn(poset, &horn.dflag, horn.k));
    let full = Arc::new(simplex::standard(poset, &horn.dflag));
    if *attach.src != *horn_complex {
        return Err(Error::Map("attaching map must start at the horn".into()));
    }
    if *attach.dst != **x {
        return Err(Error::Map("attaching map must land in the pre-state".into()));
    }
    let incl = SimplicialMap::inclusion(horn_complex, full.clone())?;
    let res = pushout(&incl, attach)?;
    let n = horn.dflag.dim();
    let top_src = simplex::subset_id(&(0..=n).collect::<Vec<_>>());
    let mut missing: Vec<usize> = (0..=n).collect();
    missing.remove(horn.k);
    let free_src = simplex::subset_id(&missing);
    let top = res.from_attached.image_of(&top_src).cell.clone();
    let free = res.from_attached.image_of(&free_src).cell.clone();
    let record = MoveRecord::Expand {
        dflag: horn.dflag.entries().iter().map(|&e| poset.name(e).to_owned()).collect(),
        k: horn.k,
        attach: attach
            .assignment()
            .iter()
            .map(|(id, sx)| (id.clone(), (sx.word.indices().to_vec(), sx.cell.clone())))
            .collect(),
        top,
        free,
    };
    Ok((res.total, record))
}

/// Replays a record against a pre-state.
pub fn replay(x: &Arc<Fss>, record: &MoveRecord) -> Result<Fss> {
    match record {
        MoveRecord::Collapse { top, k } => {
            let data = x
                .get_cell(top)
                .ok_or_else(|| Error::IllegalMove(format!("collapse names missing cell `{top}`")))?;
            let f = &data.faces[*k];
            if !f.word.is_empty() {
                return Err(Error::IllegalMove("collapse face is degenerate".into()));
            }
            let pair = FreePair { top: top.clone(), free: f.cell.clone(), k: *k };
            Ok(collapse(x, &pair)?.0)
        }
        MoveRecord::Expand { dflag, k, attach, .. } => {
            let flag = DFlag::parse(&x.poset, dflag)?;
            let horn = HornSpec::new(flag.clone(), *k)?;
            let horn_complex = Arc::new(simplex::horn(&x.poset, &flag, *k));
            let assign = attach
                .iter()
                .map(|(id, (w, t))| {
                    (id.clone(), Sx { word: crate::sset::DegWord::new(w.clone()), cell: t.clone() })
                })
                .collect();
            let map = SimplicialMap::new(horn_complex, x.clone(), assign)?;
            Ok((*expand(x, &horn, &map)?.0).clone())
        }
    }
}
