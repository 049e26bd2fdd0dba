//! The greedy stratified collapse engine and the deformation certificate
//! format it emits, together with the replay verifier.
//!
//! A deformation is a zigzag of anodyne extensions between two complexes:
//! each leg is a sequence of horn-filling steps (carrying full cell data so
//! replay is self-contained) pointing forward or backward, or an explicit
//! relabeling. Verification replays every leg and checks the endpoints.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moves::{self, MoveRecord};
use crate::pairing::Presentation;
use crate::sset::{CellData, CellId, Fss, Sx};

/// One horn-filling step with enough data to rebuild both added cells.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpStep {
    pub top: CellId,
    pub top_faces: Vec<Sx>,
    pub free: CellId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub free_faces: Vec<Sx>,
    /// Label name when the free face is a vertex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub free_label: Option<String>,
    pub k: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LegBody {
    /// Horn fillings, in expansion order.
    Expansion { steps: Vec<ExpStep> },
    /// A bijective relabeling of cells.
    Iso { map: BTreeMap<CellId, CellId> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Leg {
    /// Forward: the current complex expands. Backward: it collapses, i.e.
    /// the anodyne extension points at the current complex.
    pub forward: bool,
    #[serde(flatten)]
    pub body: LegBody,
}

/// A zigzag of anodyne extensions connecting `start` to `end`.
#[derive(Clone, Debug)]
pub struct Deformation {
    pub start: Fss,
    pub end: Fss,
    pub legs: Vec<Leg>,
}

/// Per-verification facts: which steps were strict, and the replayed end.
#[derive(Debug)]
pub struct VerifyReport {
    /// One entry per expansion step across all legs.
    pub strict_steps: Vec<bool>,
    pub diagnostics: Vec<String>,
}

impl VerifyReport {
    pub fn is_ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

fn insert_step(cur: &mut Fss, step: &ExpStep) -> Result<bool> {
    let fail = |m: String| Error::Replay { step: 0, reason: m };
    if cur.contains(&step.top) || cur.contains(&step.free) {
        return Err(fail(format!("step ({}, {}) adds an existing cell", step.top, step.free)));
    }
    for f in &step.free_faces {
        if !cur.contains(&f.cell) {
            return Err(fail(format!("free face `{}` needs `{}`", step.free, f.cell)));
        }
    }
    for (i, f) in step.top_faces.iter().enumerate() {
        if i != step.k && !cur.contains(&f.cell) {
            return Err(fail(format!("horn of `{}` needs `{}`", step.top, f.cell)));
        }
    }
    let kf = &step.top_faces[step.k];
    if !kf.word.is_empty() || kf.cell != step.free {
        return Err(fail(format!("face {} of `{}` is not the free face", step.k, step.top)));
    }
    if step.free_faces.is_empty() {
        let label = step
            .free_label
            .as_ref()
            .ok_or_else(|| fail(format!("vertex `{}` lacks a label", step.free)))?;
        let p = cur.poset.elem(label)?;
        cur.insert_vertex(step.free.clone(), p);
    } else {
        cur.insert_cell_raw(
            step.free.clone(),
            CellData { dim: step.free_faces.len() - 1, faces: step.free_faces.clone() },
        );
    }
    cur.insert_cell_raw(
        step.top.clone(),
        CellData { dim: step.top_faces.len() - 1, faces: step.top_faces.clone() },
    );
    let flag = cur.flag_of(&step.top);
    if !moves::is_admissible(&flag, step.k) {
        return Err(fail(format!("index {} is not admissible for `{}` with flag {flag:?}", step.k, step.top)));
    }
    Ok(moves::is_strictly_admissible(&flag, step.k))
}

/// Nondegenerate coface slots, maintained incrementally across a leg so a
/// long collapse replay stays linear.
struct CofaceIndex(BTreeMap<CellId, BTreeSet<(CellId, usize)>>);

impl CofaceIndex {
    fn build(x: &Fss) -> CofaceIndex {
        let mut map: BTreeMap<CellId, BTreeSet<(CellId, usize)>> = BTreeMap::new();
        for (id, data) in x.cells() {
            map.entry(id.clone()).or_default();
            for (i, f) in data.faces.iter().enumerate() {
                if f.word.is_empty() {
                    map.entry(f.cell.clone()).or_default().insert((id.clone(), i));
                }
            }
        }
        CofaceIndex(map)
    }

    fn drop_cell(&mut self, x: &Fss, id: &CellId) {
        for (i, f) in x.cell(id).faces.iter().enumerate() {
            if f.word.is_empty() {
                if let Some(s) = self.0.get_mut(&f.cell) {
                    s.remove(&(id.clone(), i));
                }
            }
        }
        self.0.remove(id);
    }

}

fn remove_step(cur: &mut Fss, index: &mut CofaceIndex, step: &ExpStep) -> Result<bool> {
    let fail = |m: String| Error::IllegalMove(m);
    if !cur.contains(&step.top) || !cur.contains(&step.free) {
        return Err(fail(format!("pair ({}, {}) names a missing cell", step.top, step.free)));
    }
    if index.0.get(&step.top).is_some_and(|s| !s.is_empty()) {
        return Err(fail(format!("`{}` is not maximal", step.top)));
    }
    let kf = cur.cell(&step.top).faces.get(step.k).cloned();
    match kf {
        Some(f) if f.word.is_empty() && f.cell == step.free => {}
        _ => return Err(fail(format!("face {} of `{}` is not `{}`", step.k, step.top, step.free))),
    }
    let slots = index.0.get(&step.free).cloned().unwrap_or_default();
    if slots.len() != 1 || !slots.contains(&(step.top.clone(), step.k)) {
        return Err(fail(format!("`{}` is not free with unique index {}", step.free, step.k)));
    }
    let flag = cur.flag_of(&step.top);
    if !moves::is_admissible(&flag, step.k) {
        return Err(fail(format!("index {} is not admissible for `{}`", step.k, step.top)));
    }
    let strict = moves::is_strictly_admissible(&flag, step.k);
    index.drop_cell(cur, &step.top);
    index.drop_cell(cur, &step.free);
    cur.remove_cell(&step.top);
    cur.remove_cell(&step.free);
    Ok(strict)
}

impl Deformation {
    /// The empty zigzag at `x`.
    pub fn identity(x: Fss) -> Deformation {
        Deformation { start: x.clone(), end: x, legs: Vec::new() }
    }

    /// Replays every leg from `start`; diagnostics are empty iff all steps
    /// are legal and the result matches `end` (up to isomorphism as a last
    /// resort).
    pub fn verify(&self) -> VerifyReport {
        let mut strict_steps = Vec::new();
        let mut diagnostics = Vec::new();
        let mut cur = self.start.clone();
        let violations = cur.validate();
        if !violations.is_empty() {
            diagnostics.push(format!("start complex invalid: {}", violations[0].message));
        }
        'legs: for (n, leg) in self.legs.iter().enumerate() {
            match &leg.body {
                LegBody::Expansion { steps } => {
                    if leg.forward {
                        for (i, step) in steps.iter().enumerate() {
                            match insert_step(&mut cur, step) {
                                Ok(strict) => strict_steps.push(strict),
                                Err(e) => {
                                    diagnostics.push(format!("leg {n} step {i}: {e}"));
                                    break 'legs;
                                }
                            }
                        }
                    } else {
                        let mut index = CofaceIndex::build(&cur);
                        for (i, step) in steps.iter().enumerate().rev() {
                            match remove_step(&mut cur, &mut index, step) {
                                Ok(strict) => strict_steps.push(strict),
                                Err(e) => {
                                    diagnostics.push(format!("leg {n} step {i}: {e}"));
                                    break 'legs;
                                }
                            }
                        }
                    }
                }
                LegBody::Iso { map } => match cur.rename(map) {
                    Ok(renamed) => cur = renamed,
                    Err(e) => {
                        diagnostics.push(format!("leg {n}: {e}"));
                        break 'legs;
                    }
                },
            }
        }
        if diagnostics.is_empty() && cur != self.end
            && crate::iso::find_isomorphism(&cur, &self.end).is_none() {
                diagnostics.push("replayed endpoint differs from the stated end".into());
            }
        VerifyReport { strict_steps, diagnostics }
    }

    /// Reverses the zigzag.
    pub fn invert(&self) -> Deformation {
        let legs = self
            .legs
            .iter()
            .rev()
            .map(|leg| match &leg.body {
                LegBody::Expansion { steps } => {
                    Leg { forward: !leg.forward, body: LegBody::Expansion { steps: steps.clone() } }
                }
                LegBody::Iso { map } => {
                    let inv = map.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
                    Leg { forward: leg.forward, body: LegBody::Iso { map: inv } }
                }
            })
            .collect();
        Deformation { start: self.end.clone(), end: self.start.clone(), legs }
    }

    /// Concatenates two zigzags; the endpoints must agree exactly.
    pub fn concat(&self, other: &Deformation) -> Result<Deformation> {
        if self.end != other.start {
            return Err(Error::Endpoint("deformations do not meet in the middle".into()));
        }
        let mut legs = self.legs.clone();
        legs.extend(other.legs.iter().cloned());
        Ok(Deformation { start: self.start.clone(), end: other.end.clone(), legs })
    }

    /// Appends a forward leg built from a replayable presentation whose base
    /// is the current end.
    pub fn push_presentation(&mut self, pres: &Presentation) -> Result<()> {
        let base_cells: BTreeSet<CellId> = self.end.cell_ids().cloned().collect();
        if pres.cof.base != base_cells {
            return Err(Error::Endpoint("presentation base differs from the deformation end".into()));
        }
        let x = &pres.cof.total;
        let steps = pres
            .steps
            .iter()
            .map(|s| {
                let top = x.cell(&s.top);
                let free = x.cell(&s.free);
                ExpStep {
                    top: s.top.clone(),
                    top_faces: top.faces.clone(),
                    free: s.free.clone(),
                    free_faces: free.faces.clone(),
                    free_label: (free.dim == 0).then(|| x.poset.name(x.label(&s.free)).to_owned()),
                    k: s.k,
                }
            })
            .collect();
        self.legs.push(Leg { forward: true, body: LegBody::Expansion { steps } });
        self.end = (**x).clone();
        Ok(())
    }

    /// Appends a backward leg: the current end collapses to the base of the
    /// presentation.
    pub fn push_presentation_reversed(&mut self, pres: &Presentation) -> Result<()> {
        if *pres.cof.total != self.end {
            return Err(Error::Endpoint("presentation target differs from the deformation end".into()));
        }
        let x = &pres.cof.total;
        let steps = pres
            .steps
            .iter()
            .map(|s| {
                let top = x.cell(&s.top);
                let free = x.cell(&s.free);
                ExpStep {
                    top: s.top.clone(),
                    top_faces: top.faces.clone(),
                    free: s.free.clone(),
                    free_faces: free.faces.clone(),
                    free_label: (free.dim == 0).then(|| x.poset.name(x.label(&s.free)).to_owned()),
                    k: s.k,
                }
            })
            .collect();
        self.legs.push(Leg { forward: false, body: LegBody::Expansion { steps } });
        self.end = pres.cof.base_complex();
        Ok(())
    }

    /// Appends a relabeling leg.
    pub fn push_iso(&mut self, map: BTreeMap<CellId, CellId>) -> Result<()> {
        self.end = self.end.rename(&map)?;
        self.legs.push(Leg { forward: true, body: LegBody::Iso { map } });
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "start": self.start.to_json(),
            "end": self.end.to_json(),
            "legs": self.legs,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Deformation> {
        let start = Fss::from_json(v.get("start").ok_or_else(|| Error::Input("missing start".into()))?)?;
        let end = Fss::from_json(v.get("end").ok_or_else(|| Error::Input("missing end".into()))?)?;
        let legs: Vec<Leg> =
            serde_json::from_value(v.get("legs").cloned().ok_or_else(|| Error::Input("missing legs".into()))?)?;
        Ok(Deformation { start, end, legs })
    }
}

/// Reduction strategy knobs.
#[derive(Clone, Debug)]
pub struct ReduceStrategy {
    pub strict_only: bool,
    /// Scan from the top dimension down (default) or bottom up.
    pub descending: bool,
    /// Cap on the number of collapse moves; `None` runs to a local minimum.
    pub max_rounds: Option<usize>,
    pub protected: BTreeSet<CellId>,
}

impl Default for ReduceStrategy {
    fn default() -> Self {
        ReduceStrategy { strict_only: false, descending: true, max_rounds: None, protected: BTreeSet::new() }
    }
}

/// Per-dimension, per-stratum cell counts.
pub fn cell_table(x: &Fss) -> BTreeMap<String, BTreeMap<usize, usize>> {
    let mut out: BTreeMap<String, BTreeMap<usize, usize>> = BTreeMap::new();
    for (id, data) in x.cells() {
        let s = x.poset.name(x.stratum_of(id)).to_owned();
        *out.entry(s).or_default().entry(data.dim).or_insert(0) += 1;
    }
    out
}

/// Reduction outcome: the reduced complex, the certificate, and a report.
pub struct Reduction {
    pub result: Fss,
    pub certificate: Deformation,
    pub report: ReduceReport,
}

#[derive(Debug, Serialize)]
pub struct ReduceReport {
    pub moves: usize,
    pub strict_moves: usize,
    pub cells_before: usize,
    pub cells_after: usize,
    pub table_before: BTreeMap<String, BTreeMap<usize, usize>>,
    pub table_after: BTreeMap<String, BTreeMap<usize, usize>>,
    pub wall_ms: u128,
    pub move_records: Vec<MoveRecord>,
}

/// Greedy stratified collapsing: repeatedly removes the first legal free
/// admissible pair in scan order until none remains. Deterministic for a
/// fixed strategy; never touches protected cells. Incidences are kept
/// incrementally: a collapse only rescans the cells around the removed
/// pair.
pub fn reduce(x: &Fss, strategy: &ReduceStrategy) -> Reduction {
    let started = Instant::now();
    let mut cur = x.clone();
    let mut steps: Vec<ExpStep> = Vec::new();
    let mut records: Vec<MoveRecord> = Vec::new();
    let mut strict_moves = 0;
    // nondegenerate coface slots per cell
    let mut cofaces: BTreeMap<CellId, BTreeSet<(CellId, usize)>> = BTreeMap::new();
    for (id, data) in cur.cells() {
        cofaces.entry(id.clone()).or_default();
        for (i, f) in data.faces.iter().enumerate() {
            if f.word.is_empty() {
                cofaces.entry(f.cell.clone()).or_default().insert((id.clone(), i));
            }
        }
    }
    // scan key: dimension (descending by default), then id, then face index
    let key = |cur: &Fss, top: &CellId, k: usize, descending: bool| {
        let d = cur.dim_of(top) as i64;
        (if descending { -d } else { d }, top.clone(), k)
    };
    let pairs_for_top = |cur: &Fss,
                         cofaces: &BTreeMap<CellId, BTreeSet<(CellId, usize)>>,
                         top: &CellId|
     -> Vec<(CellId, usize)> {
        if !cur.contains(top)
            || cur.dim_of(top) == 0
            || strategy.protected.contains(top)
            || !cofaces.get(top).is_none_or(|s| s.is_empty())
        {
            return Vec::new();
        }
        let flag = cur.flag_of(top);
        cur.cell(top)
            .faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.word.is_empty())
            .filter(|(k, f)| {
                !strategy.protected.contains(&f.cell)
                    && cofaces.get(&f.cell).is_some_and(|s| {
                        s.len() == 1 && s.contains(&(top.clone(), *k))
                    })
                    && if strategy.strict_only {
                        moves::is_strictly_admissible(&flag, *k)
                    } else {
                        moves::is_admissible(&flag, *k)
                    }
            })
            .map(|(k, f)| (f.cell.clone(), k))
            .collect()
    };
    let mut queue: BTreeSet<(i64, CellId, usize)> = BTreeSet::new();
    for id in cur.cell_ids() {
        for (_, k) in pairs_for_top(&cur, &cofaces, id) {
            queue.insert(key(&cur, id, k, strategy.descending));
        }
    }
    while let Some(entry) = queue.iter().next().cloned() {
        if let Some(limit) = strategy.max_rounds {
            if steps.len() >= limit {
                break;
            }
        }
        queue.remove(&entry);
        let (_, top_id, k) = entry;
        // lazy revalidation
        let Some((free_id, _)) =
            pairs_for_top(&cur, &cofaces, &top_id).into_iter().find(|(_, kk)| *kk == k)
        else {
            continue;
        };
        let top = cur.cell(&top_id).clone();
        let free = cur.cell(&free_id).clone();
        if moves::is_strictly_admissible(&cur.flag_of(&top_id), k) {
            strict_moves += 1;
        }
        steps.push(ExpStep {
            top: top_id.clone(),
            top_faces: top.faces.clone(),
            free: free_id.clone(),
            free_faces: free.faces.clone(),
            free_label: (free.dim == 0).then(|| cur.poset.name(cur.label(&free_id)).to_owned()),
            k,
        });
        records.push(MoveRecord::Collapse { top: top_id.clone(), k });
        // update incidences and requeue the neighborhood
        let mut touched: BTreeSet<CellId> = BTreeSet::new();
        for (removed, data) in [(&top_id, &top), (&free_id, &free)] {
            for (i, f) in data.faces.iter().enumerate() {
                if f.word.is_empty() {
                    if let Some(s) = cofaces.get_mut(&f.cell) {
                        s.remove(&(removed.clone(), i));
                    }
                    touched.insert(f.cell.clone());
                }
            }
            cofaces.remove(removed);
        }
        cur.remove_cell(&top_id);
        cur.remove_cell(&free_id);
        let mut requeue: BTreeSet<CellId> = touched.clone();
        for t in &touched {
            if let Some(s) = cofaces.get(t) {
                for (holder, _) in s {
                    requeue.insert(holder.clone());
                }
            }
        }
        for t in requeue {
            for (_, kk) in pairs_for_top(&cur, &cofaces, &t) {
                queue.insert(key(&cur, &t, kk, strategy.descending));
            }
        }
    }
    // collapses read backward are the expansion steps of the certificate leg
    steps.reverse();
    let legs = if steps.is_empty() {
        Vec::new()
    } else {
        vec![Leg { forward: false, body: LegBody::Expansion { steps } }]
    };
    let report = ReduceReport {
        moves: records.len(),
        strict_moves,
        cells_before: x.len(),
        cells_after: cur.len(),
        table_before: cell_table(x),
        table_after: cell_table(&cur),
        wall_ms: started.elapsed().as_millis(),
        move_records: records,
    };
    Reduction {
        result: cur.clone(),
        certificate: Deformation { start: x.clone(), end: cur, legs },
        report,
    }
}

/// Greedy collapse of `x` onto a protected subcomplex: succeeds only if
/// everything outside `protected` is removed. Returns the collapse steps in
/// expansion order, i.e. a presentation of `protected ↪ x`.
pub fn collapse_onto(x: &Fss, protected: &BTreeSet<CellId>) -> Result<Vec<ExpStep>> {
    let strategy = ReduceStrategy { protected: protected.clone(), ..Default::default() };
    let reduction = reduce(x, &strategy);
    let leftover: Vec<CellId> =
        reduction.result.cell_ids().filter(|id| !protected.contains(*id)).cloned().collect();
    if !leftover.is_empty() {
        return Err(Error::Search(format!(
            "greedy collapse stuck with {} cells outside the target, e.g. {:?}",
            leftover.len(),
            &leftover[..leftover.len().min(3)]
        )));
    }
    match reduction.certificate.legs.into_iter().next() {
        Some(Leg { body: LegBody::Expansion { steps }, .. }) => Ok(steps),
        _ => Ok(Vec::new()),
    }
}

/// Convenience: deformation for a single reduction.
pub fn reduce_deformation(x: &Fss, strategy: &ReduceStrategy) -> (Fss, Deformation) {
    let r = reduce(x, strategy);
    (r.result, r.certificate)
}
