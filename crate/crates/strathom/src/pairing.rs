//! The anodyne certificate calculus: pairings, properness, regularity,
//! presentations, finite restriction, and transport along pushouts.
//!
//! A pairing certifies that a cofibration `A ↪ B` is a composition of
//! admissible horn fillings. It partitions the nondegenerate cells outside
//! `A` into type II cells and their type I partners `T(σ)`, with `σ` the
//! unique admissible free face of `T(σ)`. Regularity (well-foundedness of
//! the ancestral relation) is decided per dimension by cycle detection and
//! witnessed by a level function.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moves::is_admissible;
use crate::sset::{pushout, CellId, Fss, PushoutResult, SimplicialMap};

/// A cofibration presented as a face-closed subset of its target.
#[derive(Clone, Debug)]
pub struct Cofibration {
    pub total: Arc<Fss>,
    pub base: BTreeSet<CellId>,
}

impl Cofibration {
    pub fn new(total: Arc<Fss>, base: BTreeSet<CellId>) -> Result<Cofibration> {
        for id in &base {
            let data = total
                .get_cell(id)
                .ok_or_else(|| Error::Identifier(format!("base cell `{id}` is not in the target")))?;
            for f in &data.faces {
                if !base.contains(&f.cell) {
                    return Err(Error::Closure { kept: id.to_string(), missing: f.cell.to_string() });
                }
            }
        }
        Ok(Cofibration { total, base })
    }

    /// Normalizes an injective map to subset form: the base becomes the
    /// image of the source.
    pub fn from_map(i: &SimplicialMap) -> Result<Cofibration> {
        if !i.is_injective_on_cells() {
            return Err(Error::Precondition("cofibrations must be injective on cells".into()));
        }
        let base = i.assignment().values().map(|sx| sx.cell.clone()).collect();
        Cofibration::new(i.dst.clone(), base)
    }

    pub fn base_complex(&self) -> Fss {
        self.total.subset(&self.base).expect("base is face-closed")
    }

    /// Cells outside the base, the domain of any pairing.
    pub fn outside(&self) -> Vec<CellId> {
        self.total.cell_ids().filter(|id| !self.base.contains(id)).cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    pub top: CellId,
    pub k: usize,
}

/// A pairing on a cofibration: `pairs` maps each type II cell to its type I
/// partner and face index.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub cof: Cofibration,
    pub pairs: BTreeMap<CellId, PairEntry>,
}

/// Outcome of the regularity check: a per-dimension level function when the
/// ancestral relation is acyclic, or a cycle witness.
#[derive(Clone, Debug)]
pub enum Regularity {
    Regular { phi: BTreeMap<CellId, usize> },
    Cycle { cells: Vec<CellId> },
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        matches!(self, Regularity::Regular { .. })
    }
}

impl Pairing {
    pub fn new(cof: Cofibration, pairs: BTreeMap<CellId, PairEntry>) -> Pairing {
        Pairing { cof, pairs }
    }

    pub fn type_two(&self) -> impl Iterator<Item = &CellId> {
        self.pairs.keys()
    }

    pub fn type_one(&self) -> impl Iterator<Item = &CellId> {
        self.pairs.values().map(|e| &e.top)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Properness diagnostics; empty iff the pairing partitions the outside
    /// cells and every pair has a unique admissible face index.
    pub fn check_proper(&self) -> Vec<String> {
        let mut out = Vec::new();
        let x = &self.cof.total;
        let outside: BTreeSet<CellId> = self.cof.outside().into_iter().collect();
        let mut seen: BTreeSet<CellId> = BTreeSet::new();
        for (sigma, entry) in &self.pairs {
            for c in [sigma, &entry.top] {
                if !outside.contains(c) {
                    out.push(format!("cell `{c}` is paired but not outside the base"));
                }
                if !seen.insert(c.clone()) {
                    out.push(format!("cell `{c}` appears in more than one pair"));
                }
            }
            let (Some(s), Some(t)) = (x.get_cell(sigma), x.get_cell(&entry.top)) else {
                out.push(format!("pair ({sigma}, {}) names a missing cell", entry.top));
                continue;
            };
            if t.dim != s.dim + 1 {
                out.push(format!("`{}` must have dimension {} + 1", entry.top, s.dim));
                continue;
            }
            let hits: Vec<usize> = t
                .faces
                .iter()
                .enumerate()
                .filter(|(_, f)| f.word.is_empty() && f.cell == *sigma)
                .map(|(i, _)| i)
                .collect();
            if hits != [entry.k] {
                out.push(format!(
                    "`{sigma}` must be the face of `{}` at the unique index {}, found {hits:?}",
                    entry.top, entry.k
                ));
                continue;
            }
            let flag = x.flag_of(&entry.top);
            if !is_admissible(&flag, entry.k) {
                out.push(format!("index {} is not admissible for the flag {flag:?} of `{}`", entry.k, entry.top));
            }
        }
        if seen.len() != outside.len() {
            for c in outside.difference(&seen) {
                out.push(format!("cell `{c}` outside the base is unpaired"));
            }
        }
        out
    }

    /// The ancestral relation: `sigma ≺ tau` iff both are type II, they
    /// differ, and `sigma` is an iterated face of `T(tau)`.
    fn ancestral_edges(&self) -> BTreeMap<CellId, Vec<CellId>> {
        let x = &self.cof.total;
        let mut preds: BTreeMap<CellId, Vec<CellId>> = BTreeMap::new();
        for (tau, entry) in &self.pairs {
            let faces = x.face_closure(&entry.top);
            let list: Vec<CellId> = faces
                .into_iter()
                .filter(|c| c != tau && self.pairs.contains_key(c))
                .collect();
            preds.insert(tau.clone(), list);
        }
        preds
    }

    /// Decides regularity. On success the witness assigns each type II cell
    /// a level that strictly increases along the ancestral relation within
    /// each dimension.
    pub fn check_regular(&self) -> Result<Regularity> {
        let proper = self.check_proper();
        if !proper.is_empty() {
            return Err(Error::Precondition(format!("pairing is not proper: {}", proper.join("; "))));
        }
        let preds = self.ancestral_edges();
        // The relation never increases dimension, so any cycle stays within
        // one dimension; a global depth-first search finds it.
        let mut state: BTreeMap<CellId, u8> = BTreeMap::new(); // 1 = on stack, 2 = done
        let mut level: BTreeMap<CellId, usize> = BTreeMap::new();
        for start in self.pairs.keys() {
            if state.contains_key(start) {
                continue;
            }
            // iterative DFS computing F(sigma) = max(1, F(tau)+1 : tau ≺ sigma)
            let mut stack: Vec<(CellId, usize)> = vec![(start.clone(), 0)];
            state.insert(start.clone(), 1);
            while let Some((cell, idx)) = stack.pop() {
                let ps = &preds[&cell];
                if idx < ps.len() {
                    let next = ps[idx].clone();
                    stack.push((cell.clone(), idx + 1));
                    match state.get(&next) {
                        None => {
                            state.insert(next.clone(), 1);
                            stack.push((next, 0));
                        }
                        Some(1) => {
                            let mut cells: Vec<CellId> =
                                stack.iter().map(|(c, _)| c.clone()).filter(|c| state.get(c) == Some(&1)).collect();
                            cells.push(next);
                            return Ok(Regularity::Cycle { cells });
                        }
                        _ => {}
                    }
                } else {
                    let f = ps.iter().map(|p| level[p] + 1).max().unwrap_or(0).max(1);
                    level.insert(cell.clone(), f);
                    state.insert(cell, 2);
                }
            }
        }
        Ok(Regularity::Regular { phi: level })
    }

    /// Orders the pairs into an anodyne presentation: by level, then
    /// ascending dimension, then id.
    pub fn to_presentation(&self) -> Result<Presentation> {
        let phi = match self.check_regular()? {
            Regularity::Regular { phi } => phi,
            Regularity::Cycle { cells } => {
                return Err(Error::Precondition(format!(
                    "pairing is not regular: ancestral cycle through {cells:?}"
                )))
            }
        };
        let x = &self.cof.total;
        let mut steps: Vec<PresStep> = self
            .pairs
            .iter()
            .map(|(sigma, e)| PresStep { free: sigma.clone(), top: e.top.clone(), k: e.k })
            .collect();
        steps.sort_by(|a, b| {
            (phi[&a.free], x.dim_of(&a.free), &a.free).cmp(&(phi[&b.free], x.dim_of(&b.free), &b.free))
        });
        let pres = Presentation { cof: self.cof.clone(), steps };
        pres.replay()?;
        Ok(pres)
    }

    /// Restricts to the smallest sub-cofibration containing `seed` that is
    /// closed under faces and under the pairing in both directions. Returns
    /// the middle complex and the two restricted pairings.
    pub fn restrict_finite(&self, seed: &BTreeSet<CellId>) -> Result<(Arc<Fss>, Pairing, Pairing)> {
        let x = &self.cof.total;
        for id in seed {
            if !x.contains(id) {
                return Err(Error::Identifier(format!("restriction seed `{id}` is not a cell")));
            }
        }
        let mut partner: BTreeMap<CellId, CellId> = BTreeMap::new();
        for (s, e) in &self.pairs {
            partner.insert(s.clone(), e.top.clone());
            partner.insert(e.top.clone(), s.clone());
        }
        let mut keep: BTreeSet<CellId> = BTreeSet::new();
        let mut stack: Vec<CellId> = seed.iter().filter(|c| !self.cof.base.contains(*c)).cloned().collect();
        while let Some(id) = stack.pop() {
            if self.cof.base.contains(&id) || !keep.insert(id.clone()) {
                continue;
            }
            for f in &x.cell(&id).faces {
                stack.push(f.cell.clone());
            }
            stack.push(partner[&id].clone());
        }
        let mut mid_cells = self.cof.base.clone();
        mid_cells.extend(keep.iter().cloned());
        let mid = Arc::new(x.subset(&mid_cells)?);
        let inner = Pairing::new(
            Cofibration::new(mid.clone(), self.cof.base.clone())?,
            self.pairs.iter().filter(|(s, _)| keep.contains(*s)).map(|(s, e)| (s.clone(), e.clone())).collect(),
        );
        let outer = Pairing::new(
            Cofibration::new(x.clone(), mid_cells)?,
            self.pairs.iter().filter(|(s, _)| !keep.contains(*s)).map(|(s, e)| (s.clone(), e.clone())).collect(),
        );
        Ok((mid, inner, outer))
    }

    /// Transports the pairing along a pushout of its base: given
    /// `f : base → C`, forms `D = C ∪_base total` and the pairing on
    /// `C ↪ D`. `f`'s source must be the base subcomplex.
    pub fn pushforward(&self, f: &SimplicialMap) -> Result<(PushoutResult, Pairing)> {
        let base = Arc::new(self.cof.base_complex());
        if *f.src != *base {
            return Err(Error::Precondition("pushforward map must start at the pairing's base".into()));
        }
        let incl = SimplicialMap::inclusion(base, self.cof.total.clone())?;
        let po = pushout(&incl, f)?;
        let transported = self.transport(&po)?;
        Ok((po, transported))
    }

    /// Rewrites the pairing through the attached-cells leg of a pushout.
    /// The new base is everything the transported pairs do not cover, so a
    /// pairing of a subcomplex transports to a pairing of its image.
    pub fn transport(&self, po: &PushoutResult) -> Result<Pairing> {
        let push = |id: &CellId| -> Result<CellId> {
            let sx = po.from_attached.image_of(id);
            if !sx.word.is_empty() {
                return Err(Error::Precondition(format!("paired cell `{id}` degenerates in the pushout")));
            }
            Ok(sx.cell.clone())
        };
        let mut pairs = BTreeMap::new();
        for (s, e) in &self.pairs {
            pairs.insert(push(s)?, PairEntry { top: push(&e.top)?, k: e.k });
        }
        let paired: BTreeSet<CellId> =
            pairs.iter().flat_map(|(s, e)| [s.clone(), e.top.clone()]).collect();
        let base: BTreeSet<CellId> =
            po.total.cell_ids().filter(|id| !paired.contains(*id)).cloned().collect();
        Ok(Pairing::new(Cofibration::new(po.total.clone(), base)?, pairs))
    }

    /// Stacks two pairings `A ↪ B` and `B ↪ C` into one on `A ↪ C`.
    pub fn stack(&self, outer: &Pairing) -> Result<Pairing> {
        let mid: BTreeSet<CellId> = self.cof.total.cell_ids().cloned().collect();
        if outer.cof.base != mid {
            return Err(Error::Endpoint("stacked pairings must meet in the middle complex".into()));
        }
        let mut pairs = self.pairs.clone();
        for (s, e) in &outer.pairs {
            pairs.insert(s.clone(), e.clone());
        }
        Ok(Pairing::new(Cofibration::new(outer.cof.total.clone(), self.cof.base.clone())?, pairs))
    }

    /// Certificate JSON: `{"typeII": [...], "T": {σ: τ}, "k": {σ: k}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let type2: Vec<&CellId> = self.pairs.keys().collect();
        let t: BTreeMap<&CellId, &CellId> = self.pairs.iter().map(|(s, e)| (s, &e.top)).collect();
        let k: BTreeMap<&CellId, usize> = self.pairs.iter().map(|(s, e)| (s, e.k)).collect();
        serde_json::json!({"typeII": type2, "T": t, "k": k})
    }

    pub fn from_json(cof: Cofibration, v: &serde_json::Value) -> Result<Pairing> {
        #[derive(Deserialize)]
        struct PairingJson {
            #[serde(rename = "typeII")]
            type2: Vec<CellId>,
            #[serde(rename = "T")]
            t: BTreeMap<CellId, CellId>,
            k: BTreeMap<CellId, usize>,
        }
        let pj: PairingJson = serde_json::from_value(v.clone())?;
        let mut pairs = BTreeMap::new();
        for s in pj.type2 {
            let top = pj.t.get(&s).cloned().ok_or_else(|| Error::Input(format!("missing T for `{s}`")))?;
            let k = *pj.k.get(&s).ok_or_else(|| Error::Input(format!("missing k for `{s}`")))?;
            pairs.insert(s, PairEntry { top, k });
        }
        Ok(Pairing::new(cof, pairs))
    }
}

/// One replay step: fill the horn of `top` missing its `k`-th face `free`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresStep {
    pub free: CellId,
    pub top: CellId,
    pub k: usize,
}

/// An ordered list of horn fillings rebuilding the target from the base.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub cof: Cofibration,
    pub steps: Vec<PresStep>,
}

impl Presentation {
    /// Replays the steps from the base. Each step must attach a cell whose
    /// horn faces are already present, at an admissible index, with the free
    /// face added at the same time. Succeeds iff the target is rebuilt.
    pub fn replay(&self) -> Result<()> {
        let x = &self.cof.total;
        let mut cur = self.cof.base.clone();
        for (n, step) in self.steps.iter().enumerate() {
            let fail = |reason: String| Error::Replay { step: n, reason };
            let top = x.get_cell(&step.top).ok_or_else(|| fail(format!("missing top `{}`", step.top)))?;
            if cur.contains(&step.top) || cur.contains(&step.free) {
                return Err(fail("cell already present".into()));
            }
            if step.k >= top.faces.len() {
                return Err(fail("face index out of range".into()));
            }
            let kface = &top.faces[step.k];
            if !kface.word.is_empty() || kface.cell != step.free {
                return Err(fail(format!("face {} of `{}` is not `{}`", step.k, step.top, step.free)));
            }
            let free = x.get_cell(&step.free).ok_or_else(|| fail(format!("missing free `{}`", step.free)))?;
            for f in &free.faces {
                if !cur.contains(&f.cell) {
                    return Err(fail(format!("free face `{}` needs `{}`", step.free, f.cell)));
                }
            }
            for (i, f) in top.faces.iter().enumerate() {
                if i != step.k && !cur.contains(&f.cell) {
                    return Err(fail(format!("horn of `{}` needs `{}`", step.top, f.cell)));
                }
            }
            if !is_admissible(&x.flag_of(&step.top), step.k) {
                return Err(fail(format!("index {} is not admissible for `{}`", step.k, step.top)));
            }
            cur.insert(step.free.clone());
            cur.insert(step.top.clone());
        }
        let all: BTreeSet<CellId> = x.cell_ids().cloned().collect();
        if cur != all {
            let missing: Vec<&CellId> = all.difference(&cur).take(5).collect();
            return Err(Error::Endpoint(format!("replay does not rebuild the target; missing {missing:?}")));
        }
        Ok(())
    }

    /// The pairing with `T(free) = top` per step; proper and regular for any
    /// replayable presentation.
    pub fn to_pairing(&self) -> Result<Pairing> {
        self.replay()?;
        let pairs = self
            .steps
            .iter()
            .map(|s| (s.free.clone(), PairEntry { top: s.top.clone(), k: s.k }))
            .collect();
        Ok(Pairing::new(self.cof.clone(), pairs))
    }

    /// Presentation JSON: `{"steps": [[σ, k], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let steps: Vec<(CellId, usize)> = self.steps.iter().map(|s| (s.free.clone(), s.k)).collect();
        serde_json::json!({ "steps": steps })
    }

    /// Rebuilds a presentation from `(σ, k)` pairs; each step's top cell is
    /// recovered as the unique absent cell with `σ` as its `k`-th face and
    /// all other faces present.
    pub fn from_json(cof: Cofibration, v: &serde_json::Value) -> Result<Presentation> {
        #[derive(Deserialize)]
        struct PresJson {
            steps: Vec<(CellId, usize)>,
        }
        let pj: PresJson = serde_json::from_value(v.clone())?;
        let x = &cof.total;
        let mut cur = cof.base.clone();
        let mut steps = Vec::new();
        for (n, (free, k)) in pj.steps.into_iter().enumerate() {
            let mut candidates: Vec<CellId> = x
                .cells()
                .filter(|(id, data)| {
                    !cur.contains(*id)
                        && data.dim >= 1
                        && data.faces.get(k).is_some_and(|f| f.word.is_empty() && f.cell == free)
                        && data
                            .faces
                            .iter()
                            .enumerate()
                            .all(|(i, f)| i == k || cur.contains(&f.cell))
                })
                .map(|(id, _)| id.clone())
                .collect();
            if candidates.len() != 1 {
                return Err(Error::Replay {
                    step: n,
                    reason: format!("step ({free}, {k}) has {} candidate fillers", candidates.len()),
                });
            }
            let top = candidates.pop().unwrap();
            cur.insert(free.clone());
            cur.insert(top.clone());
            steps.push(PresStep { free, top, k });
        }
        Ok(Presentation { cof, steps })
    }
}
