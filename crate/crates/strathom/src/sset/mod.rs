//! Finite filtered simplicial sets with full degeneracy bookkeeping.
//!
//! A complex stores only its nondegenerate cells. The `i`-th face of a cell
//! is a pair (degeneracy word, target cell); degenerate simplices exist only
//! as such pairs, never as stored cells. Vertex labels land in a finite
//! poset and must weakly increase along every edge.

mod colim;
pub mod json;
mod map;
mod word;

pub use colim::{coproduct, normalize_pair, outer_product, product_id, product_proj_x, pushout, PushoutResult};
pub use map::SimplicialMap;
pub use word::DegWord;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::{DFlag, PElem, Poset};

/// Identifier of a nondegenerate cell. Opaque, cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(Arc<str>);

impl CellId {
    pub fn new(s: impl AsRef<str>) -> CellId {
        CellId(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.0)
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CellId {
    fn from(s: &str) -> CellId {
        CellId::new(s)
    }
}

impl Serialize for CellId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for CellId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<CellId, D::Error> {
        Ok(CellId::new(String::deserialize(d)?))
    }
}

/// An abstract (possibly degenerate) simplex: a degeneracy word applied to a
/// nondegenerate cell.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Sx {
    pub word: DegWord,
    pub cell: CellId,
}

impl fmt::Debug for Sx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            write!(f, "{:?}", self.cell)
        } else {
            write!(f, "{:?}{:?}", self.word, self.cell)
        }
    }
}

impl Sx {
    pub fn of(cell: CellId) -> Sx {
        Sx { word: DegWord::empty(), cell }
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.word.is_empty()
    }
}

/// A stored nondegenerate cell: its dimension and the `dim + 1` faces.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CellData {
    pub dim: usize,
    pub faces: Vec<Sx>,
}

/// One validation finding; violations are data, not faults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub cell: CellId,
    pub message: String,
}

/// A finite filtered simplicial set.
#[derive(Clone)]
pub struct Fss {
    pub poset: Arc<Poset>,
    cells: BTreeMap<CellId, CellData>,
    labels: BTreeMap<CellId, PElem>,
}

impl fmt::Debug for Fss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fss({} cells, dim {:?})", self.cells.len(), self.dim())
    }
}

impl PartialEq for Fss {
    fn eq(&self, other: &Self) -> bool {
        self.poset == other.poset && self.cells == other.cells && self.labels == other.labels
    }
}

impl Eq for Fss {}

impl Fss {
    pub fn empty(poset: Arc<Poset>) -> Fss {
        Fss { poset, cells: BTreeMap::new(), labels: BTreeMap::new() }
    }

    /// Assembles a complex from raw parts without validating; call
    /// [`Fss::validate`] afterwards when the data is untrusted.
    pub fn from_parts(
        poset: Arc<Poset>,
        cells: BTreeMap<CellId, CellData>,
        labels: BTreeMap<CellId, PElem>,
    ) -> Fss {
        Fss { poset, cells, labels }
    }

    pub fn insert_vertex(&mut self, id: CellId, label: PElem) {
        self.cells.insert(id.clone(), CellData { dim: 0, faces: Vec::new() });
        self.labels.insert(id, label);
    }

    pub fn insert_cell(&mut self, id: CellId, faces: Vec<Sx>) {
        assert!(!faces.is_empty());
        self.cells.insert(id, CellData { dim: faces.len() - 1, faces });
    }

    /// Inserts raw cell data; 0-cells still need a label afterwards.
    pub fn insert_cell_raw(&mut self, id: CellId, data: CellData) {
        self.cells.insert(id, data);
    }

    pub fn remove_cell(&mut self, id: &CellId) {
        self.cells.remove(id);
        self.labels.remove(id);
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, id: &CellId) -> bool {
        self.cells.contains_key(id)
    }

    pub fn cell(&self, id: &CellId) -> &CellData {
        &self.cells[id]
    }

    pub fn get_cell(&self, id: &CellId) -> Option<&CellData> {
        self.cells.get(id)
    }

    pub fn dim_of(&self, id: &CellId) -> usize {
        self.cells[id].dim
    }

    pub fn sx_dim(&self, sx: &Sx) -> usize {
        self.dim_of(&sx.cell) + sx.word.len()
    }

    pub fn cell_ids(&self) -> impl Iterator<Item = &CellId> {
        self.cells.keys()
    }

    pub fn cells(&self) -> impl Iterator<Item = (&CellId, &CellData)> {
        self.cells.iter()
    }

    /// Cell ids of dimension `d`, in id order.
    pub fn cells_of_dim(&self, d: usize) -> Vec<CellId> {
        self.cells.iter().filter(|(_, c)| c.dim == d).map(|(id, _)| id.clone()).collect()
    }

    /// Dimension of the complex, or `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.cells.values().map(|c| c.dim).max()
    }

    pub fn label(&self, vertex: &CellId) -> PElem {
        self.labels[vertex]
    }

    pub fn get_label(&self, vertex: &CellId) -> Option<PElem> {
        self.labels.get(vertex).copied()
    }

    pub fn set_label(&mut self, vertex: CellId, p: PElem) {
        self.labels.insert(vertex, p);
    }

    pub fn labels(&self) -> &BTreeMap<CellId, PElem> {
        &self.labels
    }

    /// The `i`-th face of an abstract simplex, in normal form.
    pub fn face(&self, sx: &Sx, i: usize) -> Sx {
        let (w, residual) = sx.word.face(i);
        match residual {
            None => Sx { word: w, cell: sx.cell.clone() },
            Some(j) => {
                let f = &self.cells[&sx.cell].faces[j];
                Sx { word: w.then(&f.word), cell: f.cell.clone() }
            }
        }
    }

    pub fn degenerate(&self, sx: &Sx, j: usize) -> Sx {
        Sx { word: sx.word.degenerate(j), cell: sx.cell.clone() }
    }

    /// Applies a monotone map `alpha: [m] -> [n]` (given by its values) to an
    /// `n`-dimensional abstract simplex, producing the `m`-dimensional image.
    pub fn apply_monotone(&self, sx: &Sx, alpha: &[usize]) -> Sx {
        let n = self.sx_dim(sx);
        debug_assert!(alpha.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(alpha.iter().all(|&a| a <= n));
        // Peel one duplication: alpha = alpha' ∘ σ_i.
        if let Some(i) = alpha.windows(2).position(|w| w[0] == w[1]) {
            let mut inner = alpha.to_vec();
            inner.remove(i + 1);
            let img = self.apply_monotone(sx, &inner);
            return self.degenerate(&img, i);
        }
        // alpha injective: apply the missing faces from the top down.
        let present: BTreeSet<usize> = alpha.iter().copied().collect();
        let mut out = sx.clone();
        for i in (0..=n).rev() {
            if !present.contains(&i) {
                out = self.face(&out, i);
            }
        }
        out
    }

    /// The `i`-th vertex (0-cell) of an abstract simplex.
    pub fn vertex(&self, sx: &Sx, i: usize) -> CellId {
        let v = self.apply_monotone(sx, &[i]);
        debug_assert!(v.word.is_empty());
        v.cell
    }

    /// Vertex labels along the spine of a cell: its d-flag.
    pub fn flag_of(&self, id: &CellId) -> DFlag {
        let sx = Sx::of(id.clone());
        let n = self.dim_of(id);
        let entries: Vec<PElem> = (0..=n).map(|i| self.label(&self.vertex(&sx, i))).collect();
        DFlag::new(&self.poset, entries).expect("validated complexes carry monotone flags")
    }

    /// The stratum a cell belongs to: the maximum of its d-flag.
    pub fn stratum_of(&self, id: &CellId) -> PElem {
        self.flag_of(id).max_elem()
    }

    /// Checks all structural invariants and returns every violation found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (id, cell) in &self.cells {
            if cell.dim == 0 {
                if !cell.faces.is_empty() {
                    out.push(Violation { cell: id.clone(), message: "0-cell with faces".into() });
                }
                if !self.labels.contains_key(id) {
                    out.push(Violation { cell: id.clone(), message: "vertex without label".into() });
                }
                continue;
            }
            if cell.faces.len() != cell.dim + 1 {
                out.push(Violation {
                    cell: id.clone(),
                    message: format!("expected {} faces, found {}", cell.dim + 1, cell.faces.len()),
                });
                continue;
            }
            let mut ok = true;
            for (i, f) in cell.faces.iter().enumerate() {
                if !f.word.is_normal() {
                    out.push(Violation { cell: id.clone(), message: format!("face {i} word not in normal form") });
                    ok = false;
                    continue;
                }
                match self.cells.get(&f.cell) {
                    None => {
                        out.push(Violation { cell: id.clone(), message: format!("face {i} targets missing cell {}", f.cell) });
                        ok = false;
                    }
                    Some(t) => {
                        if t.dim + f.word.len() + 1 != cell.dim {
                            out.push(Violation { cell: id.clone(), message: format!("face {i} has wrong dimension") });
                            ok = false;
                        }
                    }
                }
            }
            if !ok {
                continue;
            }
            let sx = Sx::of(id.clone());
            // d_i d_j = d_{j-1} d_i for i < j; contentful from dimension 2 up
            for j in 1..=(if cell.dim >= 2 { cell.dim } else { 0 }) {
                for i in 0..j {
                    let a = self.face(&self.face(&sx, j), i);
                    let b = self.face(&self.face(&sx, i), j - 1);
                    if a != b {
                        out.push(Violation {
                            cell: id.clone(),
                            message: format!("simplicial identity d_{i} d_{j} = d_{} d_{i} fails", j - 1),
                        });
                    }
                }
            }
            if cell.dim == 1 {
                let v0 = self.vertex(&sx, 0);
                let v1 = self.vertex(&sx, 1);
                if let (Some(a), Some(b)) = (self.get_label(&v0), self.get_label(&v1)) {
                    if !self.poset.leq(a, b) {
                        out.push(Violation {
                            cell: id.clone(),
                            message: format!(
                                "edge not monotone: {} at {} > {} at {}",
                                self.poset.name(a),
                                v0,
                                self.poset.name(b),
                                v1
                            ),
                        });
                    }
                }
            }
        }
        out
    }

    /// The filtered simplicial subset on a face-closed set of cell ids.
    pub fn subset(&self, keep: &BTreeSet<CellId>) -> Result<Fss> {
        for id in keep {
            let cell = self.cells.get(id).ok_or_else(|| Error::Identifier(format!("unknown cell `{id}`")))?;
            for f in &cell.faces {
                if !keep.contains(&f.cell) {
                    return Err(Error::Closure { kept: id.to_string(), missing: f.cell.to_string() });
                }
            }
        }
        let cells = keep.iter().map(|id| (id.clone(), self.cells[id].clone())).collect();
        let labels = keep.iter().filter_map(|id| self.labels.get(id).map(|&p| (id.clone(), p))).collect();
        Ok(Fss { poset: self.poset.clone(), cells, labels })
    }

    /// Face closure of a set of cells.
    pub fn close_faces(&self, seed: impl IntoIterator<Item = CellId>) -> BTreeSet<CellId> {
        let mut keep: BTreeSet<CellId> = BTreeSet::new();
        let mut stack: Vec<CellId> = seed.into_iter().collect();
        while let Some(id) = stack.pop() {
            if keep.insert(id.clone()) {
                for f in &self.cells[&id].faces {
                    stack.push(f.cell.clone());
                }
            }
        }
        keep
    }

    /// The subcomplex of cells of dimension at most `d`.
    pub fn skeleton(&self, d: usize) -> Fss {
        let keep: BTreeSet<CellId> =
            self.cells.iter().filter(|(_, c)| c.dim <= d).map(|(id, _)| id.clone()).collect();
        self.subset(&keep).expect("skeleta are face-closed")
    }

    /// All nondegenerate iterated faces of a cell (including itself).
    pub fn face_closure(&self, id: &CellId) -> BTreeSet<CellId> {
        self.close_faces([id.clone()])
    }

    pub fn euler(&self) -> i64 {
        self.cells.values().map(|c| if c.dim % 2 == 0 { 1 } else { -1 }).sum()
    }

    /// Cell ids listed by descending dimension, then id order; the scan
    /// order every deterministic search in this crate uses.
    pub fn ids_desc(&self) -> Vec<CellId> {
        let mut ids: Vec<CellId> = self.cells.keys().cloned().collect();
        ids.sort_by(|a, b| self.cells[b].dim.cmp(&self.cells[a].dim).then_with(|| a.cmp(b)));
        ids
    }

    /// The full subcomplex spanned by a set of vertices: all cells whose
    /// vertices all lie in the set.
    pub fn full_subcomplex(&self, vertices: &BTreeSet<CellId>) -> Fss {
        let keep: BTreeSet<CellId> = self
            .cells
            .iter()
            .filter(|(id, cell)| {
                let sx = Sx::of((*id).clone());
                (0..=cell.dim).all(|i| vertices.contains(&self.vertex(&sx, i)))
            })
            .map(|(id, _)| id.clone())
            .collect();
        self.subset(&keep).expect("full subcomplexes are face-closed")
    }

    /// Renames every cell through the given bijection.
    pub fn rename(&self, f: &BTreeMap<CellId, CellId>) -> Result<Fss> {
        let lookup = |id: &CellId| -> CellId { f.get(id).cloned().unwrap_or_else(|| id.clone()) };
        let mut cells = BTreeMap::new();
        for (id, data) in &self.cells {
            let faces = data
                .faces
                .iter()
                .map(|s| Sx { word: s.word.clone(), cell: lookup(&s.cell) })
                .collect();
            if cells.insert(lookup(id), CellData { dim: data.dim, faces }).is_some() {
                return Err(Error::Identifier("rename is not injective".into()));
            }
        }
        let labels = self.labels.iter().map(|(id, &p)| (lookup(id), p)).collect();
        Ok(Fss { poset: self.poset.clone(), cells, labels })
    }
}

/// Builders for standard filtered simplices and their subcomplexes. Cells
/// are named after the vertex subsets they span: `"0"`, `"0.2"`, ...
pub mod simplex {
    use super::*;

    pub fn subset_id(vertices: &[usize]) -> CellId {
        CellId::new(vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("."))
    }

    /// The filtered standard simplex `Δ^J`.
    pub fn standard(poset: &Arc<Poset>, flag: &DFlag) -> Fss {
        let n = flag.dim();
        let mut x = Fss::empty(poset.clone());
        for vs in subsets(n) {
            let id = subset_id(&vs);
            if vs.len() == 1 {
                x.insert_vertex(id, flag.get(vs[0]));
            } else {
                let faces = (0..vs.len())
                    .map(|i| {
                        let mut w = vs.clone();
                        w.remove(i);
                        Sx::of(subset_id(&w))
                    })
                    .collect();
                x.insert_cell(id, faces);
            }
        }
        x
    }

    /// `∂Δ^J`: everything but the top cell.
    pub fn boundary(poset: &Arc<Poset>, flag: &DFlag) -> Fss {
        let full = standard(poset, flag);
        let top = subset_id(&(0..=flag.dim()).collect::<Vec<_>>());
        let keep: BTreeSet<CellId> = full.cell_ids().filter(|id| **id != top).cloned().collect();
        full.subset(&keep).expect("boundary is face-closed")
    }

    /// `Λ^J_k`: everything but the top cell and its `k`-th face.
    pub fn horn(poset: &Arc<Poset>, flag: &DFlag, k: usize) -> Fss {
        let full = standard(poset, flag);
        let top = subset_id(&(0..=flag.dim()).collect::<Vec<_>>());
        let mut missing: Vec<usize> = (0..=flag.dim()).collect();
        missing.remove(k);
        let gone = subset_id(&missing);
        let keep: BTreeSet<CellId> =
            full.cell_ids().filter(|id| **id != top && **id != gone).cloned().collect();
        full.subset(&keep).expect("horn is face-closed")
    }

    /// Nonempty subsets of `{0..=n}` in increasing size then lex order.
    pub fn subsets(n: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = (1u32..(1 << (n + 1)))
            .map(|mask| (0..=n).filter(|i| mask & (1 << i) != 0).collect())
            .collect();
        out.sort_by_key(|v: &Vec<usize>| (v.len(), v.clone()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::DFlag;

    fn chain2() -> Arc<Poset> {
        Poset::chain(2)
    }

    fn flag(p: &Arc<Poset>, names: &[&str]) -> DFlag {
        DFlag::parse(p, names).unwrap()
    }

    #[test]
    fn standard_simplex_validates() {
        let p = chain2();
        let x = simplex::standard(&p, &flag(&p, &["0", "1"]));
        assert!(x.validate().is_empty());
        assert_eq!(x.len(), 3);
        let x2 = simplex::standard(&p, &flag(&p, &["0", "0", "1"]));
        assert!(x2.validate().is_empty());
        assert_eq!(x2.len(), 7);
        assert_eq!(x2.euler(), 1);
    }

    #[test]
    fn reversed_edge_is_flagged() {
        let p = chain2();
        let mut x = Fss::empty(p.clone());
        x.insert_vertex("a".into(), p.elem("1").unwrap());
        x.insert_vertex("b".into(), p.elem("0").unwrap());
        x.insert_cell("e".into(), vec![Sx::of("b".into()), Sx::of("a".into())]);
        let violations = x.validate();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].message.contains("monotone"));
    }

    #[test]
    fn broken_identity_is_flagged() {
        let p = chain2();
        let mut x = Fss::empty(p.clone());
        for v in ["a", "b", "c"] {
            x.insert_vertex(v.into(), p.elem("0").unwrap());
        }
        x.insert_cell("ab".into(), vec![Sx::of("b".into()), Sx::of("a".into())]);
        x.insert_cell("ac".into(), vec![Sx::of("c".into()), Sx::of("a".into())]);
        x.insert_cell("bc".into(), vec![Sx::of("c".into()), Sx::of("b".into())]);
        // d_0 should target bc for the identities to close, not ac
        x.insert_cell("t".into(), vec![Sx::of("ac".into()), Sx::of("ac".into()), Sx::of("ab".into())]);
        assert!(x.validate().iter().any(|v| v.message.contains("simplicial identity")));
    }

    #[test]
    fn flag_of_reads_spine_labels() {
        let p = chain2();
        let x = simplex::standard(&p, &flag(&p, &["0", "0", "1"]));
        let f = x.flag_of(&simplex::subset_id(&[0, 1, 2]));
        assert_eq!(f.entries().iter().map(|e| p.name(*e)).collect::<Vec<_>>(), ["0", "0", "1"]);
        let v = x.flag_of(&simplex::subset_id(&[2]));
        assert_eq!(v.entries().len(), 1);
    }

    #[test]
    fn subset_requires_face_closure() {
        let p = chain2();
        let x = simplex::standard(&p, &flag(&p, &["0", "1"]));
        let mut keep: BTreeSet<CellId> = x.cell_ids().cloned().collect();
        let copy = x.subset(&keep).unwrap();
        assert_eq!(copy, x);
        keep.remove(&simplex::subset_id(&[0]));
        assert!(matches!(x.subset(&keep), Err(Error::Closure { .. })));
    }

    #[test]
    fn horn_drops_two_cells() {
        let p = chain2();
        let j = flag(&p, &["0", "0", "1"]);
        let horn = simplex::horn(&p, &j, 0);
        assert_eq!(horn.len(), 5);
        assert!(horn.validate().is_empty());
    }

    #[test]
    fn apply_monotone_degenerates_and_faces() {
        let p = chain2();
        let x = simplex::standard(&p, &flag(&p, &["0", "1"]));
        let top = Sx::of(simplex::subset_id(&[0, 1]));
        // s_0 then d_0 returns the original edge
        let deg = x.degenerate(&top, 0);
        assert_eq!(x.face(&deg, 0), top);
        // the constant-0 degenerate edge over vertex 0
        let v = x.apply_monotone(&top, &[0, 0]);
        assert_eq!(v.cell, simplex::subset_id(&[0]));
        assert_eq!(v.word.len(), 1);
    }
}
