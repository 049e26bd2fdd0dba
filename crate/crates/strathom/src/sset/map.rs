//! Stratum preserving simplicial maps, given by cell assignments.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{CellId, DegWord, Fss, Sx};
use crate::error::{Error, Result};

/// A map of filtered simplicial sets. Each nondegenerate source cell is sent
/// to an abstract simplex of the target; the assignment must commute with
/// faces and preserve vertex labels on the nose.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    pub src: Arc<Fss>,
    pub dst: Arc<Fss>,
    assign: BTreeMap<CellId, Sx>,
}

impl SimplicialMap {
    /// Builds and checks a map from a full cell assignment.
    pub fn new(src: Arc<Fss>, dst: Arc<Fss>, assign: BTreeMap<CellId, Sx>) -> Result<SimplicialMap> {
        let m = SimplicialMap { src, dst, assign };
        m.check()?;
        Ok(m)
    }

    /// Builds a map from a vertex assignment alone; higher cells must map to
    /// the simplex spanned by their vertex images, which is only well defined
    /// when the target determines cells by vertex sequences (FOS targets).
    /// Fails otherwise.
    pub fn from_vertex_map(
        src: Arc<Fss>,
        dst: Arc<Fss>,
        vertices: &BTreeMap<CellId, CellId>,
    ) -> Result<SimplicialMap> {
        let mut by_spine: BTreeMap<Vec<CellId>, CellId> = BTreeMap::new();
        for (id, data) in dst.cells() {
            let sx = Sx::of(id.clone());
            let spine: Vec<CellId> = (0..=data.dim).map(|i| dst.vertex(&sx, i)).collect();
            if by_spine.insert(spine, id.clone()).is_some() {
                return Err(Error::Map("target does not determine cells by vertices".into()));
            }
        }
        let mut assign = BTreeMap::new();
        for (id, data) in src.cells() {
            let sx = Sx::of(id.clone());
            let image_spine: Vec<CellId> = (0..=data.dim)
                .map(|i| {
                    let v = src.vertex(&sx, i);
                    vertices
                        .get(&v)
                        .cloned()
                        .ok_or_else(|| Error::Map(format!("vertex `{v}` has no image")))
                })
                .collect::<Result<_>>()?;
            // split the image spine into its nondegenerate core and the word
            let mut core: Vec<CellId> = Vec::new();
            let mut word: Vec<u32> = Vec::new();
            for (i, v) in image_spine.iter().enumerate() {
                if core.last() == Some(v) {
                    word.push(i as u32 - 1);
                } else {
                    core.push(v.clone());
                }
            }
            word.reverse();
            let target = by_spine
                .get(&core)
                .cloned()
                .ok_or_else(|| Error::Map(format!("no target cell spans the image of `{id}`")))?;
            assign.insert(id.clone(), Sx { word: DegWord::new(word), cell: target });
        }
        SimplicialMap::new(src, dst, assign)
    }

    /// The identity on `x`.
    pub fn identity(x: Arc<Fss>) -> SimplicialMap {
        let assign = x.cell_ids().map(|id| (id.clone(), Sx::of(id.clone()))).collect();
        SimplicialMap { src: x.clone(), dst: x, assign }
    }

    /// Inclusion of a subcomplex; every cell of `sub` must exist in `sup`.
    pub fn inclusion(sub: Arc<Fss>, sup: Arc<Fss>) -> Result<SimplicialMap> {
        for id in sub.cell_ids() {
            if !sup.contains(id) {
                return Err(Error::Map(format!("`{id}` is not a cell of the target")));
            }
        }
        let assign = sub.cell_ids().map(|id| (id.clone(), Sx::of(id.clone()))).collect();
        SimplicialMap::new(sub, sup, assign)
    }

    fn check(&self) -> Result<()> {
        for (id, data) in self.src.cells() {
            let img = self
                .assign
                .get(id)
                .ok_or_else(|| Error::Map(format!("cell `{id}` has no image")))?;
            if !self.dst.contains(&img.cell) {
                return Err(Error::Map(format!("image of `{id}` targets missing cell {}", img.cell)));
            }
            if self.dst.sx_dim(img) != data.dim {
                return Err(Error::Map(format!("image of `{id}` has wrong dimension")));
            }
            if data.dim == 0 {
                let got = self.dst.label(&img.cell);
                let want = self.src.label(id);
                if self.src.poset.name(want) != self.dst.poset.name(got) {
                    return Err(Error::Map(format!(
                        "label of `{id}` not preserved: {} vs {}",
                        self.src.poset.name(want),
                        self.dst.poset.name(got)
                    )));
                }
            }
            if data.dim > 0 {
                for i in 0..=data.dim {
                    let lhs = self.apply(&self.src.face(&Sx::of(id.clone()), i));
                    let rhs = self.dst.face(img, i);
                    if lhs != rhs {
                        return Err(Error::Map(format!("assignment does not commute with d_{i} at `{id}`")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn image_of(&self, id: &CellId) -> &Sx {
        &self.assign[id]
    }

    pub fn assignment(&self) -> &BTreeMap<CellId, Sx> {
        &self.assign
    }

    /// Image of an abstract simplex.
    pub fn apply(&self, sx: &Sx) -> Sx {
        let img = &self.assign[&sx.cell];
        Sx { word: sx.word.then(&img.word), cell: img.cell.clone() }
    }

    /// `other ∘ self`; the target of `self` must be the source of `other`.
    pub fn then(&self, other: &SimplicialMap) -> Result<SimplicialMap> {
        if !Arc::ptr_eq(&self.dst, &other.src) && *self.dst != *other.src {
            return Err(Error::Map("composition mismatch: target differs from source".into()));
        }
        let assign = self
            .assign
            .iter()
            .map(|(id, sx)| (id.clone(), other.apply(sx)))
            .collect();
        Ok(SimplicialMap { src: self.src.clone(), dst: other.dst.clone(), assign })
    }

    /// True iff the map is injective on cells with empty words: the shape of
    /// every cofibration in this crate.
    pub fn is_injective_on_cells(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.assign.values().all(|sx| sx.word.is_empty() && seen.insert(sx.cell.clone()))
    }

    /// True iff bijective on cells with empty words.
    pub fn is_isomorphism(&self) -> bool {
        self.is_injective_on_cells() && self.assign.len() == self.dst.len()
    }
}
