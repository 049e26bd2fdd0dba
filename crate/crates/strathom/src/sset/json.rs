//! The `.fss.json` file format and its map companion.
//!
//! ```json
//! {
//!   "poset": {"elements": ["0","1"], "leq": [["0","1"]]},
//!   "cells": [{"id": "e", "dim": 1, "faces": [[[], "b"], [[], "a"]]}],
//!   "vertex_label": {"a": "0", "b": "1"}
//! }
//! ```
//!
//! Serialization is canonical: elements keep their declared order, `leq`
//! lists all strict pairs sorted, cells are sorted by (dim, id). A
//! parse/serialize round trip reproduces the canonical bytes exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{CellData, CellId, DegWord, Fss, SimplicialMap, Sx};
use crate::error::{Error, Result};
use crate::poset::Poset;

#[derive(Serialize, Deserialize)]
struct PosetJson {
    elements: Vec<String>,
    leq: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct CellJson {
    id: CellId,
    dim: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    faces: Vec<(Vec<u32>, CellId)>,
}

#[derive(Serialize, Deserialize)]
struct FssJson {
    poset: PosetJson,
    cells: Vec<CellJson>,
    vertex_label: BTreeMap<CellId, String>,
}

#[derive(Serialize, Deserialize)]
struct MapJson {
    assign: BTreeMap<CellId, (Vec<u32>, CellId)>,
}

pub fn poset_to_json(p: &Poset) -> serde_json::Value {
    let elements: Vec<String> = p.elements().map(|e| p.name(e).to_owned()).collect();
    let leq: Vec<(String, String)> =
        p.strict_pairs().iter().map(|&(a, b)| (p.name(a).to_owned(), p.name(b).to_owned())).collect();
    serde_json::to_value(PosetJson { elements, leq }).expect("poset serializes")
}

pub fn poset_from_json(v: &serde_json::Value) -> Result<Arc<Poset>> {
    let pj: PosetJson = serde_json::from_value(v.clone())?;
    Poset::new(&pj.elements, &pj.leq)
}

impl Fss {
    pub fn to_json(&self) -> serde_json::Value {
        let mut cells: Vec<CellJson> = self
            .cells()
            .map(|(id, data)| CellJson {
                id: id.clone(),
                dim: data.dim,
                faces: data.faces.iter().map(|f| (f.word.indices().to_vec(), f.cell.clone())).collect(),
            })
            .collect();
        cells.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.id.cmp(&b.id)));
        let vertex_label: BTreeMap<CellId, String> = self
            .labels()
            .iter()
            .map(|(id, &p)| (id.clone(), self.poset.name(p).to_owned()))
            .collect();
        serde_json::json!({
            "poset": poset_to_json(&self.poset),
            "cells": cells,
            "vertex_label": vertex_label,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("complex serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Fss> {
        let fj: FssJson = serde_json::from_value(v.clone())?;
        let poset = Poset::new(&fj.poset.elements, &fj.poset.leq)?;
        let mut cells = BTreeMap::new();
        for c in fj.cells {
            if c.dim > 0 && c.faces.len() != c.dim + 1 {
                return Err(Error::Input(format!("cell `{}`: wrong face count", c.id)));
            }
            let faces = c
                .faces
                .into_iter()
                .map(|(w, t)| {
                    let word = DegWord::new_checked(w)
                        .ok_or_else(|| Error::Input("degeneracy word not strictly decreasing".into()))?;
                    Ok(Sx { word, cell: t })
                })
                .collect::<Result<Vec<_>>>()?;
            cells.insert(c.id, CellData { dim: c.dim, faces });
        }
        let mut labels = BTreeMap::new();
        for (id, name) in fj.vertex_label {
            labels.insert(id, poset.elem(&name)?);
        }
        Ok(Fss::from_parts(poset, cells, labels))
    }

    pub fn from_json_str(s: &str) -> Result<Fss> {
        Fss::from_json(&serde_json::from_str(s)?)
    }
}

impl SimplicialMap {
    pub fn assignment_to_json(&self) -> serde_json::Value {
        let assign: BTreeMap<CellId, (Vec<u32>, CellId)> = self
            .assignment()
            .iter()
            .map(|(id, sx)| (id.clone(), (sx.word.indices().to_vec(), sx.cell.clone())))
            .collect();
        serde_json::to_value(MapJson { assign }).expect("map serializes")
    }

    pub fn from_assignment_json(
        src: Arc<Fss>,
        dst: Arc<Fss>,
        v: &serde_json::Value,
    ) -> Result<SimplicialMap> {
        let mj: MapJson = serde_json::from_value(v.clone())?;
        let assign = mj
            .assign
            .into_iter()
            .map(|(id, (w, t))| {
                let word = DegWord::new_checked(w)
                    .ok_or_else(|| Error::Input("degeneracy word not strictly decreasing".into()))?;
                Ok((id, Sx { word, cell: t }))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        SimplicialMap::new(src, dst, assign)
    }
}

impl DegWord {
    fn new_checked(indices: Vec<u32>) -> Option<DegWord> {
        if indices.windows(2).all(|w| w[0] > w[1]) {
            Some(DegWord::new(indices))
        } else {
            None
        }
    }
}
