//! Labelled point clouds and the filtered Vietoris-Rips front end.
//!
//! Input points carry a poset label; the complex at scale `eps` is the
//! flag complex of the neighborhood graph (diameter criterion, ties
//! included), with vertices ordered ascending by label and then by input
//! index so that lower strata always come first inside every simplex.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poset::{PElem, Poset};
use crate::sset::{CellId, Fss, Sx};

#[derive(Clone, Debug)]
pub struct LabeledPointCloud {
    pub poset: Arc<Poset>,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<PElem>,
}

impl LabeledPointCloud {
    pub fn new(poset: Arc<Poset>, points: Vec<Vec<f64>>, labels: Vec<PElem>) -> Result<LabeledPointCloud> {
        if points.len() != labels.len() {
            return Err(Error::Input("one label per point required".into()));
        }
        if let Some(first) = points.first() {
            if points.iter().any(|p| p.len() != first.len()) {
                return Err(Error::Input("inconsistent point dimensions".into()));
            }
        }
        Ok(LabeledPointCloud { poset, points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Parses a CSV file: numeric coordinate columns followed by a final
/// `label` column. A header row naming the label column is optional.
pub fn parse_points(poset: &Arc<Poset>, text: &str) -> Result<LabeledPointCloud> {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if lineno == 0 && fields.last() == Some(&"label") {
            continue; // header
        }
        if fields.len() < 2 {
            return Err(Error::Input(format!("line {}: need coordinates and a label", lineno + 1)));
        }
        let (coords, label) = fields.split_at(fields.len() - 1);
        let point = coords
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::Input(format!("line {}: bad coordinate `{c}`", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        points.push(point);
        labels.push(
            poset
                .elem(label[0])
                .map_err(|_| Error::Input(format!("line {}: unknown label `{}`", lineno + 1, label[0])))?,
        );
    }
    LabeledPointCloud::new(poset.clone(), points, labels)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn vertex_id(i: usize) -> CellId {
    CellId::new(format!("p{i}"))
}

fn simplex_id(vs: &[usize]) -> CellId {
    if vs.len() == 1 {
        vertex_id(vs[0])
    } else {
        CellId::new(vs.iter().map(|v| format!("p{v}")).collect::<Vec<_>>().join("-"))
    }
}

/// The filtered Vietoris-Rips complex at scale `eps`: all subsets of
/// diameter at most `eps`, up to `max_dim`. The result is always an FOS
/// complex; `threads` bounds the workers for the neighborhood graph.
pub fn vietoris_rips(
    cloud: &LabeledPointCloud,
    eps: f64,
    max_dim: usize,
    threads: usize,
) -> Result<Fss> {
    if eps <= 0.0 {
        return Err(Error::Parameter("eps must be positive".into()));
    }
    let n = cloud.len();
    // vertex order: ascending label, then input index
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (cloud.labels[a], cloud.labels[b]);
        let rank = |p: PElem| {
            // linear extension: count strict predecessors, then index
            (cloud.poset.elements().filter(|&q| cloud.poset.lt(q, p)).count(), p.0)
        };
        rank(la).cmp(&rank(lb)).then(a.cmp(&b))
    });
    // neighborhood graph on the ordered points
    let eps2 = eps * eps;
    let adjacent = {
        let workers = threads.max(1).min(n.max(1));
        let mut adjacency = vec![vec![false; n]; n];
        if workers <= 1 || n < 64 {
            for i in 0..n {
                for j in i + 1..n {
                    if dist2(&cloud.points[order[i]], &cloud.points[order[j]]) <= eps2 {
                        adjacency[i][j] = true;
                    }
                }
            }
        } else {
            let rows: Vec<Vec<bool>> = std::thread::scope(|scope| {
                let handles: Vec<_> = (0..workers)
                    .map(|w| {
                        let order = &order;
                        let cloud = &cloud;
                        scope.spawn(move || {
                            let mut out = Vec::new();
                            for i in (w..n).step_by(workers) {
                                let mut row = vec![false; n];
                                for (j, slot) in row.iter_mut().enumerate().skip(i + 1) {
                                    if dist2(&cloud.points[order[i]], &cloud.points[order[j]]) <= eps2 {
                                        *slot = true;
                                    }
                                }
                                out.push((i, row));
                            }
                            out
                        })
                    })
                    .collect();
                let mut rows = vec![Vec::new(); n];
                for h in handles {
                    for (i, row) in h.join().expect("worker panicked") {
                        rows[i] = row;
                    }
                }
                rows
            });
            adjacency = rows;
        }
        adjacency
    };
    // flag expansion: grow cliques in order
    let mut cliques: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut at = 0;
    while at < cliques.len() {
        let clique = cliques[at].clone();
        at += 1;
        if clique.len() > max_dim {
            continue;
        }
        let last = *clique.last().unwrap();
        for next in last + 1..n {
            if clique.iter().all(|&v| adjacent[v.min(next)][v.max(next)]) {
                let mut bigger = clique.clone();
                bigger.push(next);
                cliques.push(bigger);
            }
        }
    }
    cliques.sort_by_key(|c| (c.len(), c.clone()));
    // check monotonicity of labels along the order inside each clique
    let mut out = Fss::empty(cloud.poset.clone());
    for clique in &cliques {
        for w in clique.windows(2) {
            let (a, b) = (cloud.labels[order[w[0]]], cloud.labels[order[w[1]]]);
            if !cloud.poset.leq(a, b) {
                return Err(Error::Input(format!(
                    "labels `{}` and `{}` are incomparable within one simplex",
                    cloud.poset.name(a),
                    cloud.poset.name(b)
                )));
            }
        }
        // name cells by the original input indices, in simplex order
        let named: Vec<usize> = clique.iter().map(|&i| order[i]).collect();
        let id = simplex_id(&named);
        if clique.len() == 1 {
            out.insert_vertex(id, cloud.labels[named[0]]);
        } else {
            let faces = (0..clique.len())
                .map(|i| {
                    let mut sub = named.clone();
                    sub.remove(i);
                    Sx::of(simplex_id(&sub))
                })
                .collect();
            out.insert_cell(id, faces);
        }
    }
    debug_assert!(out.validate().is_empty());
    Ok(out)
}

/// Cloud restricted to the points labelled exactly `p`, keeping indices.
pub fn subcloud(cloud: &LabeledPointCloud, p: PElem) -> LabeledPointCloud {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (pt, &l) in cloud.points.iter().zip(&cloud.labels) {
        if l == p {
            points.push(pt.clone());
            labels.push(l);
        }
    }
    LabeledPointCloud { poset: cloud.poset.clone(), points, labels }
}
