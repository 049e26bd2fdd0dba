//! Finite posets, flags and d-flags.
//!
//! Every filtration in this crate is indexed by a finite partially ordered
//! set. Elements are kept as opaque names; the order relation is closed
//! under reflexivity and transitivity when the poset is built, so input
//! files may list only a covering relation.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of an element inside its [`Poset`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PElem(pub u32);

impl PElem {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// A finite partially ordered set with named elements.
#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    names: Vec<String>,
    index: BTreeMap<String, PElem>,
    // leq[a][b] == true iff a <= b, after reflexive-transitive closure
    leq: Vec<Vec<bool>>,
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poset{{{}}}", self.names.join(","))
    }
}

impl Poset {
    /// Builds a poset from element names and a list of `(a, b)` pairs meaning
    /// `a <= b`. The pairs may be a covering relation; the reflexive
    /// transitive closure is computed here. Fails on unknown names,
    /// duplicate elements, or a relation that closes to a cycle.
    pub fn new<S: AsRef<str>>(elements: &[S], pairs: &[(S, S)]) -> Result<Arc<Poset>> {
        let mut names = Vec::with_capacity(elements.len());
        let mut index = BTreeMap::new();
        for (i, e) in elements.iter().enumerate() {
            let name = e.as_ref().to_owned();
            if index.insert(name.clone(), PElem(i as u32)).is_some() {
                return Err(Error::Poset(format!("duplicate element `{name}`")));
            }
            names.push(name);
        }
        let n = names.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            let a = *index
                .get(a.as_ref())
                .ok_or_else(|| Error::Poset(format!("unknown element `{}`", a.as_ref())))?;
            let b = *index
                .get(b.as_ref())
                .ok_or_else(|| Error::Poset(format!("unknown element `{}`", b.as_ref())))?;
            leq[a.idx()][b.idx()] = true;
        }
        // Floyd-Warshall closure.
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::Poset(format!(
                        "relation closes to a cycle through `{}` and `{}`",
                        names[i], names[j]
                    )));
                }
            }
        }
        Ok(Arc::new(Poset { names, index, leq }))
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Arc<Poset> {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let pairs: Vec<(String, String)> = (1..n).map(|i| ((i - 1).to_string(), i.to_string())).collect();
        Poset::new(&names, &pairs).expect("chain is a poset")
    }

    /// `n` pairwise incomparable elements.
    pub fn antichain(n: usize) -> Arc<Poset> {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Poset::new(&names, &[]).expect("antichain is a poset")
    }

    /// The one-point poset, used for unfiltered simplicial sets.
    pub fn point() -> Arc<Poset> {
        Poset::chain(1)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = PElem> + '_ {
        (0..self.names.len() as u32).map(PElem)
    }

    pub fn name(&self, e: PElem) -> &str {
        &self.names[e.idx()]
    }

    pub fn elem(&self, name: &str) -> Result<PElem> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Poset(format!("unknown element `{name}`")))
    }

    pub fn leq(&self, a: PElem, b: PElem) -> bool {
        self.leq[a.idx()][b.idx()]
    }

    pub fn lt(&self, a: PElem, b: PElem) -> bool {
        a != b && self.leq(a, b)
    }

    /// All strict pairs `a < b`, sorted; the canonical serialized relation.
    pub fn strict_pairs(&self) -> Vec<(PElem, PElem)> {
        let mut out = Vec::new();
        for a in self.elements() {
            for b in self.elements() {
                if self.lt(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// True iff `seq` is weakly increasing, i.e. a valid d-flag.
    pub fn is_dflag(&self, seq: &[PElem]) -> bool {
        seq.windows(2).all(|w| self.leq(w[0], w[1]))
    }

    /// Maximum of a nonempty weakly increasing sequence: its last entry.
    pub fn dflag_max(&self, seq: &[PElem]) -> PElem {
        *seq.last().expect("nonempty d-flag")
    }
}

/// A strictly increasing sequence of poset elements.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Flag(Vec<PElem>);

impl Flag {
    pub fn new(poset: &Poset, entries: Vec<PElem>) -> Result<Flag> {
        if !entries.windows(2).all(|w| poset.lt(w[0], w[1])) {
            return Err(Error::Poset("flag entries must strictly increase".into()));
        }
        Ok(Flag(entries))
    }

    pub fn entries(&self) -> &[PElem] {
        &self.0
    }
}

/// A weakly increasing sequence of poset elements; the stratification datum
/// of a simplex. A d-flag of length `n + 1` belongs to an `n`-simplex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DFlag(Vec<PElem>);

impl fmt::Debug for DFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().map(|e| e.0.to_string()).collect::<Vec<_>>().join(","))
    }
}

impl DFlag {
    pub fn new(poset: &Poset, entries: Vec<PElem>) -> Result<DFlag> {
        if entries.is_empty() {
            return Err(Error::Poset("d-flag may not be empty".into()));
        }
        if !poset.is_dflag(&entries) {
            return Err(Error::Poset("d-flag entries must weakly increase".into()));
        }
        Ok(DFlag(entries))
    }

    /// Builds a d-flag from element names.
    pub fn parse<S: AsRef<str>>(poset: &Poset, names: &[S]) -> Result<DFlag> {
        let entries = names.iter().map(|s| poset.elem(s.as_ref())).collect::<Result<Vec<_>>>()?;
        DFlag::new(poset, entries)
    }

    pub fn entries(&self) -> &[PElem] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dimension of the simplex carrying this d-flag.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn get(&self, i: usize) -> PElem {
        self.0[i]
    }

    pub fn max_elem(&self) -> PElem {
        *self.0.last().expect("d-flags are nonempty")
    }

    /// The flag this d-flag degenerates from: duplicates removed, order kept.
    pub fn nondegenerate_core(&self) -> Flag {
        let mut out: Vec<PElem> = Vec::new();
        for &e in &self.0 {
            if out.last() != Some(&e) {
                out.push(e);
            }
        }
        Flag(out)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1])
    }
}

/// Enumerates all d-flags over `poset` with length in `1..=max_len`.
pub fn all_dflags(poset: &Poset, max_len: usize) -> Vec<DFlag> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<PElem>> = poset.elements().map(|e| vec![e]).collect();
    while let Some(cur) = stack.pop() {
        if cur.len() <= max_len {
            out.push(DFlag(cur.clone()));
            if cur.len() < max_len {
                let last = *cur.last().unwrap();
                for e in poset.elements() {
                    if poset.leq(last, e) {
                        let mut next = cur.clone();
                        next.push(e);
                        stack.push(next);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Enumerates every partial order on `n` named elements `0..n`, as posets.
/// Intended for exhaustive small-scale tests (`n <= 3`).
pub fn all_posets(n: usize) -> Vec<Arc<Poset>> {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut out = Vec::new();
    let off_diag: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| i != j).collect();
    let m = off_diag.len();
    'mask: for mask in 0u32..(1 << m) {
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for (bit, &(i, j)) in off_diag.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                rel[i][j] = true;
            }
        }
        // keep only relations that are already transitive and antisymmetric
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if rel[i][j] && rel[j][k] && !rel[i][k] {
                        continue 'mask;
                    }
                }
                if i != j && rel[i][j] && rel[j][i] {
                    continue 'mask;
                }
            }
        }
        let pairs: Vec<(String, String)> = off_diag
            .iter()
            .filter(|&&(i, j)| rel[i][j])
            .map(|&(i, j)| (names[i].clone(), names[j].clone()))
            .collect();
        out.push(Poset::new(&names, &pairs).expect("checked partial order"));
    }
    out
}
