//! Degeneracy operator words in Eilenberg-Zilber normal form.
//!
//! A possibly degenerate simplex is written uniquely as
//! `s_{u_1} s_{u_2} ... s_{u_r} (base)` with `u_1 > u_2 > ... > u_r` and
//! `base` nondegenerate. The word `[u_1, ..., u_r]` is also the set of
//! positions `i` at which the underlying monotone surjection repeats.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegWord(Vec<u32>);

impl fmt::Debug for DegWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{:?}", self.0)
    }
}

impl DegWord {
    pub fn empty() -> DegWord {
        DegWord(Vec::new())
    }

    /// Builds a word from indices, which must be strictly decreasing.
    pub fn new(indices: Vec<u32>) -> DegWord {
        assert!(indices.windows(2).all(|w| w[0] > w[1]), "degeneracy word must strictly decrease");
        DegWord(indices)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(&(i as u32))
    }

    /// Checks the strictly-decreasing invariant on externally loaded data.
    pub fn is_normal(&self) -> bool {
        self.0.windows(2).all(|w| w[0] > w[1])
    }

    /// `d_i` pushed through the word. Returns the renormalized word together
    /// with the residual face index hitting the base, or `None` when `d_i`
    /// is absorbed by a degeneracy (`d_i s_i = d_i s_{i-1}  = id`).
    pub fn face(&self, i: usize) -> (DegWord, Option<usize>) {
        let mut out = Vec::with_capacity(self.0.len());
        let mut cur = i as u32;
        for (t, &u) in self.0.iter().enumerate() {
            if cur < u {
                out.push(u - 1);
            } else if cur == u || cur == u + 1 {
                out.extend_from_slice(&self.0[t + 1..]);
                return (DegWord(out), None);
            } else {
                out.push(u);
                cur -= 1;
            }
        }
        (DegWord(out), Some(cur as usize))
    }

    /// `s_j` composed on the outside: the normal form of `s_j ∘ self`.
    pub fn degenerate(&self, j: usize) -> DegWord {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        let mut j = j as u32;
        let _ = &mut j;
        let mut placed = false;
        for &u in &self.0 {
            if placed {
                out.push(u);
            } else if j > u {
                out.push(j);
                out.push(u);
                placed = true;
            } else {
                // s_j s_u = s_{u+1} s_j for j <= u
                out.push(u + 1);
            }
        }
        if !placed {
            out.push(j);
        }
        DegWord(out)
    }

    /// Normal form of `self ∘ inner` (self applied outside).
    pub fn then(&self, inner: &DegWord) -> DegWord {
        let mut acc = inner.clone();
        for &j in self.0.iter().rev() {
            acc = acc.degenerate(j as usize);
        }
        acc
    }
}
