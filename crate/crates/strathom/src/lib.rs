//! Stratified simple homotopy for finite filtered simplicial sets.
//!
//! The crate provides validated filtered simplicial sets over a finite
//! poset, elementary expansion and collapse moves, certificate-based
//! filtered strong anodyne extensions, the two subdivision functors with
//! their last-vertex maps, mapping cylinders, conversion to filtered
//! ordered simplicial complexes, and a greedy stratified collapse reducer
//! whose output is a replayable deformation certificate. A Vietoris-Rips
//! front end turns labelled point clouds into filtered complexes.

pub mod canonical;
pub mod cylinder;
pub mod error;
pub mod fos;
pub mod homology;
pub mod iso;
pub mod moves;
pub mod pairing;
pub mod poset;
pub mod reduce;
pub mod sset;
pub mod subdivision;
pub mod tda;

pub use error::{Error, Result};

#[cfg(doctest)]
pub mod book;
