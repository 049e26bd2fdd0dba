//! The guide's chapters, pulled in as doc comments so every code sample
//! in `book/` compiles and runs under `cargo test --doc`. Failures name
//! the chapter module they came from.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/complexes.md")]
pub mod complexes {}

#[doc = include_str!("../../../book/src/moves.md")]
pub mod moves {}

#[doc = include_str!("../../../book/src/certificates.md")]
pub mod certificates {}

#[doc = include_str!("../../../book/src/subdivision.md")]
pub mod subdivision {}

#[doc = include_str!("../../../book/src/cylinders.md")]
pub mod cylinders {}

#[doc = include_str!("../../../book/src/fos.md")]
pub mod fos {}

#[doc = include_str!("../../../book/src/pipeline.md")]
pub mod pipeline {}
