//! Compiles the guide's code blocks as doc-tests, since mdbook cannot link
//! them against the workspace crates.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/observations.md")]
pub mod observations {}
#[doc = include_str!("../../../book/src/scoring.md")]
pub mod scoring {}
#[doc = include_str!("../../../book/src/speech.md")]
pub mod speech {}
#[doc = include_str!("../../../book/src/streaming.md")]
pub mod streaming {}
#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}
#[doc = include_str!("../../../book/src/synthetic.md")]
pub mod synthetic {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
