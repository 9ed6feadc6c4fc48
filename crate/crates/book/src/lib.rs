//! The guide's Rust snippets, compiled and run as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/instances.md")]
pub mod instances {}

#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}

#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}

#[doc = include_str!("../../../book/src/halving.md")]
pub mod halving {}

#[doc = include_str!("../../../book/src/rayshoot.md")]
pub mod rayshoot {}

#[doc = include_str!("../../../book/src/induced.md")]
pub mod induced {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
