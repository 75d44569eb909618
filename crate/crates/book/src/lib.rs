//! The guide in `book/` as doc-tests: each chapter is attached to a module
//! so `cargo test -p revlab-book` runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/pebbling.md")]
pub mod pebbling {}
#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}
#[doc = include_str!("../../../book/src/oracles.md")]
pub mod oracles {}
#[doc = include_str!("../../../book/src/analysis.md")]
pub mod analysis {}
#[doc = include_str!("../../../book/src/incompressibility.md")]
pub mod incompressibility {}
#[doc = include_str!("../../../book/src/euler-tour.md")]
pub mod euler_tour {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
