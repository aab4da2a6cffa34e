//! Pricing approximation, induced-matching solvers and the reduction chain
//! from constraint satisfaction to hypergraph pricing.
//!
//! Every object here is small enough to be checked exhaustively. The
//! brute-force oracles in [`graphs`], [`csp`] and [`pricing`] refuse inputs
//! above their caps instead of truncating, so every reported value is exact.

pub mod caps;
pub mod csp;
pub mod disperser;
pub mod error;
pub mod fglss;
pub mod graphs;
pub mod lp;
pub mod matching;
pub mod pricing;
pub mod rational;
pub mod reduction;
pub mod seed;

pub use caps::Caps;
pub use error::{Error, Result};
pub use graphs::{BipartiteGraph, Graph, Matching, VertexOrder};
pub use rational::Rational;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
