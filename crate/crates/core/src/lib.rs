//! Matroid oracles and a packing engine for disjoint rainbow bases.
//!
//! The crate is layered bottom-up:
//!
//! - [`matroid`]: independence oracles for uniform, linear, graphic and sparse paving matroids.
//! - [`rainbow`]: coloured universes, rainbow independent sets, collections and signatures.
//! - [`exchange`]: roots, addable/swappable elements, transitions, exchange injections and cyclic exchanges.
//! - [`cascade`]: root cascades, good-root transforms and the hill-climbing packer.
//! - [`oracle`]: brute-force ground truth and property harnesses at tiny scale.
//! - [`workbench`]: instance files, generators, bound arithmetic and reports.

pub mod bitset;
pub mod matroid;
pub mod rainbow;
pub mod exchange;
pub mod cascade;
pub mod oracle;
pub mod workbench;
