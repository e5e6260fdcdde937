//! Skeletons of random 0/1-polytopes: hypercube combinatorics, an exact
//! rational LP solver, skeleton graphs, multicommodity-flow bounds on edge
//! expansion and exact Cheeger constants for small instances.

pub mod cube;
pub mod error;
pub mod expansion;
pub mod lp;
pub mod rng;
pub mod flow;
pub mod lab;
pub mod verify;
pub mod skeleton;

pub use cube::Vertex;
pub use error::{Error, Result};
pub use skeleton::{Method, SkeletonGraph, VertexSet};
