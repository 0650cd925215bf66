//! Kernels in orientations of line multigraphs, computed through stable
//! matchings of the root, with exact-rational tools for the fractional
//! kernel and stable matching polytopes: vertex enumeration, integrality,
//! bounded total-dual-integrality checks, and Fourier–Motzkin elimination.

pub mod bridge;
pub mod corpus;
pub mod error;
pub mod gadget;
pub mod graph;
pub mod oracles;
pub mod point;
pub mod polyhedra;
pub mod prefs;
pub mod rational;
pub mod stable;

pub use error::{Budget, Error, Result};
pub use graph::{Digraph, Multigraph};
pub use point::FractionalPoint;
pub use polyhedra::LinearSystem;
pub use prefs::PreferenceSystem;
pub use rational::Rational;
