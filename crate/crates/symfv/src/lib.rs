//! Exact f-vector classification and synthesis for 3-polytopes that are
//! symmetric under a finite group of rotations or rotary reflections.
//!
//! The crate is layered bottom-up:
//!
//! * [`scalar`] — exact arithmetic in embedded real number fields `Q(θ)`;
//! * [`linalg`] — 3-vectors and 3×3 matrices over those fields;
//! * [`group`] — the finite orthogonal group families and their ray orbits;
//! * [`hull`] — exact convex hulls with maximal (merged) facets;
//! * [`polytope`] — symmetry checks, polar duals, left/right/base types;
//! * [`ops`] — symmetry-preserving stacking, cutting and prism operations;
//! * [`catalog`] — every named seed polytope;
//! * [`classify`] — membership of an f-vector in `F(G)`;
//! * [`certify`] — certificate tables and their verification;
//! * [`synth`] — explicit witness polytopes for admissible f-vectors.

pub mod catalog;
pub mod certify;
pub mod classify;
pub mod group;
pub mod hull;
pub mod linalg;
pub mod ops;
mod poly;
pub mod polytope;
pub mod scalar;
pub mod synth;

pub use group::{Group, GroupSpec};
pub use hull::{FVector, Polytope};
pub use scalar::{Field, Scalar};
