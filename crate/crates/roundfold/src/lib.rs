//! Combinatorial models of closed orientable graph 3-manifolds and of round
//! fold maps into the plane.
//!
//! The library has three layers:
//!
//! * [`graph`] — decomposition graphs: fibered pieces (`P × S¹`, solid tori,
//!   `T² × [−1,1]`, genus-zero bundles) glued along boundary tori by integer
//!   matrices of determinant −1, with a canonical `.gm` text form.
//! * [`descriptor`] / [`morse`] — the fold-level data of a round fold map:
//!   concentric critical circles, per-level blocks, interface tori and fiber
//!   counts (`.rfd`), and combinatorial Morse pages with level-preserving
//!   monodromy (`.mf`).
//! * [`construct`] / [`homology`] / [`directed`] — the constructors (directed
//!   maps from labeled tree decompositions, round fold maps from Morse data),
//!   exact first homology through Smith normal form, open-book summaries, and
//!   the admits-directed decision procedure.
//!
//! All values are immutable after construction and all operations are pure;
//! outputs are deterministic for identical inputs.

pub mod construct;
pub mod decompose;
pub mod descriptor;
pub mod directed;
mod error;
pub mod graph;
pub mod homology;
pub mod mat;
pub mod morse;
pub mod openbook;
pub mod render;
pub mod snf;

pub use error::Error;

/// Exact integer scalar used for homology presentations. Entries grow quickly
/// under diagonalization, so fixed-width integers are not an option.
pub type ExactInt = num_bigint::BigInt;

/// Dense exact integer matrix.
pub type ExactMat = mat::Mat<ExactInt>;

/// 2×2 integer matrix expressing one boundary-torus basis in another.
pub type GluingMatrix = mat::Mat2<i64>;
