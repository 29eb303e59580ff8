//! Exact first homology of a graph manifold from its decomposition graph.
//!
//! The presentation is the abelianized graph-of-groups one: generators are
//! the per-piece homology generators plus one free generator per gluing
//! outside a breadth-first spanning tree; each gluing contributes two
//! relations equating the transported basis classes of the identified torus.
//! The cokernel is computed by Smith normal form over arbitrary-precision
//! integers.
//!
//! Per-piece generators and port classes (μ, λ):
//!
//! * solid torus: core `c`; μ ↦ 0, λ ↦ c.
//! * pants × S¹: boundary classes `b₁`, `b₂` and fiber `f`; ports carry
//!   (b₁, f), (b₂, f), (−b₁−b₂, f).
//! * thick torus: `x`, `y`; port 0 carries (x, y), port 1 carries (−x, y).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::graph::{DecompositionGraph, PieceId, PieceKind, PortRef};
use crate::mat::Mat;
use crate::snf::smith_normal_form;
use crate::{Error, ExactInt, ExactMat};

/// Finitely generated abelian group in invariant-factor form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianGroup {
    pub free_rank: usize,
    /// Invariant factors d₁ | d₂ | …, each ≥ 2.
    pub torsion: Vec<ExactInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Group presented as the cokernel of the relation matrix (rows are
    /// relations over the column generators).
    pub fn from_presentation(relations: &ExactMat) -> Self {
        let snf = smith_normal_form(relations);
        let factors = snf.invariant_factors();
        let rank = factors.len();
        AbelianGroup {
            free_rank: relations.cols() - rank,
            torsion: factors
                .into_iter()
                .filter(|d| d.abs() > BigInt::from(1))
                .collect(),
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Copy)]
enum BasisClass {
    Section,
    Fiber,
}

/// Generator count of a piece's first homology.
fn generator_count(kind: PieceKind) -> usize {
    match kind {
        PieceKind::SolidTorus => 1,
        PieceKind::ThickTorus => 2,
        PieceKind::PantsS1 => 3,
        PieceKind::GenusZeroBundle { .. } => 0,
    }
}

/// Class of a port basis vector as coefficients over the piece's local
/// generators.
fn port_class(kind: PieceKind, port: usize, which: BasisClass) -> Vec<(usize, i64)> {
    match (kind, which) {
        (PieceKind::SolidTorus, BasisClass::Section) => vec![],
        (PieceKind::SolidTorus, BasisClass::Fiber) => vec![(0, 1)],
        (PieceKind::PantsS1, BasisClass::Section) => match port {
            0 => vec![(0, 1)],
            1 => vec![(1, 1)],
            _ => vec![(0, -1), (1, -1)],
        },
        (PieceKind::PantsS1, BasisClass::Fiber) => vec![(2, 1)],
        (PieceKind::ThickTorus, BasisClass::Section) => {
            if port == 0 {
                vec![(0, 1)]
            } else {
                vec![(0, -1)]
            }
        }
        (PieceKind::ThickTorus, BasisClass::Fiber) => vec![(1, 1)],
        (PieceKind::GenusZeroBundle { .. }, _) => vec![],
    }
}

/// H₁(M; Z) of the manifold described by a valid graph of pants, solid-torus
/// and thick-torus pieces.
pub fn first_homology(g: &DecompositionGraph) -> Result<AbelianGroup, Error> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidGraph(violations));
    }
    if g.pieces()
        .values()
        .any(|k| matches!(k, PieceKind::GenusZeroBundle { .. }))
    {
        return Err(Error::BundleNotReduced);
    }

    let mut offset: BTreeMap<PieceId, usize> = BTreeMap::new();
    let mut total = 0usize;
    for (&id, &kind) in g.pieces() {
        offset.insert(id, total);
        total += generator_count(kind);
    }
    let tree_edges = spanning_tree_edges(g);
    let free_letters = g.gluings().len() - tree_edges.len();
    let cols = total + free_letters;

    let mut relations = Mat::<ExactInt>::zeros(2 * g.gluings().len(), cols);
    let add = |relations: &mut ExactMat, row: usize, end: PortRef, which: BasisClass, sign: i64| {
        let kind = g.kind(end.piece).unwrap();
        for (local, coeff) in port_class(kind, end.port, which) {
            let col = offset[&end.piece] + local;
            let delta = BigInt::from(sign * coeff);
            relations[(row, col)] = relations[(row, col)].clone() + delta;
        }
    };
    for (idx, gl) in g.gluings().iter().enumerate() {
        let [src, dst] = gl.ends;
        let m = gl.matrix;
        // μ_src = a·μ_dst + c·λ_dst
        add(&mut relations, 2 * idx, src, BasisClass::Section, 1);
        add(&mut relations, 2 * idx, dst, BasisClass::Section, -m.a);
        add(&mut relations, 2 * idx, dst, BasisClass::Fiber, -m.c);
        // λ_src = b·μ_dst + d·λ_dst
        add(&mut relations, 2 * idx + 1, src, BasisClass::Fiber, 1);
        add(&mut relations, 2 * idx + 1, dst, BasisClass::Section, -m.b);
        add(&mut relations, 2 * idx + 1, dst, BasisClass::Fiber, -m.d);
    }
    Ok(AbelianGroup::from_presentation(&relations))
}

/// Indices (into the gluing list) of a breadth-first spanning tree rooted at
/// the smallest piece id.
fn spanning_tree_edges(g: &DecompositionGraph) -> BTreeSet<usize> {
    let mut tree = BTreeSet::new();
    let Some((&start, _)) = g.pieces().first_key_value() else {
        return tree;
    };
    let mut seen = BTreeSet::new();
    seen.insert(start);
    let mut queue = VecDeque::new();
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        for (idx, gl) in g.gluings().iter().enumerate() {
            let [a, b] = gl.ends;
            let next = if a.piece == v {
                b.piece
            } else if b.piece == v {
                a.piece
            } else {
                continue;
            };
            if seen.insert(next) {
                tree.insert(idx);
                queue.push_back(next);
            }
        }
    }
    tree
}

/// Cycle rank |E| − |V| + 1 of the underlying multigraph.
pub fn graph_betti(g: &DecompositionGraph) -> Result<usize, Error> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(g.betti())
}
