//! Reduction of genus-zero bundle pieces to pants and disks, plumbing buffer
//! insertion, and the monotone tree labeling used by the directed
//! constructor.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::graph::{DecompositionGraph, Gluing, PieceId, PieceKind, PortRef};
use crate::mat::Mat2;
use crate::Error;

/// Piece of a genus-zero base surface: a pair of pants (χ = −1) or a disk
/// (χ = +1).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SurfacePiece {
    Pants,
    Disk,
}

impl SurfacePiece {
    pub fn euler_characteristic(&self) -> i64 {
        match self {
            SurfacePiece::Pants => -1,
            SurfacePiece::Disk => 1,
        }
    }

    pub fn boundary_slots(&self) -> usize {
        match self {
            SurfacePiece::Pants => 3,
            SurfacePiece::Disk => 1,
        }
    }
}

/// A pants-and-disks decomposition of a genus-zero surface with `b` boundary
/// circles: pieces, where each original boundary circle lands, and the cut
/// seams between pieces.
#[derive(Clone, Debug)]
pub struct PantsDecomposition {
    pub pieces: Vec<SurfacePiece>,
    /// original boundary circle index → (piece, slot)
    pub boundary_map: Vec<(usize, usize)>,
    /// cut circles as slot pairs ((piece, slot), (piece, slot))
    pub seams: Vec<((usize, usize), (usize, usize))>,
}

/// Chain decomposition of the genus-zero surface with `b` boundary circles.
///
/// b = 0 splits the sphere into two disks, b = 1 is already a disk, b = 2
/// gives a pants plus a disk, b ≥ 3 gives a caterpillar of b − 2 pants.
pub fn pants_decompose(b: usize) -> PantsDecomposition {
    match b {
        0 => PantsDecomposition {
            pieces: vec![SurfacePiece::Disk, SurfacePiece::Disk],
            boundary_map: vec![],
            seams: vec![((0, 0), (1, 0))],
        },
        1 => PantsDecomposition {
            pieces: vec![SurfacePiece::Disk],
            boundary_map: vec![(0, 0)],
            seams: vec![],
        },
        2 => PantsDecomposition {
            pieces: vec![SurfacePiece::Pants, SurfacePiece::Disk],
            boundary_map: vec![(0, 0), (0, 1)],
            seams: vec![((0, 2), (1, 0))],
        },
        3 => PantsDecomposition {
            pieces: vec![SurfacePiece::Pants],
            boundary_map: vec![(0, 0), (0, 1), (0, 2)],
            seams: vec![],
        },
        _ => {
            let pants = b - 2;
            let pieces = vec![SurfacePiece::Pants; pants];
            let mut boundary_map = vec![(0, 0), (0, 1)];
            for i in 2..b - 2 {
                boundary_map.push((i - 1, 1));
            }
            boundary_map.push((pants - 1, 1));
            boundary_map.push((pants - 1, 2));
            let seams = (0..pants - 1).map(|i| ((i, 2), (i + 1, 0))).collect();
            PantsDecomposition {
                pieces,
                boundary_map,
                seams,
            }
        }
    }
}

/// Replaces every genus-zero bundle piece by the circle-bundle pieces over
/// its pants decomposition. New seams are cut gluings `[[−1,0],[0,1]]`
/// (section ↦ −section, fiber ↦ fiber), so the manifold is unchanged;
/// original gluings keep their matrices and outside endpoints.
pub fn reduce_to_pants(g: &DecompositionGraph) -> Result<DecompositionGraph, Error> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidGraph(violations));
    }
    let mut pieces = BTreeMap::new();
    let mut gluings: Vec<Gluing> = g.gluings().to_vec();
    let mut seams: Vec<Gluing> = Vec::new();
    // original port → replacement port; applies to the original gluing list
    // only, never to the fresh seams
    let mut rewire: BTreeMap<(PieceId, usize), PortRef> = BTreeMap::new();
    let mut next_id = g.pieces().keys().max().map_or(0, |m| m + 1);

    for (&id, &kind) in g.pieces() {
        let PieceKind::GenusZeroBundle { boundary } = kind else {
            pieces.insert(id, kind);
            continue;
        };
        let pattern = pants_decompose(boundary);
        let local_ids: Vec<PieceId> = pattern
            .pieces
            .iter()
            .enumerate()
            .map(|(i, piece)| {
                let new_id = if i == 0 { id } else { next_id };
                if i != 0 {
                    next_id += 1;
                }
                pieces.insert(
                    new_id,
                    match piece {
                        SurfacePiece::Pants => PieceKind::PantsS1,
                        SurfacePiece::Disk => PieceKind::SolidTorus,
                    },
                );
                new_id
            })
            .collect();
        for (orig_port, &(piece, slot)) in pattern.boundary_map.iter().enumerate() {
            rewire.insert(
                (id, orig_port),
                PortRef {
                    piece: local_ids[piece],
                    port: slot,
                },
            );
        }
        for &((pa, sa), (pb, sb)) in &pattern.seams {
            seams.push(Gluing::new(
                PortRef {
                    piece: local_ids[pa],
                    port: sa,
                },
                PortRef {
                    piece: local_ids[pb],
                    port: sb,
                },
                Mat2::section_flip(),
            ));
        }
    }

    for gluing in &mut gluings {
        for end in &mut gluing.ends {
            if let Some(&replacement) = rewire.get(&(end.piece, end.port)) {
                *end = replacement;
            }
        }
    }
    gluings.extend(seams);
    Ok(DecompositionGraph::new(pieces, gluings))
}

/// Replaces every non-plumbing gluing between two non-buffer pieces by a
/// ThickTorus buffer whose two gluings compose to the original matrix:
/// the pair is (J, G·J·F) with J = `[[0,1],[1,0]]` and F = diag(−1,1) the
/// through-buffer transport, so G₂·F·G₁ = G. Gluings incident to a
/// ThickTorus are left alone — the buffer absorbs the twist. Idempotent on
/// plumbing-type graphs.
pub fn insert_plumbing_buffers(g: &DecompositionGraph) -> Result<DecompositionGraph, Error> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidGraph(violations));
    }
    let mut pieces = g.pieces().clone();
    let mut next_id = pieces.keys().max().map_or(0, |m| m + 1);
    let mut gluings = Vec::new();
    for gluing in g.gluings() {
        let buffered = !gluing.matrix.is_plumbing()
            && gluing
                .ends
                .iter()
                .all(|e| g.kind(e.piece) != Some(PieceKind::ThickTorus));
        if !buffered {
            gluings.push(*gluing);
            continue;
        }
        let buffer = next_id;
        next_id += 1;
        pieces.insert(buffer, PieceKind::ThickTorus);
        let second = gluing
            .matrix
            .mul(&Mat2::plumbing())
            .mul(&Mat2::section_flip());
        gluings.push(Gluing::new(
            gluing.ends[0],
            PortRef {
                piece: buffer,
                port: 0,
            },
            Mat2::plumbing(),
        ));
        gluings.push(Gluing::new(
            PortRef {
                piece: buffer,
                port: 1,
            },
            gluing.ends[1],
            second,
        ));
    }
    Ok(DecompositionGraph::new(pieces, gluings))
}

/// Whether every gluing between two non-ThickTorus pieces is the plumbing
/// matrix.
pub fn is_plumbing_type(g: &DecompositionGraph) -> bool {
    g.gluings().iter().all(|gl| {
        gl.matrix.is_plumbing()
            || gl
                .ends
                .iter()
                .any(|e| g.kind(e.piece) == Some(PieceKind::ThickTorus))
    })
}

/// Monotone labeling of a tree decomposition: a bijection onto {1..s} whose
/// top label sits on a degree-one vertex and whose label-suffix subgraphs are
/// all connected. Equivalently, labels strictly decrease away from the root.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeLabeling {
    pub labels: BTreeMap<PieceId, usize>,
    pub root: PieceId,
}

impl TreeLabeling {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: PieceId) -> Option<usize> {
        self.labels.get(&v).copied()
    }
}

/// Labels a tree by reverse breadth-first order from the smallest-id
/// solid-torus leaf: the root gets label s and every BFS prefix is connected,
/// which is exactly the suffix-connectivity condition.
pub fn label_tree(g: &DecompositionGraph) -> Result<TreeLabeling, Error> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(Error::InvalidGraph(violations));
    }
    if g.betti() != 0 {
        return Err(Error::NotATree(format!(
            "graph Betti number is {}",
            g.betti()
        )));
    }
    for &id in g.pieces().keys() {
        let d = g.degree(id);
        if d > 3 {
            return Err(Error::DegreeExceeded {
                piece: id,
                degree: d,
            });
        }
    }
    let root = g
        .pieces()
        .iter()
        .find(|(&id, &kind)| kind == PieceKind::SolidTorus && g.degree(id) == 1)
        .map(|(&id, _)| id)
        .ok_or(Error::NoSolidTorusLeaf)?;

    let mut order = Vec::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    queue.push_back(root);
    seen.insert(root);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for u in g.neighbors(v) {
            if seen.insert(u) {
                queue.push_back(u);
            }
        }
    }
    let s = order.len();
    let labels = order.iter().enumerate().map(|(i, &v)| (v, s - i)).collect();
    Ok(TreeLabeling { labels, root })
}

/// Checks conditions (1)–(3) of a monotone tree labeling against the graph:
/// bijectivity onto {1..s}, degree-one root carrying the top label, and
/// connectivity of every label-suffix subgraph.
pub fn check_labeling(g: &DecompositionGraph, labeling: &TreeLabeling) -> Result<(), Error> {
    let s = g.pieces().len();
    if labeling.labels.len() != s {
        return Err(Error::BadLabeling(format!(
            "{} labels for {} vertices",
            labeling.labels.len(),
            s
        )));
    }
    let mut seen = vec![false; s + 1];
    for (&v, &l) in &labeling.labels {
        if !g.pieces().contains_key(&v) {
            return Err(Error::BadLabeling(format!("label on unknown vertex {v}")));
        }
        if l < 1 || l > s || seen[l] {
            return Err(Error::BadLabeling(format!(
                "label {l} is out of range or repeated"
            )));
        }
        seen[l] = true;
    }
    if labeling.label(labeling.root) != Some(s) {
        return Err(Error::BadLabeling(
            "root does not carry the top label".into(),
        ));
    }
    if g.degree(labeling.root) != 1 {
        return Err(Error::BadLabeling("root is not a degree-one vertex".into()));
    }
    for j in 1..=s {
        let keep: BTreeSet<PieceId> = labeling
            .labels
            .iter()
            .filter(|(_, &l)| l >= j)
            .map(|(&v, _)| v)
            .collect();
        if !induced_connected(g, &keep) {
            return Err(Error::BadLabeling(format!(
                "vertices with labels >= {j} do not span a connected subgraph"
            )));
        }
    }
    Ok(())
}

fn induced_connected(g: &DecompositionGraph, keep: &BTreeSet<PieceId>) -> bool {
    let Some(&start) = keep.first() else {
        return true;
    };
    let mut seen = BTreeSet::new();
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        if !seen.insert(v) {
            continue;
        }
        for u in g.neighbors(v) {
            if keep.contains(&u) && !seen.contains(&u) {
                stack.push(u);
            }
        }
    }
    seen.len() == keep.len()
}

/// The unique neighbor with a higher label; `None` for the root. Well-defined
/// on any labeling passing [`check_labeling`].
pub fn parent_by_label(
    g: &DecompositionGraph,
    labeling: &TreeLabeling,
    v: PieceId,
) -> Option<PieceId> {
    let own = labeling.label(v)?;
    let mut parents: Vec<PieceId> = g
        .neighbors(v)
        .into_iter()
        .filter(|&u| labeling.label(u).is_some_and(|l| l > own))
        .collect();
    parents.dedup();
    debug_assert!(parents.len() <= 1, "monotone labeling has a unique parent");
    parents.pop()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphViolation;
    use crate::homology::first_homology;

    fn parse(text: &str) -> DecompositionGraph {
        DecompositionGraph::parse(text).unwrap()
    }

    #[test]
    fn pants_decompose_euler_characteristic() {
        for b in 0..12 {
            let p = pants_decompose(b);
            let chi: i64 = p.pieces.iter().map(|x| x.euler_characteristic()).sum();
            assert_eq!(chi, 2 - b as i64, "b = {b}");
            if b >= 3 {
                assert_eq!(p.pieces.len(), (b - 2).max(1));
            }
            // every slot is used exactly once
            let mut used = BTreeSet::new();
            for &(piece, slot) in &p.boundary_map {
                assert!(used.insert((piece, slot)));
            }
            for &(a, b) in &p.seams {
                assert!(used.insert(a));
                assert!(used.insert(b));
            }
            let total: usize = p.pieces.iter().map(|x| x.boundary_slots()).sum();
            assert_eq!(used.len(), total);
        }
    }

    #[test]
    fn pants_decompose_small_cases() {
        assert_eq!(
            pants_decompose(0).pieces,
            vec![SurfacePiece::Disk, SurfacePiece::Disk]
        );
        assert_eq!(
            pants_decompose(2).pieces,
            vec![SurfacePiece::Pants, SurfacePiece::Disk]
        );
        assert_eq!(pants_decompose(5).pieces, vec![SurfacePiece::Pants; 3]);
    }

    #[test]
    fn reduce_bundle3_to_single_pants() {
        let g = parse(
            "piece 0 bundle 3\npiece 1 solidtorus\npiece 2 solidtorus\npiece 3 solidtorus\n\
             glue 0.0 1.0 0 1 1 0\nglue 0.1 2.0 0 1 1 0\nglue 0.2 3.0 0 1 1 0\n",
        );
        let reduced = reduce_to_pants(&g).unwrap();
        assert_eq!(reduced.kind(0), Some(PieceKind::PantsS1));
        assert_eq!(reduced.pieces().len(), 4);
        assert_eq!(reduced.gluings().len(), 3);
    }

    #[test]
    fn reduce_closed_bundle0_is_s1_x_s2() {
        let g = parse("piece 0 bundle 0\n");
        let reduced = reduce_to_pants(&g).unwrap();
        assert_eq!(reduced.pieces().len(), 2);
        assert!(reduced
            .pieces()
            .values()
            .all(|&k| k == PieceKind::SolidTorus));
        // the seam matrix must preserve the manifold: H₁(S¹×S²) = Z
        let h1 = first_homology(&reduced).unwrap();
        assert_eq!(h1.free_rank, 1);
        assert!(h1.torsion.is_empty());
    }

    #[test]
    fn reduce_bundle4_gives_two_pants_chained() {
        let g = parse(
            "piece 0 bundle 4\npiece 1 solidtorus\npiece 2 solidtorus\npiece 3 solidtorus\npiece 4 solidtorus\n\
             glue 0.0 1.0 0 1 1 0\nglue 0.1 2.0 0 1 1 0\nglue 0.2 3.0 0 1 1 0\nglue 0.3 4.0 0 1 1 0\n",
        );
        let reduced = reduce_to_pants(&g).unwrap();
        let pants = reduced
            .pieces()
            .values()
            .filter(|&&k| k == PieceKind::PantsS1)
            .count();
        assert_eq!(pants, 2);
        assert_eq!(reduced.betti(), g.betti());
        assert!(reduced.validate().is_empty());
    }

    #[test]
    fn buffer_insertion_composite_and_idempotence() {
        let g = parse("piece 0 solidtorus\npiece 1 solidtorus\nglue 0.0 1.0 1 0 0 -1\n");
        let buffered = insert_plumbing_buffers(&g).unwrap();
        assert!(buffered.validate().is_empty());
        assert_eq!(buffered.pieces().len(), 3);
        assert_eq!(buffered.gluings().len(), 2);
        assert!(is_plumbing_type(&buffered));
        // composite through the buffer equals the original matrix
        let buffer_id = 2;
        let mut towards: BTreeMap<usize, Mat2<i64>> = BTreeMap::new();
        for gl in buffered.gluings() {
            if gl.ends[1].piece == buffer_id {
                towards.insert(gl.ends[1].port, gl.matrix);
            } else if gl.ends[0].piece == buffer_id {
                towards.insert(gl.ends[0].port, gl.matrix.inverse_unimodular().unwrap());
            }
        }
        let g1 = towards[&0];
        let g2 = towards[&1].inverse_unimodular().unwrap();
        let composite = g2.mul(&Mat2::section_flip()).mul(&g1);
        assert_eq!(composite, Mat2::new(1, 0, 0, -1));

        let again = insert_plumbing_buffers(&buffered).unwrap();
        assert_eq!(again, buffered);
    }

    #[test]
    fn plumbing_gluing_left_unchanged() {
        let g = parse("piece 0 solidtorus\npiece 1 solidtorus\nglue 0.0 1.0 0 1 1 0\n");
        let buffered = insert_plumbing_buffers(&g).unwrap();
        assert_eq!(buffered, g);
    }

    #[test]
    fn label_path_graph() {
        let g = parse(
            "piece 0 solidtorus\npiece 1 thicktorus\npiece 2 solidtorus\n\
             glue 0.0 1.0 0 1 1 0\nglue 1.1 2.0 0 1 1 0\n",
        );
        let labeling = label_tree(&g).unwrap();
        assert_eq!(labeling.root, 0);
        assert_eq!(labeling.label(0), Some(3));
        assert_eq!(labeling.label(1), Some(2));
        assert_eq!(labeling.label(2), Some(1));
        check_labeling(&g, &labeling).unwrap();
    }

    #[test]
    fn label_star_graph_and_enumeration_oracle() {
        let g = parse(
            "piece 0 pants\npiece 1 solidtorus\npiece 2 solidtorus\npiece 3 solidtorus\n\
             glue 0.0 1.0 0 1 1 0\nglue 0.1 2.0 0 1 1 0\nglue 0.2 3.0 0 1 1 0\n",
        );
        let labeling = label_tree(&g).unwrap();
        assert_eq!(labeling.root, 1);
        assert_eq!(labeling.label(1), Some(4));
        assert_eq!(labeling.label(0), Some(3));
        assert_eq!(labeling.label(2), Some(2));
        assert_eq!(labeling.label(3), Some(1));
        check_labeling(&g, &labeling).unwrap();

        // enumerate all 4! labelings; the admissible ones are exactly the
        // reverse breadth-first orders from a leaf: leaf=4, center=3, and the
        // two remaining leaves in either order
        let ids = [0usize, 1, 2, 3];
        let mut admissible = 0;
        let mut perm = [1usize, 2, 3, 4];
        let mut count_perms = 0;
        permute(&mut perm, 0, &mut |p| {
            count_perms += 1;
            let labels: BTreeMap<PieceId, usize> =
                ids.iter().copied().zip(p.iter().copied()).collect();
            let root = ids[p.iter().position(|&l| l == 4).unwrap()];
            let cand = TreeLabeling { labels, root };
            if check_labeling(&g, &cand).is_ok() {
                admissible += 1;
                assert_ne!(cand.root, 0, "center can never carry the top label");
                assert_eq!(cand.label(0), Some(3), "center must be labeled second");
            }
        });
        assert_eq!(count_perms, 24);
        // 3 choices of root leaf × 2 orders of the remaining leaves
        assert_eq!(admissible, 6);
    }

    fn permute(p: &mut [usize; 4], k: usize, f: &mut impl FnMut(&[usize; 4])) {
        if k == 4 {
            f(p);
            return;
        }
        for i in k..4 {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }

    #[test]
    fn label_tree_rejects_cycles_and_missing_leaves() {
        let theta = parse(
            "piece 0 pants\npiece 1 pants\nglue 0.0 1.0 -1 0 0 1\nglue 0.1 1.1 -1 0 0 1\nglue 0.2 1.2 -1 0 0 1\n",
        );
        assert!(matches!(label_tree(&theta), Err(Error::NotATree(_))));

        let bundle_leaf = parse("piece 0 bundle 1\npiece 1 bundle 1\nglue 0.0 1.0 0 1 1 0\n");
        assert!(matches!(
            label_tree(&bundle_leaf),
            Err(Error::NoSolidTorusLeaf)
        ));

        // a lone solid torus cannot close up into a manifold
        let mut pieces = BTreeMap::new();
        pieces.insert(0, PieceKind::SolidTorus);
        let open = DecompositionGraph::new(pieces, vec![]);
        assert!(matches!(label_tree(&open), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn reduce_rejects_invalid_graph() {
        let mut pieces = BTreeMap::new();
        pieces.insert(0, PieceKind::PantsS1);
        let g = DecompositionGraph::new(pieces, vec![]);
        match reduce_to_pants(&g) {
            Err(Error::InvalidGraph(v)) => {
                assert!(v
                    .iter()
                    .any(|x| matches!(x, GraphViolation::UngluedPort { .. })))
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
