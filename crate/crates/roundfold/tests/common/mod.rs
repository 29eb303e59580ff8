//! Shared generators for the integration suites: random plumbing-type trees
//! and random closed decomposition graphs.

// compiled once per test target; not every target uses every generator
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use roundfold::graph::{DecompositionGraph, Gluing, PieceKind, PortRef};
use roundfold::mat::Mat2;
use roundfold::GluingMatrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random closed tree of pants, solid-torus and thick-torus pieces with all
/// degrees ≤ 3: a root solid torus, `pants` internal trifurcations, matching
/// leaves, and `thick` buffers subdividing random edges. All gluings are
/// the plumbing matrix, so the result is plumbing-type.
pub fn random_tree(rng: &mut ChaCha8Rng, max_pants: usize, max_thick: usize) -> DecompositionGraph {
    let pants = rng.gen_range(0..=max_pants);
    let thick = rng.gen_range(0..=max_thick);

    let mut kinds: BTreeMap<usize, PieceKind> = BTreeMap::new();
    let mut edges: Vec<(PortRef, PortRef)> = Vec::new();
    let mut next_id = 0usize;
    let mut fresh = |kinds: &mut BTreeMap<usize, PieceKind>, kind: PieceKind| {
        let id = next_id;
        next_id += 1;
        kinds.insert(id, kind);
        id
    };

    let root = fresh(&mut kinds, PieceKind::SolidTorus);
    let mut open: Vec<PortRef> = vec![PortRef {
        piece: root,
        port: 0,
    }];
    for _ in 0..pants {
        let slot = open.swap_remove(rng.gen_range(0..open.len()));
        let p = fresh(&mut kinds, PieceKind::PantsS1);
        edges.push((slot, PortRef { piece: p, port: 0 }));
        open.push(PortRef { piece: p, port: 1 });
        open.push(PortRef { piece: p, port: 2 });
    }
    for slot in open {
        let leaf = fresh(&mut kinds, PieceKind::SolidTorus);
        edges.push((
            slot,
            PortRef {
                piece: leaf,
                port: 0,
            },
        ));
    }
    for _ in 0..thick {
        let idx = rng.gen_range(0..edges.len());
        let (a, b) = edges.swap_remove(idx);
        let buffer = fresh(&mut kinds, PieceKind::ThickTorus);
        edges.push((
            a,
            PortRef {
                piece: buffer,
                port: 0,
            },
        ));
        edges.push((
            PortRef {
                piece: buffer,
                port: 1,
            },
            b,
        ));
    }

    let gluings = edges
        .into_iter()
        .map(|(a, b)| Gluing::new(a, b, Mat2::plumbing()))
        .collect();
    DecompositionGraph::new(kinds, gluings)
}

/// Random gluing matrix with determinant −1 and entries in [−5, 5].
pub fn random_gluing_matrix(rng: &mut ChaCha8Rng) -> GluingMatrix {
    loop {
        let m = Mat2::new(
            rng.gen_range(-5..=5),
            rng.gen_range(-5..=5),
            rng.gen_range(-5..=5),
            rng.gen_range(-5..=5),
        );
        if m.det() == -1 {
            return m;
        }
    }
}

/// Random closed connected decomposition graph of pants, thick-torus and
/// solid-torus pieces with random determinant-(−1) gluings: a spanning tree
/// built port-greedily, then a random perfect matching on the leftover
/// ports (multi-edges and self-loops included).
pub fn random_closed_graph(rng: &mut ChaCha8Rng) -> DecompositionGraph {
    let pants = rng.gen_range(0..=5usize);
    random_closed_graph_of(rng, pants, 0)
}

/// Like [`random_closed_graph`] but mixing in genus-zero bundle pieces, for
/// exercising the pants reduction.
pub fn random_closed_graph_with_bundles(rng: &mut ChaCha8Rng) -> DecompositionGraph {
    let pants = rng.gen_range(0..=3usize);
    let bundles = rng.gen_range(1..=3usize);
    random_closed_graph_of(rng, pants, bundles)
}

fn random_closed_graph_of(
    rng: &mut ChaCha8Rng,
    pants: usize,
    bundles: usize,
) -> DecompositionGraph {
    let mut order: Vec<PieceKind> = Vec::new();
    // each non-solid piece with p ports leaves p − 2 ports to spare; every
    // solid torus eats one spare, and the total must stay even
    let mut spare = pants as i64;
    for _ in 0..bundles {
        let boundary = rng.gen_range(2..=6usize);
        order.push(PieceKind::GenusZeroBundle { boundary });
        spare += boundary as i64 - 2;
    }
    let max_solid = (spare + 2).min(8) as usize;
    let mut solid = rng.gen_range(0..=max_solid);
    let total_parity = (3 * pants + order.iter().map(|k| k.ports()).sum::<usize>() + solid) % 2;
    if total_parity == 1 {
        if solid > 0 {
            solid -= 1;
        } else {
            solid += 1;
        }
    }
    let thick = rng.gen_range(0..=4usize);
    order.extend(std::iter::repeat_n(PieceKind::PantsS1, pants));
    order.extend(std::iter::repeat_n(PieceKind::ThickTorus, thick));
    order.extend(std::iter::repeat_n(PieceKind::SolidTorus, solid));
    order.sort_by_key(|k| std::cmp::Reverse(k.ports()));
    if order.is_empty() {
        order = vec![PieceKind::SolidTorus, PieceKind::SolidTorus];
    }

    let mut kinds: BTreeMap<usize, PieceKind> = BTreeMap::new();
    let mut open: Vec<PortRef> = Vec::new();
    let mut gluings: Vec<Gluing> = Vec::new();
    for (id, kind) in order.iter().enumerate() {
        kinds.insert(id, *kind);
        let mut ports: Vec<PortRef> = (0..kind.ports())
            .map(|port| PortRef { piece: id, port })
            .collect();
        if id > 0 {
            // attach to the existing component
            let slot = open.swap_remove(rng.gen_range(0..open.len()));
            let mine = ports.swap_remove(rng.gen_range(0..ports.len()));
            gluings.push(Gluing::new(slot, mine, random_gluing_matrix(rng)));
        }
        open.extend(ports);
    }
    open.shuffle(rng);
    for pair in open.chunks(2) {
        gluings.push(Gluing::new(pair[0], pair[1], random_gluing_matrix(rng)));
    }
    DecompositionGraph::new(kinds, gluings)
}
