//! Property tests for the structural invariants: seed-driven generators
//! feed proptest so failures shrink to a reproducible seed.

mod common;

use proptest::prelude::*;

use roundfold::construct::{construct_directed, descriptor_from_morse};
use roundfold::decompose::{insert_plumbing_buffers, label_tree, parent_by_label, reduce_to_pants};
use roundfold::descriptor::Direction;
use roundfold::graph::{DecompositionGraph, PieceKind};
use roundfold::homology::first_homology;
use roundfold::morse::{MorseEvent, MorsePage};

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn port_count_handshake(seed in any::<u64>()) {
        let g = common::random_closed_graph(&mut common::rng(seed));
        let total: usize = g.pieces().values().map(|k| k.ports()).sum();
        prop_assert_eq!(total, 2 * g.gluings().len());
    }

    #[test]
    fn parse_serialize_identity(seed in any::<u64>()) {
        let g = common::random_closed_graph(&mut common::rng(seed));
        let reparsed = DecompositionGraph::parse(&g.serialize()).unwrap();
        prop_assert_eq!(&g, &reparsed);
        prop_assert_eq!(g.serialize(), reparsed.serialize());
    }

    #[test]
    fn gluing_inverse_composes_to_identity(seed in any::<u64>()) {
        let g = common::random_closed_graph(&mut common::rng(seed));
        for gl in g.gluings() {
            prop_assert_eq!(gl.matrix.det(), -1);
            let inv = gl.matrix.inverse_unimodular().unwrap();
            prop_assert_eq!(gl.matrix.mul(&inv), roundfold::mat::Mat2::identity());
            prop_assert_eq!(inv.mul(&gl.matrix), roundfold::mat::Mat2::identity());
        }
    }

    #[test]
    fn reduction_and_buffering_preserve_betti(seed in any::<u64>()) {
        let g = common::random_closed_graph_with_bundles(&mut common::rng(seed));
        prop_assert!(g.validate().is_empty());
        let reduced = reduce_to_pants(&g).unwrap();
        prop_assert!(reduced.validate().is_empty());
        let bundle_free = !reduced
            .pieces()
            .values()
            .any(|k| matches!(k, PieceKind::GenusZeroBundle { .. }));
        prop_assert!(bundle_free);
        prop_assert_eq!(reduced.betti(), g.betti());
        let buffered = insert_plumbing_buffers(&reduced).unwrap();
        prop_assert_eq!(buffered.betti(), g.betti());
        // buffering twice changes nothing
        prop_assert_eq!(&insert_plumbing_buffers(&buffered).unwrap(), &buffered);
    }

    #[test]
    fn buffering_preserves_homology(seed in any::<u64>()) {
        let g = common::random_closed_graph(&mut common::rng(seed));
        let buffered = insert_plumbing_buffers(&g).unwrap();
        prop_assert_eq!(first_homology(&g).unwrap(), first_homology(&buffered).unwrap());
    }

    #[test]
    fn unique_higher_labeled_neighbor(seed in any::<u64>()) {
        let g = common::random_tree(&mut common::rng(seed), 10, 12);
        let labeling = label_tree(&g).unwrap();
        for &v in g.pieces().keys() {
            let higher = g
                .neighbors(v)
                .into_iter()
                .filter(|&u| labeling.label(u) > labeling.label(v))
                .count();
            if v == labeling.root {
                prop_assert_eq!(higher, 0);
            } else {
                prop_assert_eq!(higher, 1);
                prop_assert!(parent_by_label(&g, &labeling, v).is_some());
            }
        }
    }

    #[test]
    fn directed_descriptor_counts_step_down(seed in any::<u64>()) {
        let g = common::random_tree(&mut common::rng(seed), 10, 12);
        let labeling = label_tree(&g).unwrap();
        let d = construct_directed(&g, &labeling).unwrap();
        for (j, window) in d.counts.windows(2).enumerate() {
            prop_assert_eq!(window[0], window[1] + 1, "region {}", j);
        }
        prop_assert_eq!(d.counts[0], d.levels);
    }

    #[test]
    fn morse_counts_telescope_and_directions_balance(seed in any::<u64>()) {
        let page = random_page(&mut common::rng(seed));
        let d = descriptor_from_morse(&page);
        prop_assert_eq!(d.verify(), vec![]);
        // n_0 − n_t = #inward − #outward
        let inward = d.directions.iter().filter(|&&x| x == Direction::Inward).count() as i64;
        let outward = d.directions.len() as i64 - inward;
        prop_assert_eq!(d.counts[0] as i64, inward - outward);
        // χ = #extrema − #saddles matches the block census
        let extrema = page.events().iter().filter(|e| e.is_extremum()).count() as i64;
        let saddles = page.events().len() as i64 - extrema;
        prop_assert_eq!(page.euler_characteristic(), extrema - saddles);
    }
}

/// Random identity-monodromy page: random feasible events until the live set
/// can be wound down, then merges and a death per component.
fn random_page(rng: &mut rand_chacha::ChaCha8Rng) -> MorsePage {
    use rand::Rng;
    let boundary = rng.gen_range(0..=4usize);
    let mut live: Vec<String> = (0..boundary).map(|i| format!("b{i}")).collect();
    let mut events = Vec::new();
    let mut fresh = boundary;
    let name = |fresh: &mut usize| {
        let n = format!("c{fresh}");
        *fresh += 1;
        n
    };
    let extra = rng.gen_range(0..=6usize);
    for _ in 0..extra {
        let choice = rng.gen_range(0..3);
        match choice {
            0 => {
                let c = name(&mut fresh);
                live.push(c.clone());
                events.push(MorseEvent::Birth { circle: c });
            }
            1 if live.len() >= 2 => {
                let a = live.remove(rng.gen_range(0..live.len()));
                let b = live.remove(rng.gen_range(0..live.len()));
                let c = name(&mut fresh);
                live.push(c.clone());
                events.push(MorseEvent::Merge {
                    inner: [a, b],
                    outer: c,
                });
            }
            _ if !live.is_empty() => {
                let a = live.remove(rng.gen_range(0..live.len()));
                let c1 = name(&mut fresh);
                let c2 = name(&mut fresh);
                live.push(c1.clone());
                live.push(c2.clone());
                events.push(MorseEvent::Split {
                    inner: a,
                    outer: [c1, c2],
                });
            }
            _ => {
                let c = name(&mut fresh);
                live.push(c.clone());
                events.push(MorseEvent::Birth { circle: c });
            }
        }
    }
    while live.len() >= 2 {
        let a = live.remove(rng.gen_range(0..live.len()));
        let b = live.remove(rng.gen_range(0..live.len()));
        let c = name(&mut fresh);
        live.push(c.clone());
        events.push(MorseEvent::Merge {
            inner: [a, b],
            outer: c,
        });
    }
    if let Some(last) = live.pop() {
        events.push(MorseEvent::Death { circle: last });
    }
    if events.is_empty() {
        live.push("b0".into());
        return MorsePage::new(
            1,
            vec![MorseEvent::Death {
                circle: "b0".into(),
            }],
            Default::default(),
        )
        .unwrap();
    }
    MorsePage::new(boundary, events, Default::default()).unwrap()
}
