//! The two round-fold-map constructors: directed descriptors from labeled
//! plumbing-type tree decompositions, and descriptors from Morse pages with
//! level-preserving monodromy, plus manifold identification for the
//! trivial-monodromy case.

use std::collections::BTreeMap;

use crate::decompose::{check_labeling, is_plumbing_type, parent_by_label, TreeLabeling};
use crate::descriptor::{
    directions_from_counts, Attachment, BlockId, BlockKind, DiskSide, InterfaceTorus,
    PantsOrientation, PortSide, RoundFoldDescriptor,
};
use crate::graph::{DecompositionGraph, PieceId, PieceKind};
use crate::morse::{MorseEvent, MorsePage, TrivialMonodromyManifold};
use crate::Error;

/// A strand of the map under construction: one fiber-circle family climbing
/// from its owner (a pants vertex or, for leaves, the binding) up to the
/// level of the owner's nearest non-buffer ancestor.
struct Tube {
    owner: PieceId,
    /// Innermost region the tube crosses: the owner's level for pants, 0 for
    /// solid-torus leaves.
    from_region: usize,
    /// Level of the block whose inner port terminates the tube.
    to_level: usize,
}

/// Builds the directed round fold map of a labeled plumbing-type tree.
///
/// Levels are the pants vertices plus the root in label order; thick-torus
/// buffers produce no level. The root becomes the outermost inner-facing
/// disk block, every other solid-torus leaf becomes a binding tube, and each
/// pants vertex becomes an untwisted two-in-one-out pants block at its
/// level, its tube passing through the levels between it and its parent as
/// trivial annulus blocks.
pub fn construct_directed(
    g: &DecompositionGraph,
    labeling: &TreeLabeling,
) -> Result<RoundFoldDescriptor, Error> {
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
    if g.betti() != 0 {
        return Err(Error::NotATree(format!(
            "graph Betti number is {}",
            g.betti()
        )));
    }
    if let Some(index) = g.gluings().iter().position(|gl| {
        !gl.matrix.is_plumbing()
            && gl
                .ends
                .iter()
                .all(|e| g.kind(e.piece) != Some(PieceKind::ThickTorus))
    }) {
        return Err(Error::NotPlumbingType { index });
    }
    debug_assert!(is_plumbing_type(g));
    check_labeling(g, labeling)?;
    if g.kind(labeling.root) != Some(PieceKind::SolidTorus) {
        return Err(Error::BadLabeling("root is not a solid torus".into()));
    }

    // levels: pants vertices plus the root, in label order
    let mut leveled: Vec<(usize, PieceId)> = g
        .pieces()
        .iter()
        .filter(|(&id, &kind)| kind == PieceKind::PantsS1 || id == labeling.root)
        .map(|(&id, _)| (labeling.label(id).unwrap(), id))
        .collect();
    leveled.sort_unstable();
    let level_of: BTreeMap<PieceId, usize> = leveled
        .iter()
        .enumerate()
        .map(|(i, &(_, id))| (id, i + 1))
        .collect();
    let t = leveled.len();

    // nearest non-buffer ancestor and its level
    let eff_parent_level = |v: PieceId| -> Result<usize, Error> {
        let mut cur = v;
        loop {
            let Some(p) = parent_by_label(g, labeling, cur) else {
                return Err(Error::Internal(format!(
                    "vertex {v} has no labeled path to the root"
                )));
            };
            if g.kind(p) == Some(PieceKind::ThickTorus) {
                cur = p;
                continue;
            }
            return match level_of.get(&p) {
                Some(&level) => Ok(level),
                None => Err(Error::Internal(format!(
                    "ancestor {p} of {v} is neither leveled nor a buffer"
                ))),
            };
        }
    };

    let mut tubes: Vec<Tube> = Vec::new();
    for (&id, &kind) in g.pieces() {
        match kind {
            PieceKind::SolidTorus if id != labeling.root => tubes.push(Tube {
                owner: id,
                from_region: 0,
                to_level: eff_parent_level(id)?,
            }),
            PieceKind::PantsS1 => tubes.push(Tube {
                owner: id,
                from_region: level_of[&id],
                to_level: eff_parent_level(id)?,
            }),
            _ => {}
        }
    }
    tubes.sort_by_key(|tube| tube.owner);

    // binding tubes in owner order
    let binding_index: BTreeMap<PieceId, usize> = tubes
        .iter()
        .filter(|tube| tube.from_region == 0)
        .enumerate()
        .map(|(i, tube)| (tube.owner, i))
        .collect();
    let binding = binding_index.len();

    // per level: singular block at index 0, then one annulus per passing
    // tube in owner order
    let mut blocks: Vec<Vec<BlockKind>> = Vec::with_capacity(t);
    let mut annulus_index: BTreeMap<(usize, PieceId), usize> = BTreeMap::new();
    for level in 1..=t {
        let singular = if level == t {
            BlockKind::Disk {
                side: DiskSide::Inner,
            }
        } else {
            BlockKind::Pants {
                orientation: PantsOrientation::TwoInOneOut,
                twisted: false,
            }
        };
        let mut level_blocks = vec![singular];
        for tube in &tubes {
            if tube.from_region < level && level < tube.to_level {
                annulus_index.insert((level, tube.owner), level_blocks.len());
                level_blocks.push(BlockKind::Annulus { copies: 1 });
            }
        }
        blocks.push(level_blocks);
    }

    // inner ports of each leveled vertex, handed out to arriving tubes in
    // owner order
    let mut child_rank: BTreeMap<PieceId, usize> = BTreeMap::new();
    let mut interfaces = Vec::new();
    for tube in &tubes {
        for region in tube.from_region..tube.to_level {
            // below the torus: the tube's own mouth at its first region
            // (binding tube or the pants' outer port), a pass-through
            // annulus after that
            let inner = if region == tube.from_region {
                match binding_index.get(&tube.owner) {
                    Some(&i) => Attachment::Binding(i),
                    None => Attachment::Port {
                        block: BlockId {
                            level: region,
                            index: 0,
                        },
                        side: PortSide::Outer,
                        port: 0,
                    },
                }
            } else {
                Attachment::Port {
                    block: BlockId {
                        level: region,
                        index: annulus_index[&(region, tube.owner)],
                    },
                    side: PortSide::Outer,
                    port: 0,
                }
            };
            // above the torus: the parent's next free inner port at the last
            // region, a pass-through annulus before that
            let outer = if region + 1 == tube.to_level {
                let parent_id = leveled[tube.to_level - 1].1;
                let rank = child_rank.entry(parent_id).or_insert(0);
                let port = *rank;
                *rank += 1;
                Attachment::Port {
                    block: BlockId {
                        level: tube.to_level,
                        index: 0,
                    },
                    side: PortSide::Inner,
                    port,
                }
            } else {
                Attachment::Port {
                    block: BlockId {
                        level: region + 1,
                        index: annulus_index[&(region + 1, tube.owner)],
                    },
                    side: PortSide::Inner,
                    port: 0,
                }
            };
            interfaces.push(InterfaceTorus {
                radius_below: region,
                multiplicity: 1,
                inner,
                outer,
            });
        }
    }

    let counts: Vec<usize> = (0..=t)
        .map(|region| {
            tubes
                .iter()
                .filter(|tube| tube.from_region <= region && region < tube.to_level)
                .count()
        })
        .collect();
    let directions = directions_from_counts(t, &counts);
    let descriptor = RoundFoldDescriptor {
        levels: t,
        blocks,
        interfaces,
        binding,
        counts,
        directions,
    };
    debug_assert_eq!(descriptor.verify(), vec![]);
    Ok(descriptor)
}

/// Builds the round fold descriptor of a Morse page: the manifold is the
/// union of the binding tubes and the page bundle over the circle.
///
/// Each level's singular block comes from its event (extrema give disk
/// blocks with the boundary torus on the side of the larger count, saddles
/// give pants blocks opening toward it, twisted exactly when the monodromy
/// swaps the event's circle pair); untouched circles pass through as annulus
/// blocks grouped by the monodromy cycles, and the interface tori are those
/// cycles.
pub fn descriptor_from_morse(page: &MorsePage) -> RoundFoldDescriptor {
    let t = page.levels();
    let counts = page.counts();

    // carrier sets per port, keyed by the sorted circle names
    let mut blocks: Vec<Vec<BlockKind>> = Vec::with_capacity(t);
    // (level, side) → carried-set key → (block index, port)
    let mut inner_port: Vec<BTreeMap<Vec<String>, (usize, usize)>> = vec![BTreeMap::new(); t + 1];
    let mut outer_port: Vec<BTreeMap<Vec<String>, (usize, usize)>> = vec![BTreeMap::new(); t + 1];

    for (i, event) in page.events().iter().enumerate() {
        let level = i + 1;
        let mut level_blocks = Vec::new();
        let singular = match event {
            MorseEvent::Birth { circle } => {
                outer_port[level].insert(vec![circle.clone()], (0, 0));
                BlockKind::Disk {
                    side: DiskSide::Outer,
                }
            }
            MorseEvent::Death { circle } => {
                inner_port[level].insert(vec![circle.clone()], (0, 0));
                BlockKind::Disk {
                    side: DiskSide::Inner,
                }
            }
            MorseEvent::Merge { inner, outer } => {
                let twisted = page.image(i, &inner[0]) == inner[1];
                if twisted {
                    let mut key = vec![inner[0].clone(), inner[1].clone()];
                    key.sort();
                    inner_port[level].insert(key, (0, 0));
                } else {
                    inner_port[level].insert(vec![inner[0].clone()], (0, 0));
                    inner_port[level].insert(vec![inner[1].clone()], (0, 1));
                }
                outer_port[level].insert(vec![outer.clone()], (0, 0));
                BlockKind::Pants {
                    orientation: PantsOrientation::TwoInOneOut,
                    twisted,
                }
            }
            MorseEvent::Split { inner, outer } => {
                let twisted = page.image(level, &outer[0]) == outer[1];
                if twisted {
                    let mut key = vec![outer[0].clone(), outer[1].clone()];
                    key.sort();
                    outer_port[level].insert(key, (0, 0));
                } else {
                    outer_port[level].insert(vec![outer[0].clone()], (0, 0));
                    outer_port[level].insert(vec![outer[1].clone()], (0, 1));
                }
                inner_port[level].insert(vec![inner.clone()], (0, 0));
                BlockKind::Pants {
                    orientation: PantsOrientation::OneInTwoOut,
                    twisted,
                }
            }
        };
        level_blocks.push(singular);

        // untouched circles, grouped into cycles of the region-(i) permutation
        let consumed: Vec<&str> = event.consumed();
        let mut visited: Vec<String> = Vec::new();
        for name in page.live(i) {
            if consumed.contains(&name.as_str()) || visited.contains(name) {
                continue;
            }
            let mut cycle = vec![name.clone()];
            let mut cur = page.image(i, name);
            while cur != *name {
                cycle.push(cur.clone());
                cur = page.image(i, &cur);
            }
            visited.extend(cycle.iter().cloned());
            let index = level_blocks.len();
            level_blocks.push(BlockKind::Annulus {
                copies: cycle.len(),
            });
            let mut key = cycle;
            key.sort();
            inner_port[level].insert(key.clone(), (index, 0));
            outer_port[level].insert(key, (index, 0));
        }
        blocks.push(level_blocks);
    }

    // tori at radius j+½: cycles of the region-j permutation
    let mut interfaces = Vec::new();
    for region in 0..t {
        let mut visited: Vec<String> = Vec::new();
        for name in page.live(region) {
            if visited.contains(name) {
                continue;
            }
            let mut cycle = vec![name.clone()];
            let mut cur = page.image(region, name);
            while cur != *name {
                cycle.push(cur.clone());
                cur = page.image(region, &cur);
            }
            visited.extend(cycle.iter().cloned());
            let multiplicity = cycle.len();
            let mut key = cycle;
            key.sort();
            let inner = if region == 0 {
                let idx = page
                    .live(0)
                    .iter()
                    .position(|c| c == name)
                    .expect("binding circle");
                Attachment::Binding(idx)
            } else {
                let (index, port) = outer_port[region][&key];
                Attachment::Port {
                    block: BlockId {
                        level: region,
                        index,
                    },
                    side: PortSide::Outer,
                    port,
                }
            };
            let (index, port) = inner_port[region + 1][&key];
            let outer = Attachment::Port {
                block: BlockId {
                    level: region + 1,
                    index,
                },
                side: PortSide::Inner,
                port,
            };
            interfaces.push(InterfaceTorus {
                radius_below: region,
                multiplicity,
                inner,
                outer,
            });
        }
    }

    let directions = directions_from_counts(t, &counts);
    let descriptor = RoundFoldDescriptor {
        levels: t,
        blocks,
        interfaces,
        binding: page.boundary(),
        counts,
        directions,
    };
    debug_assert_eq!(descriptor.verify(), vec![]);
    descriptor
}

/// Identifies the manifold of a connected page with non-empty boundary and
/// identity monodromy: the page bundle is trivial, so the result depends
/// only on χ(F).
pub fn identify_trivial_monodromy(page: &MorsePage) -> Result<TrivialMonodromyManifold, Error> {
    if !page.has_identity_monodromy() {
        return Err(Error::NonIdentityMonodromy);
    }
    if page.boundary() == 0 {
        return Err(Error::ClosedPage);
    }
    if !page.page_connected() {
        return Err(Error::DisconnectedPage);
    }
    let chi = page.euler_characteristic();
    let n = 1 - chi;
    debug_assert!(n >= 0, "connected page with boundary has chi <= 1");
    if n == 0 {
        Ok(TrivialMonodromyManifold::Sphere)
    } else {
        Ok(TrivialMonodromyManifold::ConnectedSumS1xS2(n as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::label_tree;
    use crate::descriptor::Direction;

    fn parse(text: &str) -> DecompositionGraph {
        DecompositionGraph::parse(text).unwrap()
    }

    fn build(text: &str) -> RoundFoldDescriptor {
        let g = parse(text);
        let labeling = label_tree(&g).unwrap();
        construct_directed(&g, &labeling).unwrap()
    }

    #[test]
    fn single_edge_gives_minimal_descriptor() {
        let d = build("piece 0 solidtorus\npiece 1 solidtorus\nglue 0.0 1.0 0 1 1 0\n");
        assert_eq!(d.levels, 1);
        assert_eq!(d.counts, vec![1, 0]);
        assert_eq!(d.binding, 1);
        assert_eq!(d.verify(), vec![]);
        assert!(d.is_directed().unwrap());
    }

    #[test]
    fn star_tree_gives_two_levels() {
        let d = build(
            "piece 0 pants\npiece 1 solidtorus\npiece 2 solidtorus\npiece 3 solidtorus\n\
             glue 0.0 1.0 0 1 1 0\nglue 0.1 2.0 0 1 1 0\nglue 0.2 3.0 0 1 1 0\n",
        );
        assert_eq!(d.levels, 2);
        assert_eq!(d.counts, vec![2, 1, 0]);
        assert_eq!(d.directions, vec![Direction::Inward, Direction::Inward]);
        assert_eq!(d.binding, 2);
        assert_eq!(d.verify(), vec![]);
        assert!(d.is_directed().unwrap());
    }

    #[test]
    fn buffers_produce_no_level() {
        let d = build(
            "piece 0 solidtorus\npiece 1 thicktorus\npiece 2 solidtorus\n\
             glue 0.0 1.0 0 1 1 0\nglue 1.1 2.0 0 1 1 0\n",
        );
        assert_eq!(d.levels, 1);
        assert_eq!(d.counts, vec![1, 0]);
    }

    #[test]
    fn extracted_graph_is_isomorphic_after_smoothing() {
        let text = "piece 0 pants\npiece 1 solidtorus\npiece 2 solidtorus\npiece 3 pants\n\
                    piece 4 solidtorus\npiece 5 solidtorus\npiece 6 thicktorus\n\
                    glue 0.0 1.0 0 1 1 0\nglue 0.1 2.0 0 1 1 0\nglue 0.2 6.0 0 1 1 0\n\
                    glue 6.1 3.0 0 1 1 0\nglue 3.1 4.0 0 1 1 0\nglue 3.2 5.0 0 1 1 0\n";
        let g = parse(text);
        let labeling = label_tree(&g).unwrap();
        let d = construct_directed(&g, &labeling).unwrap();
        assert_eq!(d.verify(), vec![]);
        assert_eq!(d.levels, 3);
        assert_eq!(d.counts, vec![3, 2, 1, 0]);
        let extracted = d.extract_decomposition_graph().unwrap();
        let original = g.shape().smooth_buffers().tree_code().unwrap();
        let recovered = extracted.shape().smooth_buffers().tree_code().unwrap();
        assert_eq!(original, recovered);
    }

    #[test]
    fn non_tree_and_non_plumbing_inputs_are_rejected() {
        let theta = parse(
            "piece 0 pants\npiece 1 pants\nglue 0.0 1.0 -1 0 0 1\nglue 0.1 1.1 -1 0 0 1\nglue 0.2 1.2 -1 0 0 1\n",
        );
        let labeling = TreeLabeling {
            labels: [(0, 1), (1, 2)].into_iter().collect(),
            root: 1,
        };
        assert!(matches!(
            construct_directed(&theta, &labeling),
            Err(Error::NotATree(_))
        ));

        let crooked = parse("piece 0 solidtorus\npiece 1 solidtorus\nglue 0.0 1.0 -1 0 5 1\n");
        let labeling = label_tree(&crooked).unwrap();
        assert!(matches!(
            construct_directed(&crooked, &labeling),
            Err(Error::NotPlumbingType { .. })
        ));
    }

    #[test]
    fn punctured_torus_page_counts_and_directions() {
        let page = MorsePage::parse(
            "boundary 1\nevent 1 split b0 -> a c\nevent 2 merge a c -> d\nevent 3 death d\n",
        )
        .unwrap();
        let d = descriptor_from_morse(&page);
        assert_eq!(d.levels, 3);
        assert_eq!(d.counts, vec![1, 2, 1, 0]);
        assert_eq!(
            d.directions,
            vec![Direction::Outward, Direction::Inward, Direction::Inward]
        );
        assert_eq!(d.verify(), vec![]);
        assert!(!d.is_directed().unwrap());
    }

    #[test]
    fn pants_page_is_directed() {
        let page = MorsePage::parse(
            "boundary 3\nevent 1 merge b0 b1 -> c\nevent 2 merge c b2 -> d\nevent 3 death d\n",
        )
        .unwrap();
        let d = descriptor_from_morse(&page);
        assert_eq!(d.counts, vec![3, 2, 1, 0]);
        assert!(d.is_directed().unwrap());
        assert_eq!(d.verify(), vec![]);
    }

    #[test]
    fn disk_page_gives_level_one_descriptor() {
        let page = MorsePage::parse("boundary 1\nevent 1 death b0\n").unwrap();
        let d = descriptor_from_morse(&page);
        assert_eq!(d.levels, 1);
        assert_eq!(d.counts, vec![1, 0]);
        assert_eq!(d.verify(), vec![]);
    }

    #[test]
    fn closed_page_gives_empty_binding() {
        let page = MorsePage::parse("boundary 0\nevent 1 birth a\nevent 2 death a\n").unwrap();
        let d = descriptor_from_morse(&page);
        assert_eq!(d.binding, 0);
        assert_eq!(d.counts, vec![0, 1, 0]);
        assert_eq!(d.verify(), vec![]);
        assert!(!d.is_directed().unwrap());
    }

    #[test]
    fn twisted_events_produce_twisted_blocks() {
        let page = MorsePage::parse(
            "boundary 1\nevent 1 split b0 -> a c\nevent 2 merge a c -> d\nevent 3 death d\nmonodromy 1 (a c)\n",
        )
        .unwrap();
        let d = descriptor_from_morse(&page);
        assert_eq!(d.verify(), vec![]);
        assert_eq!(
            d.blocks[0][0],
            BlockKind::Pants {
                orientation: PantsOrientation::OneInTwoOut,
                twisted: true
            }
        );
        assert_eq!(
            d.blocks[1][0],
            BlockKind::Pants {
                orientation: PantsOrientation::TwoInOneOut,
                twisted: true
            }
        );
        // the swapped pair crosses radius 1.5 as a single multiplicity-2 torus
        let mu2: Vec<_> = d
            .interfaces
            .iter()
            .filter(|t| t.multiplicity == 2)
            .collect();
        assert_eq!(mu2.len(), 1);
        assert_eq!(mu2[0].radius_below, 1);
    }

    #[test]
    fn annulus_cycles_follow_the_monodromy() {
        let page = MorsePage::parse(
            "boundary 1\nevent 1 split b0 -> a c\nevent 2 birth e\nevent 3 merge a c -> f\n\
             event 4 merge e f -> g\nevent 5 death g\nmonodromy 1 (a c)\nmonodromy 2 (a c)\n",
        )
        .unwrap();
        let d = descriptor_from_morse(&page);
        assert_eq!(d.verify(), vec![]);
        // level 2: birth block plus one annulus of two copies
        assert_eq!(d.blocks[1].len(), 2);
        assert!(d.blocks[1].contains(&BlockKind::Annulus { copies: 2 }));
    }

    #[test]
    fn identify_examples() {
        let disk = MorsePage::parse("boundary 1\nevent 1 death b0\n").unwrap();
        assert_eq!(identify_trivial_monodromy(&disk).unwrap().to_string(), "S3");
        let g1 = MorsePage::parse(
            "boundary 1\nevent 1 split b0 -> a c\nevent 2 merge a c -> d\nevent 3 death d\n",
        )
        .unwrap();
        assert_eq!(
            identify_trivial_monodromy(&g1).unwrap().to_string(),
            "#_2(S1xS2)"
        );
        let g2 = MorsePage::parse(
            "boundary 3\nevent 1 merge b0 b1 -> c\nevent 2 merge c b2 -> d\nevent 3 death d\n",
        )
        .unwrap();
        assert_eq!(
            identify_trivial_monodromy(&g2).unwrap().to_string(),
            "#_2(S1xS2)"
        );
    }

    #[test]
    fn identify_rejections() {
        let twisted = MorsePage::parse(
            "boundary 1\nevent 1 split b0 -> a c\nevent 2 merge a c -> d\nevent 3 death d\nmonodromy 1 (a c)\n",
        )
        .unwrap();
        assert!(matches!(
            identify_trivial_monodromy(&twisted),
            Err(Error::NonIdentityMonodromy)
        ));
        let closed = MorsePage::parse("boundary 0\nevent 1 birth a\nevent 2 death a\n").unwrap();
        assert!(matches!(
            identify_trivial_monodromy(&closed),
            Err(Error::ClosedPage)
        ));
        let two_disks =
            MorsePage::parse("boundary 2\nevent 1 death b0\nevent 2 death b1\n").unwrap();
        assert!(matches!(
            identify_trivial_monodromy(&two_disks),
            Err(Error::DisconnectedPage)
        ));
    }
}
