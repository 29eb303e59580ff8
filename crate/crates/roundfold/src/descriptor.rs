//! Fold-level descriptors of round fold maps.
//!
//! A descriptor records, for a map with `t` concentric critical circles
//! (circle `C_k` at radius `k`), what sits over each critical annulus
//! `C_[k−½, k+½]`: exactly one singular block (a disk- or pants-fibered
//! solid piece containing the level's fold circle) plus any number of
//! annulus blocks (fibered by `m` annuli cyclically permuted by the bundle
//! monodromy). Interface tori live at the half radii and match block ports;
//! binding tubes sit at radius ½ with multiplicity 1. Fiber counts `n_j`
//! give the number of regular-fiber components over the region between
//! `C_j` and `C_{j+1}`.
//!
//! The `.rfd` text format:
//!
//! ```text
//! levels <t>
//! binding <count>
//! counts <n_0> ... <n_t>
//! block <level> disk inner|outer
//! block <level> pants 2in1out|1in2out [twisted]
//! block <level> annulus <m>
//! torus <k>.5 mu <m> <ref> <ref>
//! ```
//!
//! where a `<ref>` is `b<i>.o0` for binding tube `i` or
//! `<level>:<index>.<i|o><port>` for a block port; block indices count the
//! `block` lines of that level in order.

use std::collections::BTreeMap;
use std::fmt;

use crate::graph::{DecompositionGraph, Gluing, PieceKind, PortRef};
use crate::mat::Mat2;
use crate::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Inward,
    Outward,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Inward => write!(f, "inward"),
            Direction::Outward => write!(f, "outward"),
        }
    }
}

/// Which side the boundary torus of a disk block faces.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DiskSide {
    Inner,
    Outer,
}

/// Which way the pants opens: two boundary circles toward the center and one
/// outward, or the reverse.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PantsOrientation {
    TwoInOneOut,
    OneInTwoOut,
}

/// One connected component of the preimage of a critical annulus.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockKind {
    /// `D²`-fibered solid torus around a definite fold circle.
    Disk { side: DiskSide },
    /// `P`-fibered piece around an indefinite fold circle. `twisted` means
    /// the monodromy swaps the two same-side boundary circles, merging their
    /// tori into one of multiplicity 2 (a non-trivial pants bundle).
    Pants {
        orientation: PantsOrientation,
        twisted: bool,
    },
    /// `m` parallel annuli cyclically permuted by the monodromy; no fold
    /// circle. Both boundary tori have multiplicity `m`.
    Annulus { copies: usize },
}

impl BlockKind {
    pub fn is_singular(&self) -> bool {
        !matches!(self, BlockKind::Annulus { .. })
    }

    /// Multiplicities of the inner-side ports.
    pub fn inner_ports(&self) -> Vec<usize> {
        match *self {
            BlockKind::Disk {
                side: DiskSide::Inner,
            } => vec![1],
            BlockKind::Disk {
                side: DiskSide::Outer,
            } => vec![],
            BlockKind::Pants {
                orientation: PantsOrientation::TwoInOneOut,
                twisted,
            } => {
                if twisted {
                    vec![2]
                } else {
                    vec![1, 1]
                }
            }
            BlockKind::Pants {
                orientation: PantsOrientation::OneInTwoOut,
                ..
            } => vec![1],
            BlockKind::Annulus { copies } => vec![copies],
        }
    }

    /// Multiplicities of the outer-side ports.
    pub fn outer_ports(&self) -> Vec<usize> {
        match *self {
            BlockKind::Disk {
                side: DiskSide::Inner,
            } => vec![],
            BlockKind::Disk {
                side: DiskSide::Outer,
            } => vec![1],
            BlockKind::Pants {
                orientation: PantsOrientation::TwoInOneOut,
                ..
            } => vec![1],
            BlockKind::Pants {
                orientation: PantsOrientation::OneInTwoOut,
                twisted,
            } => {
                if twisted {
                    vec![2]
                } else {
                    vec![1, 1]
                }
            }
            BlockKind::Annulus { copies } => vec![copies],
        }
    }

    fn keyword(&self) -> String {
        match *self {
            BlockKind::Disk {
                side: DiskSide::Inner,
            } => "disk inner".into(),
            BlockKind::Disk {
                side: DiskSide::Outer,
            } => "disk outer".into(),
            BlockKind::Pants {
                orientation,
                twisted,
            } => {
                let o = match orientation {
                    PantsOrientation::TwoInOneOut => "2in1out",
                    PantsOrientation::OneInTwoOut => "1in2out",
                };
                if twisted {
                    format!("pants {o} twisted")
                } else {
                    format!("pants {o}")
                }
            }
            BlockKind::Annulus { copies } => format!("annulus {copies}"),
        }
    }
}

/// Block address: 1-based level, 0-based index within the level.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct BlockId {
    pub level: usize,
    pub index: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum PortSide {
    Inner,
    Outer,
}

/// One end of an interface torus.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Attachment {
    /// Binding tube at the given index (radius ½ only).
    Binding(usize),
    Port {
        block: BlockId,
        side: PortSide,
        port: usize,
    },
}

impl fmt::Display for Attachment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Attachment::Binding(i) => write!(f, "b{i}.o0"),
            Attachment::Port { block, side, port } => {
                let s = match side {
                    PortSide::Inner => 'i',
                    PortSide::Outer => 'o',
                };
                write!(f, "{}:{}.{s}{port}", block.level, block.index)
            }
        }
    }
}

/// Torus at radius `radius_below + ½` joining the outer side of level
/// `radius_below` (or a binding tube, when 0) to the inner side of level
/// `radius_below + 1`. `multiplicity` is the number of fiber circles it
/// carries per regular point.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct InterfaceTorus {
    pub radius_below: usize,
    pub multiplicity: usize,
    pub inner: Attachment,
    pub outer: Attachment,
}

/// Combinatorial shadow of a round fold map: levels of critical circles,
/// per-level blocks, interface tori at half radii, binding components, and
/// regular-fiber counts. Directions are derived from the counts and cached;
/// the verifier recomputes and compares them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RoundFoldDescriptor {
    pub levels: usize,
    /// `blocks[k - 1]` are the blocks of level k.
    pub blocks: Vec<Vec<BlockKind>>,
    pub interfaces: Vec<InterfaceTorus>,
    pub binding: usize,
    /// `counts[j]` = n_j, regular-fiber components between C_j and C_{j+1}.
    pub counts: Vec<usize>,
    pub directions: Vec<Direction>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum DescriptorViolation {
    NoLevels,
    CountsLength {
        expected: usize,
        got: usize,
    },
    OutermostCountNonzero {
        count: usize,
    },
    BindingCountMismatch {
        binding: usize,
        n0: usize,
    },
    MissingSingularBlock {
        level: usize,
    },
    MultipleSingularBlocks {
        level: usize,
        count: usize,
    },
    EmptyAnnulusBlock {
        block: BlockId,
    },
    OutermostNotDisk,
    OutermostExtraBlocks {
        count: usize,
    },
    CountJump {
        level: usize,
        from: usize,
        to: usize,
    },
    RegionCountMismatch {
        region: usize,
        source: &'static str,
        got: usize,
        want: usize,
    },
    InvalidAttachment {
        torus: usize,
        detail: String,
    },
    MultiplicityMismatch {
        torus: usize,
        attachment: Attachment,
        torus_mu: usize,
        port_mu: usize,
    },
    UnattachedPort {
        attachment: Attachment,
    },
    PortReused {
        attachment: Attachment,
    },
    Disconnected,
    StaleDirections {
        level: usize,
    },
    TwistedPantsInDirected {
        level: usize,
    },
}

impl fmt::Display for DescriptorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DescriptorViolation::*;
        match self {
            NoLevels => write!(f, "descriptor has no critical levels"),
            CountsLength { expected, got } => {
                write!(f, "counts: expected {expected} values, got {got}")
            }
            OutermostCountNonzero { count } => {
                write!(f, "outermost region: fiber count {count}, expected 0")
            }
            BindingCountMismatch { binding, n0 } => {
                write!(
                    f,
                    "binding components {binding} != innermost fiber count {n0}"
                )
            }
            MissingSingularBlock { level } => {
                write!(f, "level {level}: missing singular block")
            }
            MultipleSingularBlocks { level, count } => {
                write!(
                    f,
                    "level {level}: {count} singular blocks, expected exactly one"
                )
            }
            EmptyAnnulusBlock { block } => write!(
                f,
                "level {}: annulus block {} has zero copies",
                block.level, block.index
            ),
            OutermostNotDisk => {
                write!(
                    f,
                    "outermost level: singular block is not an inner-facing disk"
                )
            }
            OutermostExtraBlocks { count } => {
                write!(f, "outermost level: {count} blocks, expected a single disk")
            }
            CountJump { level, from, to } => {
                write!(
                    f,
                    "level {level}: fiber count jumps by {} ({from} -> {to})",
                    (*to as i64 - *from as i64).abs()
                )
            }
            RegionCountMismatch {
                region,
                source,
                got,
                want,
            } => write!(
                f,
                "region {region}: {source} gives fiber count {got}, stored count is {want}"
            ),
            InvalidAttachment { torus, detail } => {
                write!(f, "torus {torus}: invalid attachment ({detail})")
            }
            MultiplicityMismatch {
                torus,
                attachment,
                torus_mu,
                port_mu,
            } => write!(
                f,
                "torus {torus}: multiplicity {torus_mu} does not match port {attachment} of multiplicity {port_mu}"
            ),
            UnattachedPort { attachment } => write!(f, "port {attachment} is unattached"),
            PortReused { attachment } => write!(f, "port {attachment} is attached twice"),
            Disconnected => write!(f, "block adjacency is not connected"),
            StaleDirections { level } => {
                write!(f, "level {level}: cached direction disagrees with counts")
            }
            TwistedPantsInDirected { level } => {
                write!(f, "level {level}: twisted pants block in a directed map")
            }
        }
    }
}

impl RoundFoldDescriptor {
    /// Direction of each critical circle per the count rule, with the count
    /// consistency precondition enforced.
    pub fn compute_directions(&self) -> Result<Vec<Direction>, Error> {
        if self.counts.len() != self.levels + 1 {
            return Err(Error::InconsistentCounts {
                level: 0,
                from: self.counts.len(),
                to: self.levels + 1,
            });
        }
        for k in 1..=self.levels {
            let (from, to) = (self.counts[k - 1], self.counts[k]);
            if from.abs_diff(to) != 1 {
                return Err(Error::InconsistentCounts { level: k, from, to });
            }
        }
        Ok(directions_from_counts(self.levels, &self.counts))
    }

    /// Whether every critical circle is inward-directed. Cross-checks the
    /// equivalent criterion n₀ = t and reports an internal error if the two
    /// ever disagree.
    pub fn is_directed(&self) -> Result<bool, Error> {
        let dirs = self.compute_directions()?;
        let all_inward = dirs.iter().all(|&d| d == Direction::Inward);
        let by_count = self.counts.first().copied() == Some(self.levels);
        if all_inward != by_count {
            return Err(Error::Internal(format!(
                "direction criterion ({all_inward}) disagrees with n0 = t ({by_count})"
            )));
        }
        Ok(all_inward)
    }

    pub fn block(&self, id: BlockId) -> Option<BlockKind> {
        self.blocks
            .get(id.level.wrapping_sub(1))?
            .get(id.index)
            .copied()
    }

    /// Full structural verification; an empty list means the descriptor is a
    /// consistent round fold map of a closed connected orientable manifold.
    pub fn verify(&self) -> Vec<DescriptorViolation> {
        let mut out = Vec::new();
        let t = self.levels;
        if t == 0 || self.blocks.len() != t {
            out.push(DescriptorViolation::NoLevels);
            return out;
        }
        if self.counts.len() != t + 1 {
            out.push(DescriptorViolation::CountsLength {
                expected: t + 1,
                got: self.counts.len(),
            });
            return out;
        }
        if self.counts[t] != 0 {
            out.push(DescriptorViolation::OutermostCountNonzero {
                count: self.counts[t],
            });
        }
        if self.binding != self.counts[0] {
            out.push(DescriptorViolation::BindingCountMismatch {
                binding: self.binding,
                n0: self.counts[0],
            });
        }

        for level in 1..=t {
            let blocks = &self.blocks[level - 1];
            let singular = blocks.iter().filter(|b| b.is_singular()).count();
            match singular {
                0 => out.push(DescriptorViolation::MissingSingularBlock { level }),
                1 => {}
                count => out.push(DescriptorViolation::MultipleSingularBlocks { level, count }),
            }
            for (index, block) in blocks.iter().enumerate() {
                if matches!(block, BlockKind::Annulus { copies: 0 }) {
                    out.push(DescriptorViolation::EmptyAnnulusBlock {
                        block: BlockId { level, index },
                    });
                }
            }
        }

        let outermost = &self.blocks[t - 1];
        if outermost.len() != 1 {
            out.push(DescriptorViolation::OutermostExtraBlocks {
                count: outermost.len(),
            });
        }
        match outermost.iter().find(|b| b.is_singular()) {
            Some(BlockKind::Disk {
                side: DiskSide::Inner,
            }) => {}
            _ => out.push(DescriptorViolation::OutermostNotDisk),
        }

        for level in 1..=t {
            let (from, to) = (self.counts[level - 1], self.counts[level]);
            if from.abs_diff(to) != 1 {
                out.push(DescriptorViolation::CountJump { level, from, to });
            }
        }

        // region counts from three independent sources
        for region in 0..=t {
            let want = self.counts[region];
            if region >= 1 {
                let got: usize = self.blocks[region - 1]
                    .iter()
                    .flat_map(|b| b.outer_ports())
                    .sum();
                if got != want {
                    out.push(DescriptorViolation::RegionCountMismatch {
                        region,
                        source: "outer ports of the level below",
                        got,
                        want,
                    });
                }
            }
            if region < t {
                let got: usize = self.blocks[region]
                    .iter()
                    .flat_map(|b| b.inner_ports())
                    .sum();
                if got != want {
                    out.push(DescriptorViolation::RegionCountMismatch {
                        region,
                        source: "inner ports of the level above",
                        got,
                        want,
                    });
                }
                let got: usize = self
                    .interfaces
                    .iter()
                    .filter(|i| i.radius_below == region)
                    .map(|i| i.multiplicity)
                    .sum();
                if got != want {
                    out.push(DescriptorViolation::RegionCountMismatch {
                        region,
                        source: "interface tori",
                        got,
                        want,
                    });
                }
            }
        }

        // port matching
        let mut usage: BTreeMap<Attachment, usize> = BTreeMap::new();
        for i in 0..self.binding {
            usage.insert(Attachment::Binding(i), 0);
        }
        for (li, blocks) in self.blocks.iter().enumerate() {
            for (index, block) in blocks.iter().enumerate() {
                let id = BlockId {
                    level: li + 1,
                    index,
                };
                for (port, _) in block.inner_ports().iter().enumerate() {
                    usage.insert(
                        Attachment::Port {
                            block: id,
                            side: PortSide::Inner,
                            port,
                        },
                        0,
                    );
                }
                for (port, _) in block.outer_ports().iter().enumerate() {
                    usage.insert(
                        Attachment::Port {
                            block: id,
                            side: PortSide::Outer,
                            port,
                        },
                        0,
                    );
                }
            }
        }

        for (ti, torus) in self.interfaces.iter().enumerate() {
            if torus.radius_below >= t {
                out.push(DescriptorViolation::InvalidAttachment {
                    torus: ti,
                    detail: format!("radius {}.5 is outside the map", torus.radius_below),
                });
                continue;
            }
            let sides = [
                (torus.inner, PortSide::Outer, torus.radius_below),
                (torus.outer, PortSide::Inner, torus.radius_below + 1),
            ];
            for (attachment, expect_side, expect_level) in sides {
                let port_mu = match attachment {
                    Attachment::Binding(i) => {
                        if expect_side == PortSide::Inner || torus.radius_below != 0 {
                            out.push(DescriptorViolation::InvalidAttachment {
                                torus: ti,
                                detail: format!("binding tube b{i} can only sit under level 1"),
                            });
                            continue;
                        }
                        if i >= self.binding {
                            out.push(DescriptorViolation::InvalidAttachment {
                                torus: ti,
                                detail: format!("binding tube b{i} does not exist"),
                            });
                            continue;
                        }
                        1
                    }
                    Attachment::Port { block, side, port } => {
                        if expect_level == 0 || block.level != expect_level || side != expect_side {
                            out.push(DescriptorViolation::InvalidAttachment {
                                torus: ti,
                                detail: format!(
                                    "expected a level-{expect_level} {} port, found {attachment}",
                                    match expect_side {
                                        PortSide::Inner => "inner",
                                        PortSide::Outer => "outer",
                                    }
                                ),
                            });
                            continue;
                        }
                        let Some(kind) = self.block(block) else {
                            out.push(DescriptorViolation::InvalidAttachment {
                                torus: ti,
                                detail: format!(
                                    "block {}:{} does not exist",
                                    block.level, block.index
                                ),
                            });
                            continue;
                        };
                        let ports = match side {
                            PortSide::Inner => kind.inner_ports(),
                            PortSide::Outer => kind.outer_ports(),
                        };
                        let Some(&mu) = ports.get(port) else {
                            out.push(DescriptorViolation::InvalidAttachment {
                                torus: ti,
                                detail: format!("port {attachment} does not exist"),
                            });
                            continue;
                        };
                        mu
                    }
                };
                if port_mu != torus.multiplicity {
                    out.push(DescriptorViolation::MultiplicityMismatch {
                        torus: ti,
                        attachment,
                        torus_mu: torus.multiplicity,
                        port_mu,
                    });
                }
                if let Some(count) = usage.get_mut(&attachment) {
                    *count += 1;
                }
            }
        }
        for (attachment, count) in &usage {
            match count {
                0 => out.push(DescriptorViolation::UnattachedPort {
                    attachment: *attachment,
                }),
                1 => {}
                _ => out.push(DescriptorViolation::PortReused {
                    attachment: *attachment,
                }),
            }
        }

        if !self.adjacency_connected() {
            out.push(DescriptorViolation::Disconnected);
        }

        // cached directions vs counts
        let recomputed = directions_from_counts(t, &self.counts);
        if self.directions.len() != t {
            out.push(DescriptorViolation::StaleDirections { level: 0 });
        } else {
            for (k, (&cached, &fresh)) in self.directions.iter().zip(recomputed.iter()).enumerate()
            {
                if cached != fresh {
                    out.push(DescriptorViolation::StaleDirections { level: k + 1 });
                }
            }
        }

        // a directed map never contains a non-trivial pants bundle
        if recomputed.iter().all(|&d| d == Direction::Inward) {
            for (li, blocks) in self.blocks.iter().enumerate() {
                for block in blocks {
                    if matches!(block, BlockKind::Pants { twisted: true, .. }) {
                        out.push(DescriptorViolation::TwistedPantsInDirected { level: li + 1 });
                    }
                }
            }
        }
        out
    }

    fn adjacency_connected(&self) -> bool {
        // nodes: binding tubes then blocks in (level, index) order
        let mut binding_node: BTreeMap<usize, usize> = BTreeMap::new();
        let mut n = 0;
        for i in 0..self.binding {
            binding_node.insert(i, n);
            n += 1;
        }
        let mut block_node: BTreeMap<BlockId, usize> = BTreeMap::new();
        for (li, blocks) in self.blocks.iter().enumerate() {
            for (bi, _) in blocks.iter().enumerate() {
                block_node.insert(
                    BlockId {
                        level: li + 1,
                        index: bi,
                    },
                    n,
                );
                n += 1;
            }
        }
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        let node_of = |a: &Attachment| match a {
            Attachment::Binding(i) => binding_node.get(i).copied(),
            Attachment::Port { block, .. } => block_node.get(block).copied(),
        };
        for torus in &self.interfaces {
            if let (Some(a), Some(b)) = (node_of(&torus.inner), node_of(&torus.outer)) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        let mut visited = 0;
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            visited += 1;
            stack.extend(adj[v].iter().copied().filter(|&u| !seen[u]));
        }
        visited == n
    }

    /// The decomposition graph obtained by cutting along every interface
    /// torus: disks and binding tubes become solid tori, pants blocks become
    /// `P × S¹`, annulus blocks become thick tori, every gluing gets the
    /// plumbing matrix. Twisted pants and permuted annuli have no vertex kind
    /// and are rejected.
    pub fn extract_decomposition_graph(&self) -> Result<DecompositionGraph, Error> {
        let violations = self.verify();
        if !violations.is_empty() {
            return Err(Error::InvalidDescriptor(violations));
        }
        for blocks in &self.blocks {
            for block in blocks {
                match block {
                    BlockKind::Pants { twisted: true, .. } => {
                        return Err(Error::Unrepresentable(
                            "twisted pants block is a non-trivial bundle".into(),
                        ))
                    }
                    BlockKind::Annulus { copies } if *copies > 1 => {
                        return Err(Error::Unrepresentable(
                            "permuted annulus block not representable".into(),
                        ))
                    }
                    _ => {}
                }
            }
        }

        let mut pieces = BTreeMap::new();
        let mut id_of_block: BTreeMap<BlockId, usize> = BTreeMap::new();
        let mut next = 0usize;
        for i in 0..self.binding {
            pieces.insert(i, PieceKind::SolidTorus);
            next = i + 1;
        }
        for (li, blocks) in self.blocks.iter().enumerate() {
            for (bi, block) in blocks.iter().enumerate() {
                let kind = match block {
                    BlockKind::Disk { .. } => PieceKind::SolidTorus,
                    BlockKind::Pants { .. } => PieceKind::PantsS1,
                    BlockKind::Annulus { .. } => PieceKind::ThickTorus,
                };
                id_of_block.insert(
                    BlockId {
                        level: li + 1,
                        index: bi,
                    },
                    next,
                );
                pieces.insert(next, kind);
                next += 1;
            }
        }

        let port_of = |a: &Attachment| -> PortRef {
            match *a {
                Attachment::Binding(i) => PortRef { piece: i, port: 0 },
                Attachment::Port { block, side, port } => {
                    let kind = self.block(block).unwrap();
                    let inner_count = kind.inner_ports().len();
                    let port = match side {
                        PortSide::Inner => port,
                        PortSide::Outer => inner_count + port,
                    };
                    PortRef {
                        piece: id_of_block[&block],
                        port,
                    }
                }
            }
        };
        let gluings = self
            .interfaces
            .iter()
            .map(|torus| {
                Gluing::new(
                    port_of(&torus.inner),
                    port_of(&torus.outer),
                    Mat2::plumbing(),
                )
            })
            .collect();
        Ok(DecompositionGraph::new(pieces, gluings))
    }

    /// Canonical `.rfd` text.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("levels {}\n", self.levels));
        out.push_str(&format!("binding {}\n", self.binding));
        let counts: Vec<String> = self.counts.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("counts {}\n", counts.join(" ")));
        for (li, blocks) in self.blocks.iter().enumerate() {
            for block in blocks {
                out.push_str(&format!("block {} {}\n", li + 1, block.keyword()));
            }
        }
        let mut tori = self.interfaces.clone();
        tori.sort_by_key(|t| (t.radius_below, t.inner, t.outer));
        for torus in &tori {
            out.push_str(&format!(
                "torus {}.5 mu {} {} {}\n",
                torus.radius_below, torus.multiplicity, torus.inner, torus.outer
            ));
        }
        out
    }

    /// Parses `.rfd` text. Only syntactic shape is enforced here; semantic
    /// problems surface through [`RoundFoldDescriptor::verify`].
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut levels: Option<usize> = None;
        let mut binding: Option<usize> = None;
        let mut counts: Option<Vec<usize>> = None;
        let mut blocks_raw: Vec<(usize, BlockKind, usize)> = Vec::new();
        let mut tori_raw: Vec<(usize, usize, String, String, usize)> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let body = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let toks: Vec<&str> = body.split_whitespace().collect();
            let Some(&verb) = toks.first() else { continue };
            let syntax = |message: String| Error::Syntax {
                line,
                column: 1,
                message,
            };
            match verb {
                "levels" => levels = Some(single_number(&toks, line)?),
                "binding" => binding = Some(single_number(&toks, line)?),
                "counts" => {
                    let values: Result<Vec<usize>, _> =
                        toks[1..].iter().map(|s| s.parse()).collect();
                    counts =
                        Some(values.map_err(|_| syntax("counts expects numbers".to_string()))?);
                }
                "block" => {
                    if toks.len() < 3 {
                        return Err(syntax("expected `block <level> <kind> ...`".into()));
                    }
                    let level: usize = toks[1]
                        .parse()
                        .map_err(|_| syntax(format!("bad level `{}`", toks[1])))?;
                    let kind = match (toks[2], toks.get(3), toks.get(4)) {
                        ("disk", Some(&"inner"), None) => BlockKind::Disk {
                            side: DiskSide::Inner,
                        },
                        ("disk", Some(&"outer"), None) => BlockKind::Disk {
                            side: DiskSide::Outer,
                        },
                        ("pants", Some(&o), rest) => {
                            let orientation = match o {
                                "2in1out" => PantsOrientation::TwoInOneOut,
                                "1in2out" => PantsOrientation::OneInTwoOut,
                                other => {
                                    return Err(syntax(format!("bad pants orientation `{other}`")))
                                }
                            };
                            let twisted = match rest {
                                None => false,
                                Some(&"twisted") => true,
                                Some(other) => {
                                    return Err(syntax(format!("unexpected token `{other}`")))
                                }
                            };
                            BlockKind::Pants {
                                orientation,
                                twisted,
                            }
                        }
                        ("annulus", Some(&m), None) => BlockKind::Annulus {
                            copies: m
                                .parse()
                                .map_err(|_| syntax(format!("bad annulus count `{m}`")))?,
                        },
                        _ => return Err(syntax(format!("bad block kind `{}`", toks[2]))),
                    };
                    blocks_raw.push((level, kind, line));
                }
                "torus" => {
                    if toks.len() != 6 || toks[2] != "mu" {
                        return Err(syntax("expected `torus <k>.5 mu <m> <ref> <ref>`".into()));
                    }
                    let radius = toks[1];
                    let below: usize = radius
                        .strip_suffix(".5")
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(format!("bad half radius `{radius}`")))?;
                    let mu: usize = toks[3]
                        .parse()
                        .map_err(|_| syntax(format!("bad multiplicity `{}`", toks[3])))?;
                    tori_raw.push((below, mu, toks[4].to_string(), toks[5].to_string(), line));
                }
                other => return Err(syntax(format!("unknown statement `{other}`"))),
            }
        }

        let levels = levels.ok_or(Error::Syntax {
            line: 0,
            column: 0,
            message: "missing `levels` statement".into(),
        })?;
        let counts = counts.ok_or(Error::Syntax {
            line: 0,
            column: 0,
            message: "missing `counts` statement".into(),
        })?;
        let binding = binding.unwrap_or(0);
        for (what, value) in [("levels", levels), ("binding", binding)] {
            if value > crate::graph::MAX_STRUCTURE {
                return Err(Error::Syntax {
                    line: 0,
                    column: 0,
                    message: format!(
                        "{what} {value} exceeds the limit {}",
                        crate::graph::MAX_STRUCTURE
                    ),
                });
            }
        }

        let mut blocks: Vec<Vec<BlockKind>> = vec![Vec::new(); levels];
        for (level, kind, line) in blocks_raw {
            if level == 0 || level > levels {
                return Err(Error::Syntax {
                    line,
                    column: 1,
                    message: format!("block level {level} out of range 1..={levels}"),
                });
            }
            blocks[level - 1].push(kind);
        }
        let interfaces = tori_raw
            .into_iter()
            .map(|(radius_below, multiplicity, a, b, line)| {
                Ok(InterfaceTorus {
                    radius_below,
                    multiplicity,
                    inner: parse_attachment(&a, line)?,
                    outer: parse_attachment(&b, line)?,
                })
            })
            .collect::<Result<Vec<_>, Error>>()?;

        let directions = directions_from_counts(levels, &counts);
        Ok(RoundFoldDescriptor {
            levels,
            blocks,
            interfaces,
            binding,
            counts,
            directions,
        })
    }
}

/// Total direction rule: inward exactly when the inner side has one more
/// fiber component. Used for the cache;
/// [`RoundFoldDescriptor::compute_directions`] additionally enforces |Δ| = 1.
pub fn directions_from_counts(levels: usize, counts: &[usize]) -> Vec<Direction> {
    (1..=levels)
        .map(|k| {
            let inner = counts.get(k - 1).copied().unwrap_or(0);
            let outer = counts.get(k).copied().unwrap_or(0);
            if inner == outer + 1 {
                Direction::Inward
            } else {
                Direction::Outward
            }
        })
        .collect()
}

fn single_number(toks: &[&str], line: usize) -> Result<usize, Error> {
    if toks.len() != 2 {
        return Err(Error::Syntax {
            line,
            column: 1,
            message: format!("expected `{} <number>`", toks[0]),
        });
    }
    toks[1].parse().map_err(|_| Error::Syntax {
        line,
        column: 1,
        message: format!("bad number `{}`", toks[1]),
    })
}

fn parse_attachment(text: &str, line: usize) -> Result<Attachment, Error> {
    let err = |message: String| Error::Syntax {
        line,
        column: 1,
        message,
    };
    if let Some(rest) = text.strip_prefix('b') {
        if let Some((idx, port)) = rest.split_once('.') {
            if let Ok(i) = idx.parse::<usize>() {
                if port == "o0" {
                    return Ok(Attachment::Binding(i));
                }
                return Err(err(format!(
                    "binding tube reference `{text}` must use port o0"
                )));
            }
        }
    }
    let (block_part, port_part) = text
        .split_once('.')
        .ok_or_else(|| err(format!("bad attachment `{text}`")))?;
    let (level, index) = block_part
        .split_once(':')
        .ok_or_else(|| err(format!("bad block reference `{block_part}`")))?;
    let level: usize = level
        .parse()
        .map_err(|_| err(format!("bad level in `{text}`")))?;
    let index: usize = index
        .parse()
        .map_err(|_| err(format!("bad block index in `{text}`")))?;
    let side = match port_part.chars().next() {
        Some('i') => PortSide::Inner,
        Some('o') => PortSide::Outer,
        _ => return Err(err(format!("bad port side in `{text}`"))),
    };
    let port: usize = port_part[1..]
        .parse()
        .map_err(|_| err(format!("bad port index in `{text}`")))?;
    Ok(Attachment::Port {
        block: BlockId { level, index },
        side,
        port,
    })
}

#[cfg(test)]
pub(crate) fn minimal_descriptor() -> RoundFoldDescriptor {
    RoundFoldDescriptor {
        levels: 1,
        blocks: vec![vec![BlockKind::Disk {
            side: DiskSide::Inner,
        }]],
        interfaces: vec![InterfaceTorus {
            radius_below: 0,
            multiplicity: 1,
            inner: Attachment::Binding(0),
            outer: Attachment::Port {
                block: BlockId { level: 1, index: 0 },
                side: PortSide::Inner,
                port: 0,
            },
        }],
        binding: 1,
        counts: vec![1, 0],
        directions: vec![Direction::Inward],
    }
}
