//! Decomposition graphs of graph 3-manifolds.
//!
//! A piece is a fibered block (`P × S¹`, `D² × S¹`, `T² × [−1,1]`, or a
//! trivial circle bundle over a genus-zero surface); a gluing identifies two
//! boundary tori by an integer matrix of determinant −1. Each boundary torus
//! carries the ordered basis (μ, λ): λ is the fiber class and μ the section
//! class with its induced boundary orientation (for a solid torus, μ is the
//! meridian and λ the longitude). The matrix columns are the images of the
//! source basis in the target basis.
//!
//! The `.gm` text format has one statement per line with `#` comments:
//!
//! ```text
//! piece <id> pants | solidtorus | thicktorus | bundle <b>
//! glue <id>.<port> <id>.<port> <a> <b> <c> <d>
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::mat::Mat2;
use crate::{Error, GluingMatrix};

pub type PieceId = usize;

/// Upper bound on parsed structural sizes (boundary counts, level counts).
/// Far beyond any sensible decomposition, small enough that a crafted file
/// cannot force huge allocations.
pub(crate) const MAX_STRUCTURE: usize = 100_000;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum PieceKind {
    /// `P × S¹`, three boundary tori.
    PantsS1,
    /// `D² × S¹`, one boundary torus.
    SolidTorus,
    /// `T² × [−1,1]`, two boundary tori. Port 0 carries (x, y), port 1
    /// carries (−x, y): the two boundary circles of the annulus get opposite
    /// induced orientations, which is what keeps every gluing at det −1.
    ThickTorus,
    /// Trivial `S¹`-bundle over a genus-zero surface with `boundary`
    /// components. Input-only; eliminated by the pants reduction.
    GenusZeroBundle { boundary: usize },
}

impl PieceKind {
    pub fn ports(&self) -> usize {
        match self {
            PieceKind::PantsS1 => 3,
            PieceKind::SolidTorus => 1,
            PieceKind::ThickTorus => 2,
            PieceKind::GenusZeroBundle { boundary } => *boundary,
        }
    }

    pub fn keyword(&self) -> String {
        match self {
            PieceKind::PantsS1 => "pants".into(),
            PieceKind::SolidTorus => "solidtorus".into(),
            PieceKind::ThickTorus => "thicktorus".into(),
            PieceKind::GenusZeroBundle { boundary } => format!("bundle {boundary}"),
        }
    }
}

/// One side of a gluing: a piece and one of its boundary-torus ports.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct PortRef {
    pub piece: PieceId,
    pub port: usize,
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.piece, self.port)
    }
}

/// Identification of the boundary torus at `ends[0]` with the one at
/// `ends[1]`; `matrix` expresses the basis of the first in the basis of the
/// second (columns are basis images).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Gluing {
    pub ends: [PortRef; 2],
    pub matrix: GluingMatrix,
}

impl Gluing {
    pub fn new(a: PortRef, b: PortRef, matrix: GluingMatrix) -> Self {
        Gluing {
            ends: [a, b],
            matrix,
        }
    }

    /// Canonical direction: ends ordered ascending. Reversing the direction
    /// inverts the matrix; matrices without an integer inverse are left
    /// as-written (validation will flag them anyway).
    fn normalized(self) -> Self {
        if self.ends[1] < self.ends[0] {
            if let Some(inv) = self.matrix.inverse_unimodular() {
                return Gluing {
                    ends: [self.ends[1], self.ends[0]],
                    matrix: inv,
                };
            }
        }
        self
    }

    fn sort_key(&self) -> (PortRef, PortRef, GluingMatrix) {
        (self.ends[0], self.ends[1], self.matrix)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GraphViolation {
    Empty,
    PortOutOfRange { end: PortRef, ports: usize },
    UngluedPort { end: PortRef },
    PortGluedTwice { end: PortRef },
    BadDeterminant { gluing: usize, det: i64 },
    Disconnected,
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::Empty => write!(f, "empty graph"),
            GraphViolation::PortOutOfRange { end, ports } => {
                write!(f, "port {end} out of range (piece has {ports} ports)")
            }
            GraphViolation::UngluedPort { end } => write!(f, "unglued port {end}"),
            GraphViolation::PortGluedTwice { end } => write!(f, "port {end} glued twice"),
            GraphViolation::BadDeterminant { gluing, det } => {
                write!(f, "gluing {gluing}: determinant {det}, expected -1")
            }
            GraphViolation::Disconnected => write!(f, "graph not connected"),
        }
    }
}

/// Multigraph of fibered pieces with torus gluings. Construction normalizes
/// the gluing list (endpoint order, lexicographic sort), so two semantically
/// equal graphs compare and serialize identically.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DecompositionGraph {
    pieces: BTreeMap<PieceId, PieceKind>,
    gluings: Vec<Gluing>,
}

impl DecompositionGraph {
    pub fn new(pieces: BTreeMap<PieceId, PieceKind>, gluings: Vec<Gluing>) -> Self {
        let mut gluings: Vec<Gluing> = gluings.into_iter().map(Gluing::normalized).collect();
        gluings.sort_by_key(|g| g.sort_key());
        DecompositionGraph { pieces, gluings }
    }

    pub fn pieces(&self) -> &BTreeMap<PieceId, PieceKind> {
        &self.pieces
    }

    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    pub fn kind(&self, id: PieceId) -> Option<PieceKind> {
        self.pieces.get(&id).copied()
    }

    /// Checks every structural invariant; an empty list means the graph is a
    /// closed connected manifold description.
    pub fn validate(&self) -> Vec<GraphViolation> {
        let mut out = Vec::new();
        if self.pieces.is_empty() {
            out.push(GraphViolation::Empty);
            return out;
        }
        let mut usage: BTreeMap<(PieceId, usize), usize> = BTreeMap::new();
        for (idx, g) in self.gluings.iter().enumerate() {
            for end in g.ends {
                match self.pieces.get(&end.piece) {
                    None => out.push(GraphViolation::PortOutOfRange { end, ports: 0 }),
                    Some(kind) if end.port >= kind.ports() => {
                        out.push(GraphViolation::PortOutOfRange {
                            end,
                            ports: kind.ports(),
                        });
                    }
                    Some(_) => {
                        *usage.entry((end.piece, end.port)).or_insert(0) += 1;
                    }
                }
            }
            let det = g.matrix.det();
            if det != -1 {
                out.push(GraphViolation::BadDeterminant { gluing: idx, det });
            }
        }
        for (&id, kind) in &self.pieces {
            for port in 0..kind.ports() {
                match usage.get(&(id, port)).copied().unwrap_or(0) {
                    0 => out.push(GraphViolation::UngluedPort {
                        end: PortRef { piece: id, port },
                    }),
                    1 => {}
                    _ => out.push(GraphViolation::PortGluedTwice {
                        end: PortRef { piece: id, port },
                    }),
                }
            }
        }
        if !self.is_connected() {
            out.push(GraphViolation::Disconnected);
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn degree(&self, id: PieceId) -> usize {
        self.gluings
            .iter()
            .flat_map(|g| g.ends)
            .filter(|e| e.piece == id)
            .count()
    }

    /// Neighbor list with multiplicity, sorted.
    pub fn neighbors(&self, id: PieceId) -> Vec<PieceId> {
        let mut out = Vec::new();
        for g in &self.gluings {
            let [a, b] = g.ends;
            if a.piece == id {
                out.push(b.piece);
            }
            if b.piece == id {
                out.push(a.piece);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        self.shape().is_connected()
    }

    /// Cycle rank |E| − |V| + 1 of the underlying connected multigraph.
    pub fn betti(&self) -> usize {
        (self.gluings.len() + 1).saturating_sub(self.pieces.len())
    }

    pub fn shape(&self) -> GraphShape {
        GraphShape {
            kinds: self.pieces.clone(),
            edges: self
                .gluings
                .iter()
                .map(|g| {
                    let (a, b) = (g.ends[0].piece, g.ends[1].piece);
                    (a.min(b), a.max(b))
                })
                .collect(),
        }
    }

    /// Parses `.gm` text. Syntax problems report line and column; structural
    /// problems are returned as [`Error::InvalidGraph`].
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut pieces: BTreeMap<PieceId, PieceKind> = BTreeMap::new();
        let mut gluings = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let toks = tokenize(raw, line)?;
            let Some(&(col0, verb)) = toks.first() else {
                continue;
            };
            match verb {
                "piece" => {
                    expect_len(&toks, &[3, 4], line, "piece <id> <kind> [b]")?;
                    let id: PieceId = parse_num(toks[1], line)?;
                    let kind = match toks[2].1 {
                        "pants" => PieceKind::PantsS1,
                        "solidtorus" => PieceKind::SolidTorus,
                        "thicktorus" => PieceKind::ThickTorus,
                        "bundle" => {
                            let &(col, b) = toks.get(3).ok_or_else(|| Error::Syntax {
                                line,
                                column: toks[2].0,
                                message: "bundle requires a boundary count".into(),
                            })?;
                            let boundary: usize = b.parse().map_err(|_| Error::Syntax {
                                line,
                                column: col,
                                message: format!("bad boundary count `{b}`"),
                            })?;
                            if boundary > MAX_STRUCTURE {
                                return Err(Error::Syntax {
                                    line,
                                    column: col,
                                    message: format!(
                                        "boundary count {boundary} exceeds the limit {MAX_STRUCTURE}"
                                    ),
                                });
                            }
                            PieceKind::GenusZeroBundle { boundary }
                        }
                        other => {
                            return Err(Error::Syntax {
                                line,
                                column: toks[2].0,
                                message: format!("unknown piece kind `{other}`"),
                            })
                        }
                    };
                    if !matches!(kind, PieceKind::GenusZeroBundle { .. }) && toks.len() != 3 {
                        return Err(Error::Syntax {
                            line,
                            column: toks[3].0,
                            message: "unexpected trailing tokens".into(),
                        });
                    }
                    if pieces.insert(id, kind).is_some() {
                        return Err(Error::Syntax {
                            line,
                            column: toks[1].0,
                            message: format!("duplicate piece id {id}"),
                        });
                    }
                }
                "glue" => {
                    expect_len(&toks, &[7], line, "glue <id>.<port> <id>.<port> a b c d")?;
                    let a = parse_port(toks[1], line)?;
                    let b = parse_port(toks[2], line)?;
                    let m: Vec<i64> = toks[3..7]
                        .iter()
                        .map(|&t| parse_num(t, line))
                        .collect::<Result<_, _>>()?;
                    gluings.push(Gluing::new(a, b, Mat2::new(m[0], m[1], m[2], m[3])));
                }
                other => {
                    return Err(Error::Syntax {
                        line,
                        column: col0,
                        message: format!("unknown statement `{other}`"),
                    })
                }
            }
        }
        let graph = DecompositionGraph::new(pieces, gluings);
        let violations = graph.validate();
        if violations.is_empty() {
            Ok(graph)
        } else {
            Err(Error::InvalidGraph(violations))
        }
    }

    /// Canonical `.gm` text: pieces sorted by id, gluings in normalized
    /// lexicographic order, LF line endings.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for (id, kind) in &self.pieces {
            out.push_str(&format!("piece {id} {}\n", kind.keyword()));
        }
        for g in &self.gluings {
            let m = g.matrix;
            out.push_str(&format!(
                "glue {} {} {} {} {} {}\n",
                g.ends[0], g.ends[1], m.a, m.b, m.c, m.d
            ));
        }
        out
    }
}

fn tokenize(raw: &str, _line: usize) -> Result<Vec<(usize, &str)>, Error> {
    let body = match raw.find('#') {
        Some(pos) => &raw[..pos],
        None => raw,
    };
    let mut toks = Vec::new();
    let mut offset = 0;
    for chunk in body.split_whitespace() {
        let col = body[offset..].find(chunk).unwrap() + offset;
        toks.push((col + 1, chunk));
        offset = col + chunk.len();
    }
    Ok(toks)
}

fn expect_len(
    toks: &[(usize, &str)],
    allowed: &[usize],
    line: usize,
    usage: &str,
) -> Result<(), Error> {
    if allowed.contains(&toks.len()) {
        Ok(())
    } else {
        Err(Error::Syntax {
            line,
            column: toks[0].0,
            message: format!("expected `{usage}`"),
        })
    }
}

fn parse_num<T: std::str::FromStr>((col, tok): (usize, &str), line: usize) -> Result<T, Error> {
    tok.parse().map_err(|_| Error::Syntax {
        line,
        column: col,
        message: format!("bad number `{tok}`"),
    })
}

fn parse_port((col, tok): (usize, &str), line: usize) -> Result<PortRef, Error> {
    let err = || Error::Syntax {
        line,
        column: col,
        message: format!("bad port reference `{tok}`, expected <id>.<port>"),
    };
    let (id, port) = tok.split_once('.').ok_or_else(err)?;
    Ok(PortRef {
        piece: id.parse().map_err(|_| err())?,
        port: port.parse().map_err(|_| err())?,
    })
}

/// Vertex-kinded multigraph shape, forgetting ports and matrices. Used for
/// Betti numbers, buffer smoothing and tree isomorphism.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphShape {
    pub kinds: BTreeMap<PieceId, PieceKind>,
    pub edges: Vec<(PieceId, PieceId)>,
}

impl GraphShape {
    pub fn is_connected(&self) -> bool {
        let Some((&start, _)) = self.kinds.first_key_value() else {
            return false;
        };
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            for &(a, b) in &self.edges {
                if a == v && !seen.contains(&b) {
                    stack.push(b);
                }
                if b == v && !seen.contains(&a) {
                    stack.push(a);
                }
            }
        }
        seen.len() == self.kinds.len()
    }

    pub fn betti(&self) -> usize {
        (self.edges.len() + 1).saturating_sub(self.kinds.len())
    }

    pub fn degree(&self, v: PieceId) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    /// Removes every degree-2 ThickTorus vertex, merging its two incident
    /// edges. A thick torus whose two ports close onto themselves (an
    /// isolated self-loop) stays: there is nothing to merge it into.
    pub fn smooth_buffers(&self) -> GraphShape {
        let mut shape = self.clone();
        loop {
            let candidate = shape.kinds.iter().find_map(|(&v, &kind)| {
                if kind != PieceKind::ThickTorus || shape.degree(v) != 2 {
                    return None;
                }
                let incident: Vec<usize> = shape
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, b))| a == v || b == v)
                    .map(|(i, _)| i)
                    .collect();
                // self-loop on v itself: one edge counted twice
                if incident.len() < 2 {
                    return None;
                }
                Some((v, incident))
            });
            let Some((v, incident)) = candidate else {
                return shape;
            };
            let other = |i: usize| {
                let (a, b) = shape.edges[i];
                if a == v {
                    b
                } else {
                    a
                }
            };
            let (x, y) = (other(incident[0]), other(incident[1]));
            shape.edges.remove(incident[1]);
            shape.edges.remove(incident[0]);
            shape.edges.push((x.min(y), x.max(y)));
            shape.kinds.remove(&v);
            shape.edges.sort_unstable();
        }
    }

    /// Canonical code of a tree shape (vertex kinds included), or `None` if
    /// the shape is not a tree. Equal codes ⇔ isomorphic kinded trees.
    pub fn tree_code(&self) -> Option<String> {
        if self.kinds.is_empty() || !self.is_connected() || self.betti() != 0 {
            return None;
        }
        // betti 0 + connected already rules out self-loops and multi-edges
        let ids: Vec<PieceId> = self.kinds.keys().copied().collect();
        if ids.len() == 1 {
            return Some(encode(self, ids[0], None));
        }
        // centers by iterative leaf stripping
        let mut degree: BTreeMap<PieceId, usize> =
            ids.iter().map(|&v| (v, self.degree(v))).collect();
        let mut remaining: std::collections::BTreeSet<PieceId> = ids.iter().copied().collect();
        let mut layer: Vec<PieceId> = remaining
            .iter()
            .copied()
            .filter(|&v| degree[&v] <= 1)
            .collect();
        while remaining.len() > 2 {
            for &v in &layer {
                remaining.remove(&v);
            }
            let mut next = Vec::new();
            for &v in &layer {
                for &(a, b) in &self.edges {
                    let u = if a == v {
                        b
                    } else if b == v {
                        a
                    } else {
                        continue;
                    };
                    if remaining.contains(&u) {
                        let d = degree.get_mut(&u).unwrap();
                        *d -= 1;
                        if *d == 1 {
                            next.push(u);
                        }
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            layer = next;
        }
        let centers: Vec<PieceId> = remaining.into_iter().collect();
        if centers.len() == 1 {
            Some(encode(self, centers[0], None))
        } else {
            let a = encode(self, centers[0], Some(centers[1]));
            let b = encode(self, centers[1], Some(centers[0]));
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            Some(format!("<{lo}{hi}>"))
        }
    }
}

fn encode(shape: &GraphShape, v: PieceId, parent: Option<PieceId>) -> String {
    let tag = match shape.kinds[&v] {
        PieceKind::PantsS1 => "P".to_string(),
        PieceKind::SolidTorus => "S".to_string(),
        PieceKind::ThickTorus => "T".to_string(),
        PieceKind::GenusZeroBundle { boundary } => format!("B{boundary}"),
    };
    let mut children: Vec<String> = shape
        .edges
        .iter()
        .filter_map(|&(a, b)| {
            let u = if a == v {
                b
            } else if b == v {
                a
            } else {
                return None;
            };
            if Some(u) == parent {
                return None;
            }
            Some(encode(shape, u, Some(v)))
        })
        .collect();
    children.sort();
    format!("({tag}{})", children.join(""))
}
