//! Combinatorial Morse pages: an event sequence over levels plus a
//! level-preserving monodromy, the input data of the open-book-style
//! constructor.
//!
//! The page is a compact orientable surface `F` carrying a Morse function
//! with one critical point per level; regular levels are finite sets of
//! named circles. The monodromy is a return map preserving the level
//! function, recorded as a permutation of each regular level's circles. It
//! must be the identity on the page boundary (region 0), commute with the
//! event structure, and fix each event's critical component.
//!
//! `.mf` text format (initial boundary circles are implicitly named
//! `b0 … b{n−1}`):
//!
//! ```text
//! boundary <n0>
//! event <k> birth <c> | death <c> | merge <c1> <c2> -> <c> | split <c> -> <c1> <c2>
//! monodromy <region> (<c1> <c2> ...)(...)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::Error;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MorseEvent {
    /// Minimum: a circle appears going outward.
    Birth { circle: String },
    /// Maximum: a circle disappears going outward.
    Death { circle: String },
    /// Saddle joining two circles into one.
    Merge { inner: [String; 2], outer: String },
    /// Saddle splitting one circle into two.
    Split { inner: String, outer: [String; 2] },
}

impl MorseEvent {
    pub fn consumed(&self) -> Vec<&str> {
        match self {
            MorseEvent::Birth { .. } => vec![],
            MorseEvent::Death { circle } => vec![circle],
            MorseEvent::Merge { inner, .. } => vec![&inner[0], &inner[1]],
            MorseEvent::Split { inner, .. } => vec![inner],
        }
    }

    pub fn produced(&self) -> Vec<&str> {
        match self {
            MorseEvent::Birth { circle } => vec![circle],
            MorseEvent::Death { .. } => vec![],
            MorseEvent::Merge { outer, .. } => vec![outer],
            MorseEvent::Split { outer, .. } => vec![&outer[0], &outer[1]],
        }
    }

    /// Count change going outward: births and splits +1, deaths and merges −1.
    pub fn delta(&self) -> i64 {
        match self {
            MorseEvent::Birth { .. } | MorseEvent::Split { .. } => 1,
            MorseEvent::Death { .. } | MorseEvent::Merge { .. } => -1,
        }
    }

    pub fn is_extremum(&self) -> bool {
        matches!(self, MorseEvent::Birth { .. } | MorseEvent::Death { .. })
    }
}

/// Validated Morse page. Component names are global strand identities: a
/// name, once consumed, is never reused.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MorsePage {
    boundary: usize,
    events: Vec<MorseEvent>,
    /// Non-fixed part of the permutation of each regular region 0..=t.
    monodromy: Vec<BTreeMap<String, String>>,
    /// Live circles per regular region, in creation order.
    live: Vec<Vec<String>>,
}

impl MorsePage {
    /// Builds and fully validates a page. `cycles` maps a region index to the
    /// disjoint cycles of its permutation; omitted regions are the identity.
    pub fn new(
        boundary: usize,
        events: Vec<MorseEvent>,
        cycles: BTreeMap<usize, Vec<Vec<String>>>,
    ) -> Result<Self, Error> {
        if boundary > crate::graph::MAX_STRUCTURE {
            return Err(Error::MorseEvents(format!(
                "boundary count {boundary} exceeds the limit {}",
                crate::graph::MAX_STRUCTURE
            )));
        }
        let t = events.len();
        let mut live: Vec<Vec<String>> = Vec::with_capacity(t + 1);
        let mut current: Vec<String> = (0..boundary).map(|i| format!("b{i}")).collect();
        let mut ever: BTreeSet<String> = current.iter().cloned().collect();
        if ever.len() != boundary {
            return Err(Error::MorseEvents("implicit boundary names collide".into()));
        }
        live.push(current.clone());
        for (i, event) in events.iter().enumerate() {
            let level = i + 1;
            for name in event.consumed() {
                let Some(pos) = current.iter().position(|c| c == name) else {
                    return Err(Error::MorseEvents(format!(
                        "level {level}: circle `{name}` is not alive"
                    )));
                };
                current.remove(pos);
            }
            if let MorseEvent::Merge { inner, .. } = event {
                if inner[0] == inner[1] {
                    return Err(Error::MorseEvents(format!(
                        "level {level}: merge consumes the same circle twice"
                    )));
                }
            }
            for name in event.produced() {
                if !ever.insert(name.to_string()) {
                    return Err(Error::MorseEvents(format!(
                        "level {level}: circle name `{name}` reused"
                    )));
                }
                current.push(name.to_string());
            }
            live.push(current.clone());
        }
        if !current.is_empty() {
            return Err(Error::MorseEvents(format!(
                "{} circles still alive after the last level",
                current.len()
            )));
        }

        let mut monodromy: Vec<BTreeMap<String, String>> = vec![BTreeMap::new(); t + 1];
        for (&region, region_cycles) in &cycles {
            if region > t {
                return Err(Error::MorseMonodromy(format!(
                    "region {region} does not exist"
                )));
            }
            let alive: BTreeSet<&String> = live[region].iter().collect();
            let map = &mut monodromy[region];
            for cycle in region_cycles {
                if cycle.len() < 2 {
                    continue;
                }
                for name in cycle {
                    if !alive.contains(name) {
                        return Err(Error::MorseMonodromy(format!(
                            "region {region}: circle `{name}` is not alive"
                        )));
                    }
                }
                for w in 0..cycle.len() {
                    let from = cycle[w].clone();
                    let to = cycle[(w + 1) % cycle.len()].clone();
                    if map.insert(from.clone(), to).is_some() {
                        return Err(Error::MorseMonodromy(format!(
                            "region {region}: circle `{from}` appears in two cycles"
                        )));
                    }
                }
            }
        }

        let page = MorsePage {
            boundary,
            events,
            monodromy,
            live,
        };
        page.check_monodromy()?;
        Ok(page)
    }

    fn check_monodromy(&self) -> Result<(), Error> {
        if !self.monodromy[0].is_empty() {
            return Err(Error::MorseMonodromy(
                "the monodromy must fix the page boundary (region 0)".into(),
            ));
        }
        for (i, event) in self.events.iter().enumerate() {
            let level = i + 1;
            // persistence: the permutation on untouched circles carries over
            let consumed: BTreeSet<&str> = event.consumed().into_iter().collect();
            for name in &self.live[i] {
                if consumed.contains(name.as_str()) {
                    continue;
                }
                if self.image(i, name) != self.image(level, name) {
                    return Err(Error::MorseMonodromy(format!(
                        "level {level}: circle `{name}` changes image across the level"
                    )));
                }
            }
            match event {
                MorseEvent::Birth { circle } | MorseEvent::Merge { outer: circle, .. } => {
                    if self.image(level, circle) != *circle {
                        return Err(Error::MorseMonodromy(format!(
                            "level {level}: critical circle `{circle}` must be fixed"
                        )));
                    }
                }
                MorseEvent::Death { circle } | MorseEvent::Split { inner: circle, .. } => {
                    if self.image(i, circle) != *circle {
                        return Err(Error::MorseMonodromy(format!(
                            "level {level}: critical circle `{circle}` must be fixed"
                        )));
                    }
                }
            }
            match event {
                MorseEvent::Merge { inner, .. } => {
                    let img = self.image(i, &inner[0]);
                    if img != inner[0] && img != inner[1] {
                        return Err(Error::MorseMonodromy(format!(
                            "level {level}: merge inputs are not preserved as a pair"
                        )));
                    }
                }
                MorseEvent::Split { outer, .. } => {
                    let img = self.image(level, &outer[0]);
                    if img != outer[0] && img != outer[1] {
                        return Err(Error::MorseMonodromy(format!(
                            "level {level}: split outputs are not preserved as a pair"
                        )));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Image of a circle under the region's permutation.
    pub fn image(&self, region: usize, name: &str) -> String {
        self.monodromy[region]
            .get(name)
            .cloned()
            .unwrap_or_else(|| name.to_string())
    }

    pub fn boundary(&self) -> usize {
        self.boundary
    }

    pub fn events(&self) -> &[MorseEvent] {
        &self.events
    }

    pub fn levels(&self) -> usize {
        self.events.len()
    }

    /// Live circles of a regular region, in creation order.
    pub fn live(&self, region: usize) -> &[String] {
        &self.live[region]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.live.iter().map(Vec::len).collect()
    }

    pub fn has_identity_monodromy(&self) -> bool {
        self.monodromy.iter().all(BTreeMap::is_empty)
    }

    /// χ(F) = #extrema − #saddles.
    pub fn euler_characteristic(&self) -> i64 {
        self.events
            .iter()
            .map(|e| if e.is_extremum() { 1 } else { -1 })
            .sum()
    }

    /// Whether the page surface is connected, by tracking which strands the
    /// saddles join.
    pub fn page_connected(&self) -> bool {
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        let mut count = 0usize;
        for region in &self.live {
            for name in region {
                index.entry(name.as_str()).or_insert_with(|| {
                    count += 1;
                    count - 1
                });
            }
        }
        if count == 0 {
            return false;
        }
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        let mut parent: Vec<usize> = (0..count).collect();
        for event in &self.events {
            let ids: Vec<usize> = event
                .consumed()
                .into_iter()
                .chain(event.produced())
                .map(|n| index[n])
                .collect();
            for w in ids.windows(2) {
                let (ra, rb) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
                parent[ra] = rb;
            }
        }
        let root = find(&mut parent, 0);
        (0..count).all(|i| find(&mut parent, i) == root)
    }

    /// Parses `.mf` text.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut boundary: Option<usize> = None;
        let mut events_raw: Vec<(usize, MorseEvent, usize)> = Vec::new();
        let mut cycles: BTreeMap<usize, Vec<Vec<String>>> = BTreeMap::new();

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
                "boundary" => {
                    if toks.len() != 2 {
                        return Err(syntax("expected `boundary <count>`".into()));
                    }
                    boundary = Some(
                        toks[1]
                            .parse()
                            .map_err(|_| syntax(format!("bad count `{}`", toks[1])))?,
                    );
                }
                "event" => {
                    if toks.len() < 3 {
                        return Err(syntax("expected `event <level> <kind> ...`".into()));
                    }
                    let level: usize = toks[1]
                        .parse()
                        .map_err(|_| syntax(format!("bad level `{}`", toks[1])))?;
                    let event = match toks[2] {
                        "birth" if toks.len() == 4 => MorseEvent::Birth {
                            circle: toks[3].to_string(),
                        },
                        "death" if toks.len() == 4 => MorseEvent::Death {
                            circle: toks[3].to_string(),
                        },
                        "merge" if toks.len() == 7 && toks[5] == "->" => MorseEvent::Merge {
                            inner: [toks[3].to_string(), toks[4].to_string()],
                            outer: toks[6].to_string(),
                        },
                        "split" if toks.len() == 7 && toks[4] == "->" => MorseEvent::Split {
                            inner: toks[3].to_string(),
                            outer: [toks[5].to_string(), toks[6].to_string()],
                        },
                        _ => return Err(syntax(format!("bad event `{}`", toks[2..].join(" ")))),
                    };
                    events_raw.push((level, event, line));
                }
                "monodromy" => {
                    if toks.len() < 2 {
                        return Err(syntax("expected `monodromy <region> (cycles)`".into()));
                    }
                    let region: usize = toks[1]
                        .parse()
                        .map_err(|_| syntax(format!("bad region `{}`", toks[1])))?;
                    let rest = body.split_once(toks[1]).map(|(_, r)| r).unwrap_or_default();
                    let parsed =
                        parse_cycles(rest).map_err(|m| syntax(format!("bad cycle list: {m}")))?;
                    cycles.entry(region).or_default().extend(parsed);
                }
                other => return Err(syntax(format!("unknown statement `{other}`"))),
            }
        }

        let boundary = boundary.ok_or(Error::Syntax {
            line: 0,
            column: 0,
            message: "missing `boundary` statement".into(),
        })?;
        events_raw.sort_by_key(|&(level, _, _)| level);
        for (i, &(level, _, line)) in events_raw.iter().enumerate() {
            if level != i + 1 {
                return Err(Error::Syntax {
                    line,
                    column: 1,
                    message: format!("event levels must cover 1..=t; found level {level}"),
                });
            }
        }
        let events = events_raw.into_iter().map(|(_, e, _)| e).collect();
        MorsePage::new(boundary, events, cycles)
    }
}

fn parse_cycles(rest: &str) -> Result<Vec<Vec<String>>, String> {
    let mut out = Vec::new();
    let mut current: Option<Vec<String>> = None;
    let mut token = String::new();
    for ch in rest.chars() {
        match ch {
            '(' => {
                if current.is_some() {
                    return Err("nested `(`".into());
                }
                current = Some(Vec::new());
            }
            ')' => {
                let mut cycle = current.take().ok_or("unmatched `)`")?;
                if !token.is_empty() {
                    cycle.push(std::mem::take(&mut token));
                }
                out.push(cycle);
            }
            c if c.is_whitespace() => {
                if let Some(cycle) = current.as_mut() {
                    if !token.is_empty() {
                        cycle.push(std::mem::take(&mut token));
                    }
                }
            }
            c => {
                if current.is_none() {
                    return Err(format!("unexpected character `{c}` outside a cycle"));
                }
                token.push(c);
            }
        }
    }
    if current.is_some() {
        return Err("unmatched `(`".into());
    }
    Ok(out)
}

/// Closed 3-manifolds realized by a connected page with non-empty boundary
/// and identity monodromy.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TrivialMonodromyManifold {
    Sphere,
    /// Connected sum of `n` copies of S¹ × S², n ≥ 1.
    ConnectedSumS1xS2(usize),
}

impl fmt::Display for TrivialMonodromyManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrivialMonodromyManifold::Sphere => write!(f, "S3"),
            TrivialMonodromyManifold::ConnectedSumS1xS2(n) => write!(f, "#_{n}(S1xS2)"),
        }
    }
}
