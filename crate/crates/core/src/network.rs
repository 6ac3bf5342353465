//! Station graph with line membership and virtual transfer arcs.
//!
//! A [`StationGraph`] is immutable. Station and line removals return a new
//! graph whose `version` is one higher than its parent's. Station ids are the
//! caller's ids and stay stable across removals; internally stations are
//! addressed by dense indices `0..N`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::units::Minutes;

/// Transfer time used when a transfer station has no row for a line pair.
pub const DEFAULT_TRANSFER_TIME: Minutes = Minutes::whole(5);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StationId(pub u32);

impl fmt::Display for StationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index into the graph's line-name table. Stable across removals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LineId(pub u16);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Station {
    pub id: StationId,
    pub name: String,
    /// Sorted, deduplicated.
    pub lines: Vec<LineId>,
    pub is_transfer: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: StationId,
    pub b: StationId,
    pub line: LineId,
    pub run_time: Minutes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransferArc {
    pub station: StationId,
    pub from_line: LineId,
    pub to_line: LineId,
    pub transfer_time: Minutes,
}

/// Raw station row before validation.
#[derive(Clone, Debug, PartialEq)]
pub struct StationRecord {
    pub id: StationId,
    pub name: String,
    pub lines: Vec<String>,
    /// As declared by the source; checked against the line count.
    pub is_transfer: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeRecord {
    pub from: StationId,
    pub to: StationId,
    pub line: String,
    pub run_time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferRecord {
    pub station: StationId,
    pub from_line: String,
    pub to_line: String,
    pub transfer_time: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    pub default_transfer_time: Minutes,
    /// Accept a baseline with more than one connected component.
    pub allow_disconnected: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { default_transfer_time: DEFAULT_TRANSFER_TIME, allow_disconnected: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationIssue {
    DuplicateStation(StationId),
    StationWithoutLine(StationId),
    TransferFlagMismatch { station: StationId, declared: bool, lines: usize },
    SelfLoop { station: StationId, line: String },
    DanglingEndpoint { from: StationId, to: StationId, missing: StationId },
    NonPositiveRunTime { from: StationId, to: StationId, line: String },
    LineNotAtStation { station: StationId, line: String },
    DuplicateEdge { from: StationId, to: StationId, line: String },
    UnknownTransferStation(StationId),
    TransferAtNonTransferStation(StationId),
    SameLineTransfer { station: StationId, line: String },
    NonPositiveTransferTime { station: StationId },
    DuplicateTransfer { station: StationId, from_line: String, to_line: String },
    Disconnected { components: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ValidationIssue::*;
        match self {
            DuplicateStation(s) => write!(f, "duplicate station id {s}"),
            StationWithoutLine(s) => write!(f, "station {s} belongs to no line"),
            TransferFlagMismatch { station, declared, lines } => {
                write!(f, "station {station} declares is_transfer={declared} but carries {lines} line(s)")
            }
            SelfLoop { station, line } => write!(f, "edge {station}-{station} on line {line} is a self loop"),
            DanglingEndpoint { from, to, missing } => {
                write!(f, "edge {from}-{to} references unknown station {missing}")
            }
            NonPositiveRunTime { from, to, line } => {
                write!(f, "edge {from}-{to} on line {line} has non-positive run time")
            }
            LineNotAtStation { station, line } => {
                write!(f, "station {station} does not carry line {line}")
            }
            DuplicateEdge { from, to, line } => write!(f, "duplicate edge {from}-{to} on line {line}"),
            UnknownTransferStation(s) => write!(f, "transfer row references unknown station {s}"),
            TransferAtNonTransferStation(s) => {
                write!(f, "transfer row at station {s}, which is not a transfer station")
            }
            SameLineTransfer { station, line } => {
                write!(f, "transfer row at station {station} connects line {line} to itself")
            }
            NonPositiveTransferTime { station } => {
                write!(f, "transfer row at station {station} has non-positive time")
            }
            DuplicateTransfer { station, from_line, to_line } => {
                write!(f, "duplicate transfer row at station {station} for {from_line}->{to_line}")
            }
            Disconnected { components } => {
                write!(f, "network is not connected ({components} components)")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NetworkError {
    #[error("unknown station {0}")]
    UnknownStation(StationId),
    #[error("unknown line {0}")]
    UnknownLine(String),
    #[error("invalid network: {}", format_issues(.0))]
    Invalid(Vec<ValidationIssue>),
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    let mut out = String::new();
    for (i, issue) in issues.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        out.push_str(&alloc::format!("{issue}"));
    }
    out
}

/// One ride option out of a station.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hop {
    /// Dense index of the neighbouring station.
    pub to: u32,
    pub line: LineId,
    pub time: Minutes,
    /// Index into [`StationGraph::edges`].
    pub edge: u32,
}

/// Ordered station sequence of one line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineTrack {
    pub line: LineId,
    pub stations: Vec<StationId>,
    /// The line is a single loop.
    pub closed: bool,
    /// Consecutive entries are adjacent on the line (false for branched or
    /// fragmented lines, whose order falls back to a depth-first walk).
    pub linear: bool,
}

impl LineTrack {
    pub fn position(&self, station: StationId) -> Option<usize> {
        self.stations.iter().position(|&s| s == station)
    }
}

#[derive(Clone, Debug)]
pub struct StationGraph {
    line_names: Arc<[String]>,
    stations: Vec<Station>,
    edges: Vec<Edge>,
    transfer_arcs: Vec<TransferArc>,
    version: u64,
    index: BTreeMap<StationId, u32>,
    adjacency: Vec<Vec<Hop>>,
    /// Per station: `(from, to, time)` for every ordered line pair.
    transfers: Vec<Vec<(LineId, LineId, Minutes)>>,
}

impl PartialEq for StationGraph {
    /// Structural equality; the version counter is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.line_names == other.line_names
            && self.stations == other.stations
            && self.edges == other.edges
            && self.transfer_arcs == other.transfer_arcs
    }
}

impl StationGraph {
    /// Validates raw records and builds the graph. All issues found are
    /// reported together.
    pub fn build(
        stations: &[StationRecord],
        edges: &[EdgeRecord],
        transfers: &[TransferRecord],
        options: &BuildOptions,
    ) -> Result<StationGraph, NetworkError> {
        let mut issues = Vec::new();

        let mut names: BTreeSet<&str> = BTreeSet::new();
        for s in stations {
            for l in &s.lines {
                names.insert(l.as_str());
            }
        }
        for e in edges {
            names.insert(e.line.as_str());
        }
        let line_names: Vec<String> = names.iter().map(|s| String::from(*s)).collect();
        let line_of = |name: &str| -> LineId {
            LineId(line_names.binary_search_by(|n| n.as_str().cmp(name)).unwrap_or(0) as u16)
        };

        let mut by_id: BTreeMap<StationId, Station> = BTreeMap::new();
        for rec in stations {
            let mut lines: Vec<LineId> = rec.lines.iter().map(|l| line_of(l)).collect();
            lines.sort_unstable();
            lines.dedup();
            if lines.is_empty() {
                issues.push(ValidationIssue::StationWithoutLine(rec.id));
            }
            let is_transfer = lines.len() >= 2;
            if let Some(declared) = rec.is_transfer {
                if declared != is_transfer {
                    issues.push(ValidationIssue::TransferFlagMismatch {
                        station: rec.id,
                        declared,
                        lines: lines.len(),
                    });
                }
            }
            let station = Station { id: rec.id, name: rec.name.clone(), lines, is_transfer };
            if by_id.insert(rec.id, station).is_some() {
                issues.push(ValidationIssue::DuplicateStation(rec.id));
            }
        }

        let mut built_edges = Vec::with_capacity(edges.len());
        let mut seen_edges = BTreeSet::new();
        for e in edges {
            if e.from == e.to {
                issues.push(ValidationIssue::SelfLoop { station: e.from, line: e.line.clone() });
                continue;
            }
            let mut dangling = false;
            for end in [e.from, e.to] {
                if !by_id.contains_key(&end) {
                    issues.push(ValidationIssue::DanglingEndpoint { from: e.from, to: e.to, missing: end });
                    dangling = true;
                }
            }
            if dangling {
                continue;
            }
            let line = line_of(&e.line);
            for end in [e.from, e.to] {
                if by_id[&end].lines.binary_search(&line).is_err() {
                    issues.push(ValidationIssue::LineNotAtStation { station: end, line: e.line.clone() });
                }
            }
            let run_time = match Minutes::from_f64(e.run_time) {
                Some(t) if t.is_positive() => t,
                _ => {
                    issues.push(ValidationIssue::NonPositiveRunTime { from: e.from, to: e.to, line: e.line.clone() });
                    continue;
                }
            };
            let key = (e.from.min(e.to), e.from.max(e.to), line);
            if !seen_edges.insert(key) {
                issues.push(ValidationIssue::DuplicateEdge { from: e.from, to: e.to, line: e.line.clone() });
                continue;
            }
            built_edges.push(Edge { a: e.from, b: e.to, line, run_time });
        }

        let mut given: BTreeMap<(StationId, LineId, LineId), Minutes> = BTreeMap::new();
        for t in transfers {
            let Some(station) = by_id.get(&t.station) else {
                issues.push(ValidationIssue::UnknownTransferStation(t.station));
                continue;
            };
            if !station.is_transfer {
                issues.push(ValidationIssue::TransferAtNonTransferStation(t.station));
                continue;
            }
            let mut ok = true;
            for name in [&t.from_line, &t.to_line] {
                let known = line_names.iter().any(|n| n == name);
                if !known || station.lines.binary_search(&line_of(name)).is_err() {
                    issues.push(ValidationIssue::LineNotAtStation { station: t.station, line: name.clone() });
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            if t.from_line == t.to_line {
                issues.push(ValidationIssue::SameLineTransfer { station: t.station, line: t.from_line.clone() });
                continue;
            }
            let time = match Minutes::from_f64(t.transfer_time) {
                Some(m) if m.is_positive() => m,
                _ => {
                    issues.push(ValidationIssue::NonPositiveTransferTime { station: t.station });
                    continue;
                }
            };
            let key = (t.station, line_of(&t.from_line), line_of(&t.to_line));
            if given.insert(key, time).is_some() {
                issues.push(ValidationIssue::DuplicateTransfer {
                    station: t.station,
                    from_line: t.from_line.clone(),
                    to_line: t.to_line.clone(),
                });
            }
        }

        // A row covers its reverse direction unless the reverse has its own row.
        let mut arcs = Vec::new();
        for station in by_id.values().filter(|s| s.is_transfer) {
            for &from in &station.lines {
                for &to in &station.lines {
                    if from == to {
                        continue;
                    }
                    let time = given
                        .get(&(station.id, from, to))
                        .or_else(|| given.get(&(station.id, to, from)))
                        .copied()
                        .unwrap_or(options.default_transfer_time);
                    arcs.push(TransferArc { station: station.id, from_line: from, to_line: to, transfer_time: time });
                }
            }
        }

        if !issues.is_empty() {
            return Err(NetworkError::Invalid(issues));
        }

        let graph = StationGraph::from_parts(line_names.into(), by_id.into_values().collect(), built_edges, arcs, 0);
        if !options.allow_disconnected && graph.station_count() > 0 {
            let components = graph.component_count();
            if components > 1 {
                return Err(NetworkError::Invalid(vec![ValidationIssue::Disconnected { components }]));
            }
        }
        Ok(graph)
    }

    fn from_parts(
        line_names: Arc<[String]>,
        stations: Vec<Station>,
        edges: Vec<Edge>,
        transfer_arcs: Vec<TransferArc>,
        version: u64,
    ) -> StationGraph {
        let index: BTreeMap<StationId, u32> = stations.iter().enumerate().map(|(i, s)| (s.id, i as u32)).collect();
        let mut adjacency = vec![Vec::new(); stations.len()];
        for (k, e) in edges.iter().enumerate() {
            let a = index[&e.a];
            let b = index[&e.b];
            adjacency[a as usize].push(Hop { to: b, line: e.line, time: e.run_time, edge: k as u32 });
            adjacency[b as usize].push(Hop { to: a, line: e.line, time: e.run_time, edge: k as u32 });
        }
        for hops in &mut adjacency {
            hops.sort_by_key(|h| (h.to, h.line));
        }
        let mut transfers = vec![Vec::new(); stations.len()];
        for arc in &transfer_arcs {
            transfers[index[&arc.station] as usize].push((arc.from_line, arc.to_line, arc.transfer_time));
        }
        StationGraph { line_names, stations, edges, transfer_arcs, version, index, adjacency, transfers }
    }

    pub fn station_count(&self) -> usize {
        self.stations.len()
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    pub fn station_ids(&self) -> impl Iterator<Item = StationId> + '_ {
        self.stations.iter().map(|s| s.id)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn transfer_arcs(&self) -> &[TransferArc] {
        &self.transfer_arcs
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn station(&self, id: StationId) -> Option<&Station> {
        self.index_of(id).map(|i| &self.stations[i])
    }

    pub fn contains(&self, id: StationId) -> bool {
        self.index.contains_key(&id)
    }

    /// Dense index of a station in this graph.
    pub fn index_of(&self, id: StationId) -> Option<usize> {
        self.index.get(&id).map(|&i| i as usize)
    }

    pub fn id_at(&self, index: usize) -> StationId {
        self.stations[index].id
    }

    /// Ride options out of the station at `index`, sorted by (neighbour, line).
    pub fn hops(&self, index: usize) -> &[Hop] {
        &self.adjacency[index]
    }

    /// Every line name known to the graph, including lines whose stations
    /// have all been removed.
    pub fn line_names(&self) -> &[String] {
        &self.line_names
    }

    pub fn line_name(&self, line: LineId) -> &str {
        &self.line_names[line.0 as usize]
    }

    pub fn line_by_name(&self, name: &str) -> Option<LineId> {
        self.line_names.iter().position(|n| n == name).map(|i| LineId(i as u16))
    }

    /// Lines still carried by at least one station, ascending.
    pub fn lines(&self) -> Vec<LineId> {
        let set: BTreeSet<LineId> = self.stations.iter().flat_map(|s| s.lines.iter().copied()).collect();
        set.into_iter().collect()
    }

    pub fn stations_on_line(&self, line: LineId) -> Vec<StationId> {
        self.stations.iter().filter(|s| s.lines.contains(&line)).map(|s| s.id).collect()
    }

    pub fn transfer_station_count(&self) -> usize {
        self.stations.iter().filter(|s| s.is_transfer).count()
    }

    /// Time to change from `from` to `to` at the station with dense index
    /// `index`. Zero when the lines are equal, `None` when no arc exists.
    pub fn transfer_time_at(&self, index: usize, from: LineId, to: LineId) -> Option<Minutes> {
        if from == to {
            return Some(Minutes::ZERO);
        }
        self.transfers[index].iter().find(|t| t.0 == from && t.1 == to).map(|t| t.2)
    }

    pub fn transfer_time(&self, station: StationId, from: LineId, to: LineId) -> Option<Minutes> {
        self.transfer_time_at(self.index_of(station)?, from, to)
    }

    /// Distinct neighbouring stations of `id`.
    pub fn neighbors(&self, id: StationId) -> Vec<StationId> {
        let Some(i) = self.index_of(id) else { return Vec::new() };
        let mut out: Vec<StationId> = self.adjacency[i].iter().map(|h| self.stations[h.to as usize].id).collect();
        out.dedup();
        out
    }

    /// Whether an edge joins `a` and `b` on `line`.
    pub fn has_edge(&self, a: StationId, b: StationId, line: LineId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.adjacency[i].binary_search_by_key(&(j as u32, line), |h| (h.to, h.line)).is_ok(),
            _ => false,
        }
    }

    /// Component label per dense index, labels numbered from 0 in index order.
    pub fn component_labels(&self) -> Vec<usize> {
        let n = self.stations.len();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for h in &self.adjacency[u] {
                    let v = h.to as usize;
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Removes stations together with their incident edges and transfer arcs.
    pub fn remove_stations(&self, removed: &[StationId]) -> Result<StationGraph, NetworkError> {
        for &id in removed {
            if !self.contains(id) {
                return Err(NetworkError::UnknownStation(id));
            }
        }
        let gone: BTreeSet<StationId> = removed.iter().copied().collect();
        let stations = self.stations.iter().filter(|s| !gone.contains(&s.id)).cloned().collect();
        let edges = self.edges.iter().filter(|e| !gone.contains(&e.a) && !gone.contains(&e.b)).copied().collect();
        let arcs = self.transfer_arcs.iter().filter(|a| !gone.contains(&a.station)).copied().collect();
        Ok(StationGraph::from_parts(self.line_names.clone(), stations, edges, arcs, self.version + 1))
    }

    /// Removes every edge of `line`. Stations left without any line are
    /// removed; stations still served by another line are kept.
    pub fn remove_line(&self, line: LineId) -> Result<StationGraph, NetworkError> {
        let present = self.stations.iter().any(|s| s.lines.contains(&line));
        if !present {
            let name = self.line_names.get(line.0 as usize).cloned().unwrap_or_else(|| alloc::format!("#{}", line.0));
            return Err(NetworkError::UnknownLine(name));
        }
        let mut stations = Vec::with_capacity(self.stations.len());
        for s in &self.stations {
            let lines: Vec<LineId> = s.lines.iter().copied().filter(|&l| l != line).collect();
            if lines.is_empty() {
                continue;
            }
            let is_transfer = lines.len() >= 2;
            stations.push(Station { id: s.id, name: s.name.clone(), lines, is_transfer });
        }
        let kept: BTreeSet<StationId> = stations.iter().map(|s: &Station| s.id).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| e.line != line && kept.contains(&e.a) && kept.contains(&e.b))
            .copied()
            .collect();
        let transfer_kept: BTreeSet<StationId> = stations.iter().filter(|s| s.is_transfer).map(|s| s.id).collect();
        let arcs = self
            .transfer_arcs
            .iter()
            .filter(|a| a.from_line != line && a.to_line != line && transfer_kept.contains(&a.station))
            .copied()
            .collect();
        Ok(StationGraph::from_parts(self.line_names.clone(), stations, edges, arcs, self.version + 1))
    }

    /// Station order along `line`.
    ///
    /// A simple path is walked from its terminus with the smaller id; a loop
    /// starts at its smallest id and heads toward the smaller neighbour.
    /// Anything else is flattened by a depth-first walk and marked
    /// non-linear.
    pub fn line_track(&self, line: LineId) -> Result<LineTrack, NetworkError> {
        let members = self.stations_on_line(line);
        if members.is_empty() {
            let name = self.line_names.get(line.0 as usize).cloned().unwrap_or_default();
            return Err(NetworkError::UnknownLine(name));
        }
        let mut adj: BTreeMap<StationId, Vec<StationId>> = members.iter().map(|&s| (s, Vec::new())).collect();
        let mut edge_count = 0;
        for e in self.edges.iter().filter(|e| e.line == line) {
            adj.get_mut(&e.a).unwrap().push(e.b);
            adj.get_mut(&e.b).unwrap().push(e.a);
            edge_count += 1;
        }
        for list in adj.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        let n = members.len();
        let max_degree = adj.values().map(Vec::len).max().unwrap_or(0);
        let connected = {
            let mut seen = BTreeSet::new();
            let mut stack = vec![members[0]];
            seen.insert(members[0]);
            while let Some(u) = stack.pop() {
                for &v in &adj[&u] {
                    if seen.insert(v) {
                        stack.push(v);
                    }
                }
            }
            seen.len() == n
        };

        let walk = |start: StationId, first: Option<StationId>| -> Vec<StationId> {
            let mut order = vec![start];
            let mut prev = start;
            let mut cur = match first {
                Some(f) => f,
                None => match adj[&start].first() {
                    Some(&f) => f,
                    None => return order,
                },
            };
            while cur != start && order.len() < n {
                order.push(cur);
                let next = adj[&cur].iter().copied().find(|&v| v != prev);
                match next {
                    Some(v) => {
                        prev = cur;
                        cur = v;
                    }
                    None => break,
                }
            }
            order
        };

        if connected && max_degree <= 2 {
            if n == 1 {
                return Ok(LineTrack { line, stations: members, closed: false, linear: true });
            }
            if edge_count == n - 1 {
                let start = *adj.iter().find(|(_, v)| v.len() == 1).map(|(k, _)| k).unwrap();
                return Ok(LineTrack { line, stations: walk(start, None), closed: false, linear: true });
            }
            if edge_count == n && n >= 3 {
                let start = members[0];
                let first = adj[&start][0];
                return Ok(LineTrack { line, stations: walk(start, Some(first)), closed: true, linear: true });
            }
        }

        // Branched or fragmented: depth-first order from the lowest-id terminus.
        let mut order = Vec::with_capacity(n);
        let mut seen = BTreeSet::new();
        let mut roots: Vec<StationId> = adj.iter().filter(|(_, v)| v.len() <= 1).map(|(k, _)| *k).collect();
        roots.extend(members.iter().copied());
        for root in roots {
            if seen.contains(&root) {
                continue;
            }
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                if !seen.insert(u) {
                    continue;
                }
                order.push(u);
                for &v in adj[&u].iter().rev() {
                    if !seen.contains(&v) {
                        stack.push(v);
                    }
                }
            }
        }
        Ok(LineTrack { line, stations: order, closed: false, linear: false })
    }

    /// Content hash (FNV-1a) of stations, edges and arcs. Equal graphs hash
    /// equally regardless of version.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv::new();
        for name in self.line_names.iter() {
            h.bytes(name.as_bytes());
            h.bytes(&[0xff]);
        }
        for s in &self.stations {
            h.u64(s.id.0 as u64);
            for l in &s.lines {
                h.u64(l.0 as u64);
            }
            h.bytes(&[0xfe]);
        }
        for e in &self.edges {
            h.u64(e.a.0 as u64);
            h.u64(e.b.0 as u64);
            h.u64(e.line.0 as u64);
            h.u64(e.run_time.ticks() as u64);
        }
        for a in &self.transfer_arcs {
            h.u64(a.station.0 as u64);
            h.u64(a.from_line.0 as u64);
            h.u64(a.to_line.0 as u64);
            h.u64(a.transfer_time.ticks() as u64);
        }
        h.finish()
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    fn u64(&mut self, v: u64) {
        self.bytes(&v.to_le_bytes());
    }

    fn finish(&self) -> u64 {
        self.0
    }
}
