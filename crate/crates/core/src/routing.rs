//! K shortest loopless paths and reasonable-path selection.
//!
//! Searches run on the line-expanded graph: a search state is a station
//! together with the line the traveller arrived on, so changing lines costs
//! the station's transfer-arc time. Paths are loopless at the station level.
//!
//! Two search routes share one admissible heuristic, the exact walk cost to
//! the destination obtained from a reverse Dijkstra over states:
//!
//! * [`k_shortest_paths`] is a best-first enumeration of station-simple
//!   partial paths keyed by `(lower bound, station ids, lines)`, which emits
//!   complete paths in exactly the order `(total_time, station ids, lines)`.
//! * [`PathCache`] only needs the paths tied at the minimum, so it walks the
//!   tight moves depth-first, falling back to the best-first search for the
//!   rare pairs whose cheapest walk revisits a station.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};

use serde::{Deserialize, Serialize};

use crate::exec::Executor;
use crate::network::{LineId, StationGraph, StationId};
use crate::units::Minutes;

pub const DEFAULT_K: usize = 8;

/// Upper bound on the number of equal-cost paths enumerated for one pair.
pub const MAX_TIED_PATHS: usize = 1 << 16;

const UNREACHABLE: i64 = i64::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub stations: Vec<StationId>,
    /// Line ridden on each hop; `lines.len() + 1 == stations.len()`.
    pub lines: Vec<LineId>,
    pub ride_time: Minutes,
    pub transfer_count: u32,
    pub transfer_time: Minutes,
    pub total_time: Minutes,
}

impl Path {
    pub fn origin(&self) -> StationId {
        self.stations[0]
    }

    pub fn destination(&self) -> StationId {
        *self.stations.last().unwrap()
    }

    /// Stations strictly between origin and destination.
    pub fn interior(&self) -> &[StationId] {
        let n = self.stations.len();
        if n <= 2 {
            &[]
        } else {
            &self.stations[1..n - 1]
        }
    }

    pub fn passes_through(&self, station: StationId) -> bool {
        self.interior().contains(&station)
    }

    fn order_key(&self) -> (Minutes, &[StationId], &[LineId]) {
        (self.total_time, &self.stations, &self.lines)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitRule {
    /// Weight proportional to the inverse of total time.
    #[default]
    Inverse,
    /// Weight proportional to total time.
    ProportionalDirect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutingOptions {
    pub k: usize,
    pub split_rule: SplitRule,
    /// Paths within this much of the fastest count as tied on time.
    pub epsilon_time: Minutes,
}

impl Default for RoutingOptions {
    fn default() -> Self {
        RoutingOptions { k: DEFAULT_K, split_rule: SplitRule::Inverse, epsilon_time: Minutes::ZERO }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RoutingError {
    #[error("unknown station {0}")]
    UnknownStation(StationId),
    #[error("origin and destination are both {0}")]
    SameStation(StationId),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("no path from {origin} to {destination}")]
    Unreachable { origin: StationId, destination: StationId },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReasonablePathSet {
    pub origin: StationId,
    pub destination: StationId,
    pub paths: Vec<Path>,
    pub split_weights: Vec<f64>,
}

impl ReasonablePathSet {
    /// Split-weighted mean total time in minutes.
    pub fn mean_total_time(&self) -> f64 {
        self.paths.iter().zip(&self.split_weights).map(|(p, w)| w * p.total_time.as_f64()).sum()
    }

    /// Shortest total time among the paths (all equal unless epsilon > 0).
    pub fn min_total_time(&self) -> Minutes {
        self.paths.iter().map(|p| p.total_time).min().unwrap()
    }

    /// Summed split weight of the paths that pass through `station`.
    pub fn weight_through(&self, station: StationId) -> f64 {
        self.paths.iter().zip(&self.split_weights).filter(|(p, _)| p.passes_through(station)).map(|(_, w)| *w).sum()
    }

    pub fn any_passes_through(&self, station: StationId) -> bool {
        self.paths.iter().any(|p| p.passes_through(station))
    }
}

/// Dense numbering of (station, line) search states.
struct StateSpace<'g> {
    graph: &'g StationGraph,
    offset: Vec<u32>,
}

impl<'g> StateSpace<'g> {
    fn new(graph: &'g StationGraph) -> Self {
        let mut offset = Vec::with_capacity(graph.station_count() + 1);
        let mut acc = 0u32;
        for s in graph.stations() {
            offset.push(acc);
            acc += s.lines.len() as u32;
        }
        offset.push(acc);
        StateSpace { graph, offset }
    }

    fn len(&self) -> usize {
        *self.offset.last().unwrap() as usize
    }

    fn state(&self, station: usize, line: LineId) -> usize {
        let lines = &self.graph.stations()[station].lines;
        let pos = lines.iter().position(|&l| l == line).expect("hop line is carried by its station");
        self.offset[station] as usize + pos
    }

    /// Cheapest walk cost from every state to `dest`, ignoring the
    /// station-simple restriction.
    fn cost_to_go(&self, dest: usize) -> Vec<i64> {
        let g = self.graph;
        let mut h = vec![UNREACHABLE; self.len()];
        let mut heap = BinaryHeap::new();
        for st in self.offset[dest]..self.offset[dest + 1] {
            h[st as usize] = 0;
            heap.push(Reverse((0i64, dest as u32, st)));
        }
        while let Some(Reverse((cost, station, st))) = heap.pop() {
            if cost > h[st as usize] {
                continue;
            }
            let station = station as usize;
            let line = g.stations()[station].lines[(st - self.offset[station]) as usize];
            for hop in g.hops(station).iter().filter(|hop| hop.line == line) {
                let from = hop.to as usize;
                if from == dest {
                    continue;
                }
                let base = cost + hop.time.ticks();
                for (pos, &arrive) in g.stations()[from].lines.iter().enumerate() {
                    let Some(x) = g.transfer_time_at(from, arrive, line) else { continue };
                    let cand = base + x.ticks();
                    let idx = self.offset[from] as usize + pos;
                    if cand < h[idx] {
                        h[idx] = cand;
                        heap.push(Reverse((cand, from as u32, idx as u32)));
                    }
                }
            }
        }
        h
    }

    /// Lower bound from the origin, where no arrival line exists yet.
    fn start_bound(&self, h: &[i64], origin: usize) -> i64 {
        self.graph
            .hops(origin)
            .iter()
            .filter_map(|hop| {
                let rest = h[self.state(hop.to as usize, hop.line)];
                (rest != UNREACHABLE).then(|| rest + hop.time.ticks())
            })
            .min()
            .unwrap_or(UNREACHABLE)
    }
}

/// Accumulates one partial path during enumeration.
#[derive(Clone)]
struct Trail {
    stations: Vec<u32>,
    lines: Vec<LineId>,
    ride: i64,
    transfers: u32,
    transfer: i64,
}

impl Trail {
    fn start(origin: usize) -> Self {
        Trail { stations: vec![origin as u32], lines: Vec::new(), ride: 0, transfers: 0, transfer: 0 }
    }

    fn cost(&self) -> i64 {
        self.ride + self.transfer
    }

    fn last(&self) -> usize {
        *self.stations.last().unwrap() as usize
    }

    /// Extra transfer time for riding `line` next, `None` if the line change
    /// is impossible here.
    fn change_cost(&self, g: &StationGraph, line: LineId) -> Option<i64> {
        match self.lines.last() {
            None => Some(0),
            Some(&prev) => g.transfer_time_at(self.last(), prev, line).map(Minutes::ticks),
        }
    }

    fn push(&mut self, to: u32, line: LineId, run: i64, change: i64) {
        if change > 0 || self.lines.last().is_some_and(|&l| l != line) {
            self.transfers += 1;
        }
        self.transfer += change;
        self.ride += run;
        self.stations.push(to);
        self.lines.push(line);
    }

    fn pop(&mut self, run: i64, change: i64, counted: bool) {
        self.stations.pop();
        self.lines.pop();
        self.ride -= run;
        self.transfer -= change;
        if counted {
            self.transfers -= 1;
        }
    }

    fn to_path(&self, g: &StationGraph) -> Path {
        Path {
            stations: self.stations.iter().map(|&i| g.id_at(i as usize)).collect(),
            lines: self.lines.clone(),
            ride_time: Minutes::from_ticks(self.ride),
            transfer_count: self.transfers,
            transfer_time: Minutes::from_ticks(self.transfer),
            total_time: Minutes::from_ticks(self.cost()),
        }
    }
}

struct Frontier {
    bound: i64,
    ids: Vec<StationId>,
    trail: Trail,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .cmp(&other.bound)
            .then_with(|| self.ids.cmp(&other.ids))
            .then_with(|| self.trail.lines.cmp(&other.trail.lines))
    }
}

/// Best-first enumeration; returns up to `k` complete paths in
/// `(total_time, station ids, lines)` order.
fn best_first(space: &StateSpace<'_>, h: &[i64], origin: usize, dest: usize, k: usize) -> Vec<Path> {
    let g = space.graph;
    let mut out = Vec::new();
    if space.start_bound(h, origin) == UNREACHABLE {
        return out;
    }
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(Frontier {
        bound: space.start_bound(h, origin),
        ids: vec![g.id_at(origin)],
        trail: Trail::start(origin),
    }));
    while let Some(Reverse(node)) = heap.pop() {
        let here = node.trail.last();
        if here == dest {
            out.push(node.trail.to_path(g));
            if out.len() == k {
                break;
            }
            continue;
        }
        for hop in g.hops(here) {
            let to = hop.to as usize;
            if node.trail.stations.contains(&hop.to) {
                continue;
            }
            let Some(change) = node.trail.change_cost(g, hop.line) else { continue };
            let rest = if to == dest { 0 } else { h[space.state(to, hop.line)] };
            if rest == UNREACHABLE {
                continue;
            }
            let mut trail = node.trail.clone();
            trail.push(hop.to, hop.line, hop.time.ticks(), change);
            let mut ids = node.ids.clone();
            ids.push(g.id_at(to));
            heap.push(Reverse(Frontier { bound: trail.cost() + rest, ids, trail }));
        }
    }
    out
}

/// Depth-first enumeration of every station-simple path whose cost is at
/// most `bound`, pruning with the cost-to-go lower bound.
struct TightSearch<'a, 'g> {
    space: &'a StateSpace<'g>,
    h: &'a [i64],
    dest: usize,
    bound: i64,
    visited: Vec<bool>,
    trail: Trail,
    found: Vec<Path>,
}

impl TightSearch<'_, '_> {
    fn run(space: &StateSpace<'_>, h: &[i64], origin: usize, dest: usize, bound: i64) -> Vec<Path> {
        let mut search = TightSearch {
            space,
            h,
            dest,
            bound,
            visited: vec![false; space.graph.station_count()],
            trail: Trail::start(origin),
            found: Vec::new(),
        };
        search.visited[origin] = true;
        search.descend();
        search.found
    }

    fn descend(&mut self) {
        let g = self.space.graph;
        let here = self.trail.last();
        for hop in g.hops(here) {
            if self.found.len() >= MAX_TIED_PATHS {
                return;
            }
            let to = hop.to as usize;
            if self.visited[to] {
                continue;
            }
            let Some(change) = self.trail.change_cost(g, hop.line) else { continue };
            let cost = self.trail.cost() + change + hop.time.ticks();
            if to == self.dest {
                if cost <= self.bound {
                    let counted = self.trail.lines.last().is_some_and(|&l| l != hop.line);
                    self.trail.push(hop.to, hop.line, hop.time.ticks(), change);
                    self.found.push(self.trail.to_path(g));
                    self.trail.pop(hop.time.ticks(), change, counted);
                }
                continue;
            }
            let rest = self.h[self.space.state(to, hop.line)];
            if rest == UNREACHABLE || cost + rest > self.bound {
                continue;
            }
            let counted = self.trail.lines.last().is_some_and(|&l| l != hop.line);
            self.trail.push(hop.to, hop.line, hop.time.ticks(), change);
            self.visited[to] = true;
            self.descend();
            self.visited[to] = false;
            self.trail.pop(hop.time.ticks(), change, counted);
        }
    }
}

fn check_pair(g: &StationGraph, origin: StationId, destination: StationId) -> Result<(usize, usize), RoutingError> {
    let o = g.index_of(origin).ok_or(RoutingError::UnknownStation(origin))?;
    let d = g.index_of(destination).ok_or(RoutingError::UnknownStation(destination))?;
    if o == d {
        return Err(RoutingError::SameStation(origin));
    }
    Ok((o, d))
}

/// Up to `k` loopless paths from `origin` to `destination`, ascending by
/// total time, ties broken by station ids then lines. Empty when the pair
/// is disconnected.
pub fn k_shortest_paths(
    g: &StationGraph,
    origin: StationId,
    destination: StationId,
    k: usize,
) -> Result<Vec<Path>, RoutingError> {
    if k == 0 {
        return Err(RoutingError::ZeroK);
    }
    let (o, d) = check_pair(g, origin, destination)?;
    let space = StateSpace::new(g);
    let h = space.cost_to_go(d);
    Ok(best_first(&space, &h, o, d, k))
}

/// Lexicographic selection over `(total_time within epsilon, transfer
/// count, transfer time)`. `candidates` must be sorted by total time.
pub fn select_reasonable(candidates: Vec<Path>, epsilon: Minutes) -> Vec<Path> {
    let Some(fastest) = candidates.iter().map(|p| p.total_time).min() else {
        return candidates;
    };
    let limit = fastest + epsilon;
    let timely: Vec<Path> = candidates.into_iter().filter(|p| p.total_time <= limit).collect();
    let fewest = timely.iter().map(|p| p.transfer_count).min().unwrap();
    let shortest_transfer =
        timely.iter().filter(|p| p.transfer_count == fewest).map(|p| p.transfer_time).min().unwrap();
    timely.into_iter().filter(|p| p.transfer_count == fewest && p.transfer_time == shortest_transfer).collect()
}

pub fn split_weights(paths: &[Path], rule: SplitRule) -> Vec<f64> {
    let raw: Vec<f64> = paths
        .iter()
        .map(|p| {
            let t = p.total_time.as_f64();
            match rule {
                SplitRule::Inverse => 1.0 / t,
                SplitRule::ProportionalDirect => t,
            }
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

impl ReasonablePathSet {
    /// Selects and weights reasonable paths out of sorted candidates; `None`
    /// when there are none.
    pub fn from_candidates(candidates: Vec<Path>, options: &RoutingOptions) -> Option<ReasonablePathSet> {
        let first = candidates.first()?;
        let (origin, destination) = (first.origin(), first.destination());
        let paths = select_reasonable(candidates, options.epsilon_time);
        let split_weights = split_weights(&paths, options.split_rule);
        Some(ReasonablePathSet { origin, destination, paths, split_weights })
    }
}

/// The candidates a [`PathCache`] selects from: the first `k` paths within
/// `epsilon` of the optimum, per listed pair. Disconnected pairs map to an
/// empty list; unknown or identical endpoints are left out.
pub fn candidate_paths<E: Executor>(
    g: &StationGraph,
    pairs: &[(StationId, StationId)],
    options: &RoutingOptions,
    exec: &E,
) -> BTreeMap<(StationId, StationId), Vec<Path>> {
    let n = g.station_count();
    let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(o, d) in pairs {
        if let (Some(o), Some(d)) = (g.index_of(o), g.index_of(d)) {
            if o != d {
                columns[d].push(o);
            }
        }
    }
    let active: Vec<usize> = (0..n).filter(|&d| !columns[d].is_empty()).collect();
    let space = StateSpace::new(g);
    let computed = exec.map(active.len(), |i| {
        let d = active[i];
        let h = space.cost_to_go(d);
        columns[d]
            .iter()
            .map(|&o| {
                let mut found = tied_paths(&space, &h, o, d, options.epsilon_time);
                found.truncate(options.k);
                ((g.id_at(o), g.id_at(d)), found)
            })
            .collect::<Vec<_>>()
    });
    computed.into_iter().flatten().collect()
}

/// Reasonable paths: the `k` shortest candidates filtered to those minimal
/// in total time (within epsilon), then transfer count, then transfer time.
pub fn reasonable_paths(
    g: &StationGraph,
    origin: StationId,
    destination: StationId,
    options: &RoutingOptions,
) -> Result<ReasonablePathSet, RoutingError> {
    let candidates = k_shortest_paths(g, origin, destination, options.k)?;
    ReasonablePathSet::from_candidates(candidates, options).ok_or(RoutingError::Unreachable { origin, destination })
}

/// Every loopless path tied at the minimum total time (capped at
/// [`MAX_TIED_PATHS`]), sorted by station ids then lines.
pub fn minimal_paths(g: &StationGraph, origin: StationId, destination: StationId) -> Result<Vec<Path>, RoutingError> {
    let (o, d) = check_pair(g, origin, destination)?;
    let space = StateSpace::new(g);
    let h = space.cost_to_go(d);
    Ok(tied_paths(&space, &h, o, d, Minutes::ZERO))
}

/// [`minimal_paths`] from every station to `destination`, indexed by dense
/// origin index (empty for the destination itself and unreachable
/// origins).
pub fn minimal_paths_to(g: &StationGraph, destination: StationId) -> Result<Vec<Vec<Path>>, RoutingError> {
    let d = g.index_of(destination).ok_or(RoutingError::UnknownStation(destination))?;
    let space = StateSpace::new(g);
    let h = space.cost_to_go(d);
    Ok((0..g.station_count())
        .map(|o| if o == d { Vec::new() } else { tied_paths(&space, &h, o, d, Minutes::ZERO) })
        .collect())
}

/// All paths with cost at most the loopless optimum plus `epsilon`, sorted
/// by `(total_time, station ids, lines)`.
fn tied_paths(space: &StateSpace<'_>, h: &[i64], o: usize, d: usize, epsilon: Minutes) -> Vec<Path> {
    let walk_bound = space.start_bound(h, o);
    if walk_bound == UNREACHABLE {
        return Vec::new();
    }
    let mut found = TightSearch::run(space, h, o, d, walk_bound);
    let optimum = if found.is_empty() {
        // The cheapest walk revisits a station; ask the exact search.
        match best_first(space, h, o, d, 1).first() {
            Some(p) => p.total_time.ticks(),
            None => return Vec::new(),
        }
    } else {
        walk_bound
    };
    if found.is_empty() || epsilon.is_positive() {
        found = TightSearch::run(space, h, o, d, optimum + epsilon.ticks());
    }
    found.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    found
}

fn pair_set(
    space: &StateSpace<'_>,
    h: &[i64],
    o: usize,
    d: usize,
    options: &RoutingOptions,
) -> Option<ReasonablePathSet> {
    let mut candidates = tied_paths(space, h, o, d, options.epsilon_time);
    candidates.truncate(options.k);
    ReasonablePathSet::from_candidates(candidates, options)
}

/// Identifies the graph and options a [`PathCache`] was built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheKey {
    pub graph_version: u64,
    pub graph_fingerprint: u64,
    pub options: RoutingOptions,
}

impl CacheKey {
    pub fn new(g: &StationGraph, options: &RoutingOptions) -> Self {
        CacheKey { graph_version: g.version(), graph_fingerprint: g.fingerprint(), options: *options }
    }
}

/// Through-traffic entry: the pair `(origin, destination)` sends `weight`
/// of its flow through the station on reasonable paths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassingPair {
    pub origin: StationId,
    pub destination: StationId,
    pub weight: f64,
}

/// Precomputed reasonable-path sets for ordered station pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathCache {
    key: CacheKey,
    stations: Vec<StationId>,
    /// Row-major `origin * n + destination`; `None` for the diagonal,
    /// unreachable pairs and pairs that were not requested.
    sets: Vec<Option<ReasonablePathSet>>,
    /// Per dense station index, the pairs passing through it.
    through: Vec<Vec<PassingPair>>,
}

impl PathCache {
    /// All ordered pairs of `g`.
    pub fn build<E: Executor>(g: &StationGraph, options: &RoutingOptions, exec: &E) -> PathCache {
        let n = g.station_count();
        let all: Vec<Vec<usize>> = (0..n).map(|d| (0..n).filter(|&o| o != d).collect()).collect();
        Self::build_columns(g, options, exec, all)
    }

    /// Only the listed pairs; pairs with unknown or identical endpoints are
    /// ignored.
    pub fn build_for_pairs<E: Executor>(
        g: &StationGraph,
        pairs: &[(StationId, StationId)],
        options: &RoutingOptions,
        exec: &E,
    ) -> PathCache {
        let n = g.station_count();
        let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(o, d) in pairs {
            if let (Some(o), Some(d)) = (g.index_of(o), g.index_of(d)) {
                if o != d {
                    columns[d].push(o);
                }
            }
        }
        for col in &mut columns {
            col.sort_unstable();
            col.dedup();
        }
        Self::build_columns(g, options, exec, columns)
    }

    fn build_columns<E: Executor>(
        g: &StationGraph,
        options: &RoutingOptions,
        exec: &E,
        columns: Vec<Vec<usize>>,
    ) -> PathCache {
        assert!(options.k >= 1, "k must be at least 1");
        let n = g.station_count();
        let space = StateSpace::new(g);
        let active: Vec<usize> = (0..n).filter(|&d| !columns[d].is_empty()).collect();
        let computed: Vec<Vec<(usize, Option<ReasonablePathSet>)>> = exec.map(active.len(), |i| {
            let d = active[i];
            let h = space.cost_to_go(d);
            columns[d].iter().map(|&o| (o, pair_set(&space, &h, o, d, options))).collect()
        });
        let mut sets = vec![None; n * n];
        for (&d, column) in active.iter().zip(computed) {
            for (o, set) in column {
                sets[o * n + d] = set;
            }
        }
        let stations: Vec<StationId> = g.station_ids().collect();
        let through = index_through(g, &sets, n);
        PathCache { key: CacheKey::new(g, options), stations, sets, through }
    }

    pub fn key(&self) -> &CacheKey {
        &self.key
    }

    /// Whether the cache was built on a graph structurally equal to `g`
    /// with these options.
    pub fn matches(&self, g: &StationGraph, options: &RoutingOptions) -> bool {
        self.key.graph_fingerprint == g.fingerprint() && self.key.options == *options
    }

    pub fn station_count(&self) -> usize {
        self.stations.len()
    }

    fn index_of(&self, id: StationId) -> Option<usize> {
        self.stations.binary_search(&id).ok()
    }

    pub fn get(&self, origin: StationId, destination: StationId) -> Option<&ReasonablePathSet> {
        let n = self.stations.len();
        let o = self.index_of(origin)?;
        let d = self.index_of(destination)?;
        self.sets[o * n + d].as_ref()
    }

    /// Every stored set, in origin-then-destination order.
    pub fn sets(&self) -> impl Iterator<Item = &ReasonablePathSet> {
        self.sets.iter().flatten()
    }

    pub fn pair_count(&self) -> usize {
        self.sets.iter().flatten().count()
    }

    /// Pairs with `station` strictly inside at least one reasonable path.
    pub fn passing_pairs(&self, station: StationId) -> &[PassingPair] {
        match self.index_of(station) {
            Some(i) => &self.through[i],
            None => &[],
        }
    }
}

fn index_through(g: &StationGraph, sets: &[Option<ReasonablePathSet>], n: usize) -> Vec<Vec<PassingPair>> {
    let mut through: Vec<Vec<PassingPair>> = vec![Vec::new(); n];
    let mut weight = vec![0.0f64; n];
    let mut touched: Vec<usize> = Vec::new();
    for set in sets.iter().flatten() {
        for (path, w) in set.paths.iter().zip(&set.split_weights) {
            for s in path.interior() {
                let i = g.index_of(*s).unwrap();
                if weight[i] == 0.0 && !touched.contains(&i) {
                    touched.push(i);
                }
                weight[i] += w;
            }
        }
        touched.sort_unstable();
        for &i in &touched {
            through[i].push(PassingPair { origin: set.origin, destination: set.destination, weight: weight[i] });
            weight[i] = 0.0;
        }
        touched.clear();
    }
    through
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::fixtures::{cross7, diamond, ids, random_small_network, NetworkSketch};

    #[test]
    fn cross7_same_line() {
        let g = cross7();
        let paths = k_shortest_paths(&g, ids::A1, ids::A3, 3).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].stations, vec![ids::A1, ids::A2, ids::X, ids::A3]);
        assert_eq!(paths[0].total_time, Minutes::whole(6));
        assert_eq!(paths[0].transfer_count, 0);
    }

    #[test]
    fn cross7_with_transfer() {
        let g = cross7();
        let paths = k_shortest_paths(&g, ids::A1, ids::B2, 3).unwrap();
        assert_eq!(paths.len(), 1);
        let p = &paths[0];
        assert_eq!(p.ride_time, Minutes::whole(7));
        assert_eq!(p.transfer_count, 1);
        assert_eq!(p.transfer_time, Minutes::whole(5));
        assert_eq!(p.total_time, Minutes::whole(12));
        let set = reasonable_paths(&g, ids::A1, ids::B2, &RoutingOptions::default()).unwrap();
        assert_eq!(set.split_weights, vec![1.0]);
    }

    #[test]
    fn disconnected_pair() {
        let g = cross7().remove_stations(&[ids::X]).unwrap();
        assert!(k_shortest_paths(&g, ids::A1, ids::B1, 3).unwrap().is_empty());
        assert_eq!(
            reasonable_paths(&g, ids::A1, ids::B1, &RoutingOptions::default()),
            Err(RoutingError::Unreachable { origin: ids::A1, destination: ids::B1 })
        );
        assert_eq!(
            reasonable_paths(&g, ids::A1, ids::X, &RoutingOptions::default()),
            Err(RoutingError::UnknownStation(ids::X))
        );
    }

    #[test]
    fn diamond_splits() {
        let g = diamond(10.0, 10.0);
        let set = reasonable_paths(&g, StationId(1), StationId(4), &RoutingOptions::default()).unwrap();
        assert_eq!(set.paths.len(), 2);
        assert_eq!(set.split_weights, vec![0.5, 0.5]);

        let g = diamond(10.0, 12.0);
        let all = k_shortest_paths(&g, StationId(1), StationId(4), 8).unwrap();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].total_time, Minutes::whole(10));
        let set = reasonable_paths(&g, StationId(1), StationId(4), &RoutingOptions::default()).unwrap();
        assert_eq!(set.paths.len(), 1);
        assert_eq!(set.paths[0].stations[1], StationId(2));
        assert_eq!(set.split_weights, vec![1.0]);
    }

    #[test]
    fn epsilon_admits_slower_paths_and_split_rules_differ() {
        let g = diamond(10.0, 12.0);
        let mut opts = RoutingOptions { epsilon_time: Minutes::whole(2), ..RoutingOptions::default() };
        let set = reasonable_paths(&g, StationId(1), StationId(4), &opts).unwrap();
        assert_eq!(set.paths.len(), 2);
        assert!((set.split_weights[0] - 12.0 / 22.0).abs() < 1e-12);
        opts.split_rule = SplitRule::ProportionalDirect;
        let set = reasonable_paths(&g, StationId(1), StationId(4), &opts).unwrap();
        assert!((set.split_weights[0] - 10.0 / 22.0).abs() < 1e-12);
    }

    #[test]
    fn fewer_transfers_win_ties() {
        // 1 -> 4 either straight on line P (6 min) or on Q then R with a
        // 1-minute change at station 3, also 6 min in total.
        let g = NetworkSketch::new()
            .line("P", &[1, 2, 4], &[3.0, 3.0])
            .line("Q", &[1, 3], &[2.0])
            .line("R", &[3, 4], &[3.0])
            .transfer(3, "Q", "R", 1.0)
            .build();
        let ksp = k_shortest_paths(&g, StationId(1), StationId(4), 8).unwrap();
        assert_eq!(ksp.len(), 2);
        assert_eq!(ksp[0].total_time, ksp[1].total_time);
        let set = reasonable_paths(&g, StationId(1), StationId(4), &RoutingOptions::default()).unwrap();
        assert_eq!(set.paths.len(), 1);
        assert_eq!(set.paths[0].transfer_count, 0);
    }

    #[test]
    fn looping_walk_is_not_a_path() {
        // Changing lines at 2 costs 20 min, but riding on to 3, changing
        // there (1 min) and coming back on M is only 5 min. That walk
        // revisits 2, so the loopless optimum must pay the slow change.
        let g = NetworkSketch::new()
            .line("L", &[1, 2, 3], &[1.0, 1.0])
            .line("M", &[3, 2, 4], &[2.0, 1.0])
            .transfer(2, "L", "M", 20.0)
            .transfer(3, "L", "M", 1.0)
            .build();
        let best = k_shortest_paths(&g, StationId(1), StationId(4), 1).unwrap();
        // 1 -L-> 2 -L-> 3 -M-> 2 would revisit 2; the direct options are
        // 1-2 (L) change (20) 2-4 (M) = 22, or 1-2-3 (L) change (1) 3-2-4 (M)
        // which revisits 2. Only the first is loopless.
        assert_eq!(best.len(), 1);
        assert_eq!(best[0].stations, vec![StationId(1), StationId(2), StationId(4)]);
        assert_eq!(best[0].total_time, Minutes::whole(22));
        let cache = PathCache::build(&g, &RoutingOptions::default(), &Sequential);
        assert_eq!(cache.get(StationId(1), StationId(4)).unwrap().paths, best);
    }

    #[test]
    fn cache_pass_through_sets() {
        let g = cross7();
        let cache = PathCache::build(&g, &RoutingOptions::default(), &Sequential);
        assert_eq!(cache.pair_count(), 42);
        assert!(cache.passing_pairs(ids::A1).is_empty());
        let via_x = cache.passing_pairs(ids::X);
        assert!(via_x.iter().any(|p| p.origin == ids::A1 && p.destination == ids::A3));
        assert!(via_x.iter().any(|p| p.origin == ids::B1 && p.destination == ids::A1));
        assert!(!via_x.iter().any(|p| p.origin == ids::A1 && p.destination == ids::A2));

        let same = PathCache::build(&g.remove_stations(&[]).unwrap(), &RoutingOptions::default(), &Sequential);
        assert_ne!(same.key().graph_version, cache.key().graph_version);
        assert_eq!(same.sets, cache.sets);
        assert_eq!(same.through, cache.through);
    }

    #[test]
    fn cache_agrees_with_direct_queries() {
        let opts = RoutingOptions::default();
        for seed in 0..60 {
            let g = random_small_network(seed, 10);
            let cache = PathCache::build(&g, &opts, &Sequential);
            for o in g.station_ids() {
                for d in g.station_ids().filter(|&d| d != o) {
                    let direct = reasonable_paths(&g, o, d, &opts).unwrap();
                    assert_eq!(cache.get(o, d), Some(&direct), "seed {seed} pair {o}->{d}");
                }
            }
        }
    }

    #[test]
    fn partial_cache_only_holds_requested_pairs() {
        let g = cross7();
        let cache = PathCache::build_for_pairs(
            &g,
            &[(ids::A1, ids::B2), (ids::A1, ids::A1)],
            &RoutingOptions::default(),
            &Sequential,
        );
        assert_eq!(cache.pair_count(), 1);
        assert!(cache.get(ids::B2, ids::A1).is_none());
    }
}
