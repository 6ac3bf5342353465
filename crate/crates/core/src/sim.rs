//! Deliberate-attack campaigns and their vulnerability curves.
//!
//! A campaign is a sequence of removal events applied cumulatively to the
//! intact graph. After every event the long-delay efficiency of the
//! reconstructed graph is recorded. [`PsiLongTracker`] keeps the candidate
//! paths of every demanded pair and only searches again for pairs whose
//! candidates lost a station, edge or transfer; the result equals a
//! from-scratch evaluation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::demand::{ODMatrix, TimeBin};
use crate::exec::Executor;
use crate::metrics::StationMetrics;
use crate::network::{LineId, LineTrack, NetworkError, StationGraph, StationId};
use crate::routing::{candidate_paths, Path, ReasonablePathSet, RoutingOptions};
use crate::vulnerability::VulnerabilityError;

/// Importance score per station; stations not listed score zero.
pub type Scores = BTreeMap<StationId, f64>;

pub fn scores_from_metrics(metrics: &[StationMetrics]) -> Scores {
    metrics.iter().map(|m| (m.station, m.importance)).collect()
}

fn score(scores: &Scores, s: StationId) -> f64 {
    scores.get(&s).copied().unwrap_or(0.0)
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("unknown station {0}")]
    UnknownStation(StationId),
    #[error("unknown line #{}", .0 .0)]
    UnknownLine(LineId),
    #[error("plan lists {0} more than once")]
    Duplicate(String),
    #[error("interval width must be 2 or 3, got {0}")]
    InvalidWidth(usize),
    #[error("asked for {steps} steps but the ranking has {available}")]
    RankingTooShort { steps: usize, available: usize },
    #[error(transparent)]
    Vulnerability(#[from] VulnerabilityError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// One removal event.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "target")]
pub enum Removal {
    Stations(Vec<StationId>),
    Line(LineId),
}

fn path_survives(g: &StationGraph, p: &Path) -> bool {
    p.stations.iter().all(|&s| g.contains(s))
        && p.stations.windows(2).zip(&p.lines).all(|(w, &l)| g.has_edge(w[0], w[1], l))
        && p.lines
            .windows(2)
            .zip(&p.stations[1..])
            .all(|(l, &s)| l[0] == l[1] || g.transfer_time(s, l[0], l[1]).is_some())
}

struct Entry {
    flow: f64,
    candidates: Vec<Path>,
    tau: Option<f64>,
}

impl Entry {
    fn new(flow: f64, candidates: Vec<Path>, options: &RoutingOptions) -> Self {
        let tau = ReasonablePathSet::from_candidates(candidates.clone(), options).map(|s| s.mean_total_time());
        Entry { flow, candidates, tau }
    }
}

/// Long-delay efficiency under cumulative removals, updated incrementally.
pub struct PsiLongTracker<'e, E: Executor> {
    graph: StationGraph,
    options: RoutingOptions,
    exec: &'e E,
    entries: BTreeMap<(StationId, StationId), Entry>,
    recomputed: usize,
}

impl<'e, E: Executor> PsiLongTracker<'e, E> {
    pub fn new(g: &StationGraph, od: &ODMatrix, options: &RoutingOptions, exec: &'e E) -> Self {
        let pairs: Vec<(StationId, StationId)> = od.pairs().filter(|&(o, d)| g.contains(o) && g.contains(d)).collect();
        let found = candidate_paths(g, &pairs, options, exec);
        let entries = found
            .into_iter()
            .map(|(pair, candidates)| (pair, Entry::new(od.flow(pair.0, pair.1), candidates, options)))
            .collect();
        PsiLongTracker { graph: g.clone(), options: *options, exec, entries, recomputed: 0 }
    }

    pub fn graph(&self) -> &StationGraph {
        &self.graph
    }

    /// Pairs searched again since construction.
    pub fn recomputed_pairs(&self) -> usize {
        self.recomputed
    }

    pub fn value(&self) -> Result<f64, VulnerabilityError> {
        let n = self.graph.station_count();
        if n < 2 {
            return Err(VulnerabilityError::EmptyGraph);
        }
        let sum = self.entries.values().filter_map(|e| e.tau.map(|t| e.flow / t)).fold(0.0, |a, b| a + b);
        Ok(sum / (n * (n - 1)) as f64)
    }

    /// Applies one removal and returns the stations it took out.
    pub fn apply(&mut self, removal: &Removal) -> Result<Vec<StationId>, SimError> {
        let next = match removal {
            Removal::Stations(ids) => {
                let present: Vec<StationId> = ids.iter().copied().filter(|&s| self.graph.contains(s)).collect();
                if present.is_empty() {
                    return Ok(Vec::new());
                }
                self.graph.remove_stations(&present)?
            }
            Removal::Line(line) => self.graph.remove_line(*line)?,
        };
        let gone: Vec<StationId> = self.graph.station_ids().filter(|&s| !next.contains(s)).collect();
        self.graph = next;
        self.entries.retain(|&(o, d), _| !gone.contains(&o) && !gone.contains(&d));
        let g = &self.graph;
        let dirty: Vec<(StationId, StationId)> = self
            .entries
            .iter()
            .filter(|(_, e)| !e.candidates.iter().all(|p| path_survives(g, p)))
            .map(|(&pair, _)| pair)
            .collect();
        self.recomputed += dirty.len();
        for (pair, candidates) in candidate_paths(g, &dirty, &self.options, self.exec) {
            let entry = self.entries.get_mut(&pair).unwrap();
            *entry = Entry::new(entry.flow, candidates, &self.options);
        }
        Ok(gone)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveStep {
    pub step: usize,
    /// Stations taken out by this step.
    pub removed: Vec<StationId>,
    pub line: Option<LineId>,
    /// `None` once fewer than two stations remain.
    pub psi_long: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VulnerabilityCurve {
    pub plan_id: String,
    pub bin: TimeBin,
    pub baseline: f64,
    /// Step 0 is the intact graph.
    pub steps: Vec<CurveStep>,
    /// The campaign stopped because the network ran out of stations.
    pub exhausted: bool,
}

impl VulnerabilityCurve {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn values(&self) -> Vec<Option<f64>> {
        self.steps.iter().map(|s| s.psi_long).collect()
    }

    /// Every station removed up to and including `step`, sorted.
    pub fn cumulative_stations(&self, step: usize) -> Vec<StationId> {
        let set: BTreeSet<StationId> = self.steps[..=step].iter().flat_map(|s| s.removed.iter().copied()).collect();
        set.into_iter().collect()
    }

    /// Lines removed up to and including `step`, in removal order.
    pub fn cumulative_lines(&self, step: usize) -> Vec<LineId> {
        self.steps[..=step].iter().filter_map(|s| s.line).collect()
    }

    pub fn final_value(&self) -> Option<f64> {
        self.steps.last().and_then(|s| s.psi_long)
    }
}

fn check_stations<'a>(g: &StationGraph, ids: impl IntoIterator<Item = &'a StationId>) -> Result<(), SimError> {
    for &s in ids {
        if !g.contains(s) {
            return Err(SimError::UnknownStation(s));
        }
    }
    Ok(())
}

fn check_lines(g: &StationGraph, lines: &[LineId]) -> Result<(), SimError> {
    let present = g.lines();
    let mut seen = BTreeSet::new();
    for &l in lines {
        if !present.contains(&l) {
            return Err(SimError::UnknownLine(l));
        }
        if !seen.insert(l) {
            return Err(SimError::Duplicate(String::from(g.line_name(l))));
        }
    }
    Ok(())
}

/// Applies `removals` in order, skipping events whose targets are all gone,
/// and records the efficiency after each remaining event. At most
/// `max_steps` events are recorded after the baseline.
pub fn run_removals<E: Executor>(
    plan_id: &str,
    g: &StationGraph,
    od: &ODMatrix,
    options: &RoutingOptions,
    removals: &[Removal],
    max_steps: Option<usize>,
    exec: &E,
) -> Result<VulnerabilityCurve, SimError> {
    for r in removals {
        match r {
            Removal::Stations(ids) => check_stations(g, ids)?,
            Removal::Line(l) => check_lines(g, &[*l])?,
        }
    }
    let mut tracker = PsiLongTracker::new(g, od, options, exec);
    let baseline = tracker.value()?;
    let mut steps = vec![CurveStep { step: 0, removed: Vec::new(), line: None, psi_long: Some(baseline) }];
    let mut exhausted = false;
    let limit = max_steps.unwrap_or(usize::MAX);
    for r in removals {
        if steps.len() > limit {
            break;
        }
        if let Removal::Line(l) = r {
            if tracker.graph().stations_on_line(*l).is_empty() {
                continue;
            }
        }
        let removed = tracker.apply(r)?;
        if removed.is_empty() && !matches!(r, Removal::Line(_)) {
            continue;
        }
        let line = match r {
            Removal::Line(l) => Some(*l),
            Removal::Stations(_) => None,
        };
        let psi_long = match tracker.value() {
            Ok(v) => Some(v),
            Err(VulnerabilityError::EmptyGraph) => None,
            Err(e) => return Err(e.into()),
        };
        steps.push(CurveStep { step: steps.len(), removed, line, psi_long });
        if psi_long.is_none() {
            exhausted = true;
            break;
        }
    }
    Ok(VulnerabilityCurve { plan_id: String::from(plan_id), bin: od.bin, baseline, steps, exhausted })
}

fn unique_stations(ids: &[StationId]) -> Result<(), SimError> {
    let mut seen = BTreeSet::new();
    for &s in ids {
        if !seen.insert(s) {
            return Err(SimError::Duplicate(alloc::format!("station {s}")));
        }
    }
    Ok(())
}

/// Removes the first `m` stations of `ranking` one at a time.
pub fn single_station_attack<E: Executor>(
    g: &StationGraph,
    od: &ODMatrix,
    options: &RoutingOptions,
    ranking: &[StationId],
    m: usize,
    exec: &E,
) -> Result<VulnerabilityCurve, SimError> {
    if m > ranking.len() {
        return Err(SimError::RankingTooShort { steps: m, available: ranking.len() });
    }
    unique_stations(ranking)?;
    let removals: Vec<Removal> = ranking[..m].iter().map(|&s| Removal::Stations(vec![s])).collect();
    run_removals("single-station", g, od, options, &removals, None, exec)
}

/// How a within-line campaign walks away from the line's seed station.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Toward the neighbour with the larger importance, then back along the
    /// other side.
    #[default]
    TowardLargerImportance,
    /// Toward the neighbour with the smaller topological degree first.
    TowardSmallerDegree,
    /// One step to each side in turn, starting toward the larger importance.
    Alternating,
}

/// Stations on either side of `seed` along the track, nearest first. On a
/// loop each side runs all the way around.
fn sides(track: &LineTrack, seed: usize) -> (Vec<StationId>, Vec<StationId>) {
    let s = &track.stations;
    let n = s.len();
    if track.closed {
        let forward = (1..n).map(|i| s[(seed + i) % n]).collect();
        let backward = (1..n).map(|i| s[(seed + n - i) % n]).collect();
        (forward, backward)
    } else {
        (s[seed + 1..].to_vec(), s[..seed].iter().rev().copied().collect())
    }
}

fn seed_of(track: &LineTrack, scores: &Scores) -> usize {
    let mut best = 0;
    for (i, &s) in track.stations.iter().enumerate() {
        let (cur, top) = (score(scores, s), score(scores, track.stations[best]));
        if cur > top || (cur == top && s < track.stations[best]) {
            best = i;
        }
    }
    best
}

/// Removal order along one line, starting at its most important station.
pub fn line_walk(
    g: &StationGraph,
    line: LineId,
    scores: &Scores,
    direction: Direction,
) -> Result<Vec<StationId>, SimError> {
    let track = g.line_track(line)?;
    let seed = seed_of(&track, scores);
    let (a, b) = sides(&track, seed);
    let prefer_a = match (a.first(), b.first()) {
        (Some(_), None) => true,
        (None, _) => false,
        (Some(&x), Some(&y)) => {
            let by_score = score(scores, x).total_cmp(&score(scores, y)).reverse().then(x.cmp(&y));
            match direction {
                Direction::TowardSmallerDegree => {
                    g.neighbors(x).len().cmp(&g.neighbors(y).len()).then(by_score).is_le()
                }
                _ => by_score.is_le(),
            }
        }
    };
    let (first, second) = if prefer_a { (a, b) } else { (b, a) };
    let mut order = vec![track.stations[seed]];
    match direction {
        Direction::Alternating => {
            for i in 0..first.len().max(second.len()) {
                order.extend(first.get(i));
                order.extend(second.get(i));
            }
        }
        _ => {
            order.extend(&first);
            order.extend(&second);
        }
    }
    let mut seen = BTreeSet::new();
    order.retain(|s| seen.insert(*s));
    Ok(order)
}

/// Concatenated line walks with already-listed stations dropped.
pub fn within_line_order(
    g: &StationGraph,
    scores: &Scores,
    line_order: &[LineId],
    direction: Direction,
) -> Result<Vec<StationId>, SimError> {
    check_lines(g, line_order)?;
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    for &line in line_order {
        for s in line_walk(g, line, scores, direction)? {
            if seen.insert(s) {
                order.push(s);
            }
        }
    }
    Ok(order)
}

pub fn within_line_interval_attack<E: Executor>(
    g: &StationGraph,
    od: &ODMatrix,
    options: &RoutingOptions,
    scores: &Scores,
    line_order: &[LineId],
    direction: Direction,
    exec: &E,
) -> Result<VulnerabilityCurve, SimError> {
    let removals: Vec<Removal> =
        within_line_order(g, scores, line_order, direction)?.into_iter().map(|s| Removal::Stations(vec![s])).collect();
    run_removals("within-line", g, od, options, &removals, None, exec)
}

/// Consecutive blocks of `width` stations per line. Each line is cut into
/// aligned blocks from its first station; the block with the largest summed
/// importance goes first, followed by the blocks after it along the line
/// and then those before it, nearest first. On a loop the blocks after it
/// wrap around.
pub fn adjacent_blocks(
    g: &StationGraph,
    scores: &Scores,
    width: usize,
    line_order: &[LineId],
) -> Result<Vec<Vec<StationId>>, SimError> {
    if !(2..=3).contains(&width) {
        return Err(SimError::InvalidWidth(width));
    }
    check_lines(g, line_order)?;
    let mut out = Vec::new();
    for &line in line_order {
        let track = g.line_track(line)?;
        let blocks: Vec<Vec<StationId>> = track.stations.chunks(width).map(|c| c.to_vec()).collect();
        let sum = |b: &[StationId]| b.iter().map(|&s| score(scores, s)).sum::<f64>();
        let mut best = 0;
        for (i, b) in blocks.iter().enumerate() {
            if sum(b) > sum(&blocks[best]) {
                best = i;
            }
        }
        let n = blocks.len();
        let order: Vec<usize> = if track.closed {
            (0..n).map(|i| (best + i) % n).collect()
        } else {
            (best..n).chain((0..best).rev()).collect()
        };
        out.extend(order.into_iter().map(|i| blocks[i].clone()));
    }
    Ok(out)
}

pub fn adjacent_interval_attack<E: Executor>(
    g: &StationGraph,
    od: &ODMatrix,
    options: &RoutingOptions,
    scores: &Scores,
    width: usize,
    line_order: &[LineId],
    exec: &E,
) -> Result<VulnerabilityCurve, SimError> {
    let removals: Vec<Removal> =
        adjacent_blocks(g, scores, width, line_order)?.into_iter().map(Removal::Stations).collect();
    run_removals("adjacent-interval", g, od, options, &removals, None, exec)
}

/// Every pair of stations joined by an edge, by summed importance
/// descending; ties by the smaller ids.
pub fn rank_adjacent_pairs(g: &StationGraph, scores: &Scores) -> Vec<(StationId, StationId)> {
    let pairs: BTreeSet<(StationId, StationId)> = g.edges().iter().map(|e| (e.a.min(e.b), e.a.max(e.b))).collect();
    let mut pairs: Vec<(StationId, StationId)> = pairs.into_iter().collect();
    pairs.sort_by(|x, y| {
        let sx = score(scores, x.0) + score(scores, x.1);
        let sy = score(scores, y.0) + score(scores, y.1);
        sy.total_cmp(&sx).then(x.cmp(y))
    });
    pairs
}

pub fn cross_line_interval_attack<E: Executor>(
    g: &StationGraph,
    od: &ODMatrix,
    options: &RoutingOptions,
    pair_ranking: &[(StationId, StationId)],
    exec: &E,
) -> Result<VulnerabilityCurve, SimError> {
    let mut seen = BTreeSet::new();
    for &(a, b) in pair_ranking {
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(SimError::Duplicate(alloc::format!("pair {a}-{b}")));
        }
    }
    let removals: Vec<Removal> = pair_ranking.iter().map(|&(a, b)| Removal::Stations(vec![a, b])).collect();
    run_removals("cross-line-interval", g, od, options, &removals, None, exec)
}

pub fn line_removal_attack<E: Executor>(
    g: &StationGraph,
    od: &ODMatrix,
    options: &RoutingOptions,
    line_order: &[LineId],
    exec: &E,
) -> Result<VulnerabilityCurve, SimError> {
    if line_order.is_empty() {
        return Err(SimError::Duplicate(String::from("no lines in plan")));
    }
    check_lines(g, line_order)?;
    let removals: Vec<Removal> = line_order.iter().map(|&l| Removal::Line(l)).collect();
    run_removals("line-removal", g, od, options, &removals, None, exec)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AttackKind {
    SingleStation { ranking: Vec<StationId> },
    WithinLineInterval { line_order: Vec<LineId>, direction: Direction },
    AdjacentInterval { width: usize, line_order: Vec<LineId> },
    CrossLineInterval { pairs: Vec<(StationId, StationId)> },
    LineRemoval { line_order: Vec<LineId> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackPlan {
    pub id: String,
    pub kind: AttackKind,
    pub bin: TimeBin,
    /// Recorded removal events after the baseline; all when absent.
    pub max_steps: Option<usize>,
}

impl AttackPlan {
    /// The removal events of this plan, with `scores` seeding the
    /// within-line and adjacent-interval walks.
    pub fn removals(&self, g: &StationGraph, scores: &Scores) -> Result<Vec<Removal>, SimError> {
        let single = |ids: Vec<StationId>| ids.into_iter().map(|s| Removal::Stations(vec![s])).collect();
        Ok(match &self.kind {
            AttackKind::SingleStation { ranking } => {
                unique_stations(ranking)?;
                single(ranking.clone())
            }
            AttackKind::WithinLineInterval { line_order, direction } => {
                single(within_line_order(g, scores, line_order, *direction)?)
            }
            AttackKind::AdjacentInterval { width, line_order } => {
                adjacent_blocks(g, scores, *width, line_order)?.into_iter().map(Removal::Stations).collect()
            }
            AttackKind::CrossLineInterval { pairs } => {
                pairs.iter().map(|&(a, b)| Removal::Stations(vec![a, b])).collect()
            }
            AttackKind::LineRemoval { line_order } => {
                check_lines(g, line_order)?;
                line_order.iter().map(|&l| Removal::Line(l)).collect()
            }
        })
    }
}

/// Runs one plan against the demand of its bin.
pub fn run_plan<E: Executor>(
    g: &StationGraph,
    od: &ODMatrix,
    options: &RoutingOptions,
    plan: &AttackPlan,
    scores: &Scores,
    exec: &E,
) -> Result<VulnerabilityCurve, SimError> {
    let removals = plan.removals(g, scores)?;
    run_removals(&plan.id, g, od, options, &removals, plan.max_steps, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::fixtures::{cross7, ids, path_line, ring};
    use crate::units::Timestamp;
    use crate::vulnerability::psi_long;

    fn bin() -> TimeBin {
        TimeBin::new(Timestamp(0), 180)
    }

    fn od() -> ODMatrix {
        ODMatrix::from_flows(bin(), [((ids::A1, ids::B2), 10.0)]).unwrap()
    }

    fn opts() -> RoutingOptions {
        RoutingOptions::default()
    }

    fn sid(v: &[u32]) -> Vec<StationId> {
        v.iter().map(|&i| StationId(i)).collect()
    }

    #[test]
    fn single_station_examples() {
        let g = cross7();
        let c = single_station_attack(&g, &od(), &opts(), &[ids::X, ids::A1], 1, &Sequential).unwrap();
        assert_eq!(c.values(), vec![Some(10.0 / 12.0 / 42.0), Some(0.0)]);
        let c = single_station_attack(&g, &od(), &opts(), &[ids::X], 0, &Sequential).unwrap();
        assert_eq!(c.len(), 1);
        assert!(single_station_attack(&g, &od(), &opts(), &[ids::X], 2, &Sequential).is_err());
        assert!(single_station_attack(&g, &od(), &opts(), &[ids::X, ids::X], 2, &Sequential).is_err());
    }

    #[test]
    fn exhaustion_is_marked() {
        let g = path_line(3);
        let c = single_station_attack(&g, &ODMatrix::empty(bin()), &opts(), &sid(&[1, 2, 3]), 3, &Sequential).unwrap();
        assert!(c.exhausted);
        assert_eq!(c.values(), vec![Some(0.0), Some(0.0), None]);
    }

    #[test]
    fn within_line_walks() {
        let g = cross7();
        let a = g.line_by_name("A").unwrap();
        let b = g.line_by_name("B").unwrap();
        let scores: Scores = [(ids::X, 1.0), (ids::A3, 0.6), (ids::A2, 0.5), (ids::B1, 0.2)].into_iter().collect();
        let order = within_line_order(&g, &scores, &[a, b], Direction::TowardLargerImportance).unwrap();
        assert_eq!(order, vec![ids::X, ids::A3, ids::A2, ids::A1, ids::B1, ids::B2, ids::B3]);

        let line = path_line(7);
        let l = line.lines()[0];
        let mid: Scores = [(StationId(4), 1.0), (StationId(3), 0.5)].into_iter().collect();
        let alt = line_walk(&line, l, &mid, Direction::Alternating).unwrap();
        assert_eq!(alt, sid(&[4, 3, 5, 2, 6, 1, 7]));

        let r = ring(6);
        let ring_scores: Scores = [(StationId(2), 1.0), (StationId(1), 0.5)].into_iter().collect();
        let walk = line_walk(&r, r.lines()[0], &ring_scores, Direction::TowardLargerImportance).unwrap();
        assert_eq!(walk, sid(&[2, 1, 0, 5, 4, 3]));
    }

    #[test]
    fn smaller_degree_direction() {
        let g = cross7();
        let b = g.line_by_name("B").unwrap();
        let scores: Scores = [(ids::X, 1.0), (ids::B1, 0.9)].into_iter().collect();
        // b1 is a terminus (degree 1), b2 has degree 2.
        assert_eq!(
            line_walk(&g, b, &scores, Direction::TowardSmallerDegree).unwrap(),
            vec![ids::X, ids::B1, ids::B2, ids::B3]
        );
        let scores: Scores = [(ids::X, 1.0), (ids::B2, 0.9)].into_iter().collect();
        assert_eq!(
            line_walk(&g, b, &scores, Direction::TowardLargerImportance).unwrap(),
            vec![ids::X, ids::B2, ids::B3, ids::B1]
        );
    }

    #[test]
    fn direction_variants_end_empty() {
        let g = cross7();
        let lines = g.lines();
        let scores: Scores = [(ids::X, 1.0), (ids::A2, 0.5)].into_iter().collect();
        let finals: Vec<_> =
            [Direction::TowardLargerImportance, Direction::TowardSmallerDegree, Direction::Alternating]
                .into_iter()
                .map(|d| {
                    let c = within_line_interval_attack(&g, &od(), &opts(), &scores, &lines, d, &Sequential).unwrap();
                    (c.exhausted, c.cumulative_stations(c.len() - 1).len())
                })
                .collect();
        assert!(finals.iter().all(|&f| f == (true, 6)));
    }

    #[test]
    fn block_arithmetic() {
        let line = path_line(4);
        let l = line.lines()[0];
        let blocks = adjacent_blocks(&line, &Scores::new(), 2, &[l]).unwrap();
        assert_eq!(blocks.len(), 2);
        let c = adjacent_interval_attack(&line, &ODMatrix::empty(bin()), &opts(), &Scores::new(), 2, &[l], &Sequential);
        assert_eq!(c.unwrap().len(), 3);

        let three = path_line(3);
        assert_eq!(adjacent_blocks(&three, &Scores::new(), 3, &three.lines()).unwrap(), vec![sid(&[1, 2, 3])]);
        assert_eq!(adjacent_blocks(&three, &Scores::new(), 4, &three.lines()), Err(SimError::InvalidWidth(4)));

        let g = cross7();
        let a = g.line_by_name("A").unwrap();
        let scores: Scores = [(ids::X, 1.0), (ids::A3, 0.3), (ids::A2, 0.5)].into_iter().collect();
        let blocks = adjacent_blocks(&g, &scores, 2, &[a]).unwrap();
        assert_eq!(blocks[0], vec![ids::X, ids::A3]);
        assert_eq!(blocks[1], vec![ids::A1, ids::A2]);

        let line = path_line(7);
        let mid: Scores = [(StationId(3), 1.0)].into_iter().collect();
        let blocks = adjacent_blocks(&line, &mid, 2, &line.lines()).unwrap();
        assert_eq!(blocks, vec![sid(&[3, 4]), sid(&[5, 6]), sid(&[7]), sid(&[1, 2])]);
    }

    #[test]
    fn cross_line_pairs() {
        let g = cross7();
        let scores: Scores = [(ids::X, 1.0), (ids::A2, 1.0), (ids::A1, 0.5), (ids::B2, 0.2)].into_iter().collect();
        let ranked = rank_adjacent_pairs(&g, &scores);
        assert_eq!(ranked.len(), 6);
        assert_eq!(ranked[0], (ids::A2, ids::X));
        let c = cross_line_interval_attack(&g, &od(), &opts(), &ranked, &Sequential).unwrap();
        assert_eq!(c.steps[1].psi_long, Some(0.0));

        let empty = cross_line_interval_attack(&g, &ODMatrix::empty(bin()), &opts(), &ranked, &Sequential).unwrap();
        assert!(empty.steps.iter().all(|s| s.psi_long.unwrap_or(0.0) == 0.0));
    }

    #[test]
    fn line_removal() {
        let g = cross7();
        let (a, b) = (g.line_by_name("A").unwrap(), g.line_by_name("B").unwrap());
        let od = ODMatrix::from_flows(bin(), [((ids::A1, ids::A3), 6.0), ((ids::A1, ids::B2), 10.0)]).unwrap();
        let c = line_removal_attack(&g, &od, &opts(), &[b, a], &Sequential).unwrap();
        assert_eq!(c.steps[1].removed, vec![ids::B1, ids::B2, ids::B3]);
        assert!((c.steps[1].psi_long.unwrap() - 6.0 / 6.0 / 12.0).abs() < 1e-15);
        assert_eq!(c.steps[2].psi_long, None);
        assert!(c.exhausted);

        let one = path_line(3);
        let c = line_removal_attack(&one, &ODMatrix::empty(bin()), &opts(), &one.lines(), &Sequential).unwrap();
        assert!(c.exhausted);
    }

    #[test]
    fn incremental_matches_scratch() {
        let g = cross7();
        let mut flows = Vec::new();
        for o in g.station_ids() {
            for d in g.station_ids() {
                if o != d {
                    flows.push(((o, d), (o.0 * 7 + d.0) as f64));
                }
            }
        }
        let od = ODMatrix::from_flows(bin(), flows).unwrap();
        let ranking = vec![ids::A2, ids::B3, ids::X, ids::A1];
        let c = single_station_attack(&g, &od, &opts(), &ranking, 4, &Sequential).unwrap();
        for (i, step) in c.steps.iter().enumerate() {
            let g2 = g.remove_stations(&c.cumulative_stations(i)).unwrap();
            let scratch = psi_long(&g2, &od, &opts(), &Sequential).unwrap().value;
            assert!((step.psi_long.unwrap() - scratch).abs() < 1e-12);
        }
    }
}
