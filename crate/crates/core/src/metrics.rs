//! Per-bin station metrics.
//!
//! Flow-weighted degree and flow betweenness assign OD flows onto the
//! reasonable paths held in a [`PathCache`]. Demand closeness and the
//! importance index only need the OD matrix plus, for through traffic, the
//! cache's pass-through sets.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::demand::{ODMatrix, TimeBin};
use crate::exec::Executor;
use crate::network::{LineId, StationGraph, StationId};
use crate::routing::{minimal_paths_to, PathCache};

/// Demand closeness, infinite when the station originates no flow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Closeness {
    Finite(f64),
    Infinite,
}

impl Closeness {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Closeness::Infinite)
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Closeness::Finite(v) => Some(v),
            Closeness::Infinite => None,
        }
    }

    /// Infinite maps to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

/// How through traffic enters the importance index.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PassCounting {
    /// A pair's whole flow counts once any reasonable path passes through.
    #[default]
    FullFlow,
    /// Only the share routed through the station counts.
    SplitWeighted,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("unknown station {0}")]
    UnknownStation(StationId),
    #[error("path cache was built for a different network")]
    CacheMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationMetrics {
    pub station: StationId,
    pub bin: TimeBin,
    pub weighted_degree: f64,
    pub flow_betweenness: f64,
    pub demand_closeness: Closeness,
    pub topo_degree: u32,
    pub topo_betweenness: f64,
    pub importance: f64,
}

/// The passenger and station counts behind one importance value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ImportanceTerms {
    /// Passengers ending at the station.
    pub s_out: f64,
    /// Distinct origins of those passengers.
    pub n_out: usize,
    /// Passengers starting at the station.
    pub s_in: f64,
    pub n_in: usize,
    /// Passengers riding through.
    pub s_pass: f64,
    /// Distinct origins and destinations of passing pairs.
    pub n_pass: usize,
    pub s_total: f64,
    pub n_total: usize,
}

impl ImportanceTerms {
    pub fn value(&self) -> f64 {
        let denom = self.s_total * self.n_total as f64;
        if denom == 0.0 {
            return 0.0;
        }
        (self.s_out * self.n_out as f64 + self.s_in * self.n_in as f64 + self.s_pass * self.n_pass as f64) / denom
    }
}

fn check(g: &StationGraph, od: &ODMatrix, cache: &PathCache, station: StationId) -> Result<(), MetricsError> {
    if !g.contains(station) {
        return Err(MetricsError::UnknownStation(station));
    }
    check_inputs(g, od, cache)
}

fn check_inputs(g: &StationGraph, od: &ODMatrix, cache: &PathCache) -> Result<(), MetricsError> {
    if cache.key().graph_fingerprint != g.fingerprint() {
        return Err(MetricsError::CacheMismatch);
    }
    for (o, d) in od.pairs() {
        for s in [o, d] {
            if !g.contains(s) {
                return Err(MetricsError::UnknownStation(s));
            }
        }
    }
    Ok(())
}

/// Flow-weighted degree: assigned flow summed over the edges incident to
/// `station`.
pub fn weighted_degree(
    g: &StationGraph,
    od: &ODMatrix,
    cache: &PathCache,
    station: StationId,
) -> Result<f64, MetricsError> {
    check(g, od, cache, station)?;
    let mut total = 0.0;
    for ((o, d), f) in od.iter() {
        let Some(set) = cache.get(o, d) else { continue };
        for (path, w) in set.paths.iter().zip(&set.split_weights) {
            let touching = path.stations.windows(2).filter(|hop| hop[0] == station || hop[1] == station).count();
            total += f * w * touching as f64;
        }
    }
    Ok(total)
}

/// Flow betweenness: for every pair with flow, the share of that flow
/// whose reasonable paths pass through `station`.
pub fn flow_betweenness(
    g: &StationGraph,
    od: &ODMatrix,
    cache: &PathCache,
    station: StationId,
) -> Result<f64, MetricsError> {
    check(g, od, cache, station)?;
    Ok(cache.passing_pairs(station).iter().filter(|p| od.flow(p.origin, p.destination) > 0.0).map(|p| p.weight).sum())
}

/// Demand closeness: `(N - 1)` over the flow originating at `station`.
pub fn demand_closeness(g: &StationGraph, od: &ODMatrix, station: StationId) -> Result<Closeness, MetricsError> {
    if !g.contains(station) {
        return Err(MetricsError::UnknownStation(station));
    }
    let outflow: f64 = od.iter().filter(|((o, _), _)| *o == station).map(|(_, f)| f).sum();
    Ok(closeness_from(g.station_count(), outflow))
}

fn closeness_from(n: usize, outflow: f64) -> Closeness {
    if outflow > 0.0 {
        Closeness::Finite((n as f64 - 1.0) / outflow)
    } else {
        Closeness::Infinite
    }
}

pub fn importance_terms(
    g: &StationGraph,
    od: &ODMatrix,
    cache: &PathCache,
    station: StationId,
    counting: PassCounting,
) -> Result<ImportanceTerms, MetricsError> {
    check(g, od, cache, station)?;
    let mut t = ImportanceTerms { s_total: od.total(), n_total: od.active_stations(), ..ImportanceTerms::default() };
    for ((o, d), f) in od.iter() {
        if d == station {
            t.s_out += f;
            t.n_out += 1;
        }
        if o == station {
            t.s_in += f;
            t.n_in += 1;
        }
    }
    let mut endpoints: Vec<StationId> = Vec::new();
    for p in cache.passing_pairs(station) {
        let f = od.flow(p.origin, p.destination);
        if f <= 0.0 {
            continue;
        }
        t.s_pass += match counting {
            PassCounting::FullFlow => f,
            PassCounting::SplitWeighted => f * p.weight,
        };
        endpoints.push(p.origin);
        endpoints.push(p.destination);
    }
    endpoints.sort_unstable();
    endpoints.dedup();
    t.n_pass = endpoints.len();
    Ok(t)
}

/// Accessibility importance index of `station`; zero for an empty bin.
pub fn importance(
    g: &StationGraph,
    od: &ODMatrix,
    cache: &PathCache,
    station: StationId,
    counting: PassCounting,
) -> Result<f64, MetricsError> {
    importance_terms(g, od, cache, station, counting).map(|t| t.value())
}

/// Demand-free baselines in dense station order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopoMetrics {
    pub stations: Vec<StationId>,
    /// Distinct neighbouring stations.
    pub degree: Vec<u32>,
    /// Shortest-path betweenness over ordered pairs, normalised by
    /// `(N - 1)(N - 2)`. Travel times include transfer arcs.
    pub betweenness: Vec<f64>,
}

impl TopoMetrics {
    pub fn get(&self, station: StationId) -> Option<(u32, f64)> {
        let i = self.stations.binary_search(&station).ok()?;
        Some((self.degree[i], self.betweenness[i]))
    }
}

pub fn topo_metrics<E: Executor>(g: &StationGraph, exec: &E) -> TopoMetrics {
    let n = g.station_count();
    let stations: Vec<StationId> = g.station_ids().collect();
    let degree = stations.iter().map(|&s| g.neighbors(s).len() as u32).collect();
    let partial: Vec<Vec<f64>> = exec.map(n, |d| {
        let mut share = vec![0.0; n];
        let per_origin = minimal_paths_to(g, stations[d]).expect("station from graph");
        for paths in per_origin.iter().filter(|p| !p.is_empty()) {
            let count = paths.len() as f64;
            let mut hits = vec![0u32; n];
            for p in paths {
                for s in p.interior() {
                    hits[g.index_of(*s).unwrap()] += 1;
                }
            }
            for (v, &h) in hits.iter().enumerate() {
                if h > 0 {
                    share[v] += h as f64 / count;
                }
            }
        }
        share
    });
    let norm = if n >= 3 { ((n - 1) * (n - 2)) as f64 } else { 0.0 };
    let mut betweenness = vec![0.0; n];
    for column in partial {
        for (b, s) in betweenness.iter_mut().zip(column) {
            *b += s;
        }
    }
    if norm > 0.0 {
        for b in &mut betweenness {
            *b /= norm;
        }
    }
    TopoMetrics { stations, degree, betweenness }
}

/// Every metric for every station of `g` in one pass over the OD matrix.
pub fn bin_metrics(
    g: &StationGraph,
    od: &ODMatrix,
    cache: &PathCache,
    topo: &TopoMetrics,
    counting: PassCounting,
) -> Result<Vec<StationMetrics>, MetricsError> {
    check_inputs(g, od, cache)?;
    let n = g.station_count();
    let mut degree = vec![0.0; n];
    let mut between = vec![0.0; n];
    let mut outflow = vec![0.0; n];
    let mut s_out = vec![0.0; n];
    let mut n_out = vec![0usize; n];
    let mut s_in = vec![0.0; n];
    let mut n_in = vec![0usize; n];
    let mut s_pass = vec![0.0; n];
    let words = n.div_ceil(64);
    let mut pass_ends = vec![0u64; n * words];
    let mut through: Vec<(usize, f64)> = Vec::new();

    for ((o, d), f) in od.iter() {
        let oi = g.index_of(o).unwrap();
        let di = g.index_of(d).unwrap();
        outflow[oi] += f;
        s_in[oi] += f;
        n_in[oi] += 1;
        s_out[di] += f;
        n_out[di] += 1;
        let Some(set) = cache.get(o, d) else { continue };
        through.clear();
        for (path, &w) in set.paths.iter().zip(&set.split_weights) {
            for hop in path.stations.windows(2) {
                degree[g.index_of(hop[0]).unwrap()] += f * w;
                degree[g.index_of(hop[1]).unwrap()] += f * w;
            }
            for s in path.interior() {
                let i = g.index_of(*s).unwrap();
                match through.iter_mut().find(|(j, _)| *j == i) {
                    Some(entry) => entry.1 += w,
                    None => through.push((i, w)),
                }
            }
        }
        for &(i, w) in &through {
            between[i] += w;
            s_pass[i] += match counting {
                PassCounting::FullFlow => f,
                PassCounting::SplitWeighted => f * w,
            };
            let row = &mut pass_ends[i * words..(i + 1) * words];
            row[oi / 64] |= 1 << (oi % 64);
            row[di / 64] |= 1 << (di % 64);
        }
    }

    let (s_total, n_total) = (od.total(), od.active_stations());
    Ok((0..n)
        .map(|i| {
            let n_pass = pass_ends[i * words..(i + 1) * words].iter().map(|w| w.count_ones() as usize).sum();
            let terms = ImportanceTerms {
                s_out: s_out[i],
                n_out: n_out[i],
                s_in: s_in[i],
                n_in: n_in[i],
                s_pass: s_pass[i],
                n_pass,
                s_total,
                n_total,
            };
            let id = g.id_at(i);
            let (topo_degree, topo_betweenness) = topo.get(id).unwrap_or((0, 0.0));
            StationMetrics {
                station: id,
                bin: od.bin,
                weighted_degree: degree[i],
                flow_betweenness: between[i],
                demand_closeness: closeness_from(n, outflow[i]),
                topo_degree,
                topo_betweenness,
                importance: terms.value(),
            }
        })
        .collect())
}

/// Importance of every station in dense order, skipping the topological
/// baselines.
pub fn importance_all(
    g: &StationGraph,
    od: &ODMatrix,
    cache: &PathCache,
    counting: PassCounting,
) -> Result<Vec<(StationId, f64)>, MetricsError> {
    let none = TopoMetrics { stations: Vec::new(), degree: Vec::new(), betweenness: Vec::new() };
    Ok(bin_metrics(g, od, cache, &none, counting)?.into_iter().map(|m| (m.station, m.importance)).collect())
}

/// Stations sorted by importance, descending; ties by station id.
pub fn rank_by_importance(metrics: &[StationMetrics]) -> Vec<StationId> {
    let mut order: Vec<&StationMetrics> = metrics.iter().collect();
    order.sort_by(|a, b| b.importance.total_cmp(&a.importance).then(a.station.cmp(&b.station)));
    order.into_iter().map(|m| m.station).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineAggregate {
    pub line: LineId,
    pub stations: usize,
    pub mean_importance: f64,
    pub mean_betweenness: f64,
    /// Infinite when any member station's closeness is infinite.
    pub mean_closeness: Closeness,
    pub total_degree: f64,
}

/// Per-line means and sums; a transfer station counts toward each of its
/// lines. Lines appear in id order.
pub fn line_importance(metrics: &[StationMetrics], g: &StationGraph) -> Vec<LineAggregate> {
    g.lines()
        .into_iter()
        .filter_map(|line| {
            let members: Vec<&StationMetrics> =
                metrics.iter().filter(|m| g.station(m.station).is_some_and(|s| s.lines.contains(&line))).collect();
            if members.is_empty() {
                return None;
            }
            let count = members.len() as f64;
            let closeness = if members.iter().any(|m| m.demand_closeness.is_infinite()) {
                Closeness::Infinite
            } else {
                Closeness::Finite(members.iter().map(|m| m.demand_closeness.as_f64()).sum::<f64>() / count)
            };
            Some(LineAggregate {
                line,
                stations: members.len(),
                mean_importance: members.iter().map(|m| m.importance).sum::<f64>() / count,
                mean_betweenness: members.iter().map(|m| m.flow_betweenness).sum::<f64>() / count,
                mean_closeness: closeness,
                total_degree: members.iter().map(|m| m.weighted_degree).sum(),
            })
        })
        .collect()
}

/// Lines sorted by mean importance, descending; ties by line id.
pub fn rank_lines(aggregates: &[LineAggregate]) -> Vec<LineId> {
    let mut order: Vec<&LineAggregate> = aggregates.iter().collect();
    order.sort_by(|a, b| b.mean_importance.total_cmp(&a.mean_importance).then(a.line.cmp(&b.line)));
    order.into_iter().map(|a| a.line).collect()
}
