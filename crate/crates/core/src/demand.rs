//! Trip records, time bins and per-bin origin-destination matrices.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exec::Executor;
use crate::network::{StationGraph, StationId};
use crate::routing::{PathCache, RoutingOptions};
use crate::units::Timestamp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TripRecord {
    pub entry_time: Timestamp,
    pub exit_time: Timestamp,
    pub origin: StationId,
    pub destination: StationId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimeBin {
    pub start: Timestamp,
    pub duration_min: u32,
}

impl TimeBin {
    pub fn new(start: Timestamp, duration_min: u32) -> Self {
        TimeBin { start, duration_min }
    }

    pub fn end(&self) -> Timestamp {
        self.start.plus_minutes(self.duration_min as i64)
    }

    /// Half-open: `start <= t < end`.
    pub fn contains(&self, t: Timestamp) -> bool {
        t >= self.start && t < self.end()
    }

    pub fn duration_hours(&self) -> f64 {
        self.duration_min as f64 / 60.0
    }
}

/// Consecutive bins of `hours` hours from `first_hour` to `last_hour` on
/// the day starting at `midnight`.
pub fn day_bins(midnight: Timestamp, first_hour: u32, last_hour: u32, hours: u32) -> Vec<TimeBin> {
    let mut bins = Vec::new();
    let mut h = first_hour;
    while hours > 0 && h + hours <= last_hour {
        bins.push(TimeBin::new(midnight.plus_minutes(h as i64 * 60), hours * 60));
        h += hours;
    }
    bins
}

/// Six 3-hour bins covering 05:00 to 23:00.
pub fn default_bins(midnight: Timestamp) -> Vec<TimeBin> {
    day_bins(midnight, 5, 23, 3)
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DemandError {
    #[error("flow from {0} to itself")]
    DiagonalFlow(StationId),
    #[error("flow {origin}->{destination} is negative or not finite")]
    InvalidFlow { origin: StationId, destination: StationId },
    #[error("time bins must have positive length and must not overlap")]
    InvalidBins,
    #[error("invalid demand profile: {0}")]
    InvalidProfile(&'static str),
}

/// Passenger flows between station pairs within one time bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ODMatrix {
    pub bin: TimeBin,
    flows: BTreeMap<(StationId, StationId), f64>,
    total: f64,
    active_stations: usize,
}

impl ODMatrix {
    pub fn empty(bin: TimeBin) -> Self {
        ODMatrix { bin, flows: BTreeMap::new(), total: 0.0, active_stations: 0 }
    }

    /// Repeated pairs are summed and zero flows dropped.
    pub fn from_flows<I>(bin: TimeBin, flows: I) -> Result<Self, DemandError>
    where
        I: IntoIterator<Item = ((StationId, StationId), f64)>,
    {
        let mut map = BTreeMap::new();
        for ((o, d), f) in flows {
            if o == d {
                return Err(DemandError::DiagonalFlow(o));
            }
            if !f.is_finite() || f < 0.0 {
                return Err(DemandError::InvalidFlow { origin: o, destination: d });
            }
            *map.entry((o, d)).or_insert(0.0) += f;
        }
        map.retain(|_, f| *f > 0.0);
        Ok(Self::from_map(bin, map))
    }

    fn from_map(bin: TimeBin, flows: BTreeMap<(StationId, StationId), f64>) -> Self {
        let total = flows.values().sum();
        let active: BTreeSet<StationId> = flows.keys().flat_map(|&(o, d)| [o, d]).collect();
        ODMatrix { bin, flows, total, active_stations: active.len() }
    }

    pub fn flow(&self, origin: StationId, destination: StationId) -> f64 {
        self.flows.get(&(origin, destination)).copied().unwrap_or(0.0)
    }

    /// Positive flows in `(origin, destination)` order.
    pub fn iter(&self) -> impl Iterator<Item = ((StationId, StationId), f64)> + '_ {
        self.flows.iter().map(|(&k, &f)| (k, f))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (StationId, StationId)> + '_ {
        self.flows.keys().copied()
    }

    pub fn pair_count(&self) -> usize {
        self.flows.len()
    }

    /// `S(t)`: total passengers in the bin.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// `N(t)`: stations that are the origin or destination of some flow.
    pub fn active_stations(&self) -> usize {
        self.active_stations
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> ODMatrix {
        let flows = self.flows.iter().map(|(&k, &f)| (k, f * factor)).filter(|(_, f)| *f > 0.0).collect();
        Self::from_map(self.bin, flows)
    }

    pub fn with_added(&self, origin: StationId, destination: StationId, flow: f64) -> Result<ODMatrix, DemandError> {
        Self::from_flows(self.bin, self.iter().chain(core::iter::once(((origin, destination), flow))))
    }
}

/// Counts of what happened to each input record.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinningReport {
    pub assigned: usize,
    /// Entry time outside every bin.
    pub out_of_range: usize,
    /// Origin equals destination.
    pub same_station: usize,
    /// Exit not after entry.
    pub invalid_times: usize,
}

impl BinningReport {
    pub fn dropped(&self) -> usize {
        self.out_of_range + self.same_station + self.invalid_times
    }
}

fn check_bins(bins: &[TimeBin]) -> Result<(), DemandError> {
    if bins.iter().any(|b| b.duration_min == 0) {
        return Err(DemandError::InvalidBins);
    }
    let mut sorted: Vec<&TimeBin> = bins.iter().collect();
    sorted.sort();
    if sorted.windows(2).any(|w| w[1].start < w[0].end()) {
        return Err(DemandError::InvalidBins);
    }
    Ok(())
}

/// Aggregates trips into one OD matrix per bin, keyed by entry time.
pub fn bin_trips(records: &[TripRecord], bins: &[TimeBin]) -> Result<(Vec<ODMatrix>, BinningReport), DemandError> {
    check_bins(bins)?;
    let mut order: Vec<usize> = (0..bins.len()).collect();
    order.sort_by_key(|&i| bins[i].start);
    let starts: Vec<Timestamp> = order.iter().map(|&i| bins[i].start).collect();

    let mut counts: Vec<BTreeMap<(StationId, StationId), f64>> = vec![BTreeMap::new(); bins.len()];
    let mut report = BinningReport::default();
    for r in records {
        if r.origin == r.destination {
            report.same_station += 1;
            continue;
        }
        if r.exit_time <= r.entry_time {
            report.invalid_times += 1;
            continue;
        }
        let slot = match starts.partition_point(|&s| s <= r.entry_time) {
            0 => None,
            p => Some(order[p - 1]).filter(|&i| bins[i].contains(r.entry_time)),
        };
        match slot {
            Some(i) => {
                *counts[i].entry((r.origin, r.destination)).or_insert(0.0) += 1.0;
                report.assigned += 1;
            }
            None => report.out_of_range += 1,
        }
    }
    let matrices = bins.iter().zip(counts).map(|(&bin, flows)| ODMatrix::from_map(bin, flows)).collect();
    Ok((matrices, report))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowDirection {
    /// Toward the core stations (morning commute).
    Inbound,
    /// Away from the core stations (evening commute).
    Outbound,
    #[default]
    Neutral,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum OdRule {
    /// Every ordered pair equally likely.
    Uniform,
    /// Pair weight `travel_time ^ -beta`.
    Gravity { beta: f64 },
    /// Pairs heading into (inbound bins) or out of (outbound bins) the core
    /// stations are `peak_factor` times as likely. An empty core means the
    /// transfer stations.
    PeakedCommuter {
        #[serde(default)]
        core: Vec<StationId>,
        peak_factor: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileBin {
    pub bin: TimeBin,
    pub total: u64,
    #[serde(default)]
    pub direction: FlowDirection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandProfile {
    pub bins: Vec<ProfileBin>,
    pub rule: OdRule,
}

/// Relative weight of every ordered pair `(o, d)`, `o != d`, in dense
/// station order (row-major, diagonal omitted). `times` holds the
/// reasonable travel time in minutes, `None` when unreachable.
pub fn pair_weights(
    g: &StationGraph,
    rule: &OdRule,
    direction: FlowDirection,
    times: &[Option<f64>],
) -> Result<Vec<f64>, DemandError> {
    let n = g.station_count();
    let core: Vec<bool> = match rule {
        OdRule::PeakedCommuter { core, peak_factor } => {
            if !(peak_factor.is_finite() && *peak_factor > 0.0) {
                return Err(DemandError::InvalidProfile("peak_factor must be positive"));
            }
            let mut mask = vec![false; n];
            if core.is_empty() {
                for (i, s) in g.stations().iter().enumerate() {
                    mask[i] = s.is_transfer;
                }
            } else {
                for id in core {
                    let i = g.index_of(*id).ok_or(DemandError::InvalidProfile("core station not in network"))?;
                    mask[i] = true;
                }
            }
            mask
        }
        OdRule::Gravity { beta } if !(beta.is_finite() && *beta >= 0.0) => {
            return Err(DemandError::InvalidProfile("beta must be non-negative"));
        }
        _ => Vec::new(),
    };
    let mut weights = Vec::with_capacity(n * n.saturating_sub(1));
    for o in 0..n {
        for d in 0..n {
            if o == d {
                continue;
            }
            let Some(t) = times[o * n + d] else {
                weights.push(0.0);
                continue;
            };
            let w = match rule {
                OdRule::Uniform => 1.0,
                OdRule::Gravity { beta } => libm::pow(t, -beta),
                OdRule::PeakedCommuter { peak_factor, .. } => {
                    let boosted = match direction {
                        FlowDirection::Inbound => core[d] && !core[o],
                        FlowDirection::Outbound => core[o] && !core[d],
                        FlowDirection::Neutral => false,
                    };
                    if boosted {
                        *peak_factor
                    } else {
                        1.0
                    }
                }
            };
            weights.push(w);
        }
    }
    Ok(weights)
}

/// Reasonable travel time in minutes for every ordered pair, row-major.
pub fn travel_time_table<E: Executor>(g: &StationGraph, exec: &E) -> Vec<Option<f64>> {
    let opts = RoutingOptions { k: 1, ..RoutingOptions::default() };
    let cache = PathCache::build(g, &opts, exec);
    let ids: Vec<StationId> = g.station_ids().collect();
    let mut out = Vec::with_capacity(ids.len() * ids.len());
    for &o in &ids {
        for &d in &ids {
            out.push(cache.get(o, d).map(|s| s.min_total_time().as_f64()));
        }
    }
    out
}

/// Draws exactly `total` trips per profile bin. Entry times are uniform
/// within the bin; the exit follows after the reasonable travel time.
/// Identical inputs and seed give identical output.
pub fn generate_synthetic_demand<E: Executor>(
    g: &StationGraph,
    profile: &DemandProfile,
    seed: u64,
    exec: &E,
) -> Result<Vec<TripRecord>, DemandError> {
    if profile.bins.is_empty() {
        return Err(DemandError::InvalidProfile("no bins"));
    }
    let bins: Vec<TimeBin> = profile.bins.iter().map(|b| b.bin).collect();
    check_bins(&bins).map_err(|_| DemandError::InvalidProfile("bins must be non-empty and non-overlapping"))?;
    if g.station_count() < 2 {
        return Err(DemandError::InvalidProfile("network has fewer than two stations"));
    }
    let n = g.station_count();
    let times = travel_time_table(g, exec);
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|o| (0..n).filter(move |&d| d != o).map(move |d| (o, d))).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(profile.bins.iter().map(|b| b.total as usize).sum());
    for pb in &profile.bins {
        if pb.total == 0 {
            continue;
        }
        let weights = pair_weights(g, &profile.rule, pb.direction, &times)?;
        let sampler =
            WeightedIndex::new(&weights).map_err(|_| DemandError::InvalidProfile("all pair weights are zero"))?;
        let span = pb.bin.duration_min as i64 * 60;
        for _ in 0..pb.total {
            let (o, d) = pairs[sampler.sample(&mut rng)];
            let entry = pb.bin.start.plus_seconds(rng.gen_range(0..span));
            let minutes = times[o * n + d].unwrap_or(1.0);
            let exit = entry.plus_seconds(libm::ceil(minutes * 60.0).max(1.0) as i64);
            out.push(TripRecord { entry_time: entry, exit_time: exit, origin: g.id_at(o), destination: g.id_at(d) });
        }
    }
    Ok(out)
}
