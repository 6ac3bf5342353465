//! Short-delay travel burden and long-delay operational efficiency.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::demand::{ODMatrix, TimeBin};
use crate::exec::Executor;
use crate::network::{StationGraph, StationId};
use crate::routing::{PathCache, ReasonablePathSet, RoutingOptions};

/// Delays up to this many minutes are short.
pub const DEFAULT_THRESHOLD: f64 = 60.0;

/// The delay grid used for short-delay sweeps.
pub const DELAY_GRID: [f64; 5] = [5.0, 10.0, 20.0, 40.0, 60.0];

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum VulnerabilityError {
    #[error("delay {delay} exceeds the short-delay threshold {threshold}")]
    MisclassifiedDisruption { delay: f64, threshold: f64 },
    #[error("fewer than two stations remain")]
    EmptyGraph,
    #[error("invalid disruption: {0}")]
    InvalidDisruption(&'static str),
    #[error("threshold must be positive and finite")]
    InvalidThreshold,
    #[error("unknown station {0}")]
    UnknownStation(StationId),
    #[error("path cache was built for a different network")]
    CacheMismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disruption {
    targets: Vec<StationId>,
    delay: f64,
    pub bin: TimeBin,
}

impl Disruption {
    pub fn new(
        targets: impl IntoIterator<Item = StationId>,
        delay: f64,
        bin: TimeBin,
    ) -> Result<Self, VulnerabilityError> {
        let mut targets: Vec<StationId> = targets.into_iter().collect();
        targets.sort_unstable();
        targets.dedup();
        if targets.is_empty() {
            return Err(VulnerabilityError::InvalidDisruption("no target stations"));
        }
        if !delay.is_finite() || delay < 0.0 {
            return Err(VulnerabilityError::InvalidDisruption("delay must be finite and non-negative"));
        }
        Ok(Disruption { targets, delay, bin })
    }

    pub fn targets(&self) -> &[StationId] {
        &self.targets
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn with_delay(&self, delay: f64) -> Result<Self, VulnerabilityError> {
        Disruption::new(self.targets.iter().copied(), delay, self.bin)
    }

    fn hits(&self, station: StationId) -> bool {
        self.targets.binary_search(&station).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DelayKind {
    Short,
    Long,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisruptionClass {
    pub kind: DelayKind,
    pub threshold: f64,
}

pub fn classify(d: &Disruption, threshold: f64) -> Result<DisruptionClass, VulnerabilityError> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(VulnerabilityError::InvalidThreshold);
    }
    let kind = if d.delay <= threshold { DelayKind::Short } else { DelayKind::Long };
    Ok(DisruptionClass { kind, threshold })
}

/// Whether a disruption touches the pair: an endpoint is a target or one of
/// its reasonable paths runs through a target.
pub fn is_affected(d: &Disruption, set: &ReasonablePathSet) -> bool {
    d.hits(set.origin) || d.hits(set.destination) || d.targets.iter().any(|&t| set.any_passes_through(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortDelayResult {
    pub value: f64,
    /// Pairs with flow that the disruption delays.
    pub affected_pairs: usize,
    pub stations: usize,
}

/// Short-delay travel burden: flow-weighted travel time summed over pairs,
/// with the delay added for affected pairs, over `N (N - 1)`.
///
/// Pairs without a reasonable path in `cache` contribute nothing.
pub fn psi_short(
    g: &StationGraph,
    od: &ODMatrix,
    cache: &PathCache,
    d: &Disruption,
    threshold: f64,
) -> Result<ShortDelayResult, VulnerabilityError> {
    if classify(d, threshold)?.kind == DelayKind::Long {
        return Err(VulnerabilityError::MisclassifiedDisruption { delay: d.delay, threshold });
    }
    if cache.key().graph_fingerprint != g.fingerprint() {
        return Err(VulnerabilityError::CacheMismatch);
    }
    if let Some(&t) = d.targets.iter().find(|&&t| !g.contains(t)) {
        return Err(VulnerabilityError::UnknownStation(t));
    }
    let n = g.station_count();
    if n < 2 {
        return Err(VulnerabilityError::EmptyGraph);
    }
    let mut sum = 0.0;
    let mut affected_pairs = 0;
    for ((o, dest), f) in od.iter() {
        let Some(set) = cache.get(o, dest) else { continue };
        let mut tau = set.mean_total_time();
        if is_affected(d, set) {
            tau += d.delay;
            affected_pairs += 1;
        }
        sum += tau * f;
    }
    Ok(ShortDelayResult { value: sum / (n * (n - 1)) as f64, affected_pairs, stations: n })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongDelayResult {
    pub value: f64,
    /// Stations left in the graph.
    pub stations: usize,
    /// Pairs with flow whose endpoints survive but are no longer connected.
    pub severed_pairs: usize,
    /// Pairs with flow that lost an endpoint.
    pub lost_pairs: usize,
}

/// Operational efficiency of a reconstructed graph: flow over travel time
/// summed across surviving connected pairs, over `N' (N' - 1)`.
///
/// A fresh path cache is built on `g_prime` for the pairs carrying flow.
pub fn psi_long<E: Executor>(
    g_prime: &StationGraph,
    od: &ODMatrix,
    options: &RoutingOptions,
    exec: &E,
) -> Result<LongDelayResult, VulnerabilityError> {
    if g_prime.station_count() < 2 {
        return Err(VulnerabilityError::EmptyGraph);
    }
    let pairs: Vec<(StationId, StationId)> =
        od.pairs().filter(|&(o, d)| g_prime.contains(o) && g_prime.contains(d)).collect();
    let cache = PathCache::build_for_pairs(g_prime, &pairs, options, exec);
    psi_long_with_cache(g_prime, od, &cache)
}

/// [`psi_long`] over an existing cache built on `g_prime`.
pub fn psi_long_with_cache(
    g_prime: &StationGraph,
    od: &ODMatrix,
    cache: &PathCache,
) -> Result<LongDelayResult, VulnerabilityError> {
    let n = g_prime.station_count();
    if n < 2 {
        return Err(VulnerabilityError::EmptyGraph);
    }
    if cache.key().graph_fingerprint != g_prime.fingerprint() {
        return Err(VulnerabilityError::CacheMismatch);
    }
    let mut sum = 0.0;
    let (mut severed_pairs, mut lost_pairs) = (0, 0);
    for ((o, d), f) in od.iter() {
        if !g_prime.contains(o) || !g_prime.contains(d) {
            lost_pairs += 1;
            continue;
        }
        match cache.get(o, d) {
            Some(set) => sum += f / set.mean_total_time(),
            None => severed_pairs += 1,
        }
    }
    Ok(LongDelayResult { value: sum / (n * (n - 1)) as f64, stations: n, severed_pairs, lost_pairs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    PsiShort,
    PsiLong,
}

/// One emitted result line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VulnerabilityRecord {
    pub scenario: String,
    pub bin: TimeBin,
    pub delay: f64,
    pub metric: MetricKind,
    pub value: f64,
    pub stations: usize,
    pub affected_pairs: usize,
}

impl VulnerabilityRecord {
    pub fn short(scenario: String, d: &Disruption, r: &ShortDelayResult) -> Self {
        VulnerabilityRecord {
            scenario,
            bin: d.bin,
            delay: d.delay,
            metric: MetricKind::PsiShort,
            value: r.value,
            stations: r.stations,
            affected_pairs: r.affected_pairs,
        }
    }

    /// Long-delay record; affected pairs are those lost or severed.
    pub fn long(scenario: String, bin: TimeBin, delay: f64, r: &LongDelayResult) -> Self {
        VulnerabilityRecord {
            scenario,
            bin,
            delay,
            metric: MetricKind::PsiLong,
            value: r.value,
            stations: r.stations,
            affected_pairs: r.lost_pairs + r.severed_pairs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::fixtures::{cross7, ids, path_line};
    use crate::units::Timestamp;

    fn bin() -> TimeBin {
        TimeBin::new(Timestamp(0), 180)
    }

    fn od() -> ODMatrix {
        ODMatrix::from_flows(bin(), [((ids::A1, ids::B2), 10.0)]).unwrap()
    }

    fn short(targets: &[StationId], delay: f64) -> f64 {
        let g = cross7();
        let cache = PathCache::build(&g, &RoutingOptions::default(), &Sequential);
        let d = Disruption::new(targets.iter().copied(), delay, bin()).unwrap();
        psi_short(&g, &od(), &cache, &d, DEFAULT_THRESHOLD).unwrap().value
    }

    #[test]
    fn classification_boundary() {
        let d = |delay| Disruption::new([ids::X], delay, bin()).unwrap();
        assert_eq!(classify(&d(60.0), 60.0).unwrap().kind, DelayKind::Short);
        assert_eq!(classify(&d(0.0), 60.0).unwrap().kind, DelayKind::Short);
        assert_eq!(classify(&d(61.0), 60.0).unwrap().kind, DelayKind::Long);
        assert_eq!(classify(&d(60.0 + 1e-9), 60.0).unwrap().kind, DelayKind::Long);
        assert_eq!(classify(&d(1.0), 0.0), Err(VulnerabilityError::InvalidThreshold));
        assert!(Disruption::new([], 1.0, bin()).is_err());
        assert!(Disruption::new([ids::X], f64::NAN, bin()).is_err());
    }

    #[test]
    fn short_delay_examples() {
        assert_eq!(short(&[ids::X], 0.0), 120.0 / 42.0);
        assert_eq!(short(&[ids::X], 5.0), 170.0 / 42.0);
        assert_eq!(short(&[ids::A3], 5.0), 120.0 / 42.0);
        assert_eq!(short(&[ids::A1], 5.0), 170.0 / 42.0);
        let mut last = short(&[ids::X], 0.0);
        for delay in DELAY_GRID {
            let v = short(&[ids::X], delay);
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn long_delay_rejected_by_short() {
        let g = cross7();
        let cache = PathCache::build(&g, &RoutingOptions::default(), &Sequential);
        let d = Disruption::new([ids::X], 90.0, bin()).unwrap();
        assert_eq!(
            psi_short(&g, &od(), &cache, &d, 60.0),
            Err(VulnerabilityError::MisclassifiedDisruption { delay: 90.0, threshold: 60.0 })
        );
    }

    #[test]
    fn long_delay_examples() {
        let g = cross7();
        let opts = RoutingOptions::default();
        let intact = psi_long(&g, &od(), &opts, &Sequential).unwrap();
        assert!((intact.value - 10.0 / 12.0 / 42.0).abs() < 1e-15);

        let no_x = g.remove_stations(&[ids::X]).unwrap();
        let r = psi_long(&no_x, &od(), &opts, &Sequential).unwrap();
        assert_eq!((r.value, r.severed_pairs), (0.0, 1));

        let no_a3 = g.remove_stations(&[ids::A3]).unwrap();
        let r = psi_long(&no_a3, &od(), &opts, &Sequential).unwrap();
        assert!((r.value - 10.0 / 12.0 / 30.0).abs() < 1e-15);

        let no_a1 = g.remove_stations(&[ids::A1]).unwrap();
        let r = psi_long(&no_a1, &od(), &opts, &Sequential).unwrap();
        assert_eq!((r.value, r.lost_pairs), (0.0, 1));
    }

    #[test]
    fn empty_graph() {
        let g = path_line(2);
        let g1 = g.remove_stations(&[StationId(1)]).unwrap();
        let od = ODMatrix::empty(bin());
        assert_eq!(psi_long(&g1, &od, &RoutingOptions::default(), &Sequential), Err(VulnerabilityError::EmptyGraph));
    }
}
