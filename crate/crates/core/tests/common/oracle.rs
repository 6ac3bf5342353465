//! Brute-force reference implementations: every loopless path is
//! enumerated directly from the edge list and metrics are summed term by
//! term.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use railvuln_core::demand::ODMatrix;
use railvuln_core::network::{LineId, StationGraph, StationId};
use railvuln_core::Minutes;

#[derive(Clone, Debug, PartialEq)]
pub struct BrutePath {
    pub stations: Vec<StationId>,
    pub lines: Vec<LineId>,
    pub ride: Minutes,
    pub transfers: u32,
    pub transfer_time: Minutes,
    pub total: Minutes,
}

fn extend(
    g: &StationGraph,
    d: StationId,
    stations: &mut Vec<StationId>,
    hops: &mut Vec<(LineId, Minutes)>,
    out: &mut Vec<BrutePath>,
) {
    let here = *stations.last().unwrap();
    if here == d {
        let mut ride = Minutes::ZERO;
        let mut transfer_time = Minutes::ZERO;
        let mut transfers = 0;
        for (k, &(line, t)) in hops.iter().enumerate() {
            ride += t;
            if k > 0 && hops[k - 1].0 != line {
                match g.transfer_time(stations[k], hops[k - 1].0, line) {
                    Some(x) => {
                        transfer_time += x;
                        transfers += 1;
                    }
                    None => return,
                }
            }
        }
        out.push(BrutePath {
            stations: stations.clone(),
            lines: hops.iter().map(|h| h.0).collect(),
            ride,
            transfers,
            transfer_time,
            total: ride + transfer_time,
        });
        return;
    }
    for e in g.edges() {
        let next = if e.a == here {
            e.b
        } else if e.b == here {
            e.a
        } else {
            continue;
        };
        if stations.contains(&next) {
            continue;
        }
        stations.push(next);
        hops.push((e.line, e.run_time));
        extend(g, d, stations, hops, out);
        hops.pop();
        stations.pop();
    }
}

/// Every station-simple path from `o` to `d` that only changes line where
/// a transfer arc exists, sorted by total time, station ids, then lines.
pub fn all_paths(g: &StationGraph, o: StationId, d: StationId) -> Vec<BrutePath> {
    let mut out = Vec::new();
    extend(g, d, &mut vec![o], &mut Vec::new(), &mut out);
    out.sort_by(|a, b| (a.total, &a.stations, &a.lines).cmp(&(b.total, &b.stations, &b.lines)));
    out
}

/// Lexicographic reasonable-path selection over the first `k` paths within
/// `epsilon` of the fastest, with inverse-time split weights.
pub fn reasonable(g: &StationGraph, o: StationId, d: StationId, k: usize, epsilon: Minutes) -> Vec<(BrutePath, f64)> {
    let all = all_paths(g, o, d);
    let Some(best) = all.first().map(|p| p.total) else { return Vec::new() };
    let mut window: Vec<BrutePath> = all.into_iter().filter(|p| p.total <= best + epsilon).collect();
    window.truncate(k);
    let fewest = window.iter().map(|p| p.transfers).min().unwrap();
    let least = window.iter().filter(|p| p.transfers == fewest).map(|p| p.transfer_time).min().unwrap();
    let chosen: Vec<BrutePath> =
        window.into_iter().filter(|p| p.transfers == fewest && p.transfer_time == least).collect();
    let inv: Vec<f64> = chosen.iter().map(|p| 1.0 / p.total.as_f64()).collect();
    let sum: f64 = inv.iter().sum();
    chosen.into_iter().zip(inv).map(|(p, w)| (p, w / sum)).collect()
}

pub type Sets = BTreeMap<(StationId, StationId), Vec<(BrutePath, f64)>>;

/// Reasonable sets for every pair carrying flow.
pub fn sets_for(g: &StationGraph, od: &ODMatrix, k: usize) -> Sets {
    od.pairs().map(|(o, d)| ((o, d), reasonable(g, o, d, k, Minutes::ZERO))).collect()
}

#[derive(Clone, Debug, Default)]
pub struct BruteMetrics {
    pub degree: f64,
    pub betweenness: f64,
    /// `None` when the station originates no flow.
    pub closeness: Option<f64>,
    pub importance: f64,
}

pub fn metrics(g: &StationGraph, od: &ODMatrix, sets: &Sets, split_pass: bool) -> BTreeMap<StationId, BruteMetrics> {
    // Assigned flow per undirected station link.
    let mut link: BTreeMap<(StationId, StationId), f64> = BTreeMap::new();
    for ((o, d), set) in sets {
        let f = od.flow(*o, *d);
        for (p, w) in set {
            for hop in p.stations.windows(2) {
                let key = (hop[0].min(hop[1]), hop[0].max(hop[1]));
                *link.entry(key).or_default() += f * w;
            }
        }
    }
    let n = g.station_count() as f64;
    let total = od.total();
    let active: BTreeSet<StationId> = od.pairs().flat_map(|(o, d)| [o, d]).collect();
    let mut out = BTreeMap::new();
    for i in g.station_ids() {
        let degree: f64 = g.neighbors(i).iter().map(|&j| link.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)).sum();
        let mut betweenness = 0.0;
        let mut s_pass = 0.0;
        let mut pass_ends = BTreeSet::new();
        for ((o, d), set) in sets {
            if *o == i || *d == i {
                continue;
            }
            let f = od.flow(*o, *d);
            let share: f64 = set.iter().filter(|(p, _)| p.stations.contains(&i)).map(|(_, w)| w).sum();
            if share > 0.0 {
                betweenness += share;
                s_pass += if split_pass { f * share } else { f };
                pass_ends.insert(*o);
                pass_ends.insert(*d);
            }
        }
        let out_flow: f64 = od.iter().filter(|((o, _), _)| *o == i).map(|(_, f)| f).sum();
        let s_in = out_flow;
        let n_in = od.pairs().filter(|(o, _)| *o == i).map(|(_, d)| d).collect::<BTreeSet<_>>().len();
        let s_out: f64 = od.iter().filter(|((_, d), _)| *d == i).map(|(_, f)| f).sum();
        let n_out = od.pairs().filter(|(_, d)| *d == i).map(|(o, _)| o).collect::<BTreeSet<_>>().len();
        let importance = if total == 0.0 {
            0.0
        } else {
            (s_out * n_out as f64 + s_in * n_in as f64 + s_pass * pass_ends.len() as f64)
                / (total * active.len() as f64)
        };
        let closeness = (out_flow > 0.0).then(|| (n - 1.0) / out_flow);
        out.insert(i, BruteMetrics { degree, betweenness, closeness, importance });
    }
    out
}

/// Long-delay efficiency after removing `removed`, straight from the
/// enumerated paths.
pub fn psi_long(g: &StationGraph, od: &ODMatrix, k: usize) -> Option<f64> {
    let n = g.station_count();
    if n < 2 {
        return None;
    }
    let mut sum = 0.0;
    for ((o, d), f) in od.iter() {
        if !g.contains(o) || !g.contains(d) {
            continue;
        }
        let set = reasonable(g, o, d, k, Minutes::ZERO);
        if set.is_empty() {
            continue;
        }
        let tau: f64 = set.iter().map(|(p, w)| w * p.total.as_f64()).sum();
        sum += f / tau;
    }
    Some(sum / (n * (n - 1)) as f64)
}

/// Deterministic sparse demand over the stations of `g`.
pub fn random_od(g: &StationGraph, seed: u64, bin: railvuln_core::demand::TimeBin) -> ODMatrix {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<StationId> = g.station_ids().collect();
    let mut flows = Vec::new();
    for &o in &ids {
        for &d in &ids {
            if o != d && rng.gen_bool(0.5) {
                flows.push(((o, d), rng.gen_range(1..=40) as f64));
            }
        }
    }
    ODMatrix::from_flows(bin, flows).unwrap()
}
