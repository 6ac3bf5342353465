//! Importance curves over the day: clustering by shape, rank-frequency
//! tables and Kendall correlation.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::demand::{ODMatrix, TimeBin};
use crate::exec::Executor;
use crate::metrics::{importance_all, MetricsError, PassCounting};
use crate::network::{StationGraph, StationId};
use crate::routing::PathCache;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("series need at least two samples")]
    DegenerateSeries,
    #[error("series have different lengths or bins")]
    LengthMismatch,
    #[error("bins must be strictly increasing")]
    UnorderedBins,
    #[error("cluster count must be at least 1")]
    ZeroClusters,
    #[error("every value in a sequence is tied")]
    AllTies,
    #[error("sequence contains a non-finite value")]
    NonFinite,
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImportanceSeries {
    pub station: StationId,
    pub samples: Vec<(TimeBin, f64)>,
}

impl ImportanceSeries {
    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    /// Change in importance per hour between successive bin starts.
    pub fn slopes(&self) -> Vec<f64> {
        self.samples
            .windows(2)
            .map(|w| {
                let hours = (w[1].0.start.0 - w[0].0.start.0) as f64 / 3600.0;
                (w[1].1 - w[0].1) / hours
            })
            .collect()
    }
}

/// One importance series per station of `g`, one sample per matrix.
pub fn importance_series(
    g: &StationGraph,
    matrices: &[ODMatrix],
    cache: &PathCache,
    counting: PassCounting,
) -> Result<Vec<ImportanceSeries>, CurveError> {
    if matrices.windows(2).any(|w| w[0].bin.start >= w[1].bin.start) {
        return Err(CurveError::UnorderedBins);
    }
    let mut series: Vec<ImportanceSeries> = g
        .station_ids()
        .map(|station| ImportanceSeries { station, samples: Vec::with_capacity(matrices.len()) })
        .collect();
    for od in matrices {
        for (s, (_, zeta)) in series.iter_mut().zip(importance_all(g, od, cache, counting)?) {
            s.samples.push((od.bin, zeta));
        }
    }
    Ok(series)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Linkage {
    #[default]
    Average,
    Single,
    Complete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub station: StationId,
    /// 1-based; clusters are numbered by their first station in input order.
    pub cluster: usize,
}

/// One agglomeration step. Leaves are numbered `0..n` in input order and
/// the cluster formed by merge `i` is `n + i`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub assignments: Vec<ClusterAssignment>,
    /// The full merge tree, independent of the cut.
    pub dendrogram: Vec<Merge>,
    pub clusters: usize,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Agglomerative clustering of the slope vectors, cut at `k` clusters.
/// Merges at zero distance are always taken, so identical shapes share a
/// cluster even when that leaves fewer than `k`. Ties merge the pair with
/// the smallest cluster ids.
pub fn cluster_curves<E: Executor>(
    series: &[ImportanceSeries],
    k: usize,
    linkage: Linkage,
    exec: &E,
) -> Result<Clustering, CurveError> {
    if k == 0 {
        return Err(CurveError::ZeroClusters);
    }
    let Some(first) = series.first() else {
        return Ok(Clustering { assignments: Vec::new(), dendrogram: Vec::new(), clusters: 0 });
    };
    let len = first.samples.len();
    if len < 2 {
        return Err(CurveError::DegenerateSeries);
    }
    let bins: Vec<TimeBin> = first.samples.iter().map(|s| s.0).collect();
    for s in series {
        if s.samples.len() != len || s.samples.iter().map(|x| x.0).ne(bins.iter().copied()) {
            return Err(CurveError::LengthMismatch);
        }
    }
    if bins.windows(2).any(|w| w[0].start >= w[1].start) {
        return Err(CurveError::UnorderedBins);
    }
    let features: Vec<Vec<f64>> = series.iter().map(|s| s.slopes()).collect();
    let n = series.len();
    let mut dist: Vec<Vec<f64>> = exec.map(n, |i| (0..n).map(|j| euclidean(&features[i], &features[j])).collect());

    // Slot i holds the cluster currently stored at row i.
    let mut id: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut alive = vec![true; n];
    let mut dendrogram = Vec::with_capacity(n.saturating_sub(1));
    let mut cut_at = None;
    let mut count = n;
    while count > 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for i in (0..n).filter(|&i| alive[i]) {
            for j in (i + 1..n).filter(|&j| alive[j]) {
                let (lo, hi) = (id[i].min(id[j]), id[i].max(id[j]));
                let d = dist[i][j];
                let better = match best {
                    None => true,
                    Some((bd, blo, bhi, _, _)) => d < bd || (d == bd && (lo, hi) < (blo, bhi)),
                };
                if better {
                    best = Some((d, lo, hi, i, j));
                }
            }
        }
        let (d, lo, hi, i, j) = best.unwrap();
        if count <= k && d > 0.0 && cut_at.is_none() {
            cut_at = Some(dendrogram.len());
        }
        let merged = n + dendrogram.len();
        dendrogram.push(Merge { left: lo, right: hi, distance: d, size: size[i] + size[j] });
        for m in (0..n).filter(|&m| alive[m] && m != i && m != j) {
            let (a, b) = (dist[i][m], dist[j][m]);
            let v = match linkage {
                Linkage::Average => (size[i] as f64 * a + size[j] as f64 * b) / (size[i] + size[j]) as f64,
                Linkage::Single => a.min(b),
                Linkage::Complete => a.max(b),
            };
            dist[i][m] = v;
            dist[m][i] = v;
        }
        alive[j] = false;
        size[i] += size[j];
        id[i] = merged;
        count -= 1;
    }
    let applied = cut_at.unwrap_or(dendrogram.len());
    let mut parent: Vec<usize> = (0..n + applied).collect();
    for (step, m) in dendrogram[..applied].iter().enumerate() {
        parent[m.left] = n + step;
        parent[m.right] = n + step;
    }
    let mut labels: BTreeMap<usize, usize> = BTreeMap::new();
    let assignments: Vec<ClusterAssignment> = series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let root = find(&mut parent, i);
            let next = labels.len() + 1;
            let cluster = *labels.entry(root).or_insert(next);
            ClusterAssignment { station: s.station, cluster }
        })
        .collect();
    Ok(Clustering { assignments, dendrogram, clusters: labels.len() })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        let up = parent[x];
        parent[x] = parent[up];
        x = up;
    }
    x
}

/// Mean series per cluster, indexed by label minus one.
pub fn cluster_means(series: &[ImportanceSeries], clustering: &Clustering) -> Vec<Vec<f64>> {
    let len = series.first().map_or(0, |s| s.samples.len());
    let mut sums = vec![vec![0.0; len]; clustering.clusters];
    let mut counts = vec![0usize; clustering.clusters];
    for (s, a) in series.iter().zip(&clustering.assignments) {
        counts[a.cluster - 1] += 1;
        for (acc, (_, v)) in sums[a.cluster - 1].iter_mut().zip(&s.samples) {
            *acc += v;
        }
    }
    for (row, &c) in sums.iter_mut().zip(&counts) {
        for v in row.iter_mut() {
            *v /= c as f64;
        }
    }
    sums
}

/// Appearance counts across ranking lists, most frequent first; ties by
/// station id.
pub fn rank_frequency(lists: &[Vec<StationId>]) -> Vec<(StationId, usize)> {
    let mut counts: BTreeMap<StationId, usize> = BTreeMap::new();
    for list in lists {
        for &s in list {
            *counts.entry(s).or_default() += 1;
        }
    }
    let mut table: Vec<(StationId, usize)> = counts.into_iter().collect();
    table.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    table
}

/// Kendall tau-b.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64, CurveError> {
    if x.len() != y.len() {
        return Err(CurveError::LengthMismatch);
    }
    if x.len() < 2 {
        return Err(CurveError::DegenerateSeries);
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(CurveError::NonFinite);
    }
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = x[i].partial_cmp(&x[j]).unwrap();
            let dy = y[i].partial_cmp(&y[j]).unwrap();
            use core::cmp::Ordering::Equal;
            match (dx, dy) {
                (Equal, Equal) => {
                    tied_x += 1;
                    tied_y += 1;
                }
                (Equal, _) => tied_x += 1,
                (_, Equal) => tied_y += 1,
                _ if dx == dy => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let pairs = (x.len() * (x.len() - 1) / 2) as i64;
    let (nx, ny) = (pairs - tied_x, pairs - tied_y);
    if nx == 0 || ny == 0 {
        return Err(CurveError::AllTies);
    }
    Ok((concordant - discordant) as f64 / libm::sqrt(nx as f64 * ny as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::day_bins;
    use crate::exec::Sequential;
    use crate::fixtures::{cross7, ids};
    use crate::routing::RoutingOptions;
    use crate::units::Timestamp;

    fn series(station: u32, values: &[f64]) -> ImportanceSeries {
        let bins = day_bins(Timestamp(0), 5, 23, 3);
        ImportanceSeries {
            station: StationId(station),
            samples: bins.into_iter().zip(values.iter().copied()).collect(),
        }
    }

    #[test]
    fn kendall_examples() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0, 4.0], &[1.0, 2.0, 3.0, 4.0]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap(), 4.0 / 6.0);
        // x has one tied pair: nc=4, nd=1, n0=6, n1=1 -> 3/sqrt(30)
        let t = kendall_tau(&[1.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((t - 3.0 / libm::sqrt(30.0)).abs() < 1e-15);
        assert_eq!(kendall_tau(&[1.0, 1.0], &[1.0, 2.0]), Err(CurveError::AllTies));
        assert_eq!(kendall_tau(&[1.0], &[1.0, 2.0]), Err(CurveError::LengthMismatch));
    }

    #[test]
    fn frequency_table() {
        let a = vec![StationId(1), StationId(2)];
        let b = vec![StationId(2), StationId(3)];
        let t = rank_frequency(&[a.clone(), b.clone(), a, b]);
        assert_eq!(t, vec![(StationId(2), 4), (StationId(1), 2), (StationId(3), 2)]);
        assert!(rank_frequency(&[]).is_empty());
    }

    #[test]
    fn clustering_basics() {
        let s = vec![
            series(1, &[0.0, 1.0, 0.0, 1.0, 0.0, 1.0]),
            series(2, &[0.5, 1.5, 0.5, 1.5, 0.5, 1.5]),
            series(3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            series(4, &[0.0, 0.1, 0.2, 0.3, 0.4, 0.5]),
        ];
        let c = cluster_curves(&s, 3, Linkage::Average, &Sequential).unwrap();
        let labels: Vec<usize> = c.assignments.iter().map(|a| a.cluster).collect();
        assert_eq!(labels, vec![1, 1, 2, 3]);
        assert_eq!(c.dendrogram.len(), 3);
        assert_eq!((c.dendrogram[0].left, c.dendrogram[0].right, c.dendrogram[0].distance), (0, 1, 0.0));

        let one = cluster_curves(&s, 1, Linkage::Average, &Sequential).unwrap();
        assert!(one.assignments.iter().all(|a| a.cluster == 1));

        let same: Vec<_> = (0..5).map(|i| series(i, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0])).collect();
        assert_eq!(cluster_curves(&same, 4, Linkage::Average, &Sequential).unwrap().clusters, 1);

        let short = vec![series(1, &[1.0])];
        assert_eq!(cluster_curves(&short, 2, Linkage::Average, &Sequential), Err(CurveError::DegenerateSeries));

        let means = cluster_means(&s, &c);
        assert_eq!(means[0], vec![0.25, 1.25, 0.25, 1.25, 0.25, 1.25]);
    }

    #[test]
    fn series_follow_demand() {
        let g = cross7();
        let cache = PathCache::build(&g, &RoutingOptions::default(), &Sequential);
        let bins = day_bins(Timestamp(0), 5, 23, 3);
        let matrices: Vec<ODMatrix> = bins
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                if i == 1 {
                    ODMatrix::from_flows(b, [((ids::A1, ids::B2), 10.0)]).unwrap()
                } else {
                    ODMatrix::empty(b)
                }
            })
            .collect();
        let s = importance_series(&g, &matrices, &cache, PassCounting::FullFlow).unwrap();
        assert_eq!(s.len(), 7);
        let x = s.iter().find(|s| s.station == ids::X).unwrap();
        assert_eq!(x.values(), vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        for st in &s {
            for (i, v) in st.values().into_iter().enumerate() {
                if i != 1 {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }
}
