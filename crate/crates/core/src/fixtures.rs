//! Canonical toy networks and seeded synthetic network generators.
//!
//! `cross7` is the shared hand-checkable fixture: line A runs
//! a1-a2-X-a3 (2 min per hop), line B runs b1-X-b2-b3 (3 min per hop) and
//! changing lines at X takes 5 min.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::{BuildOptions, EdgeRecord, StationGraph, StationId, StationRecord, TransferRecord};

/// Station ids of [`cross7`].
pub mod ids {
    use crate::network::StationId;

    pub const A1: StationId = StationId(1);
    pub const A2: StationId = StationId(2);
    pub const X: StationId = StationId(3);
    pub const A3: StationId = StationId(4);
    pub const B1: StationId = StationId(5);
    pub const B2: StationId = StationId(6);
    pub const B3: StationId = StationId(7);
}

/// Small builder used by the fixtures: stations are declared implicitly by
/// the lines that visit them.
#[derive(Default)]
pub struct NetworkSketch {
    stations: Vec<StationRecord>,
    edges: Vec<EdgeRecord>,
    transfers: Vec<TransferRecord>,
}

impl NetworkSketch {
    pub fn new() -> Self {
        Self::default()
    }

    fn touch(&mut self, id: u32, line: &str) {
        let id = StationId(id);
        match self.stations.iter_mut().find(|s| s.id == id) {
            Some(s) => {
                if !s.lines.iter().any(|l| l == line) {
                    s.lines.push(line.into());
                }
            }
            None => self.stations.push(StationRecord {
                id,
                name: format!("s{}", id.0),
                lines: vec![line.into()],
                is_transfer: None,
            }),
        }
    }

    pub fn name(mut self, id: u32, name: &str) -> Self {
        if let Some(s) = self.stations.iter_mut().find(|s| s.id == StationId(id)) {
            s.name = name.into();
        }
        self
    }

    /// Adds a line through `stations` with one run time per hop. A trailing
    /// hop back to the first station closes a loop when `times` has one
    /// more entry than hops.
    pub fn line(mut self, name: &str, stations: &[u32], times: &[f64]) -> Self {
        for &s in stations {
            self.touch(s, name);
        }
        let mut hops: Vec<(u32, u32)> = stations.windows(2).map(|w| (w[0], w[1])).collect();
        if times.len() == stations.len() && stations.len() >= 3 {
            hops.push((stations[stations.len() - 1], stations[0]));
        }
        assert_eq!(hops.len(), times.len(), "one run time per hop");
        for ((a, b), &t) in hops.into_iter().zip(times) {
            self.edges.push(EdgeRecord { from: StationId(a), to: StationId(b), line: name.into(), run_time: t });
        }
        self
    }

    pub fn transfer(mut self, station: u32, from: &str, to: &str, minutes: f64) -> Self {
        self.transfers.push(TransferRecord {
            station: StationId(station),
            from_line: from.into(),
            to_line: to.into(),
            transfer_time: minutes,
        });
        self
    }

    pub fn records(&self) -> (&[StationRecord], &[EdgeRecord], &[TransferRecord]) {
        (&self.stations, &self.edges, &self.transfers)
    }

    pub fn build(self) -> StationGraph {
        self.try_build(&BuildOptions::default()).expect("fixture network is valid")
    }

    pub fn try_build(self, options: &BuildOptions) -> Result<StationGraph, crate::network::NetworkError> {
        let mut stations = self.stations;
        stations.sort_by_key(|s| s.id);
        StationGraph::build(&stations, &self.edges, &self.transfers, options)
    }
}

pub fn cross7_sketch() -> NetworkSketch {
    NetworkSketch::new()
        .line("A", &[1, 2, 3, 4], &[2.0, 2.0, 2.0])
        .line("B", &[5, 3, 6, 7], &[3.0, 3.0, 3.0])
        .transfer(3, "A", "B", 5.0)
        .name(1, "a1")
        .name(2, "a2")
        .name(3, "X")
        .name(4, "a3")
        .name(5, "b1")
        .name(6, "b2")
        .name(7, "b3")
}

pub fn cross7() -> StationGraph {
    cross7_sketch().build()
}

/// Two lines joining stations 1 and 4: `U` via station 2 and `L` via
/// station 3, with the given per-hop run times.
pub fn diamond(upper: f64, lower: f64) -> StationGraph {
    NetworkSketch::new()
        .line("U", &[1, 2, 4], &[upper / 2.0, upper / 2.0])
        .line("L", &[1, 3, 4], &[lower / 2.0, lower / 2.0])
        .build()
}

/// Single line 1..=n with 2-minute hops.
pub fn path_line(n: u32) -> StationGraph {
    let stations: Vec<u32> = (1..=n).collect();
    let times = vec![2.0; n as usize - 1];
    NetworkSketch::new().line("L", &stations, &times).build()
}

/// Single loop line through stations 0..n.
pub fn ring(n: u32) -> StationGraph {
    let stations: Vec<u32> = (0..n).collect();
    let times = vec![2.0; n as usize];
    NetworkSketch::new().line("R", &stations, &times).build()
}

/// Grid-shaped multi-line network: `horizontal` lines each cross every one
/// of `vertical` lines once, every crossing being a two-line transfer
/// station. The remaining stations are spread over the segments between
/// crossings and the tails beyond the outer crossings.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub horizontal: usize,
    pub vertical: usize,
    pub stations: usize,
    pub seed: u64,
}

impl GridSpec {
    /// 287 stations, 54 of them transfer stations, on 15 lines.
    pub const BEIJING_SHAPED: GridSpec = GridSpec { horizontal: 6, vertical: 9, stations: 287, seed: 287 };
}

pub fn grid_network(spec: GridSpec) -> StationGraph {
    grid_sketch(spec).build()
}

pub fn grid_sketch(spec: GridSpec) -> NetworkSketch {
    let GridSpec { horizontal: h, vertical: v, stations, seed } = spec;
    assert!(h + v >= 1);
    let crossings = h * v;
    assert!(stations >= crossings.max(2), "too few stations for the grid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Slot layout per line: tail, (crossings-1) inner segments, tail.
    let line_len = |is_h: bool| if is_h { v } else { h };
    let slot_count: usize =
        (0..h).map(|_| line_len(true) + 1).sum::<usize>() + (0..v).map(|_| line_len(false) + 1).sum::<usize>();
    let extra = stations - crossings;
    let mut fill = vec![extra / slot_count; slot_count];
    let mut order: Vec<usize> = (0..slot_count).collect();
    order.shuffle(&mut rng);
    for &slot in order.iter().take(extra % slot_count) {
        fill[slot] += 1;
    }

    let crossing_id = |i: usize, j: usize| (i * v + j + 1) as u32;
    let mut next_id = crossings as u32 + 1;
    let mut slot = 0;
    let mut sketch = NetworkSketch::new();
    let mut lines: Vec<(String, Vec<u32>)> = Vec::new();
    for line_no in 0..h + v {
        let is_h = line_no < h;
        let idx = if is_h { line_no } else { line_no - h };
        let name = if is_h { format!("H{}", idx + 1) } else { format!("V{}", idx + 1) };
        let cross: Vec<u32> =
            (0..line_len(is_h)).map(|k| if is_h { crossing_id(idx, k) } else { crossing_id(k, idx) }).collect();
        let mut seq = Vec::new();
        let mut push_fill = |seq: &mut Vec<u32>, count: usize| {
            for _ in 0..count {
                seq.push(next_id);
                next_id += 1;
            }
        };
        push_fill(&mut seq, fill[slot]);
        slot += 1;
        for (k, &c) in cross.iter().enumerate() {
            seq.push(c);
            if k + 1 < cross.len() {
                push_fill(&mut seq, fill[slot]);
                slot += 1;
            }
        }
        push_fill(&mut seq, fill[slot]);
        slot += 1;
        lines.push((name, seq));
    }
    for (name, seq) in &lines {
        let times: Vec<f64> = (1..seq.len()).map(|_| rng.gen_range(3..=8) as f64 * 0.5).collect();
        sketch = sketch.line(name, seq, &times);
    }
    for i in 0..h {
        for j in 0..v {
            let minutes = rng.gen_range(3..=6) as f64;
            sketch = sketch.transfer(crossing_id(i, j), &format!("H{}", i + 1), &format!("V{}", j + 1), minutes);
        }
    }
    sketch
}

/// Random connected network with 3..=`max_stations` stations and 1..=3
/// lines. Lines may share hops (parallel edges) or close into loops;
/// transfer times vary per station and are sometimes asymmetric.
pub fn random_small_network(seed: u64, max_stations: u32) -> StationGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_stations.max(3));
    let line_count = rng.gen_range(1..=3usize);
    let mut all: Vec<u32> = (1..=n).collect();
    all.shuffle(&mut rng);

    let mut covered: Vec<u32> = Vec::new();
    let mut lines: Vec<Vec<u32>> = Vec::new();
    let first_len = if line_count == 1 { n as usize } else { rng.gen_range(2..=n as usize) };
    lines.push(all[..first_len].to_vec());
    covered.extend_from_slice(&all[..first_len]);
    for _ in 1..line_count {
        let anchor = *covered.choose(&mut rng).unwrap();
        let uncovered: Vec<u32> = all.iter().copied().filter(|s| !covered.contains(s)).collect();
        let mut pool: Vec<u32> = all.iter().copied().filter(|&s| s != anchor).collect();
        pool.shuffle(&mut rng);
        // Prefer uncovered stations so every station ends up on a line.
        pool.sort_by_key(|s| !uncovered.contains(s));
        let len = rng.gen_range(1..=pool.len().clamp(1, 6));
        let mut seq: Vec<u32> = pool[..len].to_vec();
        seq.shuffle(&mut rng);
        let at = rng.gen_range(0..=seq.len());
        seq.insert(at, anchor);
        for &s in &seq {
            if !covered.contains(&s) {
                covered.push(s);
            }
        }
        lines.push(seq);
    }
    // Stragglers extend the tail of a random line.
    for s in all.iter().copied() {
        if !covered.contains(&s) {
            let k = rng.gen_range(0..lines.len());
            lines[k].push(s);
            covered.push(s);
        }
    }

    let mut sketch = NetworkSketch::new();
    let mut names = Vec::new();
    for (k, seq) in lines.iter().enumerate() {
        let name = format!("L{}", k + 1);
        let closed = seq.len() >= 3 && rng.gen_bool(0.2);
        let hops = if closed { seq.len() } else { seq.len() - 1 };
        let times: Vec<f64> = (0..hops).map(|_| rng.gen_range(2..=10) as f64 * 0.5).collect();
        sketch = sketch.line(&name, seq, &times);
        names.push(name);
    }
    // Transfer rows for every shared station and line pair.
    for s in 1..=n {
        let on: Vec<&String> = names.iter().zip(&lines).filter(|(_, seq)| seq.contains(&s)).map(|(n, _)| n).collect();
        for i in 0..on.len() {
            for j in i + 1..on.len() {
                let t = rng.gen_range(1..=6) as f64;
                sketch = sketch.transfer(s, on[i], on[j], t);
                if rng.gen_bool(0.25) {
                    let back = rng.gen_range(1..=6) as f64;
                    sketch = sketch.transfer(s, on[j], on[i], back);
                }
            }
        }
    }
    sketch.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beijing_shaped_counts() {
        let g = grid_network(GridSpec::BEIJING_SHAPED);
        assert_eq!(g.station_count(), 287);
        assert_eq!(g.transfer_station_count(), 54);
        assert!(g.is_connected());
    }

    #[test]
    fn small_grid() {
        let g = grid_network(GridSpec { horizontal: 1, vertical: 2, stations: 30, seed: 3 });
        assert_eq!(g.station_count(), 30);
        assert_eq!(g.lines().len(), 3);
        assert_eq!(g.transfer_station_count(), 2);
    }

    #[test]
    fn random_networks_are_valid_and_deterministic() {
        for seed in 0..200 {
            let g = random_small_network(seed, 12);
            assert!(g.station_count() <= 12 && g.station_count() >= 3);
            assert!(g.is_connected());
            assert_eq!(g, random_small_network(seed, 12));
        }
    }
}
