mod common;

use common::oracle;
use proptest::prelude::*;
use railvuln_core::curves::{cluster_curves, kendall_tau, rank_frequency, ImportanceSeries, Linkage};
use railvuln_core::demand::{bin_trips, day_bins, ODMatrix, TimeBin, TripRecord};
use railvuln_core::fixtures::{cross7, random_small_network};
use railvuln_core::metrics::{bin_metrics, topo_metrics, PassCounting};
use railvuln_core::routing::{PathCache, RoutingOptions};
use railvuln_core::sim::{run_removals, Removal};
use railvuln_core::vulnerability::{psi_short, Disruption, DEFAULT_THRESHOLD};
use railvuln_core::{Sequential, StationId, Timestamp};

fn bin() -> TimeBin {
    TimeBin::new(Timestamp(0), 180)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kendall_symmetric_and_rank_invariant(pairs in prop::collection::vec((0i32..6, 0i32..6), 2..12)) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        match (kendall_tau(&x, &y), kendall_tau(&y, &x)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a, b);
                prop_assert!((-1.0..=1.0).contains(&a));
                let rescaled: Vec<f64> = x.iter().map(|v| v.exp() * 3.0 - 1.0).collect();
                prop_assert!((kendall_tau(&rescaled, &y).unwrap() - a).abs() < 1e-12);
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            other => prop_assert!(false, "asymmetric outcome {:?}", other),
        }
    }

    #[test]
    fn clustering_ignores_offsets(
        values in prop::collection::vec(prop::collection::vec(0u8..20, 6), 2..12),
        offsets in prop::collection::vec(-40i32..40, 12),
        k in 1usize..5,
    ) {
        let bins = day_bins(Timestamp(0), 5, 23, 3);
        let make = |shift: bool| -> Vec<ImportanceSeries> {
            values.iter().enumerate().map(|(i, v)| ImportanceSeries {
                station: StationId(i as u32),
                samples: bins.iter().zip(v).map(|(&b, &x)| (b, x as f64 / 8.0 + if shift { offsets[i] as f64 / 8.0 } else { 0.0 })).collect(),
            }).collect()
        };
        let a = cluster_curves(&make(false), k, Linkage::Average, &Sequential).unwrap();
        let b = cluster_curves(&make(true), k, Linkage::Average, &Sequential).unwrap();
        let la: Vec<usize> = a.assignments.iter().map(|x| x.cluster).collect();
        let lb: Vec<usize> = b.assignments.iter().map(|x| x.cluster).collect();
        prop_assert_eq!(la, lb);
        prop_assert!(a.clusters <= k.max(1));
    }

    #[test]
    fn rank_frequency_totals(lists in prop::collection::vec(prop::collection::btree_set(0u32..30, 0..8), 0..10)) {
        let lists: Vec<Vec<StationId>> = lists.into_iter().map(|s| s.into_iter().map(StationId).collect()).collect();
        let table = rank_frequency(&lists);
        prop_assert_eq!(table.iter().map(|r| r.1).sum::<usize>(), lists.iter().map(Vec::len).sum::<usize>());
        prop_assert!(table.windows(2).all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0)));
    }

    #[test]
    fn binning_accounts_for_every_record(raw in prop::collection::vec((0i64..100_000, 0i64..4_000, 1u32..8, 1u32..8), 0..200)) {
        let bins = day_bins(Timestamp(0), 5, 23, 3);
        let records: Vec<TripRecord> = raw.iter().map(|&(t, dur, o, d)| TripRecord {
            entry_time: Timestamp(t),
            exit_time: Timestamp(t + dur - 500),
            origin: StationId(o),
            destination: StationId(d),
        }).collect();
        let (matrices, report) = bin_trips(&records, &bins).unwrap();
        prop_assert_eq!(report.assigned + report.dropped(), records.len());
        let total: f64 = matrices.iter().map(ODMatrix::total).sum();
        prop_assert_eq!(total as usize, report.assigned);
    }

    #[test]
    fn split_weights_sum_to_one(seed in 0u64..500) {
        let g = random_small_network(seed, 9);
        let cache = PathCache::build(&g, &RoutingOptions::default(), &Sequential);
        for set in cache.sets() {
            let s: f64 = set.split_weights.iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            prop_assert!(set.paths.iter().all(|p| p.total_time == set.paths[0].total_time));
        }
    }

    #[test]
    fn importance_is_bounded(seed in 0u64..300) {
        let g = random_small_network(seed, 9);
        let od = oracle::random_od(&g, seed, bin());
        let cache = PathCache::build(&g, &RoutingOptions::default(), &Sequential);
        let m = bin_metrics(&g, &od, &cache, &topo_metrics(&g, &Sequential), PassCounting::FullFlow).unwrap();
        for x in &m {
            prop_assert!(x.importance >= 0.0 && x.importance <= 3.0 + 1e-12);
            prop_assert!(x.flow_betweenness >= 0.0);
        }
    }

    #[test]
    fn short_delay_non_decreasing(seed in 0u64..200, target in 0usize..7) {
        let g = cross7();
        let od = oracle::random_od(&g, seed, bin());
        let cache = PathCache::build(&g, &RoutingOptions::default(), &Sequential);
        let station = g.station_ids().nth(target).unwrap();
        let mut last = None;
        let mut affected = 0;
        for delay in [0.0, 5.0, 10.0, 20.0, 40.0, 60.0] {
            let d = Disruption::new([station], delay, bin()).unwrap();
            let r = psi_short(&g, &od, &cache, &d, DEFAULT_THRESHOLD).unwrap();
            affected = r.affected_pairs;
            if let Some(prev) = last {
                if affected > 0 { prop_assert!(r.value > prev) } else { prop_assert_eq!(r.value, prev) }
            }
            last = Some(r.value);
        }
        let _ = affected;
    }

    #[test]
    fn skipping_keeps_the_removal_set(seed in 0u64..100, order in prop::collection::vec(0usize..10, 1..12)) {
        let g = random_small_network(seed, 10);
        let ids: Vec<StationId> = g.station_ids().collect();
        let plan: Vec<Removal> = order.iter().map(|&i| Removal::Stations(vec![ids[i % ids.len()]])).collect();
        let od = oracle::random_od(&g, seed, bin());
        let curve = run_removals("p", &g, &od, &RoutingOptions::default(), &plan, None, &Sequential).unwrap();
        let mut naive: Vec<StationId> = Vec::new();
        let mut step = 0;
        for r in &plan {
            let Removal::Stations(s) = r else { unreachable!() };
            if naive.contains(&s[0]) { continue; }
            naive.push(s[0]);
            step += 1;
            if step >= curve.len() { break; }
            let mut want = naive.clone();
            want.sort();
            prop_assert_eq!(curve.cumulative_stations(step), want);
        }
    }

    #[test]
    fn removal_keeps_ids_stable(seed in 0u64..200, pick in 0usize..10) {
        let g = random_small_network(seed, 10);
        let ids: Vec<StationId> = g.station_ids().collect();
        let gone = ids[pick % ids.len()];
        let h = g.remove_stations(&[gone]).unwrap();
        prop_assert_eq!(h.station_count(), g.station_count() - 1);
        prop_assert!(!h.contains(gone));
        for s in h.stations() {
            prop_assert_eq!(&g.station(s.id).unwrap().name, &s.name);
        }
        prop_assert!(h.edges().iter().all(|e| e.a != gone && e.b != gone));
    }
}
