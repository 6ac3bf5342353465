use std::fs;
use std::path::Path;

use railvuln::config::RunConfig;
use railvuln::formats::{
    format_timestamp, load_network, load_or_build_cache, num, parse_timestamp, read_afc, read_stations, write_afc,
    write_network, CacheStatus, NetworkRecords, ProfileFile,
};
use railvuln::{Error, Pool};
use railvuln_core::demand::{generate_synthetic_demand, FlowDirection, TimeBin, TripRecord};
use railvuln_core::fixtures::{cross7, grid_network, GridSpec};
use railvuln_core::network::BuildOptions;
use railvuln_core::routing::RoutingOptions;
use railvuln_core::{StationId, Timestamp};

#[test]
fn timestamp_forms() {
    let t = parse_timestamp("2024-03-04T07:10:00").unwrap();
    assert_eq!(parse_timestamp("2024-03-04 07:10:00"), Some(t));
    assert_eq!(parse_timestamp("2024-03-04T07:10:00.000"), Some(t));
    assert_eq!(parse_timestamp("2024-03-04T07:10:00+08:00"), Some(t));
    assert_eq!(parse_timestamp("2024-03-04T07:10:00Z"), Some(t));
    assert_eq!(format_timestamp(t), "2024-03-04T07:10:00");
    assert_eq!(t.0 % 86_400, 7 * 3600 + 600);
    for bad in ["", "07:10", "2024-13-01T00:00:00", "yesterday"] {
        assert_eq!(parse_timestamp(bad), None, "{bad}");
    }
}

#[test]
fn numbers_print_plainly() {
    assert_eq!(num(0.1 + 0.2), "0.30000000000000004");
    assert_eq!(num(-0.0), "0");
    assert_eq!(num(f64::INFINITY), "inf");
    assert_eq!(num(170.0 / 42.0).parse::<f64>().unwrap(), 170.0 / 42.0);
    assert_eq!(num(1e-20), "0.00000000000000000001");
}

#[test]
fn network_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for g in [cross7(), grid_network(GridSpec { horizontal: 2, vertical: 3, stations: 60, seed: 3 })] {
        let files = write_network(&g, dir.path()).unwrap();
        let back = load_network(&files, &BuildOptions::default()).unwrap();
        assert_eq!(back.fingerprint(), g.fingerprint());
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.transfer_arcs(), g.transfer_arcs());
    }
}

#[test]
fn station_file_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("stations.csv");
    fs::write(&p, "id,name,lines\n1,a,A\nx,b,A\n").unwrap();
    match read_stations(&p) {
        Err(Error::Parse { line, message, .. }) => {
            assert_eq!(line, 3);
            assert!(message.contains("station id"));
        }
        other => panic!("{other:?}"),
    }
    fs::write(&p, "id,name\n1,a\n").unwrap();
    assert!(matches!(read_stations(&p), Err(Error::Parse { line: 1, .. })));
    fs::write(&p, "id,name,lines,is_transfer\n1,a,A|B,maybe\n").unwrap();
    assert!(matches!(read_stations(&p), Err(Error::Parse { line: 2, .. })));
    fs::write(&p, " id , name , lines \n 1 , a , A | B \n").unwrap();
    let s = read_stations(&p).unwrap();
    assert_eq!(s[0].lines, ["A", "B"]);
    assert_eq!(s[0].is_transfer, None);
}

#[test]
fn transfer_coverage_counts_defaults() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/cross7");
    let mut files = railvuln::formats::NetworkFiles {
        stations: dir.join("stations.csv"),
        edges: dir.join("edges.csv"),
        transfers: Some(dir.join("transfers.csv")),
    };
    assert_eq!(NetworkRecords::read(&files).unwrap().transfer_coverage(), (1, 0));
    files.transfers = None;
    let records = NetworkRecords::read(&files).unwrap();
    assert_eq!(records.transfer_coverage(), (1, 1));
    let g = records.build(&BuildOptions::default()).unwrap();
    assert_eq!(
        g.transfer_time(StationId(3), g.line_by_name("A").unwrap(), g.line_by_name("B").unwrap()).unwrap().as_f64(),
        5.0
    );
}

#[test]
fn afc_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("afc.csv");
    let trips = vec![
        TripRecord {
            entry_time: Timestamp(1_709_536_200),
            exit_time: Timestamp(1_709_536_920),
            origin: StationId(1),
            destination: StationId(6),
        },
        TripRecord {
            entry_time: Timestamp(0),
            exit_time: Timestamp(59),
            origin: StationId(5),
            destination: StationId(4),
        },
    ];
    write_afc(&p, &trips).unwrap();
    assert_eq!(read_afc(&p).unwrap(), trips);
}

#[test]
fn profile_conversion() {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/cross7/profile.json");
    let file = ProfileFile::read(&p).unwrap();
    let profile = file.to_profile().unwrap();
    assert_eq!(profile.bins.len(), 6);
    let midnight = railvuln::formats::midnight_of(file.date().unwrap());
    assert_eq!(profile.bins[0].bin, TimeBin::new(midnight.plus_minutes(300), 180));
    assert_eq!(profile.bins[0].direction, FlowDirection::Inbound);
    assert_eq!(profile.bins[1].direction, FlowDirection::Neutral);
    let trips = generate_synthetic_demand(&cross7(), &profile, 1, &Pool::new(Some(2)).unwrap()).unwrap();
    assert_eq!(trips.len(), 1200);

    let mut bad = file.clone();
    bad.bins[0].start = "5 o'clock".into();
    assert!(matches!(bad.to_profile(), Err(Error::Config(_))));
}

#[test]
fn cache_file_is_reused_only_when_it_matches() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cache.json");
    let pool = Pool::new(Some(2)).unwrap();
    let g = cross7();
    let opts = RoutingOptions::default();
    let (built, s) = load_or_build_cache(&g, &opts, Some(&p), &pool).unwrap();
    assert_eq!(s, CacheStatus::Built);
    let (loaded, s) = load_or_build_cache(&g, &opts, Some(&p), &pool).unwrap();
    assert_eq!(s, CacheStatus::Loaded);
    assert_eq!(loaded, built);

    let other = RoutingOptions { k: 2, ..opts };
    let (_, s) = load_or_build_cache(&g, &other, Some(&p), &pool).unwrap();
    assert_eq!(s, CacheStatus::Rebuilt);
    let smaller = g.remove_stations(&[StationId(7)]).unwrap();
    let (_, s) = load_or_build_cache(&smaller, &other, Some(&p), &pool).unwrap();
    assert_eq!(s, CacheStatus::Rebuilt);
}

#[test]
fn config_paths_resolve_from_its_directory() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/cross7");
    let c = RunConfig::load(&dir.join("config.json")).unwrap();
    assert_eq!(c.network.stations, dir.join("stations.csv"));
    assert_eq!(c.afc.as_deref(), Some(dir.join("afc.csv").as_path()));
    assert_eq!(c.output_dir, dir.join("out"));
    assert!(c.problems().is_empty(), "{:?}", c.problems());
    assert_eq!(c.tau_star, 60.0);
    assert_eq!(c.k, 8);
    assert_eq!(c.delays, [5.0, 10.0, 20.0, 40.0, 60.0]);
}

#[test]
fn config_problems() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("c.json");
    fs::write(&p, r#"{"k": 0, "tau_star": -1, "time_bins": {"first_hour": 9, "last_hour": 8}}"#).unwrap();
    let c = RunConfig::load(&p).unwrap();
    let problems = c.problems().join("\n");
    for needle in ["stations file", "edges file", "k must be", "tau_star", "time_bins"] {
        assert!(problems.contains(needle), "{needle} missing from {problems}");
    }
    fs::write(&p, r#"{"tau": 60}"#).unwrap();
    assert!(matches!(RunConfig::load(&p), Err(Error::Json { .. })));
    fs::write(&p, r#"{"split_rule": "proportional-direct", "direction_mode": "alternating", "clustering": {"linkage": "single"}}"#)
        .unwrap();
    let c = RunConfig::load(&p).unwrap();
    assert_eq!(c.routing().unwrap().split_rule, railvuln_core::routing::SplitRule::ProportionalDirect);
    assert_eq!(c.clustering.k, 4);
}

#[test]
fn pool_sizes() {
    assert_eq!(Pool::new(Some(3)).unwrap().workers(), 3);
    assert!(Pool::new(Some(0)).is_err());
    let pool = Pool::new(Some(4)).unwrap();
    let out = railvuln_core::Executor::map(&pool, 1000, |i| i * i);
    assert_eq!(out, (0..1000).map(|i| i * i).collect::<Vec<_>>());
}
