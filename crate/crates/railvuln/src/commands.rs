//! The work behind each subcommand. Every function reads its inputs from a
//! [`RunConfig`] and writes its files under `output_dir`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use railvuln_core::curves::{cluster_curves, cluster_means, rank_frequency, Clustering, ImportanceSeries, Linkage};
use railvuln_core::demand::{
    bin_trips, day_bins, generate_synthetic_demand, BinningReport, ODMatrix, TimeBin, TripRecord,
};
use railvuln_core::metrics::{
    bin_metrics, importance_all, line_importance, rank_by_importance, rank_lines, topo_metrics, Closeness,
    StationMetrics, TopoMetrics,
};
use railvuln_core::routing::PathCache;
use railvuln_core::sim::{
    rank_adjacent_pairs, run_plan, scores_from_metrics, AttackKind, AttackPlan, Direction, VulnerabilityCurve,
};
use railvuln_core::vulnerability::{psi_short, Disruption, VulnerabilityRecord};
use railvuln_core::{Executor, LineId, StationGraph, StationId};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::formats::{
    date_of, format_timestamp, load_or_build_cache, midnight_of, num, parse_date, read_afc, station_names, write_afc,
    write_json, CacheStatus, CsvOut, NetworkRecords, ProfileFile,
};
use crate::pool::Pool;

pub fn load_graph(config: &RunConfig) -> Result<StationGraph> {
    NetworkRecords::read(&config.network)?.build(&config.build_options()?)
}

/// Trip records from the AFC file, or generated from the profile.
pub struct Trips {
    pub records: Vec<TripRecord>,
    /// Bins of the profile the trips were drawn from.
    pub profile_bins: Option<Vec<TimeBin>>,
    pub profile_date: Option<NaiveDate>,
    /// Trips dropped for naming a station missing from the network.
    pub unknown_station: usize,
}

pub fn load_trips(config: &RunConfig, g: &StationGraph, pool: &Pool) -> Result<Trips> {
    let (records, profile_bins, profile_date) = if let Some(afc) = &config.afc {
        (read_afc(afc)?, None, None)
    } else if let Some(path) = &config.profile {
        let file = ProfileFile::read(path)?;
        let profile = file.to_profile()?;
        let records = generate_synthetic_demand(g, &profile, config.seed, pool)?;
        (records, Some(profile.bins.iter().map(|b| b.bin).collect()), file.date())
    } else {
        return Err(Error::Config("no demand source: set `afc` or `profile`".into()));
    };
    let before = records.len();
    let records: Vec<TripRecord> =
        records.into_iter().filter(|r| g.contains(r.origin) && g.contains(r.destination)).collect();
    Ok(Trips { unknown_station: before - records.len(), records, profile_bins, profile_date })
}

impl Trips {
    /// The analysed day: configured, else the profile date, else the day of
    /// the earliest trip.
    pub fn day(&self, config: &RunConfig) -> Result<NaiveDate> {
        if let Some(d) = &config.time_bins.date {
            return parse_date(d).ok_or_else(|| Error::Config(format!("bad date `{d}`")));
        }
        self.profile_date
            .or_else(|| self.records.iter().map(|r| r.entry_time).min().map(date_of))
            .ok_or_else(|| Error::Config("no trips and no `time_bins.date` to place the bins".into()))
    }

    pub fn bins(&self, config: &RunConfig) -> Result<Vec<TimeBin>> {
        if config.time_bins.date.is_none() {
            if let Some(b) = &self.profile_bins {
                let mut b = b.clone();
                b.sort();
                return Ok(b);
            }
        }
        Ok(layout_bins(config, self.day(config)?))
    }
}

fn layout_bins(config: &RunConfig, day: NaiveDate) -> Vec<TimeBin> {
    let l = &config.time_bins;
    day_bins(midnight_of(day), l.first_hour, l.last_hour, l.hours)
}

pub struct Demand {
    pub matrices: Vec<ODMatrix>,
    pub report: BinningReport,
    pub unknown_station: usize,
}

pub fn load_demand(config: &RunConfig, g: &StationGraph, pool: &Pool) -> Result<Demand> {
    let trips = load_trips(config, g, pool)?;
    let bins = trips.bins(config)?;
    let (matrices, report) = bin_trips(&trips.records, &bins)?;
    Ok(Demand { matrices, report, unknown_station: trips.unknown_station })
}

fn output_dir(config: &RunConfig) -> Result<&Path> {
    let dir = config.output_dir.as_path();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir)
}

fn cache_for(config: &RunConfig, g: &StationGraph, pool: &Pool) -> Result<(PathCache, CacheStatus)> {
    load_or_build_cache(g, &config.routing()?, config.cache.as_deref(), pool)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub problems: Vec<String>,
    /// `key: value` facts about the inputs.
    pub facts: Vec<(String, String)>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.problems.is_empty()
    }

    fn fact(&mut self, key: &str, value: impl ToString) {
        self.facts.push((key.into(), value.to_string()));
    }
}

/// Loads every input without computing anything.
pub fn validate(config: &RunConfig) -> ValidationReport {
    let mut report = ValidationReport { problems: config.problems(), facts: Vec::new() };
    if !report.problems.is_empty() {
        return report;
    }
    let records = match NetworkRecords::read(&config.network) {
        Ok(r) => r,
        Err(e) => {
            report.problems.push(e.to_string());
            return report;
        }
    };
    let options = match config.build_options() {
        Ok(o) => o,
        Err(e) => {
            report.problems.push(e.to_string());
            return report;
        }
    };
    let g = match records.build(&options) {
        Ok(g) => g,
        Err(Error::Network(railvuln_core::network::NetworkError::Invalid(issues))) => {
            report.problems.extend(issues.iter().map(ToString::to_string));
            return report;
        }
        Err(e) => {
            report.problems.push(e.to_string());
            return report;
        }
    };
    report.fact("stations", g.station_count());
    report.fact("edges", g.edges().len());
    report.fact("lines", g.lines().len());
    report.fact("transfer_stations", g.transfer_station_count());
    report.fact("components", g.component_count());
    let (pairs, defaulted) = records.transfer_coverage();
    report.fact("transfer_line_pairs", pairs);
    report.fact("transfer_pairs_defaulted", defaulted);

    if config.afc.is_some() || config.profile.is_some() {
        let pool = Pool::new(Some(1)).expect("single worker pool");
        match load_trips(config, &g, &pool).and_then(|t| {
            let bins = t.bins(config)?;
            let (_, binning) = bin_trips(&t.records, &bins)?;
            Ok((t, bins, binning))
        }) {
            Ok((trips, bins, binning)) => {
                report.fact("trips", trips.records.len() + trips.unknown_station);
                report.fact("bins", bins.len());
                report.fact("assigned", binning.assigned);
                report.fact("dropped", binning.dropped() + trips.unknown_station);
                report.fact("dropped_out_of_range", binning.out_of_range);
                report.fact("dropped_same_station", binning.same_station);
                report.fact("dropped_invalid_times", binning.invalid_times);
                report.fact("dropped_unknown_station", trips.unknown_station);
            }
            Err(e) => report.problems.push(e.to_string()),
        }
    }
    report
}

/// Metrics of every bin, plus the per-station series across bins.
pub struct ImportanceRun {
    pub bins: Vec<TimeBin>,
    pub metrics: Vec<Vec<StationMetrics>>,
    pub series: Vec<ImportanceSeries>,
    pub demand: BinningReport,
    pub cache: CacheStatus,
}

pub fn compute_importance(config: &RunConfig, g: &StationGraph, pool: &Pool) -> Result<ImportanceRun> {
    let demand = load_demand(config, g, pool)?;
    let (cache, status) = cache_for(config, g, pool)?;
    let topo = topo_metrics(g, pool);
    let metrics: Vec<Vec<StationMetrics>> = demand
        .matrices
        .iter()
        .map(|od| bin_metrics(g, od, &cache, &topo, config.pass_counting))
        .collect::<Result<_, _>>()?;
    let bins: Vec<TimeBin> = demand.matrices.iter().map(|m| m.bin).collect();
    let series = g
        .station_ids()
        .enumerate()
        .map(|(i, station)| ImportanceSeries {
            station,
            samples: bins.iter().zip(&metrics).map(|(&b, m)| (b, m[i].importance)).collect(),
        })
        .collect();
    Ok(ImportanceRun { bins, metrics, series, demand: demand.report, cache: status })
}

fn closeness(c: Closeness) -> String {
    match c {
        Closeness::Finite(v) => num(v),
        Closeness::Infinite => "inf".into(),
    }
}

pub fn importance(config: &RunConfig, pool: &Pool) -> Result<ImportanceRun> {
    let g = load_graph(config)?;
    let run = compute_importance(config, &g, pool)?;
    let dir = output_dir(config)?;
    let names = station_names(&g);

    let mut w = CsvOut::create(
        &dir.join("station_metrics.csv"),
        &[
            "bin_start",
            "station_id",
            "station_name",
            "weighted_degree",
            "flow_betweenness",
            "demand_closeness",
            "topo_degree",
            "topo_betweenness",
            "importance",
        ],
    )?;
    for (bin, metrics) in run.bins.iter().zip(&run.metrics) {
        let start = format_timestamp(bin.start);
        for m in metrics {
            w.row([
                start.clone(),
                m.station.to_string(),
                names[&m.station].clone(),
                num(m.weighted_degree),
                num(m.flow_betweenness),
                closeness(m.demand_closeness),
                m.topo_degree.to_string(),
                num(m.topo_betweenness),
                num(m.importance),
            ])?;
        }
    }
    w.finish()?;

    let mut header = vec!["station_id".to_string()];
    header.extend(run.bins.iter().map(|b| format_timestamp(b.start)));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut w = CsvOut::create(&dir.join("importance_series.csv"), &header)?;
    for s in &run.series {
        w.row(std::iter::once(s.station.to_string()).chain(s.values().into_iter().map(num)))?;
    }
    w.finish()?;

    let mut w =
        CsvOut::create(&dir.join("ranking.csv"), &["bin_start", "rank", "station_id", "station_name", "importance"])?;
    for (bin, metrics) in run.bins.iter().zip(&run.metrics) {
        let start = format_timestamp(bin.start);
        let by_id: BTreeMap<StationId, f64> = metrics.iter().map(|m| (m.station, m.importance)).collect();
        for (rank, s) in rank_by_importance(metrics).into_iter().take(config.top_m).enumerate() {
            w.row([start.clone(), (rank + 1).to_string(), s.to_string(), names[&s].clone(), num(by_id[&s])])?;
        }
    }
    w.finish()?;

    let mut w = CsvOut::create(
        &dir.join("line_importance.csv"),
        &[
            "bin_start",
            "rank",
            "line",
            "stations",
            "mean_importance",
            "mean_betweenness",
            "mean_closeness",
            "total_degree",
        ],
    )?;
    for (bin, metrics) in run.bins.iter().zip(&run.metrics) {
        let start = format_timestamp(bin.start);
        let aggregates = line_importance(metrics, &g);
        for (rank, line) in rank_lines(&aggregates).into_iter().enumerate() {
            let a = aggregates.iter().find(|a| a.line == line).unwrap();
            w.row([
                start.clone(),
                (rank + 1).to_string(),
                g.line_name(line).to_owned(),
                a.stations.to_string(),
                num(a.mean_importance),
                num(a.mean_betweenness),
                closeness(a.mean_closeness),
                num(a.total_degree),
            ])?;
        }
    }
    w.finish()?;
    Ok(run)
}

#[derive(Serialize)]
struct DendrogramFile<'a> {
    linkage: Linkage,
    /// Leaf `i` is station `leaves[i]`.
    leaves: Vec<StationId>,
    merges: &'a [railvuln_core::curves::Merge],
    clusters: usize,
}

pub fn cluster(config: &RunConfig, pool: &Pool) -> Result<Clustering> {
    let g = load_graph(config)?;
    let run = compute_importance(config, &g, pool)?;
    let clustering = cluster_curves(&run.series, config.clustering.k, config.clustering.linkage, pool)?;
    let dir = output_dir(config)?;

    let mut w = CsvOut::create(&dir.join("clusters.csv"), &["station_id", "cluster"])?;
    for a in &clustering.assignments {
        w.row([a.station.to_string(), a.cluster.to_string()])?;
    }
    w.finish()?;

    write_json(
        &dir.join("dendrogram.json"),
        &DendrogramFile {
            linkage: config.clustering.linkage,
            leaves: run.series.iter().map(|s| s.station).collect(),
            merges: &clustering.dendrogram,
            clusters: clustering.clusters,
        },
    )?;

    let mut header = vec!["cluster".to_string(), "size".to_string()];
    header.extend(run.bins.iter().map(|b| format_timestamp(b.start)));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut w = CsvOut::create(&dir.join("cluster_means.csv"), &header)?;
    for (i, mean) in cluster_means(&run.series, &clustering).into_iter().enumerate() {
        let size = clustering.assignments.iter().filter(|a| a.cluster == i + 1).count();
        w.row([(i + 1).to_string(), size.to_string()].into_iter().chain(mean.into_iter().map(num)))?;
    }
    w.finish()?;
    Ok(clustering)
}

/// Short-delay burden of every target station under every delay, per bin.
pub fn short_delay(
    config: &RunConfig,
    targets: Option<&[StationId]>,
    delays: Option<&[f64]>,
    pool: &Pool,
) -> Result<Vec<VulnerabilityRecord>> {
    let delays = delays.unwrap_or(&config.delays);
    if delays.is_empty() {
        return Err(Error::Config("no delays given".into()));
    }
    if let Some(&d) = delays.iter().find(|&&d| !(d.is_finite() && d >= 0.0)) {
        return Err(Error::Config(format!("bad delay {d}")));
    }
    if let Some(&d) = delays.iter().find(|&&d| d > config.tau_star) {
        return Err(Error::DelayAboveThreshold { delay: d, threshold: config.tau_star });
    }
    let g = load_graph(config)?;
    let targets: Vec<StationId> = match targets {
        Some(t) => {
            if let Some(&s) = t.iter().find(|&&s| !g.contains(s)) {
                return Err(Error::Config(format!("unknown target station {s}")));
            }
            t.to_vec()
        }
        None => g.station_ids().collect(),
    };
    let demand = load_demand(config, &g, pool)?;
    let (cache, _) = cache_for(config, &g, pool)?;

    let jobs: Vec<(usize, StationId)> =
        (0..demand.matrices.len()).flat_map(|b| targets.iter().map(move |&t| (b, t))).collect();
    let rows = pool.map(jobs.len(), |j| {
        let (b, t) = jobs[j];
        let od = &demand.matrices[b];
        delays
            .iter()
            .map(|&delay| {
                let d = Disruption::new([t], delay, od.bin)?;
                let r = psi_short(&g, od, &cache, &d, config.tau_star)?;
                Ok(VulnerabilityRecord::short(format!("station-{t}"), &d, &r))
            })
            .collect::<Result<Vec<_>, railvuln_core::vulnerability::VulnerabilityError>>()
    });
    let rows: Vec<Vec<VulnerabilityRecord>> = rows.into_iter().collect::<Result<_, _>>()?;

    let dir = output_dir(config)?;
    let mut header = vec!["bin_start".to_string(), "target".to_string()];
    header.extend(delays.iter().map(|&d| num(d)));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut matrix = CsvOut::create(&dir.join("short_delay.csv"), &header)?;
    let mut long = CsvOut::create(
        &dir.join("short_delay_long.csv"),
        &["bin_start", "target", "delay", "psi_short", "affected_pairs"],
    )?;
    for (&(b, t), row) in jobs.iter().zip(&rows) {
        let start = format_timestamp(demand.matrices[b].bin.start);
        matrix.row([start.clone(), t.to_string()].into_iter().chain(row.iter().map(|r| num(r.value))))?;
        for r in row {
            long.row([start.clone(), t.to_string(), num(r.delay), num(r.value), r.affected_pairs.to_string()])?;
        }
    }
    matrix.finish()?;
    long.finish()?;
    let records: Vec<VulnerabilityRecord> = rows.into_iter().flatten().collect();
    write_json(&dir.join("short_delay_records.json"), &records)?;
    Ok(records)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanKind {
    SingleStation,
    WithinLineInterval,
    AdjacentInterval,
    CrossLineInterval,
    LineRemoval,
}

/// One plan of a campaign file. Unset orderings come from the importance
/// of the plan's bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub id: String,
    pub kind: PlanKind,
    /// Index into the day's bins.
    #[serde(default)]
    pub bin: usize,
    /// Removal events to record; all when absent.
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub stations: Option<Vec<StationId>>,
    #[serde(default)]
    pub lines: Option<Vec<String>>,
    #[serde(default)]
    pub pairs: Option<Vec<(StationId, StationId)>>,
    #[serde(default)]
    pub direction: Option<Direction>,
    #[serde(default)]
    pub width: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Campaign {
    pub plans: Vec<PlanSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub id: String,
    pub kind: PlanKind,
    pub bin_start: String,
    pub curve_file: String,
    pub baseline: f64,
    /// Recorded removal events after the baseline.
    pub steps: usize,
    pub final_psi_long: Option<f64>,
    pub largest_drop: Option<f64>,
    pub largest_drop_step: Option<usize>,
    pub exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub plans: Vec<PlanSummary>,
}

/// The biggest fall between consecutive recorded values and the step it
/// happened at; the earliest step wins a tie.
pub fn largest_drop(values: &[Option<f64>]) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for (i, w) in values.windows(2).enumerate() {
        if let (Some(a), Some(b)) = (w[0], w[1]) {
            let drop = a - b;
            if best.is_none_or(|(d, _)| drop > d) {
                best = Some((drop, i + 1));
            }
        }
    }
    best
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn resolve_lines(g: &StationGraph, names: &[String]) -> Result<Vec<LineId>> {
    names.iter().map(|n| g.line_by_name(n).ok_or_else(|| Error::Config(format!("unknown line `{n}`")))).collect()
}

fn resolve_plan(
    config: &RunConfig,
    g: &StationGraph,
    spec: &PlanSpec,
    bin: TimeBin,
    metrics: &[StationMetrics],
) -> Result<AttackPlan> {
    let line_order = || match &spec.lines {
        Some(names) => resolve_lines(g, names),
        None => Ok(rank_lines(&line_importance(metrics, g))),
    };
    let kind = match spec.kind {
        PlanKind::SingleStation => {
            AttackKind::SingleStation { ranking: spec.stations.clone().unwrap_or_else(|| rank_by_importance(metrics)) }
        }
        PlanKind::WithinLineInterval => AttackKind::WithinLineInterval {
            line_order: line_order()?,
            direction: spec.direction.unwrap_or(config.direction_mode),
        },
        PlanKind::AdjacentInterval => {
            AttackKind::AdjacentInterval { width: spec.width.unwrap_or(2), line_order: line_order()? }
        }
        PlanKind::CrossLineInterval => AttackKind::CrossLineInterval {
            pairs: spec.pairs.clone().unwrap_or_else(|| rank_adjacent_pairs(g, &scores_from_metrics(metrics))),
        },
        PlanKind::LineRemoval => AttackKind::LineRemoval { line_order: line_order()? },
    };
    Ok(AttackPlan { id: spec.id.clone(), kind, bin, max_steps: spec.steps })
}

fn write_curve(path: &Path, g: &StationGraph, curve: &VulnerabilityCurve) -> Result<()> {
    let mut w = CsvOut::create(path, &["plan_id", "step", "removed_ids", "removed_lines", "psi_long"])?;
    for s in &curve.steps {
        let ids: Vec<String> = curve.cumulative_stations(s.step).iter().map(ToString::to_string).collect();
        let lines: Vec<&str> = curve.cumulative_lines(s.step).into_iter().map(|l| g.line_name(l)).collect();
        let value = s.psi_long.map_or_else(|| "empty-graph".to_string(), num);
        w.row([curve.plan_id.clone(), s.step.to_string(), ids.join(";"), lines.join(";"), value])?;
    }
    w.finish()
}

/// Runs every plan of `campaign_file`. Each curve is written as soon as
/// its plan finishes; the summary follows the last plan.
pub fn simulate(config: &RunConfig, campaign_file: &Path, pool: &Pool) -> Result<CampaignSummary> {
    let campaign: Campaign = crate::formats::read_json(campaign_file)?;
    let mut seen = std::collections::BTreeSet::new();
    for p in &campaign.plans {
        if !valid_id(&p.id) {
            return Err(Error::Config(format!("plan id `{}` must use only letters, digits, `-` and `_`", p.id)));
        }
        if !seen.insert(p.id.as_str()) {
            return Err(Error::Config(format!("plan id `{}` is used twice", p.id)));
        }
    }
    let g = load_graph(config)?;
    let demand = load_demand(config, &g, pool)?;
    if let Some(p) = campaign.plans.iter().find(|p| p.bin >= demand.matrices.len()) {
        return Err(Error::Config(format!("plan `{}` asks for bin {} of {}", p.id, p.bin, demand.matrices.len())));
    }
    let options = config.routing()?;
    let (cache, _) = cache_for(config, &g, pool)?;
    let no_topo = TopoMetrics { stations: Vec::new(), degree: Vec::new(), betweenness: Vec::new() };
    let mut metrics: BTreeMap<usize, Vec<StationMetrics>> = BTreeMap::new();
    let dir = output_dir(config)?;

    let mut summary = CampaignSummary { plans: Vec::new() };
    for spec in &campaign.plans {
        let od = &demand.matrices[spec.bin];
        let m = match metrics.entry(spec.bin) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(bin_metrics(&g, od, &cache, &no_topo, config.pass_counting)?),
        };
        let plan = resolve_plan(config, &g, spec, od.bin, m)?;
        let curve = run_plan(&g, od, &options, &plan, &scores_from_metrics(m), pool)?;
        let file = format!("curve_{}.csv", spec.id);
        write_curve(&dir.join(&file), &g, &curve)?;
        let drop = largest_drop(&curve.values());
        summary.plans.push(PlanSummary {
            id: spec.id.clone(),
            kind: spec.kind,
            bin_start: format_timestamp(od.bin.start),
            curve_file: file,
            baseline: curve.baseline,
            steps: curve.len() - 1,
            final_psi_long: curve.final_value(),
            largest_drop: drop.map(|d| d.0),
            largest_drop_step: drop.map(|d| d.1),
            exhausted: curve.exhausted,
        });
    }
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Writes synthetic trips drawn from the configured profile.
pub fn gen_demand(config: &RunConfig, output: Option<&Path>, pool: &Pool) -> Result<(PathBuf, usize)> {
    let Some(path) = &config.profile else {
        return Err(Error::Config("gen-demand needs a `profile`".into()));
    };
    let g = load_graph(config)?;
    let profile = ProfileFile::read(path)?.to_profile()?;
    let trips = generate_synthetic_demand(&g, &profile, config.seed, pool)?;
    let out = match output {
        Some(p) => p.to_path_buf(),
        None => output_dir(config)?.join("afc.csv"),
    };
    write_afc(&out, &trips)?;
    Ok((out, trips.len()))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencyTables {
    pub weekday: Vec<(StationId, usize)>,
    pub weekend: Vec<(StationId, usize)>,
    pub all: Vec<(StationId, usize)>,
    pub days: usize,
}

/// How often each station reaches the top `top_m` of a bin, counted over
/// every bin of every day in the trips, split by weekday and weekend.
pub fn frequency(config: &RunConfig, pool: &Pool) -> Result<FrequencyTables> {
    let g = load_graph(config)?;
    let trips = load_trips(config, &g, pool)?;
    let (cache, _) = cache_for(config, &g, pool)?;
    let mut days: BTreeMap<NaiveDate, Vec<TripRecord>> = BTreeMap::new();
    for r in &trips.records {
        days.entry(date_of(r.entry_time)).or_default().push(*r);
    }
    let (mut weekday, mut weekend) = (Vec::new(), Vec::new());
    for (day, records) in &days {
        let (matrices, _) = bin_trips(records, &layout_bins(config, *day))?;
        for od in matrices.iter().filter(|m| !m.is_empty()) {
            let mut scored = importance_all(&g, od, &cache, config.pass_counting)?;
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let top: Vec<StationId> = scored.into_iter().take(config.top_m).map(|s| s.0).collect();
            if matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
                weekend.push(top);
            } else {
                weekday.push(top);
            }
        }
    }
    let all: Vec<Vec<StationId>> = weekday.iter().chain(&weekend).cloned().collect();
    let tables = FrequencyTables {
        weekday: rank_frequency(&weekday),
        weekend: rank_frequency(&weekend),
        all: rank_frequency(&all),
        days: days.len(),
    };
    let dir = output_dir(config)?;
    for (name, table) in [("weekday", &tables.weekday), ("weekend", &tables.weekend), ("all", &tables.all)] {
        let mut w = CsvOut::create(&dir.join(format!("frequency_{name}.csv")), &["station", "frequency"])?;
        for (s, n) in table {
            w.row([s.to_string(), n.to_string()])?;
        }
        w.finish()?;
    }
    Ok(tables)
}
