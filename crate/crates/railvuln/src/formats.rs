//! CSV and JSON file formats.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};

use railvuln_core::demand::{DemandProfile, FlowDirection, OdRule, ProfileBin, TimeBin, TripRecord};
use railvuln_core::network::{BuildOptions, EdgeRecord, StationRecord, TransferRecord};
use railvuln_core::routing::{PathCache, RoutingOptions};
use railvuln_core::{Executor, StationGraph, StationId, Timestamp};

use crate::error::{Error, Result};

const TIME_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

struct Table {
    path: PathBuf,
    reader: csv::Reader<File>,
    columns: Vec<Option<usize>>,
}

impl Table {
    /// Opens `path` and locates `required` then `optional` columns by header
    /// name.
    fn open(path: &Path, required: &[&str], optional: &[&str]) -> Result<Table> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).flexible(false).from_reader(file);
        let headers = reader.headers().map_err(|e| parse_error(path, 1, e.to_string()))?.clone();
        let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
        let mut columns = Vec::new();
        for name in required {
            match find(name) {
                Some(i) => columns.push(Some(i)),
                None => return Err(parse_error(path, 1, format!("missing column `{name}`"))),
            }
        }
        columns.extend(optional.iter().map(|n| find(n)));
        Ok(Table { path: path.to_path_buf(), reader, columns })
    }

    fn rows(&mut self) -> impl Iterator<Item = Result<Row>> + '_ {
        let path = self.path.clone();
        let columns = self.columns.clone();
        self.reader.records().map(move |rec| {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                parse_error(&path, line, e.to_string())
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            let fields = columns.iter().map(|c| c.and_then(|i| rec.get(i)).map(str::to_owned)).collect();
            Ok(Row { path: path.clone(), line, fields })
        })
    }
}

struct Row {
    path: PathBuf,
    line: u64,
    fields: Vec<Option<String>>,
}

impl Row {
    fn text(&self, i: usize) -> &str {
        self.fields[i].as_deref().unwrap_or("")
    }

    fn error(&self, message: String) -> Error {
        parse_error(&self.path, self.line, message)
    }

    fn station(&self, i: usize, what: &str) -> Result<StationId> {
        self.text(i).parse().map(StationId).map_err(|_| self.error(format!("bad {what} `{}`", self.text(i))))
    }

    fn minutes(&self, i: usize, what: &str) -> Result<f64> {
        match self.text(i).parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.error(format!("bad {what} `{}`", self.text(i)))),
        }
    }

    fn time(&self, i: usize, what: &str) -> Result<Timestamp> {
        parse_timestamp(self.text(i)).ok_or_else(|| self.error(format!("bad {what} `{}`", self.text(i))))
    }
}

fn parse_error(path: &Path, line: u64, message: String) -> Error {
    Error::Parse { path: path.to_path_buf(), line, message }
}

pub fn read_stations(path: &Path) -> Result<Vec<StationRecord>> {
    let mut table = Table::open(path, &["id", "name", "lines"], &["is_transfer"])?;
    let mut out = Vec::new();
    for row in table.rows() {
        let row = row?;
        let lines: Vec<String> =
            row.text(2).split('|').map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned).collect();
        let is_transfer = match row.text(3).to_ascii_lowercase().as_str() {
            "" => None,
            "1" | "true" | "yes" => Some(true),
            "0" | "false" | "no" => Some(false),
            other => return Err(row.error(format!("bad is_transfer `{other}`"))),
        };
        out.push(StationRecord { id: row.station(0, "station id")?, name: row.text(1).to_owned(), lines, is_transfer });
    }
    Ok(out)
}

pub fn read_edges(path: &Path) -> Result<Vec<EdgeRecord>> {
    let mut table = Table::open(path, &["from_id", "to_id", "line", "run_time_min"], &[])?;
    let mut out = Vec::new();
    for row in table.rows() {
        let row = row?;
        out.push(EdgeRecord {
            from: row.station(0, "from_id")?,
            to: row.station(1, "to_id")?,
            line: row.text(2).to_owned(),
            run_time: row.minutes(3, "run_time_min")?,
        });
    }
    Ok(out)
}

pub fn read_transfers(path: &Path) -> Result<Vec<TransferRecord>> {
    let mut table = Table::open(path, &["station_id", "from_line", "to_line", "transfer_time_min"], &[])?;
    let mut out = Vec::new();
    for row in table.rows() {
        let row = row?;
        out.push(TransferRecord {
            station: row.station(0, "station_id")?,
            from_line: row.text(1).to_owned(),
            to_line: row.text(2).to_owned(),
            transfer_time: row.minutes(3, "transfer_time_min")?,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkFiles {
    pub stations: PathBuf,
    pub edges: PathBuf,
    #[serde(default)]
    pub transfers: Option<PathBuf>,
}

/// Raw rows of the three network files.
pub struct NetworkRecords {
    pub stations: Vec<StationRecord>,
    pub edges: Vec<EdgeRecord>,
    pub transfers: Vec<TransferRecord>,
}

impl NetworkRecords {
    pub fn read(files: &NetworkFiles) -> Result<Self> {
        Ok(NetworkRecords {
            stations: read_stations(&files.stations)?,
            edges: read_edges(&files.edges)?,
            transfers: match &files.transfers {
                Some(p) => read_transfers(p)?,
                None => Vec::new(),
            },
        })
    }

    pub fn build(&self, options: &BuildOptions) -> Result<StationGraph> {
        Ok(StationGraph::build(&self.stations, &self.edges, &self.transfers, options)?)
    }

    /// Line pairs at multi-line stations, and how many of them have no
    /// transfer row and fall back to the default time.
    pub fn transfer_coverage(&self) -> (usize, usize) {
        let rows: BTreeSet<(StationId, &str, &str)> = self
            .transfers
            .iter()
            .flat_map(|t| {
                [
                    (t.station, t.from_line.as_str(), t.to_line.as_str()),
                    (t.station, t.to_line.as_str(), t.from_line.as_str()),
                ]
            })
            .collect();
        let (mut pairs, mut defaulted) = (0, 0);
        for s in &self.stations {
            for i in 0..s.lines.len() {
                for j in i + 1..s.lines.len() {
                    pairs += 1;
                    if !rows.contains(&(s.id, s.lines[i].as_str(), s.lines[j].as_str())) {
                        defaulted += 1;
                    }
                }
            }
        }
        (pairs, defaulted)
    }
}

pub fn load_network(files: &NetworkFiles, options: &BuildOptions) -> Result<StationGraph> {
    NetworkRecords::read(files)?.build(options)
}

pub fn write_network(g: &StationGraph, dir: &Path) -> Result<NetworkFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = NetworkFiles {
        stations: dir.join("stations.csv"),
        edges: dir.join("edges.csv"),
        transfers: Some(dir.join("transfers.csv")),
    };
    let mut w = CsvOut::create(&files.stations, &["id", "name", "lines", "is_transfer"])?;
    for s in g.stations() {
        let lines: Vec<&str> = s.lines.iter().map(|&l| g.line_name(l)).collect();
        w.row([s.id.to_string(), s.name.clone(), lines.join("|"), u8::from(s.is_transfer).to_string()])?;
    }
    w.finish()?;
    let mut w = CsvOut::create(&files.edges, &["from_id", "to_id", "line", "run_time_min"])?;
    for e in g.edges() {
        w.row([e.a.to_string(), e.b.to_string(), g.line_name(e.line).to_owned(), num(e.run_time.as_f64())])?;
    }
    w.finish()?;
    let mut w = CsvOut::create(
        files.transfers.as_ref().unwrap(),
        &["station_id", "from_line", "to_line", "transfer_time_min"],
    )?;
    for a in g.transfer_arcs() {
        w.row([
            a.station.to_string(),
            g.line_name(a.from_line).to_owned(),
            g.line_name(a.to_line).to_owned(),
            num(a.transfer_time.as_f64()),
        ])?;
    }
    w.finish()?;
    Ok(files)
}

/// Accepts `YYYY-MM-DDTHH:MM:SS` (or a space instead of `T`), optionally
/// with fractional seconds, and RFC 3339 with an offset. Offsets are
/// dropped: times are wall-clock times of the network.
pub fn parse_timestamp(s: &str) -> Option<Timestamp> {
    let naive = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f")
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S%.f"))
        .ok()
        .or_else(|| DateTime::parse_from_rfc3339(s).ok().map(|d| d.naive_local()))?;
    Some(Timestamp(naive.and_utc().timestamp()))
}

pub fn naive(t: Timestamp) -> NaiveDateTime {
    DateTime::from_timestamp(t.0, 0).expect("timestamp in range").naive_utc()
}

pub fn format_timestamp(t: Timestamp) -> String {
    naive(t).format(TIME_FORMAT).to_string()
}

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

pub fn midnight_of(date: NaiveDate) -> Timestamp {
    Timestamp(date.and_time(NaiveTime::MIN).and_utc().timestamp())
}

pub fn date_of(t: Timestamp) -> NaiveDate {
    naive(t).date()
}

pub fn read_afc(path: &Path) -> Result<Vec<TripRecord>> {
    let mut table = Table::open(path, &["entry_time", "exit_time", "origin_id", "destination_id"], &[])?;
    let mut out = Vec::new();
    for row in table.rows() {
        let row = row?;
        out.push(TripRecord {
            entry_time: row.time(0, "entry_time")?,
            exit_time: row.time(1, "exit_time")?,
            origin: row.station(2, "origin_id")?,
            destination: row.station(3, "destination_id")?,
        });
    }
    Ok(out)
}

pub fn write_afc(path: &Path, records: &[TripRecord]) -> Result<()> {
    let mut w = CsvOut::create(path, &["entry_time", "exit_time", "origin_id", "destination_id"])?;
    for r in records {
        w.row([
            format_timestamp(r.entry_time),
            format_timestamp(r.exit_time),
            r.origin.to_string(),
            r.destination.to_string(),
        ])?;
    }
    w.finish()
}

/// Synthetic demand profile as stored on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    /// `YYYY-MM-DD`.
    pub date: String,
    pub bins: Vec<ProfileBinFile>,
    pub rule: OdRule,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileBinFile {
    /// `HH:MM`.
    pub start: String,
    pub minutes: u32,
    pub trips: u64,
    #[serde(default)]
    pub direction: FlowDirection,
}

impl ProfileFile {
    pub fn read(path: &Path) -> Result<Self> {
        read_json(path)
    }

    pub fn to_profile(&self) -> Result<DemandProfile> {
        let date = parse_date(&self.date).ok_or_else(|| Error::Config(format!("bad profile date `{}`", self.date)))?;
        let midnight = midnight_of(date);
        let mut bins = Vec::new();
        for b in &self.bins {
            let t = NaiveTime::parse_from_str(&b.start, "%H:%M")
                .map_err(|_| Error::Config(format!("bad bin start `{}`", b.start)))?;
            let start = midnight.plus_seconds(i64::from(t.num_seconds_from_midnight()));
            bins.push(ProfileBin { bin: TimeBin::new(start, b.minutes), total: b.trips, direction: b.direction });
        }
        Ok(DemandProfile { bins, rule: self.rule.clone() })
    }

    pub fn date(&self) -> Option<NaiveDate> {
        parse_date(&self.date)
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Built,
    Loaded,
    /// The file was for another network or options and has been replaced.
    Rebuilt,
}

/// Reads the cache at `path` when it was built for `g` and `options`,
/// otherwise builds one and writes it there.
pub fn load_or_build_cache<E: Executor>(
    g: &StationGraph,
    options: &RoutingOptions,
    path: Option<&Path>,
    exec: &E,
) -> Result<(PathCache, CacheStatus)> {
    let Some(path) = path else {
        return Ok((PathCache::build(g, options, exec), CacheStatus::Built));
    };
    let mut status = CacheStatus::Built;
    if path.exists() {
        let cache: PathCache = read_json(path)?;
        if cache.matches(g, options) && cache.pair_count() > 0 {
            return Ok((cache, CacheStatus::Loaded));
        }
        status = CacheStatus::Rebuilt;
    }
    let cache = PathCache::build(g, options, exec);
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, &cache).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok((cache, status))
}

/// Buffered CSV output with a header row.
pub struct CsvOut {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvOut {
    pub fn create(path: &Path, header: &[&str]) -> Result<CsvOut> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(file));
        writer.write_record(header)?;
        Ok(CsvOut { path: path.to_path_buf(), writer })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        Ok(self.writer.write_record(fields)?)
    }

    pub fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Shortest decimal that reads back to the same value; `inf` for infinity
/// and a plain `0` for either zero.
pub fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if v == 0.0 {
        "0".into()
    } else {
        format!("{v}")
    }
}

/// Station names by id, for report columns.
pub fn station_names(g: &StationGraph) -> BTreeMap<StationId, String> {
    g.stations().iter().map(|s| (s.id, s.name.clone())).collect()
}
