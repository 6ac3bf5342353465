//! Run configuration: one JSON file, overridable from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use railvuln_core::curves::Linkage;
use railvuln_core::metrics::PassCounting;
use railvuln_core::network::BuildOptions;
use railvuln_core::routing::{RoutingOptions, SplitRule};
use railvuln_core::sim::Direction;
use railvuln_core::vulnerability::{DEFAULT_THRESHOLD, DELAY_GRID};
use railvuln_core::Minutes;

use crate::error::{Error, Result};
use crate::formats::{parse_date, NetworkFiles};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub network: NetworkFiles,
    /// Trip records; takes precedence over `profile`.
    pub afc: Option<PathBuf>,
    /// Synthetic demand profile used when no AFC file is given.
    pub profile: Option<PathBuf>,
    /// Path cache file, reused when it matches the network and options.
    pub cache: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub time_bins: BinLayout,
    pub k: usize,
    pub epsilon_time: f64,
    pub split_rule: SplitRule,
    pub pass_counting: PassCounting,
    pub tau_star: f64,
    pub delays: Vec<f64>,
    pub direction_mode: Direction,
    pub clustering: ClusteringConfig,
    pub seed: u64,
    /// Worker threads; all cores when absent.
    pub workers: Option<usize>,
    pub top_m: usize,
    pub default_transfer_time: f64,
    pub allow_disconnected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BinLayout {
    /// Day to analyse, `YYYY-MM-DD`. Defaults to the profile date or the
    /// earliest trip in the AFC file.
    pub date: Option<String>,
    pub first_hour: u32,
    pub last_hour: u32,
    pub hours: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringConfig {
    pub k: usize,
    pub linkage: Linkage,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            network: NetworkFiles { stations: "stations.csv".into(), edges: "edges.csv".into(), transfers: None },
            afc: None,
            profile: None,
            cache: None,
            output_dir: "out".into(),
            time_bins: BinLayout::default(),
            k: RoutingOptions::default().k,
            epsilon_time: 0.0,
            split_rule: SplitRule::default(),
            pass_counting: PassCounting::default(),
            tau_star: DEFAULT_THRESHOLD,
            delays: DELAY_GRID.to_vec(),
            direction_mode: Direction::default(),
            clustering: ClusteringConfig::default(),
            seed: 1,
            workers: None,
            top_m: 15,
            default_transfer_time: 5.0,
            allow_disconnected: false,
        }
    }
}

impl Default for BinLayout {
    fn default() -> Self {
        BinLayout { date: None, first_hour: 5, last_hour: 23, hours: 3 }
    }
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig { k: 4, linkage: Linkage::default() }
    }
}

impl RunConfig {
    /// Reads `path`; relative paths inside it are taken from its directory.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let mut config: RunConfig = crate::formats::read_json(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        config.resolve(&base);
        Ok(config)
    }

    pub fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.network.stations);
        fix(&mut self.network.edges);
        for p in [&mut self.network.transfers, &mut self.afc, &mut self.profile, &mut self.cache].into_iter().flatten()
        {
            fix(p);
        }
        fix(&mut self.output_dir);
    }

    /// Every problem with the settings and referenced files.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut need = |label: &str, p: &Path| {
            if !p.is_file() {
                out.push(format!("{label} file {} does not exist", p.display()));
            }
        };
        need("stations", &self.network.stations);
        need("edges", &self.network.edges);
        if let Some(p) = &self.network.transfers {
            need("transfers", p);
        }
        if let Some(p) = &self.afc {
            need("afc", p);
        }
        if let Some(p) = &self.profile {
            need("profile", p);
        }
        if self.k < 1 {
            out.push("k must be at least 1".into());
        }
        if !(self.tau_star > 0.0 && self.tau_star.is_finite()) {
            out.push("tau_star must be positive".into());
        }
        if !(self.epsilon_time >= 0.0 && self.epsilon_time.is_finite()) {
            out.push("epsilon_time must be non-negative".into());
        }
        if !(self.default_transfer_time > 0.0 && self.default_transfer_time.is_finite()) {
            out.push("default_transfer_time must be positive".into());
        }
        if self.clustering.k < 1 {
            out.push("clustering.k must be at least 1".into());
        }
        if self.workers == Some(0) {
            out.push("workers must be at least 1".into());
        }
        let b = &self.time_bins;
        if b.hours == 0 || b.first_hour >= b.last_hour || b.last_hour > 24 {
            out.push("time_bins needs 0 <= first_hour < last_hour <= 24 and hours >= 1".into());
        }
        if let Some(d) = &b.date {
            if parse_date(d).is_none() {
                out.push(format!("time_bins.date `{d}` is not YYYY-MM-DD"));
            }
        }
        if self.delays.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            out.push("delays must be finite and non-negative".into());
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        match self.problems().first() {
            Some(p) => Err(Error::Config(p.clone())),
            None => Ok(()),
        }
    }

    pub fn routing(&self) -> Result<RoutingOptions> {
        let epsilon_time = Minutes::from_f64(self.epsilon_time)
            .ok_or_else(|| Error::Config(format!("bad epsilon_time {}", self.epsilon_time)))?;
        Ok(RoutingOptions { k: self.k, split_rule: self.split_rule, epsilon_time })
    }

    pub fn build_options(&self) -> Result<BuildOptions> {
        let t = Minutes::from_f64(self.default_transfer_time)
            .ok_or_else(|| Error::Config(format!("bad default_transfer_time {}", self.default_transfer_time)))?;
        Ok(BuildOptions { default_transfer_time: t, allow_disconnected: self.allow_disconnected })
    }
}
