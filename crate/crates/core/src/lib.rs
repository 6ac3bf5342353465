//! Demand-weighted station importance and vulnerability analysis for urban
//! rail transit networks.
//!
//! The crate is `no_std` (with `alloc`). Everything here is a pure function of
//! its inputs: file formats, the command line and thread pools live in the
//! `railvuln` companion crate, which plugs a parallel [`Executor`] into the
//! heavy entry points.
//!
//! Module map:
//!
//! * [`network`]: station graph, line membership, transfer arcs, removals.
//! * [`demand`]: trip records, time bins, OD matrices and synthetic demand.
//! * [`routing`]: k shortest loopless paths, reasonable paths and the
//!   all-pairs [`PathCache`](routing::PathCache).
//! * [`metrics`]: flow-weighted degree, flow betweenness, demand closeness,
//!   the accessibility importance index and line aggregates.
//! * [`vulnerability`]: short-delay burden and long-delay operational
//!   efficiency.
//! * [`sim`]: deliberate-attack campaigns producing vulnerability curves.
//! * [`curves`]: importance time series, slope clustering, rank frequency
//!   and Kendall's tau-b.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod curves;
pub mod demand;
pub mod exec;
pub mod fixtures;
pub mod metrics;
pub mod network;
pub mod routing;
pub mod sim;
mod units;
pub mod vulnerability;

pub use exec::{Executor, Sequential};
pub use network::{LineId, StationGraph, StationId};
pub use units::{Minutes, Timestamp};
