//! Verification harness for the `tcbm` library.
//!
//! The harness wires the library's statistical checks into a catalog of
//! named experiments, each of which verifies one or more quantitative
//! claims about time-changed Brownian motion (meeting-time laws, Green
//! bounds, resolvent Hölder regularity, ...).  Every claim in the catalog
//! is covered by exactly one experiment; the registry test enforces that.
//!
//! Outputs are deterministic given the seed: a JSON report plus one CSV
//! table per experiment.  Wall-clock timings are written to a separate
//! `timing.json` so the report artifacts themselves are bit-reproducible.

pub mod config;
pub mod experiments;
pub mod registry;
pub mod report;
