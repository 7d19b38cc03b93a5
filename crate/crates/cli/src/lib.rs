//! Library half of the `maslov` command-line tool:
//!
//! - [`scenario`]: flat key=value scenario files with exact-rational fields;
//! - [`pipeline`]: the index-table → small-angle-witness → point-identity →
//!   Betti-replay composition with per-stage error attribution;
//! - [`report`]: deterministic machine- and human-readable renderings, with a
//!   parser for the machine format so reports round-trip;
//! - [`cache`]: a file-per-report store keyed by scenario hash, with embedded
//!   content hashes and atomic writes;
//! - [`expr`]: a small expression language for series arithmetic at the
//!   command line.

pub mod cache;
pub mod expr;
pub mod pipeline;
pub mod report;
pub mod scenario;

/// Version stamp baked into report metadata and cache keys, so caches from a
/// different toolkit build never collide.
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
