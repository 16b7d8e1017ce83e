//! Core library for the mindforge literature-search workbench.
//!
//! The crate is organised around the creativity cycle of a mindmap-driven
//! search: a FreeMind map is parsed ([`mindmap`]), the neighbourhood of the
//! selected elements is turned into an expanded keyword query
//! ([`expansion`]), wrapped sources are scraped ([`wrapper`]) and searched
//! ([`orchestrator`]), hits are venue-normalised ([`cleaning`]) and
//! deduplicated ([`dedup`]), then grouped and written back into the map
//! ([`organizer`]).
//!
//! Data-parallel loops (catalog scans, per-block duplicate checks, term
//! counting) run on rayon when the `parallel` feature is enabled, which it is
//! by default. Every such entry point has a `*_with` variant taking an
//! [`Execution`] so both paths can be exercised from one build.

pub mod cleaning;
pub mod dedup;
pub mod error;
pub mod exec;
pub mod expansion;
pub mod mindmap;
pub mod orchestrator;
pub mod organizer;
pub mod record;
pub mod text;
pub mod wrapper;

pub use error::ErrorCode;
pub use exec::Execution;
pub use record::{PublicationRecord, VenueRef};
