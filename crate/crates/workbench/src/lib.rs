//! Service and command-line front end over `mindforge-core`.
//!
//! [`service::Workbench`] holds the loaded map, sources and search sessions;
//! [`api::router`] exposes it over HTTP as JSON.

pub mod api;
pub mod cli;
pub mod config;
pub mod http;
pub mod service;

pub use config::ServiceConfig;
pub use service::{ServiceError, Workbench};
