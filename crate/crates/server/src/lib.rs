//! HTTP API and command-line front end for `dlviz-core`.
//!
//! [`api::Service`] answers every endpoint as a JSON string; [`http`] wraps it
//! in an axum router and [`cli`] exposes the same payloads on stdout.

pub mod api;
pub mod cli;
pub mod config;
pub mod http;
