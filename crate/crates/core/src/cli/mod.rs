//! Orchestration behind the `qpcascade` binary.

pub mod commands;
pub mod config;
pub mod diagram;
pub mod table;

pub use commands::{cmd_cascade, cmd_delta1, cmd_diagram, cmd_selfsim, cmd_slopes, CommandReport};
pub use config::{RunConfig, Window};
pub use diagram::{compute_diagram, label_agreement, DiagramRaster};
pub use table::{Cell, Table};
