//! Command-line surface of the planner: problem ingestion, plan and front
//! computation, the benchmark harness and SVG rendering.

pub mod bench;
pub mod commands;
pub mod render;
pub mod report;
