//! Orchestration of whole runs: single solves, convergence tables and
//! nuclear-charge scans, plus their CSV/JSON/SVG outputs.

mod config;
mod output;
mod pipeline;
mod svg;

pub use config::{default_box_radius, default_z_grid, BasisParams, OutputFormat, RunConfig, MAX_L};
pub use output::{
    format_convergence, read_zscan_csv, write_convergence, write_solve, write_zscan, write_zscan_csv, Metadata,
    CONVERGE_HEADER, SOLVE_HEADER, ZSCAN_HEADER,
};
pub use pipeline::{
    analyze_state, run_convergence, run_solve, run_zscan, solve_states, solve_with_box_policy, ConvergenceRow,
    ConvergenceTable, Diagnostics, OrbitalCheck, SolveReport, StateResult, Workspace, ZScanResult, ZScanRow,
    TRACE_TOLERANCE,
};
pub use svg::entropy_plot;
