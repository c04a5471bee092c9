//! Batch front end: system files in, text report and CSV samples out.

mod report;
mod spec;

pub use report::{
    analyzer_config, exit_code, remediation, render_csv, render_report, run_report, sample_grid,
    CsvRow, RunOptions, RunOutput, CSV_HEADER,
};
pub use spec::{
    parse_rational, parse_spec, ParsedSpec, SpecOptions, SystemSpecFile, EMPTY_SYSTEM_WARNING,
};
