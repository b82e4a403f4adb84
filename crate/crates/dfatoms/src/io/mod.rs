//! Configuration documents, hypothesis checks, closed-form oracles and the
//! report format shared by the CLI and the C interface.

mod conditions;
mod config;
mod oracle;
mod report;
mod run;

pub use conditions::{threshold_factor, validate_conditions, Condition, HypothesisReport, REFERENCE_N_MAX, REFERENCE_Z_MAX};
pub use config::{
    parse_config, Format, GridSpec, Mode, NonrelShellEntry, OutputSpec, ProjectorChoice, ProjectorSpec, RunConfig,
    ShellEntry, CONFIG_SCHEMA,
};
pub use oracle::{oracle_sommerfeld, oracle_sommerfeld_shifted};
pub use report::{
    format_float, projectors_from_value, projectors_to_value, to_json_string, write_atomic, PROJECTOR_FORMAT,
    REPORT_FORMAT, REPORT_SCHEMA,
};
pub use run::{exit_code, run, run_document, RunOutput, DEFAULT_C_FACTORS};
