//! File formats: CSV noise curves and response tables, the flat TOML
//! detector config, and JSON reports.

mod config;
mod curve;
mod report;

pub use config::{config_from_str, config_hash, config_to_string, read_config, write_config, CONFIG_KEYS};
pub use curve::{
    breakdown_to_csv, curve_to_csv, parse_curve, read_curve, read_curve_file, response_to_csv, write_breakdown,
    write_curve, CurveFileHeader,
};
pub use report::{
    breakdown_metadata, phases_to_json, report_to_json, report_to_text, write_text, BreakdownMetadata,
    SCHEMA_VERSION,
};
