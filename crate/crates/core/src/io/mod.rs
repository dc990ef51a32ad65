//! JSON instance and solution files, metric CSVs and seeded generators.

mod format;
mod generate;
mod report;

pub use format::{
    load_instance, load_json, parse_instance, save_json, to_json, ChainSolutionFile, DarpSolutionFile, Instance,
    InstanceFile, IoError, TravelSpec, SCHEMA_VERSION,
};
pub use generate::{generate_chain, generate_darp, FleetMode, GeneratorParams};
pub use report::{write_histogram, write_metrics_dir, write_summary, SUMMARY_HEADER};
