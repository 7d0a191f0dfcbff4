//! Configuration ingestion and atomic JSON/CSV output.

pub mod config;
pub mod table;

pub use config::{config_hash, load_config, load_json, RunConfig};
pub use table::{read_table, write_json, write_table, OutputTable, Provenance};
