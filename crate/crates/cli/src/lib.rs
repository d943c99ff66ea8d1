//! Command-line front end: channel files, region CSVs and the `dmic`
//! commands.

pub mod commands;
pub mod error;
pub mod formats;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
pub use formats::{
    emit_region_csv, parse_channel_spec, parse_channel_str, parse_region_csv, region_to_csv,
    ChannelSpecFile, MapFile,
};
