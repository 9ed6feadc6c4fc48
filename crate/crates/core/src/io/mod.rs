//! Reading and writing instances, generators, SVG rendering and the
//! verify and bench reports behind the command line tool.

pub mod format;
pub mod generate;
pub mod report;
pub mod svg;

pub use format::{parse_instance, write_instance, write_result, Backend, FileConfig, InstanceFile, Scenario, SpawnKind};
