//! Configuration-driven front end for the fragmentation solver: strict TOML
//! parsing, single runs, mesh-refinement studies, deterministic CSV/JSON
//! rendering, and a brute-force pre-flight check.

pub mod config;
pub mod output;
pub mod seed_check;
pub mod single;
pub mod study;

pub use config::{parse_config, ConfigFile, Mode, ParsedConfig};
pub use single::{run_single, SingleOutcome};
pub use study::{run_study, StudyOutcome};
