//! Scenario files, artifact writing and the `nfal` command implementations.

// `!(a < b)` comparisons are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundled;
pub mod error;
pub mod output;
pub mod run;
pub mod scenario;

use std::path::{Path, PathBuf};

pub use error::{CliError, Result};
pub use run::{execute, CheckResult, Mode, Outcome};
pub use scenario::{parse, Scenario};

/// Environment variable that overrides the output root.
pub const OUTPUT_ROOT_ENV: &str = "NFAL_OUTPUT_ROOT";
/// Output root used when neither the flag nor the environment sets one.
pub const DEFAULT_OUTPUT_ROOT: &str = "nfal-output";

/// Flag, then environment, then the default.
pub fn output_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUTPUT_ROOT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

/// Read a scenario from a file path, falling back to a bundled scenario name.
pub fn load(arg: &str) -> Result<Scenario> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse {
            path: arg.to_string(),
            message: format!("cannot read file: {e}"),
        })?;
        return parse(&text, arg);
    }
    match bundled::find(arg) {
        Some(text) => parse(text, &format!("bundled:{arg}")),
        None => Err(CliError::Parse {
            path: arg.to_string(),
            message: "no such file or bundled scenario (see `nfal list-scenarios`)".into(),
        }),
    }
}
