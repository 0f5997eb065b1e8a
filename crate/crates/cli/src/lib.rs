//! Driver for the `bihns` command line tool.
//!
//! Exit codes: `0` when every enabled check passes, `1` when a check fails,
//! `2` for a rejected configuration (nothing is written) and `3` for a
//! runtime error (an `error.json` record is written).

pub mod config;
pub mod run;

use std::path::Path;

use config::{load_config, ConfigError, Mode, Overrides};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_INVALID_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_VAR: &str = "BIHNS_THREADS";

/// Parse `BIHNS_THREADS`; `None` when unset.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, ConfigError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError::Invalid(format!(
                "{THREADS_VAR} must be a positive integer (got {v:?})"
            ))),
        },
    }
}

/// Load, run and emit. Diagnostics go to stderr, the check lines to stdout.
pub fn main_with(mode: Mode, config: &Path, overrides: &Overrides) -> i32 {
    let cfg = match load_config(config, mode, overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID_CONFIG;
        }
    };
    let report = match run::execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            if let Err(io) = run::emit_error(&cfg, &e) {
                eprintln!("error: could not write error record: {io}");
            }
            return EXIT_RUNTIME;
        }
    };
    if let Err(e) = run::emit(&cfg, &report) {
        eprintln!("error: writing artifacts to {}: {e}", cfg.out.display());
        return EXIT_RUNTIME;
    }
    for c in &report.checks {
        println!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if report.passed() {
        EXIT_PASS
    } else {
        EXIT_CHECKS_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_cap_parsing() {
        assert_eq!(thread_cap(None).unwrap(), None);
        assert_eq!(thread_cap(Some("4")).unwrap(), Some(4));
        assert!(thread_cap(Some("0")).is_err());
        assert!(thread_cap(Some("many")).is_err());
    }
}
