//! Run configuration shared by the CLI and the long-running audits.

use std::path::PathBuf;

/// Output rendering for reports and tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Knobs every subcommand understands. Reports are pure functions of their
/// inputs plus this configuration; nothing time- or host-dependent leaks in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Default upper bound for scans.
    pub scan_bound: usize,
    /// Ceiling for exact sieve allocation.
    pub memory_budget_bytes: u64,
    /// Ceiling for full-mode weighted-sum evaluation.
    pub op_budget: u64,
    /// Sieve cache directory; created on demand.
    pub cache_dir: PathBuf,
    pub format: Format,
    /// Worker count for partitionable kernels.
    pub jobs: usize,
}

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_ENV: &str = "TAU_CACHE_DIR";

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scan_bound: 100_000,
            memory_budget_bytes: 4 << 30,
            op_budget: 2_000_000_000,
            cache_dir: default_cache_dir(),
            format: Format::Text,
            jobs: 1,
        }
    }
}

/// `TAU_CACHE_DIR` if set, else `.tau-cache` under the working directory.
pub fn default_cache_dir() -> PathBuf {
    match std::env::var_os(CACHE_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(".tau-cache"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_positive() {
        let c = RunConfig::default();
        assert!(c.scan_bound > 0);
        assert!(c.memory_budget_bytes > 0);
        assert!(c.op_budget > 0);
        assert!(c.jobs > 0);
    }
}
