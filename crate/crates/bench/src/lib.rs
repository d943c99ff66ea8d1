//! Fixtures shared by the benchmarks.

use dmic_core::{builtin, Dmic, OptimizerConfig};

/// Channels exercised by every benchmark, with display names.
pub fn channels() -> Vec<(&'static str, Dmic)> {
    vec![
        ("example2", builtin::example2(0.1).expect("valid parameter")),
        ("example5", builtin::example5()),
    ]
}

/// A coarser configuration so that one iteration stays well under a second.
pub fn bench_config() -> OptimizerConfig {
    OptimizerConfig {
        grid_step: 0.05,
        ..OptimizerConfig::default()
    }
}
