use std::path::Path;

use anyhow::{Context, Result};

use crate::config::{to_manifest, ExperimentSpec};

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_manifest(spec: &ExperimentSpec) -> Result<()> {
    write_file(&spec.out.join("manifest.toml"), &to_manifest(spec))
}

pub fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("starting worker pool")
}

/// Least-squares slope of `log y` against `log x`; `None` unless every `y`
/// is positive and finite.
pub fn fitted_order(x: &[f64], y: &[f64]) -> Option<f64> {
    if y.len() < 2 || y.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return None;
    }
    Some(saltflow::estimates::growth_exponent(x, y))
}
