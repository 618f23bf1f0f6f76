use std::fmt::Write as _;

use anyhow::Result;

use saltflow::solver::{perturb_mode, stability_experiment, StabilityReport};

use crate::config::ExperimentSpec;
use crate::output::{write_file, write_manifest};

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityOutput {
    /// Runs for `δ`, `δ/shrink` and `0`, in that order.
    pub runs: Vec<(f64, StabilityReport)>,
    /// `|r(δ) - r(δ/shrink)| / r(δ)` for the amplification ratios `r`.
    pub agreement: Option<f64>,
}

/// Same-path runs from `X₀` and `X₀ + δ cos(m·x)`; writes `stability.csv`
/// and `stability_trace.csv`.
pub fn cmd_stability(spec: &ExperimentSpec) -> Result<StabilityOutput> {
    spec.check_command()?;
    std::fs::create_dir_all(&spec.out)?;
    write_manifest(spec)?;
    let cfg = spec.member(0)?;
    let st = &spec.stability;
    let x0 = cfg.initial_state()?;
    let mut runs = Vec::new();
    for delta in [st.delta, st.delta / st.shrink, 0.0] {
        let y0 = perturb_mode(&x0, st.mode, delta)?;
        runs.push((delta, stability_experiment(&cfg, &x0, &y0)?));
    }
    let agreement = match (runs[0].1.ratio, runs[1].1.ratio) {
        (Some(a), Some(b)) => Some((a - b).abs() / a),
        _ => None,
    };
    let mut s = String::from("delta,initial_distance,sup_distance,ratio,tau\n");
    for (d, r) in &runs {
        let ratio = r.ratio.map_or(String::new(), |v| v.to_string());
        let _ = writeln!(s, "{d},{},{},{ratio},{}", r.initial_distance, r.sup_distance, r.tau);
    }
    write_file(&spec.out.join("stability.csv"), &s)?;
    let mut t = String::from("t");
    for (d, _) in &runs {
        let _ = write!(t, ",distance_{d}");
    }
    t.push('\n');
    let len = runs.iter().map(|(_, r)| r.times.len()).min().unwrap_or(0);
    for i in 0..len {
        let _ = write!(t, "{}", runs[0].1.times[i]);
        for (_, r) in &runs {
            let _ = write!(t, ",{}", r.distances[i]);
        }
        t.push('\n');
    }
    write_file(&spec.out.join("stability_trace.csv"), &t)?;
    Ok(StabilityOutput { runs, agreement })
}
