use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use rayon::prelude::*;

use saltflow::solver::{run_path, TrajectoryRecord};

use crate::config::ExperimentSpec;
use crate::output::{pool, write_file, write_manifest};

#[derive(Debug)]
pub struct SimulateOutput {
    /// `(seed, record)` in seed order.
    pub records: Vec<(u64, TrajectoryRecord)>,
    pub trajectories: Vec<PathBuf>,
    pub stats: PathBuf,
}

/// Runs the ensemble, writing `traj_<seed>.csv` per member, the manifest and
/// `ensemble_stats.csv`. Members run in parallel on `workers` threads; all
/// merging happens afterwards in seed order.
pub fn cmd_simulate(spec: &ExperimentSpec, workers: usize) -> Result<SimulateOutput> {
    spec.check_command()?;
    std::fs::create_dir_all(&spec.out).with_context(|| format!("creating {}", spec.out.display()))?;
    write_manifest(spec)?;
    let members: Vec<_> = (0..spec.ensemble).map(|i| spec.member(i)).collect::<Result<_, _>>()?;
    let runs = pool(workers)?.install(|| {
        members
            .par_iter()
            .map(|cfg| run_path(cfg).map(|o| (cfg.seed, o.record)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut trajectories = Vec::new();
    for (seed, rec) in &runs {
        let path = spec.out.join(format!("traj_{seed}.csv"));
        write_file(&path, &rec.to_csv_string())?;
        trajectories.push(path);
    }
    let stats = spec.out.join("ensemble_stats.csv");
    write_file(&stats, &ensemble_stats(&runs))?;
    Ok(SimulateOutput {
        records: runs,
        trajectories,
        stats,
    })
}

/// Mean and standard deviation across members of the sampled diagnostics,
/// keyed by sample time; members contribute only while they are running.
pub fn ensemble_stats(runs: &[(u64, TrajectoryRecord)]) -> String {
    let mut out = format!("# members={}\n", runs.len());
    let mut by_time: BTreeMap<u64, Vec<[f64; 4]>> = BTreeMap::new();
    for (seed, rec) in runs {
        let _ = writeln!(out, "# seed={seed} stop_reason={} tau={}", rec.reason, rec.tau);
        for s in &rec.samples {
            by_time
                .entry(s.t.to_bits())
                .or_default()
                .push([s.hs_norm, s.l2, s.blowup, s.mean]);
        }
    }
    out.push_str("t,count,Hs_mean,Hs_std,l2_mean,l2_std,blowup_mean,blowup_std,mean_mean,mean_std\n");
    for (t, rows) in &by_time {
        let _ = write!(out, "{},{}", f64::from_bits(*t), rows.len());
        let n = rows.len() as f64;
        for j in 0..4 {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            let _ = write!(out, ",{mean},{}", var.sqrt());
        }
        out.push('\n');
    }
    out
}
