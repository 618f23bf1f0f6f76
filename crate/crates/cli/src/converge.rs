use std::fmt::Write as _;

use anyhow::{bail, Result};
use rayon::prelude::*;

use saltflow::models::{ModelKind, ModelState};
use saltflow::noise::BrownianPath;
use saltflow::solver::{driving_path, run_path_on, Scheme, SimConfig, StopReason};

use crate::config::ExperimentSpec;
use crate::output::{fitted_order, pool, write_file, write_manifest};

/// `‖X_{ε_i}(T) - X_{ε_{i+1}}(T)‖_{H^{s-2}}`, averaged over the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsRow {
    pub eps: f64,
    pub next_eps: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DtRow {
    pub dt: f64,
    /// Mean `‖X_EM(T) - X_Heun(T)‖_{H^{s-2}}`.
    pub heun_em: f64,
    /// Mean `|X_EM(T) - X(T)|` against the closed-form solution (linear model only).
    pub em_exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergeReport {
    pub eps_rows: Vec<EpsRow>,
    pub eps_order: Option<f64>,
    pub dt_rows: Vec<DtRow>,
    pub heun_em_order: Option<f64>,
    pub em_strong_order: Option<f64>,
    /// Runs that stopped before `t_end`; their distances use the stopped state.
    pub early_stops: usize,
}

impl ConvergeReport {
    pub fn table(&self) -> String {
        let mut s = String::new();
        let order = |o: Option<f64>| o.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        if !self.eps_rows.is_empty() {
            let _ = writeln!(s, "eps ladder (distance between consecutive rungs)");
            for r in &self.eps_rows {
                let _ = writeln!(s, "  {:>12e} -> {:>12e}  {:e}", r.eps, r.next_eps, r.distance);
            }
            let _ = writeln!(s, "  observed order in eps: {}", order(self.eps_order));
        }
        if !self.dt_rows.is_empty() {
            let _ = writeln!(s, "dt ladder (EM vs Heun distance, EM vs exact error)");
            for r in &self.dt_rows {
                let exact = r.em_exact.map_or("-".to_string(), |e| format!("{e:e}"));
                let _ = writeln!(s, "  {:>12e}  {:e}  {exact}", r.dt, r.heun_em);
            }
            let _ = writeln!(s, "  observed order of EM-Heun distance: {}", order(self.heun_em_order));
            if self.em_strong_order.is_some() {
                let _ = writeln!(s, "  observed EM strong order: {}", order(self.em_strong_order));
            }
        }
        if self.early_stops > 0 {
            let _ = writeln!(s, "  warning: {} runs stopped before t_end", self.early_stops);
        }
        s
    }
}

struct MemberResult {
    eps_dist: Vec<f64>,
    heun_em: Vec<f64>,
    em_exact: Vec<f64>,
    early: usize,
}

fn with_dt(cfg: &SimConfig, dt: f64) -> SimConfig {
    let mut c = cfg.clone();
    c.dt = dt;
    c
}

fn member(cfg: &SimConfig, eps: &[f64], dts: &[f64]) -> Result<MemberResult> {
    let ops = cfg.ops()?;
    let dist = |a: &ModelState, b: &ModelState| -> Result<f64> { Ok(ops.z_norm(&a.sub(b)?, cfg.s)) };
    let mut early = 0;
    let mut finish = |cfg: &SimConfig, path: &BrownianPath| -> Result<ModelState> {
        let out = run_path_on(cfg, path)?;
        if out.record.reason != StopReason::End {
            early += 1;
        }
        Ok(out.state)
    };
    let mut eps_dist = Vec::new();
    if !eps.is_empty() {
        let path = driving_path(cfg)?;
        let mut states = Vec::new();
        for &e in eps {
            let mut c = cfg.clone();
            c.eps = e;
            states.push(finish(&c, &path)?);
        }
        for w in states.windows(2) {
            eps_dist.push(dist(&w[0], &w[1])?);
        }
    }
    let (mut heun_em, mut em_exact) = (Vec::new(), Vec::new());
    if !dts.is_empty() {
        let finest = dts.iter().cloned().fold(f64::INFINITY, f64::min);
        let fine = driving_path(&with_dt(cfg, finest))?;
        for &dt in dts {
            let path = fine.coarsen((dt / finest).round() as usize)?;
            let mut c = with_dt(cfg, dt);
            c.scheme = Scheme::ItoEm;
            let em = finish(&c, &path)?;
            c.scheme = Scheme::StratHeun;
            let heun = finish(&c, &path)?;
            heun_em.push(dist(&em, &heun)?);
            if let (ModelKind::Linear { rate }, ModelState::Scalar(x), ModelState::Scalar(x0)) =
                (cfg.model, &em, cfg.initial_state()?)
            {
                em_exact.push((x - x0 * (rate * fine.terminal_value(0)).exp()).abs());
            }
        }
    }
    Ok(MemberResult {
        eps_dist,
        heun_em,
        em_exact,
        early,
    })
}

fn mean_columns(rows: &[Vec<f64>], width: usize) -> Vec<f64> {
    (0..width)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / rows.len() as f64)
        .collect()
}

/// ε- and dt-ladder study on the ensemble seeds; writes `converge_eps.csv`,
/// `converge_dt.csv` and the manifest.
pub fn cmd_converge(spec: &ExperimentSpec, workers: usize) -> Result<ConvergeReport> {
    spec.check_command()?;
    let c = &spec.converge;
    for (ladder, what) in [(&c.eps_ladder, "eps"), (&c.dt_ladder, "dt")] {
        if !ladder.is_empty() && ladder.len() < 3 {
            bail!("the {what} ladder needs at least 3 rungs, got {}", ladder.len());
        }
    }
    std::fs::create_dir_all(&spec.out)?;
    write_manifest(spec)?;
    let members: Vec<SimConfig> = (0..spec.ensemble).map(|i| spec.member(i)).collect::<Result<_, _>>()?;
    let results = pool(workers)?.install(|| {
        members
            .par_iter()
            .map(|m| member(m, &c.eps_ladder, &c.dt_ladder))
            .collect::<Result<Vec<_>>>()
    })?;
    let eps_mean = mean_columns(
        &results.iter().map(|r| r.eps_dist.clone()).collect::<Vec<_>>(),
        c.eps_ladder.len().saturating_sub(1),
    );
    let he_mean = mean_columns(
        &results.iter().map(|r| r.heun_em.clone()).collect::<Vec<_>>(),
        c.dt_ladder.len(),
    );
    let linear = matches!(spec.sim()?.model, ModelKind::Linear { .. });
    let ex_mean = if linear {
        Some(mean_columns(
            &results.iter().map(|r| r.em_exact.clone()).collect::<Vec<_>>(),
            c.dt_ladder.len(),
        ))
    } else {
        None
    };
    let eps_rows: Vec<EpsRow> = eps_mean
        .iter()
        .enumerate()
        .map(|(i, d)| EpsRow {
            eps: c.eps_ladder[i],
            next_eps: c.eps_ladder[i + 1],
            distance: *d,
        })
        .collect();
    let dt_rows: Vec<DtRow> = c
        .dt_ladder
        .iter()
        .enumerate()
        .map(|(i, dt)| DtRow {
            dt: *dt,
            heun_em: he_mean[i],
            em_exact: ex_mean.as_ref().map(|e| e[i]),
        })
        .collect();
    let report = ConvergeReport {
        eps_order: fitted_order(&c.eps_ladder[..eps_rows.len()], &eps_mean),
        heun_em_order: fitted_order(&c.dt_ladder, &he_mean),
        em_strong_order: ex_mean.as_ref().and_then(|e| fitted_order(&c.dt_ladder, e)),
        eps_rows,
        dt_rows,
        early_stops: results.iter().map(|r| r.early).sum(),
    };
    if !report.eps_rows.is_empty() {
        let mut s = format!("# order={:?}\neps,next_eps,distance\n", report.eps_order);
        for r in &report.eps_rows {
            let _ = writeln!(s, "{},{},{}", r.eps, r.next_eps, r.distance);
        }
        write_file(&spec.out.join("converge_eps.csv"), &s)?;
    }
    if !report.dt_rows.is_empty() {
        let mut s = format!(
            "# heun_em_order={:?}\n# em_strong_order={:?}\ndt,heun_em,em_exact\n",
            report.heun_em_order, report.em_strong_order
        );
        for r in &report.dt_rows {
            let e = r.em_exact.map_or(String::new(), |e| e.to_string());
            let _ = writeln!(s, "{},{},{e}", r.dt, r.heun_em);
        }
        write_file(&spec.out.join("converge_dt.csv"), &s)?;
    }
    Ok(report)
}
