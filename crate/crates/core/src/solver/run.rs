use super::config::{Scheme, SimConfig};
use super::record::{Sample, StopReason, TrajectoryRecord};
use super::step::{step_ito_em, step_strat_heun};
use crate::error::{Error, Result};
use crate::models::{ModelOps, ModelState};
use crate::noise::{sample_path, BrownianPath};
use crate::spectral::Complex64;

/// A finished trajectory and the last finite state reached.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: TrajectoryRecord,
    pub state: ModelState,
}

fn sample(ops: &ModelOps, cfg: &SimConfig, t: f64, x: &ModelState) -> Result<Sample> {
    Ok(Sample {
        t,
        hs_norm: ops.x_norm(x, cfg.s),
        v_norm: ops.v_norm(x),
        blowup: ops.blowup_functional(x)?,
        l2: x.l2_norm(),
        mean: *x.means().last().unwrap_or(&0.0),
    })
}

fn advance(cfg: &SimConfig, ops: &ModelOps, x: &ModelState, dw: &[f64]) -> Result<ModelState> {
    match cfg.scheme {
        Scheme::ItoEm => step_ito_em(x, ops, dw, cfg.dt, cfg.cutoff()?),
        Scheme::StratHeun => step_strat_heun(x, ops, dw, cfg.dt),
    }
}

/// Path matching `cfg`: seeded, `t_end/dt` steps, one column per noise channel.
pub fn driving_path(cfg: &SimConfig) -> Result<BrownianPath> {
    let k = if matches!(cfg.model, crate::models::ModelKind::Linear { .. }) {
        1
    } else {
        cfg.noise_k
    };
    sample_path(cfg.seed, cfg.dt, cfg.steps()?, k)
}

fn check_path(cfg: &SimConfig, ops: &ModelOps, path: &BrownianPath) -> Result<usize> {
    let steps = cfg.steps()?;
    if (path.dt() - cfg.dt).abs() > 1e-12 * cfg.dt || path.n_steps() < steps {
        return Err(Error::Parameter(format!(
            "path with {} steps of {} cannot drive {steps} steps of {}",
            path.n_steps(),
            path.dt(),
            cfg.dt
        )));
    }
    if path.noise_dim() != ops.noise_dim() {
        return Err(Error::Parameter(format!(
            "path has {} channels, model has {}",
            path.noise_dim(),
            ops.noise_dim()
        )));
    }
    Ok(steps)
}

pub fn run_path(cfg: &SimConfig) -> Result<RunOutput> {
    cfg.validate()?;
    run_path_on(cfg, &driving_path(cfg)?)
}

pub fn run_path_on(cfg: &SimConfig, path: &BrownianPath) -> Result<RunOutput> {
    cfg.validate()?;
    let ops = cfg.ops()?;
    let x0 = cfg.initial_state()?;
    run_from(cfg, &ops, x0, path)
}

/// Integrates from `x0`, checking every step for the norm threshold, the
/// blow-up indicator, the CFL guard and non-finite values.
pub fn run_from(cfg: &SimConfig, ops: &ModelOps, x0: ModelState, path: &BrownianPath) -> Result<RunOutput> {
    let steps = check_path(cfg, ops, path)?;
    let dx = cfg.grid()?.spacing();
    let mut x = x0;
    let first = sample(ops, cfg, 0.0, &x)?;
    let blowup_limit = cfg.blowup_factor * first.blowup;
    let mut samples = vec![first];
    let finish = |samples, reason, tau, x| {
        Ok(RunOutput {
            record: TrajectoryRecord {
                samples,
                stopped: reason != StopReason::End,
                tau,
                reason,
            },
            state: x,
        })
    };
    if first.hs_norm >= cfg.n_stop {
        return finish(samples, StopReason::Threshold, 0.0, x);
    }
    for n in 0..steps {
        let t_prev = n as f64 * cfg.dt;
        if cfg.dt * ops.max_velocity(&x)? > 0.5 * dx {
            return finish(samples, StopReason::Cfl, t_prev, x);
        }
        let next = advance(cfg, ops, &x, path.step(n))?;
        let t = (n + 1) as f64 * cfg.dt;
        if !next.is_finite() {
            return finish(samples, StopReason::Divergence, t, x);
        }
        x = next;
        let s = sample(ops, cfg, t, &x)?;
        let reason = if !(s.hs_norm < cfg.n_stop) {
            Some(StopReason::Threshold)
        } else if first.blowup > 0.0 && s.blowup > blowup_limit {
            Some(StopReason::Blowup)
        } else {
            None
        };
        if reason.is_some() || (n + 1) % cfg.sample_every == 0 || n + 1 == steps {
            samples.push(s);
        }
        if let Some(r) = reason {
            return finish(samples, r, t, x);
        }
    }
    finish(samples, StopReason::End, steps as f64 * cfg.dt, x)
}

/// Adds `delta·cos(m·x)` to the leading component (`u` or `θ`).
pub fn perturb_mode(x: &ModelState, mode: [i64; 2], delta: f64) -> Result<ModelState> {
    let bump = |f: &crate::spectral::SpectralField| {
        let p = crate::spectral::SpectralField::from_modes(*f.grid(), &[(mode, Complex64::new(0.5 * delta, 0.0))]);
        f + &p
    };
    Ok(match x {
        ModelState::Sch2 { u, eta } => ModelState::Sch2 {
            u: bump(u),
            eta: eta.clone(),
        },
        ModelState::Ccf { theta } => ModelState::Ccf { theta: bump(theta) },
        ModelState::Sqg { theta } => {
            if mode == [0, 0] {
                return Err(Error::Domain("SQG perturbations must keep zero mean".into()));
            }
            ModelState::Sqg { theta: bump(theta) }
        }
        ModelState::Scalar(v) => ModelState::Scalar(v + delta),
    })
}

/// Distances between two runs driven by one Brownian path.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// `‖X₀ - Y₀‖_Z`.
    pub initial_distance: f64,
    /// `sup_t ‖X(t) - Y(t)‖_Z` up to the joint stopping time.
    pub sup_distance: f64,
    /// `sup_distance / initial_distance`; `None` when the data coincide.
    pub ratio: Option<f64>,
    pub tau: f64,
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
}

/// Runs `x0` and `y0` on the same path and stops both at the first time either
/// state norm reaches `n_stop`.
pub fn stability_experiment(cfg: &SimConfig, x0: &ModelState, y0: &ModelState) -> Result<StabilityReport> {
    cfg.validate()?;
    if x0.variant_name() != y0.variant_name() || x0.grid() != y0.grid() {
        return Err(Error::Parameter(
            "stability runs need states of one model on one grid".into(),
        ));
    }
    let ops = cfg.ops()?;
    let path = driving_path(cfg)?;
    let steps = check_path(cfg, &ops, &path)?;
    let dist = |a: &ModelState, b: &ModelState| a.sub(b).map(|d| ops.z_norm(&d, cfg.s));
    let mut x = x0.clone();
    let mut y = y0.clone();
    let d0 = dist(&x, &y)?;
    let mut times = vec![0.0];
    let mut distances = vec![d0];
    let mut tau = steps as f64 * cfg.dt;
    for n in 0..steps {
        if ops.x_norm(&x, cfg.s).max(ops.x_norm(&y, cfg.s)) >= cfg.n_stop {
            tau = n as f64 * cfg.dt;
            break;
        }
        let nx = advance(cfg, &ops, &x, path.step(n))?;
        let ny = advance(cfg, &ops, &y, path.step(n))?;
        if !(nx.is_finite() && ny.is_finite()) {
            tau = n as f64 * cfg.dt;
            break;
        }
        x = nx;
        y = ny;
        if (n + 1) % cfg.sample_every == 0 || n + 1 == steps {
            times.push((n + 1) as f64 * cfg.dt);
            distances.push(dist(&x, &y)?);
        }
    }
    let sup_distance = distances.iter().cloned().fold(0.0, f64::max);
    Ok(StabilityReport {
        initial_distance: d0,
        sup_distance,
        ratio: (d0 > 0.0).then(|| sup_distance / d0),
        tau,
        times,
        distances,
    })
}
