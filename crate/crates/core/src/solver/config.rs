use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::cutoff::CutoffParam;
use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelOps, ModelState};
use crate::noise::{Decay, NoiseBasis};
use crate::spectral::{Complex64, Grid, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Euler–Maruyama on the cut-off Itô form.
    ItoEm,
    /// Heun on the Stratonovich form.
    StratHeun,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::ItoEm => "em",
            Scheme::StratHeun => "heun",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "em" => Ok(Scheme::ItoEm),
            "heun" => Ok(Scheme::StratHeun),
            other => Err(Error::Parameter(format!(
                "unknown scheme `{other}` (expected em or heun)"
            ))),
        }
    }
}

/// Initial data families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// A few fixed low modes scaled by `amplitude`.
    Wave { amplitude: f64 },
    /// Seeded random trigonometric polynomial on modes `1 ≤ |k|_∞ ≤ modes`,
    /// coefficients decaying like `|k|^{-3}`, scaled to `L²` norm `amplitude`.
    Random { amplitude: f64, seed: u64, modes: usize },
}

impl InitialCondition {
    pub fn amplitude(&self) -> f64 {
        match *self {
            InitialCondition::Wave { amplitude } | InitialCondition::Random { amplitude, .. } => amplitude,
        }
    }

    pub fn build(&self, kind: ModelKind, grid: Grid) -> Result<ModelState> {
        let a = self.amplitude();
        if !a.is_finite() {
            return Err(Error::Parameter(format!("initial amplitude must be finite, got {a}")));
        }
        let re = |v: f64| Complex64::new(v, 0.0);
        let im = |v: f64| Complex64::new(0.0, v);
        match *self {
            InitialCondition::Wave { .. } => Ok(match kind {
                ModelKind::Sch2 => ModelState::Sch2 {
                    u: SpectralField::from_modes(grid, &[([1, 0], im(-0.5 * a))]),
                    eta: SpectralField::from_modes(grid, &[([0, 0], re(0.3 * a)), ([2, 0], re(0.25 * a))]),
                },
                ModelKind::Ccf => ModelState::Ccf {
                    theta: SpectralField::from_modes(grid, &[([1, 0], re(0.5 * a)), ([2, 0], im(-0.25 * a))]),
                },
                ModelKind::Sqg => ModelState::Sqg {
                    theta: SpectralField::from_modes(
                        grid,
                        &[([1, 0], re(0.5 * a)), ([0, 1], im(-0.25 * a)), ([1, 1], re(0.15 * a))],
                    ),
                },
                ModelKind::Linear { .. } => ModelState::Scalar(a),
            }),
            InitialCondition::Random { seed, modes, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut draw = |grid: Grid| random_field(&mut rng, grid, modes, a);
                Ok(match kind {
                    ModelKind::Sch2 => ModelState::Sch2 {
                        u: draw(grid)?,
                        eta: draw(grid)?,
                    },
                    ModelKind::Ccf => ModelState::Ccf { theta: draw(grid)? },
                    ModelKind::Sqg => ModelState::Sqg { theta: draw(grid)? },
                    ModelKind::Linear { .. } => ModelState::Scalar(a),
                })
            }
        }
    }
}

fn random_field(rng: &mut ChaCha8Rng, grid: Grid, modes: usize, amplitude: f64) -> Result<SpectralField> {
    let top = modes as i64;
    if modes == 0 || top > grid.dealias_max() {
        return Err(Error::Parameter(format!(
            "random initial data needs 1..={} modes on grid {grid}",
            grid.dealias_max()
        )));
    }
    let mut list = Vec::new();
    let k2_range = if grid.dim() == 2 { 0..=top } else { 0..=0 };
    for k2 in k2_range {
        for k1 in -top..=top {
            if k2 == 0 && k1 <= 0 {
                continue;
            }
            let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            list.push(([k1, k2], Complex64::new(a, b) * r.powi(-3)));
        }
    }
    let f = SpectralField::from_modes(grid, &list);
    let norm = f.inner(&f).sqrt();
    Ok(f.scaled(amplitude / norm))
}

/// Everything one trajectory depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub model: ModelKind,
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub eps: f64,
    pub cutoff_r: f64,
    pub noise_k: usize,
    pub decay: Decay,
    pub s_max: f64,
    pub seed: u64,
    pub s: f64,
    pub n_stop: f64,
    pub blowup_factor: f64,
    pub scheme: Scheme,
    pub sample_every: usize,
    pub init: InitialCondition,
}

impl SimConfig {
    /// Defaults: `s` half a unit above the model threshold, `ε = 0.01`,
    /// `R = 1000`, eight geometric noise fields with `s_max = s + 2`.
    pub fn new(model: ModelKind, n: usize, dt: f64, t_end: f64) -> Self {
        let s = match model {
            ModelKind::Linear { .. } => 0.0,
            other => other.s_threshold() + 0.5,
        };
        Self {
            model,
            n,
            dt,
            t_end,
            eps: 0.01,
            cutoff_r: 1000.0,
            noise_k: if matches!(model, ModelKind::Linear { .. }) {
                1
            } else {
                8
            },
            decay: Decay::default(),
            s_max: s + 2.0,
            seed: 0,
            s,
            n_stop: 1e6,
            blowup_factor: 50.0,
            scheme: Scheme::ItoEm,
            sample_every: 1,
            init: InitialCondition::Wave { amplitude: 1.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.model.s_threshold();
        if self.s <= t {
            let bound = match self.model {
                ModelKind::Sch2 => "11/2",
                ModelKind::Ccf => "7/2",
                _ => "4",
            };
            return Err(Error::Parameter(format!(
                "{} needs s > {bound}, got s = {}",
                self.model, self.s
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Parameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Parameter(format!(
                "t_end must be non-negative, got {}",
                self.t_end
            )));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::Parameter(format!("eps must lie in (0,1), got {}", self.eps)));
        }
        CutoffParam::new(self.cutoff_r)?;
        if !(self.n_stop > 0.0) {
            return Err(Error::Parameter(format!(
                "n_stop must be positive, got {}",
                self.n_stop
            )));
        }
        if !(self.blowup_factor > 1.0) {
            return Err(Error::Parameter(format!(
                "blowup_factor must exceed 1, got {}",
                self.blowup_factor
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::Parameter("sample_every must be at least 1".into()));
        }
        if matches!(self.model, ModelKind::Linear { .. }) && self.noise_k != 1 {
            return Err(Error::Parameter(
                "the linear model has exactly one noise channel".into(),
            ));
        }
        self.steps()?;
        self.grid()?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.model.dim().max(1), self.n)
    }

    /// Number of steps; `t_end` must be an integer multiple of `dt`.
    pub fn steps(&self) -> Result<usize> {
        let ratio = self.t_end / self.dt;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Parameter(format!(
                "t_end = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(n as usize)
    }

    pub fn cutoff(&self) -> Result<CutoffParam> {
        CutoffParam::new(self.cutoff_r)
    }

    pub fn basis(&self) -> Result<NoiseBasis> {
        let grid = self.grid()?;
        match self.model {
            ModelKind::Sch2 | ModelKind::Ccf => NoiseBasis::build_1d(grid, self.noise_k, self.decay, self.s_max),
            ModelKind::Sqg => NoiseBasis::build_sqg(grid, self.noise_k, self.decay, self.s_max),
            ModelKind::Linear { .. } => Ok(NoiseBasis::empty(grid)),
        }
    }

    pub fn ops(&self) -> Result<ModelOps> {
        ModelOps::new(self.model, self.basis()?, self.eps)
    }

    pub fn initial_state(&self) -> Result<ModelState> {
        self.init.build(self.model, self.grid()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for m in [
            ModelKind::Sch2,
            ModelKind::Ccf,
            ModelKind::Sqg,
            ModelKind::Linear { rate: 1.0 },
        ] {
            SimConfig::new(m, 64, 1e-3, 0.1).validate().unwrap();
        }
    }

    #[test]
    fn invariant_violations() {
        let mut c = SimConfig::new(ModelKind::Sch2, 64, 1e-3, 0.1);
        c.s = 3.0;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("11/2"), "{msg}");
        let mut c = SimConfig::new(ModelKind::Ccf, 64, 1e-3, 0.1);
        c.eps = 1.0;
        assert!(c.validate().is_err());
        let mut c = SimConfig::new(ModelKind::Ccf, 64, 1e-3, 0.1);
        c.cutoff_r = 0.5;
        assert!(c.validate().is_err());
        let c = SimConfig::new(ModelKind::Ccf, 64, 0.3, 1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn random_data_is_seeded_and_normalized() {
        let g = Grid::two_d(32).unwrap();
        let ic = InitialCondition::Random {
            amplitude: 0.7,
            seed: 9,
            modes: 4,
        };
        let a = ic.build(ModelKind::Sqg, g).unwrap();
        assert_eq!(a, ic.build(ModelKind::Sqg, g).unwrap());
        assert!((a.l2_norm() - 0.7).abs() < 1e-12);
        assert!(a.means()[0].abs() < 1e-15);
    }
}
