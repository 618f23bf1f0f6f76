//! Correlation fields `ξ_k` and seeded Brownian driving paths.

use std::io::{BufRead, Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lie::VectorFieldXi;
use crate::spectral::{Complex64, Grid, SpectralField};

/// Decay law for the target norms `‖ξ_k‖_{H^{s_max}}`, `k = 1, 2, …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `ratio^k`, summable for `0 < ratio < 1`.
    Geometric { ratio: f64 },
    /// `k^{-exponent}`, summable for `exponent > 1`.
    Polynomial { exponent: f64 },
}

impl Default for Decay {
    fn default() -> Self {
        Decay::Geometric { ratio: 0.5 }
    }
}

impl Decay {
    pub fn target(&self, k: usize) -> f64 {
        match *self {
            Decay::Geometric { ratio } => ratio.powi(k as i32),
            Decay::Polynomial { exponent } => (k as f64).powf(-exponent),
        }
    }

    /// Upper bound on `Σ_{k>K} target(k)`; infinite for divergent laws.
    pub fn tail_bound(&self, truncation: usize) -> f64 {
        match *self {
            Decay::Geometric { ratio } => {
                if ratio > 0.0 && ratio < 1.0 {
                    ratio.powi(truncation as i32 + 1) / (1.0 - ratio)
                } else {
                    f64::INFINITY
                }
            }
            Decay::Polynomial { exponent } => {
                if exponent <= 1.0 {
                    f64::INFINITY
                } else if truncation == 0 {
                    1.0 + 1.0 / (exponent - 1.0)
                } else {
                    (truncation as f64).powf(1.0 - exponent) / (exponent - 1.0)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let tail = self.tail_bound(0);
        let positive = match *self {
            Decay::Geometric { ratio } => ratio > 0.0,
            Decay::Polynomial { .. } => true,
        };
        if tail.is_finite() && positive {
            Ok(())
        } else {
            Err(Error::DivergentBasis { tail })
        }
    }
}

/// Truncated family `{ξ_k}_{k ≤ K}` plus its decay metadata.
#[derive(Debug, Clone)]
pub struct NoiseBasis {
    grid: Grid,
    xis: Vec<VectorFieldXi>,
    decay: Decay,
    s_max: f64,
}

impl NoiseBasis {
    pub fn empty(grid: Grid) -> Self {
        Self {
            grid,
            xis: Vec::new(),
            decay: Decay::default(),
            s_max: 0.0,
        }
    }

    /// Wraps explicit fields (e.g. a single constant field for tests).
    pub fn from_fields(grid: Grid, xis: Vec<VectorFieldXi>) -> Result<Self> {
        for xi in &xis {
            grid.ensure_same(xi.grid())?;
        }
        Ok(Self {
            grid,
            xis,
            decay: Decay::default(),
            s_max: 0.0,
        })
    }

    /// 1D family `ξ_k = a_k cos(m x)` (odd k) / `a_k sin(m x)` (even k),
    /// `m = ⌈k/2⌉`, scaled so that `‖ξ_k‖_{H^{s_max}} = target(k)`.
    pub fn build_1d(grid: Grid, k: usize, decay: Decay, s_max: f64) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::Unsupported("build_1d needs a 1D grid".into()));
        }
        decay.validate()?;
        let mut xis = Vec::with_capacity(k);
        for idx in 1..=k {
            let m = idx.div_ceil(2) as i64;
            check_band(&grid, m)?;
            let amp = decay.target(idx) * 2f64.sqrt() * (1.0 + (m * m) as f64).powf(-0.5 * s_max);
            // a cos(mx) ↔ coeff(±m) = a/2 ; a sin(mx) ↔ coeff(m) = -i a/2
            let c = if idx % 2 == 1 {
                Complex64::new(0.5 * amp, 0.0)
            } else {
                Complex64::new(0.0, -0.5 * amp)
            };
            let f = SpectralField::from_modes(grid, &[([m, 0], c)]);
            xis.push(VectorFieldXi::new(vec![f])?);
        }
        Ok(Self {
            grid,
            xis,
            decay,
            s_max,
        })
    }

    /// 2D divergence-free family `ξ_k = ∇^⊥ψ_k` with `ψ_k` alternating
    /// `cos(m·x)`, `sin(m·x)` over half-plane wavevectors ordered by `|m|`.
    pub fn build_sqg(grid: Grid, k: usize, decay: Decay, s_max: f64) -> Result<Self> {
        if grid.dim() != 2 {
            return Err(Error::Unsupported("build_sqg needs a 2D grid".into()));
        }
        decay.validate()?;
        let waves = half_plane_wavevectors(k.div_ceil(2));
        let mut xis = Vec::with_capacity(k);
        for idx in 1..=k {
            let m = waves[(idx - 1) / 2];
            check_band(&grid, m[0].abs().max(m[1].abs()))?;
            let m2 = (m[0] * m[0] + m[1] * m[1]) as f64;
            let amp = decay.target(idx) * 2f64.sqrt() / (m2.sqrt() * (1.0 + m2).powf(0.5 * s_max));
            let c = if idx % 2 == 1 {
                Complex64::new(0.5 * amp, 0.0)
            } else {
                Complex64::new(0.0, -0.5 * amp)
            };
            let psi = SpectralField::from_modes(grid, &[(m, c)]);
            xis.push(VectorFieldXi::from_stream_function(&psi)?);
        }
        Ok(Self {
            grid,
            xis,
            decay,
            s_max,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.xis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xis.is_empty()
    }

    pub fn fields(&self) -> &[VectorFieldXi] {
        &self.xis
    }

    /// Field `k`, zero-based.
    pub fn field(&self, k: usize) -> Result<&VectorFieldXi> {
        self.xis.get(k).ok_or(Error::NoiseIndex {
            index: k,
            len: self.xis.len(),
        })
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    /// Closed-form bound on `Σ_{k>K} ‖ξ_k‖_{H^{s_max}}` for the dropped tail.
    pub fn tail_bound(&self) -> f64 {
        self.decay.tail_bound(self.xis.len())
    }

    /// `Σ_{k≤K} ‖ξ_k‖_{H^s}`.
    pub fn partial_sum(&self, s: f64) -> f64 {
        self.xis.iter().map(|x| x.sobolev_norm(s)).sum()
    }

    pub fn max_divergence(&self) -> f64 {
        self.xis.iter().map(|x| x.max_divergence()).fold(0.0, f64::max)
    }

    pub fn max_speed(&self) -> f64 {
        self.xis.iter().map(|x| x.max_speed()).sum()
    }
}

fn check_band(grid: &Grid, m: i64) -> Result<()> {
    if m > grid.dealias_max() {
        Err(Error::Parameter(format!(
            "noise mode {m} exceeds the dealiased band of grid {grid}"
        )))
    } else {
        Ok(())
    }
}

fn half_plane_wavevectors(count: usize) -> Vec<[i64; 2]> {
    let mut out = Vec::new();
    let mut radius: i64 = 1;
    while out.len() < count {
        let mut ring: Vec<[i64; 2]> = Vec::new();
        for a in -radius..=radius {
            for b in 0..=radius {
                let keep = b > 0 || a > 0;
                let on_ring = a.abs().max(b) == radius;
                if keep && on_ring {
                    ring.push([a, b]);
                }
            }
        }
        ring.sort_by_key(|m| (m[0] * m[0] + m[1] * m[1], -m[0].signum(), m[1]));
        out.extend(ring);
        radius += 1;
    }
    out.truncate(count);
    out
}

/// Increments `ΔW_k` of `K` independent Brownian motions on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    seed: u64,
    dt: f64,
    n_steps: usize,
    k: usize,
    increments: Vec<f64>,
}

/// Draws `n_steps × K` i.i.d. `N(0, dt)` increments from a seeded ChaCha8 stream,
/// row by row.
pub fn sample_path(seed: u64, dt: f64, n_steps: usize, k: usize) -> Result<BrownianPath> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = dt.sqrt();
    let increments = (0..n_steps * k)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * sd
        })
        .collect();
    Ok(BrownianPath {
        seed,
        dt,
        n_steps,
        k,
        increments,
    })
}

const BINARY_MAGIC: &[u8; 4] = b"BPTH";

impl BrownianPath {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn noise_dim(&self) -> usize {
        self.k
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// The `K` increments of step `step`.
    pub fn step(&self, step: usize) -> &[f64] {
        &self.increments[step * self.k..(step + 1) * self.k]
    }

    /// `W_k(T)` at the end of the path.
    pub fn terminal_value(&self, k: usize) -> f64 {
        (0..self.n_steps).map(|n| self.step(n)[k]).sum()
    }

    /// Sums each block of `factor` consecutive increments: the same Brownian
    /// path sampled at step `factor·dt`.
    pub fn coarsen(&self, factor: usize) -> Result<BrownianPath> {
        if factor == 0 || !self.n_steps.is_multiple_of(factor) {
            return Err(Error::Parameter(format!(
                "cannot coarsen {} steps by {factor}",
                self.n_steps
            )));
        }
        let n_coarse = self.n_steps / factor;
        let mut increments = vec![0.0; n_coarse * self.k];
        for n in 0..n_coarse {
            for j in 0..factor {
                let fine = self.step(n * factor + j);
                for (acc, w) in increments[n * self.k..(n + 1) * self.k].iter_mut().zip(fine) {
                    *acc += w;
                }
            }
        }
        Ok(BrownianPath {
            seed: self.seed,
            dt: self.dt * factor as f64,
            n_steps: n_coarse,
            k: self.k,
            increments,
        })
    }

    /// CSV table: `#` metadata lines, a header `dW1,…,dWK`, one row per step.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "# dt={}", self.dt)?;
        writeln!(w, "# n_steps={}", self.n_steps)?;
        let header: Vec<String> = (1..=self.k).map(|k| format!("dW{k}")).collect();
        writeln!(w, "{}", header.join(","))?;
        for n in 0..self.n_steps {
            let row: Vec<String> = self.step(n).iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<BrownianPath> {
        let mut seed = None;
        let mut dt = None;
        let mut n_steps = None;
        let mut k = None;
        let mut increments = Vec::new();
        let mut rows = 0usize;
        for line in r.lines() {
            let line = line.map_err(|e| Error::Format(e.to_string()))?;
            if let Some(meta) = line.strip_prefix('#') {
                let (key, value) = meta
                    .trim()
                    .split_once('=')
                    .ok_or_else(|| Error::Format(format!("bad metadata line `{line}`")))?;
                let bad = |_| Error::Format(format!("bad value in `{line}`"));
                match key.trim() {
                    "seed" => seed = Some(value.trim().parse::<u64>().map_err(|_| bad(()))?),
                    "dt" => dt = Some(value.trim().parse::<f64>().map_err(|_| bad(()))?),
                    "n_steps" => n_steps = Some(value.trim().parse::<usize>().map_err(|_| bad(()))?),
                    _ => return Err(Error::Format(format!("unknown metadata `{key}`"))),
                }
                continue;
            }
            if k.is_none() {
                k = Some(if line.trim().is_empty() {
                    0
                } else {
                    line.split(',').count()
                });
                continue;
            }
            let width = k.unwrap_or(0);
            if width > 0 {
                let vals = line
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Format(format!("row {}: {e}", rows + 1)))?;
                if vals.len() != width {
                    return Err(Error::Format(format!(
                        "row {} has {} columns, expected {width}",
                        rows + 1,
                        vals.len()
                    )));
                }
                increments.extend(vals);
            }
            rows += 1;
        }
        let missing = |what: &str| Error::Format(format!("missing `{what}` metadata"));
        let n_steps = n_steps.ok_or_else(|| missing("n_steps"))?;
        let k = k.ok_or_else(|| Error::Format("missing header row".into()))?;
        if k > 0 && rows != n_steps {
            return Err(Error::Format(format!("expected {n_steps} rows, found {rows}")));
        }
        Ok(BrownianPath {
            seed: seed.ok_or_else(|| missing("seed"))?,
            dt: dt.ok_or_else(|| missing("dt"))?,
            n_steps,
            k,
            increments,
        })
    }

    /// Little-endian binary: magic `BPTH`, seed (u64), dt (f64), n_steps (u64),
    /// K (u64), then `n_steps·K` f64 increments row by row.
    pub fn write_binary<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(BINARY_MAGIC)?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.dt.to_le_bytes())?;
        w.write_all(&(self.n_steps as u64).to_le_bytes())?;
        w.write_all(&(self.k as u64).to_le_bytes())?;
        for v in &self.increments {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<BrownianPath> {
        let io = |e: std::io::Error| Error::Format(e.to_string());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io)?;
        if &magic != BINARY_MAGIC {
            return Err(Error::Format("not a Brownian path file".into()));
        }
        let mut word = [0u8; 8];
        let mut next = |r: &mut R| -> Result<[u8; 8]> {
            r.read_exact(&mut word).map_err(io)?;
            Ok(word)
        };
        let seed = u64::from_le_bytes(next(&mut r)?);
        let dt = f64::from_le_bytes(next(&mut r)?);
        let n_steps = u64::from_le_bytes(next(&mut r)?) as usize;
        let k = u64::from_le_bytes(next(&mut r)?) as usize;
        let mut increments = Vec::with_capacity(n_steps * k);
        for _ in 0..n_steps * k {
            increments.push(f64::from_le_bytes(next(&mut r)?));
        }
        Ok(BrownianPath {
            seed,
            dt,
            n_steps,
            k,
            increments,
        })
    }
}
