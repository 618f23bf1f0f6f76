use std::sync::Arc;

use rayon::prelude::*;

use super::corpus::{corpus, CorpusEntry, Roughness};
use super::report::{Criterion, EstimateReport};
use crate::error::{Error, Result};
use crate::lie::ds_commutator_spectral;
use crate::models::{ModelKind, ModelOps, ModelState};
use crate::noise::{Decay, NoiseBasis};
use crate::spectral::ops::{band_samples, derivative, from_band_products, helmholtz_unchecked, mollify_unchecked};
use crate::spectral::{hilbert, l2_norm, sobolev_inner, sobolev_norm, sup_norm, Complex64, Grid, SpectralField};

/// Shared sweep settings.
#[derive(Debug, Clone, PartialEq)]
pub struct LabConfig {
    pub resolutions: Vec<usize>,
    pub seed: u64,
    pub per_level: usize,
    pub levels: Vec<Roughness>,
    pub threshold: f64,
    pub noise_k: usize,
    pub decay: Decay,
    /// Regularity for the cancellation and Kato–Ponce sweeps.
    pub s: f64,
    /// Mollifier parameters for the A₃ sweeps.
    pub eps_list: Vec<f64>,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            resolutions: vec![64, 128, 256, 512, 1024],
            seed: 7,
            per_level: 2,
            levels: Roughness::STANDARD.to_vec(),
            threshold: 0.1,
            noise_k: 8,
            decay: Decay::default(),
            s: 4.0,
            eps_list: vec![0.25, 1.0 / 16.0, 1.0 / 64.0],
        }
    }
}

impl LabConfig {
    fn entries(&self) -> Vec<CorpusEntry> {
        corpus(&self.levels, self.per_level, self.seed)
    }

    fn sweep(&self) -> Vec<f64> {
        self.resolutions.iter().map(|&n| n as f64).collect()
    }

    fn bounded(&self, id: &str, ratios: Vec<f64>) -> EstimateReport {
        EstimateReport::new(id, self.sweep(), ratios, Criterion::GrowthAtMost(self.threshold))
    }
}

/// For each resolution, builds `setup(N)` once, evaluates `f(&ctx, entry)`
/// for every entry (in parallel) and keeps the componentwise supremum.
fn sup_over_with<const M: usize, C, S, F>(resolutions: &[usize], count: usize, setup: S, f: F) -> Result<Vec<[f64; M]>>
where
    C: Sync,
    S: Fn(usize) -> Result<C>,
    F: Fn(&C, usize) -> Result<[f64; M]> + Sync,
{
    resolutions
        .iter()
        .map(|&n| {
            let ctx = setup(n)?;
            let values = (0..count)
                .into_par_iter()
                .map(|i| f(&ctx, i))
                .collect::<Result<Vec<_>>>()?;
            let mut acc = [0.0f64; M];
            for v in &values {
                for (a, b) in acc.iter_mut().zip(v) {
                    // NaN propagates so a bad entry cannot hide
                    *a = if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(*b) };
                }
            }
            Ok(acc)
        })
        .collect()
}

fn sup_over<const M: usize, F>(resolutions: &[usize], count: usize, f: F) -> Result<Vec<[f64; M]>>
where
    F: Fn(usize, usize) -> Result<[f64; M]> + Sync,
{
    sup_over_with(resolutions, count, Ok, |&n, i| f(n, i))
}

fn column<const M: usize>(rows: &[[f64; M]], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j]).collect()
}

fn basis_for(kind: ModelKind, grid: Grid, k: usize, decay: Decay, s: f64) -> Result<NoiseBasis> {
    match kind {
        ModelKind::Sqg => NoiseBasis::build_sqg(grid, k, decay, s + 2.0),
        _ => NoiseBasis::build_1d(grid, k, decay, s + 2.0),
    }
}

fn model_grid(kind: ModelKind, n: usize) -> Result<Grid> {
    match kind {
        ModelKind::Sch2 | ModelKind::Ccf => Grid::one_d(n),
        ModelKind::Sqg => Grid::two_d(n),
        ModelKind::Linear { .. } => Err(Error::Unsupported("no estimates for the scalar model".into())),
    }
}

/// State built from a corpus entry: `(u, η)` at regularities `(s, s-1)` for
/// SCH2, `θ` at `s` otherwise.
pub fn corpus_state(kind: ModelKind, grid: Grid, entry: &CorpusEntry, s: f64) -> Result<ModelState> {
    Ok(match kind {
        ModelKind::Sch2 => ModelState::Sch2 {
            u: entry.field(grid, s, 11),
            eta: entry.field(grid, s - 1.0, 12),
        },
        ModelKind::Ccf => ModelState::Ccf {
            theta: entry.field(grid, s, 13),
        },
        ModelKind::Sqg => ModelState::Sqg {
            theta: entry.field(grid, s, 14),
        },
        ModelKind::Linear { .. } => return Err(Error::Unsupported("no estimates for the scalar model".into())),
    })
}

/// `(Q, first)` with `first = Σ_k (D^s L²_k f, D^s f)` and
/// `Q = first + Σ_k ‖D^s L_k f‖²`.
pub fn cancellation_terms(basis: &NoiseBasis, f: &SpectralField, s: f64) -> Result<(f64, f64)> {
    basis.grid().ensure_same(f.grid())?;
    let mut first = 0.0;
    let mut second = 0.0;
    for xi in basis.fields() {
        let lf = xi.apply(f);
        first += sobolev_inner(&xi.apply(&lf), f, s);
        second += sobolev_inner(&lf, &lf, s);
    }
    Ok((first + second, first))
}

/// Cancelled quantity and its first term, each over `‖f‖²_{H^s}`, swept over
/// resolutions. The first report is bounded, the second is expected to grow.
pub fn check_cancellation(cfg: &LabConfig) -> Result<[EstimateReport; 2]> {
    let s = cfg.s;
    if s <= 1.5 {
        return Err(Error::Parameter(format!("cancellation check needs s > 3/2, got {s}")));
    }
    let entries = cfg.entries();
    let rows = sup_over::<2, _>(&cfg.resolutions, entries.len(), |n, i| {
        let grid = Grid::one_d(n)?;
        let basis = NoiseBasis::build_1d(grid, cfg.noise_k, cfg.decay, s + 2.0)?;
        let f = entries[i].field(grid, s, 1);
        let (q, first) = cancellation_terms(&basis, &f, s)?;
        let norm = sobolev_inner(&f, &f, s);
        Ok([q.abs() / norm, first.abs() / norm])
    })?;
    Ok([
        cfg.bounded("cancellation", column(&rows, 0)),
        EstimateReport::new(
            "cancellation_first_term",
            cfg.sweep(),
            column(&rows, 1),
            Criterion::SlopeAtLeast(0.5),
        ),
    ])
}

/// `(‖[D^s, f] g‖, ‖f_x‖_∞‖D^{s-1}g‖ + ‖D^s f‖‖g‖_∞)` in 1D.
pub fn kato_ponce_terms(s: f64, f: &SpectralField, g: &SpectralField) -> Result<(f64, f64)> {
    let lhs = l2_norm(&ds_commutator_spectral(s, f, g)?);
    let rhs = sup_norm(&derivative(f, 0)) * sobolev_norm(g, s - 1.0) + sobolev_norm(f, s) * sup_norm(g);
    Ok((lhs, rhs))
}

pub fn check_kato_ponce(cfg: &LabConfig) -> Result<EstimateReport> {
    let s = cfg.s;
    let entries = cfg.entries();
    let m = entries.len();
    let rows = sup_over::<1, _>(&cfg.resolutions, m, |n, i| {
        let grid = Grid::one_d(n)?;
        let f = entries[i].field(grid, s, 2);
        let g = entries[(i + 1) % m].field(grid, s, 3);
        let (lhs, rhs) = kato_ponce_terms(s, &f, &g)?;
        Ok([lhs / rhs])
    })?;
    Ok(cfg.bounded("kato_ponce", column(&rows, 0)))
}

/// `(‖J̃_ε(g f_x) - g (J̃_ε f)_x‖, ‖g_x‖_∞ ‖f‖)` in 1D.
pub fn te_commutator_terms(g: &SpectralField, f: &SpectralField, eps: f64) -> Result<(f64, f64)> {
    g.grid().ensure_same(f.grid())?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Parameter(format!(
            "mollifier parameter must lie in (0,1), got {eps}"
        )));
    }
    let grid = *f.grid();
    let gv = band_samples(g);
    let mul = |h: &SpectralField| {
        let hv = band_samples(h);
        let p: Vec<f64> = gv.iter().zip(&hv).map(|(a, b)| a * b).collect();
        from_band_products(grid, &p)
    };
    let lhs = &helmholtz_unchecked(&mul(&derivative(f, 0)), eps) - &mul(&derivative(&helmholtz_unchecked(f, eps), 0));
    Ok((l2_norm(&lhs), sup_norm(&derivative(g, 0)) * l2_norm(f)))
}

pub fn te_commutator_ratio(g: &SpectralField, f: &SpectralField, eps: f64) -> Result<f64> {
    te_commutator_terms(g, f, eps).map(|(lhs, rhs)| lhs / rhs)
}

/// Sup over `eps_list` and smooth coefficient fields `g` of the Helmholtz
/// commutator ratio on white-noise-like `f`.
pub fn check_te_commutator(cfg: &LabConfig, eps_list: &[f64]) -> Result<EstimateReport> {
    let gs = corpus(&[Roughness::Smooth], cfg.per_level, cfg.seed ^ 0x5eed);
    let fs = corpus(&[Roughness::White], cfg.per_level, cfg.seed);
    let rows = sup_over::<1, _>(&cfg.resolutions, gs.len() * fs.len(), |n, i| {
        let grid = Grid::one_d(n)?;
        let g = gs[i / fs.len()].field(grid, 1.0, 4);
        let f = fs[i % fs.len()].field(grid, 0.0, 5);
        let mut best: f64 = 0.0;
        for &eps in eps_list {
            best = best.max(te_commutator_ratio(&g, &f, eps)?);
        }
        Ok([best])
    })?;
    Ok(cfg.bounded("te_commutator", column(&rows, 0)))
}

/// Left sides of the two coercivity conditions at regularity `s`:
/// `2(g_ε(X), X)_X + Σ_k ‖h_ε^k(X)‖²_X` and `Σ_k (h_ε^k(X), X)²_X`.
pub fn a3_terms(ops: &ModelOps, x: &ModelState, s: f64) -> Result<(f64, f64)> {
    let g = ops.g_eps(x)?;
    let mut a32 = 2.0 * ops.inner_at(&g, x, s)?;
    let mut a31 = 0.0;
    for k in 0..ops.noise_dim() {
        let h = ops.h_eps(x, k)?;
        a32 += ops.inner_at(&h, &h, s)?;
        let p = ops.inner_at(&h, x, s)?;
        a31 += p * p;
    }
    Ok((a32, a31))
}

/// Ratios of the coercivity left sides to `(1+‖X‖_V)‖X‖²_X` and
/// `(1+‖X‖_V)‖X‖⁴_X`, sup over states and `eps_list`, swept over resolutions.
pub fn check_a3(cfg: &LabConfig, kind: ModelKind, s: f64) -> Result<[EstimateReport; 2]> {
    let entries = cfg.entries();
    let eps = cfg.eps_list.clone();
    let setup = |n| -> Result<(Grid, Arc<NoiseBasis>)> {
        let grid = model_grid(kind, n)?;
        Ok((grid, Arc::new(basis_for(kind, grid, cfg.noise_k, cfg.decay, s)?)))
    };
    let rows = sup_over_with::<2, _, _, _>(
        &cfg.resolutions,
        entries.len() * eps.len(),
        setup,
        |(grid, basis), i| {
            let grid = *grid;
            let ops = ModelOps::new(kind, basis.clone(), eps[i % eps.len()])?;
            let x = corpus_state(kind, grid, &entries[i / eps.len()], s)?;
            let (a32, a31) = a3_terms(&ops, &x, s)?;
            let xn2 = ops.inner_at(&x, &x, s)?;
            let weight = 1.0 + ops.v_norm(&x);
            Ok([a32.abs() / (weight * xn2), a31 / (weight * xn2 * xn2)])
        },
    )?;
    Ok([
        cfg.bounded(&format!("a32_{}", kind.name()), column(&rows, 0)),
        cfg.bounded(&format!("a31_{}", kind.name()), column(&rows, 1)),
    ])
}

/// `2(g(X)-g(Y), X-Y)_Z + Σ_k ‖h^k(X)-h^k(Y)‖²_Z` with `Z` at regularity `s-2`.
pub fn b12_lhs(ops: &ModelOps, x: &ModelState, y: &ModelState, s: f64) -> Result<f64> {
    let z = s - 2.0;
    let d = x.sub(y)?;
    let dg = ops.g(x)?.sub(&ops.g(y)?)?;
    let mut lhs = 2.0 * ops.inner_at(&dg, &d, z)?;
    for k in 0..ops.noise_dim() {
        let dh = ops.h(x, k)?.sub(&ops.h(y, k)?)?;
        lhs += ops.inner_at(&dh, &dh, z)?;
    }
    Ok(lhs)
}

/// Ratio of the `B12` left side to `(1+‖X‖²_X+‖Y‖²_X)‖X-Y‖²_Z` over pairs of
/// consecutive corpus states and pairs `(X, 0)`.
pub fn check_b12(cfg: &LabConfig, kind: ModelKind, s: f64) -> Result<EstimateReport> {
    let entries = cfg.entries();
    let m = entries.len();
    let setup = |n| -> Result<(Grid, ModelOps)> {
        let grid = model_grid(kind, n)?;
        Ok((
            grid,
            ModelOps::new(kind, basis_for(kind, grid, cfg.noise_k, cfg.decay, s)?, 0.5)?,
        ))
    };
    let rows = sup_over_with::<1, _, _, _>(&cfg.resolutions, 2 * m, setup, |(grid, ops), i| {
        let grid = *grid;
        let x = corpus_state(kind, grid, &entries[i % m], s)?;
        let y = if i < m {
            corpus_state(kind, grid, &entries[(i + 1) % m], s)?
        } else {
            x.zeros_like()
        };
        let lhs = b12_lhs(ops, &x, &y, s)?;
        let d = x.sub(&y)?;
        let rhs = (1.0 + ops.inner_at(&x, &x, s)? + ops.inner_at(&y, &y, s)?) * ops.inner_at(&d, &d, s - 2.0)?;
        Ok([lhs.abs() / rhs])
    })?;
    Ok(cfg.bounded(&format!("b12_{}", kind.name()), column(&rows, 0)))
}

/// `‖Hθ_x‖_∞ / (1 + ‖θ_x‖_∞ log(e + ‖θ_x‖_{H¹}) + ‖θ_x‖_{L²})`.
pub fn dong_ratio(theta: &SpectralField) -> Result<f64> {
    let tx = derivative(theta, 0);
    let lhs = sup_norm(&hilbert(&tx)?);
    let rhs = 1.0 + sup_norm(&tx) * (std::f64::consts::E + sobolev_norm(&tx, 1.0)).ln() + l2_norm(&tx);
    Ok(lhs / rhs)
}

/// Single-mode sweep `θ = cos(Mx)`; informational.
pub fn check_dong(n: usize, modes: &[i64]) -> Result<EstimateReport> {
    let grid = Grid::one_d(n)?;
    let ratios = modes
        .iter()
        .map(|&m| {
            if m > grid.dealias_max() {
                return Err(Error::Parameter(format!("mode {m} outside the band of {grid}")));
            }
            dong_ratio(&SpectralField::from_modes(grid, &[([m, 0], Complex64::new(0.5, 0.0))]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimateReport::new(
        "dong",
        modes.iter().map(|&m| m as f64).collect(),
        ratios,
        Criterion::Informational,
    ))
}

fn critical_fields(cfg: &LabConfig, grid: Grid, s: f64) -> Vec<SpectralField> {
    corpus(&[Roughness::Critical], cfg.per_level, cfg.seed)
        .iter()
        .map(|e| e.field(grid, s, 6))
        .collect()
}

/// `sup_u ‖u - J_ε u‖_{H^r} / ‖u‖_{H^s}` against `ε` on the critical corpus;
/// passes when the fitted slope reaches `(s - r) - 0.2`.
pub fn check_mollifier_rate(cfg: &LabConfig, s: f64, r: f64, n: usize, eps_list: &[f64]) -> Result<EstimateReport> {
    let grid = Grid::one_d(n)?;
    let fields = critical_fields(cfg, grid, s);
    let ratios = eps_list
        .iter()
        .map(|&eps| {
            fields
                .iter()
                .map(|u| sobolev_norm(&(u - &mollify_unchecked(u, eps)), r) / sobolev_norm(u, s))
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(EstimateReport::new(
        format!("mollifier_rate_s{s}_r{r}"),
        eps_list.to_vec(),
        ratios,
        Criterion::SlopeAtLeast(s - r - 0.2),
    ))
}

/// `sup_u ε^{r-s} ‖J_ε u‖_{H^r} / ‖u‖_{H^s}` for `r > s`, swept over `1/ε`.
pub fn check_smoothing_gain(cfg: &LabConfig, s: f64, r: f64, n: usize, eps_list: &[f64]) -> Result<EstimateReport> {
    if r <= s {
        return Err(Error::Parameter(format!(
            "smoothing gain needs r > s, got r = {r}, s = {s}"
        )));
    }
    let grid = Grid::one_d(n)?;
    let fields = critical_fields(cfg, grid, s);
    let ratios = eps_list
        .iter()
        .map(|&eps| {
            fields
                .iter()
                .map(|u| eps.powf(r - s) * sobolev_norm(&mollify_unchecked(u, eps), r) / sobolev_norm(u, s))
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(EstimateReport::new(
        format!("smoothing_gain_s{s}_r{r}"),
        eps_list.iter().map(|e| 1.0 / e).collect(),
        ratios,
        Criterion::GrowthAtMost(cfg.threshold),
    ))
}

/// Dyadic mollifier widths `2^{-1}, …, 2^{-levels}`.
pub fn dyadic_eps(levels: u32) -> Vec<f64> {
    (1..=levels).map(|j| 0.5f64.powi(j as i32)).collect()
}

pub const ESTIMATE_IDS: [&str; 13] = [
    "cancellation",
    "cancellation_first_term",
    "kato_ponce",
    "te_commutator",
    "a3_sch2",
    "a3_ccf",
    "a3_sqg",
    "b12_sch2",
    "b12_ccf",
    "b12_sqg",
    "dong",
    "mollifier_rate",
    "smoothing_gain",
];

fn model_s(kind: ModelKind) -> f64 {
    kind.s_threshold() + 0.5
}

/// Runs one named check; `all` runs every id in order.
pub fn run_estimate(id: &str, cfg: &LabConfig) -> Result<Vec<EstimateReport>> {
    let rate_grid = 4096;
    Ok(match id {
        "all" => {
            let mut out = Vec::new();
            for id in ESTIMATE_IDS {
                out.extend(run_estimate(id, cfg)?);
            }
            out
        }
        "cancellation" => {
            let [cancelled, _] = check_cancellation(cfg)?;
            vec![cancelled]
        }
        "cancellation_first_term" => {
            let [_, first] = check_cancellation(cfg)?;
            vec![first]
        }
        "kato_ponce" => vec![check_kato_ponce(cfg)?],
        "te_commutator" => vec![check_te_commutator(cfg, &dyadic_eps(8))?],
        "a3_sch2" => check_a3(cfg, ModelKind::Sch2, model_s(ModelKind::Sch2))?.to_vec(),
        "a3_ccf" => check_a3(cfg, ModelKind::Ccf, model_s(ModelKind::Ccf))?.to_vec(),
        "a3_sqg" => check_a3(cfg, ModelKind::Sqg, model_s(ModelKind::Sqg))?.to_vec(),
        "b12_sch2" => vec![check_b12(cfg, ModelKind::Sch2, model_s(ModelKind::Sch2))?],
        "b12_ccf" => vec![check_b12(cfg, ModelKind::Ccf, model_s(ModelKind::Ccf))?],
        "b12_sqg" => vec![check_b12(cfg, ModelKind::Sqg, model_s(ModelKind::Sqg))?],
        "dong" => vec![check_dong(256, &(1..=64).collect::<Vec<_>>())?],
        "mollifier_rate" => {
            let eps: Vec<f64> = dyadic_eps(8).into_iter().skip(1).collect();
            vec![
                check_mollifier_rate(cfg, 4.0, 2.0, rate_grid, &eps)?,
                check_mollifier_rate(cfg, 4.0, 3.0, rate_grid, &eps)?,
            ]
        }
        "smoothing_gain" => {
            let eps: Vec<f64> = dyadic_eps(8).into_iter().skip(1).collect();
            vec![check_smoothing_gain(cfg, 4.0, 6.0, rate_grid, &eps)?]
        }
        other => {
            return Err(Error::Parameter(format!(
                "unknown estimate `{other}`; valid ids: all, {}",
                ESTIMATE_IDS.join(", ")
            )))
        }
    })
}
