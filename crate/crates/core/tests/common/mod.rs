#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use saltflow::spectral::{Complex64, Grid, GridField, SpectralField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform grid values in [-1, 1).
pub fn white(grid: Grid, rng: &mut ChaCha8Rng) -> SpectralField {
    let v = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    GridField::new(grid, v).unwrap().to_spectral()
}

pub fn white_zero_mean(grid: Grid, rng: &mut ChaCha8Rng) -> SpectralField {
    let f = white(grid, rng);
    let c = f.coeff([0, 0]);
    &f - &SpectralField::from_modes(grid, &[([0, 0], c)])
}

/// Random trigonometric polynomial on `1 ≤ |k_i| ≤ modes` with `|k|^{-decay}` weights.
pub fn trig(grid: Grid, rng: &mut ChaCha8Rng, modes: i64, decay: f64) -> SpectralField {
    let mut list = Vec::new();
    let k2s = if grid.dim() == 2 { -modes..=modes } else { 0..=0 };
    for k2 in k2s {
        for k1 in -modes..=modes {
            if (k2, k1) <= (0, 0) {
                continue;
            }
            let r = ((k1 * k1 + k2 * k2) as f64).sqrt();
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            list.push(([k1, k2], c * r.powf(-decay)));
        }
    }
    SpectralField::from_modes(grid, &list)
}

pub fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    (a - b).max_abs_coeff()
}

/// Coefficient error relative to the larger of the two fields (at least 1).
pub fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    max_diff(a, b) / a.max_abs_coeff().max(b.max_abs_coeff()).max(1.0)
}

/// Evaluates the trigonometric polynomial with coefficients `f` at `x`.
pub fn eval(f: &SpectralField, x: [f64; 2]) -> f64 {
    let g = f.grid();
    (0..g.len())
        .map(|i| {
            let k = g.mode(i).k;
            let c = f.coeffs()[i];
            let ph = k[0] as f64 * x[0] + k[1] as f64 * x[1];
            c.re * ph.cos() - c.im * ph.sin()
        })
        .sum()
}
