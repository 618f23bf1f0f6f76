//! Discrete Fourier transforms on the grid, normalised so that the field
//! `c·e^{ik·x}` has coefficient `c` at wavevector `k`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

struct Plans {
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut real = RealFftPlanner::<f64>::new();
            let mut complex = FftPlanner::<f64>::new();
            Arc::new(Plans {
                r2c: real.plan_fft_forward(n),
                c2r: real.plan_fft_inverse(n),
                forward: complex.plan_fft_forward(n),
                inverse: complex.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Axis slots `j` with `|k(j)| ≤ band`.
fn band_slots(n: usize, band: Option<i64>) -> impl Iterator<Item = usize> + Clone {
    let b = band.map_or(n, |b| (b.max(0) as usize).min(n / 2));
    let low = 0..=b.min(n - 1);
    let high = (n - b.min(n / 2)).max(b + 1)..n;
    low.chain(high)
}

/// Real samples to normalised Fourier coefficients.
pub fn forward(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    forward_band(grid, values, None)
}

/// As [`forward`], keeping only wavevectors with every `|k_i| ≤ band`.
pub fn forward_band(grid: &Grid, values: &[f64], band: Option<i64>) -> Vec<Complex64> {
    let n = grid.n();
    let h = n / 2 + 1;
    let p = plans(n);
    let scale = 1.0 / grid.len() as f64;
    let mut input = values.to_vec();
    let mut scratch = vec![ZERO; p.r2c.get_scratch_len()];
    let mut out = vec![ZERO; grid.len()];
    if grid.dim() == 1 {
        let mut half = vec![ZERO; h];
        p.r2c
            .process_with_scratch(&mut input, &mut half, &mut scratch)
            .expect("buffer lengths match the plan");
        for j in band_slots(n, band) {
            out[j] = if j < h { half[j] } else { half[n - j].conj() } * scale;
        }
        return out;
    }
    // rows along x₂ (real to half spectrum), then columns along x₁
    let mut half = vec![ZERO; n * h];
    for (row, dst) in input.chunks_exact_mut(n).zip(half.chunks_exact_mut(h)) {
        p.r2c
            .process_with_scratch(row, dst, &mut scratch)
            .expect("buffer lengths match the plan");
    }
    let mut cols = vec![ZERO; n * h];
    transpose::transpose(&half, &mut cols, h, n);
    let rows_needed = band.map_or(h, |b| (b.max(0) as usize + 1).min(h));
    let mut cscratch = vec![ZERO; p.forward.get_inplace_scratch_len()];
    p.forward
        .process_with_scratch(&mut cols[..rows_needed * n], &mut cscratch);
    // cols[j1][j0] holds (k(j0), j1) for j1 ≤ n/2; the rest is the mirror image
    let slots: Vec<usize> = band_slots(n, band).collect();
    for &j1 in &slots {
        let dst = &mut out[j1 * n..(j1 + 1) * n];
        if j1 < h {
            let src = &cols[j1 * n..(j1 + 1) * n];
            for &j0 in &slots {
                dst[j0] = src[j0] * scale;
            }
        } else {
            let src = &cols[(n - j1) * n..(n - j1 + 1) * n];
            for &j0 in &slots {
                dst[j0] = src[(n - j0) % n].conj() * scale;
            }
        }
    }
    out
}

/// Normalised Fourier coefficients back to real samples. Only the
/// non-negative half of the last axis is read, so the input is taken to be
/// Hermitian.
pub fn inverse(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    inverse_band(grid, coeffs, None)
}

/// As [`inverse`], ignoring wavevectors with some `|k_i| > band`.
pub fn inverse_band(grid: &Grid, coeffs: &[Complex64], band: Option<i64>) -> Vec<f64> {
    let n = grid.n();
    let h = n / 2 + 1;
    let p = plans(n);
    let mut scratch = vec![ZERO; p.c2r.get_scratch_len()];
    let mut out = vec![0.0; grid.len()];
    let mut real_row = |half: &mut [Complex64], dst: &mut [f64]| {
        // a Hermitian row has real end slots; drop round-off there
        half[0].im = 0.0;
        half[h - 1].im = 0.0;
        p.c2r
            .process_with_scratch(half, dst, &mut scratch)
            .expect("buffer lengths match the plan");
    };
    let slots: Vec<usize> = band_slots(n, band).collect();
    let rows_needed = band.map_or(h, |b| (b.max(0) as usize + 1).min(h));
    let copy_row = |src: &[Complex64], dst: &mut [Complex64]| {
        for &j in &slots {
            if j < dst.len() {
                dst[j] = src[j];
            }
        }
    };
    if grid.dim() == 1 {
        let mut half = vec![ZERO; h];
        copy_row(coeffs, &mut half);
        real_row(&mut half, &mut out);
        return out;
    }
    let mut rows = vec![ZERO; n * h];
    for j1 in 0..rows_needed {
        copy_row(&coeffs[j1 * n..(j1 + 1) * n], &mut rows[j1 * n..(j1 + 1) * n]);
    }
    let mut cscratch = vec![ZERO; p.inverse.get_inplace_scratch_len()];
    p.inverse
        .process_with_scratch(&mut rows[..rows_needed * n], &mut cscratch);
    let mut half = vec![ZERO; n * h];
    transpose::transpose(&rows, &mut half, n, h);
    for (src, dst) in half.chunks_exact_mut(h).zip(out.chunks_exact_mut(n)) {
        real_row(src, dst);
    }
    out
}
