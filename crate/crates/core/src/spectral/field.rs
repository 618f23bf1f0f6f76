use std::ops::{Add, Mul, Neg, Sub};

use rustfft::num_complex::Complex64;

use super::fft;
use super::grid::{Grid, Mode};
use crate::error::{Error, Result};

/// Real samples of a field on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: Grid,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples for grid {grid}, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x₁, x₂)` at every node (`x₂ = 0` in 1D).
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn to_spectral(&self) -> SpectralField {
        SpectralField {
            grid: self.grid,
            coeffs: fft::forward(&self.grid, &self.values),
        }
    }
}

/// Fourier coefficients of a real field; `c·e^{ik·x}` has coefficient `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients for grid {grid}, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        if let Some((index, c)) = coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite {
                index,
                value: if c.re.is_finite() { c.im } else { c.re },
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Builds a real field from `(k, c)` pairs; the conjugate partner
    /// `(-k, conj c)` is filled in automatically.
    pub fn from_modes(grid: Grid, modes: &[([i64; 2], Complex64)]) -> Self {
        let mut out = Self::zeros(grid);
        for &(k, c) in modes {
            let i = grid.index_of(k);
            let j = grid.index_of([-k[0], -k[1]]);
            if i == j {
                out.coeffs[i] += Complex64::new(c.re, 0.0);
            } else {
                out.coeffs[i] += c;
                out.coeffs[j] += c.conj();
            }
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: [i64; 2]) -> Complex64 {
        self.coeffs[self.grid.index_of(k)]
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn to_grid(&self) -> GridField {
        GridField {
            grid: self.grid,
            values: fft::inverse(&self.grid, &self.coeffs),
        }
    }

    /// Applies a per-mode map `c ↦ f(mode, c)`.
    pub fn map_modes(&self, f: impl Fn(Mode, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(self.grid.mode(i), c))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    /// Multiplies each coefficient by a real symbol `σ(mode)`.
    pub fn scale_by(&self, symbol: impl Fn(Mode) -> f64) -> Self {
        self.map_modes(|m, c| c * symbol(m))
    }

    /// Largest violation of `coeff(-k) = conj(coeff(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| {
                let k = self.grid.mode(i).k;
                let j = self.grid.index_of([-k[0], -k[1]]);
                (self.coeffs[i] - self.coeffs[j].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Normalised L² inner product `(2π)^{-d} ∫ f g dx = Σ_k f̂(k) conj(ĝ(k))`.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    /// Weighted inner product `Σ_k w(k) f̂(k) conj(ĝ(k))`.
    pub fn weighted_inner(&self, other: &Self, weight: impl Fn(Mode) -> f64) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .enumerate()
            .map(|(i, (a, b))| weight(self.grid.mode(i)) * (a * b.conj()).re)
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b * alpha)
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * alpha).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}
