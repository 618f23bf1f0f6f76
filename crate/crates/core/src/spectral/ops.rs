//! Fourier multipliers and dealiased products.
//!
//! Every operator here is diagonal in the Fourier basis. Multipliers with an
//! odd symbol (derivatives, Hilbert and Riesz transforms) zero the Nyquist
//! slots, where an odd symbol cannot be represented by a real field.

use rustfft::num_complex::Complex64;

use super::fft;
use super::field::SpectralField;
use super::grid::{Grid, Mode};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Relative size below which a mean coefficient counts as zero.
pub(crate) const MEAN_TOL: f64 = 1e-12;

pub(crate) fn require_zero_mean(f: &SpectralField, what: &str) -> Result<()> {
    let scale = f.max_abs_coeff().max(1.0);
    if f.coeffs()[0].norm() > MEAN_TOL * scale {
        return Err(Error::Domain(format!(
            "{what} requires a zero-mean field, mean is {:e}",
            f.mean()
        )));
    }
    Ok(())
}

/// `D^s = (1 - Δ)^{s/2}`, symbol `(1 + |k|²)^{s/2}`.
pub fn bessel(f: &SpectralField, s: f64) -> SpectralField {
    if s == 0.0 {
        return f.clone();
    }
    f.scale_by(|m| (1.0 + m.norm_sq()).powf(0.5 * s))
}

/// `Λ^s = (-Δ)^{s/2}`, symbol `|k|^s`. The mean slot is set to zero for
/// `s > 0`; for `s < 0` the input must already have zero mean.
pub fn homogeneous(f: &SpectralField, s: f64) -> Result<SpectralField> {
    if s == 0.0 {
        return Ok(f.clone());
    }
    if s < 0.0 {
        require_zero_mean(f, "negative-order homogeneous multiplier")?;
    }
    Ok(f.scale_by(|m| if m.is_zero() { 0.0 } else { m.norm().powf(s) }))
}

/// `∂/∂x_axis`.
pub fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    assert!(axis < f.grid().dim(), "axis {axis} out of range");
    f.map_modes(|m, c| {
        if m.nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            c * I * m.k[axis] as f64
        }
    })
}

/// Second derivative along the first axis.
pub fn second_derivative(f: &SpectralField) -> SpectralField {
    f.map_modes(|m, c| {
        if m.nyquist {
            Complex64::new(0.0, 0.0)
        } else {
            -c * (m.k[0] * m.k[0]) as f64
        }
    })
}

/// Periodic Hilbert transform, symbol `-i sgn(k)` (1D only).
pub fn hilbert(f: &SpectralField) -> Result<SpectralField> {
    if f.grid().dim() != 1 {
        return Err(Error::Unsupported(
            "the Hilbert transform is defined on the 1D torus only".into(),
        ));
    }
    Ok(f.map_modes(|m, c| {
        if m.nyquist || m.k[0] == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            -I * c * m.k[0].signum() as f64
        }
    }))
}

/// Riesz transform `R_j`, symbol `-i k_j / |k|` (2D only; the mean slot maps to 0).
pub fn riesz(f: &SpectralField, axis: usize) -> Result<SpectralField> {
    if f.grid().dim() != 2 {
        return Err(Error::Unsupported("Riesz transforms need a 2D grid".into()));
    }
    Ok(f.map_modes(|m, c| {
        if m.nyquist || m.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            -I * c * (m.k[axis] as f64 / m.norm())
        }
    }))
}

/// `R^⊥θ = (-R₂θ, R₁θ)`, i.e. symbols `(i k₂/|k|, -i k₁/|k|)`; maps `cos x₁`
/// to `(0, sin x₁)`.
pub fn riesz_perp(f: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    if f.grid().dim() != 2 {
        return Err(Error::Unsupported("Riesz transforms need a 2D grid".into()));
    }
    require_zero_mean(f, "the perpendicular Riesz transform")?;
    let r1 = riesz(f, 0)?;
    let r2 = riesz(f, 1)?;
    Ok((-&r2, r1))
}

/// Fourier profile of the `J_ε` kernel: 1 on `|ξ| ≤ 1`, 0 on `|ξ| ≥ 2`, and
/// `exp(1 - 1/(1 - (|ξ|-1)²))` in between.
pub fn mollifier_profile(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let y = r - 1.0;
        (1.0 - 1.0 / (1.0 - y * y)).exp()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "mollifier parameter must lie in (0,1), got {eps}"
        )))
    }
}

/// `J_ε`, symbol `ĵ(ε k)`.
pub fn mollify(f: &SpectralField, eps: f64) -> Result<SpectralField> {
    check_eps(eps)?;
    Ok(mollify_unchecked(f, eps))
}

pub(crate) fn mollify_unchecked(f: &SpectralField, eps: f64) -> SpectralField {
    // all-ones over the grid band: skip the pass so the identity is exact
    let max_k = (f.grid().n() / 2) as f64 * (f.grid().dim() as f64).sqrt();
    if eps * max_k <= 1.0 {
        return f.clone();
    }
    f.scale_by(|m| mollifier_profile(eps * m.norm()))
}

/// `J̃_ε = (1 - ε²Δ)^{-1}`, symbol `(1 + ε²|k|²)^{-1}`.
pub fn mollify_helmholtz(f: &SpectralField, eps: f64) -> Result<SpectralField> {
    check_eps(eps)?;
    Ok(helmholtz_unchecked(f, eps))
}

pub(crate) fn helmholtz_unchecked(f: &SpectralField, eps: f64) -> SpectralField {
    f.scale_by(|m| 1.0 / (1.0 + eps * eps * m.norm_sq()))
}

fn in_band(grid: &Grid, m: Mode) -> bool {
    let kmax = grid.dealias_max();
    m.k[0].abs() <= kmax && m.k[1].abs() <= kmax
}

/// 2/3-rule projection: keeps modes with `3|k_i| < n` on every axis.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let grid = *f.grid();
    f.map_modes(|m, c| if in_band(&grid, m) { c } else { Complex64::new(0.0, 0.0) })
}

pub fn is_dealiased(f: &SpectralField) -> bool {
    let grid = *f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .all(|(i, c)| in_band(&grid, grid.mode(i)) || *c == Complex64::new(0.0, 0.0))
}

/// Grid samples of the dealiased part of `f`; the input to a pointwise product.
pub fn band_samples(f: &SpectralField) -> Vec<f64> {
    fft::inverse_band(f.grid(), f.coeffs(), Some(f.grid().dealias_max()))
}

/// Transforms pointwise products of band samples back and applies the 2/3
/// projection, which removes every aliased contribution.
pub fn from_band_products(grid: Grid, values: &[f64]) -> SpectralField {
    let coeffs = fft::forward_band(&grid, values, Some(grid.dealias_max()));
    SpectralField::new(grid, coeffs).unwrap_or_else(|_| SpectralField::zeros(grid))
}

/// Dealiased product `P(Pa · Pb)`.
pub fn product(a: &SpectralField, b: &SpectralField) -> SpectralField {
    debug_assert_eq!(a.grid(), b.grid());
    let av = band_samples(a);
    let bv = band_samples(b);
    let vals: Vec<f64> = av.iter().zip(&bv).map(|(x, y)| x * y).collect();
    from_band_products(*a.grid(), &vals)
}

/// Divergence of a vector field given by its components.
pub fn divergence(components: &[SpectralField]) -> SpectralField {
    let grid = *components[0].grid();
    components
        .iter()
        .enumerate()
        .fold(SpectralField::zeros(grid), |acc, (axis, c)| &acc + &derivative(c, axis))
}

/// Perpendicular gradient `∇^⊥ψ = (-∂₂ψ, ∂₁ψ)` on a 2D grid.
pub fn perp_gradient(psi: &SpectralField) -> Result<(SpectralField, SpectralField)> {
    if psi.grid().dim() != 2 {
        return Err(Error::Unsupported("perpendicular gradient needs a 2D grid".into()));
    }
    Ok((-&derivative(psi, 1), derivative(psi, 0)))
}
