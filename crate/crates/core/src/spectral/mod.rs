//! Periodic fields, FFT-backed Fourier multipliers and Sobolev norms.

mod fft;
mod field;
mod grid;
mod norms;
pub mod ops;

pub use field::{GridField, SpectralField};
pub use grid::{Grid, Mode};
pub use norms::{
    homogeneous_inner, homogeneous_norm, l2_norm, lipschitz_norm, lipschitz_norm_spectral, sobolev_inner, sobolev_norm,
    sup_norm, vector_sobolev_norm,
};
pub use ops::{
    bessel, dealias, derivative, hilbert, homogeneous, mollifier_profile, mollify, mollify_helmholtz, product, riesz,
    riesz_perp,
};

pub use rustfft::num_complex::Complex64;

/// `GridField → SpectralField`.
pub fn to_spectral(f: &GridField) -> SpectralField {
    f.to_spectral()
}

/// `SpectralField → GridField`.
pub fn to_grid(f: &SpectralField) -> GridField {
    f.to_grid()
}
