use super::field::{GridField, SpectralField};
use super::ops::derivative;

/// `‖f‖_{H^s} = (Σ_k (1+|k|²)^s |f̂(k)|²)^{1/2}`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    sobolev_inner(f, f, s).max(0.0).sqrt()
}

/// `(f, g)_{H^s} = Σ_k (1+|k|²)^s f̂(k) conj(ĝ(k))`.
pub fn sobolev_inner(f: &SpectralField, g: &SpectralField, s: f64) -> f64 {
    if s == 0.0 {
        return f.inner(g);
    }
    f.weighted_inner(g, |m| (1.0 + m.norm_sq()).powf(s))
}

/// Homogeneous norm `‖Λ^s f‖_{L²}`; the mean slot does not contribute.
pub fn homogeneous_norm(f: &SpectralField, s: f64) -> f64 {
    homogeneous_inner(f, f, s).max(0.0).sqrt()
}

pub fn homogeneous_inner(f: &SpectralField, g: &SpectralField, s: f64) -> f64 {
    f.weighted_inner(g, |m| if m.is_zero() { 0.0 } else { m.norm_sq().powf(s) })
}

pub fn l2_norm(f: &SpectralField) -> f64 {
    sobolev_norm(f, 0.0)
}

/// Sum of component norms squared, then rooted: `‖(f₁,…,f_m)‖_{H^s}`.
pub fn vector_sobolev_norm(components: &[SpectralField], s: f64) -> f64 {
    components
        .iter()
        .map(|c| sobolev_inner(c, c, s))
        .sum::<f64>()
        .max(0.0)
        .sqrt()
}

pub fn sup_norm(f: &SpectralField) -> f64 {
    f.to_grid().max_abs()
}

/// Discrete `W^{1,∞}` norm: `max_j |f(x_j)| + max_j |∇f(x_j)|`, with the
/// gradient taken spectrally.
pub fn lipschitz_norm(f: &GridField) -> f64 {
    lipschitz_norm_spectral(&f.to_spectral())
}

pub fn lipschitz_norm_spectral(f: &SpectralField) -> f64 {
    let dim = f.grid().dim();
    let values = f.to_grid();
    let grads: Vec<GridField> = (0..dim).map(|a| derivative(f, a).to_grid()).collect();
    let max_grad = (0..f.grid().len())
        .map(|j| grads.iter().map(|g| g.values()[j] * g.values()[j]).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    values.max_abs() + max_grad
}
