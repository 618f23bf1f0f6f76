//! Lie-type transport operators `L_ξ f = ξ·∇f + (div ξ) f`.
//!
//! Products are formed on the grid from 2/3-band samples and projected back
//! to the band, so for band-limited inputs every identity below (the 1D
//! divergence form `L_ξ f = ∂_x(ξ f)`, discrete integration by parts) holds
//! to round-off.

use crate::error::{Error, Result};
use crate::noise::NoiseBasis;
use crate::spectral::ops::{band_samples, dealias, divergence, from_band_products, perp_gradient};
use crate::spectral::{bessel, derivative, vector_sobolev_norm, Grid, GridField, SpectralField};

/// A correlation vector field `ξ` with cached grid samples.
#[derive(Debug, Clone)]
pub struct VectorFieldXi {
    components: Vec<SpectralField>,
    samples: Vec<Vec<f64>>,
    divergence: SpectralField,
    div_samples: Option<Vec<f64>>,
}

impl VectorFieldXi {
    /// One spectral component per spatial dimension. Components are
    /// projected onto the dealiased band.
    pub fn new(components: Vec<SpectralField>) -> Result<Self> {
        let grid = *components
            .first()
            .ok_or_else(|| Error::Parameter("vector field needs components".into()))?
            .grid();
        if components.len() != grid.dim() {
            return Err(Error::Parameter(format!(
                "{} components for a {}D grid",
                components.len(),
                grid.dim()
            )));
        }
        for c in &components {
            grid.ensure_same(c.grid())?;
        }
        let components: Vec<SpectralField> = components.iter().map(dealias).collect();
        let samples = components.iter().map(band_samples).collect();
        let divergence = divergence(&components);
        let div_samples = if divergence.max_abs_coeff() == 0.0 {
            None
        } else {
            Some(band_samples(&divergence))
        };
        Ok(Self {
            components,
            samples,
            divergence,
            div_samples,
        })
    }

    pub fn from_grid(components: &[GridField]) -> Result<Self> {
        Self::new(components.iter().map(GridField::to_spectral).collect())
    }

    /// Constant field `ξ ≡ c`.
    pub fn constant(grid: Grid, c: &[f64]) -> Result<Self> {
        let comps = c
            .iter()
            .map(|&v| GridField::from_fn(grid, |_| v).map(|f| f.to_spectral()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    /// `ξ = ∇^⊥ψ` on a 2D grid; divergence-free by construction.
    pub fn from_stream_function(psi: &SpectralField) -> Result<Self> {
        let (a, b) = perp_gradient(psi)?;
        Self::new(vec![a, b])
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[SpectralField] {
        &self.components
    }

    pub fn divergence(&self) -> &SpectralField {
        &self.divergence
    }

    /// Largest spectral coefficient of `div ξ`.
    pub fn max_divergence(&self) -> f64 {
        self.divergence.max_abs_coeff()
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        vector_sobolev_norm(&self.components, s)
    }

    /// Pointwise maximum of `|ξ|`.
    pub fn max_speed(&self) -> f64 {
        let len = self.samples[0].len();
        (0..len)
            .map(|j| self.samples.iter().map(|c| c[j] * c[j]).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub(crate) fn apply(&self, f: &SpectralField) -> SpectralField {
        let grid = *f.grid();
        let mut acc = match &self.div_samples {
            Some(d) => {
                let fv = band_samples(f);
                d.iter().zip(&fv).map(|(a, b)| a * b).collect()
            }
            None => vec![0.0; grid.len()],
        };
        for (axis, xi) in self.samples.iter().enumerate() {
            let grad = band_samples(&derivative(f, axis));
            for ((a, x), g) in acc.iter_mut().zip(xi).zip(&grad) {
                *a += x * g;
            }
        }
        from_band_products(grid, &acc)
    }

    /// Pure advection `ξ·∇f` (coincides with `L_ξ f` when `div ξ = 0`).
    pub(crate) fn advect(&self, f: &SpectralField) -> SpectralField {
        let grid = *f.grid();
        let mut acc = vec![0.0; grid.len()];
        for (axis, xi) in self.samples.iter().enumerate() {
            let grad = band_samples(&derivative(f, axis));
            for ((a, x), g) in acc.iter_mut().zip(xi).zip(&grad) {
                *a += x * g;
            }
        }
        from_band_products(grid, &acc)
    }
}

/// `L_ξ f` on spectral data.
pub fn lie_derivative_spectral(xi: &VectorFieldXi, f: &SpectralField) -> Result<SpectralField> {
    xi.grid().ensure_same(f.grid())?;
    Ok(xi.apply(f))
}

/// `L_ξ f = ξ·∇f + (div ξ) f`.
pub fn lie_derivative(xi: &VectorFieldXi, f: &GridField) -> Result<GridField> {
    lie_derivative_spectral(xi, &f.to_spectral()).map(|r| r.to_grid())
}

/// `L²_ξ f = L_ξ(L_ξ f)`.
pub fn lie_second_spectral(xi: &VectorFieldXi, f: &SpectralField) -> Result<SpectralField> {
    xi.grid().ensure_same(f.grid())?;
    Ok(xi.apply(&xi.apply(f)))
}

pub fn lie_second(xi: &VectorFieldXi, f: &GridField) -> Result<GridField> {
    lie_second_spectral(xi, &f.to_spectral()).map(|r| r.to_grid())
}

/// Itô correction `½ Σ_k L²_{ξ_k} f` over the (truncated) basis.
pub fn ito_correction_spectral(basis: &NoiseBasis, f: &SpectralField) -> Result<SpectralField> {
    let mut acc = SpectralField::zeros(*f.grid());
    for xi in basis.fields() {
        acc = &acc + &lie_second_spectral(xi, f)?;
    }
    Ok(acc.scaled(0.5))
}

pub fn ito_correction(basis: &NoiseBasis, f: &GridField) -> Result<GridField> {
    ito_correction_spectral(basis, &f.to_spectral()).map(|r| r.to_grid())
}

/// Commutator `[D^s, f] g = D^s(f g) - f D^s g`, both products dealiased.
pub fn ds_commutator_spectral(s: f64, f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    f.grid().ensure_same(g.grid())?;
    let grid = *f.grid();
    let fv = band_samples(f);
    let gv = band_samples(g);
    let dgv = band_samples(&bessel(g, s));
    let fg: Vec<f64> = fv.iter().zip(&gv).map(|(a, b)| a * b).collect();
    let fdg: Vec<f64> = fv.iter().zip(&dgv).map(|(a, b)| a * b).collect();
    let lhs = dealias(&bessel(&from_band_products(grid, &fg), s));
    Ok(&lhs - &from_band_products(grid, &fdg))
}

pub fn ds_commutator(s: f64, f: &GridField, g: &GridField) -> Result<GridField> {
    ds_commutator_spectral(s, &f.to_spectral(), &g.to_spectral()).map(|r| r.to_grid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::second_derivative;

    fn g1(n: usize) -> Grid {
        Grid::one_d(n).unwrap()
    }

    fn field(g: Grid, f: impl Fn(f64) -> f64) -> SpectralField {
        GridField::from_fn(g, |x| f(x[0])).unwrap().to_spectral()
    }

    fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
        (a - b).max_abs_coeff()
    }

    #[test]
    fn constant_xi_is_scaled_derivative() {
        let g = g1(64);
        let xi = VectorFieldXi::constant(g, &[1.7]).unwrap();
        let f = field(g, |x| x.sin() + 0.3 * (5.0 * x).cos());
        let l = lie_derivative_spectral(&xi, &f).unwrap();
        assert!(max_diff(&l, &derivative(&f, 0).scaled(1.7)) < 1e-14);
        let l2 = lie_second_spectral(&xi, &f).unwrap();
        assert!(max_diff(&l2, &second_derivative(&f).scaled(1.7 * 1.7)) < 1e-12);
    }

    #[test]
    fn sine_xi_on_cosine() {
        let g = g1(64);
        let xi = VectorFieldXi::new(vec![field(g, f64::sin)]).unwrap();
        let l = lie_derivative_spectral(&xi, &field(g, f64::cos)).unwrap();
        assert!(max_diff(&l, &field(g, |x| (2.0 * x).cos())) < 1e-15);
        let l2 = lie_second_spectral(&xi, &field(g, |_| 1.0)).unwrap();
        assert!(max_diff(&l2, &field(g, |x| (2.0 * x).cos())) < 1e-13);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let xi = VectorFieldXi::constant(g1(32), &[1.0]).unwrap();
        let f = GridField::zeros(g1(64));
        assert!(matches!(lie_derivative(&xi, &f), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn commutator_trivial_cases() {
        let g = g1(64);
        let f = field(g, |x| (x.sin()).exp());
        let h = field(g, |x| (2.0 * x).cos() + 0.1 * (7.0 * x).sin());
        let zero = ds_commutator_spectral(0.0, &f, &h).unwrap();
        assert_eq!(zero.max_abs_coeff(), 0.0);
        let c = field(g, |_| 2.0);
        let cc = ds_commutator_spectral(3.5, &c, &h).unwrap();
        assert!(cc.max_abs_coeff() < 1e-10);
    }

    #[test]
    fn stream_function_field_is_divergence_free() {
        let g = Grid::two_d(32).unwrap();
        let psi = GridField::from_fn(g, |x| x[0].cos()).unwrap().to_spectral();
        let xi = VectorFieldXi::from_stream_function(&psi).unwrap();
        assert_eq!(xi.max_divergence(), 0.0);
        let expect = GridField::from_fn(g, |x| -x[0].sin()).unwrap().to_spectral();
        assert!(xi.components()[0].max_abs_coeff() < 1e-15);
        assert!(max_diff(&xi.components()[1], &expect) < 1e-15);
    }
}
