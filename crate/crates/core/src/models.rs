//! Operator splittings of the three transport-noise models into a regular
//! drift `b`, a singular drift `g` (including the Itô correction) and the
//! diffusion fields `h^k`, plus the mollified family `g_ε`, `h_ε`.
//!
//! A scalar linear SDE `dX = aX∘dW` rides along as a degenerate model so the
//! time steppers can be checked against an exact solution.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lie::VectorFieldXi;
use crate::noise::NoiseBasis;
use crate::spectral::ops::{
    band_samples, derivative, from_band_products, mollify_unchecked, product, require_zero_mean,
};
use crate::spectral::{
    bessel, hilbert, homogeneous_inner, lipschitz_norm_spectral, riesz_perp, sobolev_inner, Grid, GridField,
    SpectralField,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// Two-component Camassa–Holm system for `(u, η)` in 1D.
    Sch2,
    /// 1D nonlocal transport `θ_t + (Hθ)θ_x = 0`.
    Ccf,
    /// Surface quasi-geostrophic equation in 2D.
    Sqg,
    /// Scalar `dX = rate·X∘dW`, with one noise channel.
    Linear { rate: f64 },
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Sch2 => "sch2",
            ModelKind::Ccf => "ccf",
            ModelKind::Sqg => "sqg",
            ModelKind::Linear { .. } => "linear",
        }
    }

    /// Spatial dimension, or 0 for the scalar model.
    pub fn dim(&self) -> usize {
        match self {
            ModelKind::Sch2 | ModelKind::Ccf => 1,
            ModelKind::Sqg => 2,
            ModelKind::Linear { .. } => 0,
        }
    }

    /// Regularity index the well-posedness theory requires `s` to exceed.
    pub fn s_threshold(&self) -> f64 {
        match self {
            ModelKind::Sch2 => 5.5,
            ModelKind::Ccf => 3.5,
            ModelKind::Sqg => 4.0,
            ModelKind::Linear { .. } => f64::NEG_INFINITY,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    /// `linear` parses with rate 1; set the rate separately.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sch2" => Ok(ModelKind::Sch2),
            "ccf" => Ok(ModelKind::Ccf),
            "sqg" => Ok(ModelKind::Sqg),
            "linear" => Ok(ModelKind::Linear { rate: 1.0 }),
            other => Err(Error::Parameter(format!(
                "unknown model `{other}` (expected sch2, ccf, sqg or linear)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelState {
    Sch2 { u: SpectralField, eta: SpectralField },
    Ccf { theta: SpectralField },
    Sqg { theta: SpectralField },
    Scalar(f64),
}

impl ModelState {
    pub fn sch2(u: &GridField, eta: &GridField) -> Result<Self> {
        u.grid().ensure_same(eta.grid())?;
        if u.grid().dim() != 1 {
            return Err(Error::Unsupported("the Camassa–Holm system is 1D".into()));
        }
        Ok(ModelState::Sch2 {
            u: u.to_spectral(),
            eta: eta.to_spectral(),
        })
    }

    pub fn ccf(theta: &GridField) -> Result<Self> {
        if theta.grid().dim() != 1 {
            return Err(Error::Unsupported("the CCF model is 1D".into()));
        }
        Ok(ModelState::Ccf {
            theta: theta.to_spectral(),
        })
    }

    pub fn sqg(theta: &GridField) -> Result<Self> {
        if theta.grid().dim() != 2 {
            return Err(Error::Unsupported("the SQG model is 2D".into()));
        }
        let theta = theta.to_spectral();
        require_zero_mean(&theta, "the SQG state")?;
        Ok(ModelState::Sqg { theta })
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            ModelState::Sch2 { .. } => "sch2",
            ModelState::Ccf { .. } => "ccf",
            ModelState::Sqg { .. } => "sqg",
            ModelState::Scalar(_) => "scalar",
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.components().first().map(|c| c.grid())
    }

    pub fn components(&self) -> Vec<&SpectralField> {
        match self {
            ModelState::Sch2 { u, eta } => vec![u, eta],
            ModelState::Ccf { theta } | ModelState::Sqg { theta } => vec![theta],
            ModelState::Scalar(_) => Vec::new(),
        }
    }

    fn map(&self, f: impl Fn(&SpectralField) -> SpectralField, scalar: impl Fn(f64) -> f64) -> Self {
        match self {
            ModelState::Sch2 { u, eta } => ModelState::Sch2 { u: f(u), eta: f(eta) },
            ModelState::Ccf { theta } => ModelState::Ccf { theta: f(theta) },
            ModelState::Sqg { theta } => ModelState::Sqg { theta: f(theta) },
            ModelState::Scalar(x) => ModelState::Scalar(scalar(*x)),
        }
    }

    fn zip(
        &self,
        other: &Self,
        f: impl Fn(&SpectralField, &SpectralField) -> SpectralField,
        scalar: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        Ok(match (self, other) {
            (ModelState::Sch2 { u, eta }, ModelState::Sch2 { u: v, eta: e }) => {
                u.grid().ensure_same(v.grid())?;
                ModelState::Sch2 {
                    u: f(u, v),
                    eta: f(eta, e),
                }
            }
            (ModelState::Ccf { theta }, ModelState::Ccf { theta: t }) => {
                theta.grid().ensure_same(t.grid())?;
                ModelState::Ccf { theta: f(theta, t) }
            }
            (ModelState::Sqg { theta }, ModelState::Sqg { theta: t }) => {
                theta.grid().ensure_same(t.grid())?;
                ModelState::Sqg { theta: f(theta, t) }
            }
            (ModelState::Scalar(x), ModelState::Scalar(y)) => ModelState::Scalar(scalar(*x, *y)),
            _ => {
                return Err(Error::WrongVariant {
                    expected: self.variant_name(),
                    found: other.variant_name(),
                })
            }
        })
    }

    /// `self + alpha·other`.
    pub fn axpy(&self, alpha: f64, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.axpy(alpha, b), |x, y| x + alpha * y)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        self.map(|a| a.scaled(alpha), |x| alpha * x)
    }

    pub fn zeros_like(&self) -> Self {
        self.map(|a| SpectralField::zeros(*a.grid()), |_| 0.0)
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ModelState::Scalar(x) => x.is_finite(),
            _ => self.components().iter().all(|c| c.is_finite()),
        }
    }

    /// Spatial means per component (`[u, η]`, `[θ]`, or the scalar itself).
    pub fn means(&self) -> Vec<f64> {
        match self {
            ModelState::Scalar(x) => vec![*x],
            _ => self.components().iter().map(|c| c.mean()).collect(),
        }
    }

    /// `‖·‖_{L²}` summed in quadrature over components.
    pub fn l2_norm(&self) -> f64 {
        match self {
            ModelState::Scalar(x) => x.abs(),
            _ => self.components().iter().map(|c| c.inner(c)).sum::<f64>().sqrt(),
        }
    }

    /// `∫(u² + u_x² + η²)` with the normalized measure; SCH2 only.
    pub fn sch2_energy(&self) -> Result<f64> {
        match self {
            ModelState::Sch2 { u, eta } => Ok(sobolev_inner(u, u, 1.0) + eta.inner(eta)),
            other => Err(Error::WrongVariant {
                expected: "sch2",
                found: other.variant_name(),
            }),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        match self {
            ModelState::Scalar(x) => x.abs(),
            _ => self.components().iter().map(|c| c.max_abs_coeff()).fold(0.0, f64::max),
        }
    }
}

/// Either the identity or `J_ε`.
#[derive(Clone, Copy)]
struct Smoother(Option<f64>);

impl Smoother {
    fn apply(&self, f: &SpectralField) -> SpectralField {
        match self.0 {
            Some(eps) => mollify_unchecked(f, eps),
            None => f.clone(),
        }
    }

    fn cube(&self, f: &SpectralField) -> SpectralField {
        self.apply(&self.apply(&self.apply(f)))
    }
}

/// One model's operators bound to a noise basis and mollifier parameter.
#[derive(Debug, Clone)]
pub struct ModelOps {
    kind: ModelKind,
    basis: Arc<NoiseBasis>,
    eps: f64,
}

impl ModelOps {
    /// Accepts an owned basis or an `Arc` shared between several operator sets.
    pub fn new(kind: ModelKind, basis: impl Into<Arc<NoiseBasis>>, eps: f64) -> Result<Self> {
        let basis = basis.into();
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Parameter(format!(
                "mollifier parameter must lie in (0,1), got {eps}"
            )));
        }
        match kind {
            ModelKind::Linear { rate } if !rate.is_finite() => {
                return Err(Error::Parameter(format!("linear rate must be finite, got {rate}")));
            }
            ModelKind::Linear { .. } => {}
            _ => {
                if basis.grid().dim() != kind.dim() {
                    return Err(Error::Parameter(format!("{kind} needs a {}D noise basis", kind.dim())));
                }
                if kind == ModelKind::Sqg && basis.max_divergence() > 1e-12 {
                    return Err(Error::Parameter("SQG noise fields must be divergence-free".into()));
                }
            }
        }
        Ok(Self { kind, basis, eps })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn basis(&self) -> &NoiseBasis {
        &self.basis
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Number of driving Brownian motions.
    pub fn noise_dim(&self) -> usize {
        match self.kind {
            ModelKind::Linear { .. } => 1,
            _ => self.basis.len(),
        }
    }

    fn check(&self, x: &ModelState) -> Result<()> {
        let expected = match self.kind {
            ModelKind::Sch2 => "sch2",
            ModelKind::Ccf => "ccf",
            ModelKind::Sqg => "sqg",
            ModelKind::Linear { .. } => "scalar",
        };
        if x.variant_name() != expected {
            return Err(Error::WrongVariant {
                expected,
                found: x.variant_name(),
            });
        }
        if let Some(g) = x.grid() {
            self.basis.grid().ensure_same(g)?;
        }
        if let ModelState::Sqg { theta } = x {
            require_zero_mean(theta, "the SQG state")?;
        }
        Ok(())
    }

    fn xi(&self, k: usize) -> Result<&VectorFieldXi> {
        self.basis.field(k)
    }

    fn ito_sum(&self, f: &SpectralField) -> SpectralField {
        let mut acc = SpectralField::zeros(*f.grid());
        for xi in self.basis.fields() {
            acc = &acc + &xi.apply(&xi.apply(f));
        }
        acc
    }

    /// Regular drift: SCH2 `(-∂_x D^{-2}(½u² + u_x² + ½η²), -η u_x)`, zero otherwise.
    pub fn b(&self, x: &ModelState) -> Result<ModelState> {
        self.check(x)?;
        Ok(match x {
            ModelState::Sch2 { u, eta } => {
                let ux = derivative(u, 0);
                let uv = band_samples(u);
                let uxv = band_samples(&ux);
                let ev = band_samples(eta);
                let inner: Vec<f64> = uv
                    .iter()
                    .zip(&uxv)
                    .zip(&ev)
                    .map(|((a, b), c)| 0.5 * a * a + b * b + 0.5 * c * c)
                    .collect();
                let p = from_band_products(*u.grid(), &inner);
                let first = -&derivative(&bessel(&p, -2.0), 0);
                let second = -&product(eta, &ux);
                ModelState::Sch2 { u: first, eta: second }
            }
            other => other.zeros_like(),
        })
    }

    /// Transport part of the singular drift, each input smoothed by `j` and the
    /// product smoothed once more.
    fn transport(&self, x: &ModelState, j: Smoother) -> Result<ModelState> {
        Ok(match x {
            ModelState::Sch2 { u, eta } => {
                let ju = j.apply(u);
                let jux = derivative(&ju, 0);
                let jex = derivative(&j.apply(eta), 0);
                ModelState::Sch2 {
                    u: -&j.apply(&product(&ju, &jux)),
                    eta: -&j.apply(&product(&ju, &jex)),
                }
            }
            ModelState::Ccf { theta } => {
                let jt = j.apply(theta);
                let h = hilbert(&jt)?;
                ModelState::Ccf {
                    theta: -&j.apply(&product(&h, &derivative(&jt, 0))),
                }
            }
            ModelState::Sqg { theta } => {
                let jt = j.apply(theta);
                let (v1, v2) = riesz_perp(&jt)?;
                let grid = *theta.grid();
                let a: Vec<f64> = band_samples(&v1)
                    .iter()
                    .zip(band_samples(&derivative(&jt, 0)))
                    .zip(band_samples(&v2).iter().zip(band_samples(&derivative(&jt, 1))))
                    .map(|((p, q), (r, s))| p * q + r * s)
                    .collect();
                ModelState::Sqg {
                    theta: -&j.apply(&from_band_products(grid, &a)),
                }
            }
            ModelState::Scalar(_) => ModelState::Scalar(0.0),
        })
    }

    fn singular(&self, x: &ModelState, j: Smoother) -> Result<ModelState> {
        self.check(x)?;
        let transport = self.transport(x, j)?;
        let correction = match x {
            ModelState::Sch2 { u, eta } => {
                let m = bessel(&j.apply(u), 2.0);
                let cu = j.cube(&bessel(&self.ito_sum(&m), -2.0));
                let ce = j.cube(&self.ito_sum(&j.apply(eta)));
                ModelState::Sch2 { u: cu, eta: ce }
            }
            ModelState::Ccf { theta } => ModelState::Ccf {
                theta: j.cube(&self.ito_sum(&j.apply(theta))),
            },
            ModelState::Sqg { theta } => ModelState::Sqg {
                theta: j.cube(&self.ito_sum(&j.apply(theta))),
            },
            ModelState::Scalar(v) => match self.kind {
                ModelKind::Linear { rate } => ModelState::Scalar(rate * rate * v),
                _ => ModelState::Scalar(0.0),
            },
        };
        transport.axpy(0.5, &correction)
    }

    fn diffusion(&self, x: &ModelState, k: usize, j: Smoother) -> Result<ModelState> {
        self.check(x)?;
        if let (ModelState::Scalar(v), ModelKind::Linear { rate }) = (x, self.kind) {
            if k != 0 {
                return Err(Error::NoiseIndex { index: k, len: 1 });
            }
            return Ok(ModelState::Scalar(rate * v));
        }
        let xi = self.xi(k)?;
        Ok(match x {
            ModelState::Sch2 { u, eta } => {
                let m = bessel(&j.apply(u), 2.0);
                ModelState::Sch2 {
                    u: -&j.apply(&bessel(&xi.apply(&m), -2.0)),
                    eta: -&j.apply(&xi.apply(&j.apply(eta))),
                }
            }
            ModelState::Ccf { theta } => ModelState::Ccf {
                theta: -&j.apply(&xi.apply(&j.apply(theta))),
            },
            ModelState::Sqg { theta } => ModelState::Sqg {
                theta: -&j.apply(&xi.advect(&j.apply(theta))),
            },
            ModelState::Scalar(_) => unreachable!("scalar state handled above"),
        })
    }

    /// Singular drift including the Itô correction `½ Σ_k L²_{ξ_k}`.
    pub fn g(&self, x: &ModelState) -> Result<ModelState> {
        self.singular(x, Smoother(None))
    }

    /// Diffusion field for noise channel `k` (zero-based).
    pub fn h(&self, x: &ModelState, k: usize) -> Result<ModelState> {
        self.diffusion(x, k, Smoother(None))
    }

    pub fn g_eps(&self, x: &ModelState) -> Result<ModelState> {
        self.singular(x, Smoother(Some(self.eps)))
    }

    pub fn h_eps(&self, x: &ModelState, k: usize) -> Result<ModelState> {
        self.diffusion(x, k, Smoother(Some(self.eps)))
    }

    /// Drift of the Stratonovich form: `b` plus the mollified transport part,
    /// with no second-order correction.
    pub fn strat_drift(&self, x: &ModelState) -> Result<ModelState> {
        self.check(x)?;
        let t = self.transport(x, Smoother(Some(self.eps)))?;
        t.axpy(1.0, &self.b(x)?)
    }

    /// `(X, Y)` in the state space at regularity `s`: `H^s × H^{s-1}` for SCH2,
    /// `H^s` for CCF, homogeneous `Ḣ^s` for SQG.
    pub fn inner_at(&self, x: &ModelState, y: &ModelState, s: f64) -> Result<f64> {
        Ok(match (x, y) {
            (ModelState::Sch2 { u, eta }, ModelState::Sch2 { u: v, eta: e }) => {
                sobolev_inner(u, v, s) + sobolev_inner(eta, e, s - 1.0)
            }
            (ModelState::Ccf { theta }, ModelState::Ccf { theta: t }) => sobolev_inner(theta, t, s),
            (ModelState::Sqg { theta }, ModelState::Sqg { theta: t }) => homogeneous_inner(theta, t, s),
            (ModelState::Scalar(a), ModelState::Scalar(b)) => a * b,
            _ => {
                return Err(Error::WrongVariant {
                    expected: x.variant_name(),
                    found: y.variant_name(),
                })
            }
        })
    }

    pub fn norm_at(&self, x: &ModelState, s: f64) -> f64 {
        self.inner_at(x, x, s).unwrap_or(f64::NAN).max(0.0).sqrt()
    }

    /// State-space norm `‖X‖_X` at regularity `s`.
    pub fn x_norm(&self, x: &ModelState, s: f64) -> f64 {
        self.norm_at(x, s)
    }

    /// Weaker norm `‖X‖_Z = ‖X‖` at regularity `s - 2`.
    pub fn z_norm(&self, x: &ModelState, s: f64) -> f64 {
        self.norm_at(x, s - 2.0)
    }

    /// Discrete Lipschitz norm driving the cut-off.
    pub fn v_norm(&self, x: &ModelState) -> f64 {
        match x {
            ModelState::Sch2 { u, eta } => lipschitz_norm_spectral(u) + lipschitz_norm_spectral(eta),
            ModelState::Ccf { theta } | ModelState::Sqg { theta } => lipschitz_norm_spectral(theta),
            ModelState::Scalar(v) => v.abs(),
        }
    }

    /// Functional whose growth signals loss of regularity: the Lipschitz norm
    /// for SCH2, `‖θ_x‖_∞ + ‖Hθ_x‖_∞` for CCF and `‖∇θ‖_∞ + ‖∇R^⊥θ‖_∞` for SQG.
    pub fn blowup_functional(&self, x: &ModelState) -> Result<f64> {
        Ok(match x {
            ModelState::Ccf { theta } => {
                let tx = derivative(theta, 0);
                tx.to_grid().max_abs() + hilbert(&tx)?.to_grid().max_abs()
            }
            ModelState::Sqg { theta } => {
                let (v1, v2) = riesz_perp(theta)?;
                max_gradient(&[theta]) + max_gradient(&[&v1, &v2])
            }
            other => self.v_norm(other),
        })
    }

    /// Largest advecting speed of the deterministic flow.
    pub fn max_velocity(&self, x: &ModelState) -> Result<f64> {
        Ok(match x {
            ModelState::Sch2 { u, .. } => u.to_grid().max_abs(),
            ModelState::Ccf { theta } => hilbert(theta)?.to_grid().max_abs(),
            ModelState::Sqg { theta } => {
                let (v1, v2) = riesz_perp(theta)?;
                let a = v1.to_grid();
                let b = v2.to_grid();
                a.values()
                    .iter()
                    .zip(b.values())
                    .map(|(p, q)| p.hypot(*q))
                    .fold(0.0, f64::max)
            }
            ModelState::Scalar(_) => 0.0,
        })
    }
}

/// Pointwise max of the Frobenius norm of the Jacobian of the given components.
fn max_gradient(components: &[&SpectralField]) -> f64 {
    let dim = components[0].grid().dim();
    let grads: Vec<Vec<f64>> = components
        .iter()
        .flat_map(|c| (0..dim).map(move |a| derivative(c, a).to_grid().into_values()))
        .collect();
    (0..grads[0].len())
        .map(|j| grads.iter().map(|g| g[j] * g[j]).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::Decay;

    fn g1() -> Grid {
        Grid::one_d(64).unwrap()
    }

    fn sf(g: Grid, f: impl Fn(f64) -> f64) -> SpectralField {
        GridField::from_fn(g, |x| f(x[0])).unwrap().to_spectral()
    }

    fn close(a: &SpectralField, b: &SpectralField, tol: f64) {
        let d = (a - b).max_abs_coeff();
        assert!(d < tol, "difference {d:e} exceeds {tol:e}");
    }

    fn ops(kind: ModelKind, basis: NoiseBasis) -> ModelOps {
        ModelOps::new(kind, basis, 0.01).unwrap()
    }

    #[test]
    fn sch2_b_examples() {
        let g = g1();
        let m = ops(ModelKind::Sch2, NoiseBasis::empty(g));
        let zero = ModelState::Sch2 {
            u: SpectralField::zeros(g),
            eta: SpectralField::zeros(g),
        };
        assert_eq!(m.b(&zero).unwrap(), zero);
        let x = ModelState::Sch2 {
            u: SpectralField::zeros(g),
            eta: sf(g, f64::cos),
        };
        let ModelState::Sch2 { u, eta } = m.b(&x).unwrap() else {
            panic!()
        };
        close(&u, &sf(g, |x| 0.1 * (2.0 * x).sin()), 1e-15);
        assert!(eta.max_abs_coeff() < 1e-16);
    }

    #[test]
    fn sch2_empty_basis_g_and_constant_xi_h() {
        let g = g1();
        let u = sf(g, |x| x.sin() + 0.2 * (3.0 * x).cos());
        let eta = sf(g, |x| 0.5 * (2.0 * x).cos());
        let x = ModelState::Sch2 {
            u: u.clone(),
            eta: eta.clone(),
        };
        let m = ops(ModelKind::Sch2, NoiseBasis::empty(g));
        let ModelState::Sch2 { u: gu, eta: ge } = m.g(&x).unwrap() else {
            panic!()
        };
        close(&gu, &-&product(&u, &derivative(&u, 0)), 1e-15);
        close(&ge, &-&product(&u, &derivative(&eta, 0)), 1e-15);
        assert!(m.h(&x, 0).is_err());

        let c = 0.7;
        let basis = NoiseBasis::from_fields(g, vec![VectorFieldXi::constant(g, &[c]).unwrap()]).unwrap();
        let m = ops(ModelKind::Sch2, basis);
        let x = ModelState::Sch2 {
            u: sf(g, f64::cos),
            eta: SpectralField::zeros(g),
        };
        let ModelState::Sch2 { u: hu, .. } = m.h(&x, 0).unwrap() else {
            panic!()
        };
        close(&hu, &sf(g, |x| c * x.sin()), 1e-15);
    }

    #[test]
    fn wrong_variant_is_rejected() {
        let g = g1();
        let m = ops(ModelKind::Ccf, NoiseBasis::empty(g));
        let x = ModelState::Sch2 {
            u: SpectralField::zeros(g),
            eta: SpectralField::zeros(g),
        };
        assert!(matches!(m.g(&x), Err(Error::WrongVariant { .. })));
        assert!(ModelOps::new(ModelKind::Ccf, NoiseBasis::empty(g), 1.0).is_err());
    }

    #[test]
    fn ccf_cosine_example() {
        let g = g1();
        let m = ops(ModelKind::Ccf, NoiseBasis::empty(g));
        let x = ModelState::Ccf { theta: sf(g, f64::cos) };
        let ModelState::Ccf { theta } = m.g(&x).unwrap() else {
            panic!()
        };
        close(&theta, &sf(g, |x| x.sin().powi(2)), 1e-15);
        let k = ModelState::Ccf { theta: sf(g, |_| 2.0) };
        assert!(m.g(&k).unwrap().max_abs_coeff() < 1e-16);
        assert_eq!(m.b(&x).unwrap().max_abs_coeff(), 0.0);
    }

    #[test]
    fn mollified_equals_plain_on_band() {
        let g = g1();
        let basis = NoiseBasis::build_1d(g, 6, Decay::default(), 6.0).unwrap();
        let m = ops(ModelKind::Ccf, basis.clone());
        let x = ModelState::Ccf {
            theta: sf(g, |x| (x.sin()).exp()),
        };
        assert_eq!(m.g(&x).unwrap(), m.g_eps(&x).unwrap());
        for k in 0..6 {
            assert_eq!(m.h(&x, k).unwrap(), m.h_eps(&x, k).unwrap());
        }
        let m = ModelOps::new(ModelKind::Sch2, basis, 0.2).unwrap();
        let x = ModelState::Sch2 {
            u: sf(g, |x| (x.cos()).exp()),
            eta: sf(g, |x| x.sin()),
        };
        let jx = x.map(|f| mollify_unchecked(f, 0.2), |v| v);
        for k in 0..6 {
            let lhs = m.h_eps(&x, k).unwrap();
            let rhs = m.h(&jx, k).unwrap().map(|f| mollify_unchecked(f, 0.2), |v| v);
            assert!(lhs.sub(&rhs).unwrap().max_abs_coeff() < 1e-12);
        }
    }

    #[test]
    fn sqg_single_mode_is_steady() {
        let g = Grid::two_d(32).unwrap();
        let m = ops(ModelKind::Sqg, NoiseBasis::empty(g));
        let theta = GridField::from_fn(g, |x| x[0].cos()).unwrap();
        let x = ModelState::sqg(&theta).unwrap();
        assert!(m.g(&x).unwrap().max_abs_coeff() < 1e-15);
        let shifted = GridField::from_fn(g, |x| x[0].cos() + 1.0).unwrap();
        assert!(ModelState::sqg(&shifted).is_err());
    }

    #[test]
    fn linear_model_channels() {
        let g = g1();
        let m = ModelOps::new(ModelKind::Linear { rate: 0.5 }, NoiseBasis::empty(g), 0.5).unwrap();
        let x = ModelState::Scalar(2.0);
        assert_eq!(m.g(&x).unwrap(), ModelState::Scalar(0.25));
        assert_eq!(m.h(&x, 0).unwrap(), ModelState::Scalar(1.0));
        assert!(m.h(&x, 1).is_err());
        assert_eq!(m.noise_dim(), 1);
    }

    #[test]
    fn parse_kind() {
        assert_eq!("SCH2".parse::<ModelKind>().unwrap(), ModelKind::Sch2);
        assert!("euler".parse::<ModelKind>().is_err());
    }
}
