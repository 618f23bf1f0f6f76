use crate::error::{Error, Result};

/// Radius `R > 1` of the cut-off `χ_R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffParam {
    r: f64,
}

impl CutoffParam {
    pub fn new(r: f64) -> Result<Self> {
        if r > 1.0 && r.is_finite() {
            Ok(Self { r })
        } else {
            Err(Error::Parameter(format!("cut-off radius must exceed 1, got {r}")))
        }
    }

    pub fn radius(&self) -> f64 {
        self.r
    }
}

/// `χ_R(v)`: exactly 1 on `[0, R]`, exactly 0 from `2R` on, and a `C^∞`
/// monotone transition between built from `e^{-1/t}`. Steepest slope `2/R`.
pub fn chi_cutoff(v: f64, cutoff: CutoffParam) -> f64 {
    let r = cutoff.r;
    if v <= r {
        return 1.0;
    }
    if v >= 2.0 * r || v.is_nan() {
        return 0.0;
    }
    let t = (v - r) / r;
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    1.0 - a / (a + b)
}
