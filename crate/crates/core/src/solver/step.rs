use super::cutoff::{chi_cutoff, CutoffParam};
use crate::error::{Error, Result};
use crate::models::{ModelOps, ModelState};

fn check_increments(ops: &ModelOps, dw: &[f64]) -> Result<()> {
    if dw.len() != ops.noise_dim() {
        return Err(Error::Parameter(format!(
            "{} Brownian increments for {} noise channels",
            dw.len(),
            ops.noise_dim()
        )));
    }
    Ok(())
}

/// Euler–Maruyama step of the cut-off, mollified Itô problem:
/// `X + χ²(b + g_ε) dt + χ Σ_k h_ε^k ΔW_k` with `χ = χ_R(‖X‖_V)`.
pub fn step_ito_em(x: &ModelState, ops: &ModelOps, dw: &[f64], dt: f64, cutoff: CutoffParam) -> Result<ModelState> {
    check_increments(ops, dw)?;
    let chi = chi_cutoff(ops.v_norm(x), cutoff);
    if chi == 0.0 {
        return Ok(x.clone());
    }
    let drift = ops.b(x)?.axpy(1.0, &ops.g_eps(x)?)?;
    let mut next = x.axpy(chi * chi * dt, &drift)?;
    for (k, w) in dw.iter().enumerate() {
        next = next.axpy(chi * w, &ops.h_eps(x, k)?)?;
    }
    Ok(next)
}

/// Heun predictor-corrector on the Stratonovich form, without cut-off.
pub fn step_strat_heun(x: &ModelState, ops: &ModelOps, dw: &[f64], dt: f64) -> Result<ModelState> {
    check_increments(ops, dw)?;
    let a0 = ops.strat_drift(x)?;
    let s0 = (0..dw.len()).map(|k| ops.h_eps(x, k)).collect::<Result<Vec<_>>>()?;
    let mut pred = x.axpy(dt, &a0)?;
    for (s, w) in s0.iter().zip(dw) {
        pred = pred.axpy(*w, s)?;
    }
    let a1 = ops.strat_drift(&pred)?;
    let mut next = x.axpy(0.5 * dt, &a0)?.axpy(0.5 * dt, &a1)?;
    for (k, (s, w)) in s0.iter().zip(dw).enumerate() {
        next = next.axpy(0.5 * w, s)?.axpy(0.5 * w, &ops.h_eps(&pred, k)?)?;
    }
    Ok(next)
}
