//! Bogoliubov coefficients of the homogeneous condensate.
//!
//! Momenta are dimensionless, y = |k|/k0. Frequencies are in units of the
//! energy scale E0 = ħk0²/2m.

use crate::error::{Error, Result};

/// Smallest momentum accepted by [`coeffs`]. Below this the mode is, for all
/// practical purposes, the condensate itself.
pub const MIN_MOMENTUM: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BogoliubovCoeffs {
    pub y: f64,
    /// β = v/u
    pub beta: f64,
    pub u: f64,
    pub v: f64,
    /// ω_k / E0 = y·sqrt(2 + y²)
    pub omega_over_e0: f64,
}

impl BogoliubovCoeffs {
    /// (u − v)², the factor that suppresses direct scattering out of the
    /// condensate at low momentum.
    pub fn u_minus_v_sq(&self) -> f64 {
        (1.0 - self.beta) / (1.0 + self.beta)
    }
}

/// Bogoliubov coefficients at dimensionless momentum `y`.
///
/// β = 1 + y² − y·sqrt(2 + y²) is evaluated in the equivalent form
/// 1/(1 + y² + y·sqrt(2 + y²)), which has no cancellation at large y, and
/// 1 − β² is formed from 1 − β directly so that u stays accurate as y → 0.
pub fn coeffs(y: f64) -> Result<BogoliubovCoeffs> {
    if !y.is_finite() || y < MIN_MOMENTUM {
        return Err(Error::Domain {
            what: "momentum y",
            value: y,
            reason: "must be finite and at least 1e-8 (k = 0 is the condensate mode)",
        });
    }
    let root = (2.0 + y * y).sqrt();
    let denom = 1.0 + y * y + y * root;
    let beta = 1.0 / denom;
    let one_minus_beta = (y * y + y * root) / denom;
    let one_minus_beta_sq = one_minus_beta * (1.0 + beta);
    let u = one_minus_beta_sq.sqrt().recip();
    Ok(BogoliubovCoeffs {
        y,
        beta,
        u,
        v: beta * u,
        omega_over_e0: y * root,
    })
}

/// Combined coefficients u_{kk'} = u_k u_k' + v_k v_k' and
/// v_{kk'} = u_k v_k' + v_k u_k'.
pub fn pair_coeffs(y1: f64, y2: f64) -> Result<(f64, f64)> {
    let a = coeffs(y1)?;
    let b = coeffs(y2)?;
    Ok(combine(&a, &b))
}

pub(crate) fn combine(a: &BogoliubovCoeffs, b: &BogoliubovCoeffs) -> (f64, f64) {
    (a.u * b.u + a.v * b.v, a.u * b.v + a.v * b.u)
}
