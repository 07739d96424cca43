//! Closed-form loss estimates: Beliaev decay time of a phonon and the
//! fraction of scattered atoms that rescatter on the way out of the cloud.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::units::{DerivedScales, LabParameters, HBAR};

/// The Beliaev estimate assumes |k| ≫ k0; below this it is only indicative.
pub const BELIAEV_MIN_MOMENTUM: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossSection {
    /// σ = 4πa²
    FourPi,
    /// σ = 8πa²
    EightPi,
}

impl CrossSection {
    pub fn area(self, scattering_length: f64) -> f64 {
        let a2 = scattering_length * scattering_length;
        match self {
            CrossSection::FourPi => 4.0 * PI * a2,
            CrossSection::EightPi => 8.0 * PI * a2,
        }
    }
}

impl fmt::Display for CrossSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossSection::FourPi => f.write_str("4*pi*a^2"),
            CrossSection::EightPi => f.write_str("8*pi*a^2"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossEstimate {
    pub beliaev_time: f64,
    pub rescatter_fraction_8pi: f64,
    pub rescatter_fraction_4pi: f64,
    /// y ≥ 2, where the Beliaev formula applies.
    pub valid: bool,
}

impl LossEstimate {
    /// A fraction above one is not a probability; the estimate has broken down.
    pub fn unphysical(&self) -> bool {
        self.rescatter_fraction_4pi > 1.0 || self.rescatter_fraction_8pi > 1.0
    }
}

/// τ = m / (8π a² n0 ħ k) with k = y k0.
pub fn beliaev_time(y: f64, scales: &DerivedScales, params: &LabParameters) -> Result<f64> {
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::Domain {
            what: "momentum y",
            value: y,
            reason: "must be finite and positive",
        });
    }
    params.validate()?;
    let a = params.scattering_length;
    let k = scales.momentum(y);
    Ok(params.atom_mass / (8.0 * PI * a * a * scales.density * HBAR * k))
}

/// r = σ n0 V^{1/3} for a cubic cloud.
pub fn rescatter_fraction(params: &LabParameters, convention: CrossSection) -> f64 {
    convention.area(params.scattering_length) * params.density() * params.volume.cbrt()
}

pub fn estimate(y: f64, scales: &DerivedScales, params: &LabParameters) -> Result<LossEstimate> {
    let beliaev_time = beliaev_time(y, scales, params)?;
    let valid = y >= BELIAEV_MIN_MOMENTUM;
    if !valid {
        log::warn!("Beliaev estimate at y = {y} is outside |k| >> k0");
    }
    Ok(LossEstimate {
        beliaev_time,
        rescatter_fraction_8pi: rescatter_fraction(params, CrossSection::EightPi),
        rescatter_fraction_4pi: rescatter_fraction(params, CrossSection::FourPi),
        valid,
    })
}
