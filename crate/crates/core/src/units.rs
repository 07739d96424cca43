//! Laboratory parameters and the dimensionless scales derived from them.
//!
//! Everything in here is SI. The config layer converts the laboratory units
//! people actually quote (nm, cm³, 2π·MHz) on ingestion.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Unified atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of a ²³Na atom, kg.
pub const SODIUM_23_MASS: f64 = 22.989_769_28 * ATOMIC_MASS_UNIT;

/// Above this value of n0·a³ the gas is no longer considered dilute.
pub const DILUTENESS_LIMIT: f64 = 1e-3;
/// Below this value of k0²·V^(2/3) the discreteness of the momentum
/// spectrum is no longer negligible.
pub const CONTINUUM_LIMIT: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabParameters {
    /// kg
    pub atom_mass: f64,
    /// Number of atoms in the condensate mode, N0.
    pub n_condensate: f64,
    /// m³
    pub volume: f64,
    /// s-wave scattering length, m
    pub scattering_length: f64,
    /// One-photon Rabi frequency, rad/s
    pub rabi_frequency: f64,
    /// Detuning from the internal transition, rad/s
    pub detuning: f64,
}

/// Soft violations reported by [`LabParameters::warnings`] and
/// [`DerivedScales::warnings`]. None of these stop a computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParamWarning {
    NotDilute { gas_parameter: f64 },
    DiscreteSpectrum { k0_sq_v23: f64 },
}

impl std::fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamWarning::NotDilute { gas_parameter } => write!(
                f,
                "gas is not dilute: n0*a^3 = {gas_parameter:.3e} exceeds {DILUTENESS_LIMIT:e}"
            ),
            ParamWarning::DiscreteSpectrum { k0_sq_v23 } => write!(
                f,
                "momentum spectrum is coarse: k0^2 V^(2/3) = {k0_sq_v23:.3e} is below {CONTINUUM_LIMIT}"
            ),
        }
    }
}

impl LabParameters {
    /// The parameter set quoted for ²³Na in the worked example: N0 = 10⁷,
    /// V = 10⁻⁷ cm³, a = 2.8 nm, Ω = 2π·1.8 MHz, Δ = 2π·1 GHz.
    pub fn sodium_example() -> Self {
        LabParameters {
            atom_mass: SODIUM_23_MASS,
            n_condensate: 1e7,
            volume: 1e-7 * 1e-6,
            scattering_length: 2.8e-9,
            rabi_frequency: 2.0 * PI * 1.8e6,
            detuning: 2.0 * PI * 1e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("atom_mass", self.atom_mass),
            ("n_condensate", self.n_condensate),
            ("volume", self.volume),
            ("scattering_length", self.scattering_length),
            ("rabi_frequency", self.rabi_frequency),
            ("detuning", self.detuning),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name: name.to_string(),
                    value,
                });
            }
        }
        Ok(())
    }

    pub fn density(&self) -> f64 {
        self.n_condensate / self.volume
    }

    pub fn warnings(&self) -> Vec<ParamWarning> {
        let gas_parameter = self.density() * self.scattering_length.powi(3);
        let mut out = Vec::new();
        if gas_parameter >= DILUTENESS_LIMIT {
            out.push(ParamWarning::NotDilute { gas_parameter });
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedScales {
    /// n0 = N0/V, m⁻³
    pub density: f64,
    /// k0 = sqrt(8π a n0), m⁻¹
    pub healing_momentum: f64,
    /// E0 = ħk0²/2m expressed as an angular frequency, rad/s
    pub energy_scale: f64,
    /// Ω̃ = Ω²/(2Δ), rad/s
    pub effective_coupling: f64,
    /// Copied through so downstream code does not need the full parameter set.
    pub n_condensate: f64,
    pub volume: f64,
}

impl DerivedScales {
    pub fn coupling_ratio(&self) -> f64 {
        self.effective_coupling / self.energy_scale
    }

    /// Converts a dimensionless momentum y = |k|/k0 to m⁻¹.
    pub fn momentum(&self, y: f64) -> f64 {
        y * self.healing_momentum
    }

    pub fn warnings(&self) -> Vec<ParamWarning> {
        let k0_sq_v23 = self.healing_momentum.powi(2) * self.volume.powf(2.0 / 3.0);
        if k0_sq_v23 < CONTINUUM_LIMIT {
            vec![ParamWarning::DiscreteSpectrum { k0_sq_v23 }]
        } else {
            Vec::new()
        }
    }
}

pub fn derive(params: &LabParameters) -> Result<DerivedScales> {
    params.validate()?;
    let density = params.density();
    let k0_sq = 8.0 * PI * params.scattering_length * density;
    let healing_momentum = k0_sq.sqrt();
    let energy_scale = HBAR * k0_sq / (2.0 * params.atom_mass);
    let effective_coupling = params.rabi_frequency.powi(2) / (2.0 * params.detuning);

    for w in params.warnings() {
        log::warn!("{w}");
    }
    let scales = DerivedScales {
        density,
        healing_momentum,
        energy_scale,
        effective_coupling,
        n_condensate: params.n_condensate,
        volume: params.volume,
    };
    for w in scales.warnings() {
        log::warn!("{w}");
    }
    Ok(scales)
}
