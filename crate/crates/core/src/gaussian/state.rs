//! Multimode Gaussian states and their number-operator moments.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::registry::ModeRegistry;
use super::symplectic;
use crate::error::{Error, Result};

/// Negative variances down to this value are treated as round-off.
pub const ROUNDOFF_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    registry: ModeRegistry,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn vacuum(registry: ModeRegistry) -> Self {
        let dim = 2 * registry.len();
        GaussianState {
            registry,
            mean: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim) * 0.5,
        }
    }

    /// Builds a state from raw moments. The covariance must be square,
    /// symmetric and sized to the registry.
    pub fn from_moments(registry: ModeRegistry, mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = 2 * registry.len();
        if mean.len() != dim || cov.shape() != (dim, dim) {
            return Err(Error::Registry(format!(
                "moments have shape {} / {:?}, registry needs {dim}",
                mean.len(),
                cov.shape()
            )));
        }
        if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::Registry("covariance is not symmetric".into()));
        }
        Ok(GaussianState { registry, mean, cov })
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn modes(&self) -> usize {
        self.registry.len()
    }

    pub fn is_finite(&self) -> bool {
        self.mean.iter().chain(self.cov.iter()).all(|x| x.is_finite())
    }

    /// μ → S μ + d, σ → S σ Sᵀ.
    pub fn transformed(&self, s: &DMatrix<f64>, shift: Option<&DVector<f64>>) -> Self {
        let mut mean = s * &self.mean;
        if let Some(d) = shift {
            mean += d;
        }
        let cov = s * &self.cov * s.transpose();
        // keep exact symmetry; S σ Sᵀ drifts by rounding
        let cov = (&cov + cov.transpose()) * 0.5;
        GaussianState {
            registry: self.registry.clone(),
            mean,
            cov,
        }
    }

    /// The same moments relabelled onto another registry of equal size.
    pub fn with_registry(&self, registry: ModeRegistry) -> Result<Self> {
        if registry.len() != self.registry.len() {
            return Err(Error::Registry("registry size mismatch".into()));
        }
        Ok(GaussianState {
            registry,
            ..self.clone()
        })
    }

    pub fn two_mode_squeeze(&self, i: usize, j: usize, r: f64, phase: f64) -> Result<Self> {
        self.registry.check_index(i)?;
        self.registry.check_index(j)?;
        if i == j {
            return Err(Error::ModeCollision(i));
        }
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Domain {
                what: "squeeze strength r",
                value: r,
                reason: "must be finite and non-negative",
            });
        }
        let s = symplectic::two_mode_squeeze(self.modes(), i, j, r, phase);
        Ok(self.transformed(&s, None))
    }

    pub fn displace(&self, i: usize, alpha: Complex64) -> Result<Self> {
        self.registry.check_index(i)?;
        let mut out = self.clone();
        out.mean += symplectic::displacement(self.modes(), i, alpha.re, alpha.im);
        Ok(out)
    }

    pub fn rotate(&self, i: usize, theta: f64) -> Result<Self> {
        self.registry.check_index(i)?;
        Ok(self.transformed(&symplectic::phase_rotation(self.modes(), i, theta), None))
    }

    /// Smallest eigenvalue of σ + (i/2)Ω. Non-negative for physical states.
    pub fn uncertainty_margin(&self) -> f64 {
        let n = self.cov.nrows();
        let half_omega = symplectic::form(self.modes()) * 0.5;
        // Hermitian A + iB as the real symmetric [[A, −B], [B, A]].
        let mut big = DMatrix::zeros(2 * n, 2 * n);
        big.view_mut((0, 0), (n, n)).copy_from(&self.cov);
        big.view_mut((n, n), (n, n)).copy_from(&self.cov);
        big.view_mut((0, n), (n, n)).copy_from(&(-&half_omega));
        big.view_mut((n, 0), (n, n)).copy_from(&half_omega);
        SymmetricEigen::new(big).eigenvalues.min()
    }

    fn block(&self, i: usize, j: usize) -> [[f64; 2]; 2] {
        let c = &self.cov;
        [
            [c[(2 * i, 2 * j)], c[(2 * i, 2 * j + 1)]],
            [c[(2 * i + 1, 2 * j)], c[(2 * i + 1, 2 * j + 1)]],
        ]
    }

    // Overall size of the moments; sets the scale of rounding errors.
    fn magnitude(&self) -> f64 {
        self.cov.amax() + self.mean.norm_squared()
    }

    fn mean_pair(&self, i: usize) -> [f64; 2] {
        [self.mean[2 * i], self.mean[2 * i + 1]]
    }

    /// ⟨a_i† a_i⟩.
    pub fn mean_number(&self, i: usize) -> Result<f64> {
        self.registry.check_index(i)?;
        let b = self.block(i, i);
        let [x, p] = self.mean_pair(i);
        let n = 0.5 * (b[0][0] + b[1][1] - 1.0) + 0.5 * (x * x + p * p);
        clamp_roundoff(n, 1e-12f64.max(1e-14 * self.magnitude()))
    }

    /// Cov(n_i, n_j) by Wick's theorem. For i = j this is Var(n_i).
    ///
    /// With n = (x² + p²)/2 − 1/2 and symmetrised second moments σ,
    /// Cov(n_i, n_j) = ½ Tr(σ_ij σ_ji) + μ_iᵀ σ_ij μ_j − δ_ij/4.
    pub fn number_covariance(&self, i: usize, j: usize) -> Result<f64> {
        self.registry.check_index(i)?;
        self.registry.check_index(j)?;
        let s = self.block(i, j);
        let [xi, pi] = self.mean_pair(i);
        let [xj, pj] = self.mean_pair(j);
        // Tr(σ_ij σ_ji) with σ_ji = σ_ijᵀ
        let trace = s[0][0] * s[0][0] + s[0][1] * s[0][1] + s[1][0] * s[1][0] + s[1][1] * s[1][1];
        let drift = xi * (s[0][0] * xj + s[0][1] * pj) + pi * (s[1][0] * xj + s[1][1] * pj);
        let vacuum = if i == j { 0.25 } else { 0.0 };
        Ok(0.5 * trace + drift - vacuum)
    }

    /// Var(n_i − n_j).
    pub fn number_diff_variance(&self, i: usize, j: usize) -> Result<f64> {
        if i == j {
            self.registry.check_index(i)?;
            return Err(Error::ModeCollision(i));
        }
        let var = self.number_covariance(i, i)? + self.number_covariance(j, j)?
            - 2.0 * self.number_covariance(i, j)?;
        clamp_roundoff(var, ROUNDOFF_FLOOR.max(1e-14 * self.magnitude().powi(2)))
    }

    /// ξ = Var(n_i − n_j) / (n_i + n_j).
    pub fn xi(&self, i: usize, j: usize) -> Result<f64> {
        let var = self.number_diff_variance(i, j)?;
        let total = self.mean_number(i)? + self.mean_number(j)?;
        if total <= 0.0 {
            return Err(Error::UndefinedSqueezing(total));
        }
        Ok(var / total)
    }
}

fn clamp_roundoff(value: f64, floor: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -floor {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance(value))
    }
}
