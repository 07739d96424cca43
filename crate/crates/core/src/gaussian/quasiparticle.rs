//! Map between particle modes a_q and Bogoliubov quasiparticle modes
//! α_q = u_q a_q + v_q a†_{−q}, and the condensate ground state built from it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::quadratic::QuadraticForm;
use super::registry::ModeRegistry;
use super::state::GaussianState;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct BogoliubovMap {
    registry: ModeRegistry,
    u: Vec<f64>,
    v: Vec<f64>,
    partner: Vec<usize>,
}

impl BogoliubovMap {
    /// `coeffs` returns (u, v) for a mode label. Every mode must have its
    /// ±partner registered, and both members of a pair must get the same
    /// coefficients.
    pub fn new(registry: &ModeRegistry, mut coeffs: impl FnMut(f64) -> Result<(f64, f64)>) -> Result<Self> {
        let unpaired = registry.unpaired();
        if !unpaired.is_empty() {
            return Err(Error::Registry(format!("modes without a -q partner: {unpaired:?}")));
        }
        let mut u = Vec::with_capacity(registry.len());
        let mut v = Vec::with_capacity(registry.len());
        let mut partner = Vec::with_capacity(registry.len());
        for (i, &label) in registry.labels().iter().enumerate() {
            let (ui, vi) = coeffs(label)?;
            if !(ui.is_finite() && vi.is_finite()) || ((ui * ui - vi * vi) - 1.0).abs() > 1e-10 * ui * ui {
                return Err(Error::Domain {
                    what: "Bogoliubov coefficient u",
                    value: ui,
                    reason: "requires u^2 - v^2 = 1",
                });
            }
            u.push(ui);
            v.push(vi);
            partner.push(registry.partner(i).expect("checked above"));
        }
        for i in 0..registry.len() {
            let j = partner[i];
            if u[i] != u[j] || v[i] != v[j] {
                return Err(Error::Registry(format!(
                    "modes {} and {} form a pair but have different coefficients",
                    registry.labels()[i],
                    registry.labels()[j]
                )));
            }
        }
        Ok(BogoliubovMap {
            registry: registry.clone(),
            u,
            v,
            partner,
        })
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    /// T with r_quasi = T r_particle.
    pub fn to_quasi(&self) -> DMatrix<f64> {
        self.matrix(1.0)
    }

    /// T⁻¹ with r_particle = T⁻¹ r_quasi (a_q = u α_q − v α†_{−q}).
    pub fn to_particle(&self) -> DMatrix<f64> {
        self.matrix(-1.0)
    }

    fn matrix(&self, sign: f64) -> DMatrix<f64> {
        let m = self.registry.len();
        let mut t = DMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            let j = self.partner[i];
            t[(2 * i, 2 * i)] = self.u[i];
            t[(2 * i + 1, 2 * i + 1)] = self.u[i];
            t[(2 * i, 2 * j)] += sign * self.v[i];
            t[(2 * i + 1, 2 * j + 1)] -= sign * self.v[i];
        }
        t
    }

    /// Re-expresses a particle-basis state in quasiparticle quadratures.
    pub fn state_to_quasi(&self, state: &GaussianState) -> Result<GaussianState> {
        self.check(state.registry())?;
        Ok(state.transformed(&self.to_quasi(), None))
    }

    pub fn state_to_particle(&self, state: &GaussianState) -> Result<GaussianState> {
        self.check(state.registry())?;
        Ok(state.transformed(&self.to_particle(), None))
    }

    fn check(&self, registry: &ModeRegistry) -> Result<()> {
        if registry != &self.registry {
            return Err(Error::Registry("state registry does not match the map".into()));
        }
        Ok(())
    }

    /// Substitutes α = U a + W a† (W_{i,π(i)} = v_i) into a form written in
    /// quasiparticle operators. Constant (c-number) terms are dropped.
    pub fn to_particle_basis(&self, form: &QuadraticForm) -> Result<QuadraticForm> {
        let m = self.registry.len();
        if form.modes() != m {
            return Err(Error::Hamiltonian("form and map disagree on mode count".into()));
        }
        let uu = DMatrix::from_diagonal(&DVector::from_iterator(
            m,
            self.u.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        let mut ww = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
        for i in 0..m {
            ww[(i, self.partner[i])] = Complex64::new(self.v[i], 0.0);
        }

        let mut out = QuadraticForm::new(m);
        for c in form.components() {
            let nu = c.freq;
            // a†ᵀ X a†, a†ᵀ Y a and aᵀ Z a pieces at frequency ν
            let wt = ww.transpose();
            let x = &uu * &c.hop * &ww + &uu * &c.pair * &uu;
            let y = &uu * &c.hop * &uu
                + (&wt * &c.hop * &ww).transpose()
                + &uu * &c.pair * &ww
                + (&wt * &c.pair * &uu).transpose();
            let z = &wt * &c.hop * &uu + &wt * &c.pair * &ww;
            let lin_create = &uu * &c.lin;
            let lin_annihilate = ww.transpose() * &c.lin;
            for i in 0..m {
                for j in 0..m {
                    if x[(i, j)].norm() != 0.0 {
                        out.add_pair(i, j, x[(i, j)], nu)?;
                    }
                    if z[(i, j)].norm() != 0.0 {
                        out.add_pair_annihilation(i, j, z[(i, j)], nu)?;
                    }
                    if y[(i, j)].norm() != 0.0 {
                        if i == j {
                            out.add_diagonal(i, y[(i, i)], nu)?;
                        } else {
                            out.add_hop(i, j, y[(i, j)], nu)?;
                        }
                    }
                }
                if lin_create[i].norm() != 0.0 {
                    out.add_linear(i, lin_create[i], nu)?;
                }
                if lin_annihilate[i].norm() != 0.0 {
                    out.add_annihilation(i, lin_annihilate[i], nu)?;
                }
            }
        }
        Ok(out)
    }
}

/// Condensate ground state on a registry of ±q pairs: each pair is a
/// two-mode squeezed vacuum with tanh r = v/u and squeeze phase π, so that
/// ⟨a_q a_{−q}⟩ = −u v.
pub fn bogoliubov_ground_state(
    registry: &ModeRegistry,
    mut coeffs: impl FnMut(f64) -> Result<(f64, f64)>,
) -> Result<GaussianState> {
    let unpaired = registry.unpaired();
    if !unpaired.is_empty() {
        return Err(Error::Registry(format!("modes without a -q partner: {unpaired:?}")));
    }
    let mut state = GaussianState::vacuum(registry.clone());
    for i in 0..registry.len() {
        let j = registry.partner(i).expect("checked above");
        if j == i {
            return Err(Error::Registry("the zero-momentum mode cannot be paired".into()));
        }
        if j < i {
            continue;
        }
        let (u, v) = coeffs(registry.labels()[i])?;
        let r = (v / u).atanh();
        state = state.two_mode_squeeze(i, j, r, std::f64::consts::PI)?;
    }
    Ok(state)
}
