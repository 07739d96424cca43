//! Real symplectic matrices acting on interleaved quadratures
//! (x1, p1, ..., xM, pM), with x = (a + a†)/√2 and p = (a − a†)/(i√2).
//!
//! A matrix `S` here is always the Heisenberg-picture action on the
//! quadrature vector: U† r U = S r. Means transform as S μ and covariances
//! as S σ Sᵀ.

use nalgebra::{DMatrix, DVector};

/// The symplectic form Ω = ⊕ [[0, 1], [−1, 0]].
pub fn form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Largest entry of |S Ω Sᵀ − Ω|.
pub fn form_defect(s: &DMatrix<f64>) -> f64 {
    let omega = form(s.nrows() / 2);
    (s * &omega * s.transpose() - omega).amax()
}

pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> bool {
    s.is_square() && s.nrows() % 2 == 0 && form_defect(s) <= tol
}

/// exp[r(e^{iφ} a_i† a_j† − h.c.)]:
/// a_i → cosh r a_i + e^{iφ} sinh r a_j†, and the same with i ↔ j.
pub fn two_mode_squeeze(modes: usize, i: usize, j: usize, r: f64, phase: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * modes, 2 * modes);
    let (ch, sh) = (r.cosh(), r.sinh());
    let (c, sn) = (phase.cos(), phase.sin());
    for (a, b) in [(i, j), (j, i)] {
        let (xa, pa, xb, pb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        s[(xa, xa)] = ch;
        s[(pa, pa)] = ch;
        s[(xa, xb)] = sh * c;
        s[(xa, pb)] = sh * sn;
        s[(pa, xb)] = sh * sn;
        s[(pa, pb)] = -sh * c;
    }
    s
}

/// a_i → e^{−iθ} a_i.
pub fn phase_rotation(modes: usize, i: usize, theta: f64) -> DMatrix<f64> {
    let mut s = DMatrix::identity(2 * modes, 2 * modes);
    let (c, sn) = (theta.cos(), theta.sin());
    s[(2 * i, 2 * i)] = c;
    s[(2 * i, 2 * i + 1)] = sn;
    s[(2 * i + 1, 2 * i)] = -sn;
    s[(2 * i + 1, 2 * i + 1)] = c;
    s
}

/// Quadrature shift for a displacement a → a + α.
pub fn displacement(modes: usize, i: usize, re: f64, im: f64) -> DVector<f64> {
    let mut d = DVector::zeros(2 * modes);
    d[2 * i] = std::f64::consts::SQRT_2 * re;
    d[2 * i + 1] = std::f64::consts::SQRT_2 * im;
    d
}
