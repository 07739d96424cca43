//! Brute-force evolution in a truncated Fock basis of at most four modes.
//!
//! Used as an independent check of the Gaussian engine: states are plain
//! amplitude vectors, Hamiltonians are sparse matrices assembled from the
//! terms of a [`QuadraticForm`], and moments are summed over the basis.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::QuadraticForm;

pub const MAX_MODES: usize = 4;
pub const MAX_DIMENSION: usize = 1_000_000;
/// Largest connected subspace evolved by dense diagonalisation.
pub const DENSE_LIMIT: usize = 256;
/// Probability allowed beyond the cutoff when preparing a paired vacuum.
pub const TAIL_LIMIT: f64 = 1e-10;
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Occupation-number basis with a cutoff per mode, enumerated
/// lexicographically with mode 0 most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockSpace {
    cutoffs: Vec<usize>,
    strides: Vec<usize>,
    dim: usize,
}

impl FockSpace {
    pub fn new(modes: usize, n_max: usize) -> Result<Self> {
        Self::with_cutoffs(vec![n_max; modes])
    }

    pub fn with_cutoffs(cutoffs: Vec<usize>) -> Result<Self> {
        if cutoffs.is_empty() || cutoffs.len() > MAX_MODES {
            return Err(Error::Domain {
                what: "mode count",
                value: cutoffs.len() as f64,
                reason: "between 1 and 4 modes",
            });
        }
        let mut strides = vec![1; cutoffs.len()];
        let mut dim: usize = 1;
        for i in (0..cutoffs.len()).rev() {
            strides[i] = dim;
            dim = dim
                .checked_mul(cutoffs[i] + 1)
                .filter(|&d| d <= MAX_DIMENSION)
                .ok_or(Error::DimensionLimit(MAX_DIMENSION))?;
        }
        Ok(FockSpace { cutoffs, strides, dim })
    }

    pub fn modes(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Same modes with every cutoff doubled.
    pub fn doubled(&self) -> Result<Self> {
        Self::with_cutoffs(self.cutoffs.iter().map(|c| 2 * c.max(&1)).collect())
    }

    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.strides[mode]) % (self.cutoffs[mode] + 1)
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.modes()).map(|m| self.occupation(index, m)).collect()
    }

    pub fn index(&self, occupations: &[usize]) -> Option<usize> {
        if occupations.len() != self.modes() {
            return None;
        }
        let mut idx = 0;
        for (m, &n) in occupations.iter().enumerate() {
            if n > self.cutoffs[m] {
                return None;
            }
            idx += n * self.strides[m];
        }
        Some(idx)
    }

    fn check_mode(&self, i: usize) -> Result<()> {
        if i < self.modes() {
            Ok(())
        } else {
            Err(Error::UnknownMode(format!("index {i}")))
        }
    }

    // Applies a product of ladder operators, rightmost first. Returns the
    // new basis index and matrix element, or None when the result vanishes
    // or leaves the truncated space.
    fn apply(&self, index: usize, ops: &[(usize, bool)]) -> Option<(usize, f64)> {
        let mut idx = index;
        let mut amp = 1.0;
        for &(mode, create) in ops.iter().rev() {
            let n = self.occupation(idx, mode);
            if create {
                if n == self.cutoffs[mode] {
                    return None;
                }
                amp *= ((n + 1) as f64).sqrt();
                idx += self.strides[mode];
            } else {
                if n == 0 {
                    return None;
                }
                amp *= (n as f64).sqrt();
                idx -= self.strides[mode];
            }
        }
        Some((idx, amp))
    }
}

/// Smallest cutoff for which a two-mode squeezed vacuum with amplitude
/// ratio r leaves at most [`TAIL_LIMIT`] beyond it.
pub fn required_cutoff(ratio: f64) -> usize {
    let r2 = ratio * ratio;
    if r2 == 0.0 {
        return 0;
    }
    ((TAIL_LIMIT.ln() / r2.ln()).ceil() as usize).saturating_sub(1)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockMoments {
    pub n_i: f64,
    pub n_j: f64,
    pub var_diff: f64,
    /// None when n_i + n_j = 0.
    pub xi: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    space: FockSpace,
    amplitudes: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum(space: FockSpace) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); space.dim()];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        FockState { space, amplitudes }
    }

    pub fn from_amplitudes(space: FockSpace, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != space.dim() {
            return Err(Error::Domain {
                what: "amplitude count",
                value: amplitudes.len() as f64,
                reason: "must equal the space dimension",
            });
        }
        Ok(FockState { space, amplitudes })
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Population of basis states with some mode at its cutoff.
    pub fn tail_population(&self) -> f64 {
        let s = &self.space;
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(idx, _)| (0..s.modes()).any(|m| s.occupation(*idx, m) == s.cutoffs[m]))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn mean_number(&self, i: usize) -> Result<f64> {
        self.space.check_mode(i)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(idx, a)| a.norm_sqr() * self.space.occupation(idx, i) as f64)
            .sum())
    }

    pub fn moments(&self, i: usize, j: usize) -> Result<FockMoments> {
        self.space.check_mode(i)?;
        self.space.check_mode(j)?;
        if i == j {
            return Err(Error::ModeCollision(i));
        }
        let (mut ni, mut nj, mut d2) = (0.0, 0.0, 0.0);
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let (a_i, a_j) = (self.space.occupation(idx, i) as f64, self.space.occupation(idx, j) as f64);
            ni += p * a_i;
            nj += p * a_j;
            d2 += p * (a_i - a_j) * (a_i - a_j);
        }
        let var_diff = (d2 - (ni - nj) * (ni - nj)).max(0.0);
        let total = ni + nj;
        Ok(FockMoments {
            n_i: ni,
            n_j: nj,
            var_diff,
            xi: (total > 0.0).then(|| var_diff / total),
        })
    }
}

/// Σ_n r^n |n⟩_i |n⟩_j, normalised, with all other modes empty.
pub fn two_mode_squeezed_vacuum(space: &FockSpace, i: usize, j: usize, ratio: f64) -> Result<FockState> {
    paired_vacuum(space, &[(i, j, ratio)])
}

/// Product of two-mode squeezed vacua on disjoint mode pairs.
pub fn paired_vacuum(space: &FockSpace, pairs: &[(usize, usize, f64)]) -> Result<FockState> {
    let mut used = vec![false; space.modes()];
    for &(i, j, ratio) in pairs {
        space.check_mode(i)?;
        space.check_mode(j)?;
        if i == j || used[i] || used[j] {
            return Err(Error::ModeCollision(if used[i] || i == j { i } else { j }));
        }
        used[i] = true;
        used[j] = true;
        if !(ratio.abs() < 1.0) {
            return Err(Error::Domain {
                what: "squeezing ratio",
                value: ratio,
                reason: "magnitude must be below one",
            });
        }
        let cutoff = space.cutoffs[i].min(space.cutoffs[j]);
        let tail = (ratio * ratio).powi(cutoff as i32 + 1);
        if tail > TAIL_LIMIT {
            return Err(Error::Cutoff {
                tail,
                limit: TAIL_LIMIT,
                required: required_cutoff(ratio),
            });
        }
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); space.dim()];
    let mut stack = vec![(0usize, 1.0f64)];
    for &(i, j, ratio) in pairs {
        let cutoff = space.cutoffs[i].min(space.cutoffs[j]);
        let mut next = Vec::with_capacity(stack.len() * (cutoff + 1));
        for &(idx, amp) in &stack {
            let mut weight = 1.0;
            for n in 0..=cutoff {
                next.push((idx + n * (space.strides[i] + space.strides[j]), amp * weight));
                weight *= ratio;
            }
        }
        stack = next;
    }
    let norm = stack.iter().map(|(_, a)| a * a).sum::<f64>().sqrt();
    for (idx, a) in stack {
        amplitudes[idx] = Complex64::new(a / norm, 0.0);
    }
    Ok(FockState {
        space: space.clone(),
        amplitudes,
    })
}

type LadderOps = Vec<(usize, bool)>;

fn terms(form: &QuadraticForm) -> Result<Vec<(LadderOps, Complex64)>> {
    let mut out = Vec::new();
    for c in form.components() {
        if c.freq != 0.0 {
            return Err(Error::Hamiltonian(
                "only time-independent Hamiltonians can be evolved in the Fock basis".into(),
            ));
        }
        let m = form.modes();
        for i in 0..m {
            for j in 0..m {
                if c.hop[(i, j)] != Complex64::new(0.0, 0.0) {
                    out.push((vec![(i, true), (j, false)], c.hop[(i, j)]));
                }
                if c.pair[(i, j)] != Complex64::new(0.0, 0.0) {
                    out.push((vec![(i, true), (j, true)], c.pair[(i, j)]));
                }
            }
            if c.lin[i] != Complex64::new(0.0, 0.0) {
                out.push((vec![(i, true)], c.lin[i]));
            }
        }
    }
    Ok(out)
}

fn adjoint(ops: &[(usize, bool)]) -> LadderOps {
    ops.iter().rev().map(|&(m, c)| (m, !c)).collect()
}

/// Hamiltonian restricted to the basis states connected to a given support.
struct SparseHamiltonian {
    basis: Vec<usize>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseHamiltonian {
    fn build(space: &FockSpace, form: &QuadraticForm, support: &[usize]) -> Result<Self> {
        let mut ops = Vec::new();
        for (o, c) in terms(form)? {
            ops.push((adjoint(&o), c.conj()));
            ops.push((o, c));
        }
        let mut local: HashMap<usize, usize> = HashMap::new();
        let mut basis = Vec::new();
        let mut queue = VecDeque::new();
        for &s in support {
            if local.insert(s, basis.len()).is_none() {
                basis.push(s);
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            for (o, _) in &ops {
                if let Some((t, _)) = space.apply(s, o) {
                    if let std::collections::hash_map::Entry::Vacant(e) = local.entry(t) {
                        e.insert(basis.len());
                        basis.push(t);
                        queue.push_back(t);
                    }
                }
            }
        }
        // Row r of H collects ⟨r|H|s⟩; ⟨r|O|s⟩ is found by applying O† to r.
        let adjoints: Vec<(LadderOps, Complex64)> = ops.iter().map(|(o, c)| (adjoint(o), *c)).collect();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        let mut row: Vec<(usize, Complex64)> = Vec::new();
        for &r in &basis {
            row.clear();
            for (odag, c) in &adjoints {
                if let Some((s, amp)) = space.apply(r, odag) {
                    row.push((local[&s], c * amp));
                }
            }
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let col = row[k].0;
                let mut v = Complex64::new(0.0, 0.0);
                while k < row.len() && row[k].0 == col {
                    v += row[k].1;
                    k += 1;
                }
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(col);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(SparseHamiltonian {
            basis,
            row_ptr,
            cols,
            vals,
        })
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for r in 0..self.dim() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            out[r] = acc;
        }
    }

    fn max_row_sum(&self) -> f64 {
        (0..self.dim())
            .map(|r| self.vals[self.row_ptr[r]..self.row_ptr[r + 1]].iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn dense(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut h = DMatrix::zeros(d, d);
        for r in 0..d {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                h[(r, self.cols[k])] = self.vals[k];
            }
        }
        h
    }
}

fn evolve_dense(h: &SparseHamiltonian, psi: &[Complex64], t: f64) -> Vec<Complex64> {
    let eig = h.dense().symmetric_eigen();
    let v = &eig.eigenvectors;
    let x = DVector::from_column_slice(psi);
    let mut c = v.adjoint() * x;
    for (k, lambda) in eig.eigenvalues.iter().enumerate() {
        c[k] *= Complex64::from_polar(1.0, -lambda * t);
    }
    (v * c).as_slice().to_vec()
}

fn evolve_taylor(h: &SparseHamiltonian, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    let norm = h.max_row_sum();
    let steps = ((t.abs() * norm).ceil() as usize).max(1);
    let dt = t / steps as f64;
    let d = h.dim();
    let mut x = psi.to_vec();
    let mut term = vec![Complex64::new(0.0, 0.0); d];
    let mut next = vec![Complex64::new(0.0, 0.0); d];
    for _ in 0..steps {
        term.copy_from_slice(&x);
        let mut converged = false;
        for k in 1..80 {
            h.apply(&term, &mut next);
            let factor = Complex64::new(0.0, -dt / k as f64);
            let mut size: f64 = 0.0;
            for (tn, nx) in term.iter_mut().zip(&next) {
                *tn = factor * nx;
                size = size.max(tn.norm());
            }
            for (xi, tn) in x.iter_mut().zip(&term) {
                *xi += tn;
            }
            if size < 1e-18 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Integration("Taylor series did not converge".into()));
        }
    }
    Ok(x)
}

/// exp(−iHt)|ψ⟩ for a time-independent quadratic Hamiltonian.
pub fn evolve(state: &FockState, hamiltonian: &QuadraticForm, t: f64) -> Result<FockState> {
    let space = &state.space;
    if hamiltonian.modes() != space.modes() {
        return Err(Error::Hamiltonian(format!(
            "Hamiltonian acts on {} modes, state has {}",
            hamiltonian.modes(),
            space.modes()
        )));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite(t));
    }
    let support: Vec<usize> = (0..space.dim())
        .filter(|&i| state.amplitudes[i] != Complex64::new(0.0, 0.0))
        .collect();
    let h = SparseHamiltonian::build(space, hamiltonian, &support)?;
    let psi: Vec<Complex64> = h.basis.iter().map(|&i| state.amplitudes[i]).collect();
    let evolved = if h.dim() <= DENSE_LIMIT {
        evolve_dense(&h, &psi, t)
    } else {
        evolve_taylor(&h, &psi, t)?
    };
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); space.dim()];
    for (&idx, a) in h.basis.iter().zip(evolved) {
        amplitudes[idx] = a;
    }
    let out = FockState {
        space: space.clone(),
        amplitudes,
    };
    let drift = (out.norm() - state.norm()).abs();
    if drift > NORM_TOLERANCE {
        return Err(Error::Integration(format!("norm drift {drift:e}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bogoliubov;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn lexicographic_order() {
        let s = FockSpace::with_cutoffs(vec![1, 2]).unwrap();
        assert_eq!(s.dim(), 6);
        assert_eq!(s.occupations(0), vec![0, 0]);
        assert_eq!(s.occupations(1), vec![0, 1]);
        assert_eq!(s.occupations(3), vec![1, 0]);
        assert_eq!(s.index(&[1, 2]), Some(5));
        assert_eq!(s.index(&[2, 0]), None);
    }

    #[test]
    fn dimension_limit() {
        assert!(FockSpace::new(4, 30).is_ok());
        assert_eq!(FockSpace::new(4, 31), Err(Error::DimensionLimit(MAX_DIMENSION)));
        assert!(FockSpace::new(5, 1).is_err());
    }

    #[test]
    fn paired_vacuum_population() {
        let c = bogoliubov::coeffs(1.0).unwrap();
        let space = FockSpace::new(2, 12).unwrap();
        let st = two_mode_squeezed_vacuum(&space, 0, 1, -c.v / c.u).unwrap();
        let m = st.moments(0, 1).unwrap();
        assert!(close(m.n_i, c.v * c.v, 1e-9));
        assert!(close(c.v * c.v, 0.0774, 1e-3));
        assert!(m.var_diff < 1e-14);
        assert!((st.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_ratio_is_vacuum() {
        let space = FockSpace::new(2, 3).unwrap();
        let st = two_mode_squeezed_vacuum(&space, 0, 1, 0.0).unwrap();
        assert_eq!(st, FockState::vacuum(space));
        let m = st.moments(0, 1).unwrap();
        assert_eq!((m.n_i, m.n_j, m.var_diff, m.xi), (0.0, 0.0, 0.0, None));
    }

    #[test]
    fn cutoff_errors() {
        let space = FockSpace::new(2, 3).unwrap();
        assert!(matches!(
            two_mode_squeezed_vacuum(&space, 0, 1, 1.0),
            Err(Error::Domain { .. })
        ));
        match two_mode_squeezed_vacuum(&space, 0, 1, 0.5) {
            Err(Error::Cutoff { required, .. }) => {
                assert_eq!(required, required_cutoff(0.5));
                let ok = FockSpace::new(2, required).unwrap();
                assert!(two_mode_squeezed_vacuum(&ok, 0, 1, 0.5).is_ok());
                let short = FockSpace::new(2, required - 1).unwrap();
                assert!(two_mode_squeezed_vacuum(&short, 0, 1, 0.5).is_err());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let space = FockSpace::new(2, 10).unwrap();
        let st = two_mode_squeezed_vacuum(&space, 0, 1, 0.2).unwrap();
        let out = evolve(&st, &QuadraticForm::new(2), 3.0).unwrap();
        assert_eq!(out, st);
    }

    #[test]
    fn squeeze_generator_gives_sinh_squared() {
        // H = i g a†b† + h.c. generates a two-mode squeezer with r = g t.
        let space = FockSpace::new(2, 24).unwrap();
        let mut h = QuadraticForm::new(2);
        h.add_pair(0, 1, Complex64::new(0.0, 1.0), 0.0).unwrap();
        let r = 0.3;
        let out = evolve(&FockState::vacuum(space), &h, r).unwrap();
        let m = out.moments(0, 1).unwrap();
        assert!(close(m.n_i, r.sinh().powi(2), 1e-10));
        assert!(m.var_diff < 1e-12);
    }

    #[test]
    fn linear_drive_gives_coherent_state() {
        let space = FockSpace::new(1, 40).unwrap();
        let mut h = QuadraticForm::new(1);
        h.add_linear(0, Complex64::new(0.7, 0.0), 0.0).unwrap();
        let t = 2.0;
        let out = evolve(&FockState::vacuum(space), &h, t).unwrap();
        let n = out.mean_number(0).unwrap();
        let alpha2 = (0.7 * t) * (0.7f64 * t);
        assert!(close(n, alpha2, 1e-10));
        let var: f64 = out
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(k, a)| a.norm_sqr() * (k as f64 - n).powi(2))
            .sum();
        assert!(close(var, alpha2, 1e-9));
        assert!(out.tail_population() < 1e-12);
    }

    #[test]
    fn dense_and_taylor_agree() {
        let space = FockSpace::new(2, 8).unwrap();
        let mut h = QuadraticForm::new(2);
        h.add_pair(0, 1, Complex64::new(0.2, 0.4), 0.0).unwrap();
        h.add_hop(0, 1, Complex64::new(0.3, -0.1), 0.0).unwrap();
        h.add_linear(1, Complex64::new(0.5, 0.0), 0.0).unwrap();
        h.add_number(0, 1.3).unwrap();
        let st = FockState::vacuum(space.clone());
        let support = [0usize];
        let sh = SparseHamiltonian::build(&space, &h, &support).unwrap();
        let psi: Vec<Complex64> = sh.basis.iter().map(|&i| st.amplitudes[i]).collect();
        let a = evolve_dense(&sh, &psi, 0.8);
        let b = evolve_taylor(&sh, &psi, 0.8).unwrap();
        let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn time_dependent_rejected() {
        let space = FockSpace::new(1, 3).unwrap();
        let mut h = QuadraticForm::new(1);
        h.add_linear(0, Complex64::new(1.0, 0.0), 2.0).unwrap();
        assert!(matches!(evolve(&FockState::vacuum(space), &h, 1.0), Err(Error::Hamiltonian(_))));
    }
}
