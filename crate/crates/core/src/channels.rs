//! The two stimulated-scattering channels.
//!
//! Channel A (pair extraction): lasers tuned to δ = ω_k + ω_{k+Δk} promote
//! one member of a correlated (k, −k) pair to k + Δk, which leaves a
//! two-mode squeezing term between quasiparticles k + Δk and −k.
//!
//! Channel B (direct Bragg): lasers tuned to δ = ω_Δk scatter condensate
//! atoms straight into ±Δk, a linear drive on quasiparticle Δk.
//!
//! Both are evolved exactly as Gaussian states in the particle basis. The
//! dynamics runs in the interaction picture of the Bogoliubov Hamiltonian
//! and the state is rotated back to the lab frame before moments are taken.
//! Closed-form second-order results are provided alongside as cross-checks.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bogoliubov::{self, BogoliubovCoeffs};
use crate::error::{Error, Result};
use crate::gaussian::{
    bogoliubov_ground_state, evolve_between, propagator, BogoliubovMap, GaussianState, ModeRegistry,
    QuadraticForm, LABEL_TOLERANCE,
};
use crate::units::DerivedScales;

/// A run is flagged once any particle mode holds more than this fraction of N0.
pub const DEPLETION_FRACTION: f64 = 0.01;
/// A run is flagged once any quasiparticle mode holds more than sinh²(1).
pub fn quasiparticle_occupation_limit() -> f64 {
    1f64.sinh().powi(2)
}
pub const MAX_LADDER_RUNGS: usize = 6;

/// Default time grid for figure reproduction: t = 0 followed by five
/// logarithmically spaced times from 10 µs to 1 ms.
pub fn figure_times() -> Vec<f64> {
    let mut t = vec![0.0];
    t.extend((0..5).map(|i| 1e-5 * 10f64.powf(0.5 * i as f64)));
    t
}

/// Default time grid for direct Bragg scans: t = 0 followed by five
/// logarithmically spaced times from 10 ns to 1 µs. The condensate drive
/// is √N0 stronger than pair extraction, so the relevant times are shorter.
pub fn bragg_times() -> Vec<f64> {
    let mut t = vec![0.0];
    t.extend((0..5).map(|i| 1e-8 * 10f64.powf(0.5 * i as f64)));
    t
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dynamics {
    /// Keep only the resonant term selected by the detuning.
    RotatingWave,
    /// Full laser coupling on the modes k + nΔk, |n| ≤ rungs, and their
    /// negatives, integrated with all off-resonant terms.
    Ladder { rungs: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelASpec {
    pub y: f64,
    pub dy: f64,
    pub dynamics: Dynamics,
}

impl ChannelASpec {
    /// Δk = k/2, rotating-wave dynamics.
    pub fn new(y: f64) -> Self {
        Self::with_dy(y, 0.5 * y)
    }

    pub fn with_dy(y: f64, dy: f64) -> Self {
        ChannelASpec {
            y,
            dy,
            dynamics: Dynamics::RotatingWave,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("momentum y", self.y)?;
        positive("momentum transfer dy", self.dy)?;
        if (self.y - self.dy).abs() < LABEL_TOLERANCE {
            return Err(Error::Domain {
                what: "momentum y",
                value: self.y,
                reason: "mode k must differ from the directly coupled mode dk",
            });
        }
        if let Dynamics::Ladder { rungs } = self.dynamics {
            if rungs == 0 || rungs > MAX_LADDER_RUNGS {
                return Err(Error::Domain {
                    what: "ladder rungs",
                    value: rungs as f64,
                    reason: "must be between 1 and 6",
                });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelBSpec {
    pub dy: f64,
}

impl ChannelBSpec {
    pub fn validate(&self) -> Result<()> {
        positive("momentum transfer dy", self.dy)
    }
}

fn positive(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= bogoliubov::MIN_MOMENTUM {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value,
            reason: "must be finite and positive",
        })
    }
}

/// Validity flags attached to each evaluated point.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    /// A particle mode holds more than 1% of N0.
    pub depletion: bool,
    /// A quasiparticle mode holds more than sinh²(1).
    pub nonperturbative: bool,
}

impl Flags {
    pub fn any(&self) -> bool {
        self.depletion || self.nonperturbative
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.depletion {
            parts.push("depletion");
        }
        if self.nonperturbative {
            parts.push("nonperturbative");
        }
        f.write_str(&parts.join(";"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub t: f64,
    pub n_hi: f64,
    pub n_lo: f64,
    pub var_diff: f64,
    pub xi: f64,
    pub flags: Flags,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SqueezingResult {
    pub times: Vec<f64>,
    pub n_hi: Vec<f64>,
    pub n_lo: Vec<f64>,
    pub var_diff: Vec<f64>,
    pub xi: Vec<f64>,
    pub flags: Vec<Flags>,
}

impl SqueezingResult {
    fn push(&mut self, p: Point) {
        self.times.push(p.t);
        self.n_hi.push(p.n_hi);
        self.n_lo.push(p.n_lo);
        self.var_diff.push(p.var_diff);
        self.xi.push(p.xi);
        self.flags.push(p.flags);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn uv(label: f64) -> Result<(f64, f64)> {
    let c = bogoliubov::coeffs(label.abs())?;
    Ok((c.u, c.v))
}

fn missing_partners(modes: &ModeRegistry) -> Result<()> {
    let unpaired = modes.unpaired();
    if unpaired.is_empty() {
        Ok(())
    } else {
        Err(Error::MissingPartners(unpaired.into_iter().map(|l| -l).collect()))
    }
}

// Frequencies that cancel to rounding level are exact resonances.
fn snap(nu: f64, scale: f64) -> f64 {
    if nu.abs() <= 1e-12 * scale {
        0.0
    } else {
        nu
    }
}

/// Laser coupling written in quasiparticle operators, in the interaction
/// picture of the Bogoliubov Hamiltonian. For every registered mode q whose
/// neighbour q − Δk is also registered (q, q − Δk ≠ 0) it contains
///
/// ½Ω̃ e^{−iδt} [u_{q,q−} α_q† α_{q−} − u_{q−} v_q α_{−q} α_{q−} − u_q v_{q−} α_q† α†_{−q−}] + h.c.,
///
/// and, when ±Δk are registered, the condensate term
/// ½Ω̃ √N0 (u_Δk − v_Δk) e^{−iδt} (α†_Δk + α_{−Δk}) + h.c.
/// `delta` is the laser frequency difference in rad/s.
pub fn quasiparticle_laser_hamiltonian(
    modes: &ModeRegistry,
    dy: f64,
    delta: f64,
    scales: &DerivedScales,
) -> Result<QuadraticForm> {
    positive("momentum transfer dy", dy)?;
    missing_partners(modes)?;
    let labels = modes.labels();
    let coeffs: Vec<BogoliubovCoeffs> = labels
        .iter()
        .map(|&l| bogoliubov::coeffs(l.abs()))
        .collect::<Result<_>>()?;
    let omega = |i: usize| scales.energy_scale * coeffs[i].omega_over_e0;
    let half = 0.5 * scales.effective_coupling;
    let scale = delta.abs() + scales.energy_scale;
    let mut form = QuadraticForm::new(modes.len());

    for (q, &label) in labels.iter().enumerate() {
        let Some(lower) = modes.find(label - dy) else {
            continue;
        };
        let neg_q = modes.partner(q).expect("registry is closed under negation");
        let neg_lower = modes.partner(lower).expect("registry is closed under negation");
        let (cq, cl) = (&coeffs[q], &coeffs[lower]);
        let (u_ql, _) = bogoliubov::combine(cq, cl);

        let nu = snap(delta - omega(q) + omega(lower), scale);
        form.add_hop(q, lower, Complex64::new(half * u_ql, 0.0), nu)?;

        let nu = snap(delta + omega(q) + omega(lower), scale);
        form.add_pair_annihilation(neg_q, lower, Complex64::new(-half * cl.u * cq.v, 0.0), nu)?;

        let nu = snap(delta - omega(q) - omega(lower), scale);
        form.add_pair(q, neg_lower, Complex64::new(-half * cq.u * cl.v, 0.0), nu)?;
    }

    if let Some(plus) = modes.find(dy) {
        let minus = modes.partner(plus).expect("registry is closed under negation");
        let c = &coeffs[plus];
        let strength = half * scales.n_condensate.sqrt() * (c.u - c.v);
        let w = omega(plus);
        form.add_linear(plus, Complex64::new(strength, 0.0), snap(delta - w, scale))?;
        form.add_annihilation(minus, Complex64::new(strength, 0.0), snap(delta + w, scale))?;
    }
    Ok(form)
}

/// A fully assembled channel: modes, particle-basis generator and initial
/// state. Evaluates the state at arbitrary times.
#[derive(Clone, Debug)]
pub struct ChannelRun {
    pub registry: ModeRegistry,
    pub map: BogoliubovMap,
    /// Generator in the particle basis, interaction picture.
    pub form: QuadraticForm,
    pub ground: GaussianState,
    /// Index of the k + Δk (channel A) or +Δk (channel B) mode.
    pub hi: usize,
    /// Index of the −k (channel A) or −Δk (channel B) mode.
    pub lo: usize,
    frequencies: Vec<f64>,
    n_condensate: f64,
}

impl ChannelRun {
    pub fn channel_a(spec: &ChannelASpec, scales: &DerivedScales) -> Result<Self> {
        spec.validate()?;
        let (y, dy) = (spec.y, spec.dy);
        let mut labels = vec![y + dy, -(y + dy), y, -y];
        if let Dynamics::Ladder { rungs } = spec.dynamics {
            let r = rungs as i64;
            for n in -r..=r {
                let q = y + n as f64 * dy;
                if q.abs() < bogoliubov::MIN_MOMENTUM.max(LABEL_TOLERANCE) {
                    continue;
                }
                for l in [q, -q] {
                    if !labels.iter().any(|&m| (m - l).abs() < LABEL_TOLERANCE) {
                        labels.push(l);
                    }
                }
            }
        }
        let registry = ModeRegistry::new(labels)?;
        let omega = |q: f64| -> Result<f64> { Ok(bogoliubov::coeffs(q)?.omega_over_e0) };
        let delta = scales.energy_scale * (omega(y)? + omega(y + dy)?);
        let mut form = quasiparticle_laser_hamiltonian(&registry, dy, delta, scales)?;
        if spec.dynamics == Dynamics::RotatingWave {
            form = form.rotating_wave();
        }
        let hi = registry.index_of(y + dy)?;
        let lo = registry.index_of(-y)?;
        Self::assemble(registry, form, hi, lo, scales)
    }

    pub fn channel_b(spec: &ChannelBSpec, scales: &DerivedScales) -> Result<Self> {
        spec.validate()?;
        let registry = ModeRegistry::symmetric(&[spec.dy])?;
        let delta = scales.energy_scale * bogoliubov::coeffs(spec.dy)?.omega_over_e0;
        let form = quasiparticle_laser_hamiltonian(&registry, spec.dy, delta, scales)?.rotating_wave();
        Self::assemble(registry, form, 0, 1, scales)
    }

    fn assemble(registry: ModeRegistry, quasi_form: QuadraticForm, hi: usize, lo: usize, scales: &DerivedScales) -> Result<Self> {
        let map = BogoliubovMap::new(&registry, uv)?;
        let form = map.to_particle_basis(&quasi_form)?;
        let ground = bogoliubov_ground_state(&registry, uv)?;
        let frequencies = registry
            .labels()
            .iter()
            .map(|&l| Ok(scales.energy_scale * bogoliubov::coeffs(l.abs())?.omega_over_e0))
            .collect::<Result<_>>()?;
        Ok(ChannelRun {
            registry,
            map,
            form,
            ground,
            hi,
            lo,
            frequencies,
            n_condensate: scales.n_condensate,
        })
    }

    /// Interaction-picture state at time t, particle basis.
    pub fn interaction_state(&self, t: f64) -> Result<GaussianState> {
        evolve_between(&self.ground, &self.form, 0.0, t)
    }

    /// Lab-frame state: the interaction-picture state with every
    /// quasiparticle mode rotated by ω_q t.
    pub fn to_lab(&self, interaction: &GaussianState, t: f64) -> Result<GaussianState> {
        let mut quasi = self.map.state_to_quasi(interaction)?;
        for (i, w) in self.frequencies.iter().enumerate() {
            quasi = quasi.rotate(i, w * t)?;
        }
        self.map.state_to_particle(&quasi)
    }

    pub fn quasiparticle_state(&self, lab: &GaussianState) -> Result<GaussianState> {
        self.map.state_to_quasi(lab)
    }

    /// Lab-frame states at ascending `times`, each reported separately so a
    /// failure at late times leaves earlier ones intact.
    pub fn states(&self, times: &[f64]) -> Result<Vec<Result<GaussianState>>> {
        check_times(times)?;
        let mut out = Vec::with_capacity(times.len());
        if self.form.is_time_dependent() {
            let mut current = Ok(self.ground.clone());
            let mut t_prev = 0.0;
            for &t in times {
                current = current.and_then(|s| evolve_between(&s, &self.form, t_prev, t));
                t_prev = t;
                out.push(current.clone().and_then(|s| self.to_lab(&s, t)));
            }
        } else {
            for &t in times {
                let state = propagator(&self.form, 0.0, t)
                    .map(|p| p.apply(&self.ground))
                    .and_then(|s| if s.is_finite() { Ok(s) } else { Err(Error::NonFinite(t)) })
                    .and_then(|s| self.to_lab(&s, t));
                out.push(state);
            }
        }
        Ok(out)
    }

    pub fn point(&self, lab: &GaussianState, t: f64) -> Result<Point> {
        let n_hi = lab.mean_number(self.hi)?;
        let n_lo = lab.mean_number(self.lo)?;
        let var_diff = lab.number_diff_variance(self.hi, self.lo)?;
        let xi = lab.xi(self.hi, self.lo)?;
        let quasi = self.quasiparticle_state(lab)?;
        let mut flags = Flags::default();
        for i in 0..lab.modes() {
            if lab.mean_number(i)? > DEPLETION_FRACTION * self.n_condensate {
                flags.depletion = true;
            }
            if quasi.mean_number(i)? > quasiparticle_occupation_limit() {
                flags.nonperturbative = true;
            }
        }
        if ![n_hi, n_lo, var_diff, xi].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite(t));
        }
        Ok(Point {
            t,
            n_hi,
            n_lo,
            var_diff,
            xi,
            flags,
        })
    }

    pub fn points(&self, times: &[f64]) -> Result<Vec<Result<Point>>> {
        Ok(self
            .states(times)?
            .into_iter()
            .zip(times)
            .map(|(s, &t)| s.and_then(|s| self.point(&s, t)))
            .collect())
    }

    pub fn simulate(&self, times: &[f64]) -> Result<SqueezingResult> {
        let mut out = SqueezingResult::default();
        for p in self.points(times)? {
            out.push(p?);
        }
        Ok(out)
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    for (i, &t) in times.iter().enumerate() {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain {
                what: "time",
                value: t,
                reason: "times must be finite and non-negative",
            });
        }
        if i > 0 && t < times[i - 1] {
            return Err(Error::Domain {
                what: "time",
                value: t,
                reason: "times must be ascending",
            });
        }
    }
    Ok(())
}

pub fn simulate_channel_a(spec: &ChannelASpec, scales: &DerivedScales, times: &[f64]) -> Result<SqueezingResult> {
    ChannelRun::channel_a(spec, scales)?.simulate(times)
}

pub fn simulate_channel_b(spec: &ChannelBSpec, scales: &DerivedScales, times: &[f64]) -> Result<SqueezingResult> {
    ChannelRun::channel_b(spec, scales)?.simulate(times)
}

/// Second-order populations of channel A on resonance and the asymptotic
/// squeezing parameter they approach.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbativeA {
    pub n_hi: f64,
    pub n_lo: f64,
    pub xi_asymptotic: f64,
}

/// n_{k+Δk} = v₊² + ¼(Ω̃t)² u₊² v²_{kk₊}, n_{−k} = v² + ¼(Ω̃t)² u² v²_{kk₊}, and
/// ξ∞ = [(u₊² + v₊²)u₊² + (u² + v²)u² − 2u²u₊²] / (u₊² + u²).
pub fn perturbative_channel_a(spec: &ChannelASpec, scales: &DerivedScales, t: f64) -> Result<PerturbativeA> {
    spec.validate()?;
    let k = bogoliubov::coeffs(spec.y)?;
    let kp = bogoliubov::coeffs(spec.y + spec.dy)?;
    let (_, v12) = bogoliubov::combine(&k, &kp);
    let drive = 0.25 * (scales.effective_coupling * t).powi(2) * v12 * v12;
    let (u2, v2) = (k.u * k.u, k.v * k.v);
    let (up2, vp2) = (kp.u * kp.u, kp.v * kp.v);
    Ok(PerturbativeA {
        n_hi: vp2 + drive * up2,
        n_lo: v2 + drive * u2,
        xi_asymptotic: ((up2 + vp2) * up2 + (u2 + v2) * u2 - 2.0 * u2 * up2) / (up2 + u2),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerturbativeB {
    pub n_plus: f64,
    pub n_minus: f64,
    pub xi: f64,
}

/// Displaced Bogoliubov vacuum with quasiparticle amplitude
/// |α| = ½Ω̃√N0 (u − v) t: n₊ = v² + u²|α|², n₋ = v² + v²|α|², and the Wick
/// expansion collapses to Var(n₊ − n₋) = (u² − v²)²|α|² = |α|².
pub fn perturbative_channel_b(spec: &ChannelBSpec, scales: &DerivedScales, t: f64) -> Result<PerturbativeB> {
    spec.validate()?;
    let c = bogoliubov::coeffs(spec.dy)?;
    let amp = 0.5 * scales.effective_coupling * scales.n_condensate.sqrt() * (c.u - c.v) * t;
    let a2 = amp * amp;
    let (u2, v2) = (c.u * c.u, c.v * c.v);
    let n_plus = v2 + u2 * a2;
    let n_minus = v2 + v2 * a2;
    Ok(PerturbativeB {
        n_plus,
        n_minus,
        xi: a2 / (n_plus + n_minus),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Channel {
    /// Channel A, ξ between k + Δk and −k.
    PairExtraction,
    /// Channel B, ξ between Δk and −Δk.
    DirectBragg,
}

/// How Δk follows k in a channel-A scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DyRule {
    /// Δk = ratio · k
    Proportional(f64),
    /// Δk fixed
    Fixed(f64),
}

impl DyRule {
    pub fn apply(&self, y: f64) -> f64 {
        match *self {
            DyRule::Proportional(r) => r * y,
            DyRule::Fixed(dy) => dy,
        }
    }
}

/// One row of a scan. For channel B `y` holds Δk/k0.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub y: f64,
    pub t: f64,
    pub outcome: std::result::Result<Point, Error>,
}

/// Evaluates every (y, t) point, y-major. Points that fail are kept as
/// error rows; the scan itself only fails on an empty grid or bad times.
pub fn scan(
    channel: Channel,
    grid: &[f64],
    dy_rule: DyRule,
    dynamics: Dynamics,
    times: &[f64],
    scales: &DerivedScales,
) -> Result<Vec<ScanRow>> {
    if grid.is_empty() || times.is_empty() {
        return Err(Error::Domain {
            what: "grid size",
            value: 0.0,
            reason: "scan grids must be non-empty",
        });
    }
    check_times(times)?;
    let per_y: Vec<Vec<ScanRow>> = grid
        .par_iter()
        .map(|&y| {
            let run = match channel {
                Channel::PairExtraction => ChannelRun::channel_a(
                    &ChannelASpec {
                        y,
                        dy: dy_rule.apply(y),
                        dynamics,
                    },
                    scales,
                ),
                Channel::DirectBragg => ChannelRun::channel_b(&ChannelBSpec { dy: y }, scales),
            };
            let points = run.and_then(|r| r.points(times));
            match points {
                Ok(points) => points
                    .into_iter()
                    .zip(times)
                    .map(|(p, &t)| ScanRow { y, t, outcome: p })
                    .collect(),
                Err(e) => times
                    .iter()
                    .map(|&t| ScanRow {
                        y,
                        t,
                        outcome: Err(e.clone()),
                    })
                    .collect(),
            }
        })
        .collect();
    Ok(per_y.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{derive, LabParameters};

    fn scales() -> DerivedScales {
        derive(&LabParameters::sodium_example()).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(ChannelASpec::new(2.0).validate().is_ok());
        assert!(ChannelASpec::with_dy(1.0, 1.0).validate().is_err());
        assert!(ChannelASpec::with_dy(-1.0, 0.5).validate().is_err());
        let mut s = ChannelASpec::new(2.0);
        s.dynamics = Dynamics::Ladder { rungs: 7 };
        assert!(s.validate().is_err());
        assert!(ChannelBSpec { dy: 0.0 }.validate().is_err());
    }

    #[test]
    fn linear_term_only_for_condensate_pair() {
        let s = scales();
        let reg = ModeRegistry::symmetric(&[0.5]).unwrap();
        let delta = s.energy_scale * bogoliubov::coeffs(0.5).unwrap().omega_over_e0;
        let form = quasiparticle_laser_hamiltonian(&reg, 0.5, delta, &s).unwrap();
        let c = bogoliubov::coeffs(0.5).unwrap();
        let expected = 0.5 * s.effective_coupling * s.n_condensate.sqrt() * (c.u - c.v);
        let rwa = form.rotating_wave();
        assert_eq!(rwa.components().len(), 1);
        let comp = &rwa.components()[0];
        assert!(comp.hop.iter().chain(comp.pair.iter()).all(|x| x.norm() == 0.0));
        assert!((comp.lin[0].re - expected).abs() < 1e-9 * expected);
        assert_eq!(comp.lin[1].norm(), 0.0);
        for c in form.components() {
            assert!(c.hop.iter().chain(c.pair.iter()).all(|x| x.norm() == 0.0));
        }
    }

    #[test]
    fn channel_a_resonant_term() {
        let s = scales();
        let (y, dy) = (2.0, 1.0);
        let reg = ModeRegistry::new(vec![y + dy, -y, y, -(y + dy)]).unwrap();
        let w = |q: f64| bogoliubov::coeffs(q).unwrap().omega_over_e0;
        let delta = s.energy_scale * (w(y) + w(y + dy));
        let rwa = quasiparticle_laser_hamiltonian(&reg, dy, delta, &s).unwrap().rotating_wave();
        assert_eq!(rwa.components().len(), 1);
        let pair = &rwa.components()[0].pair;
        let (_, v12) = bogoliubov::pair_coeffs(y, y + dy).unwrap();
        let total = pair[(0, 1)] + pair[(1, 0)];
        assert!((total.re + 0.5 * s.effective_coupling * v12).abs() < 1e-9 * s.effective_coupling);
        assert!(total.im.abs() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                if (i, j) != (0, 1) && (i, j) != (1, 0) {
                    assert_eq!(pair[(i, j)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn missing_partner_listed() {
        let s = scales();
        let reg = ModeRegistry::new(vec![3.0, 2.0, -2.0]).unwrap();
        match quasiparticle_laser_hamiltonian(&reg, 1.0, 1.0, &s) {
            Err(Error::MissingPartners(m)) => assert_eq!(m, vec![-3.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn free_particle_ladder_is_pure_hopping() {
        let s = scales();
        let reg = ModeRegistry::symmetric(&[2000.0, 3000.0]).unwrap();
        let form = quasiparticle_laser_hamiltonian(&reg, 1000.0, 0.0, &s).unwrap();
        let half = 0.5 * s.effective_coupling;
        let mut hop_total = 0.0;
        let mut pair_total = 0.0;
        for c in form.components() {
            hop_total += c.hop.iter().map(|x| x.norm()).sum::<f64>();
            pair_total += c.pair.iter().map(|x| x.norm()).sum::<f64>();
        }
        assert!((hop_total - 2.0 * half).abs() < 1e-6 * half);
        assert!(pair_total < 1e-6 * half);
    }

    #[test]
    fn channel_a_ground_point() {
        let s = scales();
        let r = simulate_channel_a(&ChannelASpec::new(2.0), &s, &[0.0]).unwrap();
        let vp2 = bogoliubov::coeffs(3.0).unwrap().v.powi(2);
        let v2 = bogoliubov::coeffs(2.0).unwrap().v.powi(2);
        assert!((r.n_hi[0] - vp2).abs() < 1e-14);
        assert!((r.n_lo[0] - v2).abs() < 1e-14);
        assert!(!r.flags[0].any());
    }

    #[test]
    fn channel_b_ground_is_twin() {
        let s = scales();
        for dy in [0.1, 0.5, 2.0] {
            let r = simulate_channel_b(&ChannelBSpec { dy }, &s, &[0.0]).unwrap();
            assert!(r.xi[0].abs() < 1e-10);
        }
    }

    #[test]
    fn times_must_ascend() {
        let s = scales();
        assert!(simulate_channel_b(&ChannelBSpec { dy: 1.0 }, &s, &[1e-6, 0.0]).is_err());
        assert!(simulate_channel_b(&ChannelBSpec { dy: 1.0 }, &s, &[-1.0]).is_err());
    }

    #[test]
    fn scan_keeps_failed_points() {
        let s = scales();
        // y = 0.1 overflows long before 10 ms; the row is kept as an error.
        let rows = scan(
            Channel::PairExtraction,
            &[0.1, 2.0],
            DyRule::Proportional(0.5),
            Dynamics::RotatingWave,
            &[0.0, 1e-2],
            &s,
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].y, rows[0].t), (0.1, 0.0));
        assert!(rows[0].outcome.is_ok());
        assert!(rows[1].outcome.is_err());
        assert!(rows[3].outcome.as_ref().unwrap().flags.depletion);
        assert!(scan(Channel::DirectBragg, &[], DyRule::Fixed(1.0), Dynamics::RotatingWave, &[0.0], &s).is_err());
    }

    #[test]
    fn figure_time_grid() {
        let t = figure_times();
        assert_eq!(t.len(), 6);
        assert_eq!(t[0], 0.0);
        assert!((t[5] - 1e-3).abs() < 1e-18);
    }
}
