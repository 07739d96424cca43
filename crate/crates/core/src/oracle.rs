//! Cross-validation of the Gaussian engine against the truncated Fock
//! oracle on small-amplitude channel runs.

use std::fmt;

use rayon::prelude::*;

use crate::bogoliubov;
use crate::channels::{Channel, ChannelASpec, ChannelBSpec, ChannelRun};
use crate::error::{Error, Result};
use crate::fock::{self, FockSpace, FockState};
use crate::gaussian::GaussianState;
use crate::units::DerivedScales;

/// Largest relative deviation accepted between the two engines.
pub const MATCH_TOLERANCE: f64 = 1e-6;
/// Largest relative change of any moment when the cutoffs are doubled.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-8;
const MAX_PADDING: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scenario {
    pub channel: Channel,
    /// k/k0 for channel A; equal to `dy` for channel B.
    pub y: f64,
    pub dy: f64,
    pub t: f64,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.channel {
            Channel::PairExtraction => write!(f, "A y={} dy={} t={:.4e}", self.y, self.dy, self.t),
            Channel::DirectBragg => write!(f, "B dy={} t={:.4e}", self.dy, self.t),
        }
    }
}

/// Channel A and B at y ∈ {0.5, 1, 2} (Δk = k/2 for A, Δk = y for B), each at
/// two small amplitudes: squeezing gain gt ∈ {0.1, 0.3} for A and
/// quasiparticle displacement |α| ∈ {0.3, 0.8} for B.
pub fn default_grid(scales: &DerivedScales) -> Result<Vec<Scenario>> {
    let mut out = Vec::new();
    for y in [0.5, 1.0, 2.0] {
        let dy = 0.5 * y;
        let (_, v12) = bogoliubov::pair_coeffs(y, y + dy)?;
        let rate = 0.5 * scales.effective_coupling * v12;
        for gain in [0.1, 0.3] {
            out.push(Scenario {
                channel: Channel::PairExtraction,
                y,
                dy,
                t: gain / rate,
            });
        }
    }
    for dy in [0.5, 1.0, 2.0] {
        let c = bogoliubov::coeffs(dy)?;
        let rate = 0.5 * scales.effective_coupling * scales.n_condensate.sqrt() * (c.u - c.v);
        for amp in [0.3, 0.8] {
            out.push(Scenario {
                channel: Channel::DirectBragg,
                y: dy,
                dy,
                t: amp / rate,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub n_hi: f64,
    pub n_lo: f64,
    pub var_diff: f64,
    pub xi: f64,
}

impl Moments {
    fn as_array(&self) -> [f64; 4] {
        [self.n_hi, self.n_lo, self.var_diff, self.xi]
    }

    /// Largest relative deviation of any of the four moments from `reference`.
    pub fn deviation(&self, reference: &Moments) -> f64 {
        self.as_array()
            .iter()
            .zip(reference.as_array())
            .map(|(a, b)| (a - b).abs() / b.abs().max(1e-300))
            .fold(0.0, f64::max)
    }
}

/// Moments of a Gaussian state by the closed-form Wick expressions.
pub fn wick_moments(state: &GaussianState, i: usize, j: usize) -> Result<Moments> {
    Ok(Moments {
        n_hi: state.mean_number(i)?,
        n_lo: state.mean_number(j)?,
        var_diff: state.number_diff_variance(i, j)?,
        xi: state.xi(i, j)?,
    })
}

fn fock_moments(state: &FockState, i: usize, j: usize) -> Result<Moments> {
    let m = state.moments(i, j)?;
    Ok(Moments {
        n_hi: m.n_i,
        n_lo: m.n_j,
        var_diff: m.var_diff,
        xi: m.xi.ok_or(Error::UndefinedSqueezing(0.0))?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass,
    /// Converged oracle disagrees with the Gaussian engine.
    Mismatch,
    /// The oracle itself is not trustworthy at the chosen cutoffs.
    NotConverged(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub gaussian: Option<Moments>,
    pub fock: Option<Moments>,
    /// Cutoffs of the finer of the two Fock runs.
    pub cutoffs: Vec<usize>,
    pub tail: f64,
    /// Relative change of the Fock moments under cutoff doubling.
    pub convergence: f64,
    /// Relative deviation of the Gaussian moments from the Fock moments.
    pub deviation: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub rows: Vec<ScenarioReport>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == Verdict::Pass)
    }

    pub fn max_deviation(&self) -> f64 {
        self.rows.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }

    pub fn max_convergence(&self) -> f64 {
        self.rows.iter().map(|r| r.convergence).fold(0.0, f64::max)
    }

    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| r.verdict == Verdict::Mismatch).count()
    }

    pub fn unconverged(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| matches!(r.verdict, Verdict::NotConverged(_)))
            .count()
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let verdict = match &r.verdict {
                Verdict::Pass => "PASS".to_string(),
                Verdict::Mismatch => "MISMATCH".to_string(),
                Verdict::NotConverged(why) => format!("NOT-CONVERGED ({why})"),
            };
            writeln!(
                f,
                "{verdict:<9} {}  deviation={:.3e} convergence={:.3e} cutoffs={:?} tail={:.1e}",
                r.scenario, r.deviation, r.convergence, r.cutoffs, r.tail
            )?;
        }
        writeln!(
            f,
            "{} scenarios, {} mismatches, {} unconverged, max deviation {:.3e} (tolerance {:.0e})",
            self.rows.len(),
            self.mismatches(),
            self.unconverged(),
            self.max_deviation(),
            MATCH_TOLERANCE
        )
    }
}

/// Runs `scenarios` with the standard Wick moments.
pub fn run(scenarios: &[Scenario], scales: &DerivedScales) -> Result<OracleReport> {
    run_with(scenarios, scales, &wick_moments)
}

type MomentFn = dyn Fn(&GaussianState, usize, usize) -> Result<Moments> + Sync;

/// Runs `scenarios` with a caller-supplied Gaussian moment evaluator, so the
/// harness can be checked against deliberately broken formulas.
pub fn run_with(scenarios: &[Scenario], scales: &DerivedScales, moments: &MomentFn) -> Result<OracleReport> {
    if scenarios.is_empty() {
        return Err(Error::Domain {
            what: "oracle grid size",
            value: 0.0,
            reason: "at least one scenario is required",
        });
    }
    let rows = scenarios
        .par_iter()
        .map(|s| run_scenario(s, scales, moments))
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleReport { rows })
}

fn channel_run(s: &Scenario, scales: &DerivedScales) -> Result<ChannelRun> {
    match s.channel {
        Channel::PairExtraction => ChannelRun::channel_a(&ChannelASpec::with_dy(s.y, s.dy), scales),
        Channel::DirectBragg => ChannelRun::channel_b(&ChannelBSpec { dy: s.dy }, scales),
    }
}

fn run_scenario(s: &Scenario, scales: &DerivedScales, moments: &MomentFn) -> Result<ScenarioReport> {
    let run = channel_run(s, scales)?;
    let state = run.interaction_state(s.t)?;
    let gaussian = moments(&state, run.hi, run.lo)?;

    let labels = run.registry.labels();
    let mut pairs = Vec::new();
    let mut vacuum_cutoffs = vec![0; labels.len()];
    let mut drive_cutoffs = vec![0; labels.len()];
    for i in 0..labels.len() {
        let j = run.registry.partner(i).expect("channel registries are closed under negation");
        let c = bogoliubov::coeffs(labels[i].abs())?;
        let ratio = -c.v / c.u;
        if i < j {
            pairs.push((i, j, ratio));
        }
        let n = state.mean_number(i)?;
        let spread = (n * (n + 1.0)).sqrt();
        vacuum_cutoffs[i] = fock::required_cutoff(ratio);
        drive_cutoffs[i] = (n + 8.0 * spread + 6.0).ceil() as usize;
    }
    // Pad the vacuum cutoffs as far as the doubled space allows.
    let cutoffs = (0..=MAX_PADDING)
        .rev()
        .map(|pad| {
            vacuum_cutoffs
                .iter()
                .zip(&drive_cutoffs)
                .map(|(v, d)| (v + pad).max(*d))
                .collect::<Vec<_>>()
        })
        .find(|c| FockSpace::with_cutoffs(c.iter().map(|n| 2 * n).collect()).is_ok())
        .unwrap_or_else(|| vacuum_cutoffs.iter().zip(&drive_cutoffs).map(|(v, d)| *v.max(d)).collect());

    let mut report = ScenarioReport {
        scenario: *s,
        gaussian: Some(gaussian),
        fock: None,
        cutoffs: cutoffs.clone(),
        tail: f64::NAN,
        convergence: f64::NAN,
        deviation: f64::NAN,
        verdict: Verdict::NotConverged(String::new()),
    };
    let evolve = |space: FockSpace| -> Result<FockState> {
        let initial = fock::paired_vacuum(&space, &pairs)?;
        fock::evolve(&initial, &run.form, s.t)
    };
    let coarse_space = FockSpace::with_cutoffs(cutoffs)?;
    let fine_space = match coarse_space.doubled() {
        Ok(space) => space,
        Err(e) => {
            report.verdict = Verdict::NotConverged(e.to_string());
            return Ok(report);
        }
    };
    report.cutoffs = fine_space.cutoffs().to_vec();
    let (coarse, fine) = match (evolve(coarse_space), evolve(fine_space)) {
        (Ok(c), Ok(f)) => (c, f),
        (Err(e), _) | (_, Err(e)) => {
            report.verdict = Verdict::NotConverged(e.to_string());
            return Ok(report);
        }
    };
    report.tail = fine.tail_population();
    let fine_m = fock_moments(&fine, run.hi, run.lo)?;
    let coarse_m = fock_moments(&coarse, run.hi, run.lo)?;
    report.fock = Some(fine_m);
    report.convergence = coarse_m.deviation(&fine_m);
    report.deviation = gaussian.deviation(&fine_m);
    report.verdict = if !(report.convergence < CONVERGENCE_TOLERANCE) {
        Verdict::NotConverged(format!("doubling changed moments by {:.1e}", report.convergence))
    } else if report.deviation <= MATCH_TOLERANCE {
        Verdict::Pass
    } else {
        Verdict::Mismatch
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{derive, LabParameters};

    #[test]
    fn empty_grid_is_an_error() {
        let s = derive(&LabParameters::sodium_example()).unwrap();
        assert!(run(&[], &s).is_err());
    }

    #[test]
    fn grid_covers_both_channels() {
        let s = derive(&LabParameters::sodium_example()).unwrap();
        let g = default_grid(&s).unwrap();
        assert!(g.len() >= 12);
        for y in [0.5, 1.0, 2.0] {
            assert!(g.iter().any(|x| x.channel == Channel::PairExtraction && x.y == y));
            assert!(g.iter().any(|x| x.channel == Channel::DirectBragg && x.dy == y));
        }
    }

    #[test]
    fn single_scenario_agrees() {
        let s = derive(&LabParameters::sodium_example()).unwrap();
        let g = default_grid(&s).unwrap();
        let report = run(&g[4..5], &s).unwrap();
        assert!(report.passed(), "{report}");
    }
}
