//! Exit criteria. Each test prints one PASS/FAIL line per check.

use std::f64::consts::PI;

use num_complex::Complex64;

use relsqueeze::bogoliubov;
use relsqueeze::channels::{
    self, perturbative_channel_a, simulate_channel_a, Channel, ChannelASpec, ChannelRun, DyRule, Dynamics,
};
use relsqueeze::cli::{self, RunConfig};
use relsqueeze::gaussian::{bogoliubov_ground_state, symplectic, BogoliubovMap, GaussianState, ModeRegistry};
use relsqueeze::losses::{self, CrossSection};
use relsqueeze::oracle;
use relsqueeze::units::{derive, DerivedScales, LabParameters};

fn scales() -> (LabParameters, DerivedScales) {
    let p = LabParameters::sodium_example();
    (p, derive(&p).unwrap())
}

fn check(criterion: u32, what: &str, ok: bool, detail: String) -> bool {
    println!("criterion {criterion} [{}] {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn criterion_1_derived_scales() {
    let (_, s) = scales();
    let n0_cm3 = s.density * 1e-6;
    let e0_khz = s.energy_scale / (2.0 * PI) / 1e3;
    let ratio = s.coupling_ratio();
    let results = [
        check(1, "n0 = 1e14 cm^-3", rel(n0_cm3, 1e14) < 1e-12, format!("{n0_cm3:.6e}")),
        check(1, "E0 = 2pi x 1.5 kHz within 5%", rel(e0_khz, 1.5) <= 0.05, format!("{e0_khz:.4} kHz")),
        check(1, "coupling ratio = 1.0 within 10%", rel(ratio, 1.0) <= 0.10, format!("{ratio:.4}")),
    ];
    assert!(results.iter().all(|&r| r));
}

#[test]
fn criterion_2_worked_example() {
    let (_, s) = scales();
    let spec = ChannelASpec::with_dy(2.0, 1.0);
    let t = 10e-3;
    let p = perturbative_channel_a(&spec, &s, t).unwrap();
    let sim = simulate_channel_a(&spec, &s, &[t]).unwrap();
    let (n_hi, n_lo, xi) = (sim.n_hi[0], sim.n_lo[0], sim.xi[0]);
    let results = [
        check(
            2,
            "second-order populations ~60 (+-10%)",
            rel(p.n_hi, 60.0) <= 0.1 && rel(p.n_lo, 60.0) <= 0.1,
            format!("n_hi = {:.3}, n_lo = {:.3}", p.n_hi, p.n_lo),
        ),
        check(
            2,
            "second-order xi <= 0.05",
            p.xi_asymptotic <= 0.05,
            format!("xi = {:.5}", p.xi_asymptotic),
        ),
        check(
            2,
            "simulated populations ~60 (+-10%)",
            rel(n_hi, 60.0) <= 0.1 && rel(n_lo, 60.0) <= 0.1,
            format!("n_hi = {n_hi:.6e}, n_lo = {n_lo:.6e}"),
        ),
        check(2, "simulated xi <= 0.05", xi <= 0.05, format!("xi = {xi:.5}")),
    ];
    assert!(results.iter().all(|&r| r));
}

#[test]
fn criterion_3_asymptotic_squeezing() {
    let (_, s) = scales();
    let at = |y: f64| perturbative_channel_a(&ChannelASpec::new(y), &s, 0.0).unwrap().xi_asymptotic;
    let near = perturbative_channel_a(&ChannelASpec::with_dy(2.0, 1.0), &s, 0.0).unwrap().xi_asymptotic;
    let far = at(1e3);
    let results = [
        check(3, "xi at (2, 1) = 0.0065 within 1%", rel(near, 0.0065) <= 0.01, format!("{near:.6}")),
        check(3, "xi at y = 1000 <= 1e-4", far <= 1e-4, format!("{far:.3e}")),
        check(
            3,
            "xi decreases toward large y",
            [2.0, 5.0, 10.0, 100.0, 1e3].windows(2).all(|w| at(w[1]) < at(w[0])),
            "y = 2, 5, 10, 100, 1000".into(),
        ),
    ];
    assert!(results.iter().all(|&r| r));
}

#[test]
fn criterion_4_figure_shapes() {
    let (_, s) = scales();
    let ys: Vec<f64> = (0..9).map(|i| 1.0 + 0.5 * i as f64).collect();
    let times = channels::figure_times();
    let rows = channels::scan(
        Channel::PairExtraction,
        &ys,
        DyRule::Proportional(0.5),
        Dynamics::RotatingWave,
        &times,
        &s,
    )
    .unwrap();
    let xi = |r: &channels::ScanRow| r.outcome.as_ref().unwrap().xi;
    let by_y: Vec<Vec<f64>> = rows.chunks(times.len()).map(|c| c.iter().map(xi).collect()).collect();
    let fig1_time = by_y.iter().all(|v| v.windows(2).all(|w| w[1] < w[0]));
    let last: Vec<f64> = by_y.iter().map(|v| *v.last().unwrap()).collect();
    let fig1_y = last.windows(2).all(|w| w[1] < w[0]);

    let dys: Vec<f64> = (0..12).map(|i| 0.1 * 30f64.powf(i as f64 / 11.0)).collect();
    let btimes = channels::bragg_times();
    let rows = channels::scan(Channel::DirectBragg, &dys, DyRule::Fixed(0.0), Dynamics::RotatingWave, &btimes, &s).unwrap();
    let by_dy: Vec<Vec<f64>> = rows.chunks(btimes.len()).map(|c| c.iter().map(xi).collect()).collect();
    let fig2_zero = by_dy.iter().all(|v| v[0].abs() <= 1e-10);
    let fig2_time = by_dy.iter().all(|v| v.windows(2).all(|w| w[1] > w[0]));
    let fig2_min = (1..btimes.len()).all(|k| {
        let (best, _) = by_dy
            .iter()
            .enumerate()
            .min_by(|a, b| a.1[k].total_cmp(&b.1[k]))
            .unwrap();
        dys[best] < 1.0
    });
    let results = [
        check(4, "channel A: xi strictly decreasing in t, each y >= 1", fig1_time, format!("{} y values", ys.len())),
        check(4, "channel A: xi decreasing in y at the last time", fig1_y, format!("{:.3e} .. {:.3e}", last[0], last[last.len() - 1])),
        check(4, "channel B: xi = 0 at t = 0", fig2_zero, format!("{} dk values", dys.len())),
        check(4, "channel B: xi strictly increasing in t", fig2_time, format!("{} times", btimes.len())),
        check(4, "channel B: minimum over dk lies below k0 for t > 0", fig2_min, String::new()),
    ];
    assert!(results.iter().all(|&r| r));
}

#[test]
fn criterion_5_loss_estimates() {
    let (p, s) = scales();
    let tau = losses::beliaev_time(2.0, &s, &p).unwrap();
    let r4 = losses::rescatter_fraction(&p, CrossSection::FourPi);
    let r8 = losses::rescatter_fraction(&p, CrossSection::EightPi);
    let report = cli::derive_report(&RunConfig::sodium_example()).unwrap();
    let results = [
        check(5, "Beliaev time at 2k0 = 3.5 ms within 5%", rel(tau, 3.5e-3) <= 0.05, format!("{:.4} ms", tau * 1e3)),
        check(5, "rescattered fraction (4 pi a^2) within 15% of 0.42", rel(r4, 0.42) <= 0.15, format!("{r4:.4}")),
        check(
            5,
            "report shows both cross-section conventions",
            report.contains("4*pi*a^2") && report.contains("8*pi*a^2") && report.contains("convention"),
            format!("8 pi a^2 gives {r8:.4}"),
        ),
    ];
    assert!(results.iter().all(|&r| r));
}

#[test]
fn criterion_6_oracle_equivalence() {
    let (_, s) = scales();
    let grid = oracle::default_grid(&s).unwrap();
    let report = oracle::run(&grid, &s).unwrap();
    print!("{report}");
    let both = grid.iter().any(|g| g.channel == Channel::PairExtraction) && grid.iter().any(|g| g.channel == Channel::DirectBragg);
    let results = [
        check(6, ">= 12 scenarios over both channels", grid.len() >= 12 && both, format!("{} scenarios", grid.len())),
        check(
            6,
            "Gaussian moments match Fock oracle to 1e-6",
            report.passed() && report.max_deviation() <= 1e-6,
            format!(
                "max deviation {:.3e}, max doubling change {:.3e}",
                report.max_deviation(),
                report.max_convergence()
            ),
        ),
    ];
    assert!(results.iter().all(|&r| r));
}

#[test]
fn criterion_7_invariants() {
    let (_, s) = scales();
    let mut det_err: f64 = 0.0;
    for i in 0..200 {
        let y = 1e-3 * 1.05f64.powi(i);
        let c = bogoliubov::coeffs(y).unwrap();
        det_err = det_err.max((c.u * c.u - c.v * c.v - 1.0).abs());
    }

    let mut form_err: f64 = 0.0;
    form_err = form_err.max(symplectic::form_defect(&symplectic::two_mode_squeeze(4, 0, 3, 1.3, 0.4)));
    form_err = form_err.max(symplectic::form_defect(&symplectic::phase_rotation(4, 2, 2.2)));
    let run_a = ChannelRun::channel_a(&ChannelASpec::new(2.0), &s).unwrap();
    form_err = form_err.max(symplectic::form_defect(&run_a.map.to_quasi()));
    form_err = form_err.max(symplectic::form_defect(&run_a.map.to_particle()));
    for t in [1e-4, 1e-3] {
        let p = relsqueeze::gaussian::propagator(&run_a.form, 0.0, t).unwrap();
        form_err = form_err.max(symplectic::form_defect(&p.symplectic));
    }
    let mut ladder = ChannelASpec::new(2.0);
    ladder.dynamics = Dynamics::Ladder { rungs: 1 };
    let run_l = ChannelRun::channel_a(&ladder, &s).unwrap();
    let p = relsqueeze::gaussian::propagator(&run_l.form, 0.0, 2e-5).unwrap();
    form_err = form_err.max(symplectic::form_defect(&p.symplectic));

    let reg = ModeRegistry::symmetric(&[0.3, 1.0, 2.0]).unwrap();
    let uv = |l: f64| bogoliubov::coeffs(l.abs()).map(|c| (c.u, c.v));
    let ground = bogoliubov_ground_state(&reg, uv).unwrap();
    let twin = (0..3)
        .map(|k| ground.number_diff_variance(2 * k, 2 * k + 1).unwrap())
        .fold(0.0, f64::max);
    let map = BogoliubovMap::new(&reg, uv).unwrap();
    let quasi_vac = map.state_to_quasi(&ground).unwrap();
    let vac = GaussianState::vacuum(reg.clone());
    let vac_err = (quasi_vac.cov() - vac.cov()).amax();

    let coherent = GaussianState::vacuum(ModeRegistry::anonymous(2).unwrap())
        .displace(0, Complex64::new(1.7, -0.4))
        .unwrap()
        .displace(1, Complex64::new(-0.3, 2.1))
        .unwrap();
    let xi_coh = coherent.xi(0, 1).unwrap();

    let results = [
        check(7, "u^2 - v^2 = 1 to 1e-10", det_err <= 1e-10, format!("max error {det_err:.2e}")),
        check(7, "symplectic form preserved to 1e-10", form_err <= 1e-10, format!("max defect {form_err:.2e}")),
        check(7, "ground state Var(n_k - n_-k) = 0 to 1e-10", twin <= 1e-10, format!("max {twin:.2e}")),
        check(7, "ground state is the quasiparticle vacuum", vac_err <= 1e-10, format!("{vac_err:.2e}")),
        check(7, "independent coherent modes give xi = 1 to 1e-10", (xi_coh - 1.0).abs() <= 1e-10, format!("{xi_coh:.12}")),
    ];
    assert!(results.iter().all(|&r| r));
}

#[test]
fn criterion_8_perturbative_consistency() {
    let (_, s) = scales();
    let mut worst: f64 = 0.0;
    for (y, dy) in [(1.0, 0.5), (2.0, 1.0), (4.0, 2.0), (3.0, 0.7)] {
        let spec = ChannelASpec::with_dy(y, dy);
        for coupling_time in [0.1, 0.05, 0.02, 0.01] {
            let t = coupling_time / s.effective_coupling;
            let sim = simulate_channel_a(&spec, &s, &[t]).unwrap();
            let p = perturbative_channel_a(&spec, &s, t).unwrap();
            let err = rel(sim.n_hi[0], p.n_hi).max(rel(sim.n_lo[0], p.n_lo));
            worst = worst.max(err / (coupling_time * coupling_time));
        }
    }
    let ok = check(
        8,
        "populations match second order within C (coupling t)^2, C <= 1",
        worst.is_finite() && worst <= 1.0,
        format!("C = {worst:.3e}"),
    );
    assert!(ok);
}
