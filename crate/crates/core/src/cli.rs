//! Command-line front end.
//!
//! Subcommands: `derive`, `fig1`, `fig2`, `scan`, `oracle-check`. Exit status
//! is 0 on success, 2 for configuration or usage errors and 3 for numerical
//! or validation failures.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channels::{self, Channel, Dynamics, DyRule, ScanRow};
use crate::losses::{self, CrossSection};
use crate::oracle;
use crate::units::{self, DerivedScales, LabParameters};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const CSV_HEADER: [&str; 7] = ["y", "t_seconds", "n_hi", "n_lo", "var_diff", "xi", "flags"];

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spacing {
    #[serde(rename = "lin")]
    Linear,
    #[serde(rename = "log")]
    Log,
}

/// `min:max:count[:lin|log]`
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        GridSpec {
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.min],
            n => (0..n)
                .map(|i| {
                    let f = i as f64 / (n - 1) as f64;
                    match self.spacing {
                        Spacing::Linear => self.min + f * (self.max - self.min),
                        Spacing::Log => self.min * (self.max / self.min).powf(f),
                    }
                })
                .collect(),
        }
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("grid `{s}` must look like min:max:count[:lin|log]"));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("grid `{s}`: `{p}` is not a number"));
        let min = num(parts[0])?;
        let max = num(parts[1])?;
        let count = parts[2]
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("grid `{s}`: `{}` is not a count", parts[2]))?;
        let spacing = match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => return Err(format!("grid `{s}`: spacing `{other}` is not lin or log")),
        };
        if !(min.is_finite() && max.is_finite() && min > 0.0 && max >= min) {
            return Err(format!("grid `{s}`: need 0 < min <= max"));
        }
        Ok(GridSpec {
            min,
            max,
            count,
            spacing,
        })
    }
}

impl TryFrom<String> for GridSpec {
    type Error = String;
    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        g.to_string()
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spacing = match self.spacing {
            Spacing::Linear => "lin",
            Spacing::Log => "log",
        };
        write!(f, "{}:{}:{}:{spacing}", self.min, self.max, self.count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelKey {
    A,
    B,
}

/// Flat key-value run configuration, read from TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub atom_mass_kg: f64,
    pub n0_atoms: f64,
    pub volume_cm3: f64,
    pub a_nm: f64,
    pub rabi_2pi_mhz: f64,
    pub detuning_2pi_ghz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelKey>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times_s: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dy_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dy_fixed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder_rungs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<bool>,
}

impl RunConfig {
    /// ²³Na, N0 = 10⁷, V = 10⁻⁷ cm³, a = 2.8 nm, Ω = 2π·1.8 MHz, Δ = 2π·1 GHz.
    pub fn sodium_example() -> Self {
        RunConfig {
            atom_mass_kg: units::SODIUM_23_MASS,
            n0_atoms: 1e7,
            volume_cm3: 1e-7,
            a_nm: 2.8,
            rabi_2pi_mhz: 1.8,
            detuning_2pi_ghz: 1.0,
            channel: None,
            grid: None,
            times_s: None,
            dy_ratio: None,
            dy_fixed: None,
            ladder_rungs: None,
            out_dir: None,
            plot: None,
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    /// SHA-256 of the serialized configuration, hex encoded. Output
    /// location and plotting do not enter the hash.
    pub fn hash(&self) -> String {
        let content = RunConfig {
            out_dir: None,
            plot: None,
            ..self.clone()
        };
        hex::encode(Sha256::digest(content.to_toml().as_bytes()))
    }

    pub fn validate(&self) -> CliResult<()> {
        let keys = [
            ("atom_mass_kg", self.atom_mass_kg),
            ("n0_atoms", self.n0_atoms),
            ("volume_cm3", self.volume_cm3),
            ("a_nm", self.a_nm),
            ("rabi_2pi_mhz", self.rabi_2pi_mhz),
            ("detuning_2pi_ghz", self.detuning_2pi_ghz),
        ];
        for (key, v) in keys {
            positive_key(key, v)?;
        }
        if let Some(r) = self.dy_ratio {
            positive_key("dy_ratio", r)?;
        }
        if let Some(d) = self.dy_fixed {
            positive_key("dy_fixed", d)?;
        }
        if self.dy_ratio.is_some() && self.dy_fixed.is_some() {
            return Err(CliError::Config("keys `dy_ratio` and `dy_fixed` are mutually exclusive".into()));
        }
        if let Some(n) = self.ladder_rungs {
            if n > channels::MAX_LADDER_RUNGS {
                return Err(CliError::Config(format!(
                    "key `ladder_rungs`: at most {} allowed, got {n}",
                    channels::MAX_LADDER_RUNGS
                )));
            }
        }
        if let Some(times) = &self.times_s {
            check_times(times)?;
        }
        Ok(())
    }

    pub fn lab_parameters(&self) -> CliResult<LabParameters> {
        self.validate()?;
        Ok(LabParameters {
            atom_mass: self.atom_mass_kg,
            n_condensate: self.n0_atoms,
            volume: self.volume_cm3 * 1e-6,
            scattering_length: self.a_nm * 1e-9,
            rabi_frequency: 2.0 * std::f64::consts::PI * self.rabi_2pi_mhz * 1e6,
            detuning: 2.0 * std::f64::consts::PI * self.detuning_2pi_ghz * 1e9,
        })
    }

    fn dynamics(&self) -> Dynamics {
        match self.ladder_rungs {
            None | Some(0) => Dynamics::RotatingWave,
            Some(rungs) => Dynamics::Ladder { rungs },
        }
    }

    fn dy_rule(&self) -> DyRule {
        match (self.dy_fixed, self.dy_ratio) {
            (Some(d), _) => DyRule::Fixed(d),
            (None, Some(r)) => DyRule::Proportional(r),
            (None, None) => DyRule::Proportional(0.5),
        }
    }
}

fn positive_key(key: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("key `{key}`: must be positive and finite, got {v}")))
    }
}

fn check_times(times: &[f64]) -> CliResult<()> {
    if times.is_empty() {
        return Err(CliError::Config("time list is empty".into()));
    }
    for w in times.windows(2) {
        if w[1] < w[0] {
            return Err(CliError::Config(format!("times must be ascending: {} after {}", w[1], w[0])));
        }
    }
    if let Some(t) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(CliError::Config(format!("time {t} must be finite and non-negative")));
    }
    Ok(())
}

#[derive(Debug, Parser)]
#[command(name = "relsqueeze", version, about = "Relative number squeezing of Bogoliubov excitations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print derived scales and loss estimates.
    Derive(CommonArgs),
    /// Channel A scan, Δk = k/2, ξ between k + Δk and −k.
    Fig1(CommonArgs),
    /// Channel B scan over Δk, ξ between Δk and −Δk.
    Fig2(CommonArgs),
    /// Scan configured by the `channel`, `grid`, `dy_*` and `ladder_rungs` keys.
    Scan(CommonArgs),
    /// Compare the Gaussian engine with the Fock oracle.
    OracleCheck(CommonArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// TOML configuration file; defaults to the built-in sodium example.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; CSV goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG plot (needs an output directory).
    #[arg(long)]
    pub plot: bool,
    /// Comma-separated times in seconds.
    #[arg(long, value_delimiter = ',')]
    pub times: Option<Vec<f64>>,
    /// Momentum grid `min:max:count[:lin|log]` in units of k0.
    #[arg(long)]
    pub grid: Option<GridSpec>,
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli.command, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve(args: &CommonArgs) -> CliResult<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::sodium_example(),
    };
    if let Some(times) = &args.times {
        cfg.times_s = Some(times.clone());
    }
    if let Some(out) = &args.out {
        cfg.out_dir = Some(out.display().to_string());
    }
    if args.plot {
        cfg.plot = Some(true);
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn execute(command: &Command, stdout: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Derive(args) => cmd_derive(&resolve(args)?, stdout),
        Command::Fig1(args) => {
            let mut cfg = resolve(args)?;
            cfg.channel = Some(ChannelKey::A);
            cfg.grid = Some(args.grid.unwrap_or(GridSpec::linear(1.0, 5.0, 9)));
            cfg.dy_ratio = Some(0.5);
            cfg.dy_fixed = None;
            cmd_scan(&cfg, "fig1", stdout)
        }
        Command::Fig2(args) => {
            let mut cfg = resolve(args)?;
            cfg.channel = Some(ChannelKey::B);
            cfg.grid = Some(args.grid.unwrap_or(GridSpec {
                min: 0.1,
                max: 3.0,
                count: 12,
                spacing: Spacing::Log,
            }));
            cfg.dy_ratio = None;
            cfg.dy_fixed = None;
            cfg.times_s.get_or_insert_with(channels::bragg_times);
            cmd_scan(&cfg, "fig2", stdout)
        }
        Command::Scan(args) => {
            let mut cfg = resolve(args)?;
            if let Some(g) = args.grid {
                cfg.grid = Some(g);
            }
            let channel = *cfg.channel.get_or_insert(ChannelKey::A);
            cfg.grid.get_or_insert(match channel {
                ChannelKey::A => GridSpec::linear(1.0, 5.0, 9),
                ChannelKey::B => GridSpec::linear(0.1, 3.0, 30),
            });
            cmd_scan(&cfg, "scan", stdout)
        }
        Command::OracleCheck(args) => cmd_oracle_check(&resolve(args)?, args.grid, stdout),
    }
}

fn scales_of(cfg: &RunConfig) -> CliResult<(LabParameters, DerivedScales)> {
    let params = cfg.lab_parameters()?;
    let scales = units::derive(&params).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((params, scales))
}

fn out_dir(cfg: &RunConfig) -> CliResult<Option<PathBuf>> {
    match &cfg.out_dir {
        Some(dir) => {
            let dir = PathBuf::from(dir);
            fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
            fs::write(dir.join("config.toml"), cfg.to_toml()).map_err(|e| io_error(&dir, e))?;
            Ok(Some(dir))
        }
        None => Ok(None),
    }
}

fn emit(stdout: &mut dyn Write, dir: &Option<PathBuf>, file: &str, text: &str) -> CliResult<()> {
    match dir {
        Some(d) => {
            let path = d.join(file);
            fs::write(&path, text).map_err(|e| io_error(&path, e))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Config(format!("stdout: {e}"))),
    }
}

/// Human-readable report followed by a `[derived]` key-value block.
pub fn derive_report(cfg: &RunConfig) -> CliResult<String> {
    use std::fmt::Write as _;
    let (params, scales) = scales_of(cfg)?;
    let loss = losses::estimate(2.0, &scales, &params)?;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut s = String::new();
    let _ = writeln!(s, "condensate density n0     {:.6e} cm^-3", scales.density * 1e-6);
    let _ = writeln!(s, "healing momentum k0       {:.6e} m^-1", scales.healing_momentum);
    let _ = writeln!(s, "energy scale E0           2pi x {:.6} kHz", scales.energy_scale / two_pi / 1e3);
    let _ = writeln!(s, "effective coupling        2pi x {:.6} kHz", scales.effective_coupling / two_pi / 1e3);
    let _ = writeln!(s, "coupling ratio            {:.6}", scales.coupling_ratio());
    let _ = writeln!(s, "Beliaev time at k = 2k0   {:.6} ms", loss.beliaev_time * 1e3);
    let _ = writeln!(s, "rescattered fraction      {:.4} ({})", loss.rescatter_fraction_4pi, CrossSection::FourPi);
    let _ = writeln!(s, "rescattered fraction      {:.4} ({})", loss.rescatter_fraction_8pi, CrossSection::EightPi);
    let _ = writeln!(
        s,
        "note: the cross section in r = sigma n0 V^(1/3) is convention dependent; both values are shown"
    );
    if loss.unphysical() {
        let _ = writeln!(s, "note: a rescattered fraction above 1 means the estimate has broken down");
    }
    for w in params.warnings().iter().chain(scales.warnings().iter()) {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "[derived]");
    let kv = [
        ("density_m3", scales.density),
        ("healing_momentum_m", scales.healing_momentum),
        ("energy_scale_rad_s", scales.energy_scale),
        ("energy_scale_hz", scales.energy_scale / two_pi),
        ("effective_coupling_rad_s", scales.effective_coupling),
        ("coupling_ratio", scales.coupling_ratio()),
        ("beliaev_time_2k0_s", loss.beliaev_time),
        ("rescatter_fraction_4pi", loss.rescatter_fraction_4pi),
        ("rescatter_fraction_8pi", loss.rescatter_fraction_8pi),
    ];
    for (k, v) in kv {
        let _ = writeln!(s, "{k} = {}", fmt_float(v));
    }
    Ok(s)
}

fn cmd_derive(cfg: &RunConfig, stdout: &mut dyn Write) -> CliResult<()> {
    let report = derive_report(cfg)?;
    let dir = out_dir(cfg)?;
    emit(stdout, &dir, "derive.txt", &report)
}

/// Twelve significant digits in scientific notation.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.11e}")
}

/// CSV with a `# config-hash:` line, the header, and one row per point.
/// Failed points keep their (y, t) and carry the error in `flags`.
pub fn scan_csv(rows: &[ScanRow], config_hash: &str) -> CliResult<String> {
    let mut out = format!("# config-hash: {config_hash}\n").into_bytes();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut out);
        let fail = |e: csv::Error| CliError::Numerical(format!("csv: {e}"));
        w.write_record(CSV_HEADER).map_err(fail)?;
        for r in rows {
            let record = match &r.outcome {
                Ok(p) => [
                    fmt_float(r.y),
                    fmt_float(r.t),
                    fmt_float(p.n_hi),
                    fmt_float(p.n_lo),
                    fmt_float(p.var_diff),
                    fmt_float(p.xi),
                    p.flags.to_string(),
                ],
                Err(e) => [
                    fmt_float(r.y),
                    fmt_float(r.t),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    format!("error: {e}"),
                ],
            };
            w.write_record(&record).map_err(fail)?;
        }
        w.flush().map_err(|e| CliError::Numerical(format!("csv: {e}")))?;
    }
    Ok(String::from_utf8(out).expect("csv output is UTF-8"))
}

/// Evaluates the scan described by a resolved configuration.
pub fn run_scan(cfg: &RunConfig) -> CliResult<Vec<ScanRow>> {
    let (_, scales) = scales_of(cfg)?;
    let grid = cfg.grid.map(|g| g.values()).unwrap_or_default();
    if grid.is_empty() {
        return Err(CliError::Config("momentum grid is empty".into()));
    }
    let channel = match cfg.channel.unwrap_or(ChannelKey::A) {
        ChannelKey::A => Channel::PairExtraction,
        ChannelKey::B => Channel::DirectBragg,
    };
    let times = cfg.times_s.clone().unwrap_or_else(|| match channel {
        Channel::PairExtraction => channels::figure_times(),
        Channel::DirectBragg => channels::bragg_times(),
    });
    Ok(channels::scan(channel, &grid, cfg.dy_rule(), cfg.dynamics(), &times, &scales)?)
}

fn cmd_scan(cfg: &RunConfig, name: &str, stdout: &mut dyn Write) -> CliResult<()> {
    let mut cfg = cfg.clone();
    cfg.times_s.get_or_insert_with(|| match cfg.channel {
        Some(ChannelKey::B) => channels::bragg_times(),
        _ => channels::figure_times(),
    });
    if cfg.plot == Some(true) && cfg.out_dir.is_none() {
        return Err(CliError::Config("--plot needs --out".into()));
    }
    let rows = run_scan(&cfg)?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        log::warn!("{failed} of {} points failed; see the flags column", rows.len());
    }
    let csv = scan_csv(&rows, &cfg.hash())?;
    let dir = out_dir(&cfg)?;
    emit(stdout, &dir, &format!("{name}.csv"), &csv)?;
    if cfg.plot == Some(true) {
        let x_label = if cfg.channel == Some(ChannelKey::B) { "dk/k0" } else { "k/k0" };
        emit(stdout, &dir, &format!("{name}.svg"), &svg_plot(&rows, x_label))?;
    }
    Ok(())
}

fn oracle_grid(scales: &DerivedScales, ys: Option<Vec<f64>>) -> CliResult<Vec<oracle::Scenario>> {
    let full = oracle::default_grid(scales)?;
    Ok(match ys {
        None => full,
        Some(ys) => {
            let rate_a = |y: f64| -> CliResult<f64> {
                let (_, v12) = crate::bogoliubov::pair_coeffs(y, 1.5 * y)?;
                Ok(0.5 * scales.effective_coupling * v12)
            };
            let rate_b = |y: f64| -> CliResult<f64> {
                let c = crate::bogoliubov::coeffs(y)?;
                Ok(0.5 * scales.effective_coupling * scales.n_condensate.sqrt() * (c.u - c.v))
            };
            let mut out = Vec::new();
            for y in ys {
                for gain in [0.1, 0.3] {
                    out.push(oracle::Scenario {
                        channel: Channel::PairExtraction,
                        y,
                        dy: 0.5 * y,
                        t: gain / rate_a(y)?,
                    });
                }
                for amp in [0.3, 0.8] {
                    out.push(oracle::Scenario {
                        channel: Channel::DirectBragg,
                        y,
                        dy: y,
                        t: amp / rate_b(y)?,
                    });
                }
            }
            out
        }
    })
}

fn cmd_oracle_check(cfg: &RunConfig, grid: Option<GridSpec>, stdout: &mut dyn Write) -> CliResult<()> {
    let (_, scales) = scales_of(cfg)?;
    let scenarios = oracle_grid(&scales, grid.map(|g| g.values()))?;
    if scenarios.is_empty() {
        return Err(CliError::Config("oracle grid is empty".into()));
    }
    let report = oracle::run(&scenarios, &scales)?;
    let dir = out_dir(cfg)?;
    emit(stdout, &dir, "oracle.txt", &report.to_string())?;
    if report.unconverged() > 0 {
        return Err(CliError::Numerical(format!(
            "{} scenarios did not reach cutoff convergence",
            report.unconverged()
        )));
    }
    if report.mismatches() > 0 {
        return Err(CliError::Numerical(format!(
            "{} scenarios exceed the {:.0e} tolerance (max deviation {:.3e})",
            report.mismatches(),
            oracle::MATCH_TOLERANCE,
            report.max_deviation()
        )));
    }
    Ok(())
}

/// ξ against momentum, one polyline per time. Log scale on ξ when every
/// plotted value is positive.
pub fn svg_plot(rows: &[ScanRow], x_label: &str) -> String {
    use std::fmt::Write as _;
    let mut times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    times.dedup();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let points: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok().map(|p| (r.t, r.y, p.xi)))
        .filter(|p| p.2.is_finite())
        .collect();
    let log = !points.is_empty() && points.iter().all(|p| p.2 > 0.0);
    let fy = |v: f64| if log { v.log10() } else { v };
    let (w, h, m) = (640.0, 420.0, 60.0);
    let bounds = |vals: &mut dyn Iterator<Item = f64>| {
        vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (x0, x1) = bounds(&mut points.iter().map(|p| p.1));
    let (y0, y1) = bounds(&mut points.iter().map(|p| fy(p.2)));
    let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
    let sx = |x: f64| m + (x - x0) / span(x0, x1) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (fy(y) - y0) / span(y0, y1) * (h - 2.0 * m);
    let colors = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {m} V{} H{}" fill="none" stroke="black"/>"#,
        h - m,
        w - m
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, w / 2.0, h - 20.0);
    let y_label = if log { "log10 xi" } else { "xi" };
    let _ = writeln!(s, r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{y_label}</text>"#, h / 2.0, h / 2.0);
    if !points.is_empty() {
        for (v, anchor, x, y) in [
            (x0, "middle", sx(x0), h - m + 16.0),
            (x1, "middle", sx(x1), h - m + 16.0),
            (y0, "end", m - 6.0, h - m),
            (y1, "end", m - 6.0, m + 4.0),
        ] {
            let _ = writeln!(s, r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}">{v:.3}</text>"#);
        }
    }
    for (k, t) in times.iter().enumerate() {
        let color = colors[k % colors.len()];
        let path: Vec<String> = points
            .iter()
            .filter(|p| p.0 == *t)
            .map(|p| format!("{:.2},{:.2}", sx(p.1), sy(p.2)))
            .collect();
        if path.is_empty() {
            continue;
        }
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">t = {t:.3e} s</text>"#,
            w - m - 110.0,
            m + 14.0 * k as f64
        );
    }
    s.push_str("</svg>\n");
    s
}
