//! Named parameter sets, their text configuration and the runs behind the
//! CLI.
//!
//! A configuration is a list of `key = value` lines with `#` comments. The
//! keys are the [`SystemParams`] field names plus the run fields of
//! [`Scenario`]; `scenario` selects the defaults every other key overrides.

mod csv;
mod grid;
mod run;

pub use csv::{
    format_float, provenance_config, write_deviation_csv, write_provenance, write_sweep_csv, write_time_series_csv,
};
pub use grid::GridSpec;
pub use run::{
    run_deviation_sweep, run_steady, run_steady_sweep, run_time_series, steady_point, threads_from_env, CutoffCheck,
    DeviationRow, SteadyPoint, SweepGrid, SweepRow, SweepTable, THREADS_ENV,
};

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::dynamics::{IntegratorConfig, Method};
use crate::error::{Error, Result};
use crate::model::NamedState;
use crate::params::SystemParams;
use crate::steady::SteadyMethod;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3,
    Fig4a,
    Fig4b,
    Fig5,
    Experimental,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 9] = [
        ScenarioId::Fig2a,
        ScenarioId::Fig2b,
        ScenarioId::Fig2c,
        ScenarioId::Fig2d,
        ScenarioId::Fig3,
        ScenarioId::Fig4a,
        ScenarioId::Fig4b,
        ScenarioId::Fig5,
        ScenarioId::Experimental,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::Fig2a => "fig2a",
            ScenarioId::Fig2b => "fig2b",
            ScenarioId::Fig2c => "fig2c",
            ScenarioId::Fig2d => "fig2d",
            ScenarioId::Fig3 => "fig3",
            ScenarioId::Fig4a => "fig4a",
            ScenarioId::Fig4b => "fig4b",
            ScenarioId::Fig5 => "fig5",
            ScenarioId::Experimental => "experimental",
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioId::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ScenarioId::ALL.iter().map(|id| id.name()).collect();
            Error::InvalidArgument(format!("unknown scenario '{s}'; available: {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelKind {
    #[default]
    Full,
    Effective,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Full => "full",
            ModelKind::Effective => "effective",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ModelKind::Full),
            "effective" => Ok(ModelKind::Effective),
            other => Err(Error::InvalidArgument(format!("unknown model '{other}' (expected full or effective)"))),
        }
    }
}

/// A fully resolved run: physics, initial state, sampling and grids.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: ScenarioId,
    pub params: SystemParams,
    pub initial: NamedState,
    pub t_max: f64,
    pub sample_dt: f64,
    pub model: ModelKind,
    pub feedback: bool,
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub steady_method: SteadyMethod,
    pub gamma_values: GridSpec,
    pub kappa_values: GridSpec,
    /// Values of `δ/Δ` for the deviation scan.
    pub delta_deviation_values: GridSpec,
    /// Share of sweep points re-solved at `fock_cutoff + 1`.
    pub verify_fraction: f64,
}

fn fig2(omega_a: f64, omega_b: f64, delta: f64) -> SystemParams {
    SystemParams { omega_a, omega_mw: omega_a / 2.0, omega_b, delta, gamma: 0.1, ..Default::default() }
}

fn fig4_drive() -> SystemParams {
    SystemParams {
        omega_a: 0.01,
        omega_mw: 0.005,
        omega_b: 1.0,
        delta: 20.0,
        gamma_r: 0.001,
        fock_cutoff: 1,
        ..Default::default()
    }
}

impl Scenario {
    /// Default binding of `id`. All rates are in units of `g` except for
    /// `experimental`, which uses angular frequencies in rad/µs.
    pub fn defaults(id: ScenarioId) -> Self {
        let mut s = Scenario {
            id,
            params: SystemParams::default(),
            initial: NamedState::Gg,
            t_max: 8000.0,
            sample_dt: 10.0,
            model: ModelKind::Full,
            feedback: false,
            method: Method::Propagator,
            rel_tol: IntegratorConfig::default().rel_tol,
            abs_tol: IntegratorConfig::default().abs_tol,
            steady_method: SteadyMethod::Svd,
            gamma_values: GridSpec::Log { lo: 0.03, hi: 1.0, n: 21 },
            kappa_values: GridSpec::Log { lo: 0.03, hi: 1.0, n: 21 },
            delta_deviation_values: GridSpec::Lin { lo: -0.3, hi: 0.3, n: 61 },
            verify_fraction: 0.1,
        };
        match id {
            ScenarioId::Fig2a => {
                s.params = fig2(0.1, 0.5, 10.0);
                s.t_max = 5000.0;
            }
            ScenarioId::Fig2b => s.params = fig2(0.05, 0.5, 20.0),
            ScenarioId::Fig2c => s.params = fig2(0.05, 5.0, 100.0),
            ScenarioId::Fig2d => s.params = fig2(0.05, 10.0, 200.0),
            ScenarioId::Fig3 => s.params = SystemParams { kappa: 0.1, ..fig2(0.05, 0.5, 20.0) },
            ScenarioId::Fig4a => {
                let r = 10f64.sqrt().recip();
                s.params = SystemParams { gamma: r, kappa: r, ..fig4_drive() };
            }
            ScenarioId::Fig4b => {
                let r = 5.2f64.sqrt().recip();
                s.params = SystemParams { gamma: r, kappa: r, eta: FRAC_PI_2, ..fig4_drive() };
                s.feedback = true;
            }
            ScenarioId::Fig5 => s.params = SystemParams { gamma: 0.1, kappa: 0.1, ..fig4_drive() },
            ScenarioId::Experimental => {
                let g = 2.0 * PI * 14.4;
                s.params = SystemParams {
                    g,
                    omega_a: 0.01 * g,
                    omega_mw: 0.005 * g,
                    omega_b: g,
                    delta: 20.0 * g,
                    gamma: 2.0 * PI * 3.0,
                    kappa: 2.0 * PI * 0.66,
                    gamma_r: 2.0 * PI * 0.001,
                    fock_cutoff: 2,
                    ..Default::default()
                };
                s.t_max = 8000.0 / g;
                s.sample_dt = 10.0 / g;
            }
        }
        s
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig { rel_tol: self.rel_tol, abs_tol: self.abs_tol, method: self.method, ..Default::default() }
    }

    pub fn sweep_grid(&self) -> SweepGrid {
        SweepGrid {
            gamma_values: self.gamma_values.values(),
            kappa_values: self.kappa_values.values(),
            feedback: self.feedback,
            eta: self.params.eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.integrator().validate()?;
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("t_max must be finite and >= 0, got {}", self.t_max)));
        }
        if !(self.sample_dt > 0.0 && self.sample_dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample_dt must be positive, got {}", self.sample_dt)));
        }
        if !(0.0..=1.0).contains(&self.verify_fraction) {
            return Err(Error::InvalidArgument(format!(
                "verify_fraction must lie in [0, 1], got {}",
                self.verify_fraction
            )));
        }
        for (name, grid) in [("gamma_values", &self.gamma_values), ("kappa_values", &self.kappa_values)] {
            if let Some(v) = grid.values().into_iter().find(|v| *v < 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be non-negative rates, got {v}")));
            }
        }
        if self.feedback && self.model == ModelKind::Effective {
            return Err(Error::InvalidArgument("feedback acts on cavity emissions and needs the full model".into()));
        }
        if self.model == ModelKind::Effective && self.initial == NamedState::B {
            return Err(Error::InvalidArgument("state B is not part of the effective model".into()));
        }
        Ok(())
    }

    /// Resolved configuration as `key = value` lines, in [`CONFIG_KEYS`]
    /// order. Parsing the text reproduces `self`.
    pub fn to_config_lines(&self) -> Vec<(&'static str, String)> {
        let p = &self.params;
        let onoff = |b: bool| if b { "on" } else { "off" }.to_string();
        vec![
            ("scenario", self.id.to_string()),
            ("model", self.model.to_string()),
            ("initial", self.initial.to_string()),
            ("feedback", onoff(self.feedback)),
            ("t_max", self.t_max.to_string()),
            ("sample_dt", self.sample_dt.to_string()),
            ("method", self.method.to_string()),
            ("rel_tol", self.rel_tol.to_string()),
            ("abs_tol", self.abs_tol.to_string()),
            ("steady_method", self.steady_method.to_string()),
            ("g", p.g.to_string()),
            ("omega_a", p.omega_a.to_string()),
            ("omega_mw", p.omega_mw.to_string()),
            ("omega_b", p.omega_b.to_string()),
            ("delta", p.delta.to_string()),
            ("u_rr_deviation", p.u_rr_deviation.to_string()),
            ("gamma", p.gamma.to_string()),
            ("gamma_r", p.gamma_r.to_string()),
            ("kappa", p.kappa.to_string()),
            ("eta", p.eta.to_string()),
            ("fock_cutoff", p.fock_cutoff.to_string()),
            ("rydberg_decay", p.rydberg_decay.to_string()),
            ("stark_compensation", onoff(p.stark_compensation)),
            ("gamma_values", self.gamma_values.to_string()),
            ("kappa_values", self.kappa_values.to_string()),
            ("delta_deviation_values", self.delta_deviation_values.to_string()),
            ("verify_fraction", self.verify_fraction.to_string()),
        ]
    }

    pub fn to_config_text(&self) -> String {
        self.to_config_lines().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Applies one `key = value` override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let p = &mut self.params;
        match key {
            "scenario" => {
                return Err(Error::InvalidArgument("scenario can only be set once, before other keys".into()))
            }
            "model" => self.model = value.parse()?,
            "initial" => self.initial = value.parse()?,
            "feedback" => self.feedback = parse_flag(value)?,
            "t_max" => self.t_max = parse_real(key, value)?,
            "sample_dt" => self.sample_dt = parse_real(key, value)?,
            "method" => self.method = value.parse()?,
            "rel_tol" => self.rel_tol = parse_real(key, value)?,
            "abs_tol" => self.abs_tol = parse_real(key, value)?,
            "steady_method" => self.steady_method = value.parse()?,
            "g" => p.g = parse_rate(key, value)?,
            "omega_a" => p.omega_a = parse_rate(key, value)?,
            "omega_mw" => p.omega_mw = parse_rate(key, value)?,
            "omega_b" => p.omega_b = parse_rate(key, value)?,
            "delta" => p.delta = parse_rate(key, value)?,
            "u_rr_deviation" => p.u_rr_deviation = parse_real(key, value)?,
            "gamma" => p.gamma = parse_rate(key, value)?,
            "gamma_r" => p.gamma_r = parse_rate(key, value)?,
            "kappa" => p.kappa = parse_rate(key, value)?,
            "eta" => p.eta = parse_real(key, value)?,
            "fock_cutoff" => {
                p.fock_cutoff = value.parse().map_err(|_| {
                    Error::InvalidArgument(format!("fock_cutoff must be a non-negative integer, got '{value}'"))
                })?
            }
            "rydberg_decay" => p.rydberg_decay = value.parse()?,
            "stark_compensation" => p.stark_compensation = parse_flag(value)?,
            "gamma_values" => self.gamma_values = value.parse()?,
            "kappa_values" => self.kappa_values = value.parse()?,
            "delta_deviation_values" => self.delta_deviation_values = value.parse()?,
            "verify_fraction" => self.verify_fraction = parse_real(key, value)?,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown key '{other}'; known keys: {}",
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }
}

/// Every key accepted in a configuration, in emission order.
pub const CONFIG_KEYS: [&str; 27] = [
    "scenario",
    "model",
    "initial",
    "feedback",
    "t_max",
    "sample_dt",
    "method",
    "rel_tol",
    "abs_tol",
    "steady_method",
    "g",
    "omega_a",
    "omega_mw",
    "omega_b",
    "delta",
    "u_rr_deviation",
    "gamma",
    "gamma_r",
    "kappa",
    "eta",
    "fock_cutoff",
    "rydberg_decay",
    "stark_compensation",
    "gamma_values",
    "kappa_values",
    "delta_deviation_values",
    "verify_fraction",
];

fn parse_real(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value.parse().map_err(|_| Error::InvalidArgument(format!("{key} must be a number, got '{value}'")))?;
    if !v.is_finite() {
        return Err(Error::InvalidArgument(format!("{key} must be finite, got '{value}'")));
    }
    Ok(v)
}

fn parse_rate(key: &str, value: &str) -> Result<f64> {
    let v = parse_real(key, value)?;
    if v < 0.0 {
        return Err(Error::InvalidArgument(format!("{key} is a rate and must be >= 0, got {v}")));
    }
    Ok(v)
}

pub fn parse_flag(value: &str) -> Result<bool> {
    match value {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        other => Err(Error::InvalidArgument(format!("expected on or off, got '{other}'"))),
    }
}

/// Parsed `key = value` pairs with their 1-based line numbers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigEntries {
    pub entries: Vec<(usize, String, String)>,
}

impl ConfigEntries {
    /// Splits `text` into entries, skipping blank lines and `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Config { line, msg: format!("expected 'key = value', got '{content}'") })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Config { line, msg: format!("expected 'key = value', got '{content}'") });
            }
            if !CONFIG_KEYS.contains(&key) {
                return Err(Error::Config { line, msg: format!("unknown key '{key}'") });
            }
            if let Some((first, _, _)) = entries.iter().find(|(_, k, _)| k == key) {
                return Err(Error::Config { line, msg: format!("duplicate key '{key}' (first set on line {first})") });
            }
            entries.push((line, key.to_string(), value.to_string()));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(_, k, _)| k == key).map(|(_, _, v)| v.as_str())
    }
}

/// Resolves a configuration. `scenario` comes from the text or, when
/// absent there, from `fallback_id`; every other key overrides defaults.
pub fn parse_config_with(text: &str, fallback_id: Option<ScenarioId>) -> Result<Scenario> {
    let entries = ConfigEntries::parse(text)?;
    let id = match entries.entries.iter().find(|(_, k, _)| k == "scenario") {
        Some((line, _, v)) => {
            let id: ScenarioId = v.parse().map_err(|e: Error| Error::Config { line: *line, msg: e.to_string() })?;
            if let Some(f) = fallback_id.filter(|f| *f != id) {
                log::warn!("config selects scenario {id}, overriding {f}");
            }
            id
        }
        None => fallback_id.ok_or_else(|| Error::InvalidArgument("missing required key 'scenario'".into()))?,
    };
    let mut s = Scenario::defaults(id);
    for (line, key, value) in entries.entries.iter().filter(|(_, k, _)| k != "scenario") {
        s.set(key, value).map_err(|e| Error::Config { line: *line, msg: strip_prefix(e) })?;
    }
    s.validate()?;
    Ok(s)
}

/// Resolves a configuration that names its own scenario.
pub fn parse_config(text: &str) -> Result<Scenario> {
    parse_config_with(text, None)
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let s = parse_config_with("", Some(ScenarioId::Fig2a)).unwrap();
        assert_eq!(s, Scenario::defaults(ScenarioId::Fig2a));
        assert_eq!(s.params.omega_a, 0.1);
        assert_eq!(s.params.omega_mw, 0.05);
        assert_eq!(s.params.omega_b, 0.5);
        assert_eq!(s.params.delta, 10.0);
        assert_eq!(s.params.gamma, 0.1);
        assert_eq!((s.params.kappa, s.params.gamma_r), (0.0, 0.0));
    }

    #[test]
    fn missing_scenario_is_named() {
        let err = parse_config("gamma = 0.1").unwrap_err().to_string();
        assert!(err.contains("scenario"), "{err}");
    }

    #[test]
    fn errors_name_the_line() {
        let text = "scenario = fig3\n# comment\n\nkappa 0.1\n";
        match parse_config(text).unwrap_err() {
            Error::Config { line, .. } => assert_eq!(line, 4),
            e => panic!("{e}"),
        }
        match parse_config("scenario = fig3\nwobble = 1\n").unwrap_err() {
            Error::Config { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("wobble"));
            }
            e => panic!("{e}"),
        }
        match parse_config("scenario = fig3\nomega_b = -1\n").unwrap_err() {
            Error::Config { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("omega_b"), "{msg}");
            }
            e => panic!("{e}"),
        }
        assert!(parse_config("scenario = fig3\nkappa = 0.1\nkappa = 0.2\n").is_err());
    }

    #[test]
    fn overrides_apply() {
        let s = parse_config("scenario = fig4a\nfock_cutoff = 3  # more photons\ngamma_values = 0.2, 0.5\n").unwrap();
        assert_eq!(s.params.fock_cutoff, 3);
        assert_eq!(s.gamma_values.values(), vec![0.2, 0.5]);
        assert!(s.to_config_text().contains("fock_cutoff = 3\n"));
    }

    #[test]
    fn every_scenario_round_trips() {
        for id in ScenarioId::ALL {
            let s = Scenario::defaults(id);
            s.validate().unwrap();
            let again = parse_config(&s.to_config_text()).unwrap();
            assert_eq!(again, s, "{id}");
            let keys: Vec<&str> = s.to_config_lines().iter().map(|(k, _)| *k).collect();
            assert_eq!(keys, CONFIG_KEYS);
        }
    }

    #[test]
    fn feedback_needs_full_model() {
        assert!(parse_config("scenario = fig4b\nmodel = effective\n").is_err());
    }
}
