//! Line-oriented `key = value` run configuration.
//!
//! Values carry unit suffixes (`775 nm`, `12 GHz/nm`, `20 ng`, `2 mW`).
//! Frequencies are ordinary frequencies and may be written as multiples of
//! an earlier frequency key (`omega_1 = 1.1 omega_m`); a reference resolves
//! to the value that key holds at that line. Angles accept `pi/3`,
//! `0.5 pi`, `rad` and `deg`. Keys not given keep the bundled defaults.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::features::{FeatureOptions, RefineOptions};
use crate::params::SystemParams;
use crate::response;

/// The bundled reproduction config.
pub const PAPER_CONFIG: &str = include_str!("../../configs/paper.cfg");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerSpec {
    /// Explicit powers, W.
    List(Vec<f64>),
    Sweep {
        start: f64,
        stop: f64,
        count: usize,
        scale: SweepScale,
    },
}

impl PowerSpec {
    pub fn powers(&self) -> Vec<f64> {
        match *self {
            PowerSpec::List(ref v) => v.clone(),
            PowerSpec::Sweep { start, stop, count, scale } => {
                if count == 1 {
                    return vec![start];
                }
                (0..count)
                    .map(|i| {
                        let t = i as f64 / (count - 1) as f64;
                        match scale {
                            SweepScale::Linear => start + (stop - start) * t,
                            SweepScale::Log => start * (stop / start).powf(t),
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Probe detuning window in units of `omega_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        response::uniform_grid(self.lo, self.hi, self.count)
    }
}

/// Parsed run configuration. Frequencies are stored in Hz exactly as read.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub wavelength: f64,
    /// Ordinary-frequency pull, Hz/m.
    pub pull_parameter: f64,
    pub mass_1: f64,
    pub mass_2: f64,
    pub omega_m: f64,
    pub omega_1: f64,
    pub omega_2: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub kappa: f64,
    /// Radians.
    pub theta: f64,
    pub effective_detuning: f64,
    pub powers: PowerSpec,
    pub grid: GridSpec,
    pub refine: bool,
    pub prominence_floor: f64,
    pub refine_threshold: f64,
    pub refine_budget: usize,
    pub tolerance: f64,
    pub output_dir: PathBuf,
    pub formats: Vec<OutputFormat>,
}

#[derive(Clone, Copy, PartialEq)]
enum Dim {
    Length,
    Mass,
    Frequency,
    Pull,
}

const LENGTH: &[(&str, f64)] = &[("m", 1.0), ("mm", 1e-3), ("um", 1e-6), ("µm", 1e-6), ("nm", 1e-9), ("pm", 1e-12)];
const MASS: &[(&str, f64)] = &[
    ("kg", 1.0),
    ("g", 1e-3),
    ("mg", 1e-6),
    ("ug", 1e-9),
    ("µg", 1e-9),
    ("ng", 1e-12),
    ("pg", 1e-15),
];
const FREQUENCY: &[(&str, f64)] = &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9), ("THz", 1e12)];
const POWER: &[(&str, f64)] = &[("W", 1.0), ("mW", 1e-3), ("uW", 1e-6), ("µW", 1e-6), ("nW", 1e-9)];

const FREQUENCY_KEYS: &[&str] = &[
    "omega_m",
    "omega_1",
    "omega_2",
    "gamma_1",
    "gamma_2",
    "kappa",
    "effective_detuning",
];

fn lookup(table: &[(&str, f64)], unit: &str) -> Option<f64> {
    table.iter().find(|(u, _)| *u == unit).map(|&(_, f)| f)
}

/// Splits `"12.5 GHz/nm"` or `"2mW"` into the number and the unit text.
fn split_number(text: &str) -> Option<(f64, &str)> {
    let text = text.trim();
    let mut end = 0;
    let bytes = text.as_bytes();
    while end < bytes.len() {
        let c = bytes[end] as char;
        let exponent_sign = (c == '+' || c == '-') && end > 0 && matches!(bytes[end - 1], b'e' | b'E');
        let exponent = (c == 'e' || c == 'E')
            && end > 0
            && bytes.get(end + 1).is_some_and(|b| b.is_ascii_digit() || *b == b'-' || *b == b'+');
        if c.is_ascii_digit() || c == '.' || exponent || exponent_sign || (end == 0 && (c == '-' || c == '+')) {
            end += 1;
        } else {
            break;
        }
    }
    if end == 0 {
        return None;
    }
    let value: f64 = text[..end].parse().ok()?;
    Some((value, text[end..].trim()))
}

struct Parser<'a> {
    config: &'a mut RunConfig,
    line: usize,
    key: &'a str,
}

impl Parser<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::config(self.line, self.key, message)
    }

    fn frequency_of(&self, key: &str) -> Option<f64> {
        let c = &*self.config;
        Some(match key {
            "omega_m" => c.omega_m,
            "omega_1" => c.omega_1,
            "omega_2" => c.omega_2,
            "gamma_1" => c.gamma_1,
            "gamma_2" => c.gamma_2,
            "kappa" => c.kappa,
            "effective_detuning" => c.effective_detuning,
            _ => return None,
        })
    }

    fn quantity(&self, text: &str, dim: Dim) -> Result<f64> {
        let text = text.trim();
        if dim == Dim::Frequency && FREQUENCY_KEYS.contains(&text) {
            return Ok(self.frequency_of(text).expect("listed key"));
        }
        let (value, unit) = split_number(text).ok_or_else(|| self.err(format!("expected a number, got `{text}`")))?;
        if unit.is_empty() {
            if value == 0.0 {
                return Ok(0.0);
            }
            return Err(self.err(format!("`{text}` is missing a unit")));
        }
        let factor = match dim {
            Dim::Length => lookup(LENGTH, unit),
            Dim::Mass => lookup(MASS, unit),
            Dim::Frequency => lookup(FREQUENCY, unit).or_else(|| self.frequency_of(unit)),
            Dim::Pull => unit.split_once('/').and_then(|(f, l)| {
                Some(lookup(FREQUENCY, f.trim())? / lookup(LENGTH, l.trim())?)
            }),
        };
        factor
            .map(|f| value * f)
            .ok_or_else(|| self.err(format!("unknown unit `{unit}`")))
    }

    fn power(&self, text: &str) -> Result<f64> {
        let text = text.trim();
        let (value, unit) = split_number(text).ok_or_else(|| self.err(format!("expected a power, got `{text}`")))?;
        let factor = if unit.is_empty() && value == 0.0 {
            1.0
        } else {
            lookup(POWER, unit).ok_or_else(|| self.err(format!("`{text}` needs a power unit (W, mW, uW, nW)")))?
        };
        let p = value * factor;
        if !(p >= 0.0 && p.is_finite()) {
            return Err(self.err(format!("power must be finite and >= 0, got `{text}`")));
        }
        Ok(p)
    }

    fn angle(&self, text: &str) -> Result<f64> {
        let compact: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
        let bad = || self.err(format!("cannot read angle `{text}`"));
        if let Some((lhs, rhs)) = compact.split_once('/') {
            let divisor: f64 = rhs.trim().parse().map_err(|_| bad())?;
            return Ok(self.pi_multiple(lhs.trim()).ok_or_else(bad)? / divisor);
        }
        if let Some(v) = self.pi_multiple(&compact) {
            return Ok(v);
        }
        let (value, unit) = split_number(&compact).ok_or_else(bad)?;
        match unit {
            "" | "rad" => Ok(value),
            "deg" => Ok(value.to_radians()),
            _ => Err(bad()),
        }
    }

    fn pi_multiple(&self, text: &str) -> Option<f64> {
        let head = text.strip_suffix("pi")?.trim().trim_end_matches('*').trim();
        if head.is_empty() {
            return Some(PI);
        }
        head.parse::<f64>().ok().map(|k| k * PI)
    }

    fn real(&self, text: &str) -> Result<f64> {
        text.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(format!("expected a number, got `{text}`")))
    }

    fn count(&self, text: &str) -> Result<usize> {
        text.trim()
            .parse::<usize>()
            .map_err(|_| self.err(format!("expected a positive integer, got `{text}`")))
    }

    /// `<a> .. <b> : <count> [qualifier]`
    fn range<'t>(&self, text: &'t str) -> Result<(&'t str, &'t str, usize, Option<&'t str>)> {
        let (span, tail) = text
            .split_once(':')
            .ok_or_else(|| self.err("expected `<start> .. <stop> : <count>`"))?;
        let (a, b) = span
            .split_once("..")
            .ok_or_else(|| self.err("expected `<start> .. <stop> : <count>`"))?;
        let mut words = tail.split_whitespace();
        let count = self.count(words.next().unwrap_or(""))?;
        let qualifier = words.next();
        if words.next().is_some() {
            return Err(self.err("trailing text after range"));
        }
        Ok((a.trim(), b.trim(), count, qualifier))
    }

    fn apply(&mut self, value: &str) -> Result<()> {
        let c_value = match self.key {
            "wavelength" => Some((Dim::Length, 0)),
            "pull_parameter" => Some((Dim::Pull, 1)),
            "mass_1" => Some((Dim::Mass, 2)),
            "mass_2" => Some((Dim::Mass, 3)),
            _ => None,
        };
        if let Some((dim, slot)) = c_value {
            let v = self.quantity(value, dim)?;
            let c = &mut *self.config;
            *[&mut c.wavelength, &mut c.pull_parameter, &mut c.mass_1, &mut c.mass_2][slot] = v;
            return Ok(());
        }
        if FREQUENCY_KEYS.contains(&self.key) {
            let v = self.quantity(value, Dim::Frequency)?;
            let c = &mut *self.config;
            let slot = match self.key {
                "omega_m" => &mut c.omega_m,
                "omega_1" => &mut c.omega_1,
                "omega_2" => &mut c.omega_2,
                "gamma_1" => &mut c.gamma_1,
                "gamma_2" => &mut c.gamma_2,
                "kappa" => &mut c.kappa,
                _ => &mut c.effective_detuning,
            };
            *slot = v;
            return Ok(());
        }
        match self.key {
            "theta" => self.config.theta = self.angle(value)?,
            "power" => {
                let powers = value
                    .split(',')
                    .map(|p| self.power(p))
                    .collect::<Result<Vec<_>>>()?;
                if value.trim().is_empty() {
                    return Err(self.err("power list is empty"));
                }
                self.config.powers = PowerSpec::List(powers);
            }
            "power_sweep" => {
                let (a, b, count, qualifier) = self.range(value)?;
                let start = self.power(a)?;
                let stop = self.power(b)?;
                let scale = match qualifier {
                    None | Some("linear") => SweepScale::Linear,
                    Some("log") => SweepScale::Log,
                    Some(other) => return Err(self.err(format!("unknown sweep scale `{other}`"))),
                };
                if count == 0 {
                    return Err(self.err("sweep count must be >= 1"));
                }
                if stop < start {
                    return Err(self.err("sweep must be ascending"));
                }
                if scale == SweepScale::Log && start <= 0.0 {
                    return Err(self.err("log sweep needs a positive start"));
                }
                self.config.powers = PowerSpec::Sweep { start, stop, count, scale };
            }
            "grid" => {
                let (a, b, count, qualifier) = self.range(value)?;
                if qualifier.is_some() {
                    return Err(self.err("grid takes no qualifier"));
                }
                let lo = self.real(a)?;
                let hi = self.real(b)?;
                if !(hi > lo) || count < 2 {
                    return Err(self.err("grid needs lo < hi and at least 2 points"));
                }
                self.config.grid = GridSpec { lo, hi, count };
            }
            "refine" => {
                self.config.refine = match value.trim() {
                    "true" | "yes" | "on" => true,
                    "false" | "no" | "off" => false,
                    other => return Err(self.err(format!("expected true/false, got `{other}`"))),
                }
            }
            "prominence_floor" => self.config.prominence_floor = self.real(value)?,
            "refine_threshold" => self.config.refine_threshold = self.real(value)?,
            "refine_budget" => self.config.refine_budget = self.count(value)?,
            "tolerance" => self.config.tolerance = self.real(value)?,
            "output_dir" => {
                if value.trim().is_empty() {
                    return Err(self.err("output_dir is empty"));
                }
                self.config.output_dir = PathBuf::from(value.trim());
            }
            "format" => {
                let formats = value
                    .split(',')
                    .map(|f| OutputFormat::parse(f).ok_or_else(|| self.err(format!("unknown format `{}`", f.trim()))))
                    .collect::<Result<Vec<_>>>()?;
                self.config.formats = formats;
            }
            other => return Err(self.err(format!("unknown key `{other}`"))),
        }
        Ok(())
    }
}

impl RunConfig {
    /// Settings used for keys a config file leaves out.
    pub fn defaults() -> Self {
        let mut base = RunConfig {
            wavelength: 0.0,
            pull_parameter: 0.0,
            mass_1: 0.0,
            mass_2: 0.0,
            omega_m: 0.0,
            omega_1: 0.0,
            omega_2: 0.0,
            gamma_1: 0.0,
            gamma_2: 0.0,
            kappa: 0.0,
            theta: 0.0,
            effective_detuning: 0.0,
            powers: PowerSpec::List(Vec::new()),
            grid: GridSpec { lo: 0.5, hi: 1.5, count: 4001 },
            refine: false,
            prominence_floor: FeatureOptions::default().prominence_floor,
            refine_threshold: RefineOptions::default().threshold,
            refine_budget: RefineOptions::default().budget,
            tolerance: 0.15,
            output_dir: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv],
        };
        base.overlay(PAPER_CONFIG).expect("bundled config parses");
        base
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = RunConfig::defaults();
        config.overlay(text)?;
        config.params()?;
        Ok(config)
    }

    fn overlay(&mut self, text: &str) -> Result<()> {
        let mut seen: Vec<&str> = Vec::new();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::config(line, content, "expected `key = value`"))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Error::config(line, key, "key given twice"));
            }
            if (key == "power" && seen.contains(&"power_sweep")) || (key == "power_sweep" && seen.contains(&"power")) {
                return Err(Error::config(line, key, "`power` and `power_sweep` are exclusive"));
            }
            seen.push(key);
            Parser { config: self, line, key }.apply(value)?;
        }
        Ok(())
    }

    /// Physical parameters in angular-frequency SI units.
    pub fn params(&self) -> Result<SystemParams> {
        let p = SystemParams {
            wavelength: self.wavelength,
            pull_parameter: TAU * self.pull_parameter,
            mass_1: self.mass_1,
            mass_2: self.mass_2,
            omega_1: TAU * self.omega_1,
            omega_2: TAU * self.omega_2,
            gamma_1: TAU * self.gamma_1,
            gamma_2: TAU * self.gamma_2,
            kappa: TAU * self.kappa,
            theta: self.theta,
            effective_detuning: TAU * self.effective_detuning,
            omega_m: TAU * self.omega_m,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn set_equal_frequencies(&mut self) {
        self.omega_1 = self.omega_m;
        self.omega_2 = self.omega_m;
    }

    pub fn feature_options(&self) -> FeatureOptions {
        FeatureOptions {
            prominence_floor: self.prominence_floor,
        }
    }

    pub fn refine_options(&self) -> RefineOptions {
        RefineOptions {
            threshold: self.refine_threshold,
            min_step: None,
            budget: self.refine_budget,
        }
    }

    /// Canonical text form; parses back to an equal config.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        line("wavelength", format!("{:e} m", self.wavelength));
        line("pull_parameter", format!("{:e} Hz/m", self.pull_parameter));
        line("mass_1", format!("{:e} kg", self.mass_1));
        line("mass_2", format!("{:e} kg", self.mass_2));
        line("omega_m", format!("{:e} Hz", self.omega_m));
        line("omega_1", format!("{:e} Hz", self.omega_1));
        line("omega_2", format!("{:e} Hz", self.omega_2));
        line("gamma_1", format!("{:e} Hz", self.gamma_1));
        line("gamma_2", format!("{:e} Hz", self.gamma_2));
        line("kappa", format!("{:e} Hz", self.kappa));
        line("theta", format!("{:e} rad", self.theta));
        line("effective_detuning", format!("{:e} Hz", self.effective_detuning));
        match &self.powers {
            PowerSpec::List(v) => line(
                "power",
                v.iter().map(|p| format!("{p:e} W")).collect::<Vec<_>>().join(", "),
            ),
            PowerSpec::Sweep { start, stop, count, scale } => line(
                "power_sweep",
                format!(
                    "{start:e} W .. {stop:e} W : {count} {}",
                    match scale {
                        SweepScale::Linear => "linear",
                        SweepScale::Log => "log",
                    }
                ),
            ),
        }
        line("grid", format!("{:e} .. {:e} : {}", self.grid.lo, self.grid.hi, self.grid.count));
        line("refine", self.refine.to_string());
        line("prominence_floor", format!("{:e}", self.prominence_floor));
        line("refine_threshold", format!("{:e}", self.refine_threshold));
        line("refine_budget", self.refine_budget.to_string());
        line("tolerance", format!("{:e}", self.tolerance));
        line("output_dir", self.output_dir.display().to_string());
        line(
            "format",
            self.formats.iter().map(|f| f.name()).collect::<Vec<_>>().join(", "),
        );
        out
    }
}

/// Parses a `--power` override such as `0,2mW,15 mW`.
pub fn parse_power_list(text: &str) -> Result<Vec<f64>> {
    if text.trim().is_empty() {
        return Err(Error::Usage("--power needs at least one value".into()));
    }
    let mut scratch = RunConfig::defaults();
    let parser = Parser { config: &mut scratch, line: 0, key: "--power" };
    text.split(',').map(|p| parser.power(p)).collect::<Result<Vec<_>>>().map_err(|e| match e {
        Error::Config { message, .. } => Error::Usage(message),
        other => other,
    })
}
