//! Run configuration: a flat `key = value` file plus `key=value` overrides.
//!
//! Numeric values accept arithmetic on literals with `pi`, `sqrt(..)`,
//! `^` and implicit multiplication, e.g. `2^(-1/4)`, `pi/2`, `2pi`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimator::{TimeWindow, TSTAR_MIN_GRID};
use crate::field::{MechInit, ModelConfig, OpticalAmplitudes};

/// Uniform grid with `steps` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        let grid = Grid { min, max, steps };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.max <= self.min {
            return Err(Error::InvalidConfig(format!(
                "grid must be strictly increasing (min = {}, max = {})",
                self.min, self.max
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid needs >= 2 steps (got {})",
                self.steps
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + h * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub amplitudes: OpticalAmplitudes,
    pub tau_grid: Grid,
    pub g_grid: Grid,
    pub window: TimeWindow,
    pub tstar_grid: usize,
    /// Interaction time used by `verify`.
    pub verify_tau: f64,
    /// Negative control for `verify`: flips the sign of f2 on the analytic side.
    pub corrupt_f2: bool,
    /// Subcommand a preset is meant for (informational).
    pub command: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let two_pi = 2.0 * std::f64::consts::PI;
        RunConfig {
            model: ModelConfig::default(),
            amplitudes: OpticalAmplitudes::uniform(2),
            tau_grid: Grid {
                min: 0.0,
                max: two_pi,
                steps: 201,
            },
            g_grid: Grid {
                min: -3.0,
                max: 3.0,
                steps: 61,
            },
            window: TimeWindow::first_period(),
            tstar_grid: 4096,
            verify_tau: 1.0,
            corrupt_f2: false,
            command: None,
        }
    }
}

const KEYS: &[&str] = &[
    "command",
    "mech",
    "alpha_abs",
    "alpha_phase",
    "n_th",
    "zeta_abs",
    "zeta_phase",
    "g0",
    "sigma",
    "n_phot",
    "amplitudes",
    "tau_min",
    "tau_max",
    "tau_steps",
    "g_min",
    "g_max",
    "g_steps",
    "window_min",
    "window_max",
    "tstar_grid",
    "verify_tau",
    "corrupt_f2",
];

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = split_pair(line).ok_or_else(|| {
            Error::InvalidConfig(format!("line {}: expected key = value", lineno + 1))
        })?;
        map.insert(k, v);
    }
    Ok(map)
}

fn split_pair(s: &str) -> Option<(String, String)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    if k.is_empty() {
        return None;
    }
    Some((k.to_string(), v.trim().to_string()))
}

impl RunConfig {
    /// Reads `path` (if any) and applies `overrides` of the form `key=value`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut pairs = match path {
            Some(p) => parse_pairs(
                &std::fs::read_to_string(p)
                    .map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
            )?,
            None => BTreeMap::new(),
        };
        for o in overrides {
            let (k, v) = split_pair(o)
                .ok_or_else(|| Error::InvalidConfig(format!("override `{o}` is not key=value")))?;
            pairs.insert(k, v);
        }
        Self::from_pairs(&pairs)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        if let Some(k) = pairs.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(Error::InvalidConfig(format!("unknown key `{k}`")));
        }
        let num = |key: &str, default: f64| -> Result<f64> {
            match pairs.get(key) {
                Some(v) => eval_scalar(v).map_err(|e| Error::InvalidConfig(format!("{key}: {e}"))),
                None => Ok(default),
            }
        };
        let count = |key: &str, default: usize| -> Result<usize> {
            match pairs.get(key) {
                Some(v) => v
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidConfig(format!("{key}: `{v}` is not a count"))),
                None => Ok(default),
            }
        };
        let d = RunConfig::default();

        let mech_kind = pairs.get("mech").map(String::as_str).unwrap_or("coherent");
        let alpha_abs = num("alpha_abs", 0.0)?;
        let alpha_phase = num("alpha_phase", 0.0)?;
        let mech = match mech_kind {
            "coherent" => MechInit::Coherent {
                alpha_abs,
                alpha_phase,
            },
            "thermal" => MechInit::Thermal {
                n_th: num("n_th", 0.0)?,
            },
            "squeezed" => MechInit::Squeezed {
                alpha_abs,
                alpha_phase,
                zeta_abs: num("zeta_abs", 0.0)?,
                zeta_phase: num("zeta_phase", 0.0)?,
            },
            other => {
                return Err(Error::InvalidConfig(format!(
                    "mech must be coherent, thermal or squeezed (got `{other}`)"
                )))
            }
        };

        let amplitudes = match pairs.get("amplitudes") {
            Some(list) => {
                let vals = list
                    .split(',')
                    .map(|s| eval_scalar(s.trim()))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::InvalidConfig(format!("amplitudes: {e}")))?;
                OpticalAmplitudes::from_real(&vals)?
            }
            None => OpticalAmplitudes::uniform(count("n_phot", d.model.n_phot)?),
        };
        let n_phot = count("n_phot", amplitudes.len())?;
        if n_phot != amplitudes.len() {
            return Err(Error::InvalidConfig(format!(
                "n_phot = {n_phot} but {} amplitudes given",
                amplitudes.len()
            )));
        }

        let model = ModelConfig {
            g0: num("g0", d.model.g0)?,
            sigma: num("sigma", d.model.sigma)?,
            tau: 0.0,
            n_phot,
            mech,
        };
        model.validate()?;

        let tau_grid = Grid::new(
            num("tau_min", d.tau_grid.min)?,
            num("tau_max", d.tau_grid.max)?,
            count("tau_steps", d.tau_grid.steps)?,
        )?;
        if tau_grid.min < 0.0 {
            return Err(Error::InvalidConfig("tau_min must be >= 0".into()));
        }
        let g_grid = Grid::new(
            num("g_min", d.g_grid.min)?,
            num("g_max", d.g_grid.max)?,
            count("g_steps", d.g_grid.steps)?,
        )?;
        let window = TimeWindow {
            min: num("window_min", d.window.min)?,
            max: num("window_max", d.window.max)?,
        };
        if !(window.min >= 0.0 && window.max > window.min) {
            return Err(Error::InvalidConfig(
                "window must satisfy 0 <= window_min < window_max".into(),
            ));
        }
        let tstar_grid = count("tstar_grid", d.tstar_grid)?;
        if tstar_grid < TSTAR_MIN_GRID {
            return Err(Error::InvalidConfig(format!(
                "tstar_grid must be >= {TSTAR_MIN_GRID}"
            )));
        }
        let verify_tau = num("verify_tau", d.verify_tau)?;
        if verify_tau.is_nan() || verify_tau < 0.0 {
            return Err(Error::InvalidConfig("verify_tau must be >= 0".into()));
        }
        let corrupt_f2 = match pairs.get("corrupt_f2").map(String::as_str) {
            None | Some("false") | Some("0") => false,
            Some("true") | Some("1") => true,
            Some(v) => {
                return Err(Error::InvalidConfig(format!(
                    "corrupt_f2: `{v}` is not a boolean"
                )))
            }
        };

        Ok(RunConfig {
            model,
            amplitudes,
            tau_grid,
            g_grid,
            window,
            tstar_grid,
            verify_tau,
            corrupt_f2,
            command: pairs.get("command").cloned(),
        })
    }

    /// Fully resolved configuration as `key = value` lines.
    pub fn resolved(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| out.push((k.to_string(), v));
        if let Some(cmd) = &self.command {
            put("command", cmd.clone());
        }
        match self.model.mech {
            MechInit::Coherent {
                alpha_abs,
                alpha_phase,
            } => {
                put("mech", "coherent".into());
                put("alpha_abs", fmt(alpha_abs));
                put("alpha_phase", fmt(alpha_phase));
            }
            MechInit::Thermal { n_th } => {
                put("mech", "thermal".into());
                put("n_th", fmt(n_th));
            }
            MechInit::Squeezed {
                alpha_abs,
                alpha_phase,
                zeta_abs,
                zeta_phase,
            } => {
                put("mech", "squeezed".into());
                put("alpha_abs", fmt(alpha_abs));
                put("alpha_phase", fmt(alpha_phase));
                put("zeta_abs", fmt(zeta_abs));
                put("zeta_phase", fmt(zeta_phase));
            }
        }
        put("g0", fmt(self.model.g0));
        put("sigma", fmt(self.model.sigma));
        put("n_phot", self.model.n_phot.to_string());
        let amps: Vec<String> = self
            .amplitudes
            .as_slice()
            .iter()
            .map(|z| fmt(z.re))
            .collect();
        put("amplitudes", amps.join(","));
        put("tau_min", fmt(self.tau_grid.min));
        put("tau_max", fmt(self.tau_grid.max));
        put("tau_steps", self.tau_grid.steps.to_string());
        put("g_min", fmt(self.g_grid.min));
        put("g_max", fmt(self.g_grid.max));
        put("g_steps", self.g_grid.steps.to_string());
        put("window_min", fmt(self.window.min));
        put("window_max", fmt(self.window.max));
        put("tstar_grid", self.tstar_grid.to_string());
        put("verify_tau", fmt(self.verify_tau));
        put("corrupt_f2", self.corrupt_f2.to_string());
        out
    }
}

/// 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Evaluates a scalar expression.
pub fn eval_scalar(s: &str) -> std::result::Result<f64, String> {
    let mut p = ExprParser {
        s: s.as_bytes(),
        pos: 0,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.s.len() {
        return Err(format!("unexpected `{}` in `{s}`", &s[p.pos..]));
    }
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

struct ExprParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let r = self.term()?;
            v = if op == b'+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn term(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.power()?;
        loop {
            match self.peek() {
                Some(op @ (b'*' | b'/')) => {
                    self.pos += 1;
                    let r = self.power()?;
                    v = if op == b'*' { v * r } else { v / r };
                }
                // implicit multiplication: `2pi`, `3(1+x)`, `2sqrt(2)`
                Some(b) if b.is_ascii_alphabetic() || b == b'(' => v *= self.power()?,
                _ => return Ok(v),
            }
        }
    }

    fn power(&mut self) -> std::result::Result<f64, String> {
        let base = self.unary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.power()?;
            return Ok(base.powf(e));
        }
        Ok(base)
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.power()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.power()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => {
                let start = self.pos;
                while self.pos < self.s.len()
                    && (self.s[self.pos].is_ascii_digit() || self.s[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                if self.pos < self.s.len() && matches!(self.s[self.pos], b'e' | b'E') {
                    let save = self.pos;
                    self.pos += 1;
                    if self.pos < self.s.len() && matches!(self.s[self.pos], b'+' | b'-') {
                        self.pos += 1;
                    }
                    let digits = self.pos;
                    while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if self.pos == digits {
                        self.pos = save;
                    }
                }
                let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                text.parse::<f64>()
                    .map_err(|_| format!("bad number `{text}`"))
            }
            Some(b) if b.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match name {
                    "pi" => Ok(std::f64::consts::PI),
                    "sqrt" => Ok(self.primary()?.sqrt()),
                    _ => Err(format!("unknown name `{name}`")),
                }
            }
            _ => Err("expected a number".into()),
        }
    }
}
