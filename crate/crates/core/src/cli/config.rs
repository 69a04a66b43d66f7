//! Plain-text `key = value` run configuration.
//!
//! ```text
//! # FLM slopes at the golden mean
//! family = flm
//! omega = golden
//! n_max = 6
//! ```

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::forced::{ForcedFamily, ForcingKind, ForcingSpec, OmegaSpec};
use crate::numerics::scalar::{parse_real, Precision, Real};
use crate::universality::SlopeJobConfig;

/// `(α_min, α_max, ε_min, ε_max)`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub eps_min: f64,
    pub eps_max: f64,
}

impl Window {
    pub fn new(alpha_min: f64, alpha_max: f64, eps_min: f64, eps_max: f64) -> Result<Self> {
        let w = Self { alpha_min, alpha_max, eps_min, eps_max };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha_min, self.alpha_max, self.eps_min, self.eps_max].iter().all(|v| v.is_finite());
        if !finite || !(self.alpha_max > self.alpha_min) || !(self.eps_max > self.eps_min) {
            return Err(Error::Config(format!(
                "degenerate window alpha [{}, {}] x eps [{}, {}]",
                self.alpha_min, self.alpha_max, self.eps_min, self.eps_max
            )));
        }
        Ok(())
    }
}

impl Default for Window {
    fn default() -> Self {
        Self { alpha_min: 2.8, alpha_max: 4.0, eps_min: 0.0, eps_max: 0.15 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: ForcingKind,
    /// Second-harmonic weight, kept as text so it parses at working precision.
    pub e: String,
    pub omega: OmegaSpec,
    pub n_min: u32,
    pub n_max: u32,
    pub schedule: SlopeJobConfig,
    /// Also compute `β'_n` on `S_n^+`.
    pub beta: bool,
    pub precision: Precision,
    pub window: Window,
    pub width: usize,
    pub height: usize,
    pub transient: usize,
    pub iters: usize,
    pub threads: usize,
    pub out_dir: PathBuf,
    /// Accumulation point for the rescaling; the cascade estimate when unset.
    pub s_star: Option<String>,
    pub delta0: Option<f64>,
    pub delta1: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            family: ForcingKind::MultiplicativeCos,
            e: "0".into(),
            omega: OmegaSpec::Golden,
            n_min: 0,
            n_max: 6,
            schedule: SlopeJobConfig::default(),
            beta: false,
            precision: Precision::Standard,
            window: Window::default(),
            width: 400,
            height: 300,
            transient: 10_000,
            iters: 100_000,
            threads: 1,
            out_dir: PathBuf::from("qpcascade-out"),
            s_star: None,
            delta0: None,
            delta1: None,
        }
    }
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse::<T>().map_err(|e| Error::Config(format!("{key}: cannot parse '{raw}': {e}")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        text.parse()
    }

    pub fn forcing<R: Real>(&self) -> Result<ForcingSpec<R>> {
        Ok(match self.family {
            ForcingKind::MultiplicativeCos => ForcingSpec::multiplicative(),
            ForcingKind::AdditiveCos => ForcingSpec::additive(),
            ForcingKind::AdditiveTwoHarmonic => ForcingSpec::two_harmonic(
                parse_real(&self.e).map_err(|e| Error::Config(format!("E: {e}")))?,
            ),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < self.n_min {
            return Err(Error::Config(format!("n_max ({}) < n_min ({})", self.n_max, self.n_min)));
        }
        if self.width < 2 || self.height < 2 {
            return Err(Error::Config(format!("grid {}x{} is below 2x2", self.width, self.height)));
        }
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.iters == 0 {
            return Err(Error::Config("iters must be at least 1".into()));
        }
        self.window.validate()?;
        self.schedule.validate()?;
        parse_real::<f64>(&self.e).map_err(|e| Error::Config(format!("E: {e}")))?;
        ForcedFamily::<f64>::new(self.omega.value()?, self.forcing()?)?;
        if let Some(s) = &self.s_star {
            parse_real::<f64>(s).map_err(|e| Error::Config(format!("s_star: {e}")))?;
        }
        Ok(())
    }
}

impl FromStr for RunConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = HashSet::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", lineno + 1)))?;
            let (key, raw) = (key.trim(), raw.trim());
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!("line {}: duplicate key '{key}'", lineno + 1)));
            }
            match key {
                "family" => cfg.family = raw.parse()?,
                "E" => cfg.e = raw.to_string(),
                "omega" => cfg.omega = raw.parse()?,
                "n_min" => cfg.n_min = value(key, raw)?,
                "n_max" => cfg.n_max = value(key, raw)?,
                "h0" => cfg.schedule.h0 = value(key, raw)?,
                "kappa" => cfg.schedule.kappa = value(key, raw)?,
                "halvings" => cfg.schedule.halvings = value(key, raw)?,
                "extrapolation_steps" => cfg.schedule.extrapolation_steps = value(key, raw)?,
                "beta" => cfg.beta = value(key, raw)?,
                "precision" => cfg.precision = value(key, raw)?,
                "alpha_min" => cfg.window.alpha_min = value(key, raw)?,
                "alpha_max" => cfg.window.alpha_max = value(key, raw)?,
                "eps_min" => cfg.window.eps_min = value(key, raw)?,
                "eps_max" => cfg.window.eps_max = value(key, raw)?,
                "width" => cfg.width = value(key, raw)?,
                "height" => cfg.height = value(key, raw)?,
                "transient" => cfg.transient = value(key, raw)?,
                "iters" => cfg.iters = value(key, raw)?,
                "threads" => cfg.threads = value(key, raw)?,
                "out_dir" => cfg.out_dir = PathBuf::from(raw),
                "s_star" => cfg.s_star = Some(raw.to_string()),
                "delta0" => cfg.delta0 = Some(value(key, raw)?),
                "delta1" => cfg.delta1 = Some(value(key, raw)?),
                _ => return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}
