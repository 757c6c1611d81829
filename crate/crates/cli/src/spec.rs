//! Scenario files: flat TOML tables whose keys mirror `ZwmConfig`.
//!
//! ```toml
//! name = "fringe"
//! pump = "single_photon"     # or "coherent"
//! g_prime = 0.1
//! sweep = "phi_s"            # phi_s | pump_power | transmission | gain
//! sweep_start = 0.0
//! sweep_stop = 6.0
//! sweep_points = 32
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use zwm_core::{Complex64, Cutoffs, Pump, ZwmConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpKind {
    SinglePhoton,
    Coherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    PhiS,
    /// `|alpha|^2`. For a single-photon pump the gain is scaled by `|alpha|`
    /// instead, so `|G_sp|` tracks `|g alpha|` to lowest order.
    PumpPower,
    Transmission,
    Gain,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::PhiS => "phi_s",
            SweepAxis::PumpPower => "pump_power",
            SweepAxis::Transmission => "transmission",
            SweepAxis::Gain => "gain",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            SweepAxis::PhiS => "rad",
            SweepAxis::PumpPower => "mean pump photons |alpha|^2",
            SweepAxis::Transmission => "amplitude transmission",
            SweepAxis::Gain => "g' (1/time)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

fn default_tau() -> f64 {
    1.0
}
fn default_transmission() -> f64 {
    1.0
}
fn default_order() -> u32 {
    2
}
fn default_bound() -> f64 {
    zwm_core::fock::DEFAULT_TRUNCATION_BOUND
}
fn default_fringe_points() -> usize {
    32
}
fn default_spacing() -> Spacing {
    Spacing::Linear
}
fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub pump: PumpKind,
    /// Coherent amplitude `|alpha|` of each pump beam.
    #[serde(default)]
    pub alpha: f64,
    /// Relative pump phase `phi_P`.
    #[serde(default)]
    pub phi_p: f64,
    pub g_prime: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default)]
    pub delta_omega: f64,
    #[serde(default)]
    pub phi_i: f64,
    #[serde(default)]
    pub phi_s: f64,
    #[serde(default = "default_transmission")]
    pub transmission: f64,
    #[serde(default = "default_order")]
    pub order: u32,
    #[serde(default = "default_bound")]
    pub truncation_bound: f64,
    #[serde(default)]
    pub allow_unequal_pumps: bool,
    #[serde(default)]
    pub cutoff_pump: Option<u32>,
    #[serde(default)]
    pub cutoff_signal: Option<u32>,
    #[serde(default)]
    pub cutoff_idler: Option<u32>,
    #[serde(default)]
    pub cutoff_loss: Option<u32>,
    pub sweep: SweepAxis,
    pub sweep_start: f64,
    pub sweep_stop: f64,
    pub sweep_points: usize,
    #[serde(default = "default_spacing")]
    pub sweep_spacing: Spacing,
    /// Signal phases sampled over one period for the visibility column.
    #[serde(default = "default_fringe_points")]
    pub fringe_points: usize,
    /// Fill the `ratio_rho` column (coherent pump only).
    #[serde(default)]
    pub ratio: bool,
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ScenarioSpec {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let spec: ScenarioSpec = toml::from_str(text).map_err(|e| CliError::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Spec(msg));
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("scenario name {:?} is not a valid file stem", self.name));
        }
        if self.sweep_points < 2 {
            return bad(format!("a sweep needs at least 2 points, got {}", self.sweep_points));
        }
        if !self.sweep_start.is_finite() || !self.sweep_stop.is_finite() {
            return bad("sweep range must be finite".into());
        }
        if self.sweep_start == self.sweep_stop {
            return bad("sweep range is empty".into());
        }
        if self.sweep_spacing == Spacing::Log && (self.sweep_start <= 0.0 || self.sweep_stop <= 0.0) {
            return bad("log spacing needs a positive sweep range".into());
        }
        if self.fringe_points < 3 {
            return bad(format!("fringe_points must be at least 3, got {}", self.fringe_points));
        }
        if self.ratio && self.pump != PumpKind::Coherent {
            return bad("ratio_rho needs a coherent pump".into());
        }
        let (lo, hi) = (
            self.sweep_start.min(self.sweep_stop),
            self.sweep_start.max(self.sweep_stop),
        );
        match self.sweep {
            SweepAxis::Transmission if lo < 0.0 || hi > 1.0 => bad("transmission sweep must stay in [0, 1]".into()),
            SweepAxis::PumpPower if lo < 0.0 => bad("pump power must be non-negative".into()),
            _ => Ok(()),
        }?;
        for value in self.sweep_values() {
            self.config_at(value)
                .map_err(|e| CliError::Spec(e.to_string()))?
                .validate()?;
        }
        Ok(())
    }

    /// Sweep values in table order.
    pub fn sweep_values(&self) -> Vec<f64> {
        let n = self.sweep_points;
        (0..n)
            .map(|k| {
                let s = k as f64 / (n - 1) as f64;
                match self.sweep_spacing {
                    Spacing::Linear => self.sweep_start + s * (self.sweep_stop - self.sweep_start),
                    Spacing::Log => (self.sweep_start.ln() + s * (self.sweep_stop.ln() - self.sweep_start.ln())).exp(),
                }
            })
            .collect()
    }

    fn cutoffs(&self, base: &ZwmConfig) -> Option<Cutoffs> {
        if self.cutoff_pump.is_none()
            && self.cutoff_signal.is_none()
            && self.cutoff_idler.is_none()
            && self.cutoff_loss.is_none()
        {
            return None;
        }
        let defaults = base.resolved_cutoffs();
        let pump = self.cutoff_pump;
        let signal = self.cutoff_signal;
        Some(Cutoffs {
            pump1: pump.unwrap_or(defaults.pump1),
            pump2: pump.unwrap_or(defaults.pump2),
            signal1: signal.unwrap_or(defaults.signal1),
            signal2: signal.unwrap_or(defaults.signal2),
            idler: self.cutoff_idler.unwrap_or(defaults.idler),
            loss: self.cutoff_loss.or(defaults.loss),
        })
    }

    /// Interferometer configuration at one sweep value.
    pub fn config_at(&self, value: f64) -> zwm_core::Result<ZwmConfig> {
        let mut alpha = self.alpha;
        let mut g_prime = self.g_prime;
        let mut phi_s = self.phi_s;
        let mut transmission = self.transmission;
        match self.sweep {
            SweepAxis::PhiS => phi_s = value,
            SweepAxis::PumpPower => match self.pump {
                PumpKind::Coherent => alpha = value.max(0.0).sqrt(),
                PumpKind::SinglePhoton => g_prime *= value.max(0.0).sqrt(),
            },
            SweepAxis::Transmission => transmission = value,
            SweepAxis::Gain => g_prime = value,
        }
        let pump = match self.pump {
            PumpKind::SinglePhoton => Pump::SinglePhoton { phi_p: self.phi_p },
            PumpKind::Coherent => Pump::Coherent {
                alpha1: Complex64::new(alpha, 0.0),
                alpha2: Complex64::from_polar(alpha, self.phi_p),
            },
        };
        let mut config = ZwmConfig::new(pump, Complex64::new(g_prime, 0.0), self.tau, self.delta_omega)?
            .with_phases(self.phi_i, phi_s)
            .with_transmission(transmission)
            .with_order(self.order);
        config.truncation_bound = self.truncation_bound;
        config.allow_unequal_pumps = self.allow_unequal_pumps;
        config.cutoffs = self.cutoffs(&config);
        config.validate()?;
        Ok(config)
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON form.
    pub fn config_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("scenario specs always serialize");
        Sha256::digest(canonical.as_bytes())
            .iter()
            .take(8)
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
