//! Scenario configuration: one TOML file drives a sweep or a verification
//! run. Flat key/value layout with a single nested table for channel rates.

use std::path::Path;

use eit_core::response::{ChannelKind, DEFAULT_PROBE_RATIO};
use eit_core::{ChannelRates, Complex, LambdaParams};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub physical: Physical,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default)]
    pub rates: Rates,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Physical {
    pub gamma_b: f64,
    pub gamma_c: f64,
    /// Mean detuning Δ.
    #[serde(default)]
    pub mean_detuning: f64,
    /// Probe amplitude |Ω_b|. When omitted the probe is `probe_ratio`·|Ω_c|.
    #[serde(default)]
    pub omega_b: Option<f64>,
    #[serde(default)]
    pub phi_b: f64,
    /// Control amplitude |Ω_c|.
    pub omega_c: f64,
    #[serde(default)]
    pub phi_c: f64,
    #[serde(default = "default_probe_ratio")]
    pub probe_ratio: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    #[serde(default = "two_pi")]
    pub wavelength: f64,
}

fn one() -> f64 {
    1.0
}

fn two_pi() -> f64 {
    2.0 * std::f64::consts::PI
}

fn default_probe_ratio() -> f64 {
    DEFAULT_PROBE_RATIO
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Two-photon detuning δ at fixed Δ; emits (delta, re_chi, im_chi) per kind.
    Delta,
    /// Control amplitude |Ω_c| at δ = Δ = 0 with matched rates; emits
    /// (omega_c, ng, alpha) per kind.
    Control,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub channels: Vec<String>,
    #[serde(default)]
    pub output: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Rates {
    /// Per-kind channel rate for delta sweeps and the verification grid.
    #[serde(default)]
    pub base: f64,
    /// η_z seeding the matched-rate set for control sweeps.
    #[serde(default)]
    pub eta_z_normalized: f64,
    /// Explicit rates for the `general` kind.
    #[serde(default)]
    pub eta_x: f64,
    #[serde(default)]
    pub eta_y: f64,
    #[serde(default)]
    pub eta_z: f64,
    #[serde(default)]
    pub eta_depol: f64,
    #[serde(default)]
    pub eta_bc: f64,
    #[serde(default)]
    pub eta_cb: f64,
}

impl Rates {
    pub fn explicit(&self) -> ChannelRates {
        ChannelRates {
            eta_x: self.eta_x,
            eta_y: self.eta_y,
            eta_z: self.eta_z,
            eta_depol: self.eta_depol,
            eta_bc: self.eta_bc,
            eta_cb: self.eta_cb,
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg: ScenarioConfig = toml::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let p = &self.physical;
        if !(p.gamma_b >= 0.0 && p.gamma_c >= 0.0 && p.gamma_b + p.gamma_c > 0.0) {
            anyhow::bail!("gamma_b, gamma_c must be nonnegative with positive sum");
        }
        if p.omega_c < 0.0 || p.probe_ratio <= 0.0 || p.kappa.is_nan() {
            anyhow::bail!("omega_c must be >= 0 and probe_ratio > 0");
        }
        if p.wavelength <= 0.0 {
            anyhow::bail!("wavelength must be positive");
        }
        if let Some(s) = &self.sweep {
            if s.count < 2 {
                anyhow::bail!("sweep count must be >= 2, got {}", s.count);
            }
            if s.min.is_nan() || s.max.is_nan() || s.min >= s.max {
                anyhow::bail!("sweep range needs min < max, got [{}, {}]", s.min, s.max);
            }
            if s.channels.is_empty() {
                anyhow::bail!("sweep needs at least one channel kind");
            }
            for name in &s.channels {
                ChannelKind::parse(name).map_err(|e| anyhow::anyhow!("{e}"))?;
            }
        }
        let r = self.rates.explicit();
        r.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
        if self.rates.base < 0.0 || self.rates.eta_z_normalized < 0.0 {
            anyhow::bail!("base and eta_z_normalized rates must be >= 0");
        }
        Ok(())
    }

    /// Channel kinds of the sweep section, parsed.
    pub fn kinds(&self) -> anyhow::Result<Vec<ChannelKind>> {
        let sweep = self
            .sweep
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("config has no [sweep] section"))?;
        sweep
            .channels
            .iter()
            .map(|s| ChannelKind::parse(s).map_err(|e| anyhow::anyhow!("{e}")))
            .collect()
    }

    /// Probe amplitude for a given control amplitude.
    pub fn probe_amplitude(&self, omega_c: f64) -> f64 {
        match self.physical.omega_b {
            Some(ob) => ob,
            None => self.physical.probe_ratio * omega_c,
        }
    }

    /// Physical parameters at a two-photon detuning `delta` with the
    /// configured control amplitude.
    pub fn params_at_delta(&self, delta: f64) -> anyhow::Result<LambdaParams> {
        let p = &self.physical;
        let ob = Complex::from_polar(self.probe_amplitude(p.omega_c), p.phi_b);
        let oc = Complex::from_polar(p.omega_c, p.phi_c);
        LambdaParams::from_two_photon(delta, p.mean_detuning, ob, oc, p.gamma_b, p.gamma_c)
            .map_err(|e| anyhow::anyhow!("{e}"))
    }

    /// Physical parameters at δ = Δ = 0 with control amplitude `omega_c`
    /// and ratio-scaled probe (control sweeps).
    pub fn params_at_control(&self, omega_c: f64) -> anyhow::Result<LambdaParams> {
        let p = &self.physical;
        let ob = Complex::from_polar(p.probe_ratio * omega_c, p.phi_b);
        let oc = Complex::from_polar(omega_c, p.phi_c);
        LambdaParams::from_two_photon(0.0, 0.0, ob, oc, p.gamma_b, p.gamma_c)
            .map_err(|e| anyhow::anyhow!("{e}"))
    }

    /// Rate record for one channel kind in a delta sweep / verification grid.
    pub fn rates_for_kind(&self, kind: ChannelKind) -> anyhow::Result<ChannelRates> {
        match kind {
            ChannelKind::General => Ok(self.rates.explicit()),
            _ => kind
                .rates(self.rates.base)
                .map_err(|e| anyhow::anyhow!("{e}")),
        }
    }
}

/// Sweep grid point: min + (max − min) · i/(count − 1).
pub fn grid_point(min: f64, max: f64, count: usize, i: usize) -> f64 {
    min + (max - min) * (i as f64 / (count - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> anyhow::Result<ScenarioConfig> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    const BASE: &str = r#"
[physical]
gamma_b = 0.5
gamma_c = 0.5
omega_c = 0.16

[sweep]
axis = "delta"
min = -0.5
max = 0.5
count = 11
channels = ["ideal", "dephase"]

[rates]
base = 0.1
"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = parse(BASE).unwrap();
        assert_eq!(cfg.kinds().unwrap().len(), 2);
        assert_eq!(cfg.physical.kappa, 1.0);
        assert!((cfg.physical.wavelength - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        let p = cfg.params_at_delta(0.1).unwrap();
        assert!((p.omega_b.norm() - 1e-4 * 0.16).abs() < 1e-18);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(parse(&BASE.replace("count = 11", "count = 1")).is_err());
        assert!(parse(&BASE.replace("min = -0.5", "min = 0.7")).is_err());
        assert!(parse(&BASE.replace("base = 0.1", "base = -0.1")).is_err());
        assert!(parse(&BASE.replace("\"dephase\"", "\"nonsense\"")).is_err());
        assert!(parse(&BASE.replace("gamma_b = 0.5", "gamma_b = -0.5")).is_err());
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(parse(&format!("{BASE}\nextra = 1\n")).is_err());
    }

    #[test]
    fn grid_endpoints_exact() {
        assert_eq!(grid_point(-0.5, 0.5, 1001, 0), -0.5);
        assert_eq!(grid_point(-0.5, 0.5, 1001, 1000), 0.5);
        assert_eq!(grid_point(-0.5, 0.5, 1001, 500), 0.0);
    }
}
