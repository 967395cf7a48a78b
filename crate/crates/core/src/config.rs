//! Run configuration read by the command-line tool.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::efficiency::{EfficiencyModel, DEFAULT_ROOT_TOL};
use crate::error::{Error, Result};
use crate::hierarchy::GammaIndexing;
use crate::hybrid::GridSpec;
use crate::oneshot::NetworkConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Bisection tolerance on SINR roots.
    pub root: f64,
    /// Relative slack for pure-equilibrium and potential checks.
    pub equilibrium: f64,
    /// Slack on correlated-equilibrium incentive constraints.
    pub correlated: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { root: DEFAULT_ROOT_TOL, equilibrium: 1e-12, correlated: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec { from: 0.0, to: 0.3, steps: 61 }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::InvalidInput(format!("sweep needs at least 2 steps, got {}", self.steps)));
        }
        if !(self.from.is_finite() && self.to.is_finite() && self.from < self.to) {
            return Err(Error::InvalidInput(format!("sweep range must satisfy from < to, got [{}, {}]", self.from, self.to)));
        }
        if self.from < 0.0 || self.to >= 1.0 {
            return Err(Error::InvalidInput(format!("sweep range must lie in [0, 1), got [{}, {}]", self.from, self.to)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.to - self.from) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| if k + 1 == self.steps { self.to } else { self.from + step * k as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionSpec {
    pub angles: usize,
}

impl Default for RegionSpec {
    fn default() -> Self {
        RegionSpec { angles: 360 }
    }
}

/// Everything a command needs. Optional sections fall back to defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub network: NetworkConfig,
    pub efficiency: EfficiencyModel,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub hybrid: GridSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub region: RegionSpec,
    #[serde(default)]
    pub consistent_gamma_index: bool,
    /// Directory for output files; stdout when absent.
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.efficiency.validate()?;
        let t = &self.tolerances;
        for (name, v) in [("root", t.root), ("equilibrium", t.equilibrium), ("correlated", t.correlated)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("tolerances.{name} must be positive, got {v}")));
            }
        }
        self.hybrid.validate()?;
        self.sweep.validate()?;
        if self.region.angles < 3 {
            return Err(Error::InvalidInput(format!("region.angles must be at least 3, got {}", self.region.angles)));
        }
        Ok(())
    }

    pub fn indexing(&self) -> GammaIndexing {
        if self.consistent_gamma_index {
            GammaIndexing::Consistent
        } else {
            GammaIndexing::Verbatim
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "network": {"h": [1, 1], "rate": [1, 1], "sigma2": 0.1, "pmax": [1, 1], "alpha": 0.05},
        "efficiency": {"family": "exp_ratio", "a": 0.5}
    }"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.hybrid, GridSpec::default());
        assert_eq!(cfg.sweep.steps, 61);
        assert_eq!(cfg.network.processing_gain, 1.0);
        assert_eq!(cfg.indexing(), GammaIndexing::Verbatim);
    }

    #[test]
    fn missing_field_is_named() {
        let text = MINIMAL.replace(r#""sigma2": 0.1, "#, "");
        let err = RunConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("sigma2"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let text = MINIMAL.replace(r#""alpha": 0.05"#, r#""alpha": 0.05, "beta": 1"#);
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn bad_tolerance_rejected() {
        let text = MINIMAL.replace("}\n    }", "}, \"tolerances\": {\"root\": 0}\n    }");
        let err = RunConfig::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("tolerances.root"), "{err}");
    }

    #[test]
    fn sweep_values_hit_both_ends() {
        let v = SweepSpec { from: 0.0, to: 0.3, steps: 61 }.values();
        assert_eq!(v.len(), 61);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[60], 0.3);
        assert!((v[25] - 0.125).abs() < 1e-15);
        assert!(SweepSpec { from: 0.3, to: 0.1, steps: 5 }.validate().is_err());
    }
}
