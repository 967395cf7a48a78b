//! Static energy-efficient power control: SINR, bit-per-joule utility,
//! the closed-form non-saturated Nash powers and a best-response oracle.

use serde::{Deserialize, Serialize};

use crate::efficiency::{solve_beta, EfficiencyModel, DEFAULT_ROOT_TOL};
use crate::error::{Error, Result};

/// Multiple-access channel shared by `K` transmitters.
///
/// Channel inputs are power gains `h_i = |g_i|²`. The processing gain only
/// enters the sensing-profile utilities; the one-shot and two-tier formulas
/// correspond to `N = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    /// Channel power gain per player (dimensionless).
    #[serde(rename = "h")]
    pub gains: Vec<f64>,
    /// Information rate per player (bit/s).
    #[serde(rename = "rate")]
    pub rates: Vec<f64>,
    /// Receiver noise power (W).
    #[serde(rename = "sigma2")]
    pub noise: f64,
    /// Transmit power cap per player (W).
    #[serde(rename = "pmax")]
    pub max_power: Vec<f64>,
    /// Fraction of the block spent sensing.
    #[serde(rename = "alpha", default)]
    pub sensing_cost: f64,
    #[serde(default = "unit_gain")]
    pub processing_gain: f64,
}

fn unit_gain() -> f64 {
    1.0
}

impl NetworkConfig {
    pub fn new(gains: Vec<f64>, rates: Vec<f64>, noise: f64, max_power: Vec<f64>) -> Result<Self> {
        let cfg = NetworkConfig {
            gains,
            rates,
            noise,
            max_power,
            sensing_cost: 0.0,
            processing_gain: 1.0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `k` identical players.
    pub fn symmetric(k: usize, gain: f64, rate: f64, noise: f64, max_power: f64) -> Result<Self> {
        Self::new(vec![gain; k], vec![rate; k], noise, vec![max_power; k])
    }

    pub fn with_sensing_cost(mut self, alpha: f64) -> Result<Self> {
        self.sensing_cost = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn with_processing_gain(mut self, n: f64) -> Result<Self> {
        self.processing_gain = n;
        self.validate()?;
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.gains.len()
    }

    /// `R_i h_i / σ²`, the common factor of every closed-form utility.
    pub fn weight(&self, i: usize) -> f64 {
        self.rates[i] * self.gains[i] / self.noise
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.k()).map(|i| self.weight(i)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 {
            return Err(Error::InvalidInput("at least one player is required".into()));
        }
        if self.rates.len() != k || self.max_power.len() != k {
            return Err(Error::InvalidInput(format!(
                "h, rate and pmax must have one entry per player (got {}, {}, {})",
                k,
                self.rates.len(),
                self.max_power.len()
            )));
        }
        let positive = |name: &str, v: &[f64]| -> Result<()> {
            match v.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
                Some(i) => Err(Error::InvalidInput(format!("{name}[{i}] must be positive and finite, got {}", v[i]))),
                None => Ok(()),
            }
        };
        positive("h", &self.gains)?;
        positive("rate", &self.rates)?;
        positive("pmax", &self.max_power)?;
        positive("sigma2", &[self.noise])?;
        if !(0.0..1.0).contains(&self.sensing_cost) {
            return Err(Error::InvalidInput(format!("alpha must lie in [0, 1), got {}", self.sensing_cost)));
        }
        if !(self.processing_gain >= 1.0 && self.processing_gain.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "processing_gain must be at least 1, got {}",
                self.processing_gain
            )));
        }
        Ok(())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.k() {
            return Err(Error::IndexOutOfRange { index: i, players: self.k() });
        }
        Ok(())
    }
}

/// Transmit powers, one per player (W).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerVector(pub Vec<f64>);

impl PowerVector {
    pub fn validate(&self, cfg: &NetworkConfig) -> Result<()> {
        if self.0.len() != cfg.k() {
            return Err(Error::InvalidInput(format!(
                "power vector has {} entries for {} players",
                self.0.len(),
                cfg.k()
            )));
        }
        for (i, (&p, &cap)) in self.0.iter().zip(&cfg.max_power).enumerate() {
            if !(0.0..=cap).contains(&p) {
                return Err(Error::InvalidInput(format!("p[{i}] = {p} outside [0, {cap}]")));
            }
        }
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

fn interference(cfg: &NetworkConfig, p: &[f64], i: usize) -> f64 {
    p.iter()
        .zip(&cfg.gains)
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, (pj, hj))| pj * hj)
        .sum::<f64>()
        + cfg.noise
}

pub(crate) fn sinr_unchecked(cfg: &NetworkConfig, p: &[f64], i: usize) -> f64 {
    p[i] * cfg.gains[i] / interference(cfg, p, i)
}

pub(crate) fn utility_unchecked(cfg: &NetworkConfig, model: &EfficiencyModel, p: &[f64], i: usize) -> f64 {
    if p[i] <= 0.0 {
        return 0.0;
    }
    cfg.rates[i] * model.value(sinr_unchecked(cfg, p, i)) / p[i]
}

/// `p_i h_i / (Σ_{j≠i} p_j h_j + σ²)`.
pub fn sinr(cfg: &NetworkConfig, p: &PowerVector, i: usize) -> Result<f64> {
    cfg.check_index(i)?;
    p.validate(cfg)?;
    Ok(sinr_unchecked(cfg, &p.0, i))
}

/// Energy efficiency `R_i f(SINR_i) / p_i` in bit/J, zero at `p_i = 0`.
pub fn utility(cfg: &NetworkConfig, model: &EfficiencyModel, p: &PowerVector, i: usize) -> Result<f64> {
    cfg.check_index(i)?;
    p.validate(cfg)?;
    Ok(utility_unchecked(cfg, model, &p.0, i))
}

/// Non-saturated Nash powers `p_i* = (σ²/h_i) β* / (1 - (K-1)β*)`.
pub fn nash_powers(cfg: &NetworkConfig, model: &EfficiencyModel) -> Result<PowerVector> {
    let beta = solve_beta(model, DEFAULT_ROOT_TOL)?.value;
    nash_powers_with_beta(cfg, beta)
}

pub fn nash_powers_with_beta(cfg: &NetworkConfig, beta: f64) -> Result<PowerVector> {
    cfg.validate()?;
    let k = cfg.k();
    let denom = 1.0 - (k as f64 - 1.0) * beta;
    if !(denom > 0.0) {
        return Err(Error::Infeasible(format!(
            "(K-1)β* = {:e} must be below 1 (K = {k}, β* = {beta:e})",
            (k as f64 - 1.0) * beta
        )));
    }
    let powers: Vec<f64> = cfg.gains.iter().map(|h| cfg.noise / h * beta / denom).collect();
    for (i, (&p, &cap)) in powers.iter().zip(&cfg.max_power).enumerate() {
        if p > cap {
            return Err(Error::Saturated { player: i, power: p, cap });
        }
    }
    Ok(PowerVector(powers))
}

/// Closed-form utility at the non-saturated Nash point,
/// `R_i h_i f(β*) (1 - (K-1)β*) / (σ² β*)`.
pub fn nash_utility(cfg: &NetworkConfig, model: &EfficiencyModel, beta: f64, i: usize) -> f64 {
    let k = cfg.k() as f64;
    cfg.weight(i) * model.value(beta) * (1.0 - (k - 1.0) * beta) / beta
}

/// Energy-efficient reply: the power that puts player `i` at SINR `β*`,
/// capped at `Pmax_i`.
pub fn best_response(cfg: &NetworkConfig, model: &EfficiencyModel, p: &PowerVector, i: usize) -> Result<f64> {
    cfg.check_index(i)?;
    p.validate(cfg)?;
    let beta = solve_beta(model, DEFAULT_ROOT_TOL)?.value;
    Ok(best_response_with_beta(cfg, beta, &p.0, i))
}

pub fn best_response_with_beta(cfg: &NetworkConfig, beta: f64, p: &[f64], i: usize) -> f64 {
    (beta * interference(cfg, p, i) / cfg.gains[i]).min(cfg.max_power[i])
}

/// Result of sequential best-response sweeps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrOutcome {
    pub powers: PowerVector,
    pub converged: bool,
    /// Completed sweeps.
    pub iterations: usize,
    /// At least one player sits at its cap.
    pub saturated: bool,
}

/// Gauss-Seidel best-response dynamics in ascending player order. Stops once
/// a full sweep moves no power by more than `tol`.
pub fn br_dynamics(
    cfg: &NetworkConfig,
    model: &EfficiencyModel,
    init: &PowerVector,
    tol: f64,
    max_iter: usize,
) -> Result<BrOutcome> {
    init.validate(cfg)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let beta = solve_beta(model, DEFAULT_ROOT_TOL)?.value;
    let mut p = init.0.clone();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut moved = 0.0f64;
        for i in 0..cfg.k() {
            let next = best_response_with_beta(cfg, beta, &p, i);
            moved = moved.max((next - p[i]).abs());
            p[i] = next;
        }
        if moved <= tol {
            converged = true;
            break;
        }
    }
    let saturated = p.iter().zip(&cfg.max_power).any(|(p, cap)| p >= cap);
    Ok(BrOutcome { powers: PowerVector(p), converged, iterations, saturated })
}
