//! The `K`-player sensing game: every player decides whether to sense (`S`)
//! or not (`NS`), and is paid the sensing-profile utility of the resulting
//! `(F, L)` split.
//!
//! Payoffs depend on the opponents only through how many of them sense, and
//! each player's payoff carries the factor `w_i = R_i h_i / σ²`. Dividing by
//! that factor yields a symmetric binary-action game, which is what makes
//! the Rosenthal potential work for the normalized game.

use serde::Serialize;

use crate::efficiency::{EfficiencyModel, DEFAULT_ROOT_TOL};
use crate::error::{Error, Result};
use crate::game::FiniteGame;
use crate::hierarchy::{GammaIndexing, SensingAction, SensingProfile, SensingRoots};
use crate::oneshot::NetworkConfig;

/// Per-weight utilities `U^a(F, K-F) / w` for `F = 0..=K`.
///
/// Entries that no player can receive (`S` with `F = 0`, `NS` with `F = K`)
/// are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitUtilities {
    pub k: usize,
    pub sense: Vec<Option<f64>>,
    pub not_sense: Vec<Option<f64>>,
}

impl UnitUtilities {
    pub fn compute(cfg: &NetworkConfig, model: &EfficiencyModel, indexing: GammaIndexing) -> Result<Self> {
        cfg.validate()?;
        let k = cfg.k();
        let roots = SensingRoots::solve(model, k, cfg.processing_gain, DEFAULT_ROOT_TOL)?;
        let mut sense = vec![None; k + 1];
        let mut not_sense = vec![None; k + 1];
        for f in 0..=k {
            let profile = SensingProfile::new(f, k - f);
            if f >= 1 {
                sense[f] = Some(roots.unit_utility(model, profile, SensingAction::Sense, indexing)?);
            }
            if f < k {
                not_sense[f] = Some(roots.unit_utility(model, profile, SensingAction::NotSense, indexing)?);
            }
        }
        Ok(UnitUtilities { k, sense, not_sense })
    }

    /// Per-weight utility of a player choosing `action` when `sensing`
    /// players in total (the player included) sense.
    pub fn get(&self, action: SensingAction, sensing: usize) -> f64 {
        let slot = match action {
            SensingAction::Sense => self.sense[sensing],
            SensingAction::NotSense => self.not_sense[sensing],
        };
        slot.expect("profile has no slot for this action")
    }
}

fn sensing_labels(k: usize) -> Vec<Vec<String>> {
    vec![SensingAction::ALL.iter().map(|a| a.label().to_string()).collect(); k]
}

/// Number of sensing players in joint action `idx`.
pub fn sensing_count(game: &FiniteGame, idx: usize) -> usize {
    (0..game.players()).filter(|&i| game.action_at(idx, i) == SensingAction::Sense.index()).count()
}

/// `(F, L)` profile of a joint action of a sensing game.
pub fn profile_of(game: &FiniteGame, idx: usize) -> SensingProfile {
    let f = sensing_count(game, idx);
    SensingProfile::new(f, game.players() - f)
}

/// Payoff tensor of the sensing game with actions `[NS, S]` for every player.
pub fn build_sensing_game(cfg: &NetworkConfig, model: &EfficiencyModel, indexing: GammaIndexing) -> Result<FiniteGame> {
    let units = UnitUtilities::compute(cfg, model, indexing)?;
    sensing_game_from_units(cfg, &units)
}

pub fn sensing_game_from_units(cfg: &NetworkConfig, units: &UnitUtilities) -> Result<FiniteGame> {
    let k = cfg.k();
    if units.k != k {
        return Err(Error::InvalidInput(format!("unit utilities for K = {} used with K = {k}", units.k)));
    }
    let weights = cfg.weights();
    FiniteGame::from_fn(sensing_labels(k), |actions| {
        let f = actions.iter().filter(|&&a| a == SensingAction::Sense.index()).count();
        Ok(actions
            .iter()
            .enumerate()
            .map(|(i, &a)| weights[i] * units.get(SensingAction::from_index(a).unwrap(), f))
            .collect())
    })
}

/// Rosenthal potential of the normalized sensing game, one value per `F`.
///
/// `values[F] = Σ_{i=1}^{F} U^S(i, K-i)/w + Σ_{j=1}^{K-F} U^NS(K-j, j)/w`.
/// With equal weights `w`, the potential of the game itself is `w * values`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialTable {
    pub k: usize,
    pub profiles: Vec<SensingProfile>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PotentialTable {
    pub fn from_units(units: &UnitUtilities, weights: Vec<f64>) -> Self {
        Self::from_fn(units.k, weights, |action, f| units.get(action, f))
    }

    /// Builds the table from a per-weight utility `unit(action, F)`. Empty
    /// sums are zero, so `k = 0` yields the single value `0`.
    pub fn from_fn(k: usize, weights: Vec<f64>, unit: impl Fn(SensingAction, usize) -> f64) -> Self {
        let values = (0..=k)
            .map(|f| {
                let l = k - f;
                let sense: f64 = (1..=f).map(|i| unit(SensingAction::Sense, i)).sum();
                let not_sense: f64 = (1..=l).map(|j| unit(SensingAction::NotSense, k - j)).sum();
                sense + not_sense
            })
            .collect();
        PotentialTable { k, profiles: (0..=k).map(|f| SensingProfile::new(f, k - f)).collect(), values, weights }
    }

    /// Profiles attaining the maximum, ties within `tol * max(1, |Φ|)` included.
    pub fn argmax(&self, tol: f64) -> Vec<SensingProfile> {
        let best = self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let slack = tol * best.abs().max(1.0);
        self.profiles
            .iter()
            .zip(&self.values)
            .filter(|(_, &v)| v >= best - slack)
            .map(|(p, _)| *p)
            .collect()
    }

    /// Equal-weight potential `w * values[F]`, if all weights agree within
    /// `rel_tol`.
    pub fn scaled_values(&self, rel_tol: f64) -> Option<Vec<f64>> {
        let w0 = *self.weights.first()?;
        if self.weights.iter().all(|w| (w - w0).abs() <= rel_tol * w0) {
            Some(self.values.iter().map(|v| w0 * v).collect())
        } else {
            None
        }
    }
}

pub fn rosenthal_potential(cfg: &NetworkConfig, model: &EfficiencyModel, indexing: GammaIndexing) -> Result<PotentialTable> {
    let units = UnitUtilities::compute(cfg, model, indexing)?;
    Ok(PotentialTable::from_units(&units, cfg.weights()))
}

/// Profiles maximizing the Rosenthal potential.
pub fn pure_equilibria_by_potential(
    cfg: &NetworkConfig,
    model: &EfficiencyModel,
    indexing: GammaIndexing,
    tol: f64,
) -> Result<Vec<SensingProfile>> {
    Ok(rosenthal_potential(cfg, model, indexing)?.argmax(tol))
}

/// Profiles from which no single player wants to switch, read off the
/// per-weight utilities: `F` sensing players are stable when no sensing
/// player gains by dropping out and no non-sensing player gains by joining.
pub fn stable_profiles(units: &UnitUtilities, tol: f64) -> Vec<SensingProfile> {
    let k = units.k;
    (0..=k)
        .filter(|&f| {
            let sensing_ok = f == 0 || {
                let here = units.get(SensingAction::Sense, f);
                units.get(SensingAction::NotSense, f - 1) - here <= tol * here.abs().max(1.0)
            };
            let idle_ok = f == k || {
                let here = units.get(SensingAction::NotSense, f);
                units.get(SensingAction::Sense, f + 1) - here <= tol * here.abs().max(1.0)
            };
            sensing_ok && idle_ok
        })
        .map(|f| SensingProfile::new(f, k - f))
        .collect()
}

/// A violated four-cycle: players `i`, `j` moving between `(s_i, s_j)` and
/// `(t_i, t_j)` with the other players fixed as in `base`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleWitness {
    pub players: (usize, usize),
    pub actions_i: (usize, usize),
    pub actions_j: (usize, usize),
    /// Joint action at `(s_i, s_j)`.
    pub base: Vec<String>,
    pub cycle_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialCheck {
    pub passed: bool,
    /// Largest scaled cycle sum seen.
    pub max_cycle: f64,
    pub witness: Option<CycleWitness>,
}

/// Four-cycle test for an exact potential.
///
/// For every pair of players, pair of actions for each and context of the
/// remaining players, the payoff changes around the cycle
/// `(s_i,s_j) -> (t_i,s_j) -> (t_i,t_j) -> (s_i,t_j) -> (s_i,s_j)` must sum to
/// zero. A sum is accepted when `|sum| <= tol * max(1, largest |payoff| in the
/// cycle)`. The first violation found is returned as the witness.
pub fn check_exact_potential(game: &FiniteGame, tol: f64) -> PotentialCheck {
    let k = game.players();
    let mut max_cycle = 0.0f64;
    let mut witness = None;
    for i in 0..k {
        for j in i + 1..k {
            for idx in 0..game.num_joint() {
                let (si, sj) = (game.action_at(idx, i), game.action_at(idx, j));
                for ti in si + 1..game.num_actions(i) {
                    for tj in sj + 1..game.num_actions(j) {
                        let ss = idx;
                        let ts = game.deviate(ss, i, ti);
                        let st = game.deviate(ss, j, tj);
                        let tt = game.deviate(ts, j, tj);
                        let u = |x: usize, p: usize| game.payoff(x, p);
                        let sum = u(ts, i) - u(ss, i) + u(st, i) - u(tt, i) + u(tt, j) - u(ts, j) + u(ss, j)
                            - u(st, j);
                        let scale = [ss, ts, st, tt]
                            .iter()
                            .flat_map(|&x| [u(x, i).abs(), u(x, j).abs()])
                            .fold(1.0f64, f64::max);
                        let scaled = sum.abs() / scale;
                        max_cycle = max_cycle.max(scaled);
                        if scaled > tol && witness.is_none() {
                            witness = Some(CycleWitness {
                                players: (i, j),
                                actions_i: (si, ti),
                                actions_j: (sj, tj),
                                base: game.label_tuple(ss),
                                cycle_sum: sum,
                            });
                        }
                    }
                }
            }
        }
    }
    PotentialCheck { passed: witness.is_none(), max_cycle, witness }
}

/// Potential obtained by moving players from the all-zero anchor to `s` one
/// at a time in `order`, summing each mover's payoff change. The anchor has
/// potential zero.
pub fn path_potential(game: &FiniteGame, order: &[usize]) -> Result<Vec<f64>> {
    let k = game.players();
    let mut seen = vec![false; k];
    if order.len() != k || order.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidInput("order must be a permutation of the players".into()));
    }
    let values = (0..game.num_joint())
        .map(|target| {
            let mut cur = 0usize;
            let mut v = 0.0;
            for &p in order {
                let next = game.deviate(cur, p, game.action_at(target, p));
                v += game.payoff(next, p) - game.payoff(cur, p);
                cur = next;
            }
            v
        })
        .collect();
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedPotentialCheck {
    pub passed: bool,
    pub weights: Vec<f64>,
    /// Four-cycle test on the game with player `i`'s payoffs divided by `w_i`.
    pub normalized: PotentialCheck,
    /// Largest scaled mismatch of `U_i(s) - U_i(t) = w_i (V(s) - V(t))`.
    pub max_deviation_error: f64,
    /// `V` per joint action, anchored at zero on the all-zero joint action.
    /// Present only when the check passes.
    pub potential: Option<Vec<f64>>,
}

/// Weighted-potential test: normalize by `weights`, run the four-cycle test,
/// rebuild `V` by path integration and confirm it on every unilateral
/// deviation.
pub fn check_weighted_potential(game: &FiniteGame, weights: &[f64], tol: f64) -> Result<WeightedPotentialCheck> {
    let inverse: Vec<f64> = weights.iter().map(|w| 1.0 / w).collect();
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidInput("weights must be positive and finite".into()));
    }
    let normalized_game = game.scaled(&inverse)?;
    let normalized = check_exact_potential(&normalized_game, tol);
    let order: Vec<usize> = (0..game.players()).collect();
    let v = path_potential(&normalized_game, &order)?;

    let mut max_err = 0.0f64;
    for s in 0..game.num_joint() {
        for i in 0..game.players() {
            for b in 0..game.num_actions(i) {
                let t = game.deviate(s, i, b);
                if t == s {
                    continue;
                }
                let lhs = game.payoff(s, i) - game.payoff(t, i);
                let rhs = weights[i] * (v[s] - v[t]);
                let scale = game.payoff(s, i).abs().max(game.payoff(t, i).abs()).max(1.0);
                max_err = max_err.max((lhs - rhs).abs() / scale);
            }
        }
    }
    let passed = normalized.passed && max_err <= tol;
    Ok(WeightedPotentialCheck {
        passed,
        weights: weights.to_vec(),
        normalized,
        max_deviation_error: max_err,
        potential: passed.then_some(v),
    })
}
