//! Two-tier (leader/follower) power control and the sensing-profile
//! utilities `U^S(F, L)` and `U^NS(F, L)` of the `K`-player sensing game.

use serde::{Deserialize, Serialize};

use crate::efficiency::{
    solve_beta, solve_gamma_l_with_beta, solve_gamma_with_beta, EfficiencyModel, DEFAULT_ROOT_TOL,
};
use crate::error::{Error, Result};
use crate::oneshot::NetworkConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Leader,
    Follower,
}

/// Leader and follower operating points of one player.
///
/// Only the follower pays the sensing cost: `follower_utility` carries the
/// `(1 - α)` factor and `leader_utility` does not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StackelbergOutcome {
    pub player: usize,
    pub leader_power: f64,
    pub follower_power: f64,
    pub leader_utility: f64,
    pub follower_utility: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl StackelbergOutcome {
    pub fn power(&self, role: Role) -> f64 {
        match role {
            Role::Leader => self.leader_power,
            Role::Follower => self.follower_power,
        }
    }

    pub fn utility(&self, role: Role) -> f64 {
        match role {
            Role::Leader => self.leader_utility,
            Role::Follower => self.follower_utility,
        }
    }
}

/// Closed-form leader/follower powers and utilities of player `i`.
pub fn stackelberg_outcome(cfg: &NetworkConfig, model: &EfficiencyModel, i: usize) -> Result<StackelbergOutcome> {
    let beta = solve_beta(model, DEFAULT_ROOT_TOL)?.value;
    let gamma = solve_gamma_with_beta(model, cfg.k(), beta, DEFAULT_ROOT_TOL)?.value;
    stackelberg_from_roots(cfg, model, i, beta, gamma)
}

/// Same closed forms with explicit `β*` and `γ*`.
///
/// Setting `gamma = beta` collapses both roles onto the one-shot Nash point.
pub fn stackelberg_from_roots(
    cfg: &NetworkConfig,
    model: &EfficiencyModel,
    i: usize,
    beta: f64,
    gamma: f64,
) -> Result<StackelbergOutcome> {
    cfg.validate()?;
    if i >= cfg.k() {
        return Err(Error::IndexOutOfRange { index: i, players: cfg.k() });
    }
    let k = cfg.k() as f64;
    let common = 1.0 - (k - 1.0) * gamma * beta - (k - 2.0) * beta;
    if !(common > 0.0) {
        return Err(Error::Infeasible(format!(
            "1 - (K-1)γ*β* - (K-2)β* = {common:e} must be positive (K = {}, β* = {beta:e}, γ* = {gamma:e})",
            cfg.k()
        )));
    }
    let scale = cfg.noise / cfg.gains[i];
    let w = cfg.weight(i);
    Ok(StackelbergOutcome {
        player: i,
        leader_power: scale * gamma * (1.0 + beta) / common,
        follower_power: scale * beta * (1.0 + gamma) / common,
        leader_utility: w * common / (gamma * (1.0 + beta)) * model.value(gamma),
        follower_utility: (1.0 - cfg.sensing_cost) * w * common / (beta * (1.0 + gamma)) * model.value(beta),
        beta,
        gamma,
    })
}

/// Action in the sensing game. The declaration order (NS before S) is the
/// action index order used by every finite game in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SensingAction {
    #[serde(rename = "NS")]
    NotSense,
    #[serde(rename = "S")]
    Sense,
}

impl SensingAction {
    pub const ALL: [SensingAction; 2] = [SensingAction::NotSense, SensingAction::Sense];

    pub fn label(self) -> &'static str {
        match self {
            SensingAction::NotSense => "NS",
            SensingAction::Sense => "S",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(idx: usize) -> Option<Self> {
        Self::ALL.get(idx).copied()
    }
}

/// Counts of sensing (`F`) and non-sensing (`L`) players among the `K`
/// usual players, the deciding player included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SensingProfile {
    pub sensing: usize,
    pub non_sensing: usize,
}

impl SensingProfile {
    pub fn new(sensing: usize, non_sensing: usize) -> Self {
        SensingProfile { sensing, non_sensing }
    }

    pub fn k(&self) -> usize {
        self.sensing + self.non_sensing
    }
}

/// Which `γ*` index enters `U^NS`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaIndexing {
    /// `f(γ*_L)` in front, `γ*_{L+1}` in the denominator and bracket.
    #[default]
    Verbatim,
    /// `γ*_L` everywhere in `U^NS`.
    Consistent,
}

/// `β*` and `γ*_L` for `L = 1..=K+1`, the roots the sensing game needs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensingRoots {
    pub k: usize,
    pub processing_gain: f64,
    pub beta: f64,
    /// `epsilons[l]`, `gammas[l]` for `l in 1..=K+1`; index 0 is unused.
    pub epsilons: Vec<f64>,
    pub gammas: Vec<f64>,
}

impl SensingRoots {
    pub fn solve(model: &EfficiencyModel, k: usize, n: f64, tol: f64) -> Result<Self> {
        let beta = solve_beta(model, tol)?.value;
        let mut epsilons = vec![f64::NAN; k + 2];
        let mut gammas = vec![f64::NAN; k + 2];
        for l in 1..=k + 1 {
            let pr = solve_gamma_l_with_beta(model, k, n, l, beta, tol)?;
            epsilons[l] = pr.epsilon;
            gammas[l] = pr.root.value;
        }
        Ok(SensingRoots { k, processing_gain: n, beta, epsilons, gammas })
    }

    /// `U_i^a(F, L) / w_i`, the per-weight utility shared by all players.
    pub fn unit_utility(
        &self,
        model: &EfficiencyModel,
        profile: SensingProfile,
        action: SensingAction,
        indexing: GammaIndexing,
    ) -> Result<f64> {
        check_profile(self.k, profile, action)?;
        let l = profile.non_sensing;
        unit_formula(
            model,
            self.processing_gain,
            self.beta,
            self.gammas[l.max(1)],
            self.gammas[l + 1],
            profile,
            action,
            indexing,
        )
    }
}

fn check_profile(k: usize, profile: SensingProfile, action: SensingAction) -> Result<()> {
    if profile.k() != k {
        return Err(Error::InvalidInput(format!(
            "profile (F = {}, L = {}) does not sum to K = {k}",
            profile.sensing, profile.non_sensing
        )));
    }
    let own_count = match action {
        SensingAction::Sense => profile.sensing,
        SensingAction::NotSense => profile.non_sensing,
    };
    if own_count == 0 {
        return Err(Error::InvalidInput(format!(
            "profile (F = {}, L = {}) has no slot for a player choosing {}",
            profile.sensing,
            profile.non_sensing,
            action.label()
        )));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn unit_formula(
    model: &EfficiencyModel,
    n: f64,
    beta: f64,
    gamma_l: f64,
    gamma_next: f64,
    profile: SensingProfile,
    action: SensingAction,
    indexing: GammaIndexing,
) -> Result<f64> {
    let f_count = profile.sensing as f64;
    let l_count = profile.non_sensing as f64;
    let bracket_gamma = match (action, indexing) {
        (SensingAction::NotSense, GammaIndexing::Consistent) => gamma_l,
        _ => gamma_next,
    };
    let bracket = n * n - n * beta - ((n + beta) * l_count + (f_count + 1.0) * beta) * bracket_gamma;
    if !(bracket > 0.0) {
        return Err(Error::InfeasibleProfile(format!(
            "N² - Nβ* - [(N+β*)L + (F+1)β*]γ* = {bracket:e} must be positive (F = {}, L = {}, N = {n})",
            profile.sensing, profile.non_sensing
        )));
    }
    let value = match action {
        SensingAction::Sense => model.value(beta) / (n * beta * (n + gamma_next)) * bracket,
        SensingAction::NotSense => model.value(gamma_l) / (n * bracket_gamma * (n + beta)) * bracket,
    };
    Ok(value)
}

/// `U_i^S(F, L)` or `U_i^NS(F, L)` in bit/J.
pub fn sensing_utilities(
    cfg: &NetworkConfig,
    model: &EfficiencyModel,
    profile: SensingProfile,
    i: usize,
    action: SensingAction,
    indexing: GammaIndexing,
) -> Result<f64> {
    cfg.validate()?;
    if i >= cfg.k() {
        return Err(Error::IndexOutOfRange { index: i, players: cfg.k() });
    }
    let k = cfg.k();
    check_profile(k, profile, action)?;
    let n = cfg.processing_gain;
    let beta = solve_beta(model, DEFAULT_ROOT_TOL)?.value;
    let l = profile.non_sensing;
    let gamma_next = solve_gamma_l_with_beta(model, k, n, l + 1, beta, DEFAULT_ROOT_TOL)?.root.value;
    let gamma_l = if action == SensingAction::NotSense {
        solve_gamma_l_with_beta(model, k, n, l, beta, DEFAULT_ROOT_TOL)?.root.value
    } else {
        gamma_next
    };
    let unit = unit_formula(model, n, beta, gamma_l, gamma_next, profile, action, indexing)?;
    Ok(cfg.weight(i) * unit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> (NetworkConfig, EfficiencyModel) {
        (
            NetworkConfig::symmetric(2, 1.0, 1.0, 0.1, 1.0).unwrap(),
            EfficiencyModel::exp_ratio(0.5).unwrap(),
        )
    }

    #[test]
    fn stackelberg_reference_values() {
        let (cfg, model) = reference();
        let out = stackelberg_outcome(&cfg, &model, 0).unwrap();
        assert!((out.leader_power - 0.075).abs() < 1e-12);
        assert!((out.follower_power - 0.0875).abs() < 1e-12);
        let ul = 10.0 * (0.8 / 0.6) * (-1.25f64).exp();
        let uf = 10.0 * (0.8 / 0.7) * (-1.0f64).exp();
        assert!((out.leader_utility - ul).abs() < 1e-10);
        assert!((out.follower_utility - uf).abs() < 1e-10);
        assert!((out.leader_utility - 3.8201).abs() < 1e-4);
        assert!((out.follower_utility - 4.2043).abs() < 1e-4);

        let costly = cfg.clone().with_sensing_cost(0.05).unwrap();
        let out2 = stackelberg_outcome(&costly, &model, 0).unwrap();
        assert!((out2.follower_utility - 0.95 * uf).abs() < 1e-10);
        assert_eq!(out2.leader_utility, out.leader_utility);
    }

    #[test]
    fn costless_sensing_improves_on_nash() {
        let (cfg, model) = reference();
        let out = stackelberg_outcome(&cfg, &model, 1).unwrap();
        let nash = 10.0 * (-1.0f64).exp();
        assert!(out.follower_utility >= nash);
        assert!(out.leader_utility >= nash);
    }

    #[test]
    fn roles_reach_the_targets_they_claim() {
        // leader at γ*, follower at β* when they face each other
        let (cfg, model) = reference();
        let out = stackelberg_outcome(&cfg, &model, 0).unwrap();
        let sinr_l = out.leader_power / (out.follower_power + 0.1);
        let sinr_f = out.follower_power / (out.leader_power + 0.1);
        assert!((sinr_l - out.gamma).abs() < 1e-12);
        assert!((sinr_f - out.beta).abs() < 1e-12);
    }

    #[test]
    fn gamma_equal_beta_collapses_to_nash() {
        let (cfg, model) = reference();
        let out = stackelberg_from_roots(&cfg, &model, 0, 0.5, 0.5).unwrap();
        assert!((out.leader_power - 0.1).abs() < 1e-12);
        assert!((out.follower_power - 0.1).abs() < 1e-12);
        let nash = 10.0 * (-1.0f64).exp();
        assert!((out.leader_utility - nash).abs() < 1e-12);
        let near = stackelberg_from_roots(&cfg, &model, 0, 0.5, 0.5 - 1e-7).unwrap();
        assert!((near.leader_utility - nash).abs() < 1e-5);
    }

    #[test]
    fn stackelberg_infeasible_numerator() {
        let cfg = NetworkConfig::symmetric(3, 1.0, 1.0, 0.1, 1.0).unwrap();
        let model = EfficiencyModel::exp_ratio(0.5).unwrap();
        assert!(stackelberg_from_roots(&cfg, &model, 0, 0.5, 0.9).is_err());
    }

    #[test]
    fn ratio_of_roles_ignores_channel_scale() {
        let model = EfficiencyModel::exp_ratio(0.3).unwrap();
        let a = NetworkConfig::symmetric(2, 1.0, 1.0, 0.1, 1.0).unwrap();
        let b = NetworkConfig::new(vec![3.0, 1.0], vec![7.0, 1.0], 0.4, vec![1.0; 2]).unwrap();
        let oa = stackelberg_outcome(&a, &model, 0).unwrap();
        let ob = stackelberg_outcome(&b, &model, 0).unwrap();
        let ra = oa.follower_utility / oa.leader_utility;
        let rb = ob.follower_utility / ob.leader_utility;
        assert!((ra - rb).abs() < 1e-12);
    }

    #[test]
    fn sensing_utilities_scale_with_weight() {
        let model = EfficiencyModel::exp_ratio(0.5).unwrap();
        let cfg = NetworkConfig::new(vec![1.0, 2.5], vec![3.0, 1.0], 0.1, vec![1.0; 2])
            .unwrap()
            .with_processing_gain(10.0)
            .unwrap();
        let p = SensingProfile::new(1, 1);
        for action in SensingAction::ALL {
            let u0 = sensing_utilities(&cfg, &model, p, 0, action, GammaIndexing::Verbatim).unwrap();
            let u1 = sensing_utilities(&cfg, &model, p, 1, action, GammaIndexing::Verbatim).unwrap();
            assert!(u0 > 0.0 && u0.is_finite());
            assert!((u0 / u1 - 3.0 / 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sensing_utilities_reference_profile() {
        // K = 2, N = 10: γ*_1, γ*_2 from x = a / (1 + ε_L a)
        let model = EfficiencyModel::exp_ratio(0.5).unwrap();
        let cfg = NetworkConfig::symmetric(2, 1.0, 1.0, 0.1, 1.0).unwrap().with_processing_gain(10.0).unwrap();
        let eps = |l: f64| (4.0 - l) * 0.5 / (100.0 - 10.0 * (3.0 - l) * 0.5);
        let g = |l: f64| 0.5 / (1.0 + eps(l) * 0.5);
        let (g1, g2) = (g(1.0), g(2.0));
        let bracket = 100.0 - 5.0 - (10.5 * 1.0 + 2.0 * 0.5) * g2;
        let us = 10.0 * (-1.0f64).exp() / (10.0 * 0.5 * (10.0 + g2)) * bracket;
        let uns = 10.0 * (-0.5 / g1).exp() / (10.0 * g2 * 10.5) * bracket;
        let p = SensingProfile::new(1, 1);
        let got_s = sensing_utilities(&cfg, &model, p, 0, SensingAction::Sense, GammaIndexing::Verbatim).unwrap();
        let got_ns = sensing_utilities(&cfg, &model, p, 0, SensingAction::NotSense, GammaIndexing::Verbatim).unwrap();
        assert!((got_s - us).abs() < 1e-10 * us);
        assert!((got_ns - uns).abs() < 1e-10 * uns);

        let consistent =
            sensing_utilities(&cfg, &model, p, 0, SensingAction::NotSense, GammaIndexing::Consistent).unwrap();
        let bracket1 = 100.0 - 5.0 - (10.5 + 1.0) * g1;
        let want = 10.0 * (-0.5 / g1).exp() / (10.0 * g1 * 10.5) * bracket1;
        assert!((consistent - want).abs() < 1e-10 * want);
    }

    #[test]
    fn small_processing_gain_is_infeasible() {
        let (cfg, model) = reference();
        for action in SensingAction::ALL {
            let err = sensing_utilities(&cfg, &model, SensingProfile::new(1, 1), 0, action, GammaIndexing::Verbatim)
                .unwrap_err();
            assert!(matches!(err, Error::InfeasibleProfile(_)), "{err:?}");
        }
    }

    #[test]
    fn negative_bracket_is_an_error_not_a_negative_utility() {
        // ε_L stays feasible while the bracket goes negative
        let model = EfficiencyModel::exp_ratio(0.9).unwrap();
        let roots = SensingRoots::solve(&model, 6, 5.5, DEFAULT_ROOT_TOL).unwrap();
        let err = roots
            .unit_utility(&model, SensingProfile::new(0, 6), SensingAction::NotSense, GammaIndexing::Verbatim)
            .unwrap_err();
        assert!(matches!(err, Error::InfeasibleProfile(_)), "{err:?}");
    }

    #[test]
    fn profile_must_leave_room_for_the_player() {
        let model = EfficiencyModel::exp_ratio(0.5).unwrap();
        let roots = SensingRoots::solve(&model, 2, 10.0, DEFAULT_ROOT_TOL).unwrap();
        assert!(roots
            .unit_utility(&model, SensingProfile::new(0, 2), SensingAction::Sense, GammaIndexing::Verbatim)
            .is_err());
        assert!(roots
            .unit_utility(&model, SensingProfile::new(1, 2), SensingAction::Sense, GammaIndexing::Verbatim)
            .is_err());
    }
}
