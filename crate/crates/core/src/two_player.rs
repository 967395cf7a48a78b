//! The two-player sensing matrix game.
//!
//! Rows are player 1's actions and columns player 2's, both ordered
//! `[NS, S]`. Each player's payoff is `w_i = R_i h_i / σ²` times one of four
//! per-weight values:
//!
//! | own \ other | NS                         | S                          |
//! |-------------|----------------------------|----------------------------|
//! | NS          | Nash `f(β)(1-β)/β`         | leader `f(γ)(1-γβ)/(γ(1+β))` |
//! | S           | follower `(1-α)f(β)(1-γβ)/(β(1+γ))` | `(1-α)` Nash      |

use serde::Serialize;

use crate::efficiency::{solve_beta, solve_gamma_with_beta, EfficiencyModel, DEFAULT_ROOT_TOL};
use crate::error::{Error, Result};
use crate::game::FiniteGame;
use crate::hierarchy::SensingAction;
use crate::oneshot::NetworkConfig;

/// Relative band used to decide payoff ties.
pub const TIE_BAND: f64 = 1e-9;

/// `β*`, `γ*` and the efficiency values at them, for `K = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPlayerRoots {
    pub beta: f64,
    pub gamma: f64,
    pub f_beta: f64,
    pub f_gamma: f64,
}

impl TwoPlayerRoots {
    pub fn solve(model: &EfficiencyModel) -> Result<Self> {
        let beta = solve_beta(model, DEFAULT_ROOT_TOL)?.value;
        let gamma = solve_gamma_with_beta(model, 2, beta, DEFAULT_ROOT_TOL)?.value;
        Ok(TwoPlayerRoots { beta, gamma, f_beta: model.value(beta), f_gamma: model.value(gamma) })
    }

    /// `f(β)(1-β)/β`
    pub fn nash(&self) -> f64 {
        self.f_beta * (1.0 - self.beta) / self.beta
    }

    /// `f(γ)(1-γβ)/(γ(1+β))`
    pub fn leader(&self) -> f64 {
        self.f_gamma * (1.0 - self.gamma * self.beta) / (self.gamma * (1.0 + self.beta))
    }

    /// `f(β)(1-γβ)/(β(1+γ))`, before the `(1-α)` sensing factor.
    pub fn follower_gross(&self) -> f64 {
        self.f_beta * (1.0 - self.gamma * self.beta) / (self.beta * (1.0 + self.gamma))
    }

    /// `(β* - γ*) / (1 - β*γ*)`
    pub fn three_equilibria_threshold(&self) -> f64 {
        (self.beta - self.gamma) / (1.0 - self.beta * self.gamma)
    }

    /// `[f(β) - f(γ) + f(β)/β - f(γ)/γ] / [f(β)(1+β)/β]`
    pub fn follow_vs_lead_threshold(&self) -> f64 {
        let (b, g, fb, fg) = (self.beta, self.gamma, self.f_beta, self.f_gamma);
        (fb - fg + fb / b - fg / g) / (fb * (1.0 + b) / b)
    }
}

/// Payoffs of the two-player sensing game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensingMatrix2x2 {
    /// `payoffs[player][row][col]`, index 0 = NS, 1 = S.
    pub payoffs: [[[f64; 2]; 2]; 2],
    pub weights: [f64; 2],
    pub alpha: f64,
    pub roots: Option<TwoPlayerRoots>,
}

impl SensingMatrix2x2 {
    /// Matrix from explicit payoffs, without the sensing-game parameters.
    pub fn from_payoffs(payoffs: [[[f64; 2]; 2]; 2]) -> Self {
        SensingMatrix2x2 { payoffs, weights: [1.0, 1.0], alpha: f64::NAN, roots: None }
    }

    pub fn payoff(&self, player: usize, row: SensingAction, col: SensingAction) -> f64 {
        self.payoffs[player][row.index()][col.index()]
    }

    /// Both players' payoffs multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = *self;
        for p in out.payoffs.iter_mut().flatten().flatten() {
            *p *= c;
        }
        out.weights = [self.weights[0] * c, self.weights[1] * c];
        out
    }

    pub fn to_game(&self) -> Result<FiniteGame> {
        let labels = || SensingAction::ALL.iter().map(|a| a.label().to_string()).collect::<Vec<_>>();
        FiniteGame::from_fn(vec![labels(), labels()], |a| {
            Ok(vec![self.payoffs[0][a[0]][a[1]], self.payoffs[1][a[0]][a[1]]])
        })
    }
}

/// Matrix of the sensing game for a two-player network at sensing cost `alpha`.
pub fn build_matrix(cfg: &NetworkConfig, model: &EfficiencyModel, alpha: f64) -> Result<SensingMatrix2x2> {
    cfg.validate()?;
    if cfg.k() != 2 {
        return Err(Error::InvalidInput(format!("the matrix game needs exactly 2 players, got {}", cfg.k())));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidInput(format!("alpha must lie in [0, 1), got {alpha}")));
    }
    let roots = TwoPlayerRoots::solve(model)?;
    if !(1.0 - roots.gamma * roots.beta > 0.0 && roots.beta < 1.0) {
        return Err(Error::Infeasible(format!(
            "two-player closed forms need β* < 1 and γ*β* < 1 (β* = {:e}, γ* = {:e})",
            roots.beta, roots.gamma
        )));
    }
    Ok(matrix_from_roots(cfg.weights().try_into().unwrap(), alpha, roots))
}

pub fn matrix_from_roots(weights: [f64; 2], alpha: f64, roots: TwoPlayerRoots) -> SensingMatrix2x2 {
    let nash = roots.nash();
    let lead = roots.leader();
    let follow = (1.0 - alpha) * roots.follower_gross();
    let both = (1.0 - alpha) * nash;
    // own action first, other player's second
    let unit = [[nash, lead], [follow, both]];
    let mut payoffs = [[[0.0; 2]; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            payoffs[0][r][c] = weights[0] * unit[r][c];
            payoffs[1][r][c] = weights[1] * unit[c][r];
        }
    }
    SensingMatrix2x2 { payoffs, weights, alpha, roots: Some(roots) }
}

/// Sensing cost below which the matrix game has three equilibria.
pub fn alpha_threshold_three_eq(model: &EfficiencyModel) -> Result<f64> {
    Ok(TwoPlayerRoots::solve(model)?.three_equilibria_threshold())
}

/// Sensing cost below which following pays more than leading.
pub fn alpha_threshold_follow_vs_lead(model: &EfficiencyModel) -> Result<f64> {
    Ok(TwoPlayerRoots::solve(model)?.follow_vs_lead_threshold())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    /// Two pure equilibria and one completely mixed equilibrium.
    Three,
    /// A single equilibrium.
    Unique,
    /// Some equilibrium player is indifferent, giving a continuum.
    Continuum,
}

/// Mixed profile of the matrix game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedProfile {
    /// Probability that each player plays NS (the weight on the NS row or
    /// column in the indifference equations).
    pub not_sense: [f64; 2],
    /// `1 - not_sense`.
    pub sense: [f64; 2],
    /// Expected payoff of each player.
    pub values: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureEquilibrium {
    pub actions: [SensingAction; 2],
    pub utilities: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixEntry {
    pub actions: [SensingAction; 2],
    pub utilities: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub three_equilibria: f64,
    pub follow_vs_lead: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub classification: Classification,
    pub alpha: Option<f64>,
    pub thresholds: Option<Thresholds>,
    pub entries: Vec<MatrixEntry>,
    pub pure: Vec<PureEquilibrium>,
    pub mixed: Option<MixedProfile>,
    /// Disagreements between the payoff-level analysis and the threshold
    /// prediction. Empty when they agree.
    pub findings: Vec<String>,
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_BAND * a.abs().max(b.abs())
}

/// Exhaustive equilibrium analysis of a 2x2 matrix.
pub fn classify_equilibria(m: &SensingMatrix2x2) -> EquilibriumReport {
    let u = &m.payoffs;
    let mut pure = Vec::new();
    let mut continuum = false;
    for r in 0..2 {
        for c in 0..2 {
            let (here1, alt1) = (u[0][r][c], u[0][1 - r][c]);
            let (here2, alt2) = (u[1][r][c], u[1][r][1 - c]);
            let ok1 = here1 >= alt1 || tied(here1, alt1);
            let ok2 = here2 >= alt2 || tied(here2, alt2);
            if ok1 && ok2 {
                continuum |= tied(here1, alt1) || tied(here2, alt2);
                pure.push(PureEquilibrium {
                    actions: [SensingAction::ALL[r], SensingAction::ALL[c]],
                    utilities: [here1, here2],
                });
            }
        }
    }
    let mixed = if continuum { None } else { mixed_equilibrium(m).ok() };
    let classification = if continuum {
        Classification::Continuum
    } else {
        match pure.len() + mixed.is_some() as usize {
            3 => Classification::Three,
            1 => Classification::Unique,
            _ => Classification::Continuum,
        }
    };

    let thresholds = m.roots.map(|r| Thresholds {
        three_equilibria: r.three_equilibria_threshold(),
        follow_vs_lead: r.follow_vs_lead_threshold(),
    });
    let mut findings = Vec::new();
    if let (Some(t), false) = (thresholds, m.alpha.is_nan()) {
        let predicted = if (m.alpha - t.three_equilibria).abs() <= TIE_BAND {
            Classification::Continuum
        } else if m.alpha < t.three_equilibria {
            Classification::Three
        } else {
            Classification::Unique
        };
        if predicted != classification {
            findings.push(format!(
                "alpha = {:e} against threshold {:e} predicts {:?}, payoff analysis gives {:?}",
                m.alpha, t.three_equilibria, predicted, classification
            ));
        }
    }

    let entries = (0..4)
        .map(|n| {
            let (r, c) = (n / 2, n % 2);
            MatrixEntry { actions: [SensingAction::ALL[r], SensingAction::ALL[c]], utilities: [u[0][r][c], u[1][r][c]] }
        })
        .collect();
    EquilibriumReport {
        classification,
        alpha: (!m.alpha.is_nan()).then_some(m.alpha),
        thresholds,
        entries,
        pure,
        mixed,
        findings,
    }
}

/// Completely mixed equilibrium from the two indifference conditions.
///
/// Player 2's NS probability `y` makes player 1 indifferent:
/// `u1(NS,NS) y + u1(NS,S) (1-y) = u1(S,NS) y + u1(S,S) (1-y)`, and
/// symmetrically for player 1's `x`.
pub fn mixed_equilibrium(m: &SensingMatrix2x2) -> Result<MixedProfile> {
    let u = &m.payoffs;
    let solve = |nn: f64, ns: f64, sn: f64, ss: f64| -> Result<f64> {
        let denom = nn - ns - sn + ss;
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::NoInteriorSolution("indifference equation is degenerate".into()));
        }
        let q = (ss - ns) / denom;
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::NoInteriorSolution(format!("indifference probability {q} outside (0, 1)")));
        }
        Ok(q)
    };
    // y: player 2's NS weight, from player 1's payoffs
    let y = solve(u[0][0][0], u[0][0][1], u[0][1][0], u[0][1][1])?;
    // x: player 1's NS weight, from player 2's payoffs (own action is the column)
    let x = solve(u[1][0][0], u[1][1][0], u[1][0][1], u[1][1][1])?;
    let v1 = u[0][0][0] * y + u[0][0][1] * (1.0 - y);
    let v2 = u[1][0][0] * x + u[1][1][0] * (1.0 - x);
    Ok(MixedProfile { not_sense: [x, y], sense: [1.0 - x, 1.0 - y], values: [v1, v2] })
}

/// The closed-form mixed equilibrium `(x*, Δ)`: common NS probability and
/// per-weight value, so that `U_i = w_i Δ`.
pub fn mixed_closed_form(roots: &TwoPlayerRoots, alpha: f64) -> (f64, f64) {
    let nash = roots.f_beta / roots.beta * (1.0 - roots.beta);
    let lead = roots.f_gamma / roots.gamma * (1.0 - roots.gamma * roots.beta) / (1.0 + roots.beta);
    let follow = roots.f_beta / roots.beta * (1.0 - roots.gamma * roots.beta) / (1.0 + roots.gamma);
    let denom = (1.0 - alpha) * nash - lead + nash - (1.0 - alpha) * follow;
    let x = ((1.0 - alpha) * nash - lead) / denom;
    let delta = ((1.0 - alpha) * nash * nash - lead * (1.0 - alpha) * follow) / denom;
    (x, delta)
}
