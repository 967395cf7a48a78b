//! The simultaneous game where each player picks whether to sense and a
//! transmit power at once, on a finite power grid.
//!
//! Sensing here carries no information (powers are chosen simultaneously),
//! only the `(1-α)` rate penalty, so `(S, p)` is always dominated by `(NS, p)`.

use serde::{Deserialize, Serialize};

use crate::efficiency::{solve_beta, EfficiencyModel, DEFAULT_ROOT_TOL};
use crate::error::{Error, Result};
use crate::game::{enumerate_pure_equilibria, max_deviation_gain, FiniteGame};
use crate::hierarchy::SensingAction;
use crate::oneshot::{nash_powers_with_beta, utility_unchecked, NetworkConfig};
use crate::two_player::{build_matrix, classify_equilibria, mixed_equilibrium, Classification, Thresholds};

/// Tolerance for the pure-equilibrium scan of the hybrid tensor.
pub const HYBRID_NE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HybridAction {
    pub sense: SensingAction,
    pub power: f64,
}

/// Geometric power grid between `p_min` and `p_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub size: usize,
    pub p_min: f64,
    pub p_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { size: 101, p_min: 1e-3, p_max: 0.3 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size < 2 {
            return Err(Error::InvalidInput(format!("grid size must be at least 2, got {}", self.size)));
        }
        if !(self.p_min > 0.0 && self.p_min < self.p_max && self.p_max.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "grid bounds need 0 < p_min < p_max, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let ratio = (self.p_max / self.p_min).ln() / (self.size - 1) as f64;
        Ok((0..self.size)
            .map(|k| if k + 1 == self.size { self.p_max } else { self.p_min * (ratio * k as f64).exp() })
            .collect())
    }

    /// Grid with the point nearest (in log scale) to `target` moved onto it,
    /// when `target` lies inside the bounds.
    pub fn points_snapped(&self, target: f64) -> Result<Vec<f64>> {
        let mut pts = self.points()?;
        if target >= self.p_min && target <= self.p_max {
            let k = (0..pts.len())
                .min_by(|&a, &b| (pts[a] / target).ln().abs().total_cmp(&(pts[b] / target).ln().abs()))
                .unwrap();
            pts[k] = target;
        }
        Ok(pts)
    }
}

/// The hybrid game tensor together with its action sets.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridGame {
    pub game: FiniteGame,
    pub alpha: f64,
    /// `grids[i]` are the powers available to player `i`; action `k` is
    /// `(NS, grids[i][k])` and action `g + k` is `(S, grids[i][k])`.
    pub grids: Vec<Vec<f64>>,
}

impl HybridGame {
    pub fn action(&self, player: usize, a: usize) -> HybridAction {
        let g = self.grids[player].len();
        let sense = if a < g { SensingAction::NotSense } else { SensingAction::Sense };
        HybridAction { sense, power: self.grids[player][a % g] }
    }

    pub fn action_index(&self, player: usize, sense: SensingAction, k: usize) -> usize {
        sense.index() * self.grids[player].len() + k
    }
}

fn action_label(sense: SensingAction, p: f64) -> String {
    format!("{}@{:.6e}", sense.label(), p)
}

/// Hybrid payoff `(1 - α 1[S_i]) R_i f(SINR_i) / p_i`.
pub fn hybrid_payoffs(cfg: &NetworkConfig, model: &EfficiencyModel, actions: &[HybridAction]) -> Vec<f64> {
    let p: Vec<f64> = actions.iter().map(|a| a.power).collect();
    actions
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let penalty = if a.sense == SensingAction::Sense { 1.0 - cfg.sensing_cost } else { 1.0 };
            penalty * utility_unchecked(cfg, model, &p, i)
        })
        .collect()
}

/// Builds the two-player hybrid game on `grid`, with each player's Nash
/// power snapped onto that player's grid when it is in range.
pub fn build_hybrid_game(cfg: &NetworkConfig, model: &EfficiencyModel, grid: &GridSpec) -> Result<HybridGame> {
    cfg.validate()?;
    if cfg.k() != 2 {
        return Err(Error::InvalidInput(format!("the hybrid game needs exactly 2 players, got {}", cfg.k())));
    }
    let beta = solve_beta(model, DEFAULT_ROOT_TOL)?.value;
    let nash = nash_powers_with_beta(cfg, beta).ok();
    let mut grids = Vec::with_capacity(2);
    for i in 0..2 {
        let spec = GridSpec { p_max: grid.p_max.min(cfg.max_power[i]), ..*grid };
        grids.push(match &nash {
            Some(p) => spec.points_snapped(p.0[i])?,
            None => spec.points()?,
        });
    }
    let labels = grids
        .iter()
        .map(|g| {
            SensingAction::ALL
                .iter()
                .flat_map(|&s| g.iter().map(move |&p| action_label(s, p)))
                .collect()
        })
        .collect();
    let shape = HybridGame { game: FiniteGame::from_fn(vec![vec!["-".into()]], |_| Ok(vec![0.0]))?, alpha: cfg.sensing_cost, grids };
    let game = FiniteGame::from_fn(labels, |a| {
        let acts = [shape.action(0, a[0]), shape.action(1, a[1])];
        Ok(hybrid_payoffs(cfg, model, &acts))
    })?;
    Ok(HybridGame { game, ..shape })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    /// Every `(S, p)` does strictly worse than `(NS, p)` against every opponent action.
    pub strict: bool,
    /// Set when `α = 0`: the twins tie everywhere.
    pub weak_only: bool,
    pub min_margin: f64,
    /// Largest `|margin - α u(NS, p)|` over the tensor.
    pub max_identity_error: f64,
    pub comparisons: usize,
}

/// Compares every sensing action with its same-power non-sensing twin.
pub fn dominance_check(hg: &HybridGame) -> DominanceReport {
    let g = &hg.game;
    let mut min_margin = f64::INFINITY;
    let mut max_identity_error = 0.0f64;
    let mut comparisons = 0;
    let mut strict = true;
    for idx in 0..g.num_joint() {
        for i in 0..2 {
            let a = g.action_at(idx, i);
            let n = hg.grids[i].len();
            if a < n {
                continue;
            }
            let twin = g.deviate(idx, i, a - n);
            let u_ns = g.payoff(twin, i);
            let margin = u_ns - g.payoff(idx, i);
            comparisons += 1;
            min_margin = min_margin.min(margin);
            max_identity_error = max_identity_error.max((margin - hg.alpha * u_ns).abs());
            strict &= margin > 0.0;
        }
    }
    let weak_only = hg.alpha == 0.0;
    DominanceReport { strict: strict && !weak_only, weak_only, min_margin, max_identity_error, comparisons }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridEquilibrium {
    pub joint: usize,
    pub actions: [HybridAction; 2],
    pub utilities: [f64; 2],
    /// Smallest loss any single deviation would cause (positive means strict).
    pub min_deviation_loss: f64,
}

/// Pure equilibria of the hybrid tensor by exhaustive deviation check.
pub fn hybrid_equilibria(hg: &HybridGame) -> Result<Vec<HybridEquilibrium>> {
    let g = &hg.game;
    enumerate_pure_equilibria(g, HYBRID_NE_TOL)?
        .into_iter()
        .map(|idx| Ok(describe(hg, idx)))
        .collect()
}

fn describe(hg: &HybridGame, idx: usize) -> HybridEquilibrium {
    let g = &hg.game;
    let loss = (0..2)
        .map(|i| {
            let here = g.payoff(idx, i);
            (0..g.num_actions(i))
                .filter(|&b| b != g.action_at(idx, i))
                .map(|b| here - g.payoff(g.deviate(idx, i, b), i))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    HybridEquilibrium {
        joint: idx,
        actions: [hg.action(0, g.action_at(idx, 0)), hg.action(1, g.action_at(idx, 1))],
        utilities: [g.payoff(idx, 0), g.payoff(idx, 1)],
        min_deviation_loss: loss,
    }
}

/// Equilibria after first deleting every sensing action, as joint indices
/// of the full game.
pub fn equilibria_after_elimination(hg: &HybridGame) -> Result<Vec<usize>> {
    let keep: Vec<Vec<usize>> = hg.grids.iter().map(|g| (0..g.len()).collect()).collect();
    let sub = hg.game.restrict(&keep)?;
    let mut out: Vec<usize> = enumerate_pure_equilibria(&sub, HYBRID_NE_TOL)?
        .into_iter()
        .map(|s| hg.game.index_of(&sub.actions_of(s)))
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Best gain a player obtains by any unilateral change at a profile.
pub fn best_deviation_gain(hg: &HybridGame, idx: usize, player: usize) -> f64 {
    max_deviation_gain(&hg.game, idx, player)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ParetoDominates,
    Coincide,
    Dominated,
    Incomparable,
}

/// Compares `u` with the reference `base`, ties within `tol` relative.
pub fn compare(u: [f64; 2], base: [f64; 2], tol: f64) -> Verdict {
    let cmp: Vec<i8> = u
        .iter()
        .zip(&base)
        .map(|(a, b)| {
            let band = tol * a.abs().max(b.abs()).max(1.0);
            if (a - b).abs() <= band {
                0
            } else if a > b {
                1
            } else {
                -1
            }
        })
        .collect();
    match (cmp.iter().any(|&c| c > 0), cmp.iter().any(|&c| c < 0)) {
        (false, false) => Verdict::Coincide,
        (true, false) => Verdict::ParetoDominates,
        (false, true) => Verdict::Dominated,
        (true, true) => Verdict::Incomparable,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoStageOutcome {
    pub name: String,
    pub utilities: [f64; 2],
    /// Against the reference hybrid equilibrium.
    pub verdict: Verdict,
    pub dominates_all_hybrid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub size: usize,
    pub p_min: f64,
    pub p_max: f64,
    /// Ratio between consecutive grid points before snapping.
    pub ratio: f64,
    pub nash_powers: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParadoxReport {
    pub alpha: f64,
    pub classification: Classification,
    pub thresholds: Option<Thresholds>,
    pub grid: GridSummary,
    pub dominance: DominanceReport,
    /// The equilibrium at the snapped Nash powers, or the first one found.
    pub reference: HybridEquilibrium,
    /// All grid equilibria with their deviation margins. On a grid holding
    /// the Nash power, the pair one step above it can also survive.
    pub hybrid_equilibria: Vec<HybridEquilibrium>,
    pub hybrid_unique: bool,
    pub elimination_agrees: bool,
    pub two_stage: Vec<TwoStageOutcome>,
    /// True when some two-stage outcome Pareto-dominates the hybrid equilibrium.
    pub paradox: bool,
}

/// Hybrid equilibrium against the outcomes of sensing first and choosing
/// powers afterwards.
pub fn paradox_report(cfg: &NetworkConfig, model: &EfficiencyModel, alpha: f64, grid: &GridSpec) -> Result<ParadoxReport> {
    let cfg = cfg.clone().with_sensing_cost(alpha)?;
    let hg = build_hybrid_game(&cfg, model, grid)?;
    let dominance = dominance_check(&hg);
    let hybrid = hybrid_equilibria(&hg)?;
    let mut joints: Vec<usize> = hybrid.iter().map(|e| e.joint).collect();
    joints.sort_unstable();
    let elimination_agrees = equilibria_after_elimination(&hg)? == joints;
    let beta = solve_beta(model, DEFAULT_ROOT_TOL)?.value;
    let nash = nash_powers_with_beta(&cfg, beta).ok().map(|p| [p.0[0], p.0[1]]);
    let reference = hybrid
        .iter()
        .find(|e| nash.is_some_and(|p| e.actions[0].power == p[0] && e.actions[1].power == p[1]))
        .or(hybrid.first())
        .cloned()
        .ok_or_else(|| Error::NoInteriorSolution("the hybrid grid game has no pure equilibrium".into()))?;
    let base = reference.utilities;

    let matrix = build_matrix(&cfg, model, alpha)?;
    let eq = classify_equilibria(&matrix);
    let mut two_stage = Vec::new();
    let mut push = |name: String, u: [f64; 2]| {
        let dominates_all_hybrid = hybrid.iter().all(|e| compare(u, e.utilities, 1e-9) == Verdict::ParetoDominates);
        two_stage.push(TwoStageOutcome { name, utilities: u, verdict: compare(u, base, 1e-9), dominates_all_hybrid });
    };
    for pe in &eq.pure {
        push(format!("({},{})", pe.actions[0].label(), pe.actions[1].label()), pe.utilities);
    }
    if eq.classification == Classification::Three {
        let u = |r: usize, c: usize| [matrix.payoffs[0][r][c], matrix.payoffs[1][r][c]];
        let (sn, ns) = (u(1, 0), u(0, 1));
        push("lambda=0.5".into(), [0.5 * (sn[0] + ns[0]), 0.5 * (sn[1] + ns[1])]);
        if let Ok(mp) = mixed_equilibrium(&matrix) {
            push("mixed".into(), mp.values);
        }
    }
    let paradox = two_stage.iter().any(|o| o.verdict == Verdict::ParetoDominates);
    Ok(ParadoxReport {
        alpha,
        classification: eq.classification,
        thresholds: eq.thresholds,
        grid: GridSummary {
            size: grid.size,
            p_min: grid.p_min,
            p_max: grid.p_max,
            ratio: (grid.p_max / grid.p_min).powf(1.0 / (grid.size - 1) as f64),
            nash_powers: nash,
        },
        dominance,
        hybrid_unique: hybrid.len() == 1,
        reference,
        hybrid_equilibria: hybrid,
        elimination_agrees,
        two_stage,
        paradox,
    })
}
