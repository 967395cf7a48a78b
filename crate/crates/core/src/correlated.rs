//! Canonical correlated equilibria of finite games.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::FiniteGame;
use crate::lp::{LinearProgram, Relation};

/// Tolerance on `ΣQ = 1`.
pub const MASS_TOL: f64 = 1e-12;

/// Incentive slack for one `(player, recommended, deviation)` triple:
/// `Σ Q(a_-i | a_i) [u_i(a_i, a_-i) - u_i(b_i, a_-i)]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncentiveResidual {
    pub player: usize,
    pub recommended: usize,
    pub deviation: usize,
    pub slack: f64,
}

/// Probability mass over the joint actions of a game, in joint-index order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatedDistribution {
    pub q: Vec<f64>,
    /// Filled by [`is_correlated_equilibrium`]; empty otherwise.
    pub residuals: Vec<IncentiveResidual>,
}

impl CorrelatedDistribution {
    pub fn new(game: &FiniteGame, q: Vec<f64>) -> Result<Self> {
        if q.len() != game.num_joint() {
            return Err(Error::InvalidInput(format!(
                "distribution has {} entries, game has {} joint actions",
                q.len(),
                game.num_joint()
            )));
        }
        if let Some(bad) = q.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!("probability {bad} is not a finite non-negative number")));
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}, not 1")));
        }
        Ok(CorrelatedDistribution { q, residuals: Vec::new() })
    }

    pub fn point_mass(game: &FiniteGame, idx: usize) -> Result<Self> {
        if idx >= game.num_joint() {
            return Err(Error::IndexOutOfRange { index: idx, players: game.num_joint() });
        }
        let mut q = vec![0.0; game.num_joint()];
        q[idx] = 1.0;
        Ok(CorrelatedDistribution { q, residuals: Vec::new() })
    }

    /// Product of independent mixed strategies, one probability vector per player.
    pub fn product(game: &FiniteGame, mixed: &[Vec<f64>]) -> Result<Self> {
        if mixed.len() != game.players() || mixed.iter().enumerate().any(|(i, m)| m.len() != game.num_actions(i)) {
            return Err(Error::InvalidInput("one probability per action of every player is required".into()));
        }
        let q = (0..game.num_joint())
            .map(|idx| mixed.iter().enumerate().map(|(i, m)| m[game.action_at(idx, i)]).product())
            .collect();
        CorrelatedDistribution::new(game, q)
    }

    /// Expected payoff of every player.
    pub fn expected_utilities(&self, game: &FiniteGame) -> Vec<f64> {
        (0..game.players())
            .map(|i| self.q.iter().enumerate().map(|(idx, p)| p * game.payoff(idx, i)).sum())
            .collect()
    }
}

/// Checks every incentive constraint with a recommendation of positive
/// probability. Constraints are scaled by `max(1, largest |payoff|)`.
pub fn is_correlated_equilibrium(
    game: &FiniteGame,
    dist: &CorrelatedDistribution,
    tol: f64,
) -> Result<(bool, CorrelatedDistribution)> {
    let checked = CorrelatedDistribution::new(game, dist.q.clone())?;
    let slack_floor = -tol * game.payoff_scale().max(1.0);
    let mut residuals = Vec::new();
    for i in 0..game.players() {
        for a in 0..game.num_actions(i) {
            let mass: Vec<usize> = (0..game.num_joint()).filter(|&idx| game.action_at(idx, i) == a).collect();
            let marginal: f64 = mass.iter().map(|&idx| checked.q[idx]).sum();
            if marginal <= 0.0 {
                continue;
            }
            for b in (0..game.num_actions(i)).filter(|&b| b != a) {
                let slack = mass
                    .iter()
                    .map(|&idx| checked.q[idx] * (game.payoff(idx, i) - game.payoff(game.deviate(idx, i, b), i)))
                    .sum::<f64>()
                    / marginal;
                residuals.push(IncentiveResidual { player: i, recommended: a, deviation: b, slack });
            }
        }
    }
    let ok = residuals.iter().all(|r| r.slack >= slack_floor);
    Ok((ok, CorrelatedDistribution { q: checked.q, residuals }))
}

/// The most violated constraint, if any slack is negative.
pub fn worst_residual(dist: &CorrelatedDistribution) -> Option<&IncentiveResidual> {
    dist.residuals.iter().filter(|r| r.slack < 0.0).min_by(|x, y| x.slack.total_cmp(&y.slack))
}

/// `λ` on `first`, `1-λ` on `second`.
pub fn mixture(game: &FiniteGame, first: usize, second: usize, lambda: f64) -> Result<CorrelatedDistribution> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let mut q = CorrelatedDistribution::point_mass(game, first)?.q;
    q[first] = lambda;
    let other = CorrelatedDistribution::point_mass(game, second)?;
    for (v, o) in q.iter_mut().zip(&other.q) {
        *v += (1.0 - lambda) * o;
    }
    Ok(CorrelatedDistribution { q, residuals: Vec::new() })
}

/// On the two-player sensing game (actions `[NS, S]`): `λ` on `(S, NS)` and
/// `1-λ` on `(NS, S)`.
pub fn lambda_mixture(game: &FiniteGame, lambda: f64) -> Result<CorrelatedDistribution> {
    if game.players() != 2 || game.num_actions(0) != 2 || game.num_actions(1) != 2 {
        return Err(Error::InvalidInput("lambda mixtures are defined on 2x2 games".into()));
    }
    mixture(game, game.index_of(&[1, 0]), game.index_of(&[0, 1]), lambda)
}

/// Unconditional incentive rows `Σ_{a_-i} Q(a_i, a_-i)[u_i(a_i,·) - u_i(b_i,·)]`,
/// one per `(player, a_i, b_i ≠ a_i)`.
pub fn incentive_rows(game: &FiniteGame) -> Vec<Vec<f64>> {
    let mut rows = Vec::new();
    for i in 0..game.players() {
        for a in 0..game.num_actions(i) {
            for b in (0..game.num_actions(i)).filter(|&b| b != a) {
                let row = (0..game.num_joint())
                    .map(|idx| {
                        if game.action_at(idx, i) == a {
                            game.payoff(idx, i) - game.payoff(game.deviate(idx, i, b), i)
                        } else {
                            0.0
                        }
                    })
                    .collect();
                rows.push(row);
            }
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeOptimum {
    pub distribution: CorrelatedDistribution,
    pub value: f64,
}

/// Maximizes `Σ objective(s) Q(s)` over the correlated-equilibrium polytope.
pub fn optimize_over_ce(game: &FiniteGame, objective: &[f64]) -> Result<CeOptimum> {
    if objective.len() != game.num_joint() {
        return Err(Error::InvalidInput(format!(
            "objective has {} entries, game has {} joint actions",
            objective.len(),
            game.num_joint()
        )));
    }
    let mut lp = LinearProgram::new(objective.to_vec());
    for row in incentive_rows(game) {
        lp.push(row, Relation::Ge, 0.0);
    }
    lp.push(vec![1.0; game.num_joint()], Relation::Eq, 1.0);
    let sol = lp.solve().map_err(|e| match e {
        Error::Infeasible(msg) => Error::Lp(format!("correlated-equilibrium polytope reported empty: {msg}")),
        other => other,
    })?;
    let total: f64 = sol.x.iter().sum();
    let q: Vec<f64> = sol.x.iter().map(|v| v / total).collect();
    let value = q.iter().zip(objective).map(|(p, c)| p * c).sum();
    Ok(CeOptimum { distribution: CorrelatedDistribution { q, residuals: Vec::new() }, value })
}

/// Objective vector `Σ_i weights[i] u_i(s)`.
pub fn weighted_objective(game: &FiniteGame, weights: &[f64]) -> Vec<f64> {
    (0..game.num_joint())
        .map(|idx| weights.iter().enumerate().map(|(i, w)| w * game.payoff(idx, i)).sum())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionPoint {
    pub theta: f64,
    pub utilities: [f64; 2],
    pub q: Vec<f64>,
}

/// Support points of the correlated-equilibrium utility region of a
/// two-player game, one per direction `(cos θ, sin θ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CeRegion {
    pub labels: Vec<String>,
    pub points: Vec<RegionPoint>,
    /// Convex hull of the support points, counter-clockwise.
    pub hull: Vec<[f64; 2]>,
}

/// Sweeps `angles` equally spaced directions over `[0, 2π)`.
pub fn ce_utility_region(game: &FiniteGame, angles: usize) -> Result<CeRegion> {
    if game.players() != 2 {
        return Err(Error::InvalidInput("utility regions are computed for two-player games".into()));
    }
    if angles < 3 {
        return Err(Error::InvalidInput(format!("at least 3 directions are required, got {angles}")));
    }
    let mut points = Vec::with_capacity(angles);
    for k in 0..angles {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / angles as f64;
        let opt = optimize_over_ce(game, &weighted_objective(game, &[theta.cos(), theta.sin()]))?;
        let u = opt.distribution.expected_utilities(game);
        points.push(RegionPoint { theta, utilities: [u[0], u[1]], q: opt.distribution.q });
    }
    let hull = convex_hull(points.iter().map(|p| p.utilities).collect());
    let labels = (0..game.num_joint()).map(|idx| game.label_tuple(idx).join(",")).collect();
    Ok(CeRegion { labels, points, hull })
}

impl CeRegion {
    /// Whether `u` lies in the hull, allowing `tol` outside any edge.
    pub fn contains(&self, u: [f64; 2], tol: f64) -> bool {
        match self.hull.len() {
            0 => false,
            1 => dist(self.hull[0], u) <= tol,
            2 => segment_distance(self.hull[0], self.hull[1], u) <= tol,
            n => (0..n).all(|k| {
                let (p, q) = (self.hull[k], self.hull[(k + 1) % n]);
                let len = dist(p, q);
                len == 0.0 || cross(p, q, u) / len >= -tol
            }),
        }
    }

    /// Largest distance from a support point to `u`.
    pub fn radius_about(&self, u: [f64; 2]) -> f64 {
        self.points.iter().map(|p| dist(p.utilities, u)).fold(0.0, f64::max)
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segment_distance(a: [f64; 2], b: [f64; 2], u: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == 0.0 {
        return dist(a, u);
    }
    let t = (((u[0] - a[0]) * d[0] + (u[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    dist([a[0] + t * d[0], a[1] + t * d[1]], u)
}

/// Monotone chain; collinear and duplicate points dropped.
pub fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
