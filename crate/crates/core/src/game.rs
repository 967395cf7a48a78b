//! Dense payoff tensors for finite `K`-player games.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest player count accepted by brute-force enumeration.
pub const MAX_ENUM_PLAYERS: usize = 20;
/// Largest joint-action count accepted by brute-force enumeration.
pub const MAX_ENUM_JOINT: usize = 1 << 24;

/// A finite normal-form game stored as a dense payoff tensor.
///
/// Joint actions are indexed in mixed radix with player 0 as the most
/// significant digit, so index order is the lexicographic order of action
/// tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGame {
    labels: Vec<Vec<String>>,
    strides: Vec<usize>,
    joint: usize,
    /// `payoffs[joint * K + i]`
    payoffs: Vec<f64>,
}

impl FiniteGame {
    /// Builds the tensor by evaluating `payoff` on every joint action.
    pub fn from_fn<F>(labels: Vec<Vec<String>>, mut payoff: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Result<Vec<f64>>,
    {
        let (strides, joint) = layout(&labels)?;
        let k = labels.len();
        let mut payoffs = Vec::with_capacity(joint * k);
        let mut actions = vec![0usize; k];
        for idx in 0..joint {
            decode_into(&strides, &labels, idx, &mut actions);
            let u = payoff(&actions)?;
            if u.len() != k {
                return Err(Error::InvalidInput(format!(
                    "payoff vector of length {} for {k} players",
                    u.len()
                )));
            }
            if let Some(bad) = u.iter().find(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!("non-finite payoff {bad} at joint action {actions:?}")));
            }
            payoffs.extend_from_slice(&u);
        }
        Ok(FiniteGame { labels, strides, joint, payoffs })
    }

    /// Two-player game from row/column payoff matrices.
    pub fn bimatrix(labels: [Vec<String>; 2], row: &[Vec<f64>], col: &[Vec<f64>]) -> Result<Self> {
        let [l1, l2] = labels;
        let (n1, n2) = (l1.len(), l2.len());
        if row.len() != n1 || col.len() != n1 || row.iter().chain(col).any(|r| r.len() != n2) {
            return Err(Error::InvalidInput("bimatrix shape does not match action labels".into()));
        }
        FiniteGame::from_fn(vec![l1, l2], |a| Ok(vec![row[a[0]][a[1]], col[a[0]][a[1]]]))
    }

    pub fn players(&self) -> usize {
        self.labels.len()
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.labels[player].len()
    }

    pub fn num_joint(&self) -> usize {
        self.joint
    }

    pub fn labels(&self, player: usize) -> &[String] {
        &self.labels[player]
    }

    pub fn index_of(&self, actions: &[usize]) -> usize {
        actions.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn actions_of(&self, idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.players()];
        decode_into(&self.strides, &self.labels, idx, &mut out);
        out
    }

    /// Action of `player` inside joint action `idx`.
    pub fn action_at(&self, idx: usize, player: usize) -> usize {
        (idx / self.strides[player]) % self.labels[player].len()
    }

    /// Joint action obtained from `idx` by switching `player` to `action`.
    pub fn deviate(&self, idx: usize, player: usize, action: usize) -> usize {
        let current = self.action_at(idx, player);
        idx - current * self.strides[player] + action * self.strides[player]
    }

    pub fn payoff(&self, idx: usize, player: usize) -> f64 {
        self.payoffs[idx * self.players() + player]
    }

    pub fn payoffs_at(&self, idx: usize) -> &[f64] {
        let k = self.players();
        &self.payoffs[idx * k..(idx + 1) * k]
    }

    pub fn label_tuple(&self, idx: usize) -> Vec<String> {
        self.actions_of(idx)
            .iter()
            .enumerate()
            .map(|(i, &a)| self.labels[i][a].clone())
            .collect()
    }

    /// Largest absolute payoff in the tensor.
    pub fn payoff_scale(&self) -> f64 {
        self.payoffs.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Copy of the game with player `i`'s payoffs multiplied by `factors[i]`.
    pub fn scaled(&self, factors: &[f64]) -> Result<FiniteGame> {
        if factors.len() != self.players() || factors.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::InvalidInput("one positive finite factor per player is required".into()));
        }
        let k = self.players();
        let mut out = self.clone();
        for (n, u) in out.payoffs.iter_mut().enumerate() {
            *u *= factors[n % k];
        }
        Ok(out)
    }

    /// Sub-game keeping, for each player, the listed action indices (in the
    /// given order).
    pub fn restrict(&self, keep: &[Vec<usize>]) -> Result<FiniteGame> {
        if keep.len() != self.players() {
            return Err(Error::InvalidInput("one action list per player is required".into()));
        }
        for (i, list) in keep.iter().enumerate() {
            if list.is_empty() || list.iter().any(|&a| a >= self.num_actions(i)) {
                return Err(Error::InvalidInput(format!("invalid action subset for player {i}")));
            }
        }
        let labels = keep
            .iter()
            .enumerate()
            .map(|(i, list)| list.iter().map(|&a| self.labels[i][a].clone()).collect())
            .collect();
        FiniteGame::from_fn(labels, |sub| {
            let full: Vec<usize> = sub.iter().enumerate().map(|(i, &a)| keep[i][a]).collect();
            Ok(self.payoffs_at(self.index_of(&full)).to_vec())
        })
    }

    /// Serializable payoff table: one entry per joint action, in index order.
    pub fn payoff_table(&self) -> PayoffTable {
        PayoffTable {
            players: self.players(),
            actions: self.labels.clone(),
            entries: (0..self.joint)
                .map(|idx| PayoffEntry { actions: self.label_tuple(idx), payoffs: self.payoffs_at(idx).to_vec() })
                .collect(),
        }
    }
}

fn layout(labels: &[Vec<String>]) -> Result<(Vec<usize>, usize)> {
    if labels.is_empty() {
        return Err(Error::InvalidInput("a game needs at least one player".into()));
    }
    let mut strides = vec![1usize; labels.len()];
    let mut joint = 1usize;
    for i in (0..labels.len()).rev() {
        if labels[i].is_empty() {
            return Err(Error::InvalidInput(format!("player {i} has no actions")));
        }
        strides[i] = joint;
        joint = joint
            .checked_mul(labels[i].len())
            .ok_or_else(|| Error::InvalidInput("joint action space overflows".into()))?;
    }
    Ok((strides, joint))
}

fn decode_into(strides: &[usize], labels: &[Vec<String>], idx: usize, out: &mut [usize]) {
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = (idx / strides[i]) % labels[i].len();
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffTable {
    pub players: usize,
    pub actions: Vec<Vec<String>>,
    pub entries: Vec<PayoffEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PayoffEntry {
    pub actions: Vec<String>,
    pub payoffs: Vec<f64>,
}

/// Largest gain any single player can obtain by deviating from `idx`.
pub fn max_deviation_gain(game: &FiniteGame, idx: usize, player: usize) -> f64 {
    let here = game.payoff(idx, player);
    (0..game.num_actions(player))
        .map(|b| game.payoff(game.deviate(idx, player, b), player) - here)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Every joint action from which no player gains more than
/// `tol * max(1, |u|)` by a unilateral deviation, in index order.
pub fn enumerate_pure_equilibria(game: &FiniteGame, tol: f64) -> Result<Vec<usize>> {
    if game.players() > MAX_ENUM_PLAYERS || game.num_joint() > MAX_ENUM_JOINT {
        return Err(Error::GameTooLarge { players: game.players(), joint_actions: game.num_joint() });
    }
    let out = (0..game.num_joint())
        .filter(|&idx| {
            (0..game.players()).all(|i| {
                let slack = tol * game.payoff(idx, i).abs().max(1.0);
                max_deviation_gain(game, idx, i) <= slack
            })
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels2() -> [Vec<String>; 2] {
        [vec!["A".into(), "B".into()], vec!["A".into(), "B".into()]]
    }

    #[test]
    fn indexing_roundtrip_is_lexicographic() {
        let labels = vec![vec!["x".to_string(); 3], vec!["y".to_string(); 2], vec!["z".to_string(); 4]];
        let g = FiniteGame::from_fn(labels, |a| Ok(vec![a[0] as f64, a[1] as f64, a[2] as f64])).unwrap();
        assert_eq!(g.num_joint(), 24);
        for idx in 0..24 {
            let a = g.actions_of(idx);
            assert_eq!(g.index_of(&a), idx);
            assert_eq!(g.payoffs_at(idx), &[a[0] as f64, a[1] as f64, a[2] as f64]);
            for p in 0..3 {
                assert_eq!(g.action_at(idx, p), a[p]);
            }
        }
        assert_eq!(g.actions_of(1), vec![0, 0, 1]);
        let d = g.deviate(g.index_of(&[2, 1, 3]), 1, 0);
        assert_eq!(g.actions_of(d), vec![2, 0, 3]);
    }

    #[test]
    fn matching_pennies_has_no_pure_equilibrium() {
        let row = vec![vec![1.0, -1.0], vec![-1.0, 1.0]];
        let col = vec![vec![-1.0, 1.0], vec![1.0, -1.0]];
        let g = FiniteGame::bimatrix(labels2(), &row, &col).unwrap();
        assert!(enumerate_pure_equilibria(&g, 1e-12).unwrap().is_empty());
    }

    #[test]
    fn coordination_has_two() {
        let row = vec![vec![2.0, 0.0], vec![0.0, 1.0]];
        let g = FiniteGame::bimatrix(labels2(), &row, &row).unwrap();
        assert_eq!(enumerate_pure_equilibria(&g, 1e-12).unwrap(), vec![0, 3]);
    }

    #[test]
    fn non_finite_payoffs_rejected() {
        let labels = vec![vec!["a".to_string()]];
        assert!(FiniteGame::from_fn(labels, |_| Ok(vec![f64::NAN])).is_err());
    }

    #[test]
    fn guard_on_player_count() {
        let labels = vec![vec!["a".to_string()]; 21];
        let g = FiniteGame::from_fn(labels, |_| Ok(vec![0.0; 21])).unwrap();
        assert!(matches!(enumerate_pure_equilibria(&g, 1e-12), Err(Error::GameTooLarge { .. })));
    }

    #[test]
    fn restrict_keeps_payoffs() {
        let row = vec![vec![2.0, 0.0], vec![0.0, 1.0]];
        let col = vec![vec![3.0, 4.0], vec![5.0, 6.0]];
        let g = FiniteGame::bimatrix(labels2(), &row, &col).unwrap();
        let sub = g.restrict(&[vec![1], vec![0, 1]]).unwrap();
        assert_eq!(sub.num_joint(), 2);
        assert_eq!(sub.payoffs_at(0), &[0.0, 5.0]);
        assert_eq!(sub.payoffs_at(1), &[1.0, 6.0]);
        assert_eq!(sub.labels(0), &["B".to_string()]);
    }

    #[test]
    fn payoff_table_lists_every_joint_action() {
        let row = vec![vec![2.0, 0.0], vec![0.0, 1.0]];
        let g = FiniteGame::bimatrix(labels2(), &row, &row).unwrap();
        let t = g.payoff_table();
        assert_eq!(t.entries.len(), 4);
        assert_eq!(t.entries[2].actions, vec!["B".to_string(), "A".to_string()]);
    }
}
