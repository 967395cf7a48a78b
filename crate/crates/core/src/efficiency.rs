//! Sigmoidal efficiency functions and the SINR targets derived from them.
//!
//! Every equilibrium formula in this crate is driven by one of three roots:
//!
//! * `β*`, the solution of `x f'(x) = f(x)` (best SINR of an isolated
//!   energy-efficient transmitter),
//! * `γ*`, the solution of `x (1 - c x) f'(x) = f(x)` with
//!   `c = (K-1)β* / (1 - (K-2)β*)` (leader SINR in the two-tier game),
//! * `γ*_L`, the same equation with `c = ε_L` for a sensing profile with
//!   `L` non-sensing players.
//!
//! All three are computed by one bracketed bisection on the log-derivative
//! form `x f'(x)/f(x) * (1 - c x) - 1`, which stays well conditioned where
//! `f` itself underflows.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default stopping tolerance for the root solvers.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Search bracket for every root equation.
pub const BRACKET: (f64, f64) = (1e-6, 1e3);

/// Points of the log grid used to locate the bracket and count sign changes.
const SCAN_POINTS: usize = 1024;

const MAX_BISECTIONS: usize = 400;

/// Block success rate as a function of SINR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum EfficiencyModel {
    /// `f(x) = exp(-a / x)`.
    ExpRatio { a: f64 },
    /// `f(x) = (1 - exp(-x))^M`.
    Goodman { m: u32 },
}

impl EfficiencyModel {
    pub fn exp_ratio(a: f64) -> Result<Self> {
        let model = EfficiencyModel::ExpRatio { a };
        model.validate()?;
        Ok(model)
    }

    pub fn goodman(m: u32) -> Result<Self> {
        let model = EfficiencyModel::Goodman { m };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EfficiencyModel::ExpRatio { a } if !(a.is_finite() && a > 0.0) => Err(
                Error::InvalidInput(format!("exp_ratio parameter a must be positive, got {a}")),
            ),
            EfficiencyModel::Goodman { m } if m < 2 => Err(Error::InvalidInput(format!(
                "goodman exponent m must be at least 2, got {m}"
            ))),
            _ => Ok(()),
        }
    }

    /// `f(x)`, with `f(0) = 0` by continuous extension. Rejects negative or
    /// non-finite SINR.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || x.is_nan() {
            return Err(Error::InvalidInput(format!(
                "efficiency function needs a nonnegative SINR, got {x}"
            )));
        }
        Ok(self.value(x))
    }

    /// Unchecked `f(x)` for `x >= 0`.
    pub fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            EfficiencyModel::ExpRatio { a } => (-a / x).exp(),
            EfficiencyModel::Goodman { m } => (-(-x).exp_m1()).powi(m as i32),
        }
    }

    /// `f'(x)` for `x >= 0`.
    pub fn derivative(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            EfficiencyModel::ExpRatio { a } => a / (x * x) * (-a / x).exp(),
            EfficiencyModel::Goodman { m } => {
                let q = -(-x).exp_m1();
                m as f64 * q.powi(m as i32 - 1) * (-x).exp()
            }
        }
    }

    /// Elasticity `x f'(x) / f(x)`, evaluated without forming `f`.
    pub fn elasticity(&self, x: f64) -> f64 {
        match *self {
            EfficiencyModel::ExpRatio { a } => a / x,
            EfficiencyModel::Goodman { m } => m as f64 * x / x.exp_m1(),
        }
    }

    /// Residual of `x (1 - c x) f'(x) - f(x)`.
    pub fn residual(&self, x: f64, c: f64) -> f64 {
        x * (1.0 - c * x) * self.derivative(x) - self.value(x)
    }
}

/// A located root of one of the SINR target equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootResult {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    /// Sign changes seen on the log scan of the bracket. Anything other than
    /// one means the uniqueness assumption failed for this parameterization.
    pub sign_changes: usize,
}

/// `γ*_L` together with the `ε_L` coefficient that defined it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRoot {
    pub epsilon: f64,
    pub root: RootResult,
}

fn equation_name(c: f64) -> &'static str {
    if c == 0.0 {
        "x f'(x) - f(x)"
    } else {
        "x (1 - c x) f'(x) - f(x)"
    }
}

/// Solves `x (1 - c x) f'(x) = f(x)` for `x` in [`BRACKET`].
///
/// `c = 0` gives `β*`. Larger `c` moves the root toward zero.
pub fn solve_weighted_root(model: &EfficiencyModel, c: f64, tol: f64) -> Result<RootResult> {
    model.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("root tolerance must be positive, got {tol}")));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::InvalidInput(format!("slope coefficient must be nonnegative, got {c}")));
    }

    let h = |x: f64| model.elasticity(x) * (1.0 - c * x) - 1.0;
    let (lo, hi) = BRACKET;
    let ratio = (hi / lo).ln() / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| if k + 1 == SCAN_POINTS { hi } else { lo * (ratio * k as f64).exp() })
        .collect();
    let signs: Vec<f64> = grid.iter().map(|&x| h(x)).collect();

    let mut sign_changes = 0;
    let mut first: Option<(f64, f64)> = None;
    for k in 0..SCAN_POINTS - 1 {
        let (a, b) = (signs[k], signs[k + 1]);
        if (a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0) {
            sign_changes += 1;
            first.get_or_insert((grid[k], grid[k + 1]));
        }
    }
    if sign_changes > 1 {
        warn!("{} sign changes of {} on the bracket (c = {c:e})", sign_changes, equation_name(c));
    }
    let (mut a, mut b) = first.ok_or(Error::BracketNotFound { equation: equation_name(c), lo, hi })?;

    // invariant: h(a) > 0 >= h(b) or h(a) < 0 <= h(b)
    let ha = h(a);
    let mut iterations = 0;
    let mut x = if h(b) == 0.0 { b } else { 0.5 * (a + b) };
    if h(b) != 0.0 {
        while iterations < MAX_BISECTIONS {
            iterations += 1;
            x = 0.5 * (a + b);
            if x <= a || x >= b {
                break;
            }
            let hx = h(x);
            if hx == 0.0 {
                break;
            }
            if (hx > 0.0) == (ha > 0.0) {
                a = x;
            } else {
                b = x;
            }
            let width_ok = b - a <= tol * x.max(1.0);
            if width_ok && model.residual(x, c).abs() <= tol {
                break;
            }
        }
    }

    Ok(RootResult { value: x, residual: model.residual(x, c), iterations, sign_changes })
}

/// `β*`: the solution of `x f'(x) = f(x)`.
pub fn solve_beta(model: &EfficiencyModel, tol: f64) -> Result<RootResult> {
    solve_weighted_root(model, 0.0, tol)
}

/// Slope coefficient `(K-1)β* / (1 - (K-2)β*)` of the leader equation.
pub fn leader_coefficient(k: usize, beta: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InfeasibleK(format!("the two-tier game needs K >= 2, got {k}")));
    }
    let denom = 1.0 - (k as f64 - 2.0) * beta;
    if !(denom > 0.0) {
        return Err(Error::InfeasibleK(format!(
            "1 - (K-2)β* = {denom:e} must be positive (K = {k}, β* = {beta:e})"
        )));
    }
    Ok((k as f64 - 1.0) * beta / denom)
}

/// `γ*` for `K` players.
pub fn solve_gamma(model: &EfficiencyModel, k: usize, tol: f64) -> Result<RootResult> {
    let beta = solve_beta(model, tol)?.value;
    solve_gamma_with_beta(model, k, beta, tol)
}

pub(crate) fn solve_gamma_with_beta(
    model: &EfficiencyModel,
    k: usize,
    beta: f64,
    tol: f64,
) -> Result<RootResult> {
    let c = leader_coefficient(k, beta)?;
    solve_weighted_root(model, c, tol)
}

/// `ε_L = (K+2-L)β* / (N² - N(K+1-L)β*)`.
pub fn epsilon_l(k: usize, n: f64, l: usize, beta: f64) -> Result<f64> {
    let (kf, lf) = (k as f64, l as f64);
    let denom = n * n - n * (kf + 1.0 - lf) * beta;
    if !(denom > 0.0) {
        return Err(Error::InfeasibleProfile(format!(
            "N² - N(K+1-L)β* = {denom:e} must be positive (K = {k}, N = {n}, L = {l})"
        )));
    }
    let eps = (kf + 2.0 - lf) * beta / denom;
    if !(eps > 0.0) {
        return Err(Error::InfeasibleProfile(format!(
            "ε_L = {eps:e} must be positive (K = {k}, N = {n}, L = {l})"
        )));
    }
    Ok(eps)
}

/// `γ*_L` for a profile with `L` non-sensing players out of `K`.
pub fn solve_gamma_l(
    model: &EfficiencyModel,
    k: usize,
    n: f64,
    l: usize,
    tol: f64,
) -> Result<ProfileRoot> {
    let beta = solve_beta(model, tol)?.value;
    solve_gamma_l_with_beta(model, k, n, l, beta, tol)
}

pub(crate) fn solve_gamma_l_with_beta(
    model: &EfficiencyModel,
    k: usize,
    n: f64,
    l: usize,
    beta: f64,
    tol: f64,
) -> Result<ProfileRoot> {
    if !(n >= 1.0) {
        return Err(Error::InvalidInput(format!("processing gain N must be at least 1, got {n}")));
    }
    let epsilon = epsilon_l(k, n, l, beta)?;
    let root = solve_weighted_root(model, epsilon, tol)?;
    Ok(ProfileRoot { epsilon, root })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(a: f64) -> EfficiencyModel {
        EfficiencyModel::exp_ratio(a).unwrap()
    }

    #[test]
    fn eval_matches_direct_substitution() {
        assert!((exp(1.0).eval(1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((exp(0.5).eval(0.4).unwrap() - 0.286_504_796_860_190_1).abs() < 1e-15);
        assert_eq!(exp(0.5).eval(0.0).unwrap(), 0.0);
        let g = EfficiencyModel::goodman(2).unwrap();
        assert!((g.eval(1e6).unwrap() - 1.0).abs() < 1e-15);
        assert!(g.eval(-1e-3).is_err());
        assert!(exp(1.0).eval(f64::NAN).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(EfficiencyModel::exp_ratio(0.0).is_err());
        assert!(EfficiencyModel::exp_ratio(-1.0).is_err());
        assert!(EfficiencyModel::goodman(1).is_err());
    }

    #[test]
    fn derivative_matches_central_difference() {
        for model in [exp(0.5), exp(2.0), EfficiencyModel::goodman(2).unwrap(), EfficiencyModel::goodman(7).unwrap()] {
            let mut x = 0.01;
            while x <= 20.0 {
                let h = 1e-6 * x;
                let fd = (model.value(x + h) - model.value(x - h)) / (2.0 * h);
                let d = model.derivative(x);
                // truncation budget plus the rounding floor of the difference quotient
                let floor = 10.0 * f64::EPSILON * model.value(x) / h;
                assert!((fd - d).abs() <= 1e-6 * d.abs() + floor, "{model:?} x={x} fd={fd} d={d}");
                x *= 1.07;
            }
        }
    }

    #[test]
    fn sigmoid_shape() {
        for model in [exp(0.3), EfficiencyModel::goodman(3).unwrap()] {
            let mut prev = 0.0;
            let mut x = 1e-4;
            while x < 1e3 {
                let v = model.value(x);
                assert!((0.0..=1.0).contains(&v));
                assert!(v >= prev);
                prev = v;
                x *= 1.1;
            }
            assert!((model.value(1e4) - 1.0).abs() < 1e-3);
            // f(x)/x -> 0
            assert!(model.value(1e-5) / 1e-5 < 1e-3);
        }
    }

    #[test]
    fn beta_is_a_for_exp_ratio() {
        for a in [0.5, 1.0] {
            let r = solve_beta(&exp(a), DEFAULT_ROOT_TOL).unwrap();
            assert!((r.value - a).abs() < 1e-12, "{r:?}");
            assert_eq!(r.sign_changes, 1);
        }
    }

    #[test]
    fn goodman_beta_root() {
        let model = EfficiencyModel::goodman(2).unwrap();
        let r = solve_beta(&model, DEFAULT_ROOT_TOL).unwrap();
        assert!(r.residual.abs() < 1e-10);
        // 2x = e^x - 1 has its positive root near 1.2564
        assert!((r.value - 1.256_431_208_626_169_6).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn gamma_closed_form_for_exp_ratio() {
        for (a, want) in [(0.5, 0.4), (1.0, 0.5)] {
            let r = solve_gamma(&exp(a), 2, DEFAULT_ROOT_TOL).unwrap();
            assert!((r.value - want).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn gamma_brackets_a_sign_change() {
        let model = EfficiencyModel::goodman(4).unwrap();
        let beta = solve_beta(&model, DEFAULT_ROOT_TOL).unwrap().value;
        let g = solve_gamma(&model, 2, DEFAULT_ROOT_TOL).unwrap().value;
        let lhs = model.residual(g * (1.0 - 1e-6), beta);
        let rhs = model.residual(g * (1.0 + 1e-6), beta);
        assert!(lhs > 0.0 && rhs < 0.0);
        assert!(g < beta);
    }

    #[test]
    fn gamma_infeasible_k() {
        // 1 - (K-2)β* = 1 - 2·0.5 = 0
        assert!(matches!(solve_gamma(&exp(0.5), 4, DEFAULT_ROOT_TOL), Err(Error::InfeasibleK(_))));
        assert!(matches!(solve_gamma(&exp(0.5), 1, DEFAULT_ROOT_TOL), Err(Error::InfeasibleK(_))));
    }

    #[test]
    fn epsilon_division_by_zero_is_infeasible() {
        assert!(matches!(epsilon_l(2, 1.0, 1, 0.5), Err(Error::InfeasibleProfile(_))));
        assert!(matches!(
            solve_gamma_l(&exp(0.5), 2, 1.0, 1, DEFAULT_ROOT_TOL),
            Err(Error::InfeasibleProfile(_))
        ));
    }

    #[test]
    fn gamma_l_matches_closed_form() {
        // For f = exp(-a/x) the equation reduces to x = a / (1 + ε a).
        let model = exp(0.5);
        let pr = solve_gamma_l(&model, 2, 10.0, 1, DEFAULT_ROOT_TOL).unwrap();
        let eps = 1.5 / (100.0 - 10.0 * 2.0 * 0.5);
        assert!((pr.epsilon - eps).abs() < 1e-12);
        assert!((pr.root.value - 0.5 / (1.0 + eps * 0.5)).abs() < 1e-12);
        assert!(pr.root.residual.abs() < 1e-10);
    }

    #[test]
    fn vanishing_epsilon_recovers_beta() {
        let model = EfficiencyModel::goodman(3).unwrap();
        let beta = solve_beta(&model, DEFAULT_ROOT_TOL).unwrap().value;
        let g = solve_weighted_root(&model, 1e-9, DEFAULT_ROOT_TOL).unwrap().value;
        assert!((g - beta).abs() < 1e-6);
    }

    #[test]
    fn root_outside_bracket_is_reported() {
        // β* = a = 5000 lies beyond the upper end of the bracket
        let err = solve_beta(&exp(5000.0), DEFAULT_ROOT_TOL).unwrap_err();
        assert!(matches!(err, Error::BracketNotFound { .. }));
        let bad = EfficiencyModel::Goodman { m: 1 };
        assert!(solve_beta(&bad, DEFAULT_ROOT_TOL).is_err());
    }
}
