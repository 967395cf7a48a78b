use thiserror::Error;

/// Failures raised by the solvers and game builders.
///
/// Variants fall into two groups: malformed inputs (`InvalidInput`,
/// `IndexOutOfRange`, `GameTooLarge`) and well-formed models whose
/// closed forms do not exist (`Infeasible*`, `Saturated`, `BracketNotFound`).
/// The CLI maps the first group to exit code 1 and the second to exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("player index {index} out of range for {players} players")]
    IndexOutOfRange { index: usize, players: usize },

    #[error("no sign change of {equation} found on [{lo:e}, {hi:e}]")]
    BracketNotFound {
        equation: &'static str,
        lo: f64,
        hi: f64,
    },

    #[error("infeasible player count: {0}")]
    InfeasibleK(String),

    #[error("infeasible sensing profile: {0}")]
    InfeasibleProfile(String),

    #[error("infeasible model: {0}")]
    Infeasible(String),

    #[error("equilibrium power of player {player} is {power:e} W, above the cap {cap:e} W")]
    Saturated { player: usize, power: f64, cap: f64 },

    #[error("game has {joint_actions} joint actions over {players} players, above the enumeration guard")]
    GameTooLarge { players: usize, joint_actions: usize },

    #[error("no interior mixed equilibrium: {0}")]
    NoInteriorSolution(String),

    #[error("linear program: {0}")]
    Lp(String),
}

impl Error {
    /// `true` when the inputs were well formed but the model has no solution
    /// of the requested kind.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::BracketNotFound { .. }
                | Error::InfeasibleK(_)
                | Error::InfeasibleProfile(_)
                | Error::Infeasible(_)
                | Error::Saturated { .. }
                | Error::NoInteriorSolution(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
