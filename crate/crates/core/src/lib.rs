//! Equilibrium analysis of energy-efficient power control with costly
//! spectrum sensing.
//!
//! Players choose transmit powers to maximize bits per joule on a shared
//! multiple-access channel. Sensing lets a player observe the others and
//! act as a follower, at the price of a fraction `α` of its rate. The crate
//! computes the one-shot Nash point, the leader/follower hierarchy, the
//! finite sensing game and its potential, the two-player matrix game with
//! its correlated equilibria, and the hybrid game where sensing and power
//! are chosen at once.

pub mod cli;
pub mod config;
pub mod correlated;
pub mod efficiency;
pub mod error;
pub mod game;
pub mod hierarchy;
pub mod hybrid;
pub mod lp;
pub mod oneshot;
pub mod output;
pub mod sensing_game;
pub mod two_player;

pub use error::{Error, Result};
