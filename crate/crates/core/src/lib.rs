//! Exact analysis of Nash equilibria, immunity and envy-proofness in finite
//! normal-form games.

pub mod approx;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod lp;
pub mod multiplayer;
pub mod rational;
pub mod sat;
pub mod solvers;
pub mod stability;
#[cfg(test)]
mod strategies;

pub use error::{Error, Result};
pub use game::{Game, MixedProfile, PureProfile};
pub use rational::Rational;
