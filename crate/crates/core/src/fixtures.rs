//! Reference games shipped with the crate: the two 2x2 coordination games,
//! the gadget game of the two-clause example formula, and a small team game.

use crate::game::Game;

pub const FIG1: &str = include_str!("../fixtures/fig1.game");
pub const FIG2: &str = include_str!("../fixtures/fig2.game");
pub const TABLE1: &str = include_str!("../fixtures/table1.game");
pub const EXAMPLE_CNF: &str = include_str!("../fixtures/example.cnf");
pub const TEAM3: &str = include_str!("../fixtures/team3.game");

/// Coordination game where both players like shopping alone or together.
pub fn fig1() -> Game {
    Game::parse(FIG1).expect("fixture parses")
}

/// Coordination game without an envy-proof Nash equilibrium.
pub fn fig2() -> Game {
    Game::parse(FIG2).expect("fixture parses")
}

/// Gadget game for `(x1 or not x2) and (not x1 or x2)`, transcribed by hand.
pub fn table1() -> Game {
    Game::parse(TABLE1).expect("fixture parses")
}

pub fn team3() -> Game {
    Game::parse(TEAM3).expect("fixture parses")
}
