//! Proptest strategies shared by the unit tests.

use proptest::prelude::*;

use crate::game::{Game, MixedProfile};
use crate::rational::Rational;

/// Rational in `[-bound, bound]` with a denominator in `1..=4`.
pub fn rational(bound: i64) -> impl Strategy<Value = Rational> {
    (1i64..=4).prop_flat_map(move |d| (-bound * d..=bound * d).prop_map(move |n| Rational::new(n, d)))
}

pub fn game_with_counts(counts: Vec<usize>, bound: i64) -> impl Strategy<Value = Game> {
    let cells: usize = counts.iter().product();
    let m = counts.len();
    prop::collection::vec(prop::collection::vec(rational(bound), cells), m)
        .prop_map(move |u| Game::new(counts.clone(), u).unwrap())
}

pub fn bimatrix(max_actions: usize, bound: i64) -> impl Strategy<Value = Game> {
    (1..=max_actions, 1..=max_actions).prop_flat_map(move |(r, c)| game_with_counts(vec![r, c], bound))
}

/// Mixed strategy over `n` actions from integer weights; pure strategies
/// show up often.
pub fn strategy(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(prop_oneof![2 => Just(0i64), 3 => 1i64..=5], n).prop_map(move |w| {
        let total: i64 = w.iter().sum();
        if total == 0 {
            let mut e = vec![Rational::zero(); n];
            e[0] = Rational::one();
            return e;
        }
        w.into_iter().map(|v| Rational::new(v, total)).collect()
    })
}

pub fn profile(counts: &[usize]) -> impl Strategy<Value = MixedProfile> {
    counts
        .iter()
        .map(|&n| strategy(n))
        .collect::<Vec<_>>()
        .prop_map(|s| MixedProfile::new(s).unwrap())
}

pub fn game_and_profile(game: impl Strategy<Value = Game>) -> impl Strategy<Value = (Game, MixedProfile)> {
    game.prop_flat_map(|g| {
        let x = profile(g.action_counts());
        (Just(g), x)
    })
}
