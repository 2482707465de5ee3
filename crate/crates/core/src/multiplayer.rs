//! Coalition gaps for m-player games, and the γ-sensitivity, γ-variation
//! and anonymity measures.

use std::collections::HashMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};
use crate::rational::Rational;

/// Coalition deviations scanned when no budget is given.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalitionGap {
    pub value: Rational,
    pub coalition: Vec<usize>,
    /// Pure actions of the coalition members, in coalition order.
    pub deviation: Vec<usize>,
    /// Deviating player attaining the gap (Nash and envy).
    pub gainer: Option<usize>,
    /// Outside player attaining the gap (immunity and envy).
    pub victim: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalitionReport {
    pub t: usize,
    pub nash: CoalitionGap,
    /// Absent when `t = m` and every coalition is the whole player set.
    pub immune: Option<CoalitionGap>,
    /// Absent when `t = m`.
    pub envy: Option<CoalitionGap>,
}

/// Number of coalition deviations with `|S| <= t`: the sum over coalitions
/// of the product of their members' action counts. Saturates.
pub fn coalition_scan_cost(g: &Game, t: usize) -> u128 {
    let counts = g.action_counts();
    (1..=t.min(counts.len()))
        .flat_map(|s| (0..counts.len()).combinations(s))
        .map(|coalition| coalition.iter().fold(1u128, |acc, &p| acc.saturating_mul(counts[p] as u128)))
        .fold(0u128, u128::saturating_add)
}

/// Scans every coalition of size at most `t` (by size, then
/// lexicographically) and every pure deviation tuple (row-major).
pub fn coalition_report(g: &Game, x: &MixedProfile, t: usize, budget: u128) -> Result<CoalitionReport> {
    x.check_shape(g)?;
    let m = g.num_players();
    if t == 0 || t > m {
        return Err(Error::InvalidArgument(format!("coalition size t must be in 1..={m}, got {t}")));
    }
    let required = coalition_scan_cost(g, t);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let base = g.utilities_with(x, &[]);
    let mut nash: Option<CoalitionGap> = None;
    let mut immune: Option<CoalitionGap> = None;
    let mut envy: Option<CoalitionGap> = None;
    let offer = |slot: &mut Option<CoalitionGap>, value: Rational, s: &[usize], dev: &[usize], i, j| {
        if slot.as_ref().is_none_or(|g| value > g.value) {
            *slot = Some(CoalitionGap {
                value,
                coalition: s.to_vec(),
                deviation: dev.to_vec(),
                gainer: i,
                victim: j,
            });
        }
    };
    for size in 1..=t {
        for s in (0..m).combinations(size) {
            let outside: Vec<usize> = (0..m).filter(|p| !s.contains(p)).collect();
            for dev in s.iter().map(|&p| 0..g.num_actions(p)).multi_cartesian_product() {
                let mut fixed = vec![None; m];
                for (&p, &a) in s.iter().zip(&dev) {
                    fixed[p] = Some(a);
                }
                let u = g.utilities_with(x, &fixed);
                let delta: Vec<Rational> = u.iter().zip(&base).map(|(a, b)| a - b).collect();
                for &i in &s {
                    offer(&mut nash, delta[i].clone(), &s, &dev, Some(i), None);
                }
                for &j in &outside {
                    offer(&mut immune, -&delta[j], &s, &dev, None, Some(j));
                }
                for &i in &s {
                    for &j in &outside {
                        offer(&mut envy, &delta[i] - &delta[j], &s, &dev, Some(i), Some(j));
                    }
                }
            }
        }
    }
    Ok(CoalitionReport {
        t,
        nash: nash.expect("at least one coalition"),
        immune,
        envy,
    })
}

pub fn coalition_nash_gap(g: &Game, x: &MixedProfile, t: usize) -> Result<Rational> {
    Ok(coalition_report(g, x, t, DEFAULT_BUDGET)?.nash.value)
}

/// Zero when no coalition of size at most `t` leaves anyone outside.
pub fn coalition_immune_gap(g: &Game, x: &MixedProfile, t: usize) -> Result<Rational> {
    Ok(coalition_report(g, x, t, DEFAULT_BUDGET)?
        .immune
        .map_or_else(Rational::zero, |gap| gap.value))
}

pub fn coalition_envy_gap(g: &Game, x: &MixedProfile, t: usize) -> Result<Rational> {
    if t >= g.num_players() {
        return Err(Error::InvalidArgument(format!(
            "coalition envy needs t < m = {}, got {t}",
            g.num_players()
        )));
    }
    Ok(coalition_report(g, x, t, DEFAULT_BUDGET)?
        .envy
        .expect("some player is outside every coalition")
        .value)
}

/// Calls `f(deltas)` for every pure profile `x` and unilateral pure
/// deviation `a != x_i`, where `deltas[j] = u_j(a : x_-i) - u_j(x)`.
fn for_each_unilateral(g: &Game, mut f: impl FnMut(&[Rational])) {
    let m = g.num_players();
    for index in 0..g.num_pure_profiles() {
        let profile = g.profile_at(index);
        for i in 0..m {
            for a in 0..g.num_actions(i) {
                if a == profile[i] {
                    continue;
                }
                let moved = index - profile[i] * g.stride(i) + a * g.stride(i);
                let deltas: Vec<Rational> = (0..m).map(|j| &g.tensor(j)[moved] - &g.tensor(j)[index]).collect();
                f(&deltas);
            }
        }
    }
}

/// Smallest γ with `|Δ_i u_j(x) - Δ_i u_k(x)| <= γ` over pure profiles `x`,
/// unilateral pure deviations of any `i`, and all players `j, k`.
pub fn gamma_varied(g: &Game) -> Rational {
    let mut best = Rational::zero();
    for_each_unilateral(g, |d| {
        let (lo, hi) = d.iter().minmax().into_option().expect("at least two players");
        let spread = hi - lo;
        if spread > best {
            best = spread;
        }
    });
    best
}

/// Smallest γ with `|u_j(a : x_-i) - u_j(x)| <= γ` over pure profiles,
/// unilateral pure deviations of `i`, and `j != i`.
pub fn gamma_sensitive(g: &Game) -> Rational {
    let m = g.num_players();
    let mut best = Rational::zero();
    for index in 0..g.num_pure_profiles() {
        let profile = g.profile_at(index);
        for i in 0..m {
            for a in (0..g.num_actions(i)).filter(|&a| a != profile[i]) {
                let moved = index - profile[i] * g.stride(i) + a * g.stride(i);
                for j in (0..m).filter(|&j| j != i) {
                    let d = (&g.tensor(j)[moved] - &g.tensor(j)[index]).abs();
                    if d > best {
                        best = d;
                    }
                }
            }
        }
    }
    best
}

/// Whether every player's utility depends only on its own action and the
/// multiset of the other players' actions.
pub fn is_anonymous(g: &Game) -> Result<bool> {
    let counts = g.action_counts();
    if counts.iter().any(|&c| c != counts[0]) {
        return Err(Error::InvalidArgument(format!(
            "anonymity needs identical action sets, got counts {counts:?}"
        )));
    }
    for i in 0..g.num_players() {
        let mut seen: HashMap<(usize, Vec<usize>), &Rational> = HashMap::new();
        for index in 0..g.num_pure_profiles() {
            let profile = g.profile_at(index);
            let mut others: Vec<usize> = profile.iter().enumerate().filter(|&(p, _)| p != i).map(|(_, &a)| a).collect();
            others.sort_unstable();
            let value = &g.tensor(i)[index];
            if let Some(prev) = seen.insert((profile[i], others), value) {
                if prev != value {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameShapeMetrics {
    pub gamma_sensitive: Rational,
    pub gamma_varied: Rational,
    /// `None` when the players' action sets differ.
    pub anonymous: Option<bool>,
}

pub fn shape_metrics(g: &Game) -> GameShapeMetrics {
    GameShapeMetrics {
        gamma_sensitive: gamma_sensitive(g),
        gamma_varied: gamma_varied(g),
        anonymous: is_anonymous(g).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::stability::{envy_gap, immune_gap, nash_gap};
    use crate::strategies;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn pure(g: &Game, a: &[usize]) -> MixedProfile {
        MixedProfile::pure(g.action_counts(), a).unwrap()
    }

    /// Coalition envy by direct enumeration through the deviation evaluator.
    fn envy_oracle(g: &Game, x: &MixedProfile, t: usize) -> Rational {
        let m = g.num_players();
        let mut best: Option<Rational> = None;
        for mask in 1u32..(1 << m) {
            let s: Vec<usize> = (0..m).filter(|p| mask >> p & 1 == 1).collect();
            if s.len() > t {
                continue;
            }
            let total: usize = s.iter().map(|&p| g.num_actions(p)).product();
            for code in 0..total {
                let mut rest = code;
                let dev: Vec<usize> = s
                    .iter()
                    .map(|&p| {
                        let a = rest % g.num_actions(p);
                        rest /= g.num_actions(p);
                        a
                    })
                    .collect();
                for &i in &s {
                    for j in (0..m).filter(|j| !s.contains(j)) {
                        let di = g.deviation_value(x, &s, &dev, i).unwrap() - g.expected_utility(x, i).unwrap();
                        let dj = g.deviation_value(x, &s, &dev, j).unwrap() - g.expected_utility(x, j).unwrap();
                        let v = di - dj;
                        if best.as_ref().is_none_or(|b| v > *b) {
                            best = Some(v);
                        }
                    }
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn two_player_examples() {
        let f1 = fixtures::fig1();
        let mm = pure(&f1, &[0, 0]);
        assert_eq!(coalition_nash_gap(&f1, &mm, 1).unwrap(), q(0));
        assert_eq!(coalition_immune_gap(&f1, &mm, 1).unwrap(), q(3));
        assert_eq!(coalition_envy_gap(&f1, &mm, 1).unwrap(), envy_gap(&f1, &mm).unwrap());
        let f2 = fixtures::fig2();
        assert_eq!(coalition_nash_gap(&f2, &pure(&f2, &[1, 1]), 1).unwrap(), q(1));
        assert!(coalition_envy_gap(&f1, &mm, 2).is_err());
        assert!(coalition_nash_gap(&f1, &mm, 0).is_err());
        assert!(coalition_nash_gap(&f1, &mm, 3).is_err());
        let r = coalition_report(&f1, &mm, 2, DEFAULT_BUDGET).unwrap();
        assert!(r.envy.is_some());
        assert_eq!(r.immune.unwrap().coalition.len(), 1);
    }

    #[test]
    fn team_game() {
        let g = fixtures::team3();
        let best = pure(&g, &[0, 0, 0]);
        for t in 1..=3 {
            assert_eq!(coalition_nash_gap(&g, &best, t).unwrap(), q(0));
        }
        for t in 1..=2 {
            assert_eq!(coalition_envy_gap(&g, &best, t).unwrap(), q(0));
            let x = MixedProfile::uniform(g.action_counts());
            assert_eq!(coalition_envy_gap(&g, &x, t).unwrap(), q(0));
        }
        // a pair switching away costs the outsider two points
        assert_eq!(coalition_immune_gap(&g, &best, 2).unwrap(), q(2));
        assert_eq!(coalition_immune_gap(&g, &best, 3).unwrap(), q(2));
        assert_eq!(gamma_varied(&g), q(0));
        assert!(is_anonymous(&g).unwrap());
    }

    #[test]
    fn constant_game_immune() {
        let g = Game::new(vec![2, 2, 2], vec![vec![q(3); 8]; 3]).unwrap();
        let x = MixedProfile::uniform(g.action_counts());
        assert_eq!(coalition_immune_gap(&g, &x, 2).unwrap(), q(0));
    }

    #[test]
    fn budget_guardrail() {
        let g = fixtures::team3();
        assert_eq!(coalition_scan_cost(&g, 1), 6);
        assert_eq!(coalition_scan_cost(&g, 2), 6 + 12);
        let x = pure(&g, &[0, 0, 0]);
        assert!(matches!(
            coalition_report(&g, &x, 2, 17),
            Err(Error::BudgetExceeded { required: 18, budget: 17 })
        ));
    }

    #[test]
    fn gamma_examples() {
        let f1 = fixtures::fig1();
        assert_eq!(gamma_varied(&f1), q(2));
        assert_eq!(gamma_sensitive(&f1), q(3));
        let scaled = f1.map(|_, v| v * Rational::new(5, 2));
        assert_eq!(gamma_sensitive(&scaled), Rational::new(15, 2));
        // each player's utility depends only on its own action
        let own = Game::new(vec![2, 3], vec![
            vec![q(1), q(1), q(1), q(4), q(4), q(4)],
            vec![q(0), q(2), q(5), q(0), q(2), q(5)],
        ])
        .unwrap();
        assert_eq!(gamma_sensitive(&own), q(0));

        let team = fixtures::team3();
        let mut u = team.tensor(1).to_vec();
        u[3] += &Rational::new(1, 3);
        let bumped = Game::new(team.action_counts().to_vec(), vec![team.tensor(0).to_vec(), u, team.tensor(2).to_vec()]).unwrap();
        let gamma = gamma_varied(&bumped);
        assert!(gamma.is_positive() && gamma <= Rational::new(2, 3));
    }

    #[test]
    fn anonymity() {
        assert!(is_anonymous(&fixtures::fig1()).unwrap());
        // majority vote: everyone gets 1 when action 1 has a majority
        let majority = |a: &[usize]| if a.iter().sum::<usize>() >= 2 { q(1) } else { q(0) };
        let counts = vec![2, 2, 2];
        let shell = Game::new(counts.clone(), vec![vec![q(0); 8]; 3]).unwrap();
        let u: Vec<Rational> = (0..8).map(|i| majority(&shell.profile_at(i))).collect();
        let g = Game::new(counts.clone(), vec![u.clone(), u.clone(), u.clone()]).unwrap();
        assert!(is_anonymous(&g).unwrap());
        // player 0 cares only about player 1
        let u0: Vec<Rational> = (0..8).map(|i| q(shell.profile_at(i)[1] as i64)).collect();
        let g = Game::new(counts, vec![u0, u.clone(), u]).unwrap();
        assert!(!is_anonymous(&g).unwrap());
        let uneven = Game::new(vec![2, 3], vec![vec![q(0); 6]; 2]).unwrap();
        assert!(is_anonymous(&uneven).is_err());
        assert_eq!(shape_metrics(&uneven).anonymous, None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn two_player_consistency((g, x) in strategies::game_and_profile(strategies::bimatrix(3, 4))) {
            prop_assert_eq!(coalition_nash_gap(&g, &x, 1).unwrap(), nash_gap(&g, &x).unwrap());
            prop_assert_eq!(coalition_immune_gap(&g, &x, 1).unwrap(), immune_gap(&g, &x).unwrap());
            prop_assert_eq!(coalition_envy_gap(&g, &x, 1).unwrap(), envy_gap(&g, &x).unwrap());
        }

        #[test]
        fn three_player_properties((g, x) in strategies::game_and_profile(
            prop::collection::vec(2usize..=3, 3).prop_flat_map(|c| strategies::game_with_counts(c, 4))
        )) {
            let mut prev: Option<CoalitionReport> = None;
            for t in 1..=3 {
                let r = coalition_report(&g, &x, t, DEFAULT_BUDGET).unwrap();
                prop_assert!(!r.nash.value.is_negative());
                if let Some(env) = &r.envy {
                    prop_assert_eq!(&env.value, &envy_oracle(&g, &x, t));
                    let immune = &r.immune.as_ref().unwrap().value;
                    prop_assert!(env.value <= &r.nash.value + immune);
                }
                if let Some(p) = &prev {
                    prop_assert!(r.nash.value >= p.nash.value);
                    prop_assert!(r.immune.as_ref().unwrap().value >= p.immune.as_ref().unwrap().value);
                    if let (Some(a), Some(b)) = (&r.envy, &p.envy) {
                        prop_assert!(a.value >= b.value);
                    }
                }
                prev = Some(r);
            }
        }
    }
}
