//! Two-player gap functionals for Nash equilibrium, immunity and
//! envy-proofness, plus ε-classification.
//!
//! Every gap is a maximum over a player `b` and a pure deviation `a` of `b`.
//! Ties go to the lowest player index, then the lowest action index.

use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Deviation {
    pub player: usize,
    pub action: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gap {
    pub value: Rational,
    pub worst: Deviation,
}

/// Utilities after every unilateral pure deviation of a two-player profile.
///
/// `own[b][a]` is `u_b(a : x_{-b})`, `other[b][a]` is the opponent's utility
/// after the same deviation, and `base[p]` is `u_p(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationTable {
    pub own: [Vec<Rational>; 2],
    pub other: [Vec<Rational>; 2],
    pub base: [Rational; 2],
}

impl DeviationTable {
    pub fn new(g: &Game, x: &MixedProfile) -> Result<Self> {
        g.require_two_player()?;
        x.check_shape(g)?;
        Ok(Self::from_matrices(&g.matrix(0), &g.matrix(1), x.strategy(0), x.strategy(1)))
    }

    /// Same table from payoff matrices (rows: player 0) and raw strategies.
    pub fn from_matrices(u0: &[Vec<Rational>], u1: &[Vec<Rational>], x0: &[Rational], x1: &[Rational]) -> Self {
        let rows = |u: &[Vec<Rational>]| -> Vec<Rational> {
            u.iter()
                .map(|row| row.iter().zip(x1).filter(|(_, q)| !q.is_zero()).map(|(v, q)| v * q).sum())
                .collect()
        };
        let cols = |u: &[Vec<Rational>]| -> Vec<Rational> {
            (0..x1.len())
                .map(|j| u.iter().zip(x0).filter(|(_, q)| !q.is_zero()).map(|(row, q)| &row[j] * q).sum())
                .collect()
        };
        let own0 = rows(u0);
        let other0 = rows(u1);
        let own1 = cols(u1);
        let other1 = cols(u0);
        let dot = |v: &[Rational]| -> Rational { v.iter().zip(x0).map(|(a, q)| a * q).sum() };
        let base = [dot(&own0), dot(&other0)];
        DeviationTable {
            own: [own0, own1],
            other: [other0, other1],
            base,
        }
    }

    fn best(&self, f: impl Fn(usize, usize) -> Rational) -> Gap {
        let mut best: Option<Gap> = None;
        for b in 0..2 {
            for a in 0..self.own[b].len() {
                let value = f(b, a);
                if best.as_ref().is_none_or(|g| value > g.value) {
                    best = Some(Gap {
                        value,
                        worst: Deviation { player: b, action: a },
                    });
                }
            }
        }
        best.expect("every player has at least one action")
    }

    /// `max_{b,a} u_b(a : x_{-b}) - u_b(x)`.
    pub fn nash(&self) -> Gap {
        self.best(|b, a| &self.own[b][a] - &self.base[b])
    }

    /// `max_{b,a} u_{-b}(x) - u_{-b}(a : x_{-b})`.
    pub fn immune(&self) -> Gap {
        self.best(|b, a| &self.base[1 - b] - &self.other[b][a])
    }

    /// `max_{b,a} [u_b(a : x_{-b}) - u_b(x)] - [u_{-b}(a : x_{-b}) - u_{-b}(x)]`.
    pub fn envy(&self) -> Gap {
        self.best(|b, a| (&self.own[b][a] - &self.base[b]) - (&self.other[b][a] - &self.base[1 - b]))
    }
}

pub fn nash_gap(g: &Game, x: &MixedProfile) -> Result<Rational> {
    Ok(DeviationTable::new(g, x)?.nash().value)
}

pub fn immune_gap(g: &Game, x: &MixedProfile) -> Result<Rational> {
    Ok(DeviationTable::new(g, x)?.immune().value)
}

pub fn envy_gap(g: &Game, x: &MixedProfile) -> Result<Rational> {
    Ok(DeviationTable::new(g, x)?.envy().value)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub eps: Rational,
    pub nash_gap: Rational,
    pub immune_gap: Rational,
    pub envy_gap: Rational,
    pub is_nash: bool,
    pub is_immune: bool,
    pub is_envy_proof: bool,
    pub worst_nash: Deviation,
    pub worst_immune: Deviation,
    pub worst_envy: Deviation,
}

pub fn classify(g: &Game, x: &MixedProfile, eps: &Rational) -> Result<StabilityReport> {
    if eps.is_negative() {
        return Err(Error::InvalidArgument(format!("eps must be non-negative, got {eps}")));
    }
    let table = DeviationTable::new(g, x)?;
    let (nash, immune, envy) = (table.nash(), table.immune(), table.envy());
    Ok(StabilityReport {
        eps: eps.clone(),
        is_nash: nash.value <= *eps,
        is_immune: immune.value <= *eps,
        is_envy_proof: envy.value <= *eps,
        nash_gap: nash.value,
        immune_gap: immune.value,
        envy_gap: envy.value,
        worst_nash: nash.worst,
        worst_immune: immune.worst,
        worst_envy: envy.worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::strategies;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn pure(g: &Game, a: &[usize]) -> MixedProfile {
        MixedProfile::pure(g.action_counts(), a).unwrap()
    }

    /// Gaps recomputed one deviation at a time through the general
    /// deviation evaluator.
    fn brute_force(g: &Game, x: &MixedProfile) -> (Rational, Rational, Rational) {
        let base = [g.expected_utility(x, 0).unwrap(), g.expected_utility(x, 1).unwrap()];
        let mut gaps: [Option<Rational>; 3] = [None, None, None];
        for b in 0..2 {
            for a in 0..g.num_actions(b) {
                let own = g.deviation_value(x, &[b], &[a], b).unwrap() - &base[b];
                let other = g.deviation_value(x, &[b], &[a], 1 - b).unwrap() - &base[1 - b];
                let vals = [own.clone(), -other.clone(), own - other];
                for (slot, v) in gaps.iter_mut().zip(vals) {
                    if slot.as_ref().is_none_or(|s| v > *s) {
                        *slot = Some(v);
                    }
                }
            }
        }
        let [n, i, e] = gaps;
        (n.unwrap(), i.unwrap(), e.unwrap())
    }

    #[test]
    fn fig1_gaps() {
        let g = fixtures::fig1();
        let mm = pure(&g, &[0, 0]);
        let ss = pure(&g, &[1, 1]);
        let ms = pure(&g, &[0, 1]);
        assert_eq!(nash_gap(&g, &mm).unwrap(), q(0));
        assert_eq!(immune_gap(&g, &mm).unwrap(), q(3));
        assert_eq!(envy_gap(&g, &mm).unwrap(), q(2));
        assert_eq!(envy_gap(&g, &ss).unwrap(), q(0));
        assert_eq!(immune_gap(&g, &ss).unwrap(), q(0));
        assert_eq!(nash_gap(&g, &ms).unwrap(), q(2));
        assert_eq!(immune_gap(&g, &ms).unwrap(), q(0));
    }

    #[test]
    fn fig2_gaps() {
        let g = fixtures::fig2();
        let ss = pure(&g, &[1, 1]);
        assert_eq!(nash_gap(&g, &ss).unwrap(), q(1));
        assert_eq!(immune_gap(&g, &ss).unwrap(), q(0));
        let r = classify(&g, &pure(&g, &[0, 0]), &q(0)).unwrap();
        assert!(r.is_nash && !r.is_envy_proof && !r.is_immune);
    }

    #[test]
    fn classify_fig1() {
        let g = fixtures::fig1();
        let r = classify(&g, &pure(&g, &[0, 0]), &q(0)).unwrap();
        assert_eq!((r.is_nash, r.is_envy_proof, r.is_immune), (true, false, false));
        // player 0 moving to shopping costs player 1 three points
        assert_eq!(r.worst_immune, Deviation { player: 0, action: 1 });
        let r = classify(&g, &pure(&g, &[1, 1]), &q(0)).unwrap();
        assert_eq!((r.is_nash, r.is_envy_proof, r.is_immune), (true, true, true));
        // all gaps zero: the first deviation wins the tie
        assert_eq!(r.worst_nash, Deviation { player: 0, action: 1 });
    }

    #[test]
    fn classify_constant_game_and_eps() {
        let rows = vec![vec![q(2); 3]; 2];
        let g = Game::bimatrix(&rows, &rows).unwrap();
        let x = MixedProfile::uniform(g.action_counts());
        let r = classify(&g, &x, &q(0)).unwrap();
        assert!(r.is_nash && r.is_immune && r.is_envy_proof);
        assert!(classify(&g, &x, &q(-1)).is_err());

        let f2 = fixtures::fig2();
        let r = classify(&f2, &pure(&f2, &[1, 1]), &q(1)).unwrap();
        assert!(r.is_nash);
        let r = classify(&f2, &pure(&f2, &[1, 1]), &Rational::new(1, 2)).unwrap();
        assert!(!r.is_nash);
    }

    #[test]
    fn table1_fixed_profiles() {
        let g = fixtures::table1();
        let f = pure(&g, &[8, 8]);
        assert_eq!(nash_gap(&g, &f).unwrap(), q(0));
        assert_eq!(envy_gap(&g, &f).unwrap(), q(1));
        let half = Rational::new(1, 2);
        let s = vec![q(0), q(0), half.clone(), q(0), half, q(0), q(0), q(0), q(0)];
        let x = MixedProfile::new(vec![s.clone(), s]).unwrap();
        assert_eq!(g.expected_utility(&x, 0).unwrap(), q(1));
        assert_eq!(nash_gap(&g, &x).unwrap(), q(0));
        assert_eq!(envy_gap(&g, &x).unwrap(), q(0));
    }

    #[test]
    fn shape_errors() {
        let g = fixtures::fig1();
        let bad = MixedProfile::uniform(&[3, 2]);
        assert!(nash_gap(&g, &bad).is_err());
        let g3 = fixtures::team3();
        assert!(matches!(
            nash_gap(&g3, &MixedProfile::uniform(g3.action_counts())),
            Err(Error::NotTwoPlayer(3))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn agrees_with_brute_force((g, x) in strategies::game_and_profile(strategies::bimatrix(4, 5))) {
            let (n, i, e) = brute_force(&g, &x);
            prop_assert_eq!(nash_gap(&g, &x).unwrap(), n);
            prop_assert_eq!(immune_gap(&g, &x).unwrap(), i);
            prop_assert_eq!(envy_gap(&g, &x).unwrap(), e);
        }

        #[test]
        fn nonnegative_and_composition((g, x) in strategies::game_and_profile(strategies::bimatrix(4, 5))) {
            let r = classify(&g, &x, &q(0)).unwrap();
            prop_assert!(!r.nash_gap.is_negative());
            prop_assert!(!r.immune_gap.is_negative());
            prop_assert!(!r.envy_gap.is_negative());
            prop_assert!(r.envy_gap <= &r.nash_gap + &r.immune_gap);
        }

        #[test]
        fn scale_covariance(
            (g, x) in strategies::game_and_profile(strategies::bimatrix(3, 5)),
            c in (1i64..=6, 1i64..=6),
            shift in (strategies::rational(5), strategies::rational(5)),
        ) {
            let c = Rational::new(c.0, c.1);
            let r = classify(&g, &x, &q(0)).unwrap();
            let scaled = classify(&g.map(|_, v| v * &c), &x, &q(0)).unwrap();
            prop_assert_eq!(&scaled.nash_gap, &(&r.nash_gap * &c));
            prop_assert_eq!(&scaled.immune_gap, &(&r.immune_gap * &c));
            prop_assert_eq!(&scaled.envy_gap, &(&r.envy_gap * &c));
            let shifted = g.map(|p, v| v + if p == 0 { &shift.0 } else { &shift.1 });
            let s = classify(&shifted, &x, &q(0)).unwrap();
            prop_assert_eq!(s.nash_gap, r.nash_gap);
            prop_assert_eq!(s.immune_gap, r.immune_gap);
            prop_assert_eq!(s.envy_gap, r.envy_gap);
        }
    }
}
