//! Constructive two-player solvers: envy-proof and immune profiles, the
//! immune-Nash decision procedure, and exact support enumeration.

use std::ops::ControlFlow;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};
use crate::lp::{self, Bound, LinearProgram, Relation, Sense};
use crate::rational::Rational;
use crate::stability::DeviationTable;

/// One Nash equilibrium per support pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NashWitness {
    pub profile: MixedProfile,
    pub supports: [Vec<usize>; 2],
    pub payoffs: [Rational; 2],
    /// The indifference system of this support pair has a continuum of
    /// solutions; `profile` is one vertex of it.
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImmuneNashDecision {
    pub exists: bool,
    pub witness: Option<MixedProfile>,
    /// Maximin values of player 0 in `u_0` and of player 1 in `u_1`.
    pub values: (Rational, Rational),
}

fn transpose(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    (0..m[0].len()).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Envy-proof profile from the maximin strategies of the difference game.
pub fn solve_envy_proof(g: &Game) -> Result<MixedProfile> {
    let d = g.difference_game()?;
    let (_, x0) = lp::zero_sum_value(&d.matrix(0))?;
    let (_, x1) = lp::zero_sum_value(&transpose(&d.matrix(1)))?;
    let x = MixedProfile::new(vec![x0, x1])?;
    debug_assert!(DeviationTable::new(g, &x)?.envy().value.is_zero());
    Ok(x)
}

/// Immune profile: the first enumerated Nash equilibrium of the
/// swap-negated game. `max_support` defaults to the largest action count.
pub fn solve_immune(g: &Game, max_support: Option<usize>) -> Result<MixedProfile> {
    let swapped = g.swap_negate()?;
    let mut found = None;
    for_each_nash(&swapped, max_support, |w| {
        found = Some(w.profile);
        ControlFlow::Break(())
    })?;
    found.ok_or_else(|| Error::NotFoundWithinSupport(support_bound(g, max_support)))
}

/// Decides whether `g` has an immune Nash equilibrium by one feasibility
/// program pinning both players to optimal strategies of both zero-sum games
/// `(u_0, -u_0)` and `(-u_1, u_1)`.
pub fn decide_immune_nash(g: &Game) -> Result<ImmuneNashDecision> {
    g.require_two_player()?;
    let u0 = g.matrix(0);
    let u1 = g.matrix(1);
    let (v0, _) = lp::zero_sum_value(&u0)?;
    let (v1, _) = lp::zero_sum_value(&transpose(&u1))?;
    let (n0, n1) = (g.num_actions(0), g.num_actions(1));

    // variables: x0 (n0 entries) then x1 (n1 entries)
    let mut prog = LinearProgram::feasibility(n0 + n1);
    let row = |x0: Vec<Rational>, x1: Vec<Rational>| -> Vec<Rational> { x0.into_iter().chain(x1).collect() };
    let zeros = |n: usize| vec![Rational::zero(); n];
    prog.constrain(row(vec![Rational::one(); n0], zeros(n1)), Relation::Eq, Rational::one());
    prog.constrain(row(zeros(n0), vec![Rational::one(); n1]), Relation::Eq, Rational::one());
    for j in 0..n1 {
        let col0: Vec<Rational> = u0.iter().map(|r| r[j].clone()).collect();
        let col1: Vec<Rational> = u1.iter().map(|r| r[j].clone()).collect();
        prog.constrain(row(col0, zeros(n1)), Relation::Ge, v0.clone());
        prog.constrain(row(col1, zeros(n1)), Relation::Le, v1.clone());
    }
    for i in 0..n0 {
        prog.constrain(row(zeros(n0), u0[i].clone()), Relation::Le, v0.clone());
        prog.constrain(row(zeros(n0), u1[i].clone()), Relation::Ge, v1.clone());
    }
    let out = lp::feasibility(&prog)?;
    let witness = match out.point {
        Some(mut point) if out.is_feasible() => {
            let x1 = point.split_off(n0);
            Some(MixedProfile::new(vec![point, x1])?)
        }
        _ => None,
    };
    Ok(ImmuneNashDecision {
        exists: witness.is_some(),
        witness,
        values: (v0, v1),
    })
}

/// All Nash equilibria found by exact support enumeration, one per support
/// pair with supports of size at most `max_support`.
pub fn enumerate_nash(g: &Game, max_support: Option<usize>) -> Result<Vec<NashWitness>> {
    let mut out = Vec::new();
    for_each_nash(g, max_support, |w| {
        out.push(w);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// The first enumerated Nash witness that is also envy-proof.
pub fn find_envy_proof_nash(g: &Game, max_support: Option<usize>) -> Result<Option<NashWitness>> {
    let mut found = None;
    for_each_nash(g, max_support, |w| {
        let envy = DeviationTable::new(g, &w.profile).map(|t| t.envy().value);
        if envy.is_ok_and(|e| e.is_zero()) {
            found = Some(w);
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;
    Ok(found)
}

fn support_bound(g: &Game, max_support: Option<usize>) -> usize {
    max_support.unwrap_or_else(|| g.action_counts().iter().copied().max().unwrap_or(1))
}

/// Visits Nash witnesses in order of (|S0|, |S1|, S0, S1), supports compared
/// as sorted index lists.
///
/// A support pair is feasible on player 1's side when some `y` with exactly
/// support `S1` makes every action of `S0` a best response of player 0. That
/// property is inherited by subsets of `S0`, so an infeasible `S0` prunes all
/// of its supersets for the same `S1`; symmetrically for player 0's side.
pub fn for_each_nash(
    g: &Game,
    max_support: Option<usize>,
    mut visit: impl FnMut(NashWitness) -> ControlFlow<()>,
) -> Result<()> {
    g.require_two_player()?;
    let (n0, n1) = (g.num_actions(0), g.num_actions(1));
    if n0 > 64 || n1 > 64 {
        return Err(Error::InvalidArgument("support enumeration handles at most 64 actions per player".into()));
    }
    let bound = support_bound(g, max_support);
    if bound == 0 {
        return Err(Error::InvalidArgument("max_support must be at least 1".into()));
    }
    let u0 = g.matrix(0);
    let u1t = transpose(&g.matrix(1));
    let subsets = |n: usize, size: usize| -> Vec<Vec<usize>> { (0..n).combinations(size).collect() };
    let mask = |s: &[usize]| s.iter().fold(0u64, |m, &i| m | (1 << i));

    // minimal infeasible masks: of S0 keyed by S1, and of S1 keyed by S0
    let mut dead_s0: std::collections::HashMap<u64, Vec<u64>> = Default::default();
    let mut dead_s1: std::collections::HashMap<u64, Vec<u64>> = Default::default();
    let covered = |dead: &std::collections::HashMap<u64, Vec<u64>>, key: u64, m: u64| {
        dead.get(&key).is_some_and(|v| v.iter().any(|&d| d & !m == 0))
    };

    for size0 in 1..=bound.min(n0) {
        let all_s0 = subsets(n0, size0);
        for size1 in 1..=bound.min(n1) {
            let all_s1 = subsets(n1, size1);
            for s0 in &all_s0 {
                let m0 = mask(s0);
                for s1 in &all_s1 {
                    let m1 = mask(s1);
                    if covered(&dead_s0, m1, m0) || covered(&dead_s1, m0, m1) {
                        continue;
                    }
                    let Some(y) = support_side(&u0, s0, s1) else {
                        dead_s0.entry(m1).or_default().push(m0);
                        continue;
                    };
                    let Some(x) = support_side(&u1t, s1, s0) else {
                        dead_s1.entry(m0).or_default().push(m1);
                        continue;
                    };
                    let profile = MixedProfile::new(vec![x.mix, y.mix])?;
                    debug_assert!(DeviationTable::new(g, &profile)?.nash().value.is_zero());
                    let witness = NashWitness {
                        profile,
                        supports: [s0.clone(), s1.clone()],
                        payoffs: [y.value, x.value],
                        degenerate: x.degenerate || y.degenerate,
                    };
                    if visit(witness).is_break() {
                        return Ok(());
                    }
                }
            }
        }
    }
    Ok(())
}

struct SideSolution {
    mix: Vec<Rational>,
    value: Rational,
    degenerate: bool,
}

/// Finds a mixture `z` of the opponent with support exactly `opp` such that
/// every action in `resp` is a best response under `payoff` (rows: the
/// responder's actions). Maximizes the smallest support probability `t`; the
/// support is exact iff `t > 0`.
fn support_side(payoff: &[Vec<Rational>], resp: &[usize], opp: &[usize]) -> Option<SideSolution> {
    let k = opp.len();
    // variables: z over opp, v (free), t
    let mut objective = vec![Rational::zero(); k + 2];
    objective[k + 1] = Rational::one();
    let mut prog = LinearProgram::new(Sense::Maximize, objective);
    prog.bound(k, Bound::free());
    let mut sum = vec![Rational::one(); k];
    sum.extend([Rational::zero(), Rational::zero()]);
    prog.constrain(sum, Relation::Eq, Rational::one());
    let mut equalities = Vec::with_capacity(resp.len() + 1);
    for (r, row) in payoff.iter().enumerate() {
        let mut coeffs: Vec<Rational> = opp.iter().map(|&o| row[o].clone()).collect();
        coeffs.push(-Rational::one());
        let in_support = resp.contains(&r);
        if in_support {
            equalities.push(coeffs.clone());
        }
        coeffs.push(Rational::zero());
        prog.constrain(coeffs, if in_support { Relation::Eq } else { Relation::Le }, Rational::zero());
    }
    for i in 0..k {
        let mut coeffs = vec![Rational::zero(); k + 2];
        coeffs[i] = Rational::one();
        coeffs[k + 1] = -Rational::one();
        prog.constrain(coeffs, Relation::Ge, Rational::zero());
    }
    let out = lp::simplex_solve(&prog).ok()?;
    if !out.is_optimal() || !out.value.as_ref().is_some_and(Rational::is_positive) {
        return None;
    }
    let point = out.point?;
    let mut mix = vec![Rational::zero(); payoff[0].len()];
    for (i, &o) in opp.iter().enumerate() {
        mix[o] = point[i].clone();
    }
    let mut sum_row = vec![Rational::one(); k];
    sum_row.push(Rational::zero());
    equalities.push(sum_row);
    Some(SideSolution {
        mix,
        value: point[k].clone(),
        degenerate: lp::rank(&equalities) < k + 1,
    })
}
