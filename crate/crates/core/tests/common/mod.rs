//! Seeded random instance generators shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use stabilis::sat::CnfFormula;
use stabilis::{Game, MixedProfile, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Uniform rational in `[lo, hi]` with denominator in `1..=max_den`.
pub fn rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    Rational::new(rng.gen_range(lo * d..=hi * d), d)
}

pub fn game(rng: &mut ChaCha8Rng, counts: &[usize], lo: i64, hi: i64, max_den: i64) -> Game {
    let cells: usize = counts.iter().product();
    let u = (0..counts.len())
        .map(|_| (0..cells).map(|_| rational(rng, lo, hi, max_den)).collect())
        .collect();
    Game::new(counts.to_vec(), u).unwrap()
}

/// Two-player game with each side drawn from `1..=max_actions`.
pub fn bimatrix(rng: &mut ChaCha8Rng, max_actions: usize, lo: i64, hi: i64, max_den: i64) -> Game {
    let counts = [rng.gen_range(1..=max_actions), rng.gen_range(1..=max_actions)];
    game(rng, &counts, lo, hi, max_den)
}

/// Random distribution; about a third of the entries are zero.
pub fn strategy(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    let mut w: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=7) }).collect();
    if w.iter().all(|&v| v == 0) {
        w[rng.gen_range(0..n)] = 1;
    }
    let total: i64 = w.iter().sum();
    w.into_iter().map(|v| Rational::new(v, total)).collect()
}

pub fn profile(rng: &mut ChaCha8Rng, counts: &[usize]) -> MixedProfile {
    MixedProfile::new(counts.iter().map(|&n| strategy(rng, n)).collect()).unwrap()
}

/// A team game (shared utility 4 per player on action 0) where every entry
/// of every player is then shifted by at most `gamma / 4`. Action 0 stays
/// strictly dominant, so all-zeros is an exact pure Nash equilibrium, and
/// every unilateral change differs across players by at most `gamma`.
pub fn gamma_varied_instance(rng: &mut ChaCha8Rng, m: usize, gamma: &Rational) -> (Game, MixedProfile) {
    let counts: Vec<usize> = (0..m).map(|_| rng.gen_range(2..=3)).collect();
    let shell = Game::new(counts.clone(), vec![vec![Rational::zero(); counts.iter().product()]; m]).unwrap();
    let cells = shell.num_pure_profiles();
    let quarter = gamma / Rational::from(4);
    let utilities = (0..m)
        .map(|_| {
            (0..cells)
                .map(|c| {
                    let zeros = shell.profile_at(c).iter().filter(|&&a| a == 0).count() as i64;
                    Rational::from(4 * zeros) + &quarter * rational(rng, -1, 1, 8)
                })
                .collect()
        })
        .collect();
    let g = Game::new(counts.clone(), utilities).unwrap();
    let x = MixedProfile::pure(&counts, &vec![0; m]).unwrap();
    (g, x)
}

pub fn cnf(rng: &mut ChaCha8Rng, max_vars: usize, max_clauses: usize) -> CnfFormula {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_clauses);
    let clauses = (0..m)
        .map(|_| {
            let mut vars: Vec<i64> = (1..=n as i64).filter(|_| rng.gen_bool(0.5)).collect();
            if vars.is_empty() {
                vars.push(rng.gen_range(1..=n as i64));
            }
            vars.into_iter().map(|v| if rng.gen_bool(0.5) { v } else { -v }).collect()
        })
        .collect();
    CnfFormula::new(n, clauses).unwrap()
}

/// Values of `n` variables encoded in the bits of `bits`, variable 1 first.
pub fn assignment(n: usize, bits: u32) -> Vec<bool> {
    (0..n).map(|v| bits >> (n - 1 - v) & 1 == 1).collect()
}
