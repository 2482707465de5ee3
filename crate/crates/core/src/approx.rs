//! k-uniform approximation searches.
//!
//! A k-uniform strategy is the uniform distribution over a multiset of k
//! actions. Both searches scan every pair of k-uniform strategies in
//! lexicographic order (player 0's multiset outermost).

use std::ops::{Add, ControlFlow, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};
use crate::rational::Rational;
use crate::stability::DeviationTable;

/// Pairs scanned when no budget is given.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KUniformStrategy {
    num_actions: usize,
    multiset: Vec<usize>,
}

impl KUniformStrategy {
    pub fn k(&self) -> usize {
        self.multiset.len()
    }

    /// Non-decreasing 0-based action indices.
    pub fn multiset(&self) -> &[usize] {
        &self.multiset
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.num_actions];
        for &a in &self.multiset {
            c[a] += 1;
        }
        c
    }

    pub fn probabilities(&self) -> Vec<Rational> {
        let k = self.k() as i64;
        self.counts().into_iter().map(|c| Rational::new(c as i64, k)).collect()
    }
}

/// Every multiset of size `k` over `n` actions, in lexicographic order.
pub fn enumerate_k_uniform(n: usize, k: usize) -> impl Iterator<Item = KUniformStrategy> {
    let mut next = (n >= 1 && k >= 1).then(|| vec![0usize; k]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        if let Some(i) = current.iter().rposition(|&a| a + 1 < n) {
            let mut succ = current.clone();
            let v = succ[i] + 1;
            succ[i..].iter_mut().for_each(|a| *a = v);
            next = Some(succ);
        }
        Some(KUniformStrategy {
            num_actions: n,
            multiset: current,
        })
    })
}

/// `C(n + k - 1, k)`, saturating at `u128::MAX`.
pub fn count_k_uniform(n: usize, k: usize) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        // c * (n - 1 + i) / i stays integral at every step
        let Some(num) = c.checked_mul(n as u128 - 1 + i) else {
            return u128::MAX;
        };
        c = num / i;
    }
    c
}

/// Lower and upper rational bounds on `ln(n)` from `terms` terms of the
/// series `ln(y) = 2 atanh((y - 1) / (y + 1))`, after splitting off powers
/// of two so every series argument is at most 1/3.
pub fn ln_bounds(n: u64, terms: usize) -> (Rational, Rational) {
    assert!(n >= 1, "ln of zero");
    let atanh2 = |z: Rational| -> (Rational, Rational) {
        let z2 = &z * &z;
        let mut power = z.clone();
        let mut sum = Rational::zero();
        for j in 0..terms {
            sum += &(&power / Rational::from(2 * j + 1));
            power *= &z2;
        }
        let tail = &power / (Rational::from(2 * terms + 1) * (Rational::one() - &z2));
        let two = Rational::from(2);
        (&sum * &two, (sum + tail) * two)
    };
    let e = 63 - n.leading_zeros();
    let base = BigInt::from(1u64 << e);
    let (lo2, hi2) = atanh2(Rational::new(1, 3));
    let z = Rational::normalize(BigInt::from(n) - &base, BigInt::from(n) + &base).expect("positive denominator");
    let (lo_r, hi_r) = atanh2(z);
    let e = Rational::from(e as i64);
    (&e * &lo2 + lo_r, &e * &hi2 + hi_r)
}

/// `max(1, ceil(3 ln n / eps^2))`, exact: the series is refined until both
/// bounds give the same ceiling.
pub fn k_for(n: usize, eps: &Rational) -> Result<usize> {
    if !eps.is_positive() {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one action".into()));
    }
    let scale = Rational::from(3) / (eps * eps);
    let mut terms = 8;
    let k = loop {
        let (lo, hi) = ln_bounds(n as u64, terms);
        let (klo, khi) = ((&lo * &scale).ceil(), (&hi * &scale).ceil());
        // ln n is irrational for n >= 2, so the bounds eventually agree
        if klo == khi || terms >= 1024 {
            break khi;
        }
        terms *= 2;
    };
    let k = k.to_usize().ok_or_else(|| Error::InvalidArgument(format!("k = {k} is too large")))?;
    Ok(k.max(1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    /// Overrides the k derived from eps.
    pub k: Option<usize>,
    /// Maximum number of strategy pairs examined.
    pub budget: u128,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            k: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxSearchOutcome {
    pub k: usize,
    pub eps: Rational,
    /// Smallest envy gap among k-uniform eps-Nash profiles scanned.
    pub best_envy: Option<Rational>,
    /// Lexicographically first profile attaining `best_envy`.
    pub witness: Option<MixedProfile>,
    /// `C(n0 + k - 1, k) * C(n1 + k - 1, k)`.
    pub num_candidates: u128,
    pub scanned: u128,
    /// `false` when the budget stopped the scan early.
    pub complete: bool,
    /// `max(0, best_envy - 2 eps)` for a complete scan; no Nash equilibrium
    /// is envy-proof within a positive bound. Zero otherwise.
    pub nonexistence_bound: Rational,
    pub found_any: bool,
}

/// Minimum envy gap over k-uniform eps-Nash profiles of `g`.
pub fn approx_envy_nash_search(g: &Game, eps: &Rational, opts: &ScanOptions) -> Result<ApproxSearchOutcome> {
    let scan = Scan::new(g, eps, opts)?;
    let mut best: Option<(Rational, usize, usize)> = None;
    let mut scanned = 0u128;
    let complete = scan.run(g, |i0, i1, gaps| {
        scanned += 1;
        if gaps.nash_ok && best.as_ref().is_none_or(|(b, _, _)| gaps.envy() < *b) {
            best = Some((gaps.envy(), i0, i1));
        }
        ControlFlow::Continue(())
    });
    let (best_envy, witness) = match best {
        Some((envy, i0, i1)) => {
            let x = scan.profile(i0, i1);
            let table = DeviationTable::new(g, &x)?;
            debug_assert!(table.nash().value <= *eps && table.envy().value == envy);
            (Some(envy), Some(x))
        }
        None => (None, None),
    };
    let nonexistence_bound = match (&best_envy, complete) {
        (Some(e), true) => Rational::max_of([&Rational::zero(), &(e - eps * Rational::from(2))]).expect("non-empty"),
        _ => Rational::zero(),
    };
    Ok(ApproxSearchOutcome {
        k: scan.k,
        eps: eps.clone(),
        found_any: best_envy.is_some(),
        best_envy,
        witness,
        num_candidates: scan.num_candidates,
        scanned,
        complete,
        nonexistence_bound,
    })
}

/// First k-uniform eps-Nash profile of the swap-negated game, which is an
/// eps-immune profile of `g`.
pub fn approx_immune_search(g: &Game, eps: &Rational, opts: &ScanOptions) -> Result<MixedProfile> {
    let swapped = g.swap_negate()?;
    let scan = Scan::new(&swapped, eps, opts)?;
    let mut hit = None;
    let complete = scan.run(&swapped, |i0, i1, gaps| {
        if gaps.nash_ok {
            hit = Some((i0, i1));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    match hit {
        Some((i0, i1)) => {
            let x = scan.profile(i0, i1);
            debug_assert!(DeviationTable::new(g, &x)?.immune().value <= *eps);
            Ok(x)
        }
        None if complete => Err(Error::ScanExhausted { k: scan.k }),
        None => Err(Error::BudgetExceeded {
            required: scan.num_candidates,
            budget: opts.budget,
        }),
    }
}

struct Scan {
    k: usize,
    side0: Vec<KUniformStrategy>,
    side1: Vec<KUniformStrategy>,
    num_candidates: u128,
    budget: u128,
    eps: Rational,
}

/// Gaps of one candidate pair, each scaled by a common positive factor.
struct PairGaps<'a> {
    nash_ok: bool,
    envy: &'a dyn Fn() -> Rational,
}

impl PairGaps<'_> {
    fn envy(&self) -> Rational {
        (self.envy)()
    }
}

impl Scan {
    fn new(g: &Game, eps: &Rational, opts: &ScanOptions) -> Result<Self> {
        g.require_two_player()?;
        if !eps.is_positive() {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
        }
        let n = g.action_counts().iter().copied().max().expect("two players");
        let k = match opts.k {
            Some(0) => return Err(Error::InvalidArgument("k must be at least 1".into())),
            Some(k) => k,
            None => k_for(n, eps)?,
        };
        let (n0, n1) = (g.num_actions(0), g.num_actions(1));
        let c0 = count_k_uniform(n0, k);
        let c1 = count_k_uniform(n1, k);
        let num_candidates = c0.saturating_mul(c1);
        // only as many strategies as the budget can reach
        let take = |c: u128| opts.budget.min(c).try_into().unwrap_or(usize::MAX);
        Ok(Scan {
            k,
            side0: enumerate_k_uniform(n0, k).take(take(c0)).collect(),
            side1: enumerate_k_uniform(n1, k).take(take(c1)).collect(),
            num_candidates,
            budget: opts.budget,
            eps: eps.clone(),
        })
    }

    fn profile(&self, i0: usize, i1: usize) -> MixedProfile {
        MixedProfile::new(vec![self.side0[i0].probabilities(), self.side1[i1].probabilities()])
            .expect("k-uniform strategies are distributions")
    }

    /// Visits pairs in order until `visit` breaks or the budget runs out.
    /// Returns whether every candidate was visited.
    fn run(&self, g: &Game, visit: impl FnMut(usize, usize, &PairGaps) -> ControlFlow<()>) -> bool {
        match IntegerForm::of(g, self.k, &self.eps) {
            Some(int) => self.run_with(&int.u0, &int.u1, &int.lhs_factor, &int.rhs, &int.scale, visit),
            None => {
                let k2 = Rational::from((self.k * self.k) as i64);
                let m0 = g.matrix(0);
                let m1 = g.matrix(1);
                self.run_with(&m0, &m1, &Rational::one(), &(&self.eps * &k2), &k2, visit)
            }
        }
    }

    /// Core scan over count vectors. With counts `c0, c1` every gap below is
    /// the true gap times `scale`; the eps-Nash test is
    /// `nash * lhs_factor <= rhs`.
    fn run_with<T>(
        &self,
        u0: &[Vec<T>],
        u1: &[Vec<T>],
        lhs_factor: &T,
        rhs: &T,
        scale: &T,
        mut visit: impl FnMut(usize, usize, &PairGaps) -> ControlFlow<()>,
    ) -> bool
    where
        T: Clone + Ord + From<i64> + ToRational + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
    {
        let k = T::from(self.k as i64);
        let dot = |row: &[T], c: &[usize]| -> T {
            row.iter()
                .zip(c)
                .filter(|(_, &c)| c > 0)
                .fold(T::from(0), |acc, (v, &c)| acc + v.clone() * T::from(c as i64))
        };
        let col_dot = |m: &[Vec<T>], j: usize, c: &[usize]| -> T {
            m.iter()
                .zip(c)
                .filter(|(_, &c)| c > 0)
                .fold(T::from(0), |acc, (row, &c)| acc + row[j].clone() * T::from(c as i64))
        };
        // per player-1 strategy: (counts, own0, other0)
        let inner: Vec<(Vec<usize>, Vec<T>, Vec<T>)> = self
            .side1
            .iter()
            .map(|s| {
                let c = s.counts();
                let own0 = u0.iter().map(|r| dot(r, &c)).collect();
                let other0 = u1.iter().map(|r| dot(r, &c)).collect();
                (c, own0, other0)
            })
            .collect();
        let n1 = u0[0].len();
        let mut remaining = self.budget;
        for (i0, s0) in self.side0.iter().enumerate() {
            let c0 = s0.counts();
            let own1: Vec<T> = (0..n1).map(|j| col_dot(u1, j, &c0)).collect();
            let other1: Vec<T> = (0..n1).map(|j| col_dot(u0, j, &c0)).collect();
            for (i1, (_, own0, other0)) in inner.iter().enumerate() {
                if remaining == 0 {
                    return false;
                }
                remaining -= 1;
                let base0 = dot(own0, &c0);
                let base1 = dot(other0, &c0);
                let dev = |v: &T, base: &T| k.clone() * v.clone() - base.clone();
                let nash = own0
                    .iter()
                    .map(|v| dev(v, &base0))
                    .chain(own1.iter().map(|v| dev(v, &base1)))
                    .max()
                    .expect("non-empty");
                let envy = || {
                    let e0 = own0.iter().zip(other0).map(|(o, t)| dev(o, &base0) - dev(t, &base1));
                    let e1 = own1.iter().zip(&other1).map(|(o, t)| dev(o, &base1) - dev(t, &base0));
                    let e = e0.chain(e1).max().expect("non-empty");
                    e.to_rational() / scale.to_rational()
                };
                let gaps = PairGaps {
                    nash_ok: nash * lhs_factor.clone() <= *rhs,
                    envy: &envy,
                };
                if visit(i0, i1, &gaps).is_break() {
                    return true;
                }
            }
        }
        true
    }
}

trait ToRational {
    fn to_rational(&self) -> Rational;
}

impl ToRational for i128 {
    fn to_rational(&self) -> Rational {
        Rational::from_integer(*self)
    }
}

impl ToRational for Rational {
    fn to_rational(&self) -> Rational {
        self.clone()
    }
}

/// The game scaled to integers by the common denominator `d` of its
/// entries, when every intermediate of the scan fits comfortably in `i128`.
struct IntegerForm {
    u0: Vec<Vec<i128>>,
    u1: Vec<Vec<i128>>,
    /// eps = p/q: the test `nash_scaled <= eps * k^2 * d` becomes
    /// `nash_scaled * q <= p * k^2 * d`.
    lhs_factor: i128,
    rhs: i128,
    scale: i128,
}

impl IntegerForm {
    fn of(g: &Game, k: usize, eps: &Rational) -> Option<Self> {
        let entries = g.tensor(0).iter().chain(g.tensor(1));
        let d = entries.clone().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scaled = |v: &Rational| v.numer() * (&d / v.denom());
        let max = entries.map(|v| scaled(v).abs()).max().unwrap_or_default();
        let n = g.action_counts().iter().copied().max()? as u64;
        let k2 = BigInt::from(k as u64).pow(2);
        // deviation terms reach k^2 * n * max; gaps are differences of four
        let gap_bound = &k2 * BigInt::from(n) * &max * 4u8;
        let limit = BigInt::from(i128::MAX >> 8);
        let lhs = eps.denom().clone();
        let rhs = eps.numer() * &k2 * &d;
        if &gap_bound * &lhs > limit || rhs.abs() > limit {
            return None;
        }
        let to_matrix = |p: usize| -> Vec<Vec<i128>> {
            g.matrix(p)
                .iter()
                .map(|r| r.iter().map(|v| scaled(v).to_i128().expect("bounded above")).collect())
                .collect()
        };
        Some(IntegerForm {
            u0: to_matrix(0),
            u1: to_matrix(1),
            lhs_factor: lhs.to_i128()?,
            rhs: rhs.to_i128()?,
            scale: (k2 * d).to_i128()?,
        })
    }
}
