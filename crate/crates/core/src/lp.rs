//! Exact rational linear programming.
//!
//! Dense two-phase tableau simplex with Bland's rule. Phase 1 minimizes the
//! sum of artificial variables; no big-M constant is ever introduced.
//! Bland's rule guarantees termination on degenerate programs.

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// Per-variable bounds; `None` means unbounded on that side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bound {
    pub fn nonnegative() -> Self {
        Bound {
            lower: Some(Rational::zero()),
            upper: None,
        }
    }

    pub fn free() -> Self {
        Bound {
            lower: None,
            upper: None,
        }
    }

    pub fn between(lower: Rational, upper: Rational) -> Self {
        Bound {
            lower: Some(lower),
            upper: Some(upper),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bound>,
}

impl LinearProgram {
    /// All variables start non-negative.
    pub fn new(sense: Sense, objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            sense,
            objective,
            constraints: Vec::new(),
            bounds: vec![Bound::nonnegative(); n],
        }
    }

    /// Zero objective over `num_vars` non-negative variables.
    pub fn feasibility(num_vars: usize) -> Self {
        LinearProgram::new(Sense::Minimize, vec![Rational::zero(); num_vars])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn bound(&mut self, var: usize, bound: Bound) -> &mut Self {
        self.bounds[var] = bound;
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(Error::Shape(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        if let Some(i) = self.constraints.iter().position(|c| c.coeffs.len() != n) {
            return Err(Error::Shape(format!(
                "constraint {i} has {} coefficients, expected {n}",
                self.constraints[i].coeffs.len()
            )));
        }
        Ok(())
    }

    /// Exact check of every constraint and bound at `point`.
    pub fn is_satisfied_by(&self, point: &[Rational]) -> bool {
        if point.len() != self.num_vars() {
            return false;
        }
        let bounds_ok = self.bounds.iter().zip(point).all(|(b, x)| {
            b.lower.as_ref().is_none_or(|l| x >= l) && b.upper.as_ref().is_none_or(|u| x <= u)
        });
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn objective_at(&self, point: &[Rational]) -> Rational {
        self.objective.iter().zip(point).map(|(c, x)| c * x).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// Optimal point, or a feasible point when unbounded.
    pub point: Option<Vec<Rational>>,
    pub value: Option<Rational>,
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn is_feasible(&self) -> bool {
        self.status != LpStatus::Infeasible
    }
}

/// How an original variable is expressed in non-negative tableau columns:
/// `x = offset + sum(sign * column)`.
struct VarMap {
    offset: Rational,
    terms: Vec<(usize, bool)>,
}

struct Tableau {
    /// Each row holds `ncols` coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [Rational]) {
        let inv = self.rows[r][c].recip().expect("pivot element is non-zero");
        for v in self.rows[r].iter_mut().filter(|v| !v.is_zero()) {
            *v *= &inv;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut [Rational]| {
            let f = row[c].clone();
            if !f.is_zero() {
                for &j in &nz {
                    row[j] -= &(&f * &pivot_row[j]);
                }
            }
        };
        for row in self.rows.iter_mut().filter(|row| !row.is_empty()) {
            eliminate(row);
        }
        eliminate(obj);
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Reduced-cost row for minimizing `cost` from the current basis. The
    /// last entry is minus the current objective value.
    fn objective_row(&self, cost: &[Rational]) -> Vec<Rational> {
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.push(Rational::zero());
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[b];
            if !cb.is_zero() {
                for (o, v) in obj.iter_mut().zip(row) {
                    if !v.is_zero() {
                        *o -= &(cb * v);
                    }
                }
            }
        }
        obj
    }

    /// Minimizes with Bland's rule over the allowed columns. Returns `false`
    /// when the objective is unbounded below.
    fn minimize(&mut self, obj: &mut [Rational], allowed: &[bool]) -> bool {
        loop {
            let Some(enter) = (0..self.ncols).find(|&j| allowed[j] && obj[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &leave {
                    None => true,
                    Some((best_r, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*best_r])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter, obj),
                None => return false,
            }
        }
    }

    fn column_values(&self) -> Vec<Rational> {
        let mut values = vec![Rational::zero(); self.ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            values[b] = self.rhs(r).clone();
        }
        values
    }
}

/// Solves `lp` exactly.
pub fn simplex_solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();

    // Substitute bounded/free variables with non-negative columns.
    let mut maps = Vec::with_capacity(n);
    let mut structural = 0usize;
    let mut extra_rows: Vec<(usize, Rational)> = Vec::new();
    for b in &lp.bounds {
        match (&b.lower, &b.upper) {
            (Some(l), upper) => {
                let col = structural;
                structural += 1;
                if let Some(u) = upper {
                    extra_rows.push((col, u - l));
                }
                maps.push(VarMap {
                    offset: l.clone(),
                    terms: vec![(col, true)],
                });
            }
            (None, Some(u)) => {
                maps.push(VarMap {
                    offset: u.clone(),
                    terms: vec![(structural, false)],
                });
                structural += 1;
            }
            (None, None) => {
                maps.push(VarMap {
                    offset: Rational::zero(),
                    terms: vec![(structural, true), (structural + 1, false)],
                });
                structural += 2;
            }
        }
    }

    // Rows over structural columns, with rhs made non-negative.
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
    for c in &lp.constraints {
        let mut coeffs = vec![Rational::zero(); structural];
        let mut rhs = c.rhs.clone();
        for (a, map) in c.coeffs.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            rhs -= &(a * &map.offset);
            for &(col, positive) in &map.terms {
                if positive {
                    coeffs[col] += a;
                } else {
                    coeffs[col] -= a;
                }
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for (col, cap) in extra_rows {
        let mut coeffs = vec![Rational::zero(); structural];
        coeffs[col] = Rational::one();
        rows.push((coeffs, Relation::Le, cap));
    }
    for (coeffs, rel, rhs) in rows.iter_mut() {
        if rhs.is_negative() {
            for v in coeffs.iter_mut() {
                *v = -&*v;
            }
            *rhs = -&*rhs;
            *rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let num_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let num_art = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let ncols = structural + num_slack + num_art;
    let art_start = structural + num_slack;

    let mut tableau = Tableau {
        rows: Vec::with_capacity(rows.len()),
        basis: Vec::with_capacity(rows.len()),
        ncols,
    };
    let (mut slack, mut art) = (structural, art_start);
    for (coeffs, rel, rhs) in rows {
        let mut row = coeffs;
        row.resize(ncols + 1, Rational::zero());
        row[ncols] = rhs;
        match rel {
            Relation::Le => {
                row[slack] = Rational::one();
                tableau.basis.push(slack);
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -Rational::one();
                slack += 1;
                row[art] = Rational::one();
                tableau.basis.push(art);
                art += 1;
            }
            Relation::Eq => {
                row[art] = Rational::one();
                tableau.basis.push(art);
                art += 1;
            }
        }
        tableau.rows.push(row);
    }

    let is_art = |j: usize| j >= art_start;
    if num_art > 0 {
        let cost: Vec<Rational> =
            (0..ncols).map(|j| if is_art(j) { Rational::one() } else { Rational::zero() }).collect();
        let mut obj = tableau.objective_row(&cost);
        let allowed = vec![true; ncols];
        tableau.minimize(&mut obj, &allowed);
        if !obj[ncols].is_zero() {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                point: None,
                value: None,
            });
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tableau.rows.len() {
            if is_art(tableau.basis[r]) {
                if let Some(j) = (0..art_start).find(|&j| !tableau.rows[r][j].is_zero()) {
                    tableau.pivot(r, j, &mut obj);
                } else {
                    tableau.rows.remove(r);
                    tableau.basis.remove(r);
                    continue;
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![Rational::zero(); ncols];
    for (c, map) in lp.objective.iter().zip(&maps) {
        let c = match lp.sense {
            Sense::Minimize => c.clone(),
            Sense::Maximize => -c,
        };
        for &(col, positive) in &map.terms {
            cost[col] = if positive { c.clone() } else { -&c };
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| !is_art(j)).collect();
    let mut obj = tableau.objective_row(&cost);
    let bounded = tableau.minimize(&mut obj, &allowed);

    let values = tableau.column_values();
    let point: Vec<Rational> = maps
        .iter()
        .map(|m| {
            m.terms.iter().fold(m.offset.clone(), |acc, &(col, positive)| {
                if positive {
                    acc + &values[col]
                } else {
                    acc - &values[col]
                }
            })
        })
        .collect();
    debug_assert!(lp.is_satisfied_by(&point));

    if !bounded {
        return Ok(LpOutcome {
            status: LpStatus::Unbounded,
            point: Some(point),
            value: None,
        });
    }
    let value = lp.objective_at(&point);
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        point: Some(point),
        value: Some(value),
    })
}

/// Feasibility of the constraints and bounds of `lp`, ignoring its objective.
pub fn feasibility(lp: &LinearProgram) -> Result<LpOutcome> {
    let mut zero = lp.clone();
    zero.sense = Sense::Minimize;
    zero.objective = vec![Rational::zero(); lp.num_vars()];
    simplex_solve(&zero)
}

/// Value and a maximin distribution for the row player of the zero-sum game
/// with payoff matrix `payoff` (rows: maximizer's actions).
///
/// Solved as `max z s.t. x^T M >= z 1^T, sum(x) = 1, x >= 0` with `z` free.
pub fn zero_sum_value(payoff: &[Vec<Rational>]) -> Result<(Rational, Vec<Rational>)> {
    let rows = payoff.len();
    let cols = payoff.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || payoff.iter().any(|r| r.len() != cols) {
        return Err(Error::Shape("zero-sum payoff must be a non-empty rectangular matrix".into()));
    }
    let lp = maximin_program(payoff);
    let out = simplex_solve(&lp)?;
    match (out.status, out.point, out.value) {
        (LpStatus::Optimal, Some(mut point), Some(value)) => {
            point.truncate(rows);
            Ok((value, point))
        }
        (status, _, _) => unreachable!("maximin program is always bounded and feasible, got {status:?}"),
    }
}

/// The maximin program over variables `(x_0, .., x_{r-1}, z)`.
pub(crate) fn maximin_program(payoff: &[Vec<Rational>]) -> LinearProgram {
    let rows = payoff.len();
    let cols = payoff[0].len();
    let mut objective = vec![Rational::zero(); rows + 1];
    objective[rows] = Rational::one();
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    lp.bound(rows, Bound::free());
    for j in 0..cols {
        let mut coeffs: Vec<Rational> = payoff.iter().map(|r| r[j].clone()).collect();
        coeffs.push(-Rational::one());
        lp.constrain(coeffs, Relation::Ge, Rational::zero());
    }
    let mut simplex = vec![Rational::one(); rows];
    simplex.push(Rational::zero());
    lp.constrain(simplex, Relation::Eq, Rational::one());
    lp
}

/// Rank of a rational matrix by exact Gaussian elimination.
pub fn rank(matrix: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = matrix.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip().expect("non-zero pivot");
        let pivot_row = m[rank].clone();
        for r in (rank + 1)..m.len() {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] * &inv;
            for j in c..cols {
                let delta = &f * &pivot_row[j];
                m[r][j] -= &delta;
            }
        }
        rank += 1;
    }
    rank
}
