//! CNF formulas and the symmetric two-player game built from them, whose
//! envy-proof Nash equilibria (other than the default `(f, f)`) correspond to
//! satisfying assignments.

use std::collections::BTreeSet;

use crate::error::{parse_err, Error, Result};
use crate::game::{Game, MixedProfile};
use crate::rational::Rational;
use crate::stability::DeviationTable;

/// A literal is a signed 1-based variable index, as in DIMACS.
pub type Literal = i64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Literal>>,
}

impl CnfFormula {
    /// Validates and normalizes: duplicate literals inside a clause are
    /// dropped (first occurrence kept); empty and tautological clauses are
    /// rejected.
    pub fn new(num_vars: usize, clauses: Vec<Vec<Literal>>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidArgument("formula needs at least one variable".into()));
        }
        let mut out = Vec::with_capacity(clauses.len());
        for (c, clause) in clauses.into_iter().enumerate() {
            let mut seen = Vec::with_capacity(clause.len());
            for lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::InvalidArgument(format!(
                        "clause {}: literal {lit} out of range 1..={num_vars}",
                        c + 1
                    )));
                }
                if seen.contains(&-lit) {
                    return Err(Error::InvalidArgument(format!(
                        "clause {} contains both {lit} and {}",
                        c + 1,
                        -lit
                    )));
                }
                if !seen.contains(&lit) {
                    seen.push(lit);
                }
            }
            if seen.is_empty() {
                return Err(Error::InvalidArgument(format!("clause {} is empty", c + 1)));
            }
            out.push(seen);
        }
        Ok(CnfFormula { num_vars, clauses: out })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Literal>] {
        &self.clauses
    }

    /// `assignment[v]` is the value of variable `v + 1`.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&format!("{l} "));
            }
            s.push_str("0\n");
        }
        s
    }
}

/// Parses DIMACS CNF. Comment lines start with `c`; clauses may span lines
/// and must each end with `0`; a `%` line ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<(usize, Vec<Literal>)> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    let mut current_line = 0;
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        last_line = line_no;
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(parse_err(line_no, "duplicate problem line"));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let (n, m) = match parts.as_slice() {
                ["p", "cnf", n, m] => (n.parse::<usize>().ok(), m.parse::<usize>().ok()),
                _ => (None, None),
            };
            match (n, m) {
                (Some(n), Some(m)) => header = Some((n, m)),
                _ => return Err(parse_err(line_no, format!("malformed problem line {line:?}"))),
            }
            continue;
        }
        let Some((n, _)) = header else {
            return Err(parse_err(line_no, "clause before the `p cnf` problem line"));
        };
        for tok in line.split_whitespace() {
            let lit: Literal = tok
                .parse()
                .map_err(|_| parse_err(line_no, format!("not a literal: {tok:?}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(parse_err(line_no, "empty clause"));
                }
                clauses.push((current_line, std::mem::take(&mut current)));
                continue;
            }
            if lit.unsigned_abs() as usize > n {
                return Err(parse_err(line_no, format!("variable {} out of range 1..={n}", lit.unsigned_abs())));
            }
            if current.is_empty() {
                current_line = line_no;
            }
            current.push(lit);
        }
    }
    let Some((n, m)) = header else {
        return Err(parse_err(last_line.max(1), "missing `p cnf` problem line"));
    };
    if !current.is_empty() {
        return Err(parse_err(current_line, "clause not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(parse_err(last_line.max(1), format!("header declares {m} clauses, found {}", clauses.len())));
    }
    if n == 0 {
        return Err(parse_err(1, "formula needs at least one variable"));
    }
    for (line, clause) in &clauses {
        if clause.iter().any(|l| clause.contains(&-l)) {
            return Err(parse_err(*line, "tautological clause"));
        }
    }
    CnfFormula::new(n, clauses.into_iter().map(|(_, c)| c).collect())
}

/// An action of the gadget game.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    /// 1-based variable.
    Var(usize),
    Lit(Literal),
    /// 0-based clause index.
    Clause(usize),
    Default,
}

/// Literals of a variable (both signs) or of a clause.
pub fn lit_set(phi: &CnfFormula, item: Item) -> Result<BTreeSet<Literal>> {
    match item {
        Item::Var(v) if (1..=phi.num_vars).contains(&v) => Ok([v as Literal, -(v as Literal)].into()),
        Item::Clause(c) if c < phi.clauses.len() => Ok(phi.clauses[c].iter().copied().collect()),
        other => Err(Error::InvalidArgument(format!("no literal set for {other:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetGame {
    pub game: Game,
    pub beta: Rational,
    pub items: Vec<Item>,
    formula: CnfFormula,
}

impl GadgetGame {
    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn action_of(&self, item: Item) -> Option<usize> {
        self.items.iter().position(|&i| i == item)
    }
}

fn label(item: Item) -> String {
    match item {
        Item::Var(v) => format!("x{v}"),
        Item::Lit(l) if l > 0 => format!("+x{l}"),
        Item::Lit(l) => format!("-x{}", -l),
        Item::Clause(c) => format!("c{}", c + 1),
        Item::Default => "f".into(),
    }
}

/// Builds the gadget with `beta = -n`. Actions: variables, then
/// `+x1, -x1, .., +xn, -xn`, then clauses in input order, then `f`.
pub fn build_game(phi: &CnfFormula) -> GadgetGame {
    let n = phi.num_vars as i64;
    let mut items: Vec<Item> = (1..=phi.num_vars).map(Item::Var).collect();
    for v in 1..=n {
        items.extend([Item::Lit(v), Item::Lit(-v)]);
    }
    items.extend((0..phi.clauses.len()).map(Item::Clause));
    items.push(Item::Default);

    let beta = -n;
    let sets: Vec<Option<BTreeSet<Literal>>> = items.iter().map(|&i| lit_set(phi, i).ok()).collect();
    // u_0(a, b); the game is symmetric, u_1(a, b) = u_0(b, a)
    let u0 = |a: usize, b: usize| -> i64 {
        match (items[a], items[b]) {
            (Item::Lit(l0), Item::Lit(l1)) => {
                if l0 == -l1 {
                    beta
                } else {
                    n - 1
                }
            }
            (Item::Default, Item::Default) => n + 2,
            (Item::Default, Item::Lit(_)) => n - 1,
            (Item::Default, _) => n,
            (Item::Lit(_), Item::Default) => n - 1,
            (_, Item::Default) => n + 1,
            (Item::Lit(l), _) => {
                if sets[b].as_ref().is_some_and(|s| s.contains(&l)) {
                    2 * (n - 1)
                } else {
                    n - 2
                }
            }
            (_, Item::Lit(l)) => {
                if sets[a].as_ref().is_some_and(|s| s.contains(&l)) {
                    0
                } else {
                    n
                }
            }
            _ => beta,
        }
    };
    let size = items.len();
    let m0: Vec<Vec<Rational>> = (0..size).map(|a| (0..size).map(|b| Rational::from(u0(a, b))).collect()).collect();
    let m1: Vec<Vec<Rational>> = (0..size).map(|a| (0..size).map(|b| Rational::from(u0(b, a))).collect()).collect();
    let labels: Vec<String> = items.iter().map(|&i| label(i)).collect();
    let game = Game::bimatrix(&m0, &m1)
        .and_then(|g| g.with_labels(vec![labels.clone(), labels]))
        .expect("gadget dimensions are consistent");
    GadgetGame {
        game,
        beta: Rational::from(beta),
        items,
        formula: phi.clone(),
    }
}

/// Both players uniform over the literal actions of `assignment`, which must
/// name every variable exactly once.
pub fn assignment_to_profile(gadget: &GadgetGame, assignment: &[Literal]) -> Result<MixedProfile> {
    let n = gadget.formula.num_vars;
    let mut chosen = vec![None; n];
    for &lit in assignment {
        if lit == 0 || lit.unsigned_abs() as usize > n {
            return Err(Error::InvalidArgument(format!("literal {lit} out of range 1..={n}")));
        }
        let v = lit.unsigned_abs() as usize - 1;
        if chosen[v].is_some_and(|l| l != lit) {
            return Err(Error::InvalidArgument(format!("contradictory literals for variable {}", v + 1)));
        }
        chosen[v] = Some(lit);
    }
    if let Some(v) = chosen.iter().position(Option::is_none) {
        return Err(Error::InvalidArgument(format!("variable {} is unassigned", v + 1)));
    }
    let size = gadget.items.len();
    let mut s = vec![Rational::zero(); size];
    let weight = Rational::new(1, n as i64);
    for lit in chosen.into_iter().flatten() {
        let a = gadget.action_of(Item::Lit(lit)).expect("every literal is an action");
        s[a] = weight.clone();
    }
    MixedProfile::new(vec![s.clone(), s])
}

/// Literal form of a boolean assignment (`values[v]` for variable `v + 1`).
pub fn literals_of(values: &[bool]) -> Vec<Literal> {
    values
        .iter()
        .enumerate()
        .map(|(v, &b)| if b { v as Literal + 1 } else { -(v as Literal + 1) })
        .collect()
}

/// Scans all assignments and returns the first whose literal-uniform profile
/// is an envy-proof Nash equilibrium of the gadget. Assignments are visited
/// in binary order with variable 1 most significant and `false` first.
pub fn satisfying_assignment_via_gadget(gadget: &GadgetGame) -> Result<Option<Vec<bool>>> {
    let n = gadget.formula.num_vars;
    if n > 20 {
        return Err(Error::InvalidArgument(format!("{n} variables is beyond the exhaustive scan limit of 20")));
    }
    let u0 = gadget.game.matrix(0);
    let u1 = gadget.game.matrix(1);
    for bits in 0u32..(1 << n) {
        let values: Vec<bool> = (0..n).map(|v| bits >> (n - 1 - v) & 1 == 1).collect();
        let x = assignment_to_profile(gadget, &literals_of(&values))?;
        let table = DeviationTable::from_matrices(&u0, &u1, x.strategy(0), x.strategy(1));
        if table.nash().value.is_zero() && table.envy().value.is_zero() {
            return Ok(Some(values));
        }
    }
    Ok(None)
}
