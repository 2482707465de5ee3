//! Normal-form games, mixed profiles, and the game transformations used by
//! the reductions (swap-negate, difference game, paired zero-sum games).
//!
//! Utilities are dense tensors over pure profiles in row-major order: the
//! last player's action index varies fastest.
//!
//! # File formats
//!
//! Game file:
//!
//! ```text
//! # comments run to end of line
//! players: 2
//! actions: 2 2
//! labels 0: movie shopping      # optional, one per player
//! utility 0:
//! 4 1
//! 3 3
//! utility 1:
//! 4 3
//! 1 3
//! ```
//!
//! Profile file: a `profile:` line followed by one probability vector per
//! player. All numbers use the `p/q` (or bare integer) literal form.

use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::rational::{format_vector, Rational};

/// A finite game in normal form with `m >= 2` players.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Game {
    action_counts: Vec<usize>,
    strides: Vec<usize>,
    utilities: Vec<Vec<Rational>>,
    labels: Option<Vec<Vec<String>>>,
}

/// One action index per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PureProfile(pub Vec<usize>);

/// A product distribution: one probability vector per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MixedProfile {
    strategies: Vec<Vec<Rational>>,
}

fn strides_for(action_counts: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; action_counts.len()];
    for i in (0..action_counts.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * action_counts[i + 1];
    }
    strides
}

impl Game {
    pub fn new(action_counts: Vec<usize>, utilities: Vec<Vec<Rational>>) -> Result<Self> {
        if action_counts.len() < 2 {
            return Err(Error::Shape(format!(
                "a game needs at least 2 players, got {}",
                action_counts.len()
            )));
        }
        if let Some(p) = action_counts.iter().position(|&n| n == 0) {
            return Err(Error::Shape(format!("player {p} has no actions")));
        }
        if utilities.len() != action_counts.len() {
            return Err(Error::Shape(format!(
                "expected {} utility tensors, got {}",
                action_counts.len(),
                utilities.len()
            )));
        }
        let size: usize = action_counts.iter().product();
        for (i, u) in utilities.iter().enumerate() {
            if u.len() != size {
                return Err(Error::Shape(format!(
                    "utility tensor of player {i} has {} entries, expected {size}",
                    u.len()
                )));
            }
        }
        Ok(Game {
            strides: strides_for(&action_counts),
            action_counts,
            utilities,
            labels: None,
        })
    }

    /// Two-player game from row-player and column-player matrices
    /// (rows are player 0's actions).
    pub fn bimatrix(u0: &[Vec<Rational>], u1: &[Vec<Rational>]) -> Result<Self> {
        let rows = u0.len();
        let cols = u0.first().map_or(0, Vec::len);
        let ragged = |m: &[Vec<Rational>]| m.len() != rows || m.iter().any(|r| r.len() != cols);
        if ragged(u0) || ragged(u1) {
            return Err(Error::Shape("bimatrix payoffs must be two equal-shape matrices".into()));
        }
        Game::new(
            vec![rows, cols],
            vec![u0.concat(), u1.concat()],
        )
    }

    /// Attaches action labels; one list per player, each matching its action count.
    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.num_players()
            || labels.iter().zip(&self.action_counts).any(|(l, &n)| l.len() != n)
        {
            return Err(Error::Shape("labels do not match action counts".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    /// Label for an action, falling back to its index.
    pub fn action_name(&self, player: usize, action: usize) -> String {
        match &self.labels {
            Some(l) => l[player][action].clone(),
            None => action.to_string(),
        }
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.action_counts[player]
    }

    pub fn num_pure_profiles(&self) -> usize {
        self.utilities[0].len()
    }

    pub fn index_of(&self, actions: &[usize]) -> usize {
        actions.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn profile_at(&self, mut index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|s| {
                let a = index / s;
                index %= s;
                a
            })
            .collect()
    }

    pub fn stride(&self, player: usize) -> usize {
        self.strides[player]
    }

    /// Flat utility tensor of one player.
    pub fn tensor(&self, player: usize) -> &[Rational] {
        &self.utilities[player]
    }

    pub fn utility(&self, player: usize, actions: &[usize]) -> &Rational {
        &self.utilities[player][self.index_of(actions)]
    }

    pub fn is_two_player(&self) -> bool {
        self.num_players() == 2
    }

    pub(crate) fn require_two_player(&self) -> Result<()> {
        if self.is_two_player() {
            Ok(())
        } else {
            Err(Error::NotTwoPlayer(self.num_players()))
        }
    }

    /// Payoff matrix of `player` in a two-player game, rows indexed by
    /// player 0's actions.
    pub fn matrix(&self, player: usize) -> Vec<Vec<Rational>> {
        debug_assert!(self.is_two_player());
        self.utilities[player]
            .chunks(self.action_counts[1])
            .map(<[Rational]>::to_vec)
            .collect()
    }

    /// Applies `f(player, utility)` entry-wise, keeping shape and labels.
    pub fn map(&self, f: impl Fn(usize, &Rational) -> Rational) -> Game {
        Game {
            action_counts: self.action_counts.clone(),
            strides: self.strides.clone(),
            utilities: self
                .utilities
                .iter()
                .enumerate()
                .map(|(i, u)| u.iter().map(|v| f(i, v)).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }

    fn with_utilities(&self, utilities: Vec<Vec<Rational>>) -> Game {
        Game {
            action_counts: self.action_counts.clone(),
            strides: self.strides.clone(),
            utilities,
            labels: self.labels.clone(),
        }
    }

    /// `G' = (-u_1, -u_0)`. Nash equilibria of `G'` are exactly the immune
    /// profiles of `G`.
    pub fn swap_negate(&self) -> Result<Game> {
        self.require_two_player()?;
        let neg = |u: &Vec<Rational>| u.iter().map(|v| -v).collect::<Vec<_>>();
        Ok(self.with_utilities(vec![neg(&self.utilities[1]), neg(&self.utilities[0])]))
    }

    /// `G' = (u_0 - u_1, u_1 - u_0)`. Nash equilibria of this zero-sum game
    /// are exactly the envy-proof profiles of `G`.
    pub fn difference_game(&self) -> Result<Game> {
        self.require_two_player()?;
        let d: Vec<Rational> = self.utilities[0]
            .iter()
            .zip(&self.utilities[1])
            .map(|(a, b)| a - b)
            .collect();
        let nd = d.iter().map(|v| -v).collect();
        Ok(self.with_utilities(vec![d, nd]))
    }

    /// Zero-sum game where `player` keeps `u_player` and the opponent gets
    /// `-u_player`.
    pub fn paired_zero_sum(&self, player: usize) -> Result<Game> {
        self.require_two_player()?;
        if player > 1 {
            return Err(Error::InvalidArgument(format!("no player {player} in a two-player game")));
        }
        let own = self.utilities[player].clone();
        let neg: Vec<Rational> = own.iter().map(|v| -v).collect();
        let utilities = if player == 0 { vec![own, neg] } else { vec![neg, own] };
        Ok(self.with_utilities(utilities))
    }

    /// Affine rescale of all utilities (one map shared by every player) onto
    /// `[0, 1]`. Returns the rescaled game and the positive scale factor
    /// applied; gaps in the new game equal the old gaps times that factor.
    /// A constant game maps to the zero game with factor 1.
    pub fn normalized_unit(&self) -> (Game, Rational) {
        let all = self.utilities.iter().flatten();
        let lo = all.clone().min().cloned().unwrap_or_default();
        let hi = all.max().cloned().unwrap_or_default();
        let span = &hi - &lo;
        if span.is_zero() {
            return (self.map(|_, _| Rational::zero()), Rational::one());
        }
        let scale = Rational::one() / &span;
        (self.map(|_, v| (v - &lo) * &scale), scale)
    }

    /// Expected utility of every player when the coordinates in `fixed` that
    /// are `Some` are replaced by that pure action.
    pub fn utilities_with(&self, x: &MixedProfile, fixed: &[Option<usize>]) -> Vec<Rational> {
        let m = self.num_players();
        // Per player, the (action, probability) pairs with non-zero mass.
        let supports: Vec<Vec<(usize, Rational)>> = (0..m)
            .map(|p| match fixed.get(p).copied().flatten() {
                Some(a) => vec![(a, Rational::one())],
                None => x.strategies[p]
                    .iter()
                    .enumerate()
                    .filter(|(_, q)| !q.is_zero())
                    .map(|(a, q)| (a, q.clone()))
                    .collect(),
            })
            .collect();
        let mut totals = vec![Rational::zero(); m];
        let mut cursor = vec![0usize; m];
        loop {
            let mut weight = Rational::one();
            let mut index = 0;
            for p in 0..m {
                let (a, q) = &supports[p][cursor[p]];
                index += a * self.strides[p];
                weight *= q;
            }
            for (p, total) in totals.iter_mut().enumerate() {
                *total += &weight * &self.utilities[p][index];
            }
            // odometer, last player fastest
            let mut p = m;
            loop {
                if p == 0 {
                    return totals;
                }
                p -= 1;
                cursor[p] += 1;
                if cursor[p] < supports[p].len() {
                    break;
                }
                cursor[p] = 0;
            }
        }
    }

    /// Exact expected utility `u_i(x)` of `player` under the product distribution.
    pub fn expected_utility(&self, x: &MixedProfile, player: usize) -> Result<Rational> {
        x.check_shape(self)?;
        self.check_player(player)?;
        Ok(self.utilities_with(x, &[]).swap_remove(player))
    }

    /// `u_j(x_{-S} : x'_S)`: the observer's expected utility when every player
    /// in `deviators` switches to the matching pure action in `dev_actions`.
    pub fn deviation_value(
        &self,
        x: &MixedProfile,
        deviators: &[usize],
        dev_actions: &[usize],
        observer: usize,
    ) -> Result<Rational> {
        x.check_shape(self)?;
        self.check_player(observer)?;
        if deviators.is_empty() {
            return Err(Error::InvalidArgument("deviating coalition is empty".into()));
        }
        if deviators.len() != dev_actions.len() {
            return Err(Error::InvalidArgument(format!(
                "{} deviators but {} deviation actions",
                deviators.len(),
                dev_actions.len()
            )));
        }
        let mut fixed = vec![None; self.num_players()];
        for (&p, &a) in deviators.iter().zip(dev_actions) {
            self.check_player(p)?;
            if a >= self.action_counts[p] {
                return Err(Error::InvalidArgument(format!(
                    "action {a} out of range for player {p}"
                )));
            }
            if fixed[p].replace(a).is_some() {
                return Err(Error::InvalidArgument(format!("player {p} listed twice")));
            }
        }
        Ok(self.utilities_with(x, &fixed).swap_remove(observer))
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player < self.num_players() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("no player {player}")))
        }
    }

    /// Reads the line-oriented game format.
    pub fn parse(text: &str) -> Result<Game> {
        let mut players: Option<usize> = None;
        let mut actions: Option<Vec<usize>> = None;
        let mut labels: Vec<Option<Vec<String>>> = Vec::new();
        let mut tensors: Vec<Option<Vec<Rational>>> = Vec::new();
        let mut current: Option<usize> = None;
        let mut last_line = 0;

        let header_index = |rest: &str, kw: &str, line: usize, m: usize| -> Result<usize> {
            let idx: usize = rest
                .trim()
                .parse()
                .map_err(|_| parse_err(line, format!("bad player index in `{kw}` header")))?;
            if idx >= m {
                return Err(parse_err(line, format!("player {idx} out of range")));
            }
            Ok(idx)
        };

        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("players:") {
                if players.is_some() {
                    return Err(parse_err(line_no, "duplicate `players:` header"));
                }
                let m: usize = rest
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line_no, "`players:` needs a positive integer"))?;
                if m < 2 {
                    return Err(parse_err(line_no, "a game needs at least 2 players"));
                }
                players = Some(m);
                labels = vec![None; m];
                tensors = vec![None; m];
                current = None;
            } else if let Some(rest) = line.strip_prefix("actions:") {
                let m = players.ok_or_else(|| parse_err(line_no, "`actions:` before `players:`"))?;
                if actions.is_some() {
                    return Err(parse_err(line_no, "duplicate `actions:` header"));
                }
                let counts: Vec<usize> = rest
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().ok().filter(|&c| c > 0))
                    .collect::<Option<_>>()
                    .ok_or_else(|| parse_err(line_no, "action counts must be positive integers"))?;
                if counts.len() != m {
                    return Err(parse_err(
                        line_no,
                        format!("expected {m} action counts, got {}", counts.len()),
                    ));
                }
                actions = Some(counts);
                current = None;
            } else if let Some(rest) = line.strip_prefix("labels") {
                let counts = actions
                    .as_ref()
                    .ok_or_else(|| parse_err(line_no, "`labels` before `actions:`"))?;
                let (idx, names) = rest
                    .split_once(':')
                    .ok_or_else(|| parse_err(line_no, "malformed `labels i:` header"))?;
                let idx = header_index(idx, "labels", line_no, counts.len())?;
                let names: Vec<String> = names.split_whitespace().map(String::from).collect();
                if names.len() != counts[idx] {
                    return Err(parse_err(
                        line_no,
                        format!("player {idx} has {} actions but {} labels", counts[idx], names.len()),
                    ));
                }
                if labels[idx].replace(names).is_some() {
                    return Err(parse_err(line_no, format!("duplicate labels for player {idx}")));
                }
                current = None;
            } else if let Some(rest) = line.strip_prefix("utility") {
                let counts = actions
                    .as_ref()
                    .ok_or_else(|| parse_err(line_no, "`utility` before `actions:`"))?;
                let (idx, tail) = rest
                    .split_once(':')
                    .ok_or_else(|| parse_err(line_no, "malformed `utility i:` header"))?;
                let idx = header_index(idx, "utility", line_no, counts.len())?;
                if tensors[idx].is_some() {
                    return Err(parse_err(line_no, format!("duplicate utility for player {idx}")));
                }
                let mut values = Vec::new();
                for tok in tail.split_whitespace() {
                    values.push(tok.parse().map_err(|e: Error| parse_err(line_no, e.to_string()))?);
                }
                tensors[idx] = Some(values);
                current = Some(idx);
            } else {
                let idx = current.ok_or_else(|| {
                    parse_err(line_no, format!("unexpected content outside a utility block: {line:?}"))
                })?;
                let target = tensors[idx].as_mut().expect("current tensor exists");
                for tok in line.split_whitespace() {
                    target.push(tok.parse().map_err(|e: Error| parse_err(line_no, e.to_string()))?);
                }
            }
        }

        let m = players.ok_or_else(|| parse_err(last_line, "missing `players:` header"))?;
        let counts = actions.ok_or_else(|| parse_err(last_line, "missing `actions:` header"))?;
        let expected: usize = counts.iter().product();
        let mut utilities = Vec::with_capacity(m);
        for (i, t) in tensors.into_iter().enumerate() {
            let t = t.ok_or_else(|| parse_err(last_line, format!("missing `utility {i}:` block")))?;
            if t.len() != expected {
                return Err(parse_err(
                    last_line,
                    format!("utility {i} has {} entries, expected {expected}", t.len()),
                ));
            }
            utilities.push(t);
        }
        let game = Game::new(counts, utilities)?;
        match labels.iter().all(Option::is_some) {
            true => game.with_labels(labels.into_iter().flatten().collect()),
            false if labels.iter().all(Option::is_none) => Ok(game),
            false => Err(parse_err(last_line, "labels given for some players but not all")),
        }
    }

    /// Canonical text form; `Game::parse(&g.to_text()) == g`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let counts: Vec<String> = self.action_counts.iter().map(ToString::to_string).collect();
        writeln!(out, "players: {}", self.num_players()).unwrap();
        writeln!(out, "actions: {}", counts.join(" ")).unwrap();
        if let Some(labels) = &self.labels {
            for (i, l) in labels.iter().enumerate() {
                writeln!(out, "labels {i}: {}", l.join(" ")).unwrap();
            }
        }
        let width = *self.action_counts.last().expect("m >= 2");
        for (i, u) in self.utilities.iter().enumerate() {
            writeln!(out, "utility {i}:").unwrap();
            for row in u.chunks(width) {
                writeln!(out, "{}", format_vector(row)).unwrap();
            }
        }
        out
    }
}

impl MixedProfile {
    /// Validates that every vector is a probability distribution.
    pub fn new(strategies: Vec<Vec<Rational>>) -> Result<Self> {
        for (i, s) in strategies.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Shape(format!("strategy of player {i} is empty")));
            }
            if s.iter().any(Rational::is_negative) {
                return Err(Error::InvalidArgument(format!(
                    "strategy of player {i} has a negative probability"
                )));
            }
            let total: Rational = s.iter().sum();
            if total != Rational::one() {
                return Err(Error::InvalidArgument(format!(
                    "strategy of player {i} sums to {total}, not 1"
                )));
            }
        }
        Ok(MixedProfile { strategies })
    }

    /// Point mass on `actions`, given the action counts.
    pub fn pure(action_counts: &[usize], actions: &[usize]) -> Result<Self> {
        if action_counts.len() != actions.len() {
            return Err(Error::Shape("pure profile length differs from player count".into()));
        }
        let mut strategies = Vec::with_capacity(actions.len());
        for (p, (&n, &a)) in action_counts.iter().zip(actions).enumerate() {
            if a >= n {
                return Err(Error::InvalidArgument(format!("action {a} out of range for player {p}")));
            }
            let mut s = vec![Rational::zero(); n];
            s[a] = Rational::one();
            strategies.push(s);
        }
        Ok(MixedProfile { strategies })
    }

    /// Uniform distribution over all actions of every player.
    pub fn uniform(action_counts: &[usize]) -> Self {
        MixedProfile {
            strategies: action_counts
                .iter()
                .map(|&n| vec![Rational::new(1, n as i64); n])
                .collect(),
        }
    }

    pub fn strategies(&self) -> &[Vec<Rational>] {
        &self.strategies
    }

    pub fn strategy(&self, player: usize) -> &[Rational] {
        &self.strategies[player]
    }

    pub fn into_strategies(self) -> Vec<Vec<Rational>> {
        self.strategies
    }

    pub fn num_players(&self) -> usize {
        self.strategies.len()
    }

    /// Actions with positive probability, per player.
    pub fn supports(&self) -> Vec<Vec<usize>> {
        self.strategies
            .iter()
            .map(|s| (0..s.len()).filter(|&a| s[a].is_positive()).collect())
            .collect()
    }

    /// The pure profile this is a point mass on, if any.
    pub fn as_pure(&self) -> Option<PureProfile> {
        self.strategies
            .iter()
            .map(|s| s.iter().position(|q| *q == Rational::one()))
            .collect::<Option<Vec<_>>>()
            .map(PureProfile)
    }

    pub fn check_shape(&self, game: &Game) -> Result<()> {
        if self.strategies.len() != game.num_players() {
            return Err(Error::Shape(format!(
                "profile has {} strategies, game has {} players",
                self.strategies.len(),
                game.num_players()
            )));
        }
        for (i, (s, &n)) in self.strategies.iter().zip(game.action_counts()).enumerate() {
            if s.len() != n {
                return Err(Error::Shape(format!(
                    "strategy of player {i} has length {}, player has {n} actions",
                    s.len()
                )));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut seen_header = false;
        let mut strategies = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if !seen_header {
                let rest = line
                    .strip_prefix("profile:")
                    .ok_or_else(|| parse_err(line_no, "expected `profile:` header"))?;
                if !rest.trim().is_empty() {
                    return Err(parse_err(line_no, "`profile:` header takes no values"));
                }
                seen_header = true;
                continue;
            }
            let v: Vec<Rational> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_>>()
                .map_err(|e| parse_err(line_no, e.to_string()))?;
            strategies.push(v);
        }
        if !seen_header {
            return Err(parse_err(0, "missing `profile:` header"));
        }
        if strategies.len() < 2 {
            return Err(parse_err(0, "a profile needs one line per player (at least 2)"));
        }
        MixedProfile::new(strategies)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("profile:\n");
        for s in &self.strategies {
            out.push_str(&format_vector(s));
            out.push('\n');
        }
        out
    }
}

impl std::fmt::Display for MixedProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.strategies.iter().map(|s| format!("({})", format_vector(s))).collect();
        write!(f, "{}", parts.join(" "))
    }
}
