//! Command-line front end.
//!
//! [`run`] is the whole program minus process plumbing: it parses argv,
//! executes one command and returns the rendered output with an exit code.
//! Exit codes: 0 solved, 1 decided negative, 2 usage or input error,
//! 3 budget exceeded.

use std::ffi::OsString;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::approx::{self, ScanOptions};
use crate::error::Error;
use crate::game::{Game, MixedProfile};
use crate::multiplayer;
use crate::rational::{format_vector, Rational};
use crate::sat;
use crate::solvers::{self, NashWitness};
use crate::stability::{self, Deviation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Records,
}

#[derive(Parser)]
#[command(name = "stabilis", version, about = "Exact Nash, immunity and envy-proofness analysis of normal-form games")]
struct Cli {
    /// Output style; `records` prints one key=value per line.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gaps and eps-classification of a two-player profile.
    Check {
        #[command(flatten)]
        game: GameArg,
        /// Profile file (`-` for stdin).
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value = "0")]
        eps: Rational,
    },
    /// Construct profiles or decide existence (two players).
    #[command(subcommand)]
    Solve(SolveCmd),
    /// List equilibria by support enumeration.
    #[command(subcommand)]
    Enumerate(EnumerateCmd),
    /// Build the game gadget for a CNF formula.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// k-uniform searches for approximate profiles.
    #[command(subcommand)]
    Approx(ApproxCmd),
    /// Coalition checks and shape metrics for m-player games.
    #[command(subcommand)]
    Multi(MultiCmd),
}

#[derive(Subcommand)]
enum SolveCmd {
    /// Envy-proof profile from the difference game's maximin strategies.
    EnvyProof {
        #[command(flatten)]
        game: GameArg,
        #[command(flatten)]
        emit: Emit,
    },
    /// Immune profile from a Nash equilibrium of the swap-negated game.
    Immune {
        #[command(flatten)]
        game: GameArg,
        #[arg(long)]
        max_support: Option<usize>,
        #[command(flatten)]
        emit: Emit,
    },
    /// Decide whether an immune Nash equilibrium exists.
    ImmuneNash {
        #[command(flatten)]
        game: GameArg,
        #[command(flatten)]
        emit: Emit,
    },
    /// First envy-proof Nash equilibrium found by support enumeration.
    EnvyProofNash {
        #[command(flatten)]
        game: GameArg,
        #[arg(long)]
        max_support: Option<usize>,
        #[command(flatten)]
        emit: Emit,
    },
}

#[derive(Subcommand)]
enum EnumerateCmd {
    /// All Nash equilibria by exact support enumeration.
    Nash {
        #[command(flatten)]
        game: GameArg,
        #[arg(long)]
        max_support: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Game built from a DIMACS CNF formula.
    Sat {
        /// DIMACS file (`-` for stdin).
        #[arg(long)]
        cnf: PathBuf,
    },
}

#[derive(Subcommand)]
enum ApproxCmd {
    /// Minimum envy gap over k-uniform eps-Nash profiles.
    EnvyNash {
        #[command(flatten)]
        game: GameArg,
        #[arg(long)]
        eps: Rational,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        budget: BudgetArg,
        #[command(flatten)]
        emit: Emit,
    },
    /// First k-uniform eps-immune profile.
    Immune {
        #[command(flatten)]
        game: GameArg,
        #[arg(long)]
        eps: Rational,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        budget: BudgetArg,
        #[command(flatten)]
        emit: Emit,
    },
}

#[derive(Subcommand)]
enum MultiCmd {
    /// Coalition gaps for coalitions of size at most t.
    Check {
        #[command(flatten)]
        game: GameArg,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value = "0")]
        eps: Rational,
        #[command(flatten)]
        budget: BudgetArg,
    },
    /// Smallest gamma for which the game is gamma-sensitive and gamma-varied.
    Gamma {
        #[command(flatten)]
        game: GameArg,
    },
    /// Whether utilities ignore the identities of the other players.
    Anonymous {
        #[command(flatten)]
        game: GameArg,
    },
}

#[derive(Args)]
struct GameArg {
    /// Game file (`-` for stdin).
    #[arg(long)]
    game: PathBuf,
}

#[derive(Args)]
struct BudgetArg {
    /// Maximum number of candidates examined.
    #[arg(long, env = "STABILIS_BUDGET")]
    budget: Option<u128>,
}

#[derive(Args)]
struct Emit {
    /// Also write the resulting profile to this file.
    #[arg(long)]
    profile_out: Option<PathBuf>,
}

/// Accumulates both renderings; the format picks one at the end.
struct Report {
    records: Vec<(String, String)>,
    human: Vec<String>,
    exit_code: i32,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            records: vec![("command".into(), command.into())],
            human: vec![command.to_string()],
            exit_code: EXIT_OK,
        }
    }

    fn rec(&mut self, key: impl Into<String>, value: impl ToString) {
        self.records.push((key.into(), value.to_string()));
    }

    fn line(&mut self, text: impl Into<String>) {
        self.human.push(text.into());
    }

    fn both(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        self.line(format!("{key}: {value}"));
        self.rec(key, value);
    }

    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Records => {
                for (k, v) in &self.records {
                    out.push_str(&format!("{k}={v}\n"));
                }
            }
            Format::Human => {
                for l in &self.human {
                    out.push_str(l);
                    out.push('\n');
                }
            }
        }
        out
    }
}

struct Input {
    text: String,
    digest: String,
}

fn read_input(path: &Path) -> Result<Input, Error> {
    let mut bytes = Vec::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_end(&mut bytes)?;
    } else {
        bytes = std::fs::read(path).map_err(|e| {
            Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        })?;
    }
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::InvalidArgument(format!("{} is not UTF-8 text", path.display())))?;
    Ok(Input { text, digest })
}

fn with_path<T>(path: &Path, r: Result<T, Error>) -> Result<T, Error> {
    r.map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("{}: {msg}", path.display()),
        },
        other => other,
    })
}

fn load_game(rep: &mut Report, path: &Path) -> Result<Game, Error> {
    let input = read_input(path)?;
    let g = with_path(path, Game::parse(&input.text))?;
    rep.rec("input.game", path.display());
    rep.rec("input.game.sha256", &input.digest);
    rep.line(format!("game {} (sha256 {})", path.display(), input.digest));
    Ok(g)
}

fn load_profile(rep: &mut Report, path: &Path, g: &Game) -> Result<MixedProfile, Error> {
    let input = read_input(path)?;
    let x = with_path(path, MixedProfile::parse(&input.text))?;
    x.check_shape(g)?;
    rep.rec("input.profile", path.display());
    rep.rec("input.profile.sha256", &input.digest);
    rep.line(format!("profile {} (sha256 {})", path.display(), input.digest));
    Ok(x)
}

/// Exact value, plus a marked decimal approximation when not an integer.
fn human(r: &Rational) -> String {
    if r.is_integer() {
        r.to_string()
    } else {
        format!("{r} (~{:.6})", r.to_f64())
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn names(g: &Game, player: usize, actions: &[usize]) -> String {
    let v: Vec<String> = actions.iter().map(|&a| g.action_name(player, a)).collect();
    format!("{{{}}}", v.join(", "))
}

fn describe_strategy(g: &Game, player: usize, s: &[Rational]) -> String {
    let parts: Vec<String> = s
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(a, p)| {
            if p.is_integer() {
                g.action_name(player, a)
            } else {
                format!("{p} {}", g.action_name(player, a))
            }
        })
        .collect();
    parts.join(", ")
}

/// Profile rows plus its three two-player gaps.
fn emit_profile(rep: &mut Report, g: &Game, x: &MixedProfile, prefix: &str, emit: Option<&Emit>) -> Result<(), Error> {
    for (p, s) in x.strategies().iter().enumerate() {
        rep.rec(format!("{prefix}profile.{p}"), format_vector(s));
        rep.line(format!("  player {p}: {}", describe_strategy(g, p, s)));
    }
    if g.is_two_player() {
        let r = stability::classify(g, x, &Rational::zero())?;
        rep.rec(format!("{prefix}nash_gap"), &r.nash_gap);
        rep.rec(format!("{prefix}immune_gap"), &r.immune_gap);
        rep.rec(format!("{prefix}envy_gap"), &r.envy_gap);
        rep.line(format!(
            "  gaps: nash {}, immune {}, envy {}",
            human(&r.nash_gap),
            human(&r.immune_gap),
            human(&r.envy_gap)
        ));
    }
    if let Some(path) = emit.and_then(|e| e.profile_out.as_ref()) {
        std::fs::write(path, x.to_text())?;
        rep.rec("profile_out", path.display());
        rep.line(format!("profile written to {}", path.display()));
    }
    Ok(())
}

fn deviation_text(g: &Game, d: Deviation) -> String {
    format!("player {} plays {}", d.player, g.action_name(d.player, d.action))
}

fn support_text(max_support: Option<usize>) -> String {
    max_support.map_or_else(|| "full".to_string(), |m| m.to_string())
}

fn check(rep: &mut Report, game: &GameArg, profile: &Path, eps: &Rational) -> Result<(), Error> {
    let g = load_game(rep, &game.game)?;
    let x = load_profile(rep, profile, &g)?;
    let r = stability::classify(&g, &x, eps)?;
    rep.rec("eps", eps);
    rep.line(format!("eps: {}", human(eps)));
    let rows = [
        ("nash", "Nash", &r.nash_gap, r.is_nash, r.worst_nash),
        ("immune", "immune", &r.immune_gap, r.is_immune, r.worst_immune),
        ("envy", "envy-proof", &r.envy_gap, r.is_envy_proof, r.worst_envy),
    ];
    for (key, _, gap, _, _) in &rows {
        rep.rec(format!("{key}_gap"), gap);
    }
    for (key, _, _, holds, _) in &rows {
        rep.rec(*key, yes_no(*holds));
    }
    for (key, name, gap, holds, worst) in &rows {
        rep.rec(format!("worst.{key}.player"), worst.player);
        rep.rec(format!("worst.{key}.action"), worst.action);
        rep.line(format!(
            "{name:<11} {:<3} gap {} (worst: {})",
            yes_no(*holds),
            human(gap),
            deviation_text(&g, *worst)
        ));
    }
    Ok(())
}

fn witness_lines(rep: &mut Report, g: &Game, w: &NashWitness, prefix: &str) -> Result<(), Error> {
    for p in 0..2 {
        rep.rec(format!("{prefix}support.{p}"), format_vector(&w.supports[p].iter().map(|&a| Rational::from(a)).collect::<Vec<_>>()));
    }
    rep.rec(format!("{prefix}payoff.0"), &w.payoffs[0]);
    rep.rec(format!("{prefix}payoff.1"), &w.payoffs[1]);
    rep.rec(format!("{prefix}degenerate"), yes_no(w.degenerate));
    rep.line(format!(
        "  supports {} x {}, payoffs {} / {}{}",
        names(g, 0, &w.supports[0]),
        names(g, 1, &w.supports[1]),
        human(&w.payoffs[0]),
        human(&w.payoffs[1]),
        if w.degenerate { ", degenerate support" } else { "" }
    ));
    Ok(())
}

fn solve(rep: &mut Report, cmd: &SolveCmd) -> Result<(), Error> {
    match cmd {
        SolveCmd::EnvyProof { game, emit } => {
            let g = load_game(rep, &game.game)?;
            let x = solvers::solve_envy_proof(&g)?;
            rep.line("envy-proof profile:");
            emit_profile(rep, &g, &x, "", Some(emit))?;
        }
        SolveCmd::Immune { game, max_support, emit } => {
            let g = load_game(rep, &game.game)?;
            rep.both("max_support", support_text(*max_support));
            match solvers::solve_immune(&g, *max_support) {
                Ok(x) => {
                    rep.rec("found", "yes");
                    rep.line("immune profile:");
                    emit_profile(rep, &g, &x, "", Some(emit))?;
                }
                Err(Error::NotFoundWithinSupport(_)) => {
                    rep.rec("found", "no");
                    rep.line("no immune profile within the support bound");
                    rep.exit_code = EXIT_NEGATIVE;
                }
                Err(e) => return Err(e),
            }
        }
        SolveCmd::ImmuneNash { game, emit } => {
            let g = load_game(rep, &game.game)?;
            let d = solvers::decide_immune_nash(&g)?;
            rep.rec("v0", &d.values.0);
            rep.rec("v1", &d.values.1);
            rep.rec("exists", d.exists.to_string());
            rep.line(format!("maximin values: v0 = {}, v1 = {}", human(&d.values.0), human(&d.values.1)));
            match &d.witness {
                Some(x) => {
                    rep.line("immune Nash equilibrium exists:");
                    emit_profile(rep, &g, x, "", Some(emit))?;
                }
                None => {
                    rep.line("no immune Nash equilibrium");
                    rep.exit_code = EXIT_NEGATIVE;
                }
            }
        }
        SolveCmd::EnvyProofNash { game, max_support, emit } => {
            let g = load_game(rep, &game.game)?;
            rep.both("max_support", support_text(*max_support));
            match solvers::find_envy_proof_nash(&g, *max_support)? {
                Some(w) => {
                    rep.rec("found", "yes");
                    rep.line("envy-proof Nash equilibrium:");
                    witness_lines(rep, &g, &w, "")?;
                    emit_profile(rep, &g, &w.profile, "", Some(emit))?;
                }
                None => {
                    rep.rec("found", "no");
                    rep.line("no envy-proof Nash equilibrium within the support bound");
                    rep.exit_code = EXIT_NEGATIVE;
                }
            }
        }
    }
    Ok(())
}

fn enumerate(rep: &mut Report, cmd: &EnumerateCmd) -> Result<(), Error> {
    let EnumerateCmd::Nash { game, max_support } = cmd;
    let g = load_game(rep, &game.game)?;
    rep.both("max_support", support_text(*max_support));
    let all = solvers::enumerate_nash(&g, *max_support)?;
    rep.both("count", all.len());
    for (i, w) in all.iter().enumerate() {
        rep.line(format!("equilibrium {i}:"));
        witness_lines(rep, &g, w, &format!("witness.{i}."))?;
        emit_profile(rep, &g, &w.profile, &format!("witness.{i}."), None)?;
    }
    Ok(())
}

fn reduce(rep: &mut Report, cmd: &ReduceCmd) -> Result<String, Error> {
    let ReduceCmd::Sat { cnf } = cmd;
    let input = read_input(cnf)?;
    let phi = with_path(cnf, sat::parse_dimacs(&input.text))?;
    let gadget = sat::build_game(&phi);
    let text = gadget.game.to_text();
    rep.rec("input.cnf", cnf.display());
    rep.rec("input.cnf.sha256", &input.digest);
    rep.rec("num_vars", phi.num_vars());
    rep.rec("num_clauses", phi.clauses().len());
    rep.rec("num_actions", gadget.game.num_actions(0));
    rep.rec("beta", &gadget.beta);
    rep.rec("game.sha256", hex::encode(Sha256::digest(text.as_bytes())));
    Ok(text)
}

fn budget_of(b: &BudgetArg, default: u128) -> u128 {
    b.budget.unwrap_or(default)
}

fn approx_cmd(rep: &mut Report, cmd: &ApproxCmd) -> Result<(), Error> {
    match cmd {
        ApproxCmd::EnvyNash { game, eps, k, budget, emit } => {
            let g = load_game(rep, &game.game)?;
            let opts = ScanOptions {
                k: *k,
                budget: budget_of(budget, approx::DEFAULT_BUDGET),
            };
            let out = approx::approx_envy_nash_search(&g, eps, &opts)?;
            rep.both("eps", eps);
            rep.both("k", out.k);
            rep.both("budget", opts.budget);
            rep.both("candidates", out.num_candidates);
            rep.both("scanned", out.scanned);
            rep.both("complete", yes_no(out.complete));
            rep.both("found", yes_no(out.found_any));
            if let (Some(best), Some(x)) = (&out.best_envy, &out.witness) {
                rep.rec("best_envy", best);
                rep.rec("nonexistence_bound", &out.nonexistence_bound);
                rep.line(format!("best envy gap among k-uniform eps-Nash profiles: {}", human(best)));
                if out.nonexistence_bound.is_positive() {
                    rep.line(format!(
                        "certificate: no Nash equilibrium is {}-envy-proof",
                        human(&out.nonexistence_bound)
                    ));
                }
                rep.line("witness:");
                emit_profile(rep, &g, x, "", Some(emit))?;
            }
            if !out.complete {
                rep.line("budget exceeded: results are partial");
                rep.exit_code = EXIT_BUDGET;
            } else if !out.found_any {
                rep.line("no k-uniform eps-Nash profile");
                rep.exit_code = EXIT_NEGATIVE;
            }
        }
        ApproxCmd::Immune { game, eps, k, budget, emit } => {
            let g = load_game(rep, &game.game)?;
            let n = g.action_counts().iter().copied().max().unwrap_or(1);
            let opts = ScanOptions {
                k: *k,
                budget: budget_of(budget, approx::DEFAULT_BUDGET),
            };
            let k = match k {
                Some(k) => *k,
                None => approx::k_for(n, eps)?,
            };
            rep.both("eps", eps);
            rep.both("k", k);
            match approx::approx_immune_search(&g, eps, &opts) {
                Ok(x) => {
                    rep.rec("found", "yes");
                    rep.line("eps-immune profile:");
                    emit_profile(rep, &g, &x, "", Some(emit))?;
                }
                Err(Error::ScanExhausted { .. }) => {
                    rep.rec("found", "no");
                    rep.line("no k-uniform eps-Nash profile of the swap-negated game");
                    rep.exit_code = EXIT_NEGATIVE;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}

fn coalition_lines(rep: &mut Report, g: &Game, key: &str, name: &str, gap: Option<&multiplayer::CoalitionGap>, eps: &Rational) {
    let Some(gap) = gap else {
        rep.rec(format!("{key}_gap"), "undefined");
        rep.line(format!("{name:<11} undefined (no player outside a coalition of size t)"));
        return;
    };
    let holds = gap.value <= *eps;
    rep.rec(format!("{key}_gap"), &gap.value);
    rep.rec(key, yes_no(holds));
    let members: Vec<Rational> = gap.coalition.iter().map(|&p| Rational::from(p)).collect();
    let actions: Vec<Rational> = gap.deviation.iter().map(|&a| Rational::from(a)).collect();
    rep.rec(format!("worst.{key}.coalition"), format_vector(&members));
    rep.rec(format!("worst.{key}.deviation"), format_vector(&actions));
    if let Some(i) = gap.gainer {
        rep.rec(format!("worst.{key}.gainer"), i);
    }
    if let Some(j) = gap.victim {
        rep.rec(format!("worst.{key}.victim"), j);
    }
    let moves: Vec<String> = gap
        .coalition
        .iter()
        .zip(&gap.deviation)
        .map(|(&p, &a)| format!("player {p} plays {}", g.action_name(p, a)))
        .collect();
    rep.line(format!("{name:<11} {:<3} gap {} (worst: {})", yes_no(holds), human(&gap.value), moves.join(", ")));
}

fn multi(rep: &mut Report, cmd: &MultiCmd) -> Result<(), Error> {
    match cmd {
        MultiCmd::Check { game, profile, t, eps, budget } => {
            let g = load_game(rep, &game.game)?;
            let x = load_profile(rep, profile, &g)?;
            if eps.is_negative() {
                return Err(Error::InvalidArgument(format!("eps must be non-negative, got {eps}")));
            }
            let r = multiplayer::coalition_report(&g, &x, *t, budget_of(budget, multiplayer::DEFAULT_BUDGET))?;
            rep.both("t", t);
            rep.rec("eps", eps);
            rep.line(format!("eps: {}", human(eps)));
            coalition_lines(rep, &g, "nash", "Nash", Some(&r.nash), eps);
            coalition_lines(rep, &g, "immune", "immune", r.immune.as_ref(), eps);
            coalition_lines(rep, &g, "envy", "envy-proof", r.envy.as_ref(), eps);
        }
        MultiCmd::Gamma { game } => {
            let g = load_game(rep, &game.game)?;
            let s = multiplayer::gamma_sensitive(&g);
            let v = multiplayer::gamma_varied(&g);
            rep.rec("gamma_sensitive", &s);
            rep.rec("gamma_varied", &v);
            rep.line(format!("gamma-sensitive: {}", human(&s)));
            rep.line(format!("gamma-varied: {}", human(&v)));
        }
        MultiCmd::Anonymous { game } => {
            let g = load_game(rep, &game.game)?;
            let anonymous = multiplayer::is_anonymous(&g)?;
            rep.both("anonymous", yes_no(anonymous));
            if !anonymous {
                rep.exit_code = EXIT_NEGATIVE;
            }
        }
    }
    Ok(())
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Check { .. } => "check",
        Command::Solve(SolveCmd::EnvyProof { .. }) => "solve envy-proof",
        Command::Solve(SolveCmd::Immune { .. }) => "solve immune",
        Command::Solve(SolveCmd::ImmuneNash { .. }) => "solve immune-nash",
        Command::Solve(SolveCmd::EnvyProofNash { .. }) => "solve envy-proof-nash",
        Command::Enumerate(EnumerateCmd::Nash { .. }) => "enumerate nash",
        Command::Reduce(ReduceCmd::Sat { .. }) => "reduce sat",
        Command::Approx(ApproxCmd::EnvyNash { .. }) => "approx envy-nash",
        Command::Approx(ApproxCmd::Immune { .. }) => "approx immune",
        Command::Multi(MultiCmd::Check { .. }) => "multi check",
        Command::Multi(MultiCmd::Gamma { .. }) => "multi gamma",
        Command::Multi(MultiCmd::Anonymous { .. }) => "multi anonymous",
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded { .. } => EXIT_BUDGET,
        Error::NotFoundWithinSupport(_) | Error::ScanExhausted { .. } => EXIT_NEGATIVE,
        _ => EXIT_USAGE,
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> RunReport
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                RunReport {
                    stdout: String::new(),
                    stderr: text,
                    exit_code: EXIT_USAGE,
                }
            } else {
                RunReport {
                    stdout: text,
                    stderr: String::new(),
                    exit_code: EXIT_OK,
                }
            };
        }
    };
    let mut rep = Report::new(command_name(&cli.command));
    let mut raw_output = None;
    let result = match &cli.command {
        Command::Check { game, profile, eps } => check(&mut rep, game, profile, eps),
        Command::Solve(cmd) => solve(&mut rep, cmd),
        Command::Enumerate(cmd) => enumerate(&mut rep, cmd),
        Command::Reduce(cmd) => reduce(&mut rep, cmd).map(|text| raw_output = Some(text)),
        Command::Approx(cmd) => approx_cmd(&mut rep, cmd),
        Command::Multi(cmd) => multi(&mut rep, cmd),
    };
    match result {
        Err(e) => RunReport {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            exit_code: exit_code_for(&e),
        },
        Ok(()) => {
            let stdout = match (raw_output, cli.format) {
                // the game file itself is the human-facing output
                (Some(text), Format::Human) => text,
                _ => rep.render(cli.format),
            };
            RunReport {
                stdout,
                stderr: String::new(),
                exit_code: rep.exit_code,
            }
        }
    }
}
