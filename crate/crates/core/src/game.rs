//! The uncrossing game engine.
//!
//! One iteration is a Red move (a crossing pair plus the corner pair that
//! replaces it) followed by Blue returning one of the two replaced members,
//! or none when the engine allows it. The board is a set of bipartitions: a
//! replacement or a returned member equal to one already present merges
//! with it. Members that cross nothing are retired after every step; retired
//! members stay laminar with everything that follows, so the final family is
//! `active ∪ retired`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::functions::FunctionOracle;
use crate::ground::{canonical_corner_pairs, crosses, Bipartition, Family, GroundError, PairChoice};

/// Red's move. `pair` refers to the corner pairs of the stored sides of `x`
/// and `y` (see [`canonical_corner_pairs`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RedMove {
    pub x: Bipartition,
    pub y: Bipartition,
    pub pair: PairChoice,
}

impl RedMove {
    /// The pair `(X', Y')` this move puts into the family.
    pub fn replacement(&self) -> Result<(Bipartition, Bipartition), GroundError> {
        Ok(canonical_corner_pairs(&self.x, &self.y)?.get(self.pair))
    }
}

impl fmt::Display for RedMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.pair.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlueChoice {
    X,
    Y,
    None,
}

impl BlueChoice {
    pub fn name(self) -> &'static str {
        match self {
            BlueChoice::X => "x",
            BlueChoice::Y => "y",
            BlueChoice::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "x" | "X" => Some(BlueChoice::X),
            "y" | "Y" => Some(BlueChoice::Y),
            "none" => Some(BlueChoice::None),
            _ => None,
        }
    }

    pub fn returned(self, mv: &RedMove) -> Option<Bipartition> {
        match self {
            BlueChoice::X => Some(mv.x),
            BlueChoice::Y => Some(mv.y),
            BlueChoice::None => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraceRecord {
    pub red: RedMove,
    pub blue: BlueChoice,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid move {mv}: {reason}")]
    InvalidMove { mv: RedMove, reason: String },
    #[error("no corner pair of {x}, {y} satisfies the exchange inequality (f is not skew-supermodular)")]
    NoValidPair { x: Bipartition, y: Bipartition },
    #[error("Blue returned none but the engine does not allow it")]
    NoneNotAllowed,
    #[error("Red does not win on some Blue branch ({} iterations recorded)", trace.len())]
    RedLoses { trace: Vec<TraceRecord> },
    #[error("instance too large for exhaustive search: |V|={n}, |F|={m}")]
    TooLarge { n: usize, m: usize },
    #[error("strategy inconsistency: {0}")]
    Internal(String),
    #[error("{source} (after {} iterations)", trace.len())]
    Aborted {
        source: Box<GameError>,
        trace: Vec<TraceRecord>,
    },
    #[error(transparent)]
    Ground(#[from] GroundError),
}

impl GameError {
    fn with_trace(self, trace: &[TraceRecord]) -> GameError {
        match self {
            e @ (GameError::Aborted { .. } | GameError::RedLoses { .. }) => e,
            e => GameError::Aborted {
                source: Box::new(e),
                trace: trace.to_vec(),
            },
        }
    }

    /// The innermost error, skipping trace wrappers.
    pub fn root(&self) -> &GameError {
        match self {
            GameError::Aborted { source, .. } => source.root(),
            e => e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GameConfig {
    /// Whether Blue may return neither member.
    pub allow_none: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameState {
    pub family: Family,
    /// Members retired as trivial.
    pub retired: Family,
    pub iteration: u64,
    pub trace: Vec<TraceRecord>,
}

impl GameState {
    /// Initial state; duplicates merge and trivial members are retired.
    pub fn new(family: Family) -> Self {
        let family = family.deduplicated();
        let active = family.remove_trivial();
        let mut retired = Family::empty(family.ground());
        let mut pool = active.clone();
        for m in family.iter() {
            if !pool.remove_one(m) {
                retired.insert(*m);
            }
        }
        GameState {
            family: active,
            retired,
            iteration: 0,
            trace: Vec::new(),
        }
    }

    pub fn final_family(&self) -> Family {
        let mut all = self.family.clone();
        for m in self.retired.iter() {
            all.insert(*m);
        }
        all.deduplicated()
    }
}

/// Checks a Red move against the family and the exchange inequality.
/// The check uses uncounted oracle calls.
pub fn validate_move(
    family: &Family,
    f: &FunctionOracle,
    mv: &RedMove,
) -> Result<(Bipartition, Bipartition), GameError> {
    let invalid = |reason: &str| GameError::InvalidMove {
        mv: *mv,
        reason: reason.to_string(),
    };
    if mv.x.ground() != family.ground() || mv.y.ground() != family.ground() {
        return Err(invalid("ground mismatch"));
    }
    if !crosses(&mv.x, &mv.y) {
        return Err(invalid("not a crossing pair"));
    }
    if !family.contains(&mv.x) || !family.contains(&mv.y) {
        return Err(invalid("not a member of the family"));
    }
    let (a, b) = mv.replacement()?;
    if f.peek(&mv.x) + f.peek(&mv.y) > f.peek(&a) + f.peek(&b) {
        return Err(invalid("exchange inequality fails for the chosen pair"));
    }
    Ok((a, b))
}

/// One iteration: replace `X, Y` by the chosen corners, add Blue's return,
/// retire trivial members.
pub fn step(
    state: &GameState,
    f: &FunctionOracle,
    mv: &RedMove,
    blue: BlueChoice,
    config: GameConfig,
) -> Result<GameState, GameError> {
    if blue == BlueChoice::None && !config.allow_none {
        return Err(GameError::NoneNotAllowed);
    }
    let (a, b) = validate_move(&state.family, f, mv)?;
    let mut next = state.family.clone();
    next.remove_one(&mv.x);
    next.remove_one(&mv.y);
    next.insert(a);
    next.insert(b);
    if let Some(r) = blue.returned(mv) {
        next.insert(r);
    }
    let next = next.deduplicated();
    let active = next.remove_trivial();
    let mut retired = state.retired.clone();
    let mut pool = active.clone();
    for m in next.iter() {
        if !pool.remove_one(m) {
            retired.insert(*m);
        }
    }
    let mut trace = state.trace.clone();
    trace.push(TraceRecord { red: *mv, blue });
    Ok(GameState {
        family: active,
        retired: retired.deduplicated(),
        iteration: state.iteration + 1,
        trace,
    })
}

pub trait RedStrategy {
    fn name(&self) -> &'static str;

    /// Called only when the active family is not laminar.
    fn next_move(&mut self, state: &GameState, f: &FunctionOracle) -> Result<RedMove, GameError>;

    /// Reports Blue's answer and the resulting active family.
    fn observe(&mut self, mv: &RedMove, blue: BlueChoice, after: &Family) -> Result<(), GameError>;

    /// Canonical encoding of the internal state, used as a memoization key.
    fn state_key(&self) -> String;
}

pub trait BlueStrategy {
    fn choose(&mut self, state: &GameState, mv: &RedMove) -> BlueChoice;
}

/// First crossing pair in canonical order, first corner pair that satisfies
/// the exchange inequality (meet/join before differences).
#[derive(Debug, Clone, Default)]
pub struct NaiveRed;

impl RedStrategy for NaiveRed {
    fn name(&self) -> &'static str {
        "naive"
    }

    fn next_move(&mut self, state: &GameState, f: &FunctionOracle) -> Result<RedMove, GameError> {
        let (x, y) = state
            .family
            .first_crossing_pair()
            .ok_or_else(|| GameError::Internal("asked to move on a laminar family".into()))?;
        let cp = canonical_corner_pairs(&x, &y)?;
        let lhs = f.evaluate(&x) + f.evaluate(&y);
        for pair in [PairChoice::MeetJoin, PairChoice::DiffPair] {
            let (a, b) = cp.get(pair);
            if lhs <= f.evaluate(&a) + f.evaluate(&b) {
                return Ok(RedMove { x, y, pair });
            }
        }
        Err(GameError::NoValidPair { x, y })
    }

    fn observe(&mut self, _: &RedMove, _: BlueChoice, _: &Family) -> Result<(), GameError> {
        Ok(())
    }

    fn state_key(&self) -> String {
        String::new()
    }
}

/// Uniformly random Blue, reproducible from its seed.
#[derive(Debug, Clone)]
pub struct RandomBlue {
    rng: ChaCha8Rng,
    allow_none: bool,
}

pub fn blue_random(seed: u64, allow_none: bool) -> RandomBlue {
    RandomBlue {
        rng: ChaCha8Rng::seed_from_u64(seed),
        allow_none,
    }
}

impl BlueStrategy for RandomBlue {
    fn choose(&mut self, _: &GameState, _: &RedMove) -> BlueChoice {
        let k = if self.allow_none { 3 } else { 2 };
        match self.rng.gen_range(0..k) {
            0 => BlueChoice::X,
            1 => BlueChoice::Y,
            _ => BlueChoice::None,
        }
    }
}

/// Returns whichever of `X`, `Y` separates more element pairs; ties go to `X`.
#[derive(Debug, Clone, Default)]
pub struct MaxPotentialBlue;

pub fn blue_return_larger_potential() -> MaxPotentialBlue {
    MaxPotentialBlue
}

impl BlueStrategy for MaxPotentialBlue {
    fn choose(&mut self, _: &GameState, mv: &RedMove) -> BlueChoice {
        if mv.y.separation_count() > mv.x.separation_count() {
            BlueChoice::Y
        } else {
            BlueChoice::X
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct AlwaysXBlue;

pub fn blue_always_x() -> AlwaysXBlue {
    AlwaysXBlue
}

impl BlueStrategy for AlwaysXBlue {
    fn choose(&mut self, _: &GameState, _: &RedMove) -> BlueChoice {
        BlueChoice::X
    }
}

/// Replays a fixed sequence of answers, then returns `X`.
#[derive(Debug, Clone)]
pub struct ScriptedBlue {
    answers: Vec<BlueChoice>,
    pos: usize,
}

impl ScriptedBlue {
    pub fn new(answers: Vec<BlueChoice>) -> Self {
        ScriptedBlue { answers, pos: 0 }
    }
}

impl BlueStrategy for ScriptedBlue {
    fn choose(&mut self, _: &GameState, _: &RedMove) -> BlueChoice {
        let c = self.answers.get(self.pos).copied().unwrap_or(BlueChoice::X);
        self.pos += 1;
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameOutcome {
    pub won: bool,
    pub iterations: u64,
    pub final_family: Family,
    pub oracle_calls: u64,
    pub trace: Vec<TraceRecord>,
}

/// Plays until the active family is laminar or `cap` iterations have passed.
pub fn play<R: RedStrategy + ?Sized, B: BlueStrategy + ?Sized>(
    f0: &Family,
    f: &FunctionOracle,
    red: &mut R,
    blue: &mut B,
    cap: u64,
    config: GameConfig,
) -> Result<GameOutcome, GameError> {
    assert!(cap > 0, "cap must be positive");
    let calls_before = f.eval_count();
    let mut state = GameState::new(f0.clone());
    loop {
        if state.family.is_laminar() || state.iteration >= cap {
            let won = state.family.is_laminar();
            return Ok(GameOutcome {
                won,
                iterations: state.iteration,
                final_family: state.final_family(),
                oracle_calls: f.eval_count() - calls_before,
                trace: state.trace,
            });
        }
        let mv = red
            .next_move(&state, f)
            .map_err(|e| e.with_trace(&state.trace))?;
        let answer = blue.choose(&state, &mv);
        let next = step(&state, f, &mv, answer, config).map_err(|e| e.with_trace(&state.trace))?;
        red.observe(&mv, answer, &next.family)
            .map_err(|e| e.with_trace(&next.trace))?;
        state = next;
    }
}

/// Re-applies a recorded trace; every move is validated again.
pub fn replay(
    f0: &Family,
    f: &FunctionOracle,
    trace: &[TraceRecord],
    config: GameConfig,
) -> Result<GameState, GameError> {
    let mut state = GameState::new(f0.clone());
    for rec in trace {
        state = step(&state, f, &rec.red, rec.blue, config).map_err(|e| e.with_trace(&state.trace))?;
    }
    Ok(state)
}

/// Guard for [`worst_case_blue`].
pub const EXHAUSTIVE_MAX_GROUND: usize = 6;
pub const EXHAUSTIVE_MAX_FAMILY: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub max_iterations: u64,
    pub witness: Vec<TraceRecord>,
    /// Distinct (family, Red state) positions explored.
    pub positions: usize,
}

struct Search<'a> {
    f: &'a FunctionOracle,
    config: GameConfig,
    depth_cap: u64,
    memo: HashMap<(Vec<u64>, String), (u64, BlueChoice)>,
    on_path: HashSet<(Vec<u64>, String)>,
    path: Vec<TraceRecord>,
}

impl Search<'_> {
    fn key<R: RedStrategy>(state: &GameState, red: &R) -> (Vec<u64>, String) {
        (
            state.family.iter().map(|b| b.bits()).collect(),
            red.state_key(),
        )
    }

    fn explore<R: RedStrategy + Clone>(&mut self, state: &GameState, red: &R) -> Result<u64, GameError> {
        if state.family.is_laminar() {
            return Ok(0);
        }
        let key = Self::key(state, red);
        if let Some((v, _)) = self.memo.get(&key) {
            return Ok(*v);
        }
        if self.on_path.contains(&key) || self.path.len() as u64 >= self.depth_cap {
            return Err(GameError::RedLoses {
                trace: self.path.clone(),
            });
        }
        let mut mover = red.clone();
        let mv = mover
            .next_move(state, self.f)
            .map_err(|e| e.with_trace(&self.path))?;
        let mut answers = vec![BlueChoice::X, BlueChoice::Y];
        if self.config.allow_none {
            answers.push(BlueChoice::None);
        }
        self.on_path.insert(key.clone());
        let mut best: Option<(u64, BlueChoice)> = None;
        for answer in answers {
            let next = step(state, self.f, &mv, answer, self.config).map_err(|e| e.with_trace(&self.path))?;
            let mut child = mover.clone();
            child
                .observe(&mv, answer, &next.family)
                .map_err(|e| e.with_trace(&self.path))?;
            self.path.push(TraceRecord { red: mv, blue: answer });
            let sub = self.explore(&next, &child);
            self.path.pop();
            let v = 1 + sub?;
            if best.is_none_or(|(b, _)| v > b) {
                best = Some((v, answer));
            }
        }
        self.on_path.remove(&key);
        let best = best.expect("at least two answers");
        self.memo.insert(key, best);
        Ok(best.0)
    }
}

/// Explores every Blue answer against a fixed Red strategy and returns the
/// longest game together with a trace realising it.
pub fn worst_case_blue<R: RedStrategy + Clone>(
    f0: &Family,
    f: &FunctionOracle,
    red: &R,
    depth_cap: u64,
    config: GameConfig,
) -> Result<WorstCase, GameError> {
    let n = f0.ground().size();
    if n > EXHAUSTIVE_MAX_GROUND || f0.len() > EXHAUSTIVE_MAX_FAMILY {
        return Err(GameError::TooLarge { n, m: f0.len() });
    }
    let root = GameState::new(f0.clone());
    let mut search = Search {
        f,
        config,
        depth_cap,
        memo: HashMap::new(),
        on_path: HashSet::new(),
        path: Vec::new(),
    };
    let max_iterations = search.explore(&root, red)?;

    // walk the memoized best answers to rebuild a witness
    let mut witness = Vec::new();
    let mut state = root;
    let mut mover = red.clone();
    while !state.family.is_laminar() {
        let key = Search::key(&state, &mover);
        let (_, answer) = search.memo[&key];
        let mv = mover.next_move(&state, f)?;
        let next = step(&state, f, &mv, answer, config)?;
        mover.observe(&mv, answer, &next.family)?;
        witness.push(TraceRecord { red: mv, blue: answer });
        state = next;
    }
    Ok(WorstCase {
        max_iterations,
        witness,
        positions: search.memo.len(),
    })
}
