//! Red's winning strategy.
//!
//! A family is in *form A* when, for some ordering of its atoms as positions
//! `1..n`, every member is a prefix `[1,i]` with `2 <= i <= n-2` or an
//! interval `[2,j]` with `3 <= j <= n-1`. [`form_a_move`] wins such a game in
//! `O(n^2)` iterations.
//!
//! A general family is split into a maximal laminar part `C` and a remainder.
//! Remainder members are inserted one at a time: starting from `D = {X}`,
//! Red repeatedly takes a maximal member of `C` that is 2-partitioned for
//! `D`, plays a form-A subgame on `D` plus that member, and folds the
//! resulting laminar family back into `D`. When `C` is exhausted, `D` becomes
//! the new laminar part.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::functions::FunctionOracle;
use crate::game::{BlueChoice, GameError, GameState, RedMove, RedStrategy};
use crate::ground::{
    bit_ids, canonical_corner_pairs, canonicalize, crosses, lex_cmp, Bipartition, Family, GroundError, GroundSet,
    Subset,
};
use crate::Rational;

/// A form-A family read off under an atom ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormAView {
    ground: GroundSet,
    /// Original elements at positions `1..=n` (index 0 is position 1).
    pub atom_order: Vec<u64>,
    /// `i` for every prefix `[1,i]`, ascending.
    pub a_members: Vec<usize>,
    /// `j` for every interval `[2,j]`, ascending.
    pub b_members: Vec<usize>,
    /// Smallest `j` in `b_members`.
    pub d: usize,
}

impl FormAView {
    pub fn n(&self) -> usize {
        self.atom_order.len()
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    /// Original elements at positions `i..=j`.
    pub fn interval(&self, i: usize, j: usize) -> Subset {
        let bits = self.atom_order[i - 1..j].iter().fold(0u64, |acc, m| acc | m);
        Subset::from_bits(bits, self.ground)
    }

    /// The bipartition whose side is positions `i..=j`.
    pub fn bipartition(&self, i: usize, j: usize) -> Bipartition {
        canonicalize(self.interval(i, j)).expect("proper interval")
    }

    pub fn atom_ids(&self) -> Vec<Vec<usize>> {
        self.atom_order.iter().map(|&m| bit_ids(m).collect()).collect()
    }

    /// Every member of the view as a bipartition.
    pub fn members(&self) -> Vec<Bipartition> {
        let mut out: Vec<Bipartition> = self
            .a_members
            .iter()
            .map(|&i| self.bipartition(1, i))
            .chain(self.b_members.iter().map(|&j| self.bipartition(2, j)))
            .collect();
        out.sort();
        out
    }
}

/// Looks for a form-A ordering with the atom of `e1` at position 1 and the
/// atom of `e2` at position 2. Requires at least one interval member.
pub fn detect_form_a_anchored(f: &Family, e1: usize, e2: usize) -> Option<FormAView> {
    if f.is_empty() {
        return None;
    }
    let ground = f.ground();
    let full = ground.full_mask();
    let atoms = f.atoms();
    let n = atoms.len();
    if n < 4 {
        return None;
    }
    let (a, b) = (atoms.class_of(e1), atoms.class_of(e2));
    if a == b {
        return None;
    }
    let am = atoms.classes()[a];
    let bm = atoms.classes()[b];

    let shapes: Vec<(bool, u64)> = f
        .iter()
        .map(|m| {
            let side = if m.bits() & bm != 0 { m.bits() } else { !m.bits() & full };
            (side & am != 0, side & !am & !bm)
        })
        .collect();
    let mut chain: Vec<u64> = shapes.iter().map(|s| s.1).filter(|&t| t != 0).collect();
    chain.sort_by_key(|&t| (t.count_ones(), t));
    chain.dedup();

    let mut order = vec![am, bm];
    let mut prev = 0u64;
    for &t in &chain {
        if t & prev != prev {
            return None;
        }
        let layer = t & !prev;
        if atoms.classes_meeting(layer) != 1 {
            return None;
        }
        order.push(layer);
        prev = t;
    }
    let rest = full & !am & !bm & !prev;
    if rest == 0 || atoms.classes_meeting(rest) != 1 {
        return None;
    }
    order.push(rest);
    debug_assert_eq!(order.len(), n);

    let mut a_members = Vec::new();
    let mut b_members = Vec::new();
    for (is_a, t) in shapes {
        let depth = if t == 0 {
            0
        } else {
            chain.iter().position(|&c| c == t).expect("in chain") + 1
        };
        let pos = 2 + depth;
        if is_a {
            if !(2..=n - 2).contains(&pos) {
                return None;
            }
            a_members.push(pos);
        } else {
            if !(3..=n - 1).contains(&pos) {
                return None;
            }
            b_members.push(pos);
        }
    }
    if b_members.is_empty() {
        return None;
    }
    a_members.sort_unstable();
    b_members.sort_unstable();
    let d = b_members[0];
    Some(FormAView {
        ground,
        atom_order: order,
        a_members,
        b_members,
        d,
    })
}

/// Tries every ordered pair of atoms as positions 1 and 2.
pub fn detect_form_a(f: &Family) -> Option<FormAView> {
    let atoms = f.atoms();
    let reps: Vec<usize> = atoms
        .classes()
        .iter()
        .map(|c| c.trailing_zeros() as usize + 1)
        .collect();
    for &e1 in &reps {
        for &e2 in &reps {
            if e1 != e2 {
                if let Some(v) = detect_form_a_anchored(f, e1, e2) {
                    return Some(v);
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    /// `([1,d-1], [2,d])` replaced by the singletons `{1}, {d}`.
    DiffAtD,
    /// `d = 3`: `([1,2], [2,3])` replaced by `{2}, [1,3]`.
    MeetAtThree,
    /// `([1,k], [2,d])` replaced by `[2,k], [1,d]`.
    MeetAtK,
    /// Follow-up of `MeetAtK`: `([1,k-1], [2,k])` replaced by `{1}, {k}`.
    DiffAtK,
}

impl Branch {
    pub fn label(self) -> &'static str {
        match self {
            Branch::DiffAtD => "i",
            Branch::MeetAtThree => "ii",
            Branch::MeetAtK => "iii",
            Branch::DiffAtK => "iv",
        }
    }

    fn index(self) -> usize {
        match self {
            Branch::DiffAtD => 0,
            Branch::MeetAtThree => 1,
            Branch::MeetAtK => 2,
            Branch::DiffAtK => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormAMove {
    pub mv: RedMove,
    pub branch: Branch,
    pub d: usize,
    pub k: Option<usize>,
}

/// The move whose stored members are the bipartitions of `x` and `y` and
/// whose replacement is `{out.0, out.1}`.
fn move_for(x: Subset, y: Subset, out: (Subset, Subset)) -> Result<RedMove, GameError> {
    let xb = canonicalize(x)?;
    let yb = canonicalize(y)?;
    let cp = canonical_corner_pairs(&xb, &yb)?;
    let pair = cp
        .choice_for(canonicalize(out.0)?, canonicalize(out.1)?)
        .ok_or_else(|| GameError::Internal(format!("{out:?} is not a corner pair of {x}, {y}")))?;
    Ok(RedMove { x: xb, y: yb, pair })
}

/// Red's move on a form-A view. `pending` carries `k` when the previous
/// move was `MeetAtK` with `k > 2` and Blue returned `[2,d]`.
pub fn form_a_move(view: &FormAView, f: &FunctionOracle, pending: Option<usize>) -> Result<FormAMove, GameError> {
    let d = view.d;
    let iv = |i, j| view.interval(i, j);
    let val = |i, j| f.evaluate(&view.bipartition(i, j));

    if let Some(k) = pending {
        if k != d {
            return Err(GameError::Internal(format!("follow-up expected d={k}, found d={d}")));
        }
        let lhs = val(1, k - 1) + val(2, k);
        let rhs = val(1, 1) + val(k, k);
        if lhs > rhs {
            return Err(GameError::Internal(format!(
                "f([1,{}]) + f([2,{k}]) = {lhs} exceeds f({{1}}) + f({{{k}}}) = {rhs}",
                k - 1
            )));
        }
        return Ok(FormAMove {
            mv: move_for(iv(1, k - 1), iv(2, k), (iv(1, 1), iv(k, k)))?,
            branch: Branch::DiffAtK,
            d,
            k: Some(k),
        });
    }

    let lhs = val(1, d - 1) + val(2, d);
    if lhs <= val(1, 1) + val(d, d) {
        return Ok(FormAMove {
            mv: move_for(iv(1, d - 1), iv(2, d), (iv(1, 1), iv(d, d)))?,
            branch: Branch::DiffAtD,
            d,
            k: None,
        });
    }
    if lhs > val(2, d - 1) + val(1, d) {
        return Err(GameError::NoValidPair {
            x: view.bipartition(1, d - 1),
            y: view.bipartition(2, d),
        });
    }
    if d == 3 {
        return Ok(FormAMove {
            mv: move_for(iv(1, 2), iv(2, 3), (iv(2, 2), iv(1, 3)))?,
            branch: Branch::MeetAtThree,
            d,
            k: None,
        });
    }
    let k = find_k(view, f)?;
    Ok(FormAMove {
        mv: move_for(iv(1, k), iv(2, d), (iv(2, k), iv(1, d)))?,
        branch: Branch::MeetAtK,
        d,
        k: Some(k),
    })
}

/// Smallest `k` in `[2, d-1]` such that
/// `f([1,l]) + f([2,l+1]) <= f([2,l]) + f([1,l+1])` for every `l` in `k..d`.
/// Scans `l` downward from `d-1`.
pub fn find_k(view: &FormAView, f: &FunctionOracle) -> Result<usize, GameError> {
    let d = view.d;
    let mut cache: HashMap<(usize, usize), Rational> = HashMap::new();
    let mut val = |i: usize, j: usize| {
        cache
            .entry((i, j))
            .or_insert_with(|| f.evaluate(&view.bipartition(i, j)))
            .clone()
    };
    let mut k = d;
    for l in (2..d).rev() {
        if val(1, l) + val(2, l + 1) <= val(2, l) + val(1, l + 1) {
            k = l;
        } else {
            break;
        }
    }
    if k == d {
        return Err(GameError::NoValidPair {
            x: view.bipartition(1, d - 1),
            y: view.bipartition(2, d),
        });
    }
    let p = |i, j| f.peek(&view.bipartition(i, j));
    if p(1, k) + p(2, d) > p(1, d) + p(2, k) {
        return Err(GameError::Internal(format!("telescoped chain fails for k={k}, d={d}")));
    }
    if k > 2 && p(1, k - 1) + p(2, k) > p(1, 1) + p(k, k) {
        return Err(GameError::Internal(format!("follow-up inequality fails for k={k}")));
    }
    Ok(k)
}

/// Does `side` meet at most two atoms of `d`?
pub fn is_2_partitioned(side: Subset, d: &Family) -> bool {
    d.atoms().classes_meeting(side.bits()) <= 2
}

/// A member of `c` with a side that is 2-partitioned for `d` and not properly
/// contained in another such side. Among several, the smallest side wins,
/// then canonical order.
pub fn select_maximal(c: &Family, d: &Family) -> Option<(Bipartition, Subset)> {
    let atoms = d.atoms();
    let full = c.ground().full_mask();
    let mut cands: Vec<(Bipartition, u64)> = Vec::new();
    for m in c.distinct() {
        for side in [m.bits(), !m.bits() & full] {
            if atoms.classes_meeting(side) <= 2 {
                cands.push((m, side));
            }
        }
    }
    cands
        .iter()
        .filter(|(_, s)| !cands.iter().any(|(_, t)| t != s && s & t == *s))
        .min_by(|a, b| {
            a.1.count_ones()
                .cmp(&b.1.count_ones())
                .then(a.0.cmp(&b.0))
                .then(lex_cmp(a.1, b.1))
        })
        .map(|&(m, s)| (m, Subset::from_bits(s, c.ground())))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("{0} is not 2-partitioned")]
    NotTwoPartitioned(Subset),
    #[error("{0} crosses no member")]
    TrivialX(Bipartition),
    #[error("reduced family is not in form A")]
    NotFormA,
    #[error(transparent)]
    Ground(#[from] GroundError),
}

/// The form-A view of `D ∪ {X}` (trivial members dropped) for a 2-partitioned
/// side `X`. Position 1 is the part of `X` with the smaller least element.
pub fn reduce_form_b(side: Subset, d: &Family) -> Result<FormAView, ReduceError> {
    let atoms = d.atoms();
    if atoms.classes_meeting(side.bits()) > 2 {
        return Err(ReduceError::NotTwoPartitioned(side));
    }
    let x = canonicalize(side)?;
    if !d.crosses_any(&x) {
        return Err(ReduceError::TrivialX(x));
    }
    let mut parts: Vec<u64> = atoms
        .classes()
        .iter()
        .map(|c| c & side.bits())
        .filter(|&p| p != 0)
        .collect();
    parts.sort_by_key(|p| p.trailing_zeros());
    let e1 = parts[0].trailing_zeros() as usize + 1;
    let e2 = parts[1].trailing_zeros() as usize + 1;
    let mut all = d.clone();
    all.insert(x);
    let local = all.deduplicated().remove_trivial();
    detect_form_a_anchored(&local, e1, e2).ok_or(ReduceError::NotFormA)
}

/// Greedy pass in canonical order keeping members that cross no kept member.
pub fn maximal_laminar_subfamily(f: &Family) -> Family {
    let mut kept: Vec<Bipartition> = Vec::new();
    for m in f.iter() {
        if !kept.iter().any(|k| crosses(k, m)) {
            kept.push(*m);
        }
    }
    Family::new(f.ground(), kept).expect("same ground")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubgameStat {
    /// Atoms of the subgame family when it started.
    pub n: usize,
    pub iterations: u64,
}

/// Counters collected while playing; not part of the strategy state.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RedStats {
    pub subgames: Vec<SubgameStat>,
    /// Moves per branch `i..iv`.
    pub branches: [u64; 4],
    pub direct_inserts: u64,
    pub folds: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    General,
    FormB,
    FormA,
}

impl Phase {
    pub fn name(self) -> &'static str {
        match self {
            Phase::General => "general",
            Phase::FormB => "form_b",
            Phase::FormA => "form_a",
        }
    }
}

/// What the strategy last did, for verbose traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategySnapshot {
    pub phase: Phase,
    pub branch: Option<Branch>,
    pub d: Option<usize>,
    pub k: Option<usize>,
    pub atom_order: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
struct Subgame {
    ground: GroundSet,
    /// Expected subgame members, sorted and distinct.
    members: Vec<Bipartition>,
    anchors: (usize, usize),
    pending: Option<usize>,
    last_stage: Option<(usize, usize)>,
    last: Option<(Branch, Option<usize>)>,
    turns: u64,
    start_n: usize,
}

impl Subgame {
    fn new(ground: GroundSet, mut members: Vec<Bipartition>, anchors: (usize, usize)) -> Self {
        members.sort();
        members.dedup();
        Subgame {
            ground,
            members,
            anchors,
            pending: None,
            last_stage: None,
            last: None,
            turns: 0,
            start_n: 0,
        }
    }

    fn local(&self) -> Family {
        Family::new(self.ground, self.members.clone())
            .expect("same ground")
            .remove_trivial()
    }

    /// `None` once the subgame family is laminar.
    fn next(&mut self, f: &FunctionOracle) -> Result<Option<(FormAMove, FormAView)>, GameError> {
        let local = self.local();
        if local.is_empty() {
            return Ok(None);
        }
        let view = detect_form_a_anchored(&local, self.anchors.0, self.anchors.1)
            .ok_or_else(|| GameError::Internal(format!("subgame family {local} left form A")))?;
        if self.turns == 0 {
            self.start_n = view.n();
        }
        if self.pending.is_none() {
            let measure = (view.n() + view.b_members.len(), view.d);
            if let Some(prev) = self.last_stage {
                if measure >= prev {
                    return Err(GameError::Internal(format!(
                        "form-A progress stalled: (n+|B|, d) went from {prev:?} to {measure:?}"
                    )));
                }
            }
            self.last_stage = Some(measure);
        }
        let fm = form_a_move(&view, f, self.pending)?;
        self.last = Some((fm.branch, fm.k));
        self.turns += 1;
        Ok(Some((fm, view)))
    }

    /// Updates the expected members and the follow-up flag. When Blue
    /// returns neither member, no follow-up is scheduled (our reading of
    /// the adaptation to that variant).
    fn observe(&mut self, mv: &RedMove, blue: BlueChoice) -> Result<(), GameError> {
        let (a, b) = mv.replacement()?;
        self.members.retain(|m| *m != mv.x && *m != mv.y);
        self.members.push(a);
        self.members.push(b);
        if let Some(r) = blue.returned(mv) {
            self.members.push(r);
        }
        self.members.sort();
        self.members.dedup();
        self.pending = match (self.last, blue) {
            (Some((Branch::MeetAtK, Some(k))), BlueChoice::Y) if k > 2 => Some(k),
            _ => None,
        };
        Ok(())
    }

    fn key(&self, out: &mut String) {
        let _ = write!(out, "S{:?}{:?}", self.anchors, self.pending);
        push_list(out, &self.members);
    }
}

fn push_list(out: &mut String, list: &[Bipartition]) {
    out.push('[');
    for m in list {
        let _ = write!(out, "{:x},", m.bits());
    }
    out.push(']');
}

/// Keeps in each list only members present in `actual`, each actual member
/// going to the first list that holds it. Fails on untracked members.
fn reconcile(actual: &Family, lists: &mut [&mut Vec<Bipartition>]) -> Result<(), GameError> {
    let actual = actual.distinct();
    let mut taken = vec![false; actual.len()];
    for list in lists.iter_mut() {
        list.retain(|m| match actual.binary_search(m) {
            Ok(i) if !taken[i] => {
                taken[i] = true;
                true
            }
            _ => false,
        });
    }
    if let Some(i) = taken.iter().position(|t| !t) {
        return Err(GameError::Internal(format!("member {} is not tracked", actual[i])));
    }
    Ok(())
}

#[derive(Debug, Clone)]
struct Insertion {
    c: Vec<Bipartition>,
    d: Vec<Bipartition>,
    sub: Option<Subgame>,
}

/// The polynomial strategy of this crate; see the module docs.
#[derive(Debug, Clone, Default)]
pub struct PaperRed {
    started: bool,
    general_c: Vec<Bipartition>,
    general_b: Vec<Bipartition>,
    insertion: Option<Insertion>,
    stats: RedStats,
    snapshot: Option<StrategySnapshot>,
}

pub fn paper_red_strategy() -> PaperRed {
    PaperRed::default()
}

impl PaperRed {
    pub fn stats(&self) -> &RedStats {
        &self.stats
    }

    pub fn phase(&self) -> Phase {
        match &self.insertion {
            None => Phase::General,
            Some(Insertion { sub: None, .. }) => Phase::FormB,
            Some(_) => Phase::FormA,
        }
    }

    /// The state behind the most recent move.
    pub fn snapshot(&self) -> Option<&StrategySnapshot> {
        self.snapshot.as_ref()
    }

    fn start(&mut self, family: &Family) {
        let c = maximal_laminar_subfamily(&family.deduplicated());
        self.general_b = family.distinct().into_iter().filter(|m| !c.contains(m)).collect();
        self.general_c = c.distinct();
        self.started = true;
    }

    fn check_condition_b(ground: GroundSet, c: &[Bipartition], d: &[Bipartition]) -> Result<(), GameError> {
        let df = Family::new(ground, d.to_vec())?;
        if !df.is_laminar() {
            return Err(GameError::Internal(format!("inserted family {df} is not laminar")));
        }
        let atoms = df.atoms();
        let full = ground.full_mask();
        for w in c {
            if atoms.classes_meeting(w.bits()) > 2 && atoms.classes_meeting(!w.bits() & full) > 2 {
                return Err(GameError::Internal(format!(
                    "{w} is 2-partitioned on neither side for {df}"
                )));
            }
        }
        Ok(())
    }
}

impl RedStrategy for PaperRed {
    fn name(&self) -> &'static str {
        "paper"
    }

    fn next_move(&mut self, state: &GameState, f: &FunctionOracle) -> Result<RedMove, GameError> {
        let ground = state.family.ground();
        if !self.started {
            self.start(&state.family);
        }
        loop {
            let Some(ins) = self.insertion.as_mut() else {
                if self.general_b.is_empty() {
                    return Err(GameError::Internal("no member left to insert".into()));
                }
                let x = self.general_b.remove(0);
                self.insertion = Some(Insertion {
                    c: std::mem::take(&mut self.general_c),
                    d: vec![x],
                    sub: None,
                });
                continue;
            };
            if let Some(sub) = ins.sub.as_mut() {
                if let Some((fm, view)) = sub.next(f)? {
                    self.stats.branches[fm.branch.index()] += 1;
                    self.snapshot = Some(StrategySnapshot {
                        phase: Phase::FormA,
                        branch: Some(fm.branch),
                        d: Some(fm.d),
                        k: fm.k,
                        atom_order: view.atom_ids(),
                    });
                    return Ok(fm.mv);
                }
                self.stats.subgames.push(SubgameStat {
                    n: sub.start_n,
                    iterations: sub.turns,
                });
                self.stats.folds += 1;
                ins.d = std::mem::take(&mut sub.members);
                ins.sub = None;
                Self::check_condition_b(ground, &ins.c, &ins.d)?;
                continue;
            }
            if ins.c.is_empty() {
                let ins = self.insertion.take().expect("present");
                self.general_c = ins.d;
                continue;
            }
            let cf = Family::new(ground, ins.c.clone())?;
            let df = Family::new(ground, ins.d.clone())?;
            let (z, side) = select_maximal(&cf, &df).ok_or_else(|| {
                GameError::Internal(format!("no member of {cf} is 2-partitioned for {df}"))
            })?;
            ins.c.retain(|m| *m != z);
            if !df.crosses_any(&z) {
                self.stats.direct_inserts += 1;
                ins.d.push(z);
                ins.d.sort();
                Self::check_condition_b(ground, &ins.c, &ins.d)?;
                continue;
            }
            let view = reduce_form_b(side, &df).map_err(|e| GameError::Internal(e.to_string()))?;
            let anchors = (
                view.atom_order[0].trailing_zeros() as usize + 1,
                view.atom_order[1].trailing_zeros() as usize + 1,
            );
            let mut members = ins.d.clone();
            members.push(z);
            ins.sub = Some(Subgame::new(ground, members, anchors));
        }
    }

    fn observe(&mut self, mv: &RedMove, blue: BlueChoice, after: &Family) -> Result<(), GameError> {
        match self.insertion.as_mut() {
            Some(ins) => {
                let sub_list = match ins.sub.as_mut() {
                    Some(sub) => {
                        sub.observe(mv, blue)?;
                        &mut sub.members
                    }
                    None => &mut ins.d,
                };
                reconcile(after, &mut [sub_list, &mut ins.c, &mut self.general_b])
            }
            None => reconcile(after, &mut [&mut self.general_c, &mut self.general_b]),
        }
    }

    fn state_key(&self) -> String {
        let mut out = String::new();
        out.push(if self.started { 'S' } else { 's' });
        push_list(&mut out, &self.general_c);
        push_list(&mut out, &self.general_b);
        if let Some(ins) = &self.insertion {
            out.push('I');
            push_list(&mut out, &ins.c);
            push_list(&mut out, &ins.d);
            if let Some(sub) = &ins.sub {
                sub.key(&mut out);
            }
        }
        out
    }
}

/// Plays a single form-A subgame on the whole family with fixed anchors.
#[derive(Debug, Clone)]
pub struct FormARed {
    anchors: (usize, usize),
    sub: Option<Subgame>,
}

pub fn form_a_strategy(anchor1: usize, anchor2: usize) -> FormARed {
    FormARed {
        anchors: (anchor1, anchor2),
        sub: None,
    }
}

impl FormARed {
    /// Moves issued so far.
    pub fn turns(&self) -> u64 {
        self.sub.as_ref().map_or(0, |s| s.turns)
    }
}

impl RedStrategy for FormARed {
    fn name(&self) -> &'static str {
        "form-a"
    }

    fn next_move(&mut self, state: &GameState, f: &FunctionOracle) -> Result<RedMove, GameError> {
        let anchors = self.anchors;
        let sub = self
            .sub
            .get_or_insert_with(|| Subgame::new(state.family.ground(), state.family.distinct(), anchors));
        match sub.next(f)? {
            Some((fm, _)) => Ok(fm.mv),
            None => Err(GameError::Internal("asked to move on a laminar family".into())),
        }
    }

    fn observe(&mut self, mv: &RedMove, blue: BlueChoice, after: &Family) -> Result<(), GameError> {
        let sub = self
            .sub
            .as_mut()
            .ok_or_else(|| GameError::Internal("observe before the first move".into()))?;
        sub.observe(mv, blue)?;
        reconcile(after, &mut [&mut sub.members])
    }

    fn state_key(&self) -> String {
        let mut out = String::new();
        if let Some(sub) = &self.sub {
            sub.key(&mut out);
        }
        out
    }
}
