//! Weighted uncrossing of dual solutions.
//!
//! An uncrossing step moves `α = min(λ(X), λ(Y))` from a crossing pair to
//! one of its corner pairs. [`uncross_naive`] always takes the first crossing
//! pair; [`uncross_strategic`] lets the game strategy pick the pair, with Blue
//! returning whichever member keeps positive weight.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::functions::FunctionOracle;
use crate::game::{step, BlueChoice, GameConfig, GameError, GameState, RedStrategy};
use crate::ground::{canonical_corner_pairs, crosses, Bipartition, Family, GroundError, GroundSet, PairChoice};
use crate::redstrategy::{paper_red_strategy, RedStats};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UncrossError {
    #[error("weight {weight} of {set} is not positive")]
    NonPositiveWeight { set: Bipartition, weight: Rational },
    #[error("{0} is not in the support")]
    NotInSupport(Bipartition),
    #[error("{0} and {1} do not cross")]
    NotCrossing(Bipartition, Bipartition),
    #[error("exchange inequality fails for {x}, {y} with {pair:?}")]
    InequalityFails { x: Bipartition, y: Bipartition, pair: PairChoice },
    #[error("no corner pair of {x}, {y} satisfies the exchange inequality (f is not skew-supermodular)")]
    NoValidPair { x: Bipartition, y: Bipartition },
    #[error("support {support} differs from the game family {family}")]
    SupportMismatch { support: Family, family: Family },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Ground(#[from] GroundError),
}

/// Positive weights on bipartitions; absent means zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DualSolution {
    ground: GroundSet,
    weights: BTreeMap<Bipartition, Rational>,
}

impl DualSolution {
    pub fn empty(ground: GroundSet) -> Self {
        DualSolution {
            ground,
            weights: BTreeMap::new(),
        }
    }

    /// Repeated sets have their weights added.
    pub fn new(
        ground: GroundSet,
        entries: impl IntoIterator<Item = (Bipartition, Rational)>,
    ) -> Result<Self, UncrossError> {
        let mut lam = DualSolution::empty(ground);
        for (set, weight) in entries {
            if set.ground() != ground {
                return Err(GroundError::GroundMismatch(set.ground().size(), ground.size()).into());
            }
            if !weight.is_positive() {
                return Err(UncrossError::NonPositiveWeight { set, weight });
            }
            lam.add(set, &weight);
        }
        Ok(lam)
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn get(&self, x: &Bipartition) -> Rational {
        self.weights.get(x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bipartition, &Rational)> {
        self.weights.iter()
    }

    fn add(&mut self, x: Bipartition, delta: &Rational) {
        let w = self.get(&x) + delta;
        if w.is_zero() {
            self.weights.remove(&x);
        } else {
            debug_assert!(w.is_positive());
            self.weights.insert(x, w);
        }
    }

    pub fn support(&self) -> Family {
        Family::new(self.ground, self.weights.keys().copied().collect()).expect("same ground")
    }

    pub fn is_laminar(&self) -> bool {
        self.support().is_laminar()
    }

    /// Every weight multiplied by a positive `factor`.
    pub fn scaled(&self, factor: &Rational) -> DualSolution {
        assert!(factor.is_positive(), "scale factor must be positive");
        DualSolution {
            ground: self.ground,
            weights: self.weights.iter().map(|(k, v)| (*k, v * factor)).collect(),
        }
    }

    /// `Σ λ(Z) |Z| |V \ Z|`.
    pub fn potential(&self) -> Rational {
        self.weights
            .iter()
            .map(|(k, v)| v * Rational::from_integer(k.separation_count().into()))
            .sum()
    }

    /// Total weight of members separating `i` and `j`.
    pub fn separation_mass(&self, i: usize, j: usize) -> Rational {
        self.weights
            .iter()
            .filter(|(k, _)| k.separates(i, j))
            .map(|(_, v)| v.clone())
            .sum()
    }

    pub fn min_weight(&self) -> Option<Rational> {
        self.weights.values().min().cloned()
    }

    /// Least common multiple of the weight denominators.
    pub fn denominator_lcm(&self) -> num_bigint::BigInt {
        self.weights
            .values()
            .fold(num_bigint::BigInt::one(), |acc, v| acc.lcm(v.denom()))
    }

    /// `max_Z |λ(Z) - μ(Z)|`.
    pub fn distance(&self, other: &DualSolution) -> Rational {
        self.weights
            .keys()
            .chain(other.weights.keys())
            .map(|k| (self.get(k) - other.get(k)).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `self + t (other - self)`.
    pub fn toward(&self, other: &DualSolution, t: &Rational) -> DualSolution {
        let mut out = self.clone();
        for k in self.weights.keys().chain(other.weights.keys()) {
            let w = self.get(k) + t * (other.get(k) - self.get(k));
            if w.is_positive() {
                out.weights.insert(*k, w);
            } else {
                out.weights.remove(k);
            }
        }
        out
    }
}

impl fmt::Display for DualSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        write!(f, "}}")
    }
}

/// `Σ λ(X) f(X)`.
pub fn objective(lam: &DualSolution, f: &FunctionOracle) -> Rational {
    lam.iter().map(|(k, v)| v * f.peek(k)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncrossRecord {
    pub x: Bipartition,
    pub y: Bipartition,
    pub pair: PairChoice,
    pub alpha: Rational,
    pub blue_equivalent: BlueChoice,
}

/// The member that keeps positive weight after the step; none on a tie.
pub fn blue_from_lambda(lam: &DualSolution, x: &Bipartition, y: &Bipartition) -> BlueChoice {
    let (a, b) = (lam.get(x), lam.get(y));
    match a.cmp(&b) {
        std::cmp::Ordering::Greater => BlueChoice::X,
        std::cmp::Ordering::Less => BlueChoice::Y,
        std::cmp::Ordering::Equal => BlueChoice::None,
    }
}

pub fn uncross_step(
    lam: &DualSolution,
    f: &FunctionOracle,
    x: &Bipartition,
    y: &Bipartition,
    pair: PairChoice,
) -> Result<(DualSolution, UncrossRecord), UncrossError> {
    for z in [x, y] {
        if lam.get(z).is_zero() {
            return Err(UncrossError::NotInSupport(*z));
        }
    }
    if !crosses(x, y) {
        return Err(UncrossError::NotCrossing(*x, *y));
    }
    let (a, b) = canonical_corner_pairs(x, y)?.get(pair);
    if f.peek(x) + f.peek(y) > f.peek(&a) + f.peek(&b) {
        return Err(UncrossError::InequalityFails { x: *x, y: *y, pair });
    }
    let alpha = lam.get(x).min(lam.get(y));
    let blue = blue_from_lambda(lam, x, y);
    let mut next = lam.clone();
    next.add(*x, &-alpha.clone());
    next.add(*y, &-alpha.clone());
    next.add(a, &alpha);
    next.add(b, &alpha);
    Ok((
        next,
        UncrossRecord {
            x: *x,
            y: *y,
            pair,
            alpha,
            blue_equivalent: blue,
        },
    ))
}

#[derive(Debug, Clone)]
pub struct UncrossRun {
    pub result: DualSolution,
    pub records: Vec<UncrossRecord>,
    /// `λ` before every step and after the last one.
    pub history: Vec<DualSolution>,
}

impl UncrossRun {
    pub fn steps(&self) -> usize {
        self.records.len()
    }

    pub fn supports(&self) -> Vec<Family> {
        self.history.iter().map(|l| l.support()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct NaiveRun {
    pub run: UncrossRun,
    /// Weights are multiplied by this before counting potential.
    pub scale: num_bigint::BigInt,
    /// Potential of the scaled input; bounds the step count.
    pub initial_potential: Rational,
}

/// First crossing pair in canonical order; of the valid corner pairs, the
/// one giving the smaller potential (meet/join on ties).
pub fn uncross_naive(lam: &DualSolution, f: &FunctionOracle) -> Result<NaiveRun, UncrossError> {
    let scale = lam.denominator_lcm();
    let initial_potential = lam.potential() * Rational::from_integer(scale.clone());
    let mut cur = lam.clone();
    let mut records = Vec::new();
    let mut history = vec![cur.clone()];
    while let Some((x, y)) = cur.support().first_crossing_pair() {
        let cp = canonical_corner_pairs(&x, &y)?;
        let lhs = f.evaluate(&x) + f.evaluate(&y);
        let mut best: Option<(u64, PairChoice)> = None;
        for pair in [PairChoice::MeetJoin, PairChoice::DiffPair] {
            let (a, b) = cp.get(pair);
            if lhs <= f.evaluate(&a) + f.evaluate(&b) {
                let sep = a.separation_count() + b.separation_count();
                if best.is_none_or(|(s, _)| sep < s) {
                    best = Some((sep, pair));
                }
            }
        }
        let (_, pair) = best.ok_or(UncrossError::NoValidPair { x, y })?;
        let (next, rec) = uncross_step(&cur, f, &x, &y, pair)?;
        records.push(rec);
        history.push(next.clone());
        cur = next;
    }
    Ok(NaiveRun {
        run: UncrossRun {
            result: cur,
            records,
            history,
        },
        scale,
        initial_potential,
    })
}

#[derive(Debug, Clone)]
pub struct StrategicRun {
    pub run: UncrossRun,
    pub red_stats: RedStats,
}

/// Plays the game on the support with the winning strategy for Red and the
/// weights deciding Blue's answers.
pub fn uncross_strategic(lam: &DualSolution, f: &FunctionOracle) -> Result<StrategicRun, UncrossError> {
    let config = GameConfig { allow_none: true };
    let mut red = paper_red_strategy();
    let mut state = GameState::new(lam.support());
    let mut cur = lam.clone();
    let mut records = Vec::new();
    let mut history = vec![cur.clone()];
    while !state.family.is_laminar() {
        let mv = red.next_move(&state, f)?;
        let blue = blue_from_lambda(&cur, &mv.x, &mv.y);
        let next_state = step(&state, f, &mv, blue, config)?;
        let (next, rec) = uncross_step(&cur, f, &mv.x, &mv.y, mv.pair)?;
        let family = next_state.final_family();
        if family != next.support() {
            return Err(UncrossError::SupportMismatch {
                support: next.support(),
                family,
            });
        }
        red.observe(&mv, blue, &next_state.family)?;
        records.push(rec);
        history.push(next.clone());
        cur = next;
        state = next_state;
    }
    Ok(StrategicRun {
        run: UncrossRun {
            result: cur,
            records,
            history,
        },
        red_stats: red.stats().clone(),
    })
}
