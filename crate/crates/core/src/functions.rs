//! Nonnegative symmetric set functions on bipartitions, evaluated exactly.
//!
//! Four constructions are provided: explicit tables, requirement functions
//! `max { r(i, j) : i in X, j not in X }`, truncated connectivity deficiencies
//! `max(0, R - |δ(X)|)` and 0/1 indicators of cross-closed families.
//! [`verify_skew_supermodular`] checks the defining inequality over every
//! crossing pair.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::ground::{Bipartition, Family, GroundSet, Subset};
use crate::Rational;

/// Exhaustive verification is refused above this ground size.
pub const VERIFY_LIMIT: usize = 16;

/// A crossing pair on which `f(X) + f(Y) > max` of the two corner sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub x: Bipartition,
    pub y: Bipartition,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "X={} Y={} lhs={} rhs={}",
            self.x, self.y, self.lhs, self.rhs
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FunctionError {
    #[error("negative value {value} for {set}")]
    InvalidValue { set: Subset, value: Rational },
    #[error("not skew-supermodular: {0}")]
    NotSkewSupermodular(Box<Violation>),
    #[error("ground set of size {0} is too large for exhaustive verification")]
    TooLarge(usize),
    #[error("requirement matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("requirement r({0}, {1}) is negative")]
    NegativeRequirement(usize, usize),
    #[error("edge ({0}, {1}) is outside the ground set")]
    BadEdge(usize, usize),
}

/// Symmetric nonnegative requirement values `r(i, j)` for `i != j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementMatrix {
    n: usize,
    values: Vec<Rational>,
}

impl RequirementMatrix {
    pub fn zeros(n: usize) -> Self {
        RequirementMatrix {
            n,
            values: vec![Rational::zero(); n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Sets `r(i, j) = r(j, i) = value` (1-based ids).
    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        assert!(i != j && i >= 1 && j >= 1 && i <= self.n && j <= self.n);
        self.values[(i - 1) * self.n + (j - 1)] = value.clone();
        self.values[(j - 1) * self.n + (i - 1)] = value;
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.values[(i - 1) * self.n + (j - 1)]
    }

    /// Nonzero entries with `i < j`.
    pub fn entries(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in i + 1..=self.n {
                let v = self.get(i, j);
                if !v.is_zero() {
                    out.push((i, j, v.clone()));
                }
            }
        }
        out
    }

    fn check(&self) -> Result<(), FunctionError> {
        for i in 1..=self.n {
            for j in 1..=self.n {
                if i == j {
                    continue;
                }
                if self.get(i, j) != self.get(j, i) {
                    return Err(FunctionError::Asymmetric(i, j));
                }
                if self.get(i, j).is_negative() {
                    return Err(FunctionError::NegativeRequirement(i, j));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKindTag {
    Table,
    Requirement,
    Deficiency,
    Indicator,
}

impl OracleKindTag {
    pub fn name(self) -> &'static str {
        match self {
            OracleKindTag::Table => "table",
            OracleKindTag::Requirement => "requirement",
            OracleKindTag::Deficiency => "deficiency",
            OracleKindTag::Indicator => "indicator",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleKind {
    /// Canonical side bits → value; missing entries are 0.
    Table(HashMap<u64, Rational>),
    Requirement(RequirementMatrix),
    Deficiency { edges: Vec<(usize, usize)>, target: u64 },
    /// Canonical side bits of the members of the family.
    Indicator(HashSet<u64>),
}

/// Evaluation oracle with a call counter.
///
/// Cloning copies the current count into an independent counter, so parallel
/// games can each own a clone.
#[derive(Debug)]
pub struct FunctionOracle {
    ground: GroundSet,
    kind: OracleKind,
    calls: AtomicU64,
}

impl Clone for FunctionOracle {
    fn clone(&self) -> Self {
        FunctionOracle {
            ground: self.ground,
            kind: self.kind.clone(),
            calls: AtomicU64::new(self.eval_count()),
        }
    }
}

impl FunctionOracle {
    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn kind(&self) -> &OracleKind {
        &self.kind
    }

    pub fn kind_tag(&self) -> OracleKindTag {
        match self.kind {
            OracleKind::Table(_) => OracleKindTag::Table,
            OracleKind::Requirement(_) => OracleKindTag::Requirement,
            OracleKind::Deficiency { .. } => OracleKindTag::Deficiency,
            OracleKind::Indicator(_) => OracleKindTag::Indicator,
        }
    }

    pub fn eval_count(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Counted evaluation.
    pub fn evaluate(&self, x: &Bipartition) -> Rational {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.peek(x)
    }

    /// Uncounted evaluation, for engine validation and invariant checks.
    pub fn peek(&self, x: &Bipartition) -> Rational {
        debug_assert_eq!(x.ground(), self.ground);
        let side = x.bits();
        match &self.kind {
            OracleKind::Table(t) => t.get(&side).cloned().unwrap_or_else(Rational::zero),
            OracleKind::Requirement(r) => {
                let inside = x.side();
                let outside = inside.complement();
                let mut best = Rational::zero();
                for i in inside.ids() {
                    for j in outside.ids() {
                        let v = r.get(i, j);
                        if *v > best {
                            best = v.clone();
                        }
                    }
                }
                best
            }
            OracleKind::Deficiency { edges, target } => {
                let cut = edges
                    .iter()
                    .filter(|&&(u, v)| x.separates(u, v))
                    .count() as u64;
                Rational::from_integer(target.saturating_sub(cut).into())
            }
            OracleKind::Indicator(members) => {
                if members.contains(&side) {
                    Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                }
            }
        }
    }

    /// Counted evaluation of an arbitrary proper side.
    pub fn evaluate_side(&self, side: Subset) -> Rational {
        self.evaluate(&side.to_bipartition().expect("proper nonempty side"))
    }

    pub fn peek_side(&self, side: Subset) -> Rational {
        self.peek(&side.to_bipartition().expect("proper nonempty side"))
    }
}

fn finish(oracle: FunctionOracle, verify: bool) -> Result<FunctionOracle, FunctionError> {
    if verify {
        if let Some(v) = verify_skew_supermodular(&oracle)? {
            return Err(FunctionError::NotSkewSupermodular(Box::new(v)));
        }
    }
    Ok(oracle)
}

/// Table oracle. Keys may be either side; unspecified bipartitions are 0.
pub fn make_table(
    values: impl IntoIterator<Item = (Subset, Rational)>,
    ground: GroundSet,
    verify: bool,
) -> Result<FunctionOracle, FunctionError> {
    let mut table = HashMap::new();
    for (set, value) in values {
        if value.is_negative() {
            return Err(FunctionError::InvalidValue { set, value });
        }
        let b = set
            .to_bipartition()
            .map_err(|_| FunctionError::InvalidValue {
                set,
                value: value.clone(),
            })?;
        table.insert(b.bits(), value);
    }
    finish(
        FunctionOracle {
            ground,
            kind: OracleKind::Table(table),
            calls: AtomicU64::new(0),
        },
        verify,
    )
}

pub fn make_requirement(
    r: RequirementMatrix,
    ground: GroundSet,
) -> Result<FunctionOracle, FunctionError> {
    assert_eq!(r.size(), ground.size(), "requirement matrix size");
    r.check()?;
    Ok(FunctionOracle {
        ground,
        kind: OracleKind::Requirement(r),
        calls: AtomicU64::new(0),
    })
}

/// `f(X) = max(0, target - |δ(X)|)` for the given multigraph.
///
/// This is skew-supermodular whenever no cut exceeds `target`; when the
/// truncation at 0 is active it can fail, so callers that need the property
/// should run [`verify_skew_supermodular`].
pub fn make_deficiency(
    edges: Vec<(usize, usize)>,
    target: u64,
    ground: GroundSet,
) -> Result<FunctionOracle, FunctionError> {
    for &(u, v) in &edges {
        if u == 0 || v == 0 || u > ground.size() || v > ground.size() || u == v {
            return Err(FunctionError::BadEdge(u, v));
        }
    }
    Ok(FunctionOracle {
        ground,
        kind: OracleKind::Deficiency { edges, target },
        calls: AtomicU64::new(0),
    })
}

/// 0/1 oracle of a family; verification succeeds iff the family is cross-closed.
pub fn make_indicator(
    family: &Family,
    ground: GroundSet,
    verify: bool,
) -> Result<FunctionOracle, FunctionError> {
    let members = family.iter().map(|b| b.bits()).collect();
    finish(
        FunctionOracle {
            ground,
            kind: OracleKind::Indicator(members),
            calls: AtomicU64::new(0),
        },
        verify,
    )
}

/// Checks every crossing pair. Returns the violation with the largest excess
/// `lhs - rhs`, the first one in canonical pair order among equals.
pub fn verify_skew_supermodular(f: &FunctionOracle) -> Result<Option<Violation>, FunctionError> {
    let ground = f.ground();
    if ground.size() > VERIFY_LIMIT {
        return Err(FunctionError::TooLarge(ground.size()));
    }
    if ground.size() < 4 {
        // no crossing pairs exist
        return Ok(None);
    }
    let full = ground.full_mask();
    let sides: Vec<u64> = ground.bipartitions().iter().map(|b| b.bits()).collect();
    let table: Vec<Rational> = (0..=full)
        .map(|bits| {
            if bits == 0 || bits == full {
                Rational::zero()
            } else {
                f.peek_side(Subset::from_bits(bits, ground))
            }
        })
        .collect();
    let found = match scaled_integers(&table) {
        Some(ints) => worst_pair(&sides, full, &ints),
        None => worst_pair(&sides, full, &table),
    };
    Ok(found.map(|(x, y)| {
        let v = |bits: u64| &table[bits as usize];
        let lhs = v(x) + v(y);
        let mj = v(x & y) + v(x | y);
        let dp = v(x & !y & full) + v(y & !x & full);
        Violation {
            x: Bipartition::from_bits(x, ground).expect("canonical side"),
            y: Bipartition::from_bits(y, ground).expect("canonical side"),
            lhs,
            rhs: mj.max(dp),
        }
    }))
}

/// The table over a common denominator, if every entry then fits comfortably in `i64`.
fn scaled_integers(table: &[Rational]) -> Option<Vec<i64>> {
    let lcm = table.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let limit = BigInt::from(1i64 << 60);
    table
        .iter()
        .map(|v| {
            let scaled = v.numer() * (&lcm / v.denom());
            if scaled.abs() < limit {
                scaled.to_i64()
            } else {
                None
            }
        })
        .collect()
}

/// Crossing pair of canonical sides with the largest positive excess, first in
/// the order of `sides` among equals.
fn worst_pair<T>(sides: &[u64], full: u64, table: &[T]) -> Option<(u64, u64)>
where
    T: Clone + Ord + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let v = |bits: u64| table[bits as usize].clone();
    let mut worst: Option<(T, u64, u64)> = None;
    for (i, &x) in sides.iter().enumerate() {
        for &y in &sides[i + 1..] {
            let (xy, yx, out) = (x & !y, y & !x, full & !(x | y));
            // both sides contain element 1, so x & y is never empty
            if xy == 0 || yx == 0 || out == 0 {
                continue;
            }
            let lhs = v(x) + v(y);
            let mj = v(x & y) + v(x | y);
            let dp = v(xy) + v(yx);
            let rhs = if mj >= dp { mj } else { dp };
            if lhs > rhs {
                let excess = lhs - rhs;
                if worst.as_ref().is_none_or(|(w, _, _)| excess > *w) {
                    worst = Some((excess, x, y));
                }
            }
        }
    }
    worst.map(|(_, x, y)| (x, y))
}
