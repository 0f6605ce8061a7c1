//! Bipartitions of a small ground set `{1, ..., n}` and the family-level
//! operations the game is built from: crossing tests, corner pairs,
//! laminarity, atoms, trivial-member removal and atom contraction.
//!
//! Element `i` is stored as bit `i - 1` of a `u64`, so `n <= 64`.
//! A [`Bipartition`] always stores the side that contains element 1.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Largest supported ground set.
pub const MAX_GROUND: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroundError {
    #[error("ground set size {0} is outside 1..=64")]
    InvalidGround(usize),
    #[error("subset {0} is not a nonempty proper subset of the ground set")]
    InvalidBipartition(Subset),
    #[error("element {element} is outside the ground set 1..={n}")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("ground sets differ (n={0} vs n={1})")]
    GroundMismatch(usize, usize),
    #[error("{0} and {1} do not cross")]
    NotCrossing(Bipartition, Bipartition),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self, GroundError> {
        if n == 0 || n > MAX_GROUND {
            return Err(GroundError::InvalidGround(n));
        }
        Ok(GroundSet { n })
    }

    pub fn size(self) -> usize {
        self.n
    }

    pub fn full_mask(self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    fn check(self, other: GroundSet) -> Result<(), GroundError> {
        if self != other {
            Err(GroundError::GroundMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    /// All bipartitions of the ground set in canonical (lexicographic) order.
    pub fn bipartitions(self) -> Vec<Bipartition> {
        assert!(self.n <= 24, "refusing to enumerate 2^{} bipartitions", self.n - 1);
        let full = self.full_mask();
        let mut out: Vec<Bipartition> = (0..(1u64 << (self.n - 1)))
            .map(|m| (m << 1) | 1)
            .filter(|&bits| bits != full)
            .map(|bits| Bipartition { side: bits, ground: self })
            .collect();
        out.sort();
        out
    }
}

/// Lexicographic comparison of two subsets viewed as ascending id lists.
pub fn lex_cmp(a: u64, b: u64) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let p = diff.trailing_zeros();
    let above = if p == 63 { 0 } else { !((1u64 << (p + 1)) - 1) };
    if a & (1u64 << p) != 0 {
        // a continues with p; b continues with something larger or stops.
        if b & above != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    } else if a & above != 0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn fmt_bits(bits: u64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{{")?;
    let mut first = true;
    for i in bit_ids(bits) {
        if !first {
            write!(f, ",")?;
        }
        first = false;
        write!(f, "{i}")?;
    }
    write!(f, "}}")
}

/// 1-based ids of the set bits, ascending.
pub fn bit_ids(bits: u64) -> impl Iterator<Item = usize> {
    let mut rest = bits;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i + 1)
        }
    })
}

/// An arbitrary subset of the ground set (possibly empty or full).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Subset {
    bits: u64,
    ground: GroundSet,
}

impl Subset {
    pub fn from_bits(bits: u64, ground: GroundSet) -> Self {
        Subset {
            bits: bits & ground.full_mask(),
            ground,
        }
    }

    pub fn from_ids(ids: &[usize], ground: GroundSet) -> Result<Self, GroundError> {
        let mut bits = 0u64;
        for &i in ids {
            if i == 0 || i > ground.n {
                return Err(GroundError::ElementOutOfRange {
                    element: i,
                    n: ground.n,
                });
            }
            bits |= 1u64 << (i - 1);
        }
        Ok(Subset { bits, ground })
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn ground(self) -> GroundSet {
        self.ground
    }

    pub fn ids(self) -> Vec<usize> {
        bit_ids(self.bits).collect()
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, element: usize) -> bool {
        element >= 1 && element <= self.ground.n && self.bits & (1u64 << (element - 1)) != 0
    }

    pub fn complement(self) -> Subset {
        Subset {
            bits: !self.bits & self.ground.full_mask(),
            ground: self.ground,
        }
    }

    pub fn is_proper_nonempty(self) -> bool {
        self.bits != 0 && self.bits != self.ground.full_mask()
    }

    /// Canonical bipartition `{S, V \ S}`.
    pub fn to_bipartition(self) -> Result<Bipartition, GroundError> {
        canonicalize(self)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_bits(self.bits, f)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_bits(self.bits, f)
    }
}

/// A bipartition `{X, V \ X}` stored by the side containing element 1.
///
/// Ordering is lexicographic on the stored side's ascending id list; this is
/// the "canonical order" used for every tie-break in the crate.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition {
    side: u64,
    ground: GroundSet,
}

/// Returns the bipartition of `subset`, stored by the side containing 1.
pub fn canonicalize(subset: Subset) -> Result<Bipartition, GroundError> {
    if !subset.is_proper_nonempty() {
        return Err(GroundError::InvalidBipartition(subset));
    }
    let side = if subset.bits & 1 == 1 {
        subset.bits
    } else {
        !subset.bits & subset.ground.full_mask()
    };
    Ok(Bipartition {
        side,
        ground: subset.ground,
    })
}

impl Bipartition {
    pub fn from_ids(ids: &[usize], ground: GroundSet) -> Result<Self, GroundError> {
        canonicalize(Subset::from_ids(ids, ground)?)
    }

    pub fn from_bits(bits: u64, ground: GroundSet) -> Result<Self, GroundError> {
        canonicalize(Subset::from_bits(bits, ground))
    }

    /// The stored side (contains element 1).
    pub fn side(self) -> Subset {
        Subset {
            bits: self.side,
            ground: self.ground,
        }
    }

    pub fn bits(self) -> u64 {
        self.side
    }

    pub fn ground(self) -> GroundSet {
        self.ground
    }

    /// `|X| * |V \ X|`, the number of element pairs the bipartition separates.
    pub fn separation_count(self) -> u64 {
        let k = self.side.count_ones() as u64;
        k * (self.ground.n as u64 - k)
    }

    /// True if the bipartition separates elements `i` and `j`.
    pub fn separates(self, i: usize, j: usize) -> bool {
        let s = self.side();
        s.contains(i) != s.contains(j)
    }

    /// True when one side is a single element.
    pub fn has_singleton_side(self) -> bool {
        let k = self.side.count_ones() as usize;
        k == 1 || k + 1 == self.ground.n
    }
}

impl PartialOrd for Bipartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bipartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ground
            .cmp(&other.ground)
            .then_with(|| lex_cmp(self.side, other.side))
    }
}

impl fmt::Debug for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_bits(self.side, f)
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_bits(self.side, f)
    }
}

fn crossing_bits(x: u64, y: u64, full: u64) -> bool {
    x & y != 0 && x & !y != 0 && y & !x != 0 && (x | y) != full
}

pub fn is_crossing(x: &Bipartition, y: &Bipartition) -> Result<bool, GroundError> {
    x.ground.check(y.ground)?;
    Ok(crossing_bits(x.side, y.side, x.ground.full_mask()))
}

/// Crossing test for bipartitions already known to share a ground set.
pub(crate) fn crosses(x: &Bipartition, y: &Bipartition) -> bool {
    crossing_bits(x.side, y.side, x.ground.full_mask())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairChoice {
    /// `(X ∩ Y, X ∪ Y)`
    MeetJoin,
    /// `(X \ Y, Y \ X)`
    DiffPair,
}

impl PairChoice {
    pub fn name(self) -> &'static str {
        match self {
            PairChoice::MeetJoin => "meet_join",
            PairChoice::DiffPair => "diff_pair",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "meet_join" => Some(PairChoice::MeetJoin),
            "diff_pair" => Some(PairChoice::DiffPair),
            _ => None,
        }
    }
}

/// The two candidate replacements for a crossing pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerPairs {
    pub meet_join: (Bipartition, Bipartition),
    pub diff_pair: (Bipartition, Bipartition),
}

impl CornerPairs {
    pub fn get(&self, choice: PairChoice) -> (Bipartition, Bipartition) {
        match choice {
            PairChoice::MeetJoin => self.meet_join,
            PairChoice::DiffPair => self.diff_pair,
        }
    }

    /// Which choice yields the unordered pair `{a, b}`, if any.
    pub fn choice_for(&self, a: Bipartition, b: Bipartition) -> Option<PairChoice> {
        let same = |p: (Bipartition, Bipartition)| (p.0 == a && p.1 == b) || (p.0 == b && p.1 == a);
        if same(self.meet_join) {
            Some(PairChoice::MeetJoin)
        } else if same(self.diff_pair) {
            Some(PairChoice::DiffPair)
        } else {
            None
        }
    }

    /// The two pairs as an order-free value.
    pub fn as_set(&self) -> [(Bipartition, Bipartition); 2] {
        let norm = |(a, b): (Bipartition, Bipartition)| if a <= b { (a, b) } else { (b, a) };
        let mut out = [norm(self.meet_join), norm(self.diff_pair)];
        out.sort();
        out
    }
}

/// Corner pairs computed on the given representatives `x` and `y`.
pub fn corner_pairs(x: Subset, y: Subset) -> Result<CornerPairs, GroundError> {
    x.ground.check(y.ground)?;
    let xb = canonicalize(x)?;
    let yb = canonicalize(y)?;
    if !crosses(&xb, &yb) {
        return Err(GroundError::NotCrossing(xb, yb));
    }
    let g = x.ground;
    let mk = |bits| canonicalize(Subset::from_bits(bits, g)).expect("quadrants of a crossing pair are proper");
    Ok(CornerPairs {
        meet_join: (mk(x.bits & y.bits), mk(x.bits | y.bits)),
        diff_pair: (mk(x.bits & !y.bits), mk(y.bits & !x.bits)),
    })
}

/// Corner pairs on the stored (canonical) sides.
pub fn canonical_corner_pairs(x: &Bipartition, y: &Bipartition) -> Result<CornerPairs, GroundError> {
    corner_pairs(x.side(), y.side())
}

/// Partition of the ground set into atoms of a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomPartition {
    ground: GroundSet,
    classes: Vec<u64>,
    class_of: Vec<usize>,
}

impl AtomPartition {
    /// Classes as bit masks, ordered by smallest element.
    pub fn classes(&self) -> &[u64] {
        &self.classes
    }

    pub fn class_subsets(&self) -> Vec<Subset> {
        self.classes
            .iter()
            .map(|&b| Subset::from_bits(b, self.ground))
            .collect()
    }

    /// Index of the class containing element `i` (1-based id).
    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element - 1]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Number of classes meeting `bits`.
    pub fn classes_meeting(&self, bits: u64) -> usize {
        self.classes.iter().filter(|&&c| c & bits != 0).count()
    }

    pub fn same_class(&self, i: usize, j: usize) -> bool {
        self.class_of(i) == self.class_of(j)
    }
}

/// Multiset of bipartitions over one ground set, kept in canonical order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Family {
    ground: GroundSet,
    members: Vec<Bipartition>,
}

impl Family {
    pub fn empty(ground: GroundSet) -> Self {
        Family {
            ground,
            members: Vec::new(),
        }
    }

    pub fn new(ground: GroundSet, members: Vec<Bipartition>) -> Result<Self, GroundError> {
        for m in &members {
            ground.check(m.ground)?;
        }
        let mut members = members;
        members.sort();
        Ok(Family { ground, members })
    }

    pub fn from_id_sets(ground: GroundSet, sets: &[Vec<usize>]) -> Result<Self, GroundError> {
        let members = sets
            .iter()
            .map(|s| Bipartition::from_ids(s, ground))
            .collect::<Result<Vec<_>, _>>()?;
        Family::new(ground, members)
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn members(&self) -> &[Bipartition] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Bipartition> {
        self.members.iter()
    }

    pub fn count(&self, b: &Bipartition) -> usize {
        self.members.iter().filter(|m| *m == b).count()
    }

    pub fn contains(&self, b: &Bipartition) -> bool {
        self.members.binary_search(b).is_ok()
    }

    pub fn insert(&mut self, b: Bipartition) {
        debug_assert_eq!(b.ground, self.ground);
        let pos = self.members.partition_point(|m| *m <= b);
        self.members.insert(pos, b);
    }

    /// Removes one copy of `b`; false if absent.
    pub fn remove_one(&mut self, b: &Bipartition) -> bool {
        match self.members.binary_search(b) {
            Ok(pos) => {
                self.members.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// Distinct members, in canonical order.
    pub fn distinct(&self) -> Vec<Bipartition> {
        let mut v = self.members.clone();
        v.dedup();
        v
    }

    /// Family with duplicate copies merged.
    pub fn deduplicated(&self) -> Family {
        Family {
            ground: self.ground,
            members: self.distinct(),
        }
    }

    pub fn is_laminar(&self) -> bool {
        self.first_crossing_pair().is_none()
    }

    /// First crossing pair `(i, j)`, `i < j`, in canonical order.
    pub fn first_crossing_pair(&self) -> Option<(Bipartition, Bipartition)> {
        let d = self.distinct();
        for (i, x) in d.iter().enumerate() {
            for y in &d[i + 1..] {
                if crosses(x, y) {
                    return Some((*x, *y));
                }
            }
        }
        None
    }

    /// Does `b` cross any member?
    pub fn crosses_any(&self, b: &Bipartition) -> bool {
        self.members.iter().any(|m| crosses(m, b))
    }

    pub fn atoms(&self) -> AtomPartition {
        atoms_of(self.ground, self.members.iter().map(|m| m.side))
    }

    /// Drops every member that crosses no other member.
    pub fn remove_trivial(&self) -> Family {
        let d = self.distinct();
        let keep: Vec<Bipartition> = d
            .iter()
            .filter(|x| d.iter().any(|y| crosses(x, y)))
            .copied()
            .collect();
        Family {
            ground: self.ground,
            members: self
                .members
                .iter()
                .filter(|m| keep.binary_search(m).is_ok())
                .copied()
                .collect(),
        }
    }

    pub fn contract_atoms(&self) -> Contraction {
        let atoms = self.atoms();
        let ground = GroundSet::new(atoms.len()).expect("at least one atom");
        let members = self
            .members
            .iter()
            .map(|m| {
                let bits = image_bits(&atoms, m.side);
                Bipartition::from_bits(bits, ground).expect("members are unions of atoms")
            })
            .collect();
        let family = Family::new(ground, members).expect("same ground");
        Contraction { family, atoms }
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a Bipartition;
    type IntoIter = std::slice::Iter<'a, Bipartition>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// Atoms induced by a collection of sides.
pub(crate) fn atoms_of(ground: GroundSet, sides: impl Iterator<Item = u64>) -> AtomPartition {
    let mut classes = vec![ground.full_mask()];
    for s in sides {
        let mut next = Vec::with_capacity(classes.len() + 1);
        for c in classes {
            let inside = c & s;
            let outside = c & !s;
            if inside != 0 {
                next.push(inside);
            }
            if outside != 0 {
                next.push(outside);
            }
        }
        classes = next;
    }
    classes.sort_by_key(|c| c.trailing_zeros());
    let mut class_of = vec![0; ground.n];
    for (k, c) in classes.iter().enumerate() {
        for i in bit_ids(*c) {
            class_of[i - 1] = k;
        }
    }
    AtomPartition {
        ground,
        classes,
        class_of,
    }
}

fn image_bits(atoms: &AtomPartition, side: u64) -> u64 {
    atoms
        .classes
        .iter()
        .enumerate()
        .filter(|(_, &c)| c & side != 0)
        .fold(0u64, |acc, (k, _)| acc | (1u64 << k))
}

/// A family rewritten over its atoms; atom `k` (0-based) becomes element `k + 1`.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub family: Family,
    pub atoms: AtomPartition,
}

impl Contraction {
    /// Original elements covered by a subset of the contracted ground set.
    pub fn expand(&self, contracted_bits: u64) -> u64 {
        bit_ids(contracted_bits).fold(0u64, |acc, k| acc | self.atoms.classes[k - 1])
    }

    /// Image of an original subset that is a union of atoms.
    pub fn image(&self, original_bits: u64) -> u64 {
        image_bits(&self.atoms, original_bits)
    }
}
