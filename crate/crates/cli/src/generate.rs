//! Seeded instance generation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use uncrossing::functions::{verify_skew_supermodular, FunctionError, VERIFY_LIMIT};
use uncrossing::ground::{Bipartition, GroundSet};

use crate::format::{FunctionSpec, InstanceFile, LpSpec, RequirementEntry, WeightedSet};

/// Largest ground set that gets an `lp` section.
pub const LP_LIMIT: usize = 8;
/// Attempts for kinds that can fail verification.
pub const RETRY_BUDGET: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Requirement,
    Deficiency,
    Indicator,
}

#[derive(Debug, Error)]
pub enum GenError {
    #[error("ground set size {0} is outside 2..={VERIFY_LIMIT}")]
    BadSize(usize),
    #[error("no verified instance after {0} attempts")]
    Exhausted(usize),
    #[error(transparent)]
    Format(#[from] crate::format::FormatError),
    #[error(transparent)]
    Function(#[from] FunctionError),
}

fn random_bipartition(rng: &mut ChaCha8Rng, ground: GroundSet) -> Bipartition {
    let full = ground.full_mask();
    loop {
        let bits = rng.gen::<u64>() & full;
        if let Ok(b) = Bipartition::from_bits(bits, ground) {
            return b;
        }
    }
}

fn distinct_bipartitions(rng: &mut ChaCha8Rng, ground: GroundSet, count: usize) -> Vec<Bipartition> {
    let n = ground.size();
    let available = (1u64 << (n - 1)) - 1;
    let count = (count as u64).min(available) as usize;
    let mut out: Vec<Bipartition> = Vec::with_capacity(count);
    if n <= 12 && 2 * count as u64 > available {
        let mut all = ground.bipartitions();
        all.shuffle(rng);
        all.truncate(count);
        return all;
    }
    while out.len() < count {
        let b = random_bipartition(rng, ground);
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out
}

fn requirement_entries(rng: &mut ChaCha8Rng, n: usize, density: f64, max: u32) -> Vec<RequirementEntry> {
    let mut entries = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.gen_bool(density) {
                entries.push(RequirementEntry {
                    i,
                    j,
                    value: rng.gen_range(1..=max).to_string(),
                });
            }
        }
    }
    entries
}

fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<[usize; 2]> {
    let mut edges = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.gen_bool(p) {
                edges.push([i, j]);
            }
        }
    }
    edges
}

/// Spanning tree on a random order plus about `n / 2` extra edges.
fn connected_edges(rng: &mut ChaCha8Rng, n: usize) -> Vec<[usize; 2]> {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut edges: Vec<[usize; 2]> = Vec::new();
    for k in 1..n {
        let other = order[rng.gen_range(0..k)];
        let (u, v) = (order[k].min(other), order[k].max(other));
        edges.push([u, v]);
    }
    let possible = n * (n - 1) / 2;
    let target = (edges.len() + n / 2).min(possible);
    while edges.len() < target {
        let u = rng.gen_range(1..=n);
        let v = rng.gen_range(1..=n);
        if u == v {
            continue;
        }
        let e = [u.min(v), u.max(v)];
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    edges.sort();
    edges
}

fn verified(file: &InstanceFile) -> Result<bool, GenError> {
    let inst = file.build()?;
    Ok(verify_skew_supermodular(&inst.f)?.is_none())
}

/// Deterministic in `(n, family_size, kind, seed)`.
pub fn generate(n: usize, family_size: usize, kind: Kind, seed: u64) -> Result<InstanceFile, GenError> {
    if !(2..=VERIFY_LIMIT).contains(&n) {
        return Err(GenError::BadSize(n));
    }
    let ground = GroundSet::new(n).expect("size checked");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut function = None;
    for _ in 0..RETRY_BUDGET {
        let candidate = match kind {
            Kind::Requirement => FunctionSpec::Requirement {
                entries: requirement_entries(&mut rng, n, 0.6, 4),
            },
            Kind::Indicator => indicator_of(ground, &requirement_entries(&mut rng, n, 0.3, 1)),
            Kind::Deficiency => FunctionSpec::Deficiency {
                edges: random_edges(&mut rng, n, 0.5),
                target: rng.gen_range(1..=4),
            },
        };
        let probe = InstanceFile {
            ground_set_size: n,
            function: candidate,
            family: Vec::new(),
            dual: None,
            lp: None,
        };
        if verified(&probe)? {
            function = Some(probe.function);
            break;
        }
    }
    let function = function.ok_or(GenError::Exhausted(RETRY_BUDGET))?;
    let members = distinct_bipartitions(&mut rng, ground, family_size);
    let family: Vec<Vec<usize>> = members.iter().map(|b| b.side().ids()).collect();
    let dual = (!members.is_empty()).then(|| {
        members
            .iter()
            .map(|b| WeightedSet {
                set: b.side().ids(),
                weight: rng.gen_range(1..=9u32).to_string(),
            })
            .collect()
    });
    let lp = (n <= LP_LIMIT).then(|| {
        let edges = connected_edges(&mut rng, n);
        let costs = edges.iter().map(|_| rng.gen_range(1..=5u32).to_string()).collect();
        LpSpec { edges, costs }
    });
    Ok(InstanceFile {
        ground_set_size: n,
        function,
        family,
        dual,
        lp,
    })
}

/// The support of a 0/1 requirement function as an indicator family. Such a
/// support is cross-closed because the requirement function is skew-supermodular.
fn indicator_of(ground: GroundSet, entries: &[RequirementEntry]) -> FunctionSpec {
    let family = ground
        .bipartitions()
        .into_iter()
        .filter(|b| entries.iter().any(|e| b.separates(e.i, e.j)))
        .map(|b| b.side().ids())
        .collect();
    FunctionSpec::Indicator { family }
}
