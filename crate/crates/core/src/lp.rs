//! Cut-covering linear programs at desk scale.
//!
//! Primal: minimise `Σ a(e) x(e)` subject to `x(δX) >= f(X)` for every
//! bipartition. Dual: maximise `Σ λ(X) f(X)` subject to
//! `Σ_{X : e ∈ δX} λ(X) <= a(e)` for every edge.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use thiserror::Error;

use crate::functions::{FunctionOracle, VERIFY_LIMIT};
use crate::ground::{Bipartition, GroundSet};
use crate::uncross::{objective, uncross_strategic, DualSolution, UncrossError};
use crate::Rational;

/// Largest ground set accepted by [`solve_dual_exact`].
pub const DUAL_SOLVE_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("ground set of size {0} is too large")]
    TooLarge(usize),
    #[error("edge ({0}, {1}) is outside the ground set or a loop")]
    BadEdge(usize, usize),
    #[error("cost of edge {0} is negative")]
    NegativeCost(usize),
    #[error("{0} edges but {1} costs")]
    CostCount(usize, usize),
    #[error("the dual is unbounded")]
    Unbounded,
    #[error("the starting solution is already optimal")]
    NothingToImprove,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Uncross(#[from] UncrossError),
}

#[derive(Debug, Clone)]
pub struct CutCoveringInstance {
    pub ground: GroundSet,
    pub edges: Vec<(usize, usize)>,
    pub costs: Vec<Rational>,
    pub f: FunctionOracle,
}

impl CutCoveringInstance {
    pub fn new(
        ground: GroundSet,
        edges: Vec<(usize, usize)>,
        costs: Vec<Rational>,
        f: FunctionOracle,
    ) -> Result<Self, LpError> {
        if edges.len() != costs.len() {
            return Err(LpError::CostCount(edges.len(), costs.len()));
        }
        let n = ground.size();
        for &(u, v) in &edges {
            if u == v || u == 0 || v == 0 || u > n || v > n {
                return Err(LpError::BadEdge(u, v));
            }
        }
        if let Some(i) = costs.iter().position(|c| c.is_negative()) {
            return Err(LpError::NegativeCost(i));
        }
        Ok(CutCoveringInstance { ground, edges, costs, f })
    }

    fn in_cut(&self, e: usize, x: &Bipartition) -> bool {
        let (u, v) = self.edges[e];
        x.separates(u, v)
    }

    pub fn primal_cost(&self, x: &[Rational]) -> Rational {
        self.costs.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

/// The first bipartition in canonical order whose covering constraint
/// fails, or `None` when `x` is feasible.
pub fn primal_feasible(inst: &CutCoveringInstance, x: &[Rational]) -> Result<Option<Bipartition>, LpError> {
    let n = inst.ground.size();
    if n > VERIFY_LIMIT {
        return Err(LpError::TooLarge(n));
    }
    if x.len() != inst.edges.len() || x.iter().any(|v| v.is_negative()) {
        return Err(LpError::InvalidConfig("x must be nonnegative with one entry per edge".into()));
    }
    for b in inst.ground.bipartitions() {
        let cover: Rational = (0..inst.edges.len())
            .filter(|&e| inst.in_cut(e, &b))
            .map(|e| x[e].clone())
            .sum();
        if cover < inst.f.peek(&b) {
            return Ok(Some(b));
        }
    }
    Ok(None)
}

/// The first edge whose capacity is exceeded, or `None` when feasible.
pub fn dual_feasible(inst: &CutCoveringInstance, lam: &DualSolution) -> Option<usize> {
    (0..inst.edges.len()).find(|&e| {
        let load: Rational = lam.iter().filter(|(x, _)| inst.in_cut(e, x)).map(|(_, w)| w.clone()).sum();
        load > inst.costs[e]
    })
}

/// Maximises `c·y` subject to `A y <= b`, `y >= 0`, with `b >= 0`, by the
/// simplex method with Bland's rule on a dense exact tableau.
pub fn simplex_max(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<Vec<Rational>, LpError> {
    let m = a.len();
    let nv = c.len();
    let width = nv + m;
    let mut t: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r.push(b[i].clone());
            r
        })
        .collect();
    let mut obj: Vec<Rational> = c.iter().cloned().chain((0..=m).map(|_| Rational::zero())).collect();
    let mut basis: Vec<usize> = (nv..width).collect();
    assert!(b.iter().all(|v| !v.is_negative()), "slack basis must be feasible");

    while let Some(enter) = (0..width).find(|&j| obj[j].is_positive()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.ok_or(LpError::Unbounded)?;
        let p = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let factor = row[enter].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &factor * pv;
                }
            }
        }
        let factor = obj[enter].clone();
        for (v, pv) in obj.iter_mut().zip(&pivot_row) {
            *v -= &factor * pv;
        }
        basis[r] = enter;
    }
    let mut y = vec![Rational::zero(); nv];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < nv {
            y[bi] = t[i][width].clone();
        }
    }
    Ok(y)
}

/// The dual as dense data: one column per bipartition, one row per edge.
pub fn dual_matrix(inst: &CutCoveringInstance) -> (Vec<Bipartition>, Vec<Vec<Rational>>, Vec<Rational>) {
    let cols = inst.ground.bipartitions();
    let a = (0..inst.edges.len())
        .map(|e| {
            cols.iter()
                .map(|x| if inst.in_cut(e, x) { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let c = cols.iter().map(|x| inst.f.peek(x)).collect();
    (cols, a, c)
}

/// An optimal dual solution.
pub fn solve_dual_exact(inst: &CutCoveringInstance) -> Result<DualSolution, LpError> {
    let n = inst.ground.size();
    if n > DUAL_SOLVE_LIMIT {
        return Err(LpError::TooLarge(n));
    }
    let (cols, a, c) = dual_matrix(inst);
    let y = simplex_max(&a, &inst.costs, &c)?;
    let lam = DualSolution::new(
        inst.ground,
        cols.into_iter().zip(y).filter(|(_, w)| w.is_positive()),
    )?;
    Ok(lam)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationConfig {
    pub epsilon: Rational,
    /// Bound on the number of uncrossings.
    pub n_bound: u32,
    pub epsilon_prime: Rational,
}

fn pow2(k: u32) -> Rational {
    Rational::from_integer(num_bigint::BigInt::one() << k)
}

impl PerturbationConfig {
    /// `ε' = 2^-N min(ε, min λ)`.
    pub fn new(epsilon: Rational, n_bound: u32, lam: &DualSolution) -> Self {
        let m = lam.min_weight().map_or(epsilon.clone(), |w| w.min(epsilon.clone()));
        PerturbationConfig {
            epsilon,
            n_bound,
            epsilon_prime: m / pow2(n_bound),
        }
    }
}

/// The chain `min_{F(λ)} λ^k >= min λ - 2^k ε' >= 2^k ε' >= max_{not F(λ)} λ^k`
/// at one state of the run, plus the step leaving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepCheck {
    pub k: usize,
    pub min_on: Rational,
    pub max_off: Rational,
    pub bound: Rational,
    pub chain_holds: bool,
    /// `α` of step `k + 1`, if any.
    pub alpha: Option<Rational>,
    /// `α` is the weight of a step member outside `F(λ)` and `α <= 2^k ε'`.
    pub alpha_ok: bool,
}

#[derive(Debug, Clone)]
pub struct PerturbationReport {
    pub config: PerturbationConfig,
    pub t: Rational,
    pub lambda_prime: DualSolution,
    pub lambda_star: DualSolution,
    pub objective_lambda: Rational,
    pub objective_prime: Rational,
    pub objective_star: Rational,
    pub objective_optimal: Rational,
    /// `‖λ - λ*‖∞`.
    pub distance: Rational,
    pub steps: usize,
    pub checks: Vec<StepCheck>,
    pub star_laminar: bool,
    pub star_feasible: bool,
}

impl PerturbationReport {
    pub fn steps_within_bound(&self) -> bool {
        self.steps <= self.config.n_bound as usize
    }

    pub fn distance_ok(&self) -> bool {
        self.distance <= &self.config.epsilon_prime * pow2(self.config.n_bound) && self.distance <= self.config.epsilon
    }

    pub fn passed(&self) -> bool {
        self.star_laminar
            && self.star_feasible
            && self.objective_star >= self.objective_prime
            && self.objective_prime > self.objective_lambda
            && self.distance_ok()
            && self.steps_within_bound()
            && self.checks.iter().all(|c| c.chain_holds && c.alpha_ok)
    }
}

/// Moves from a laminar, feasible, nonoptimal `lam` a short way toward an
/// optimum and uncrosses the result.
pub fn perturbation_experiment(
    inst: &CutCoveringInstance,
    lam: &DualSolution,
    cfg: &PerturbationConfig,
) -> Result<PerturbationReport, LpError> {
    if !lam.is_laminar() {
        return Err(LpError::InvalidConfig("starting solution is not laminar".into()));
    }
    if let Some(e) = dual_feasible(inst, lam) {
        return Err(LpError::InvalidConfig(format!("starting solution overloads edge {e}")));
    }
    if !cfg.epsilon.is_positive() || !cfg.epsilon_prime.is_positive() {
        return Err(LpError::InvalidConfig("ε and ε' must be positive".into()));
    }
    let min_lam = lam.min_weight().unwrap_or_else(|| cfg.epsilon.clone());
    if cfg.epsilon_prime.clone() * pow2(cfg.n_bound) > min_lam.clone().min(cfg.epsilon.clone()) {
        return Err(LpError::InvalidConfig("ε' exceeds 2^-N min(ε, min λ)".into()));
    }
    let opt = solve_dual_exact(inst)?;
    let objective_lambda = objective(lam, &inst.f);
    let objective_optimal = objective(&opt, &inst.f);
    if objective_optimal <= objective_lambda {
        return Err(LpError::NothingToImprove);
    }
    let gap = lam.distance(&opt);
    let t = (cfg.epsilon_prime.clone() / gap).min(Rational::one());
    let lambda_prime = lam.toward(&opt, &t);
    let run = uncross_strategic(&lambda_prime, &inst.f)?.run;

    let on = lam.support();
    let mut checks = Vec::new();
    let last = run.steps().min(cfg.n_bound.saturating_sub(1) as usize);
    for k in 0..=last {
        let state = &run.history[k];
        let bound = &cfg.epsilon_prime * pow2(k as u32);
        let min_on = on.iter().map(|z| state.get(z)).min().unwrap_or_else(|| min_lam.clone());
        let max_off = state
            .iter()
            .filter(|(z, _)| !on.contains(z))
            .map(|(_, w)| w.clone())
            .max()
            .unwrap_or_else(Rational::zero);
        let chain_holds = min_on >= &min_lam - &bound && &min_lam - &bound >= bound && bound >= max_off;
        let (alpha, alpha_ok) = match run.records.get(k) {
            Some(rec) => {
                let off_attained = [rec.x, rec.y]
                    .iter()
                    .any(|z| !on.contains(z) && state.get(z) == rec.alpha);
                (Some(rec.alpha.clone()), off_attained && rec.alpha <= bound)
            }
            None => (None, true),
        };
        checks.push(StepCheck {
            k,
            min_on,
            max_off,
            bound,
            chain_holds,
            alpha,
            alpha_ok,
        });
    }
    let lambda_star = run.result.clone();
    Ok(PerturbationReport {
        config: cfg.clone(),
        t,
        objective_prime: objective(&lambda_prime, &inst.f),
        objective_star: objective(&lambda_star, &inst.f),
        objective_lambda,
        objective_optimal,
        distance: lam.distance(&lambda_star),
        steps: run.steps(),
        checks,
        star_laminar: lambda_star.is_laminar(),
        star_feasible: dual_feasible(inst, &lambda_star).is_none(),
        lambda_prime,
        lambda_star,
    })
}

/// Runs the experiment with a measured `N`: a probe run fixes `N` at twice
/// its step count, and `N` doubles until the run's own step count fits.
pub fn calibrated_experiment(
    inst: &CutCoveringInstance,
    lam: &DualSolution,
    epsilon: &Rational,
) -> Result<PerturbationReport, LpError> {
    let probe = perturbation_experiment(inst, lam, &PerturbationConfig::new(epsilon.clone(), 1, lam))?;
    let mut n_bound = (2 * probe.steps).max(1) as u32;
    loop {
        let report = perturbation_experiment(inst, lam, &PerturbationConfig::new(epsilon.clone(), n_bound, lam))?;
        if report.steps_within_bound() {
            return Ok(report);
        }
        n_bound *= 2;
    }
}

/// A laminar optimum: the simplex optimum, uncrossed.
pub fn laminar_optimum(inst: &CutCoveringInstance) -> Result<DualSolution, LpError> {
    let opt = solve_dual_exact(inst)?;
    Ok(uncross_strategic(&opt, &inst.f)?.run.result)
}

/// A laminar feasible start that is strictly worse than the optimum: the
/// laminar optimum scaled down, or with one member removed. `None` when the
/// optimum is zero.
pub fn random_suboptimal_start<R: Rng>(inst: &CutCoveringInstance, rng: &mut R) -> Result<Option<DualSolution>, LpError> {
    let opt = laminar_optimum(inst)?;
    if !objective(&opt, &inst.f).is_positive() {
        return Ok(None);
    }
    let useful: Vec<Bipartition> = opt.iter().filter(|(x, _)| inst.f.peek(x).is_positive()).map(|(x, _)| *x).collect();
    if !useful.is_empty() && rng.gen_bool(0.5) {
        let drop = useful[rng.gen_range(0..useful.len())];
        let rest = DualSolution::new(inst.ground, opt.iter().filter(|(x, _)| **x != drop).map(|(x, w)| (*x, w.clone())))?;
        return Ok(Some(rest));
    }
    let (p, q) = [(1, 2), (1, 3), (2, 3), (3, 4)][rng.gen_range(0..4)];
    Ok(Some(opt.scaled(&Rational::new(p.into(), q.into()))))
}
