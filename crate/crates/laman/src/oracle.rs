//! Independent numeric verification of realization counts.
//!
//! For a pseudo-Laman bigraph without self-loops the realizations
//! compatible with a random labeling form a finite affine solution set cut
//! out by a square polynomial system: one variable per ordered adjacent
//! vertex pair on each side, two normalizations fixing the pivot biedge,
//! one product equation per remaining biedge, and linear relations tying
//! every variable to the spanning-forest variables of its side. Counting
//! numerically distinct solutions of that system from many random Newton
//! starts gives a probabilistic lower bound on the exact count: the solver
//! can miss solutions but, with sound tolerances, cannot invent them. The
//! oracle therefore confirms counts and never computes them.
//!
//! On normalizations: pinning one vertex at the origin and one coordinate
//! of a second vertex (the textbook way to remove translations and
//! rotations from the realization space) meets every equivalence class in
//! two points, one per global sign. The difference-coordinate system used
//! here fixes the pivot variables to one on both sides instead, which
//! meets each class exactly once, so the cluster count needs no halving.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::count::LamValue;
use crate::error::{Error, Result};
use crate::graph::{Bigraph, EdgeId, MultiGraph, VertexId};

/// Default Newton acceptance tolerance on the residual.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default clustering radius separating distinct solutions.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

const MAX_NEWTON_ITERATIONS: usize = 100;
const MAX_STEP_HALVINGS: usize = 30;

/// A variable of the system: the oriented difference coordinate of an
/// adjacent vertex pair on the left (`X`) or right (`Y`) side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    X(VertexId, VertexId),
    Y(VertexId, VertexId),
}

/// One equation of the square system.
#[derive(Debug, Clone, PartialEq)]
pub enum Equation {
    /// `sum of coeff * var + constant = 0`.
    Linear {
        terms: Vec<(usize, f64)>,
        constant: Complex64,
    },
    /// `var_x * var_y = label`.
    Product {
        x: usize,
        y: usize,
        label: Complex64,
    },
}

/// The square polynomial system whose solutions are the realizations of a
/// bigraph compatible with the sampled labeling.
#[derive(Debug, Clone)]
pub struct RealizationSystem {
    vars: Vec<Var>,
    equations: Vec<Equation>,
    /// Random labels of the non-pivot biedges, in biedge order.
    labeling: Vec<(EdgeId, Complex64)>,
    pivot: EdgeId,
    forest_g: BTreeSet<EdgeId>,
    forest_h: BTreeSet<EdgeId>,
    /// Redundant cycle sums (one per non-forest edge) used to cross-check
    /// accepted solutions; they are linear in the variables and must vanish.
    cycle_checks: Vec<Vec<usize>>,
}

impl RealizationSystem {
    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn pivot(&self) -> EdgeId {
        self.pivot
    }

    pub fn labeling(&self) -> &[(EdgeId, Complex64)] {
        &self.labeling
    }

    pub fn forests(&self) -> (&BTreeSet<EdgeId>, &BTreeSet<EdgeId>) {
        (&self.forest_g, &self.forest_h)
    }

    pub fn var_index(&self, var: Var) -> Option<usize> {
        self.vars.iter().position(|&v| v == var)
    }

    /// Largest absolute value over all square-system equations and the
    /// redundant cycle sums at `point`.
    pub fn residual(&self, point: &[Complex64]) -> f64 {
        let mut worst: f64 = 0.0;
        for eq in &self.equations {
            worst = worst.max(eval(eq, point).norm());
        }
        for cycle in &self.cycle_checks {
            let sum: Complex64 = cycle.iter().map(|&i| point[i]).sum();
            worst = worst.max(sum.norm());
        }
        worst
    }
}

fn eval(eq: &Equation, z: &[Complex64]) -> Complex64 {
    match eq {
        Equation::Linear { terms, constant } => {
            terms.iter().map(|&(i, c)| z[i] * c).sum::<Complex64>() + constant
        }
        Equation::Product { x, y, label } => z[*x] * z[*y] - label,
    }
}

/// Deterministic spanning forest: breadth-first from the least vertex of
/// each component, scanning edges in identifier order.
fn spanning_forest(g: &MultiGraph) -> BTreeSet<EdgeId> {
    let mut incident: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
    for v in g.vertices() {
        incident.entry(v).or_default();
    }
    for (id, e) in g.edges() {
        let (a, b) = e.pair();
        if a != b {
            incident.get_mut(&a).unwrap().push((id, b));
            incident.get_mut(&b).unwrap().push((id, a));
        }
    }
    for list in incident.values_mut() {
        list.sort_unstable();
    }
    let mut forest = BTreeSet::new();
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    for root in g.vertices() {
        if !seen.insert(root) {
            continue;
        }
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(id, other) in &incident[&v] {
                if seen.insert(other) {
                    forest.insert(id);
                    queue.push_back(other);
                }
            }
        }
    }
    forest
}

/// Unique forest path from `from` to `to` as ordered vertex pairs.
fn forest_path(
    g: &MultiGraph,
    forest: &BTreeSet<EdgeId>,
    from: VertexId,
    to: VertexId,
) -> Vec<(VertexId, VertexId)> {
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &id in forest {
        let (a, b) = g.ends(id).unwrap().pair();
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut prev: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen: BTreeSet<VertexId> = [from].into();
    'bfs: while let Some(v) = queue.pop_front() {
        if let Some(nbrs) = adj.get(&v) {
            for &w in nbrs {
                if seen.insert(w) {
                    prev.insert(w, v);
                    if w == to {
                        break 'bfs;
                    }
                    queue.push_back(w);
                }
            }
        }
    }
    let mut path = Vec::new();
    let mut cur = to;
    while cur != from {
        let p = prev[&cur];
        path.push((p, cur));
        cur = p;
    }
    path.reverse();
    path
}

fn random_label(rng: &mut impl Rng) -> Complex64 {
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = rng.gen_range(0.5..2.0);
    Complex64::from_polar(r, theta)
}

/// Builds the square system for `b` with the given pivot biedge. The
/// labeling is drawn from a generator seeded with `seed`, so equal seeds
/// give equal systems.
pub fn build_system(b: &Bigraph, pivot: EdgeId, seed: u64) -> Result<RealizationSystem> {
    if let Some((id, _)) = b
        .g()
        .edges()
        .chain(b.h().edges())
        .find(|(_, e)| e.is_loop())
    {
        return Err(Error::SelfLoop(id));
    }
    if !b.is_pseudo_laman() {
        return Err(Error::NotPseudoLaman {
            dim_g: b.g().dimension(),
            dim_h: b.h().dimension(),
            biedges: b.biedge_count(),
        });
    }
    if !b.contains_biedge(pivot) {
        return Err(Error::UnknownEdge(pivot));
    }

    let mut vars = Vec::new();
    let mut pairs_g = BTreeSet::new();
    for (_, e) in b.g().edges() {
        pairs_g.insert(e.pair());
    }
    let mut pairs_h = BTreeSet::new();
    for (_, e) in b.h().edges() {
        pairs_h.insert(e.pair());
    }
    for &(u, v) in &pairs_g {
        vars.push(Var::X(u, v));
        vars.push(Var::X(v, u));
    }
    for &(t, w) in &pairs_h {
        vars.push(Var::Y(t, w));
        vars.push(Var::Y(w, t));
    }
    let index: BTreeMap<Var, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labeling = Vec::new();
    let mut equations = Vec::new();

    // Normalizations on the pivot biedge.
    let (gu, gv) = b.g().ends(pivot)?.pair();
    let (ht, hw) = b.h().ends(pivot)?.pair();
    for var in [Var::X(gu, gv), Var::Y(ht, hw)] {
        equations.push(Equation::Linear {
            terms: vec![(index[&var], 1.0)],
            constant: -Complex64::ONE,
        });
    }
    // One product equation per non-pivot biedge.
    for e in b.biedges() {
        if e == pivot {
            continue;
        }
        let label = random_label(&mut rng);
        labeling.push((e, label));
        let (u, v) = b.g().ends(e)?.pair();
        let (t, w) = b.h().ends(e)?.pair();
        equations.push(Equation::Product {
            x: index[&Var::X(u, v)],
            y: index[&Var::Y(t, w)],
            label,
        });
    }

    let forest_g = spanning_forest(b.g());
    let forest_h = spanning_forest(b.h());
    let mut cycle_checks = Vec::new();

    let mut linear_side = |graph: &MultiGraph,
                           forest: &BTreeSet<EdgeId>,
                           pairs: &BTreeSet<(VertexId, VertexId)>,
                           mk: &dyn Fn(VertexId, VertexId) -> Var| {
        let forest_pairs: BTreeSet<(VertexId, VertexId)> = forest
            .iter()
            .map(|&id| graph.ends(id).unwrap().pair())
            .collect();
        for &(u, v) in pairs {
            if forest_pairs.contains(&(u, v)) {
                // Orientation relation for the forest pair.
                equations.push(Equation::Linear {
                    terms: vec![(index[&mk(u, v)], 1.0), (index[&mk(v, u)], 1.0)],
                    constant: Complex64::ZERO,
                });
            } else {
                // Both orientations relate to the forest path.
                for (a, bb) in [(u, v), (v, u)] {
                    let mut terms = vec![(index[&mk(a, bb)], 1.0)];
                    for (p, q) in forest_path(graph, forest, a, bb) {
                        terms.push((index[&mk(p, q)], -1.0));
                    }
                    equations.push(Equation::Linear {
                        terms,
                        constant: Complex64::ZERO,
                    });
                }
                // Redundant check: the cycle u -> v -> (path back to u).
                let mut cycle = vec![index[&mk(u, v)]];
                for (p, q) in forest_path(graph, forest, v, u) {
                    cycle.push(index[&mk(p, q)]);
                }
                cycle_checks.push(cycle);
            }
        }
    };
    linear_side(b.g(), &forest_g, &pairs_g, &|a, bb| Var::X(a, bb));
    linear_side(b.h(), &forest_h, &pairs_h, &|a, bb| Var::Y(a, bb));

    let system = RealizationSystem {
        vars,
        equations,
        labeling,
        pivot,
        forest_g,
        forest_h,
        cycle_checks,
    };
    debug_assert_eq!(system.equations.len(), system.vars.len());
    Ok(system)
}

/// Numerically distinct solutions found by multi-start damped Newton.
#[derive(Debug, Clone)]
pub struct SolutionSet {
    pub points: Vec<Vec<Complex64>>,
    pub count: usize,
    /// Largest residual over accepted points (0 when there are none).
    pub residual: f64,
    /// True when no start converged at all.
    pub none_converged: bool,
}

fn jacobian(sys: &RealizationSystem, z: &[Complex64]) -> DMatrix<Complex64> {
    let n = sys.vars.len();
    let mut jac = DMatrix::zeros(n, n);
    for (row, eq) in sys.equations.iter().enumerate() {
        match eq {
            Equation::Linear { terms, .. } => {
                for &(i, c) in terms {
                    jac[(row, i)] += Complex64::new(c, 0.0);
                }
            }
            Equation::Product { x, y, .. } => {
                jac[(row, *x)] += z[*y];
                jac[(row, *y)] += z[*x];
            }
        }
    }
    jac
}

fn residual_vector(sys: &RealizationSystem, z: &[Complex64]) -> DVector<Complex64> {
    DVector::from_iterator(sys.equations.len(), sys.equations.iter().map(|eq| eval(eq, z)))
}

fn sup_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn newton_from(sys: &RealizationSystem, start: Vec<Complex64>, tol: f64) -> Option<Vec<Complex64>> {
    let mut z = start;
    let mut f = residual_vector(sys, &z);
    let mut fnorm = sup_norm(&f);
    for _ in 0..MAX_NEWTON_ITERATIONS {
        if sys.residual(&z) < tol {
            return Some(z);
        }
        let jac = jacobian(sys, &z);
        let step = jac.lu().solve(&(-&f))?;
        let mut alpha = 1.0;
        let mut improved = false;
        for _ in 0..=MAX_STEP_HALVINGS {
            let trial: Vec<Complex64> = z
                .iter()
                .zip(step.iter())
                .map(|(&zi, &si)| zi + si * alpha)
                .collect();
            let trial_f = residual_vector(sys, &trial);
            let trial_norm = sup_norm(&trial_f);
            if trial_norm < fnorm {
                z = trial;
                f = trial_f;
                fnorm = trial_norm;
                improved = true;
                break;
            }
            alpha /= 2.0;
        }
        if !improved {
            return None;
        }
    }
    if sys.residual(&z) < tol {
        Some(z)
    } else {
        None
    }
}

fn random_start(n: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = rng.gen_range(0.3..2.0);
            Complex64::from_polar(r, theta)
        })
        .collect()
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Runs `restarts` damped Newton iterations from seeded random starting
/// points and clusters the converged points. The returned count can fall
/// short of the true number of solutions, but with sound tolerances it
/// cannot exceed it.
pub fn count_solutions(
    sys: &RealizationSystem,
    restarts: usize,
    tol: f64,
    cluster_tol: f64,
    seed: u64,
) -> SolutionSet {
    assert!(restarts >= 1, "at least one restart is required");
    let n = sys.vars.len();
    let mut converged: Vec<(usize, Vec<Complex64>)> = (0..restarts)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e3779b97f4a7c15));
            let start = random_start(n, &mut rng);
            newton_from(sys, start, tol).map(|z| (i, z))
        })
        .collect();
    converged.sort_by_key(|&(i, _)| i);
    let none_converged = converged.is_empty();
    let mut points: Vec<Vec<Complex64>> = Vec::new();
    for (_, z) in converged {
        if points.iter().all(|p| distance(p, &z) >= cluster_tol) {
            points.push(z);
        }
    }
    let residual = points
        .iter()
        .map(|p| sys.residual(p))
        .fold(0.0, f64::max);
    SolutionSet {
        count: points.len(),
        points,
        residual,
        none_converged,
    }
}

/// Outcome of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyStatus {
    /// Every seed reached exactly the expected count.
    Agree,
    /// Some seed found more solutions than expected: a hard failure of
    /// either the expected value or the tolerances.
    Overcount,
    /// The budget ran out below the expected count; inconclusive because
    /// the solver is only probabilistically complete.
    Undercount,
}

/// Result of [`verify`].
#[derive(Debug, Clone, serde::Serialize)]
pub struct VerifyReport {
    pub expected: LamValue,
    /// Largest solution count observed over all seeds.
    pub counted: u64,
    pub status: VerifyStatus,
    pub seeds: Vec<u64>,
    /// Largest accepted residual over all runs.
    pub residual: f64,
    /// Restarts spent on the slowest seed.
    pub restarts_used: u64,
}

/// Cross-checks `expected` against the numeric solution count of `b`,
/// building the system for two seeds and escalating the number of restarts
/// up to `budget` per seed. Overcounts are reported as hard failures;
/// undercounts as inconclusive.
pub fn verify(b: &Bigraph, expected: LamValue, budget: usize) -> Result<VerifyReport> {
    verify_with(b, expected, budget, DEFAULT_TOL, DEFAULT_CLUSTER_TOL, 1)
}

/// [`verify`] with explicit tolerances and base seed.
pub fn verify_with(
    b: &Bigraph,
    expected: LamValue,
    budget: usize,
    tol: f64,
    cluster_tol: f64,
    base_seed: u64,
) -> Result<VerifyReport> {
    let budget = budget.max(1);
    let seeds = vec![base_seed, base_seed + 1];
    let pivot = crate::count::choose_pivot(b)
        .ok_or_else(|| Error::Unsupported("cannot verify a bigraph without biedges".into()))?;
    let mut counted = 0u64;
    let mut residual: f64 = 0.0;
    let mut restarts_used = 0u64;
    let mut agree = true;
    for &seed in &seeds {
        let sys = build_system(b, pivot, seed)?;
        let mut schedule = vec![500usize, 2_500, 10_000];
        schedule.retain(|&r| r < budget);
        schedule.push(budget);
        let mut best = 0u64;
        for &restarts in &schedule {
            restarts_used = restarts_used.max(restarts as u64);
            let sols = count_solutions(&sys, restarts, tol, cluster_tol, seed);
            best = best.max(sols.count as u64);
            residual = residual.max(sols.residual);
            if best >= expected.get() {
                break;
            }
        }
        counted = counted.max(best);
        if best > expected.get() {
            return Ok(VerifyReport {
                expected,
                counted,
                status: VerifyStatus::Overcount,
                seeds,
                residual,
                restarts_used,
            });
        }
        if best < expected.get() {
            agree = false;
        }
    }
    Ok(VerifyReport {
        expected,
        counted,
        status: if agree {
            VerifyStatus::Agree
        } else {
            VerifyStatus::Undercount
        },
        seeds,
        residual,
        restarts_used,
    })
}
