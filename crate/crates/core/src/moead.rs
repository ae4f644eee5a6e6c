//! MOEA/D with Tchebycheff decomposition, SBX crossover and polynomial
//! mutation: the population baseline.

use serde::{Deserialize, Serialize};

use crate::domain::{DecisionVector, ObjectiveVector, PreferenceVector, RngStream};
use crate::error::{Error, Result};
use crate::problems::{NormalizedProblem, Problem};
use crate::scalar::Scalar;
use crate::scalarize::{tchebycheff_value, UtopiaState, DEFAULT_EPSILON};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoeadConfig {
    pub pop_size: usize,
    pub neighbors: usize,
    pub sbx_eta: f64,
    pub sbx_prob: f64,
    pub mutation_eta: f64,
    /// Per-variable mutation probability; `None` means `1/n`.
    pub mutation_prob: Option<f64>,
    pub epsilon: f64,
    /// Scalarize objectives rescaled by the problem's ideal/nadir hints.
    pub normalize: bool,
}

impl Default for MoeadConfig {
    fn default() -> Self {
        Self {
            pop_size: 100,
            neighbors: 20,
            sbx_eta: 15.0,
            sbx_prob: 1.0,
            mutation_eta: 20.0,
            mutation_prob: None,
            epsilon: DEFAULT_EPSILON,
            normalize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual<T> {
    pub x: DecisionVector<T>,
    /// Raw objective values.
    pub f: ObjectiveVector<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population<T> {
    pub individuals: Vec<Individual<T>>,
    pub weights: Vec<PreferenceVector<T>>,
    pub neighborhoods: Vec<Vec<usize>>,
    /// Ideal estimate in the scalarization space.
    pub utopia: UtopiaState<T>,
    /// Hold `utopia` fixed instead of tracking the running minimum.
    pub freeze_utopia: bool,
    pub eval_count: usize,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn lattice<T: Scalar>(m: usize, h: usize) -> Vec<PreferenceVector<T>> {
    fn rec(m: usize, left: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m - 1 {
            let mut v = prefix.clone();
            v.push(left);
            out.push(v);
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(m, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(m, h, &mut Vec::new(), &mut raw);
    let hh = T::from_usize_lossy(h);
    raw.into_iter()
        .map(|v| {
            let mut w: Vec<T> = v[..m - 1].iter().map(|&k| T::from_usize_lossy(k) / hh).collect();
            let head: T = w.iter().copied().sum();
            w.push((T::one() - head).max(T::zero()));
            PreferenceVector::new(w).expect("lattice point lies on the simplex")
        })
        .collect()
}

/// Simplex-lattice weights with `H` divisions, `H` chosen so the count
/// `C(H+m-1, m-1)` equals `pop_size`, or comes nearest with a warning.
pub fn init_weights<T: Scalar>(m: usize, pop_size: usize) -> Result<Vec<PreferenceVector<T>>> {
    if m < 2 {
        return Err(Error::InvalidDimension(format!("need m >= 2 objectives, got {m}")));
    }
    if pop_size < m {
        return Err(Error::InvalidConfig(format!("population {pop_size} smaller than m = {m}")));
    }
    let mut best = (usize::MAX, 1usize);
    let mut h = 1;
    loop {
        let count = binomial(h + m - 1, m - 1);
        let dist = count.abs_diff(pop_size);
        if dist < best.0 {
            best = (dist, h);
        }
        if count >= pop_size {
            break;
        }
        h += 1;
    }
    let weights = lattice(m, best.1);
    if weights.len() != pop_size {
        log::warn!(
            "no simplex lattice has {pop_size} points for m = {m}; using H = {} with {} weights",
            best.1,
            weights.len()
        );
    }
    Ok(weights)
}

/// Simulated binary crossover on one variable pair within `[lo, hi]`.
fn sbx_pair<T: Scalar>(a: T, b: T, lo: T, hi: T, eta: f64, rng: &mut RngStream) -> (T, T) {
    let (a, b, lo, hi) = (a.as_f64(), b.as_f64(), lo.as_f64(), hi.as_f64());
    if (a - b).abs() < 1e-14 {
        return (T::lit(a), T::lit(b));
    }
    let (y1, y2) = if a < b { (a, b) } else { (b, a) };
    let u = rng.uniform();
    let spread = |beta: f64| {
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        if u <= 1.0 / alpha {
            (u * alpha).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
        }
    };
    let bq1 = spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1));
    let c1 = 0.5 * ((y1 + y2) - bq1 * (y2 - y1));
    let bq2 = spread(1.0 + 2.0 * (hi - y2) / (y2 - y1));
    let c2 = 0.5 * ((y1 + y2) + bq2 * (y2 - y1));
    let (c1, c2) = (c1.clamp(lo, hi), c2.clamp(lo, hi));
    if rng.uniform() < 0.5 {
        (T::lit(c2), T::lit(c1))
    } else {
        (T::lit(c1), T::lit(c2))
    }
}

/// SBX on whole vectors; each variable crosses with probability 1/2.
pub fn sbx<T: Scalar>(
    p1: &[T],
    p2: &[T],
    lower: &[T],
    upper: &[T],
    eta: f64,
    prob: f64,
    rng: &mut RngStream,
) -> (Vec<T>, Vec<T>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    if rng.uniform() <= prob {
        for i in 0..p1.len() {
            if rng.uniform() <= 0.5 {
                let (a, b) = sbx_pair(p1[i], p2[i], lower[i], upper[i], eta, rng);
                c1[i] = a;
                c2[i] = b;
            }
        }
    }
    (c1, c2)
}

/// Bounded polynomial mutation.
pub fn polynomial_mutation<T: Scalar>(x: &mut [T], lower: &[T], upper: &[T], eta: f64, prob: f64, rng: &mut RngStream) {
    for i in 0..x.len() {
        if rng.uniform() > prob {
            continue;
        }
        let (y, lo, hi) = (x[i].as_f64(), lower[i].as_f64(), upper[i].as_f64());
        let width = hi - lo;
        let d1 = (y - lo) / width;
        let d2 = (hi - y) / width;
        let u = rng.uniform();
        let pow = 1.0 / (eta + 1.0);
        let dq = if u < 0.5 {
            let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
            v.powf(pow) - 1.0
        } else {
            let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
            1.0 - v.powf(pow)
        };
        x[i] = T::lit((y + dq * width).clamp(lo, hi));
    }
}

fn scalarizer<'a, T: Scalar>(problem: &'a dyn Problem<T>, cfg: &MoeadConfig) -> Result<Option<NormalizedProblem<'a, T>>> {
    match (cfg.normalize, problem.spec().hints()) {
        (true, Some((lo, hi))) => Ok(Some(NormalizedProblem::new(problem, lo.to_vec(), hi.to_vec())?)),
        _ => Ok(None),
    }
}

fn scaled<T: Scalar>(norm: &Option<NormalizedProblem<'_, T>>, f: &[T]) -> Vec<T> {
    match norm {
        Some(p) => f
            .iter()
            .enumerate()
            .map(|(j, &v)| (v - p.ideal()[j]) / (p.nadir()[j] - p.ideal()[j]))
            .collect(),
        None => f.to_vec(),
    }
}

impl<T: Scalar> Population<T> {
    /// Lattice weights, `T`-nearest neighborhoods by weight distance and
    /// uniform random individuals. Consumes `pop_size` evaluations, recorded
    /// in `eval_count`.
    pub fn init(problem: &dyn Problem<T>, cfg: &MoeadConfig, rng: &mut RngStream) -> Result<Self> {
        let spec = problem.spec();
        let weights = init_weights::<T>(spec.m, cfg.pop_size)?;
        let size = weights.len();
        let t = cfg.neighbors.clamp(1, size);
        let neighborhoods = (0..size)
            .map(|i| {
                let mut d: Vec<(T, usize)> = (0..size)
                    .map(|j| {
                        let dist: T = weights[i].iter().zip(weights[j].iter()).map(|(&a, &b)| (a - b) * (a - b)).sum();
                        (dist, j)
                    })
                    .collect();
                d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                d.into_iter().take(t).map(|(_, j)| j).collect()
            })
            .collect();
        let norm = scalarizer(problem, cfg)?;
        let mut utopia = UtopiaState::unset(spec.m, T::lit(cfg.epsilon))?;
        let mut individuals = Vec::with_capacity(size);
        for _ in 0..size {
            let x = spec.bounds.sample_uniform(rng);
            let f = problem.evaluate(&x)?;
            utopia.absorb(&scaled(&norm, &f))?;
            individuals.push(Individual { x: DecisionVector(x), f });
        }
        Ok(Self {
            individuals,
            weights,
            neighborhoods,
            utopia,
            freeze_utopia: false,
            eval_count: size,
        })
    }

    /// Tchebycheff value of individual `k` on subproblem `i`.
    pub fn subproblem_value(&self, problem: &dyn Problem<T>, cfg: &MoeadConfig, i: usize, k: usize) -> Result<T> {
        let norm = scalarizer(problem, cfg)?;
        tchebycheff_value(&scaled(&norm, &self.individuals[k].f), &self.weights[i], &self.utopia)
    }

    pub fn objectives(&self) -> Vec<Vec<T>> {
        self.individuals.iter().map(|ind| ind.f.0.clone()).collect()
    }
}

/// Runs generations until `budget` child evaluations are spent. Each
/// subproblem, visited in random order, mates two neighbors, evaluates one
/// child, refreshes the ideal point and replaces every neighbor the child
/// improves on.
pub fn evolve<T: Scalar>(
    problem: &dyn Problem<T>,
    mut pop: Population<T>,
    cfg: &MoeadConfig,
    budget: usize,
    rng: &mut RngStream,
) -> Result<Population<T>> {
    let spec = problem.spec();
    let (lower, upper) = (spec.bounds.lower(), spec.bounds.upper());
    let n = spec.bounds.dim();
    let pm = cfg.mutation_prob.unwrap_or(1.0 / n as f64);
    let norm = scalarizer(problem, cfg)?;
    let size = pop.individuals.len();
    let mut spent = 0;
    let mut order: Vec<usize> = (0..size).collect();
    while spent < budget {
        for i in (1..size).rev() {
            order.swap(i, rng.below(i + 1));
        }
        for &i in &order {
            if spent >= budget {
                break;
            }
            let hood = &pop.neighborhoods[i];
            let a = hood[rng.below(hood.len())];
            let mut b = hood[rng.below(hood.len())];
            if hood.len() > 1 {
                while b == a {
                    b = hood[rng.below(hood.len())];
                }
            }
            let (mut child, _) = sbx(
                &pop.individuals[a].x,
                &pop.individuals[b].x,
                lower,
                upper,
                cfg.sbx_eta,
                cfg.sbx_prob,
                rng,
            );
            polynomial_mutation(&mut child, lower, upper, cfg.mutation_eta, pm, rng);
            let f = problem.evaluate(&child)?;
            spent += 1;
            pop.eval_count += 1;
            let fs = scaled(&norm, &f);
            if !pop.freeze_utopia {
                pop.utopia.absorb(&fs)?;
            }
            let hood = pop.neighborhoods[i].clone();
            for j in hood {
                let current = tchebycheff_value(&scaled(&norm, &pop.individuals[j].f), &pop.weights[j], &pop.utopia)?;
                let candidate = tchebycheff_value(&fs, &pop.weights[j], &pop.utopia)?;
                if candidate <= current {
                    pop.individuals[j] = Individual {
                        x: DecisionVector(child.clone()),
                        f: f.clone(),
                    };
                }
            }
        }
    }
    Ok(pop)
}
