//! The training loop: sample preferences, probe, refresh the utopia point,
//! estimate parameter gradients and take one step, `T` times.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{PreferenceSampler, PreferenceVector, RngStream};
use crate::es::{EsConfig, Probe};
use crate::error::{Error, Result};
use crate::model::{ParamGrad, SetModel};
use crate::problems::{NormalizedProblem, Problem};
use crate::scalar::Scalar;
use crate::scalarize::{UtopiaState, DEFAULT_EPSILON};

/// Default step size.
pub const DEFAULT_ETA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Sgd,
    Adam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientSource {
    /// Gaussian-smoothing estimate from objective values only.
    Es,
    /// The problem's exact Jacobian; for checks on smooth test problems.
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub n_pref: usize,
    pub iters: usize,
    pub eta: f64,
    pub es: EsConfig,
    pub seed: u64,
    pub epsilon: f64,
    pub optimizer: Optimizer,
    pub cosine_decay: bool,
    /// Lower bound on every preference component during training.
    pub min_weight: f64,
    /// Scalarize objectives rescaled by the problem's ideal/nadir hints.
    pub normalize: bool,
    pub gradient: GradientSource,
    /// Probe the `N` preferences of an iteration on the rayon pool.
    pub parallel: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            n_pref: 5,
            iters: 1000,
            eta: DEFAULT_ETA,
            es: EsConfig::default(),
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            optimizer: Optimizer::Sgd,
            cosine_decay: false,
            min_weight: 0.0,
            normalize: true,
            gradient: GradientSource::Es,
            parallel: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pref == 0 {
            return Err(Error::InvalidConfig("N must be at least 1".into()));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidConfig(format!("eta must be positive, got {}", self.eta)));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        self.es.validate()
    }

    /// Objective evaluations a full run consumes.
    pub fn budget(&self) -> usize {
        let per = match self.gradient {
            GradientSource::Es => self.es.k + 1,
            GradientSource::Analytic => 1,
        };
        self.n_pref * per * self.iters
    }

    fn step_size(&self, t: usize) -> f64 {
        if self.cosine_decay && self.iters > 0 {
            0.5 * self.eta * (1.0 + (std::f64::consts::PI * t as f64 / self.iters as f64).cos())
        } else {
            self.eta
        }
    }
}

/// One line of the training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterRecord<T> {
    pub iteration: usize,
    pub loss: T,
    pub eval_count: usize,
    pub z_star: Vec<T>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct AdamMoments<T> {
    t: u64,
    m: Vec<Vec<T>>,
    v: Vec<Vec<T>>,
}

/// Everything a run carries between iterations. `utopia` lives in the space
/// the loop scalarizes in (normalized when `cfg.normalize`).
#[derive(Debug, Clone)]
pub struct TrainState<T> {
    pub model: SetModel<T>,
    pub utopia: UtopiaState<T>,
    pub iteration: usize,
    pub loss_history: Vec<T>,
    pub eval_count: usize,
    pub rng: RngStream,
    pub log: Vec<IterRecord<T>>,
    adam: AdamMoments<T>,
}

/// A run stopped by a non-finite loss or gradient, with the state reached.
#[derive(Debug)]
pub struct TrainFailure<T> {
    pub error: Error,
    /// Absent when the configuration was rejected before any state existed.
    pub state: Option<Box<TrainState<T>>>,
}

impl<T> std::fmt::Display for TrainFailure<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.state {
            Some(s) => write!(f, "training stopped at iteration {}: {}", s.iteration, self.error),
            None => write!(f, "training not started: {}", self.error),
        }
    }
}

impl<T: std::fmt::Debug> std::error::Error for TrainFailure<T> {}

impl<T: Scalar> TrainState<T> {
    pub fn new(model: SetModel<T>, m: usize, cfg: &TrainConfig) -> Result<Self> {
        Ok(Self {
            model,
            utopia: UtopiaState::unset(m, T::lit(cfg.epsilon))?,
            iteration: 0,
            loss_history: Vec::new(),
            eval_count: 0,
            rng: RngStream::new(cfg.seed),
            log: Vec::new(),
            adam: AdamMoments::default(),
        })
    }

    fn fail(self, error: Error) -> TrainFailure<T> {
        TrainFailure {
            error,
            state: Some(Box::new(self)),
        }
    }
}

struct Work<T> {
    pref: PreferenceVector<T>,
    rng: RngStream,
    probe: Probe<T>,
}

fn probe_one<T: Scalar>(
    problem: &dyn Problem<T>,
    model: &SetModel<T>,
    cfg: &TrainConfig,
    pref: PreferenceVector<T>,
    mut rng: RngStream,
) -> Result<Work<T>> {
    let x = model.forward(&pref, &problem.spec().bounds)?;
    let probe = match cfg.gradient {
        GradientSource::Es => Probe::smoothing(problem, &x, &cfg.es, &mut rng)?,
        GradientSource::Analytic => Probe::analytic(problem, &x)?,
    };
    Ok(Work { pref, rng, probe })
}

/// One iteration. Every evaluated point enters the utopia estimate before any
/// Tchebycheff value is taken, so serial and parallel runs agree exactly.
fn iterate<T: Scalar>(
    problem: &dyn Problem<T>,
    state: &mut TrainState<T>,
    cfg: &TrainConfig,
    sampler: &PreferenceSampler,
) -> Result<()> {
    let prefs: Vec<PreferenceVector<T>> = (0..cfg.n_pref).map(|_| sampler.sample(&mut state.rng)).collect();
    let streams: Vec<RngStream> = (0..cfg.n_pref).map(|_| state.rng.child()).collect();
    let jobs: Vec<(PreferenceVector<T>, RngStream)> = prefs.into_iter().zip(streams).collect();
    let model = &state.model;
    let mut work: Vec<Work<T>> = if cfg.parallel {
        jobs.into_par_iter()
            .map(|(p, r)| probe_one(problem, model, cfg, p, r))
            .collect::<Result<_>>()?
    } else {
        jobs.into_iter()
            .map(|(p, r)| probe_one(problem, model, cfg, p, r))
            .collect::<Result<_>>()?
    };
    for w in &work {
        state.eval_count += w.probe.evals_used();
        for f in w.probe.evaluations() {
            state.utopia.absorb(f)?;
        }
    }
    let bounds = &problem.spec().bounds;
    let mut total = ParamGrad::zeros_like(&state.model);
    let mut loss = T::zero();
    for w in &mut work {
        loss = loss + w.probe.center_value(&w.pref, &state.utopia, &mut w.rng)?;
        let gx = w.probe.grad_x(&w.pref, &state.utopia, cfg.es.use_tch_variant, &mut w.rng)?;
        let g = state.model.backward(&w.pref, bounds, &gx)?;
        total.add_scaled(&g, T::one())?;
    }
    let inv_n = T::one() / T::from_usize_lossy(cfg.n_pref);
    total.scale(inv_n);
    loss = loss * inv_n;
    if !loss.is_finite() {
        return Err(Error::NonFinite(format!("loss at iteration {}", state.iteration)));
    }
    if !total.is_finite() {
        return Err(Error::NonFinite(format!("gradient at iteration {}", state.iteration)));
    }
    let eta = T::lit(cfg.step_size(state.iteration));
    match cfg.optimizer {
        Optimizer::Sgd => state.model.apply_step(&total, eta)?,
        Optimizer::Adam => adam_step(state, &total, eta)?,
    }
    state.loss_history.push(loss);
    state.log.push(IterRecord {
        iteration: state.iteration,
        loss,
        eval_count: state.eval_count,
        z_star: state.utopia.z_star.clone(),
    });
    state.iteration += 1;
    Ok(())
}

fn adam_step<T: Scalar>(state: &mut TrainState<T>, grad: &ParamGrad<T>, eta: T) -> Result<()> {
    let (b1, b2, eps) = (T::lit(0.9), T::lit(0.999), T::lit(1e-8));
    let a = &mut state.adam;
    if a.m.is_empty() {
        a.m = grad.blocks.iter().map(|b| vec![T::zero(); b.len()]).collect();
        a.v = a.m.clone();
    }
    a.t += 1;
    let c1 = T::one() - b1.powi(a.t as i32);
    let c2 = T::one() - b2.powi(a.t as i32);
    let mut step = grad.clone();
    for (bi, g) in grad.blocks.iter().enumerate() {
        for (i, &gi) in g.iter().enumerate() {
            let m = b1 * a.m[bi][i] + (T::one() - b1) * gi;
            let v = b2 * a.v[bi][i] + (T::one() - b2) * gi * gi;
            a.m[bi][i] = m;
            a.v[bi][i] = v;
            step.blocks[bi][i] = (m / c1) / ((v / c2).sqrt() + eps);
        }
    }
    state.model.apply_step(&step, eta)
}

/// Runs `cfg.iters` iterations from a fresh state.
pub fn train<T: Scalar>(
    problem: &dyn Problem<T>,
    model: SetModel<T>,
    cfg: &TrainConfig,
) -> std::result::Result<TrainState<T>, TrainFailure<T>> {
    let m = problem.spec().m;
    let state = match cfg.validate().and_then(|_| TrainState::new(model, m, cfg)) {
        Ok(s) => s,
        Err(error) => return Err(TrainFailure { error, state: None }),
    };
    if let Err(e) = state.model.validate() {
        return Err(state.fail(e));
    }
    if let Err(e) = Error::check_len(state.model.decision_dim(), problem.spec().bounds.dim())
        .and_then(|_| Error::check_len(state.model.pref_dim(), m))
    {
        return Err(state.fail(e));
    }
    resume(problem, state, cfg, cfg.iters)
}

/// Runs `iters` more iterations on an existing state.
pub fn resume<T: Scalar>(
    problem: &dyn Problem<T>,
    mut state: TrainState<T>,
    cfg: &TrainConfig,
    iters: usize,
) -> std::result::Result<TrainState<T>, TrainFailure<T>> {
    let sampler = match PreferenceSampler::restricted(problem.spec().m, cfg.min_weight) {
        Ok(s) => s,
        Err(e) => return Err(state.fail(e)),
    };
    let normalized;
    let target: &dyn Problem<T> = match (cfg.normalize, problem.spec().hints()) {
        (true, Some((lo, hi))) => match NormalizedProblem::new(problem, lo.to_vec(), hi.to_vec()) {
            Ok(p) => {
                normalized = p;
                &normalized
            }
            Err(e) => return Err(state.fail(e)),
        },
        _ => problem,
    };
    for _ in 0..iters {
        if let Err(e) = iterate(target, &mut state, cfg, &sampler) {
            return Err(state.fail(e));
        }
    }
    Ok(state)
}
