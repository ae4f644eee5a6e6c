//! Gaussian-smoothing gradient estimates of the Tchebycheff value in decision
//! space, and their composition with the model's backward pass.

use serde::{Deserialize, Serialize};

use crate::domain::{PreferenceVector, RngStream};
use crate::error::{Error, Result};
use crate::model::{ParamGrad, SetModel};
use crate::problems::Problem;
use crate::scalar::Scalar;
use crate::scalarize::{effective_weights, tchebycheff, UtopiaState};

/// Default perturbation count.
pub const DEFAULT_K: usize = 5;
/// Default smoothing radius, relative to each coordinate's range.
pub const DEFAULT_SIGMA: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsConfig {
    pub k: usize,
    /// Radius in units of each coordinate's width `upper - lower`.
    pub sigma: f64,
    /// Difference only the maximizing objective of the center point.
    pub use_tch_variant: bool,
    /// Pair every direction `u` with `-u`.
    pub antithetic: bool,
}

impl Default for EsConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            sigma: DEFAULT_SIGMA,
            use_tch_variant: false,
            antithetic: false,
        }
    }
}

impl EsConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("ES needs K >= 1 perturbations".into()));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidConfig(format!("sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// `k` standard-normal directions; with `antithetic`, odd entries negate the
/// preceding one.
pub fn draw_directions<T: Scalar>(n: usize, k: usize, antithetic: bool, rng: &mut RngStream) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::with_capacity(k);
    for i in 0..k {
        if antithetic && i % 2 == 1 {
            let prev: Vec<T> = out[i - 1].iter().map(|&v| -v).collect();
            out.push(prev);
        } else {
            out.push((0..n).map(|_| T::lit(rng.standard_normal())).collect());
        }
    }
    out
}

/// `1/(sigma K) sum_k (f(x + sigma u_k) - f(x)) u_k` for a scalar function in
/// raw coordinates. Returns the estimate and the number of calls to `f`.
pub fn smoothing_gradient<T: Scalar>(
    mut f: impl FnMut(&[T]) -> Result<T>,
    x: &[T],
    sigma: T,
    k: usize,
    antithetic: bool,
    rng: &mut RngStream,
) -> Result<(Vec<T>, usize)> {
    if k == 0 || !(sigma > T::zero()) {
        return Err(Error::InvalidConfig("smoothing needs K >= 1 and sigma > 0".into()));
    }
    let f0 = f(x)?;
    let dirs = draw_directions::<T>(x.len(), k, antithetic, rng);
    let mut grad = vec![T::zero(); x.len()];
    let mut probe = vec![T::zero(); x.len()];
    for u in &dirs {
        for i in 0..x.len() {
            probe[i] = x[i] + sigma * u[i];
        }
        let delta = f(&probe)? - f0;
        grad.iter_mut().zip(u).for_each(|(g, &ui)| *g = *g + delta * ui);
    }
    let scale = sigma * T::from_usize_lossy(k);
    grad.iter_mut().for_each(|g| *g = *g / scale);
    Ok((grad, k + 1))
}

#[derive(Debug, Clone)]
enum ProbeData<T> {
    Smoothing { dirs: Vec<Vec<T>>, values: Vec<Vec<T>>, sigma: T, antithetic: bool },
    Analytic { jacobian: Vec<Vec<T>> },
}

/// Objective values gathered around one decision vector, before any
/// scalarization. Splitting evaluation from estimation lets a caller fold
/// every evaluated point into the utopia estimate first.
#[derive(Debug, Clone)]
pub struct Probe<T> {
    pub x: Vec<T>,
    pub f0: Vec<T>,
    widths: Vec<T>,
    data: ProbeData<T>,
}

impl<T: Scalar> Probe<T> {
    /// Evaluates `x` and `K` perturbations `x + sigma (upper - lower) u_k`,
    /// each clamped into the box.
    pub fn smoothing(problem: &dyn Problem<T>, x: &[T], es: &EsConfig, rng: &mut RngStream) -> Result<Self> {
        es.validate()?;
        let bounds = &problem.spec().bounds;
        let f0 = problem.evaluate(x)?.0;
        let widths = bounds.widths();
        let sigma = T::lit(es.sigma);
        let dirs = draw_directions::<T>(x.len(), es.k, es.antithetic, rng);
        let values = dirs
            .iter()
            .map(|u| {
                let shifted: Vec<T> = (0..x.len()).map(|i| x[i] + sigma * widths[i] * u[i]).collect();
                problem.evaluate(&bounds.clamp(&shifted)).map(|f| f.0)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            x: x.to_vec(),
            f0,
            widths,
            data: ProbeData::Smoothing { dirs, values, sigma, antithetic: es.antithetic },
        })
    }

    /// Evaluates `x` once and records the problem's exact Jacobian.
    pub fn analytic(problem: &dyn Problem<T>, x: &[T]) -> Result<Self> {
        let f0 = problem.evaluate(x)?.0;
        let jacobian = problem
            .jacobian(x)
            .ok_or_else(|| Error::InvalidConfig(format!("{} has no analytic Jacobian", problem.name())))?;
        Ok(Self {
            x: x.to_vec(),
            f0,
            widths: problem.spec().bounds.widths(),
            data: ProbeData::Analytic { jacobian },
        })
    }

    pub fn evals_used(&self) -> usize {
        match &self.data {
            ProbeData::Smoothing { values, .. } => values.len() + 1,
            ProbeData::Analytic { .. } => 1,
        }
    }

    /// Every objective vector this probe evaluated, center first.
    pub fn evaluations(&self) -> Vec<&[T]> {
        let mut out = vec![self.f0.as_slice()];
        if let ProbeData::Smoothing { values, .. } = &self.data {
            out.extend(values.iter().map(Vec::as_slice));
        }
        out
    }

    /// Tchebycheff value at the center.
    pub fn center_value(&self, pref: &PreferenceVector<T>, utopia: &UtopiaState<T>, rng: &mut RngStream) -> Result<T> {
        Ok(tchebycheff(&self.f0, pref, utopia, rng)?.0)
    }

    /// Estimated `grad_x g_tch(x | pref)` under `utopia`.
    pub fn grad_x(
        &self,
        pref: &PreferenceVector<T>,
        utopia: &UtopiaState<T>,
        use_tch_variant: bool,
        rng: &mut RngStream,
    ) -> Result<Vec<T>> {
        let n = self.x.len();
        let (g0, jstar) = tchebycheff(&self.f0, pref, utopia, rng)?;
        match &self.data {
            ProbeData::Analytic { jacobian } => {
                let w = effective_weights(pref);
                Error::check_len(n, jacobian[jstar].len())?;
                Ok(jacobian[jstar].iter().map(|&d| w[jstar] * d).collect())
            }
            ProbeData::Smoothing { dirs, values, sigma, .. } => {
                let w = effective_weights(pref);
                let mut grad = vec![T::zero(); n];
                for (u, f) in dirs.iter().zip(values) {
                    let delta = if use_tch_variant {
                        w[jstar] * (f[jstar] - self.f0[jstar])
                    } else {
                        let gk = crate::scalarize::tchebycheff_value(f, pref, utopia)?;
                        gk - g0
                    };
                    grad.iter_mut().zip(u).for_each(|(g, &ui)| *g = *g + delta * ui);
                }
                let scale = *sigma * T::from_usize_lossy(dirs.len());
                Ok(grad
                    .iter()
                    .zip(&self.widths)
                    .map(|(&g, &wd)| g / (scale * wd))
                    .collect())
            }
        }
    }

    pub fn is_antithetic(&self) -> bool {
        matches!(self.data, ProbeData::Smoothing { antithetic: true, .. })
    }
}

/// ES estimate of `grad_x g_tch(x | pref)` with `utopia` held fixed.
/// Returns the estimate and the number of objective evaluations, `K + 1`.
pub fn estimate_grad_x<T: Scalar>(
    problem: &dyn Problem<T>,
    x: &[T],
    pref: &PreferenceVector<T>,
    utopia: &UtopiaState<T>,
    es: &EsConfig,
    rng: &mut RngStream,
) -> Result<(Vec<T>, usize)> {
    let probe = Probe::smoothing(problem, x, es, rng)?;
    let g = probe.grad_x(pref, utopia, es.use_tch_variant, rng)?;
    Ok((g, probe.evals_used()))
}

/// Chains the decision-space estimate at `forward(model, pref)` through the
/// model's backward pass. Nothing is updated.
pub fn estimate_grad_params<T: Scalar>(
    model: &SetModel<T>,
    problem: &dyn Problem<T>,
    pref: &PreferenceVector<T>,
    utopia: &UtopiaState<T>,
    es: &EsConfig,
    rng: &mut RngStream,
) -> Result<(ParamGrad<T>, usize)> {
    let bounds = &problem.spec().bounds;
    let x = model.forward(pref, bounds)?;
    let (gx, used) = estimate_grad_x(problem, &x, pref, utopia, es, rng)?;
    Ok((model.backward(pref, bounds, &gx)?, used))
}
