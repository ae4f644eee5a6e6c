//! Shared domain types: preferences, boxes, decision/objective vectors and the
//! seeded random stream every stochastic routine draws from.

use std::ops::Deref;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{logistic, Scalar};

/// Smallest weight a preference component may carry when it enters a
/// Tchebycheff aggregation.
pub const MIN_TCH_WEIGHT: f64 = 1e-6;

fn simplex_tolerance<T: Scalar>(m: usize) -> T {
    T::lit(1e-9).max(T::epsilon() * T::from_usize_lossy(8 * m.max(2)))
}

/// A point on the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PreferenceVector<T>(Vec<T>);

impl<T: Scalar> PreferenceVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidDimension(format!(
                "preference needs at least 2 components, got {}",
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= T::zero())) {
            return Err(Error::InvalidPreference(format!("negative or NaN weight {w}")));
        }
        let sum: T = weights.iter().copied().sum();
        if (sum - T::one()).abs() > simplex_tolerance::<T>(weights.len()) {
            return Err(Error::InvalidPreference(format!("weights sum to {sum}")));
        }
        Ok(Self(weights))
    }

    pub fn weights(&self) -> &[T] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Raises every component to at least `floor` and renormalizes.
    pub fn clipped(&self, floor: T) -> Self {
        let raised: Vec<T> = self.0.iter().map(|&w| w.max(floor)).collect();
        let sum: T = raised.iter().copied().sum();
        Self(raised.into_iter().map(|w| w / sum).collect())
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> Deref for PreferenceVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Axis-aligned feasible box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxBounds<T> {
    lower: Vec<T>,
    upper: Vec<T>,
}

impl<T: Scalar> BoxBounds<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        Error::check_len(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::InvalidBounds("zero-dimensional box".into()));
        }
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !(l < u) || !l.is_finite() || !u.is_finite() {
                return Err(Error::InvalidBounds(format!(
                    "coordinate {i}: lower {l} must be below upper {u}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(n: usize) -> Self {
        Self::new(vec![T::zero(); n], vec![T::one(); n]).expect("unit box is valid")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> T {
        self.upper[i] - self.lower[i]
    }

    pub fn widths(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.width(i)).collect()
    }

    pub fn midpoint(&self) -> Vec<T> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&l, &u)| (l + u) / T::lit(2.0))
            .collect()
    }

    pub fn check(&self, x: &[T]) -> Result<()> {
        Error::check_len(self.dim(), x.len())?;
        for (i, &v) in x.iter().enumerate() {
            if !(v >= self.lower[i] && v <= self.upper[i]) {
                return Err(Error::OutOfBounds {
                    index: i,
                    value: v.as_f64(),
                    lower: self.lower[i].as_f64(),
                    upper: self.upper[i].as_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.check(x).is_ok()
    }

    pub fn clamp(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .enumerate()
            .map(|(i, &v)| v.max(self.lower[i]).min(self.upper[i]))
            .collect()
    }

    /// Logistic map from an unconstrained value onto coordinate `i`.
    #[inline]
    pub fn squash(&self, i: usize, z: T) -> T {
        let v = self.lower[i] + self.width(i) * logistic(z);
        // rounding can push lower + width * 1 past upper by one ulp
        v.max(self.lower[i]).min(self.upper[i])
    }

    /// Derivative of [`squash`](Self::squash) with respect to `z`.
    #[inline]
    pub fn squash_deriv(&self, i: usize, z: T) -> T {
        let s = logistic(z);
        self.width(i) * s * (T::one() - s)
    }

    /// Uniform draw from the box.
    pub fn sample_uniform(&self, rng: &mut RngStream) -> Vec<T> {
        (0..self.dim())
            .map(|i| self.lower[i] + self.width(i) * T::lit(rng.uniform()))
            .collect()
    }
}

/// A candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecisionVector<T>(pub Vec<T>);

impl<T> Deref for DecisionVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// The image of a candidate in objective space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector<T>(pub Vec<T>);

impl<T: Scalar> ObjectiveVector<T> {
    /// Rejects NaN and infinite components.
    pub fn finite(values: Vec<T>) -> Result<Self> {
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("objective {j} = {}", values[j])));
        }
        Ok(Self(values))
    }
}

impl<T> Deref for ObjectiveVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

/// Seeded, single-owner random stream.
///
/// Parallel consumers take independent child streams via [`RngStream::child`];
/// the child seeds depend only on the parent's draw sequence.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derives an independent stream, advancing this one by one draw.
    pub fn child(&mut self) -> RngStream {
        RngStream::new(self.inner.next_u64())
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn exponential(&mut self) -> f64 {
        self.inner.sample(Exp1)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Distribution over preferences: flat Dirichlet, optionally restricted to the
/// sub-simplex where every component is at least `min_weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreferenceSampler {
    pub m: usize,
    pub min_weight: f64,
}

impl PreferenceSampler {
    pub fn new(m: usize) -> Result<Self> {
        Self::restricted(m, 0.0)
    }

    pub fn restricted(m: usize, min_weight: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidDimension(format!(
                "preferences need m >= 2 objectives, got {m}"
            )));
        }
        if !(min_weight >= 0.0) || min_weight * m as f64 >= 1.0 {
            return Err(Error::InvalidConfig(format!(
                "min_weight {min_weight} leaves an empty sub-simplex for m = {m}"
            )));
        }
        Ok(Self { m, min_weight })
    }

    pub fn sample<T: Scalar>(&self, rng: &mut RngStream) -> PreferenceVector<T> {
        let spacings: Vec<f64> = (0..self.m).map(|_| rng.exponential()).collect();
        let total: f64 = spacings.iter().sum();
        let free = 1.0 - self.min_weight * self.m as f64;
        let mut w: Vec<T> = spacings
            .iter()
            .take(self.m - 1)
            .map(|e| T::lit(self.min_weight + free * e / total))
            .collect();
        let head: T = w.iter().copied().sum();
        w.push((T::one() - head).max(T::zero()));
        PreferenceVector(w)
    }
}

/// Draws one preference uniformly from the `(m-1)`-simplex.
pub fn sample_preference<T: Scalar>(m: usize, rng: &mut RngStream) -> Result<PreferenceVector<T>> {
    Ok(PreferenceSampler::new(m)?.sample(rng))
}

/// Draws `count` i.i.d. standard-normal vectors of length `n`.
pub fn sample_gaussian<T: Scalar>(n: usize, count: usize, rng: &mut RngStream) -> Result<Vec<Vec<T>>> {
    if n == 0 || count == 0 {
        return Err(Error::InvalidDimension(format!(
            "gaussian batch needs n >= 1 and count >= 1, got n = {n}, count = {count}"
        )));
    }
    Ok((0..count)
        .map(|_| (0..n).map(|_| T::lit(rng.standard_normal())).collect())
        .collect())
}
