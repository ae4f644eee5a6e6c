//! Benchmark problem registry.

mod data;
mod re;
mod synthetic;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::{BoxBounds, DecisionVector, ObjectiveVector, RngStream};
use crate::error::{Error, Result};
use crate::metrics::nondominated_filter;
use crate::scalar::Scalar;

pub use data::{read_hints, read_objective_file, write_hints, write_objective_file};
pub use re::{re21_exact_front, Re21, Re23, Re24, Re25, Re33, Re37};
pub use synthetic::SineCurve;

/// Environment variable naming a directory with `ref_front_<name>.txt` and
/// `bounds_<name>.txt` files.
pub const DATA_DIR_ENV: &str = "PARETOSET_DATA_DIR";

/// Number of random evaluations used to estimate missing ideal/nadir hints.
pub const HINT_ESTIMATE_SAMPLES: usize = 100_000;

/// Names accepted by [`by_name`].
pub const REGISTERED: &[&str] = &["syn", "re21", "re23", "re24", "re25", "re33", "re37"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec<T> {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub bounds: BoxBounds<T>,
    pub ideal_hint: Option<Vec<T>>,
    pub nadir_hint: Option<Vec<T>>,
}

impl<T: Scalar> ProblemSpec<T> {
    pub fn new(name: impl Into<String>, m: usize, bounds: BoxBounds<T>) -> Result<Self> {
        let n = bounds.dim();
        if n < 2 || m < 2 {
            return Err(Error::InvalidDimension(format!(
                "problems need n >= 2 and m >= 2, got n = {n}, m = {m}"
            )));
        }
        Ok(Self {
            name: name.into(),
            n,
            m,
            bounds,
            ideal_hint: None,
            nadir_hint: None,
        })
    }

    pub fn with_hints(mut self, ideal: Vec<T>, nadir: Vec<T>) -> Result<Self> {
        Error::check_len(self.m, ideal.len())?;
        Error::check_len(self.m, nadir.len())?;
        if let Some(j) = (0..self.m).find(|&j| !(ideal[j] < nadir[j])) {
            return Err(Error::InvalidConfig(format!(
                "ideal hint {} not below nadir hint {} for objective {j}",
                ideal[j], nadir[j]
            )));
        }
        self.ideal_hint = Some(ideal);
        self.nadir_hint = Some(nadir);
        Ok(self)
    }

    pub fn hints(&self) -> Option<(&[T], &[T])> {
        match (&self.ideal_hint, &self.nadir_hint) {
            (Some(i), Some(n)) => Some((i, n)),
            _ => None,
        }
    }
}

/// Analytic Pareto-set relation of a problem, mapping the base coordinate to
/// the value every dependent coordinate takes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PsRelation {
    /// `x_i = sin(frequency * (x_1 - shift))` for every `i >= 2`.
    Sine { frequency: f64, shift: f64 },
}

impl PsRelation {
    pub fn dependent<T: Scalar>(&self, base: T) -> T {
        match *self {
            PsRelation::Sine { frequency, shift } => (T::lit(frequency) * (base - T::lit(shift))).sin(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth<T> {
    pub ps_relation: Option<PsRelation>,
    /// Dense, mutually nondominated samples of the Pareto front. `None` when no
    /// reference data exists.
    pub pf_samples: Option<Vec<Vec<T>>>,
}

impl<T> GroundTruth<T> {
    pub fn absent() -> Self {
        Self {
            ps_relation: None,
            pf_samples: None,
        }
    }
}

pub trait Problem<T: Scalar>: Send + Sync {
    fn spec(&self) -> &ProblemSpec<T>;

    /// Objective values for an in-box `x`; callers go through [`Problem::evaluate`].
    fn objectives(&self, x: &[T]) -> Vec<T>;

    /// Ground truth available without external data files.
    fn builtin_ground_truth(&self) -> GroundTruth<T> {
        GroundTruth::absent()
    }

    fn name(&self) -> &str {
        &self.spec().name
    }

    /// Rows `df_j/dx` for problems with known derivatives.
    fn jacobian(&self, _x: &[T]) -> Option<Vec<Vec<T>>> {
        None
    }

    /// Evaluates `x`, rejecting out-of-box input and non-finite output.
    fn evaluate(&self, x: &[T]) -> Result<ObjectiveVector<T>> {
        self.spec().bounds.check(x)?;
        ObjectiveVector::finite(self.objectives(x))
    }
}

pub fn evaluate<T: Scalar>(problem: &dyn Problem<T>, x: &DecisionVector<T>) -> Result<ObjectiveVector<T>> {
    problem.evaluate(x)
}

/// Maps [`Problem::evaluate`] over `xs`, reporting the first failure with its index.
pub fn evaluate_batch<T: Scalar>(
    problem: &dyn Problem<T>,
    xs: &[DecisionVector<T>],
) -> Result<Vec<ObjectiveVector<T>>> {
    xs.iter()
        .enumerate()
        .map(|(index, x)| {
            problem.evaluate(x).map_err(|e| Error::Batch {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Looks up a registered problem. `syn` accepts an optional dimension suffix,
/// e.g. `syn:5`.
pub fn by_name<T: Scalar>(name: &str) -> Result<Box<dyn Problem<T>>> {
    let lower = name.to_ascii_lowercase();
    let (base, arg) = match lower.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (lower.as_str(), None),
    };
    let problem: Box<dyn Problem<T>> = match (base, arg) {
        ("syn", None) => Box::new(SineCurve::new(synthetic::DEFAULT_DIM)?),
        ("syn", Some(n)) => {
            let n = n
                .parse()
                .map_err(|_| Error::UnknownProblem(name.to_string()))?;
            Box::new(SineCurve::new(n)?)
        }
        ("re21", None) => Box::new(Re21::new()),
        ("re23", None) => Box::new(Re23::new()),
        ("re24", None) => Box::new(Re24::new()),
        ("re25", None) => Box::new(Re25::new()),
        ("re33", None) => Box::new(Re33::new()),
        ("re37", None) => Box::new(Re37::new()),
        _ => return Err(Error::UnknownProblem(name.to_string())),
    };
    Ok(problem)
}

fn data_dir(explicit: Option<&Path>) -> Option<PathBuf> {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from))
}

/// Ground truth for `problem`: `ref_front_<name>.txt` from the data directory
/// when present, otherwise the built-in data, otherwise an absent marker.
pub fn ground_truth<T: Scalar>(problem: &dyn Problem<T>, dir: Option<&Path>) -> Result<GroundTruth<T>> {
    let mut truth = problem.builtin_ground_truth();
    if let Some(dir) = data_dir(dir) {
        let path = dir.join(format!("ref_front_{}.txt", problem.name()));
        if path.exists() {
            let front = read_objective_file(&path)?;
            if let Some(bad) = front.iter().find(|f| f.len() != problem.spec().m) {
                return Err(Error::DimensionMismatch {
                    expected: problem.spec().m,
                    actual: bad.len(),
                });
            }
            let keep = nondominated_filter(&front);
            truth.pf_samples = Some(keep.into_iter().map(|i| front[i].clone()).collect());
        }
    }
    Ok(truth)
}

/// Ideal/nadir hints in priority order: `bounds_<name>.txt` in the data
/// directory, the problem's published hints, then min/max over
/// [`HINT_ESTIMATE_SAMPLES`] uniform random evaluations.
pub fn resolve_hints<T: Scalar>(problem: &dyn Problem<T>, dir: Option<&Path>) -> Result<(Vec<T>, Vec<T>)> {
    if let Some(dir) = data_dir(dir) {
        let path = dir.join(format!("bounds_{}.txt", problem.name()));
        if path.exists() {
            let (ideal, nadir) = read_hints(&path)?;
            let checked = problem.spec().clone().with_hints(ideal, nadir)?;
            return Ok((checked.ideal_hint.unwrap(), checked.nadir_hint.unwrap()));
        }
    }
    if let Some((i, n)) = problem.spec().hints() {
        return Ok((i.to_vec(), n.to_vec()));
    }
    estimate_hints(problem, HINT_ESTIMATE_SAMPLES, 0x5eed_1dea)
}

/// View of a problem with objectives mapped by `(f - ideal) / (nadir - ideal)`.
pub struct NormalizedProblem<'a, T: Scalar> {
    inner: &'a dyn Problem<T>,
    spec: ProblemSpec<T>,
    ideal: Vec<T>,
    nadir: Vec<T>,
}

impl<'a, T: Scalar> NormalizedProblem<'a, T> {
    pub fn new(inner: &'a dyn Problem<T>, ideal: Vec<T>, nadir: Vec<T>) -> Result<Self> {
        let m = inner.spec().m;
        Error::check_len(m, ideal.len())?;
        Error::check_len(m, nadir.len())?;
        let spec = ProblemSpec::new(inner.spec().name.clone(), m, inner.spec().bounds.clone())?
            .with_hints(vec![T::zero(); m], vec![T::one(); m])?;
        if (0..m).any(|j| !(ideal[j] < nadir[j])) {
            return Err(Error::InvalidConfig("normalization needs ideal < nadir".into()));
        }
        Ok(Self { inner, spec, ideal, nadir })
    }

    pub fn ideal(&self) -> &[T] {
        &self.ideal
    }

    pub fn nadir(&self) -> &[T] {
        &self.nadir
    }

    /// Maps a normalized objective vector back to raw units.
    pub fn denormalize(&self, f: &[T]) -> Vec<T> {
        f.iter()
            .enumerate()
            .map(|(j, &v)| self.ideal[j] + v * (self.nadir[j] - self.ideal[j]))
            .collect()
    }
}

impl<T: Scalar> Problem<T> for NormalizedProblem<'_, T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn objectives(&self, x: &[T]) -> Vec<T> {
        self.inner
            .objectives(x)
            .into_iter()
            .enumerate()
            .map(|(j, v)| (v - self.ideal[j]) / (self.nadir[j] - self.ideal[j]))
            .collect()
    }

    fn jacobian(&self, x: &[T]) -> Option<Vec<Vec<T>>> {
        let mut jac = self.inner.jacobian(x)?;
        for (j, row) in jac.iter_mut().enumerate() {
            let s = self.nadir[j] - self.ideal[j];
            row.iter_mut().for_each(|v| *v = *v / s);
        }
        Some(jac)
    }
}

pub fn estimate_hints<T: Scalar>(problem: &dyn Problem<T>, samples: usize, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    let spec = problem.spec();
    let mut rng = RngStream::new(seed);
    let mut lo = vec![T::infinity(); spec.m];
    let mut hi = vec![T::neg_infinity(); spec.m];
    for _ in 0..samples {
        let x = spec.bounds.sample_uniform(&mut rng);
        let f = problem.evaluate(&x)?;
        for j in 0..spec.m {
            lo[j] = lo[j].min(f[j]);
            hi[j] = hi[j].max(f[j]);
        }
    }
    for j in 0..spec.m {
        if !(lo[j] < hi[j]) {
            hi[j] = lo[j] + T::one();
        }
    }
    Ok((lo, hi))
}
