//! Preference-conditioned set models: a small network mapping a preference to a
//! decision vector, plus three variants that constrain the whole solution set.

mod chain;
mod mlp;

use serde::{Deserialize, Serialize};

use crate::domain::{BoxBounds, DecisionVector, ObjectiveVector, PreferenceSampler, PreferenceVector, RngStream};
use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::scalar::{logistic, logit, Scalar};

pub use chain::{chain_point, distance_to_chain, DEFAULT_VERTICES};
pub use mlp::{MlpParams, DEFAULT_HIDDEN};

/// Analytic prior tying a dependent coordinate to the driver coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `sin(alpha (x_d - beta))`
    Sine,
    /// `1 - alpha (x_d - beta)^2`
    Poly,
}

impl RelationKind {
    fn eval<T: Scalar>(self, alpha: T, beta: T, driver: T) -> T {
        let d = driver - beta;
        match self {
            RelationKind::Sine => (alpha * d).sin(),
            RelationKind::Poly => T::one() - alpha * d * d,
        }
    }

    /// Partial derivatives with respect to `(alpha, beta, driver)`.
    fn partials<T: Scalar>(self, alpha: T, beta: T, driver: T) -> (T, T, T) {
        let d = driver - beta;
        match self {
            RelationKind::Sine => {
                let c = (alpha * d).cos();
                (c * d, -c * alpha, c * alpha)
            }
            RelationKind::Poly => {
                let two = T::lit(2.0);
                (-d * d, two * alpha * d, -two * alpha * d)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlainModel<T> {
    pub net: MlpParams<T>,
}

/// Coordinates in `shared` take the squashed value of `beta` for every preference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedModel<T> {
    pub shared: Vec<usize>,
    pub free: Vec<usize>,
    pub beta: Vec<T>,
    pub net: MlpParams<T>,
}

/// Coordinates in `dependent` follow the relation of `base[0]`, clamped to the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationModel<T> {
    pub kind: RelationKind,
    pub base: Vec<usize>,
    pub dependent: Vec<usize>,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub net: MlpParams<T>,
}

/// The network emits a scalar tracer `t in [1, K]` that addresses a point on
/// the chain through `K` vertices. Vertices are stored unconstrained
/// (row-major `K x n`) and squashed into the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainModel<T> {
    pub dim: usize,
    pub vertices: usize,
    pub vertex_logits: Vec<T>,
    pub net: MlpParams<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SetModel<T> {
    Plain(PlainModel<T>),
    Shared(SharedModel<T>),
    Relation(RelationModel<T>),
    Chain(ChainModel<T>),
}

/// Which variant to build, with its structural choices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum VariantSpec {
    Plain,
    Shared { indices: Vec<usize> },
    Relation { kind: RelationKind, base: Vec<usize> },
    Chain { vertices: usize },
}

impl VariantSpec {
    pub fn name(&self) -> &'static str {
        match self {
            VariantSpec::Plain => "plain",
            VariantSpec::Shared { .. } => "shared",
            VariantSpec::Relation { .. } => "relation",
            VariantSpec::Chain { .. } => "chain",
        }
    }
}

/// Gradient with one block per trainable parameter array, in the order of
/// [`SetModel::blocks`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrad<T> {
    pub blocks: Vec<Vec<T>>,
}

impl<T: Scalar> ParamGrad<T> {
    pub fn zeros_like(model: &SetModel<T>) -> Self {
        Self {
            blocks: model.blocks().iter().map(|b| vec![T::zero(); b.len()]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn add_scaled(&mut self, other: &ParamGrad<T>, scale: T) -> Result<()> {
        Error::check_len(self.blocks.len(), other.blocks.len())?;
        for (a, b) in self.blocks.iter_mut().zip(&other.blocks) {
            Error::check_len(a.len(), b.len())?;
            a.iter_mut().zip(b).for_each(|(x, &y)| *x = *x + scale * y);
        }
        Ok(())
    }

    pub fn scale(&mut self, s: T) {
        self.blocks.iter_mut().flatten().for_each(|v| *v = *v * s);
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.iter().flatten().all(|v| v.is_finite())
    }

    pub fn flat(&self) -> Vec<T> {
        self.blocks.iter().flatten().copied().collect()
    }
}

/// One sampled solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triple<T> {
    pub pref: PreferenceVector<T>,
    pub x: DecisionVector<T>,
    pub f: ObjectiveVector<T>,
}

fn complement(n: usize, taken: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; n];
    for &i in taken {
        if i >= n {
            return Err(Error::InvalidConfig(format!("index {i} outside 0..{n}")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::InvalidConfig(format!("index {i} listed twice")));
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !seen[i]).collect();
    if rest.is_empty() {
        return Err(Error::InvalidConfig("at least one coordinate must come from the network".into()));
    }
    Ok(rest)
}

fn check_partition(n: usize, a: &[usize], b: &[usize]) -> Result<()> {
    let mut rest = complement(n, a)?;
    let mut b = b.to_vec();
    rest.sort_unstable();
    b.sort_unstable();
    if rest != b {
        return Err(Error::InvalidConfig("index sets must partition the decision coordinates".into()));
    }
    Ok(())
}

impl<T: Scalar> SetModel<T> {
    /// Builds a freshly initialized model for `m` objectives over `bounds`.
    pub fn init(spec: &VariantSpec, m: usize, bounds: &BoxBounds<T>, hidden: usize, rng: &mut RngStream) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidDimension(format!("need m >= 2 objectives, got {m}")));
        }
        if hidden == 0 {
            return Err(Error::InvalidConfig("hidden width must be positive".into()));
        }
        let n = bounds.dim();
        let model = match spec {
            VariantSpec::Plain => SetModel::Plain(PlainModel {
                net: MlpParams::init(m, hidden, n, rng),
            }),
            VariantSpec::Shared { indices } => {
                if indices.is_empty() {
                    return Err(Error::InvalidConfig("shared variant needs at least one index".into()));
                }
                let free = complement(n, indices)?;
                SetModel::Shared(SharedModel {
                    shared: indices.clone(),
                    beta: vec![T::zero(); indices.len()],
                    net: MlpParams::init(m, hidden, free.len(), rng),
                    free,
                })
            }
            VariantSpec::Relation { kind, base } => {
                if base.is_empty() {
                    return Err(Error::InvalidConfig("relation variant needs a driver coordinate".into()));
                }
                let dependent = complement(n, base)?;
                let k = dependent.len();
                if k == 0 {
                    return Err(Error::InvalidConfig("relation variant needs a dependent coordinate".into()));
                }
                let mid = bounds.midpoint()[base[0]];
                let net = MlpParams::init(m, hidden, base.len(), rng);
                SetModel::Relation(RelationModel {
                    kind: *kind,
                    base: base.clone(),
                    alpha: vec![T::one(); dependent.len()],
                    beta: vec![mid; dependent.len()],
                    dependent,
                    net,
                })
            }
            VariantSpec::Chain { vertices } => {
                if *vertices < 2 {
                    return Err(Error::InvalidConfig(format!("chain needs K >= 2 vertices, got {vertices}")));
                }
                let net = MlpParams::init(m, hidden, 1, rng);
                let a: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
                let b: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
                let mut logits = Vec::with_capacity(vertices * n);
                for k in 0..*vertices {
                    let s = k as f64 / (*vertices - 1) as f64;
                    for i in 0..n {
                        let frac = (a[i] + s * (b[i] - a[i])).clamp(1e-3, 1.0 - 1e-3);
                        logits.push(logit(T::lit(frac)));
                    }
                }
                SetModel::Chain(ChainModel {
                    dim: n,
                    vertices: *vertices,
                    vertex_logits: logits,
                    net,
                })
            }
        };
        Ok(model)
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            SetModel::Plain(_) => "plain",
            SetModel::Shared(_) => "shared",
            SetModel::Relation(_) => "relation",
            SetModel::Chain(_) => "chain",
        }
    }

    pub fn net(&self) -> &MlpParams<T> {
        match self {
            SetModel::Plain(p) => &p.net,
            SetModel::Shared(p) => &p.net,
            SetModel::Relation(p) => &p.net,
            SetModel::Chain(p) => &p.net,
        }
    }

    pub fn pref_dim(&self) -> usize {
        self.net().input
    }

    pub fn decision_dim(&self) -> usize {
        match self {
            SetModel::Plain(p) => p.net.output,
            SetModel::Shared(p) => p.shared.len() + p.free.len(),
            SetModel::Relation(p) => p.base.len() + p.dependent.len(),
            SetModel::Chain(p) => p.dim,
        }
    }

    /// Structural checks for a model that came from outside (e.g. a file).
    pub fn validate(&self) -> Result<()> {
        let net = self.net();
        net.validate()?;
        let n = self.decision_dim();
        let extra_len = |name: &str, v: &[T], want: usize| -> Result<()> {
            if v.len() != want {
                return Err(Error::InvalidConfig(format!("{name} has {} entries, expected {want}", v.len())));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(name.to_string()));
            }
            Ok(())
        };
        match self {
            SetModel::Plain(_) => {}
            SetModel::Shared(p) => {
                check_partition(n, &p.shared, &p.free)?;
                Error::check_len(p.free.len(), net.output)?;
                extra_len("beta", &p.beta, p.shared.len())?;
            }
            SetModel::Relation(p) => {
                check_partition(n, &p.dependent, &p.base)?;
                Error::check_len(p.base.len(), net.output)?;
                extra_len("alpha", &p.alpha, p.dependent.len())?;
                extra_len("beta", &p.beta, p.dependent.len())?;
            }
            SetModel::Chain(p) => {
                Error::check_len(1, net.output)?;
                if p.vertices < 2 {
                    return Err(Error::InvalidConfig("chain needs K >= 2 vertices".into()));
                }
                extra_len("vertex_logits", &p.vertex_logits, p.vertices * p.dim)?;
            }
        }
        Ok(())
    }

    /// Trainable arrays in a fixed order: the network's `[w1, b1, w2, b2]`
    /// followed by the variant's own blocks.
    pub fn blocks(&self) -> Vec<&[T]> {
        let mut out: Vec<&[T]> = self.net().blocks().to_vec();
        match self {
            SetModel::Plain(_) => {}
            SetModel::Shared(p) => out.push(&p.beta),
            SetModel::Relation(p) => {
                out.push(&p.alpha);
                out.push(&p.beta);
            }
            SetModel::Chain(p) => out.push(&p.vertex_logits),
        }
        out
    }

    pub fn blocks_mut(&mut self) -> Vec<&mut [T]> {
        match self {
            SetModel::Plain(p) => p.net.blocks_mut().into_iter().collect(),
            SetModel::Shared(p) => {
                let mut v: Vec<&mut [T]> = p.net.blocks_mut().into_iter().collect();
                v.push(&mut p.beta);
                v
            }
            SetModel::Relation(p) => {
                let mut v: Vec<&mut [T]> = p.net.blocks_mut().into_iter().collect();
                v.push(&mut p.alpha);
                v.push(&mut p.beta);
                v
            }
            SetModel::Chain(p) => {
                let mut v: Vec<&mut [T]> = p.net.blocks_mut().into_iter().collect();
                v.push(&mut p.vertex_logits);
                v
            }
        }
    }

    pub fn param_count(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }

    fn check_shapes(&self, pref: &[T], bounds: &BoxBounds<T>) -> Result<()> {
        Error::check_len(self.pref_dim(), pref.len())?;
        Error::check_len(self.decision_dim(), bounds.dim())
    }

    /// Chain vertices after squashing into `bounds`.
    pub fn chain_vertices(&self, bounds: &BoxBounds<T>) -> Option<Vec<Vec<T>>> {
        match self {
            SetModel::Chain(p) => Some(p.squashed_vertices(bounds)),
            _ => None,
        }
    }

    /// Tracer value `t in [1, K]` of a chain model.
    pub fn tracer(&self, pref: &PreferenceVector<T>) -> Option<T> {
        match self {
            SetModel::Chain(p) => Some(p.tracer_of(p.net.trace(pref).out[0])),
            _ => None,
        }
    }

    pub fn forward(&self, pref: &PreferenceVector<T>, bounds: &BoxBounds<T>) -> Result<DecisionVector<T>> {
        self.check_shapes(pref, bounds)?;
        let out = self.net().trace(pref).out;
        let n = self.decision_dim();
        let x = match self {
            SetModel::Plain(_) => out.iter().enumerate().map(|(i, &z)| bounds.squash(i, z)).collect(),
            SetModel::Shared(p) => {
                let mut x = vec![T::zero(); n];
                for (j, &i) in p.free.iter().enumerate() {
                    x[i] = bounds.squash(i, out[j]);
                }
                for (j, &i) in p.shared.iter().enumerate() {
                    x[i] = bounds.squash(i, p.beta[j]);
                }
                x
            }
            SetModel::Relation(p) => {
                let mut x = vec![T::zero(); n];
                for (j, &i) in p.base.iter().enumerate() {
                    x[i] = bounds.squash(i, out[j]);
                }
                let driver = x[p.base[0]];
                for (j, &i) in p.dependent.iter().enumerate() {
                    let r = p.kind.eval(p.alpha[j], p.beta[j], driver);
                    x[i] = r.max(bounds.lower()[i]).min(bounds.upper()[i]);
                }
                x
            }
            SetModel::Chain(p) => {
                let t = p.tracer_of(out[0]);
                chain_point(&p.squashed_vertices(bounds), t)?
            }
        };
        Ok(DecisionVector(x))
    }

    /// Vector-Jacobian product of [`forward`](Self::forward) with `grad_x`.
    pub fn backward(&self, pref: &PreferenceVector<T>, bounds: &BoxBounds<T>, grad_x: &[T]) -> Result<ParamGrad<T>> {
        self.check_shapes(pref, bounds)?;
        Error::check_len(self.decision_dim(), grad_x.len())?;
        let trace = self.net().trace(pref);
        let mut grad = ParamGrad::zeros_like(self);
        let g_out: Vec<T> = match self {
            SetModel::Plain(_) => grad_x
                .iter()
                .enumerate()
                .map(|(i, &g)| g * bounds.squash_deriv(i, trace.out[i]))
                .collect(),
            SetModel::Shared(p) => {
                for (j, &i) in p.shared.iter().enumerate() {
                    grad.blocks[4][j] = grad_x[i] * bounds.squash_deriv(i, p.beta[j]);
                }
                p.free
                    .iter()
                    .enumerate()
                    .map(|(j, &i)| grad_x[i] * bounds.squash_deriv(i, trace.out[j]))
                    .collect()
            }
            SetModel::Relation(p) => {
                let d0 = p.base[0];
                let driver = bounds.squash(d0, trace.out[0]);
                let mut g_base: Vec<T> = p.base.iter().map(|&i| grad_x[i]).collect();
                for (j, &i) in p.dependent.iter().enumerate() {
                    let r = p.kind.eval(p.alpha[j], p.beta[j], driver);
                    if r < bounds.lower()[i] || r > bounds.upper()[i] {
                        continue;
                    }
                    let (da, db, dd) = p.kind.partials(p.alpha[j], p.beta[j], driver);
                    grad.blocks[4][j] = grad_x[i] * da;
                    grad.blocks[5][j] = grad_x[i] * db;
                    g_base[0] = g_base[0] + grad_x[i] * dd;
                }
                p.base
                    .iter()
                    .enumerate()
                    .map(|(j, &i)| g_base[j] * bounds.squash_deriv(i, trace.out[j]))
                    .collect()
            }
            SetModel::Chain(p) => {
                let verts = p.squashed_vertices(bounds);
                let t = p.tracer_of(trace.out[0]);
                let (seg, frac) = chain::segment(p.vertices, t);
                let n = p.dim;
                let mut g_t = T::zero();
                for i in 0..n {
                    let g = grad_x[i];
                    let lo = seg * n + i;
                    let hi = (seg + 1) * n + i;
                    grad.blocks[4][lo] = grad.blocks[4][lo] + (T::one() - frac) * g * bounds.squash_deriv(i, p.vertex_logits[lo]);
                    grad.blocks[4][hi] = grad.blocks[4][hi] + frac * g * bounds.squash_deriv(i, p.vertex_logits[hi]);
                    g_t = g_t + g * (verts[seg + 1][i] - verts[seg][i]);
                }
                let s = logistic(trace.out[0]);
                let span = T::from_usize_lossy(p.vertices - 1);
                vec![g_t * span * s * (T::one() - s)]
            }
        };
        self.net().backward(pref, &trace, &g_out, &mut grad.blocks[..4]);
        Ok(grad)
    }

    /// Applies `param <- param - step * grad` to every block.
    pub fn apply_step(&mut self, grad: &ParamGrad<T>, step: T) -> Result<()> {
        let mut blocks = self.blocks_mut();
        Error::check_len(blocks.len(), grad.blocks.len())?;
        for (p, g) in blocks.iter_mut().zip(&grad.blocks) {
            Error::check_len(p.len(), g.len())?;
            p.iter_mut().zip(g).for_each(|(v, &d)| *v = *v - step * d);
        }
        Ok(())
    }
}

impl<T: Scalar> ChainModel<T> {
    fn tracer_of(&self, z: T) -> T {
        T::one() + T::from_usize_lossy(self.vertices - 1) * logistic(z)
    }

    fn squashed_vertices(&self, bounds: &BoxBounds<T>) -> Vec<Vec<T>> {
        self.vertex_logits
            .chunks(self.dim)
            .map(|row| row.iter().enumerate().map(|(i, &v)| bounds.squash(i, v)).collect())
            .collect()
    }
}

/// Draws `count` preferences from `rng`, maps each through the model and
/// evaluates it. The i-th triple depends only on the first i draws, so a
/// larger sample from the same seed extends a smaller one.
pub fn sample_set<T: Scalar>(
    model: &SetModel<T>,
    problem: &dyn Problem<T>,
    count: usize,
    rng: &mut RngStream,
) -> Result<Vec<Triple<T>>> {
    if count == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1".into()));
    }
    let spec = problem.spec();
    let sampler = PreferenceSampler::new(spec.m)?;
    (0..count)
        .map(|_| {
            let pref = sampler.sample::<T>(rng);
            let x = model.forward(&pref, &spec.bounds)?;
            let f = problem.evaluate(&x)?;
            Ok(Triple { pref, x, f })
        })
        .collect()
}
