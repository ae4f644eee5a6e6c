//! Run artifacts: the configuration, trained model or final population,
//! sampled sets, metrics and training log of one run, stored as JSON.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::domain::RngStream;
use crate::error::{Error, Result};
use crate::metrics::{hypervolume, igd_plus, normalize_all, MetricContext};
use crate::model::{sample_set, SetModel, Triple, VariantSpec, DEFAULT_HIDDEN};
use crate::moead::{evolve, MoeadConfig, Population};
use crate::problems::{by_name, ground_truth, resolve_hints, Problem};
use crate::train::{train, IterRecord, TrainConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Sample sizes drawn from every trained model.
pub const SAMPLE_COUNTS: [usize; 2] = [100, 1000];

const MODEL_SALT: u64 = 0x6d6f_6465_6c00;
const SAMPLE_SALT: u64 = 0x7361_6d70_6c65;

pub const IGD_NOTE: &str = "objectives normalized by the problem's ideal/nadir before HV and IGD+; HV reference 1.1 per objective";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Epsl {
        variant: VariantSpec,
        hidden: usize,
        train: TrainConfig,
    },
    Moead {
        moead: MoeadConfig,
        /// Total evaluations including the initial population.
        budget: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: String,
    #[serde(flatten)]
    pub method: Method,
    pub sample_counts: Vec<usize>,
    pub sample_seed: u64,
}

impl RunConfig {
    pub fn epsl(problem: impl Into<String>, variant: VariantSpec, train: TrainConfig) -> Self {
        let seed = train.seed;
        Self {
            problem: problem.into(),
            method: Method::Epsl {
                variant,
                hidden: DEFAULT_HIDDEN,
                train,
            },
            sample_counts: SAMPLE_COUNTS.to_vec(),
            sample_seed: seed ^ SAMPLE_SALT,
        }
    }

    pub fn moead(problem: impl Into<String>, moead: MoeadConfig, budget: usize, seed: u64) -> Self {
        Self {
            problem: problem.into(),
            method: Method::Moead { moead, budget, seed },
            sample_counts: Vec::new(),
            sample_seed: seed ^ SAMPLE_SALT,
        }
    }

    pub fn seed(&self) -> u64 {
        match &self.method {
            Method::Epsl { train, .. } => train.seed,
            Method::Moead { seed, .. } => *seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Solver {
    Model { model: SetModel<f64> },
    Population { population: Population<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSet {
    pub label: String,
    pub triples: Vec<Triple<f64>>,
}

impl SampledSet {
    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.triples.iter().map(|t| t.f.0.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub problem: String,
    pub method: String,
    pub seed: u64,
    pub hv: f64,
    pub dhv: Option<f64>,
    pub igd_plus: Option<f64>,
    pub eval_count: usize,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub note: String,
    pub rows: Vec<MetricsRow>,
}

impl MetricsReport {
    pub fn new(rows: Vec<MetricsRow>) -> Self {
        Self {
            note: IGD_NOTE.to_string(),
            rows,
        }
    }

    /// One tab-separated line per row under a header.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\nproblem\tmethod\tseed\thv\tdhv\tigd_plus\teval_count\twall_time_ms\n", self.note);
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6e}"));
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{:.6e}\t{}\t{}\t{}\t{:.1}\n",
                r.problem,
                r.method,
                r.seed,
                r.hv,
                opt(r.dhv),
                opt(r.igd_plus),
                r.eval_count,
                r.wall_time_ms
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub optimize_ms: f64,
    pub sample_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifact {
    pub schema_version: u32,
    pub config: RunConfig,
    pub solver: Solver,
    pub samples: Vec<SampledSet>,
    pub metrics: MetricsReport,
    pub log: Vec<IterRecord<f64>>,
    pub timings: Timings,
}

/// Quality indicators of one objective set, shared by the artifact writer,
/// the `metrics` command and the comparison harness.
pub struct Scorer {
    problem: Box<dyn Problem<f64>>,
    ctx: MetricContext<f64>,
    front: Option<Vec<Vec<f64>>>,
    front_hv: Option<f64>,
}

impl Scorer {
    pub fn new(problem: Box<dyn Problem<f64>>, data_dir: Option<&Path>) -> Result<Self> {
        let (ideal, nadir) = resolve_hints(problem.as_ref(), data_dir)?;
        let ctx = MetricContext::new(ideal, nadir)?;
        let front = ground_truth(problem.as_ref(), data_dir)?.pf_samples;
        let front_hv = front.as_ref().map(|f| hypervolume(f, &ctx)).transpose()?;
        Ok(Self {
            problem,
            ctx,
            front,
            front_hv,
        })
    }

    pub fn problem(&self) -> &dyn Problem<f64> {
        self.problem.as_ref()
    }

    pub fn front(&self) -> Option<&[Vec<f64>]> {
        self.front.as_deref()
    }

    /// `(hv, dhv, igd_plus)`; the gap needs a reference front and IGD+ is
    /// reported for two objectives only.
    pub fn score(&self, points: &[Vec<f64>]) -> Result<(f64, Option<f64>, Option<f64>)> {
        let hv = hypervolume(points, &self.ctx)?;
        let dhv = self.front_hv.map(|f| f - hv);
        let igd = match (&self.front, self.ctx.dim()) {
            (Some(front), 2) => Some(igd_plus(&normalize_all(points, &self.ctx)?, &normalize_all(front, &self.ctx)?)?),
            _ => None,
        };
        Ok((hv, dhv, igd))
    }
}

fn method_label(count: usize) -> String {
    if count == SAMPLE_COUNTS[0] {
        "EPSL".to_string()
    } else {
        format!("EPSL({count})")
    }
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Executes the run `config` describes.
pub fn run(config: &RunConfig, data_dir: Option<&Path>) -> Result<RunArtifact> {
    let scorer = Scorer::new(by_name(&config.problem)?, data_dir)?;
    let problem = scorer.problem();
    let seed = config.seed();
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    let (solver, log, timings) = match &config.method {
        Method::Epsl { variant, hidden, train: cfg } => {
            let t0 = Instant::now();
            let mut init_rng = RngStream::new(cfg.seed ^ MODEL_SALT);
            let model = SetModel::init(variant, problem.spec().m, &problem.spec().bounds, *hidden, &mut init_rng)?;
            let state = train(problem, model, cfg).map_err(|f| f.error)?;
            let optimize_ms = elapsed_ms(t0);
            let mut sample_ms = 0.0;
            for &count in &config.sample_counts {
                let t1 = Instant::now();
                let triples = sample_set(&state.model, problem, count, &mut RngStream::new(config.sample_seed))?;
                let ms = elapsed_ms(t1);
                sample_ms += ms;
                let set = SampledSet {
                    label: method_label(count),
                    triples,
                };
                let (hv, dhv, igd) = scorer.score(&set.objectives())?;
                rows.push(MetricsRow {
                    problem: config.problem.clone(),
                    method: set.label.clone(),
                    seed,
                    hv,
                    dhv,
                    igd_plus: igd,
                    eval_count: state.eval_count,
                    wall_time_ms: optimize_ms + ms,
                });
                samples.push(set);
            }
            (Solver::Model { model: state.model }, state.log, Timings { optimize_ms, sample_ms })
        }
        Method::Moead { moead, budget, seed } => {
            let t0 = Instant::now();
            let mut rng = RngStream::new(*seed);
            let pop = Population::init(problem, moead, &mut rng)?;
            let children = budget.checked_sub(pop.eval_count).ok_or_else(|| {
                Error::InvalidConfig(format!("budget {budget} below the initial population {}", pop.eval_count))
            })?;
            let pop = evolve(problem, pop, moead, children, &mut rng)?;
            let optimize_ms = elapsed_ms(t0);
            let set = SampledSet {
                label: "MOEA/D-TCH".to_string(),
                triples: pop
                    .individuals
                    .iter()
                    .zip(&pop.weights)
                    .map(|(ind, w)| Triple {
                        pref: w.clone(),
                        x: ind.x.clone(),
                        f: ind.f.clone(),
                    })
                    .collect(),
            };
            let (hv, dhv, igd) = scorer.score(&set.objectives())?;
            rows.push(MetricsRow {
                problem: config.problem.clone(),
                method: set.label.clone(),
                seed: *seed,
                hv,
                dhv,
                igd_plus: igd,
                eval_count: pop.eval_count,
                wall_time_ms: optimize_ms,
            });
            samples.push(set);
            (Solver::Population { population: pop }, Vec::new(), Timings { optimize_ms, sample_ms: 0.0 })
        }
    };
    Ok(RunArtifact {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        solver,
        samples,
        metrics: MetricsReport::new(rows),
        log,
        timings,
    })
}

/// Rejects documents whose `schema_version` differs from [`SCHEMA_VERSION`].
pub(crate) fn check_schema(value: &serde_json::Value) -> Result<()> {
    let found = value
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::InvalidConfig("document has no schema_version".into()))? as u32;
    if found != SCHEMA_VERSION {
        return Err(Error::SchemaVersion {
            found,
            expected: SCHEMA_VERSION,
        });
    }
    Ok(())
}

impl RunArtifact {
    pub fn model(&self) -> Option<&SetModel<f64>> {
        match &self.solver {
            Solver::Model { model } => Some(model),
            Solver::Population { .. } => None,
        }
    }

    pub fn loss_history(&self) -> Vec<f64> {
        self.log.iter().map(|r| r.loss).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        check_schema(&value)?;
        Ok(serde_json::from_value(value)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Writes the training log as one JSON object per line.
    pub fn write_log(&self, path: &Path) -> Result<()> {
        let mut file = fs::File::create(path)?;
        for record in &self.log {
            writeln!(file, "{}", serde_json::to_string(record)?)?;
        }
        Ok(())
    }

    /// Largest `|F - evaluate(x)|` over every stored triple.
    pub fn consistency_error(&self) -> Result<f64> {
        let problem = by_name::<f64>(&self.config.problem)?;
        let mut worst: f64 = 0.0;
        for set in &self.samples {
            for t in &set.triples {
                let f = problem.evaluate(&t.x)?;
                for (a, b) in f.iter().zip(t.f.iter()) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// Sibling path of `artifact` holding its training log.
pub fn log_path(artifact: &Path) -> PathBuf {
    artifact.with_extension("log.jsonl")
}
