use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use paretoset::artifact::{log_path, run, MetricsReport, MetricsRow, RunArtifact, RunConfig, Scorer};
use paretoset::bundle::export_ui_bundle;
use paretoset::compare::{compare, CompareConfig};
use paretoset::domain::RngStream;
use paretoset::es::{EsConfig, DEFAULT_K, DEFAULT_SIGMA};
use paretoset::model::{sample_set, RelationKind, VariantSpec, DEFAULT_HIDDEN, DEFAULT_VERTICES};
use paretoset::moead::MoeadConfig;
use paretoset::problems::{by_name, DATA_DIR_ENV};
use paretoset::scalarize::DEFAULT_EPSILON;
use paretoset::train::{Optimizer, TrainConfig, DEFAULT_ETA};

const OUT_DIR_ENV: &str = "PARETOSET_OUT_DIR";

#[derive(Parser)]
#[command(name = "paretoset", version, about = "Learn Pareto sets with evolution-strategy gradients")]
struct Cli {
    /// Directory with reference fronts and ideal/nadir files.
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    data_dir: Option<PathBuf>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a set model and write its run artifact.
    Train(TrainArgs),
    /// Draw fresh solutions from a trained artifact.
    Sample(SampleArgs),
    /// Run EPSL and MOEA/D-TCH under equal budgets over several seeds.
    Compare(CompareArgs),
    /// Recompute the metrics of an artifact.
    Metrics(MetricsArgs),
    /// Write the explorer bundle for a trained artifact.
    ExportUi(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Plain,
    Shared,
    Relation,
    Chain,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    Sine,
    Poly,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value = "syn")]
    problem: String,
    #[arg(long, value_enum, default_value = "plain")]
    variant: VariantArg,
    /// Shared coordinates, 0-based and comma separated.
    #[arg(long, value_delimiter = ',')]
    shared_idx: Vec<usize>,
    #[arg(long, value_enum, default_value = "sine")]
    relation: RelationArg,
    /// Base coordinates of the relation variant, 0-based.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    base_idx: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_VERTICES)]
    vertices: usize,
    #[arg(long, default_value_t = DEFAULT_HIDDEN)]
    hidden: usize,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 5)]
    n_pref: usize,
    #[arg(long, default_value_t = DEFAULT_K)]
    k_es: usize,
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Total evaluation budget; overrides --iters with budget / (n_pref (k_es + 1)).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    adam: bool,
    #[arg(long)]
    cosine: bool,
    #[arg(long)]
    antithetic: bool,
    /// Difference only the maximizing objective.
    #[arg(long)]
    tch_variant: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Artifact path; defaults to `<problem>_<variant>_seed<seed>.json` in
    /// the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    artifact: PathBuf,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Seeds, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "runs")]
    seeds: Vec<u64>,
    /// Use seeds 0..runs.
    #[arg(long)]
    runs: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pop_size: usize,
    /// JSON report path; the text report always goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    artifact: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    artifact: PathBuf,
    #[arg(long, default_value_t = 201)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ModelArgs {
    fn variant(&self) -> VariantSpec {
        match self.variant {
            VariantArg::Plain => VariantSpec::Plain,
            VariantArg::Shared => VariantSpec::Shared {
                indices: self.shared_idx.clone(),
            },
            VariantArg::Relation => VariantSpec::Relation {
                kind: match self.relation {
                    RelationArg::Sine => RelationKind::Sine,
                    RelationArg::Poly => RelationKind::Poly,
                },
                base: self.base_idx.clone(),
            },
            VariantArg::Chain => VariantSpec::Chain {
                vertices: self.vertices,
            },
        }
    }

    fn train_config(&self, seed: u64) -> Result<TrainConfig> {
        let per_iter = self.n_pref * (self.k_es + 1);
        let iters = match self.budget {
            Some(b) if per_iter > 0 => b / per_iter,
            _ => self.iters,
        };
        let cfg = TrainConfig {
            n_pref: self.n_pref,
            iters,
            eta: self.eta,
            es: EsConfig {
                k: self.k_es,
                sigma: self.sigma,
                use_tch_variant: self.tch_variant,
                antithetic: self.antithetic,
            },
            seed,
            epsilon: self.epsilon,
            optimizer: if self.adam { Optimizer::Adam } else { Optimizer::Sgd },
            cosine_decay: self.cosine,
            ..TrainConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from)
}

fn write_json(path: Option<&Path>, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_train(args: &TrainArgs, data_dir: Option<&Path>) -> Result<()> {
    by_name::<f64>(&args.model.problem)?;
    let mut config = RunConfig::epsl(
        args.model.problem.clone(),
        args.model.variant(),
        args.model.train_config(args.seed)?,
    );
    if let paretoset::artifact::Method::Epsl { hidden, .. } = &mut config.method {
        *hidden = args.model.hidden;
    }
    let artifact = run(&config, data_dir)?;
    let path = args.out.clone().unwrap_or_else(|| {
        out_dir().join(format!(
            "{}_{}_seed{}.json",
            args.model.problem,
            args.model.variant().name(),
            args.seed
        ))
    });
    artifact.save(&path)?;
    artifact.write_log(&log_path(&path))?;
    print!("{}", artifact.metrics.to_text());
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_sample(args: &SampleArgs) -> Result<()> {
    let artifact = RunArtifact::load(&args.artifact)?;
    let Some(model) = artifact.model() else {
        bail!("{} holds a population, not a model", args.artifact.display());
    };
    let problem = by_name::<f64>(&artifact.config.problem)?;
    let triples = sample_set(model, problem.as_ref(), args.count, &mut RngStream::new(args.seed))?;
    write_json(args.out.as_deref(), &triples)
}

fn cmd_compare(args: &CompareArgs, data_dir: Option<&Path>) -> Result<()> {
    let seeds = match args.runs {
        Some(n) => (0..n).collect(),
        None if args.seeds.is_empty() => vec![0],
        None => args.seeds.clone(),
    };
    let cfg = CompareConfig {
        problem: args.model.problem.clone(),
        seeds,
        variant: args.model.variant(),
        train: args.model.train_config(0)?,
        moead: MoeadConfig {
            pop_size: args.pop_size,
            ..MoeadConfig::default()
        },
    };
    let (report, _) = compare(&cfg, data_dir)?;
    print!("{}", report.to_text());
    if let Some(path) = &args.out {
        write_json(Some(path), &report)?;
    }
    Ok(())
}

fn cmd_metrics(args: &MetricsArgs, data_dir: Option<&Path>) -> Result<()> {
    let artifact = RunArtifact::load(&args.artifact)?;
    let scorer = Scorer::new(by_name(&artifact.config.problem)?, data_dir)?;
    let stored = &artifact.metrics.rows;
    let rows = artifact
        .samples
        .iter()
        .map(|set| {
            let (hv, dhv, igd_plus) = scorer.score(&set.objectives())?;
            let old = stored.iter().find(|r| r.method == set.label);
            Ok(MetricsRow {
                problem: artifact.config.problem.clone(),
                method: set.label.clone(),
                seed: artifact.config.seed(),
                hv,
                dhv,
                igd_plus,
                eval_count: old.map_or(0, |r| r.eval_count),
                wall_time_ms: old.map_or(0.0, |r| r.wall_time_ms),
            })
        })
        .collect::<paretoset::Result<Vec<_>>>()?;
    print!("{}", MetricsReport::new(rows).to_text());
    Ok(())
}

fn cmd_export(args: &ExportArgs, data_dir: Option<&Path>) -> Result<()> {
    let artifact = RunArtifact::load(&args.artifact)?;
    let bundle = export_ui_bundle(&artifact, args.grid, data_dir)?;
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| args.artifact.with_extension("bundle.json"));
    bundle.save(&path)?;
    eprintln!("wrote {} ({} grid points)", path.display(), bundle.grid.len());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let data_dir = cli.data_dir.as_deref();
    match &cli.command {
        Command::Train(a) => cmd_train(a, data_dir),
        Command::Sample(a) => cmd_sample(a),
        Command::Compare(a) => cmd_compare(a, data_dir),
        Command::Metrics(a) => cmd_metrics(a, data_dir),
        Command::ExportUi(a) => cmd_export(a, data_dir),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
