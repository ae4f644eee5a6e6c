//! EPSL against MOEA/D-TCH on one problem under equal evaluation budgets.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifact::{run, MetricsReport, MetricsRow, RunArtifact, RunConfig};
use crate::error::{Error, Result};
use crate::model::VariantSpec;
use crate::moead::MoeadConfig;
use crate::train::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub problem: String,
    pub seeds: Vec<u64>,
    pub variant: VariantSpec,
    /// Template for every EPSL run; its seed is replaced per run.
    pub train: TrainConfig,
    pub moead: MoeadConfig,
}

impl CompareConfig {
    /// Evaluations each method may spend: the EPSL budget `N (K + 1) T`.
    pub fn budget(&self) -> usize {
        self.train.budget()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianRow {
    pub problem: String,
    pub method: String,
    pub runs: usize,
    pub median_dhv: Option<f64>,
    pub median_igd_plus: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub budget: usize,
    pub report: MetricsReport,
    pub medians: Vec<MedianRow>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

fn medians(rows: &[MetricsRow]) -> Vec<MedianRow> {
    let mut methods: Vec<&str> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    methods
        .into_iter()
        .map(|method| {
            let mine: Vec<&MetricsRow> = rows.iter().filter(|r| r.method == method).collect();
            let mut dhv: Vec<f64> = mine.iter().filter_map(|r| r.dhv).collect();
            let mut igd: Vec<f64> = mine.iter().filter_map(|r| r.igd_plus).collect();
            MedianRow {
                problem: mine[0].problem.clone(),
                method: method.to_string(),
                runs: mine.len(),
                median_dhv: median(&mut dhv),
                median_igd_plus: median(&mut igd),
            }
        })
        .collect()
}

/// Runs both methods for every seed, in parallel across seeds. Each run is
/// deterministic, so the report does not depend on scheduling.
pub fn compare(cfg: &CompareConfig, data_dir: Option<&Path>) -> Result<(CompareReport, Vec<RunArtifact>)> {
    if cfg.seeds.is_empty() {
        return Err(Error::Empty("compare needs at least one seed"));
    }
    let budget = cfg.budget();
    let configs: Vec<RunConfig> = cfg
        .seeds
        .iter()
        .flat_map(|&seed| {
            let train = TrainConfig { seed, ..cfg.train.clone() };
            [
                RunConfig::epsl(cfg.problem.clone(), cfg.variant.clone(), train),
                RunConfig::moead(cfg.problem.clone(), cfg.moead.clone(), budget, seed),
            ]
        })
        .collect();
    let artifacts = configs
        .par_iter()
        .map(|c| run(c, data_dir))
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<MetricsRow> = artifacts.iter().flat_map(|a| a.metrics.rows.clone()).collect();
    rows.sort_by(|a, b| a.method.cmp(&b.method).then(a.seed.cmp(&b.seed)));
    let medians = medians(&rows);
    Ok((
        CompareReport {
            budget,
            report: MetricsReport::new(rows),
            medians,
        },
        artifacts,
    ))
}

impl CompareReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("# equal budget: {} evaluations per run\n", self.budget);
        out.push_str(&self.report.to_text());
        out.push_str("\nproblem\tmethod\truns\tmedian_dhv\tmedian_igd_plus\n");
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6e}"));
        for m in &self.medians {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                m.problem,
                m.method,
                m.runs,
                opt(m.median_dhv),
                opt(m.median_igd_plus)
            ));
        }
        out
    }
}
