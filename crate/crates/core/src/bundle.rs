//! The explorer bundle: a dense preference grid pushed through a trained
//! model, with everything a viewer needs to draw it.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::artifact::{check_schema, RunArtifact, SCHEMA_VERSION};
use crate::domain::{BoxBounds, PreferenceVector};
use crate::error::{Error, Result};
use crate::model::{RelationKind, SetModel, Triple};
use crate::problems::{by_name, ground_truth};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub name: String,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantMeta {
    pub variant: String,
    pub shared_indices: Option<Vec<usize>>,
    pub relation: Option<RelationKind>,
    pub base_indices: Option<Vec<usize>>,
    pub dependent_indices: Option<Vec<usize>>,
    pub chain_vertices: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consistency {
    pub evaluations: usize,
    pub max_abs_error: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UiBundle {
    pub schema_version: u32,
    pub problem: ProblemMeta,
    pub bounds: BoxBounds<f64>,
    pub variant: VariantMeta,
    pub pf_samples: Option<Vec<Vec<f64>>>,
    pub grid: Vec<Triple<f64>>,
    pub consistency: Consistency,
}

/// Preference grid: for two objectives `grid` points with `lambda_1`
/// running from 0 to 1; for three, the triangular lattice with `grid`
/// points per edge.
pub fn preference_grid(m: usize, grid: usize) -> Result<Vec<PreferenceVector<f64>>> {
    if grid < 2 {
        return Err(Error::InvalidConfig(format!("grid needs at least 2 points, got {grid}")));
    }
    let h = (grid - 1) as f64;
    match m {
        2 => (0..grid)
            .map(|i| {
                let a = i as f64 / h;
                PreferenceVector::new(vec![a, 1.0 - a])
            })
            .collect(),
        3 => {
            let mut out = Vec::new();
            for i in 0..grid {
                for j in 0..grid - i {
                    let (a, b) = (i as f64 / h, j as f64 / h);
                    out.push(PreferenceVector::new(vec![a, b, (1.0 - a - b).max(0.0)])?);
                }
            }
            Ok(out)
        }
        _ => Err(Error::InvalidDimension(format!("bundle grids cover m = 2 or 3, got {m}"))),
    }
}

fn variant_meta(model: &SetModel<f64>, bounds: &BoxBounds<f64>) -> VariantMeta {
    let mut meta = VariantMeta {
        variant: model.variant_name().to_string(),
        shared_indices: None,
        relation: None,
        base_indices: None,
        dependent_indices: None,
        chain_vertices: None,
    };
    match model {
        SetModel::Plain(_) => {}
        SetModel::Shared(s) => meta.shared_indices = Some(s.shared.clone()),
        SetModel::Relation(r) => {
            meta.relation = Some(r.kind);
            meta.base_indices = Some(r.base.clone());
            meta.dependent_indices = Some(r.dependent.clone());
        }
        SetModel::Chain(_) => meta.chain_vertices = model.chain_vertices(bounds),
    }
    meta
}

/// Builds the bundle for a trained artifact, re-evaluating every grid
/// solution to stamp its consistency.
pub fn export_ui_bundle(artifact: &RunArtifact, grid: usize, data_dir: Option<&Path>) -> Result<UiBundle> {
    let model = artifact
        .model()
        .ok_or_else(|| Error::InvalidConfig("artifact holds no trained model".into()))?;
    let problem = by_name::<f64>(&artifact.config.problem)?;
    let spec = problem.spec();
    let triples = preference_grid(spec.m, grid)?
        .into_iter()
        .map(|pref| {
            let x = model.forward(&pref, &spec.bounds)?;
            let f = problem.evaluate(&x)?;
            Ok(Triple { pref, x, f })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for t in &triples {
        let again = problem.evaluate(&t.x)?;
        for (a, b) in again.iter().zip(t.f.iter()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(UiBundle {
        schema_version: SCHEMA_VERSION,
        problem: ProblemMeta {
            name: spec.name.clone(),
            n: spec.n,
            m: spec.m,
        },
        bounds: spec.bounds.clone(),
        variant: variant_meta(model, &spec.bounds),
        pf_samples: ground_truth(problem.as_ref(), data_dir)?.pf_samples,
        consistency: Consistency {
            evaluations: triples.len(),
            max_abs_error: worst,
            consistent: worst == 0.0,
        },
        grid: triples,
    })
}

impl UiBundle {
    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(path)?)?;
        check_schema(&value)?;
        Ok(serde_json::from_value(value)?)
    }
}
