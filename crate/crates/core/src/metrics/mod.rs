//! Dominance, hypervolume, IGD+ and objective normalization.

mod dominance;
mod hypervolume;

use serde::{Deserialize, Serialize};

use crate::domain::RngStream;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use dominance::{dominates, nondominated_filter, strictly_dominates};
pub use hypervolume::{hypervolume_exact, hypervolume_mc, HvEstimate, MC_SAMPLES};

/// Default hypervolume reference coordinate in normalized space.
pub const HV_REFERENCE: f64 = 1.1;

/// Seed for the Monte-Carlo hypervolume used when `m > 3`.
const MC_SEED: u64 = 0x4856;

/// Normalization and reference point shared by every indicator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricContext<T> {
    pub z_ideal: Vec<T>,
    pub z_nadir: Vec<T>,
    pub hv_reference: Vec<T>,
}

impl<T: Scalar> MetricContext<T> {
    pub fn new(z_ideal: Vec<T>, z_nadir: Vec<T>) -> Result<Self> {
        let m = z_ideal.len();
        Error::check_len(m, z_nadir.len())?;
        if let Some(j) = (0..m).find(|&j| !(z_ideal[j] < z_nadir[j])) {
            return Err(Error::InvalidConfig(format!(
                "ideal {} not below nadir {} for objective {j}",
                z_ideal[j], z_nadir[j]
            )));
        }
        Ok(Self {
            z_ideal,
            z_nadir,
            hv_reference: vec![T::lit(HV_REFERENCE); m],
        })
    }

    /// Identity normalization: ideal 0, nadir 1.
    pub fn unit(m: usize) -> Self {
        Self::new(vec![T::zero(); m], vec![T::one(); m]).expect("unit context is valid")
    }

    pub fn with_reference(mut self, reference: Vec<T>) -> Result<Self> {
        Error::check_len(self.z_ideal.len(), reference.len())?;
        self.hv_reference = reference;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.z_ideal.len()
    }
}

/// `(F - z_ideal) / (z_nadir - z_ideal)`; values outside the unit box are kept.
pub fn normalize<T: Scalar>(f: &[T], ctx: &MetricContext<T>) -> Result<Vec<T>> {
    Error::check_len(ctx.dim(), f.len())?;
    Ok(f.iter()
        .zip(ctx.z_ideal.iter().zip(&ctx.z_nadir))
        .map(|(&v, (&lo, &hi))| (v - lo) / (hi - lo))
        .collect())
}

pub fn normalize_all<T: Scalar, P: AsRef<[T]>>(points: &[P], ctx: &MetricContext<T>) -> Result<Vec<Vec<T>>> {
    points.iter().map(|p| normalize(p.as_ref(), ctx)).collect()
}

/// Hypervolume of raw objective vectors after normalization under `ctx`.
/// Exact for two and three objectives, a fixed-seed Monte-Carlo estimate with
/// [`MC_SAMPLES`] samples otherwise.
pub fn hypervolume<T: Scalar, P: AsRef<[T]>>(points: &[P], ctx: &MetricContext<T>) -> Result<T> {
    let normalized = normalize_all(points, ctx)?;
    if ctx.dim() <= 3 {
        hypervolume_exact(&normalized, &ctx.hv_reference)
    } else {
        let est = hypervolume_mc(&normalized, &ctx.hv_reference, MC_SAMPLES, &mut RngStream::new(MC_SEED))?;
        Ok(T::lit(est.value))
    }
}

/// `HV(reference_front) - HV(points)` under the same context.
pub fn hv_gap<T: Scalar, P: AsRef<[T]>, Q: AsRef<[T]>>(
    points: &[P],
    ctx: &MetricContext<T>,
    reference_front: Option<&[Q]>,
) -> Result<T> {
    let front = reference_front.ok_or_else(|| Error::MissingReference("hv_gap".into()))?;
    Ok(hypervolume(front, ctx)? - hypervolume(points, ctx)?)
}

/// IGD+: mean over reference points `z` of `min_a || max(a - z, 0) ||_2`.
pub fn igd_plus<T: Scalar, P: AsRef<[T]>, Q: AsRef<[T]>>(points: &[P], reference_front: &[Q]) -> Result<T> {
    if points.is_empty() {
        return Err(Error::Empty("IGD+ needs at least one solution"));
    }
    if reference_front.is_empty() {
        return Err(Error::Empty("IGD+ needs a nonempty reference front"));
    }
    let m = reference_front[0].as_ref().len();
    for p in points.iter().map(AsRef::as_ref).chain(reference_front.iter().map(AsRef::as_ref)) {
        Error::check_len(m, p.len())?;
    }
    let total: T = reference_front
        .iter()
        .map(|z| {
            let z = z.as_ref();
            points
                .iter()
                .map(|a| {
                    a.as_ref()
                        .iter()
                        .zip(z)
                        .map(|(&aj, &zj)| (aj - zj).max(T::zero()).powi(2))
                        .sum::<T>()
                        .sqrt()
                })
                .fold(T::infinity(), T::min)
        })
        .sum();
    Ok(total / T::from_usize_lossy(reference_front.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let ctx = MetricContext::new(vec![1.0, -2.0], vec![3.0, 2.0]).unwrap();
        assert_eq!(normalize(&[1.0, -2.0], &ctx).unwrap(), vec![0.0, 0.0]);
        assert_eq!(normalize(&[3.0, 2.0], &ctx).unwrap(), vec![1.0, 1.0]);
        assert_eq!(normalize(&[2.0, 0.0], &ctx).unwrap(), vec![0.5, 0.5]);
        assert_eq!(normalize(&[5.0, 0.0], &ctx).unwrap(), vec![2.0, 0.5]);
        assert!(MetricContext::new(vec![1.0], vec![1.0]).is_err());
    }

    #[test]
    fn igd_plus_examples() {
        let reference = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(igd_plus(&[vec![0.5, 0.5]], &reference).unwrap(), 0.5);
        assert_eq!(igd_plus(&reference, &reference).unwrap(), 0.0);
        let with_dominated = vec![vec![0.5, 0.5], vec![0.9, 0.9]];
        assert!(igd_plus(&with_dominated, &reference).unwrap() <= 0.5);
        let none: Vec<Vec<f64>> = vec![];
        assert!(igd_plus(&none, &reference).is_err());
        assert!(igd_plus(&reference, &none).is_err());
    }

    #[test]
    fn hv_gap_examples() {
        let ctx = MetricContext::<f64>::unit(2);
        let front: Vec<Vec<f64>> = (0..=10)
            .map(|i| {
                let a = i as f64 / 10.0;
                vec![a, 1.0 - a]
            })
            .collect();
        assert_eq!(hv_gap(&front, &ctx, Some(&front)).unwrap(), 0.0);
        let subset = &front[2..7];
        assert!(hv_gap(subset, &ctx, Some(&front)).unwrap() >= 0.0);
        let dominated = vec![vec![0.6, 0.6], vec![0.8, 0.3]];
        // oracle: staircase area by hand
        let their_hv = (1.1 - 0.6) * (1.1 - 0.6) + (1.1 - 0.8) * (0.6 - 0.3);
        let gap = hv_gap(&dominated, &ctx, Some(&front)).unwrap();
        let full = hypervolume(&front, &ctx).unwrap();
        assert!((gap - (full - their_hv)).abs() < 1e-12);
        assert!(matches!(
            hv_gap::<f64, _, Vec<f64>>(&dominated, &ctx, None),
            Err(Error::MissingReference(_))
        ));
    }
}
