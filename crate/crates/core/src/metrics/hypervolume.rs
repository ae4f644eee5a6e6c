//! Hypervolume: exact sweeps for two and three objectives, Monte-Carlo beyond.

use serde::{Deserialize, Serialize};

use crate::domain::RngStream;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::dominance::nondominated_filter;

/// Default sample count of the Monte-Carlo estimator.
pub const MC_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HvEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Points strictly inside the reference box and mutually nondominated.
fn relevant<T: Scalar>(points: &[Vec<T>], reference: &[T]) -> Vec<Vec<T>> {
    let inside: Vec<&Vec<T>> = points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(v, r)| v < r))
        .collect();
    nondominated_filter(&inside)
        .into_iter()
        .map(|i| inside[i].clone())
        .collect()
}

/// 2D sweep over points sorted by the first objective.
fn sweep_2d<T: Scalar>(mut pts: Vec<[T; 2]>, reference: [T; 2]) -> T {
    pts.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
    let mut area = T::zero();
    let mut ceiling = reference[1];
    for p in pts {
        if p[1] < ceiling {
            area = area + (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

/// 3D: slabs between consecutive third-objective levels, each the 2D
/// hypervolume of the points already below the slab.
fn sweep_3d<T: Scalar>(mut pts: Vec<Vec<T>>, reference: &[T]) -> T {
    pts.sort_by(|a, b| a[2].partial_cmp(&b[2]).unwrap());
    let mut volume = T::zero();
    let mut active: Vec<[T; 2]> = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        active.push([p[0], p[1]]);
        let top = pts.get(i + 1).map_or(reference[2], |q| q[2]);
        let depth = top - p[2];
        if depth > T::zero() {
            volume = volume + sweep_2d(active.clone(), [reference[0], reference[1]]) * depth;
        }
    }
    volume
}

/// Exact hypervolume of already-normalized points for `m` in {2, 3}.
pub fn hypervolume_exact<T: Scalar>(points: &[Vec<T>], reference: &[T]) -> Result<T> {
    let m = reference.len();
    if let Some(p) = points.iter().find(|p| p.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: p.len(),
        });
    }
    let pts = relevant(points, reference);
    if pts.is_empty() {
        return Ok(T::zero());
    }
    match m {
        2 => Ok(sweep_2d(pts.iter().map(|p| [p[0], p[1]]).collect(), [reference[0], reference[1]])),
        3 => Ok(sweep_3d(pts, reference)),
        _ => Err(Error::InvalidDimension(format!(
            "exact hypervolume supports 2 or 3 objectives, got {m}"
        ))),
    }
}

/// Monte-Carlo hypervolume: uniform samples in the box spanned by the
/// componentwise minimum of the points and the reference.
pub fn hypervolume_mc<T: Scalar>(points: &[Vec<T>], reference: &[T], samples: usize, rng: &mut RngStream) -> Result<HvEstimate> {
    let m = reference.len();
    if let Some(p) = points.iter().find(|p| p.len() != m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: p.len(),
        });
    }
    if samples == 0 {
        return Err(Error::InvalidConfig("Monte-Carlo hypervolume needs samples > 0".into()));
    }
    let pts: Vec<Vec<f64>> = relevant(points, reference)
        .into_iter()
        .map(|p| p.iter().map(|v| v.as_f64()).collect())
        .collect();
    if pts.is_empty() {
        return Ok(HvEstimate {
            value: 0.0,
            std_error: 0.0,
        });
    }
    let r: Vec<f64> = reference.iter().map(|v| v.as_f64()).collect();
    let lo: Vec<f64> = (0..m)
        .map(|j| pts.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min))
        .collect();
    let box_volume: f64 = (0..m).map(|j| r[j] - lo[j]).product();
    let mut hits = 0usize;
    let mut s = vec![0.0; m];
    for _ in 0..samples {
        for j in 0..m {
            s[j] = lo[j] + (r[j] - lo[j]) * rng.uniform();
        }
        if pts.iter().any(|p| p.iter().zip(&s).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    Ok(HvEstimate {
        value: box_volume * frac,
        std_error: box_volume * (frac * (1.0 - frac) / samples as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_values() {
        let r = [1.1_f64, 1.1];
        assert!((hypervolume_exact(&[vec![0.0, 0.0]], &r).unwrap() - 1.21).abs() < 1e-12);
        let hv = hypervolume_exact(&[vec![0.25, 0.75], vec![0.75, 0.25]], &r).unwrap();
        assert!((hv - 0.4725).abs() < 1e-12, "{hv}");
        assert_eq!(hypervolume_exact(&[vec![1.2, 0.5]], &r).unwrap(), 0.0);
        let empty: Vec<Vec<f64>> = vec![];
        assert_eq!(hypervolume_exact(&empty, &r).unwrap(), 0.0);
    }

    #[test]
    fn point_on_reference_boundary_contributes_nothing() {
        assert_eq!(hypervolume_exact(&[vec![1.1, 0.0]], &[1.1, 1.1]).unwrap(), 0.0);
    }

    #[test]
    fn three_dimensional_boxes() {
        let r = [1.0_f64, 1.0, 1.0];
        let hv = hypervolume_exact(&[vec![0.0, 0.0, 0.0]], &r).unwrap();
        assert!((hv - 1.0).abs() < 1e-12);
        // two unit-corner boxes overlapping in [0.5,1]^3
        let hv = hypervolume_exact(&[vec![0.5, 0.0, 0.0], vec![0.0, 0.5, 0.5]], &r).unwrap();
        let expect = 0.5 + 0.25 - 0.125;
        assert!((hv - expect).abs() < 1e-12, "{hv}");
    }

    #[test]
    fn three_dimensional_matches_inclusion_exclusion() {
        // inclusion-exclusion over all subsets as an independent oracle
        let mut rng = RngStream::new(77);
        for _ in 0..30 {
            let k = 1 + rng.below(6);
            let pts: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..3).map(|_| rng.uniform()).collect())
                .collect();
            let r = [1.1; 3];
            let mut oracle = 0.0;
            for mask in 1u32..(1 << k) {
                let corner: Vec<f64> = (0..3)
                    .map(|j| {
                        (0..k)
                            .filter(|i| mask & (1 << i) != 0)
                            .map(|i| pts[i][j])
                            .fold(f64::NEG_INFINITY, f64::max)
                    })
                    .collect();
                let vol: f64 = (0..3).map(|j| r[j] - corner[j]).product();
                oracle += if mask.count_ones() % 2 == 1 { vol } else { -vol };
            }
            let hv = hypervolume_exact(&pts, &r).unwrap();
            assert!((hv - oracle).abs() < 1e-12, "{hv} vs {oracle}");
        }
    }

    #[test]
    fn monte_carlo_four_objectives() {
        let pts = vec![vec![0.0; 4]];
        let est = hypervolume_mc(&pts, &[1.0; 4], 10_000, &mut RngStream::new(1)).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.std_error, 0.0);
        assert!(hypervolume_exact(&pts, &[1.0; 4]).is_err());
    }
}
