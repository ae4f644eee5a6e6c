//! Scalarizing functions mapping an objective vector and a preference to a
//! single subproblem value.

use serde::{Deserialize, Serialize};

use crate::domain::{PreferenceVector, RngStream, MIN_TCH_WEIGHT};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default utopia offset below the ideal point.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Relative tolerance under which two aggregation terms count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Running ideal-point estimate plus the offset that turns it into a utopia point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtopiaState<T> {
    pub z_star: Vec<T>,
    pub epsilon: T,
}

impl<T: Scalar> UtopiaState<T> {
    /// An estimate that has not seen any point yet (`z* = +inf`).
    pub fn unset(m: usize, epsilon: T) -> Result<Self> {
        Self::new(vec![T::infinity(); m], epsilon)
    }

    pub fn new(z_star: Vec<T>, epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { z_star, epsilon })
    }

    pub fn is_set(&self) -> bool {
        self.z_star.iter().all(|z| z.is_finite())
    }

    /// Folds one observation into the running minimum.
    pub fn absorb(&mut self, f: &[T]) -> Result<()> {
        Error::check_len(self.z_star.len(), f.len())?;
        for (z, &v) in self.z_star.iter_mut().zip(f) {
            if v < *z {
                *z = v;
            }
        }
        Ok(())
    }

    /// Componentwise minimum of two estimates; used to merge parallel workers.
    pub fn merge(&mut self, other: &UtopiaState<T>) -> Result<()> {
        self.absorb(&other.z_star)
    }
}

/// `z* <- min(z*, F)` componentwise.
pub fn update_ideal<T: Scalar>(u: &UtopiaState<T>, f: &[T]) -> Result<UtopiaState<T>> {
    let mut next = u.clone();
    next.absorb(f)?;
    Ok(next)
}

/// Weighted sum `sum_j lambda_j f_j`.
pub fn weighted_sum<T: Scalar>(f: &[T], pref: &[T]) -> Result<T> {
    Error::check_len(pref.len(), f.len())?;
    Ok(f.iter().zip(pref).map(|(&fj, &wj)| fj * wj).sum())
}

pub(crate) fn effective_weights<T: Scalar>(pref: &PreferenceVector<T>) -> std::borrow::Cow<'_, [T]> {
    let floor = T::lit(MIN_TCH_WEIGHT);
    if pref.iter().any(|&w| w < floor) {
        std::borrow::Cow::Owned(pref.clipped(floor).into_inner())
    } else {
        std::borrow::Cow::Borrowed(pref.weights())
    }
}

fn terms<T: Scalar>(f: &[T], pref: &PreferenceVector<T>, u: &UtopiaState<T>) -> Result<Vec<T>> {
    Error::check_len(pref.dim(), f.len())?;
    Error::check_len(u.z_star.len(), f.len())?;
    let w = effective_weights(pref);
    Ok(f.iter()
        .zip(w.iter())
        .zip(&u.z_star)
        .map(|((&fj, &wj), &zj)| wj * (fj - (zj - u.epsilon)))
        .collect())
}

/// Weighted Tchebycheff value `max_j lambda_j (f_j - (z*_j - eps))`.
///
/// Preference components below [`MIN_TCH_WEIGHT`] are raised to it first.
pub fn tchebycheff_value<T: Scalar>(f: &[T], pref: &PreferenceVector<T>, u: &UtopiaState<T>) -> Result<T> {
    Ok(terms(f, pref, u)?
        .into_iter()
        .fold(T::neg_infinity(), |a, b| if b > a { b } else { a }))
}

/// Tchebycheff value together with the (0-based) maximizing objective. Terms
/// within [`TIE_TOLERANCE`] of the maximum are tied and one is picked
/// uniformly with `rng`.
pub fn tchebycheff<T: Scalar>(
    f: &[T],
    pref: &PreferenceVector<T>,
    u: &UtopiaState<T>,
    rng: &mut RngStream,
) -> Result<(T, usize)> {
    let t = terms(f, pref, u)?;
    let best = t.iter().copied().fold(T::neg_infinity(), |a, b| if b > a { b } else { a });
    let tol = T::lit(TIE_TOLERANCE) * best.abs().max(T::min_positive_value());
    let tied: Vec<usize> = (0..t.len()).filter(|&j| best - t[j] <= tol).collect();
    let pick = if tied.len() == 1 { tied[0] } else { tied[rng.below(tied.len())] };
    Ok((best, pick))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pref(w: &[f64]) -> PreferenceVector<f64> {
        PreferenceVector::new(w.to_vec()).unwrap()
    }

    #[test]
    fn tchebycheff_examples() {
        let mut rng = RngStream::new(0);
        let u = UtopiaState::new(vec![0.0, 0.0], 0.1).unwrap();
        let (v, j) = tchebycheff(&[1.0, 3.0], &pref(&[0.5, 0.5]), &u, &mut rng).unwrap();
        assert!((v - 1.55).abs() < 1e-12);
        assert_eq!(j, 1);

        // weights clipped to (1 - 1e-6, 1e-6): max(0.3 (1 - 1e-6), 10 * 1e-6)
        let (v, j) = tchebycheff(&[0.2, 9.9], &pref(&[1.0, 0.0]), &u, &mut rng).unwrap();
        let w0 = 1.0 / (1.0 + 1e-6);
        assert!((v - 0.3 * w0).abs() < 1e-15, "{v}");
        assert!((v - 0.3).abs() < 1e-6);
        assert_eq!(j, 0);
    }

    #[test]
    fn symmetric_tie_is_broken_uniformly() {
        // epsilon = 0 is rejected by the state; a negligible epsilon keeps the tie exact
        let u = UtopiaState::new(vec![0.0, 0.0], 1e-300).unwrap();
        let mut rng = RngStream::new(1);
        let mut counts = [0usize; 2];
        for _ in 0..2000 {
            let (v, j) = tchebycheff(&[2.0, 2.0], &pref(&[0.5, 0.5]), &u, &mut rng).unwrap();
            assert_eq!(v, 1.0);
            counts[j] += 1;
        }
        assert!(counts[0] > 850 && counts[1] > 850, "{counts:?}");
    }

    #[test]
    fn weighted_sum_examples() {
        assert!((weighted_sum(&[1.0_f64, 2.0], &[0.3, 0.7]).unwrap() - 1.7).abs() < 1e-15);
        assert_eq!(weighted_sum(&[5.0, 100.0], &[1.0, 0.0]).unwrap(), 5.0);
        let third = 1.0_f64 / 3.0;
        assert!((weighted_sum(&[3.0, 6.0, 9.0], &[third; 3]).unwrap() - 6.0).abs() < 1e-12);
        assert!(weighted_sum(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn ideal_update_examples() {
        let u = UtopiaState::new(vec![1.0, 1.0], 0.1).unwrap();
        assert_eq!(update_ideal(&u, &[0.5, 2.0]).unwrap().z_star, vec![0.5, 1.0]);
        let u = UtopiaState::new(vec![0.0, 0.0], 0.1).unwrap();
        assert_eq!(update_ideal(&u, &[1.0, 1.0]).unwrap(), u);
        assert!(UtopiaState::new(vec![0.0], 0.0).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let u = UtopiaState::new(vec![0.0, 0.0], 0.1).unwrap();
        assert!(tchebycheff_value(&[1.0, 2.0, 3.0], &pref(&[0.5, 0.5]), &u).is_err());
    }

    fn simplex(m: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0..1.0_f64, m).prop_filter_map("zero sum", move |v| {
            let s: f64 = v.iter().sum();
            (s > 1e-3).then(|| {
                let mut w: Vec<f64> = v.iter().map(|x| x / s).collect();
                let head: f64 = w[..m - 1].iter().sum();
                w[m - 1] = (1.0 - head).max(0.0);
                w
            })
        })
    }

    proptest! {
        #[test]
        fn ideal_fold_is_order_independent(batch in prop::collection::vec(prop::collection::vec(-5.0..5.0_f64, 3), 1..20), seed in 0u64..1000) {
            let start = UtopiaState::unset(3, 0.1).unwrap();
            let forward = batch.iter().fold(start.clone(), |u, f| update_ideal(&u, f).unwrap());
            let mut shuffled = batch.clone();
            let mut rng = RngStream::new(seed);
            for i in (1..shuffled.len()).rev() {
                shuffled.swap(i, rng.below(i + 1));
            }
            let backward = shuffled.iter().fold(start, |u, f| update_ideal(&u, f).unwrap());
            prop_assert_eq!(forward, backward);
        }

        #[test]
        fn tchebycheff_is_monotone(w in simplex(3), f in prop::collection::vec(0.0..10.0_f64, 3), d in prop::collection::vec(0.0..2.0_f64, 3)) {
            let p = PreferenceVector::new(w).unwrap();
            let u = UtopiaState::new(vec![0.0; 3], 0.1).unwrap();
            let worse: Vec<f64> = f.iter().zip(&d).map(|(a, b)| a + b).collect();
            prop_assert!(tchebycheff_value(&f, &p, &u).unwrap() <= tchebycheff_value(&worse, &p, &u).unwrap());
        }

        #[test]
        fn tchebycheff_positive_above_running_min(w in simplex(2), pts in prop::collection::vec(prop::collection::vec(-3.0..3.0_f64, 2), 1..10)) {
            let p = PreferenceVector::new(w).unwrap();
            let u = pts.iter().fold(UtopiaState::unset(2, 0.1).unwrap(), |u, f| update_ideal(&u, f).unwrap());
            for f in &pts {
                prop_assert!(tchebycheff_value(f, &p, &u).unwrap() > 0.0);
            }
        }

        #[test]
        fn tchebycheff_scales_with_offset(w in simplex(2), f in prop::collection::vec(0.0..4.0_f64, 2), c in 0.1..10.0_f64) {
            // scaling F - utopia by c scales the value by c
            let p = PreferenceVector::new(w).unwrap();
            let u = UtopiaState::new(vec![0.0; 2], 0.1).unwrap();
            let scaled: Vec<f64> = f.iter().map(|v| c * (v + 0.1) - 0.1).collect();
            let a = tchebycheff_value(&f, &p, &u).unwrap();
            let b = tchebycheff_value(&scaled, &p, &u).unwrap();
            prop_assert!((b - c * a).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }
}
