use crate::domain::BoxBounds;
use crate::error::Result;
use crate::scalar::Scalar;

use super::{GroundTruth, Problem, ProblemSpec, PsRelation};

pub(crate) const DEFAULT_DIM: usize = 3;
const PF_SAMPLES: usize = 2001;

/// Bi-objective problem whose Pareto set is the curve
/// `x_i = sin(10 (x_1 - 0.5))`, `i >= 2`, with `x_1` in `[0, 1]`.
///
/// ```text
/// f1 = x1
/// f2 = (1 + g) (1 - sqrt(x1 / (1 + g)))
/// g  = mean_{i>=2} (x_i - sin(10 (x1 - 0.5)))^2
/// ```
/// The front is `f2 = 1 - sqrt(f1)`.
#[derive(Debug, Clone)]
pub struct SineCurve<T> {
    spec: ProblemSpec<T>,
}

impl<T: Scalar> SineCurve<T> {
    pub const RELATION: PsRelation = PsRelation::Sine {
        frequency: 10.0,
        shift: 0.5,
    };

    pub fn new(n: usize) -> Result<Self> {
        let mut lower = vec![-T::one(); n];
        let upper = vec![T::one(); n];
        if let Some(l) = lower.first_mut() {
            *l = T::zero();
        }
        let spec = ProblemSpec::new("syn", 2, BoxBounds::new(lower, upper)?)?
            .with_hints(vec![T::zero(); 2], vec![T::one(); 2])?;
        Ok(Self { spec })
    }

    /// Point of the analytic Pareto set with base coordinate `x1`.
    pub fn pareto_point(&self, x1: T) -> Vec<T> {
        let dep = Self::RELATION.dependent(x1);
        let mut x = vec![dep; self.spec.n];
        x[0] = x1;
        x
    }

    /// `f2` on the front as a function of `f1`.
    pub fn front(f1: T) -> T {
        T::one() - f1.sqrt()
    }
}

impl<T: Scalar> Problem<T> for SineCurve<T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn objectives(&self, x: &[T]) -> Vec<T> {
        let x1 = x[0];
        let target = Self::RELATION.dependent(x1);
        let g = x[1..].iter().map(|&xi| (xi - target).powi(2)).sum::<T>()
            / T::from_usize_lossy(x.len() - 1);
        let one_g = T::one() + g;
        vec![x1, one_g * (T::one() - (x1 / one_g).sqrt())]
    }

    fn jacobian(&self, x: &[T]) -> Option<Vec<Vec<T>>> {
        let n = x.len();
        let ten = T::lit(10.0);
        let half = T::lit(0.5);
        let two = T::lit(2.0);
        // keep the x1 -> 0 singularity of sqrt finite
        let x1 = x[0].max(T::lit(1e-12));
        let target = Self::RELATION.dependent(x1);
        let dtarget = ten * (ten * (x1 - half)).cos();
        let scale = T::from_usize_lossy(n - 1);
        let g = x[1..].iter().map(|&xi| (xi - target).powi(2)).sum::<T>() / scale;
        let one_g = T::one() + g;
        let df2_dg = T::one() - half * (x1 / one_g).sqrt();
        let mut row2 = vec![T::zero(); n];
        let mut dg_dx1 = T::zero();
        for i in 1..n {
            let r = two * (x[i] - target) / scale;
            row2[i] = df2_dg * r;
            dg_dx1 = dg_dx1 - r * dtarget;
        }
        row2[0] = -half * (one_g / x1).sqrt() + df2_dg * dg_dx1;
        let mut row1 = vec![T::zero(); n];
        row1[0] = T::one();
        Some(vec![row1, row2])
    }

    fn builtin_ground_truth(&self) -> GroundTruth<T> {
        let pf = (0..PF_SAMPLES)
            .map(|i| {
                let f1 = T::from_usize_lossy(i) / T::from_usize_lossy(PF_SAMPLES - 1);
                vec![f1, Self::front(f1)]
            })
            .collect();
        GroundTruth {
            ps_relation: Some(Self::RELATION),
            pf_samples: Some(pf),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn documented_evaluations() {
        let p = SineCurve::<f64>::new(3).unwrap();
        let s = (-2.5_f64).sin();
        let f = p.evaluate(&[0.25, s, s]).unwrap();
        assert!(close(f[0], 0.25) && close(f[1], 0.5), "{f:?}");

        let s = 5.0_f64.sin();
        let f = p.evaluate(&[1.0, s, s]).unwrap();
        assert!(close(f[0], 1.0) && close(f[1], 0.0), "{f:?}");

        let s = (-5.0_f64).sin();
        // sin(-5) + 0.1 lies above the box, so only the raw formula accepts it
        let x = [0.0, s + 0.1, s];
        let f = p.objectives(&x);
        assert!(close(f[0], 0.0) && close(f[1], 1.005), "{f:?}");
        assert!(matches!(p.evaluate(&x), Err(Error::OutOfBounds { index: 1, .. })));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let p = SineCurve::<f64>::new(4).unwrap();
        let x = [0.37, 0.2, -0.6, 0.9];
        let jac = p.jacobian(&x).unwrap();
        let h = 1e-6;
        for i in 0..4 {
            let mut up = x;
            let mut down = x;
            up[i] += h;
            down[i] -= h;
            let (fu, fd) = (p.objectives(&up), p.objectives(&down));
            for j in 0..2 {
                let fdiff = (fu[j] - fd[j]) / (2.0 * h);
                assert!((fdiff - jac[j][i]).abs() < 1e-7, "{j} {i}: {fdiff} vs {}", jac[j][i]);
            }
        }
    }

    #[test]
    fn out_of_box_is_a_domain_error() {
        let p = SineCurve::<f64>::new(3).unwrap();
        assert!(p.evaluate(&[-0.1, 0.0, 0.0]).is_err());
        assert!(p.evaluate(&[0.1, 0.0]).is_err());
    }

    #[test]
    fn pareto_set_has_zero_distance_term() {
        let p = SineCurve::<f64>::new(5).unwrap();
        for i in 0..=100 {
            let x1 = i as f64 / 100.0;
            let f = p.evaluate(&p.pareto_point(x1)).unwrap();
            assert_eq!(f[0], x1);
            assert!(close(f[1], SineCurve::<f64>::front(x1)));
        }
    }

    #[test]
    fn ground_truth_relation_and_front() {
        let p = SineCurve::<f64>::new(3).unwrap();
        let truth = p.builtin_ground_truth();
        assert_eq!(truth.ps_relation.unwrap().dependent(0.5_f64), 0.0);
        let pf = truth.pf_samples.unwrap();
        let quarter = pf.iter().find(|f| f[0] == 0.25).unwrap();
        assert!(close(quarter[1], 0.5));
    }
}
