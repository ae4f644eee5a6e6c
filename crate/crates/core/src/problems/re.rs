//! Engineering design problems from the RE benchmark suite (RE21, RE23, RE24,
//! RE25, RE33, RE37). Constrained instances report the summed constraint
//! violation as their last objective, as the suite does.

use crate::domain::BoxBounds;
use crate::scalar::Scalar;

use super::{GroundTruth, Problem, ProblemSpec};

#[inline]
fn c<T: Scalar>(v: f64) -> T {
    T::lit(v)
}

/// Sum of `max(-g, 0)` over constraint values `g >= 0`.
fn violation<T: Scalar>(g: &[T]) -> T {
    g.iter().map(|&v| if v < T::zero() { -v } else { T::zero() }).sum()
}

/// numpy-style rounding: halves go to the even neighbour.
fn round_even<T: Scalar>(v: T) -> T {
    T::lit(v.as_f64().round_ties_even())
}

fn spec<T: Scalar>(name: &str, m: usize, lower: &[f64], upper: &[f64]) -> ProblemSpec<T> {
    let bounds = BoxBounds::new(
        lower.iter().map(|&v| c(v)).collect(),
        upper.iter().map(|&v| c(v)).collect(),
    )
    .expect("static RE bounds are valid");
    ProblemSpec::new(name, m, bounds).expect("static RE dimensions are valid")
}

/// Four bar truss design.
#[derive(Debug, Clone)]
pub struct Re21<T> {
    spec: ProblemSpec<T>,
}

const RE21_F: f64 = 10.0;
const RE21_SIGMA: f64 = 10.0;
const RE21_E: f64 = 2.0e5;
const RE21_L: f64 = 200.0;

fn re21_bounds() -> ([f64; 4], [f64; 4]) {
    let a = RE21_F / RE21_SIGMA;
    let s2 = std::f64::consts::SQRT_2;
    ([a, s2 * a, s2 * a, a], [3.0 * a; 4])
}

fn re21_eval(x: [f64; 4]) -> [f64; 2] {
    let s2 = std::f64::consts::SQRT_2;
    let f1 = RE21_L * (2.0 * x[0] + s2 * x[1] + x[2].sqrt() + x[3]);
    let f2 = (RE21_F * RE21_L / RE21_E) * (2.0 / x[0] + 2.0 * s2 / x[1] - 2.0 * s2 / x[2] + 2.0 / x[3]);
    [f1, f2]
}

/// Pareto-optimal RE21 design for the multiplier `s` of its KKT system:
/// `x3` sits at its lower bound and `(x1, x2, x4)` are the box projections of
/// `(s, sqrt2 s, sqrt2 s)`.
fn re21_kkt_point(s: f64) -> [f64; 4] {
    let (lo, hi) = re21_bounds();
    let s2 = std::f64::consts::SQRT_2;
    [
        s.clamp(lo[0], hi[0]),
        (s2 * s).clamp(lo[1], hi[1]),
        lo[2],
        (s2 * s).clamp(lo[3], hi[3]),
    ]
}

const RE21_S_RANGE: (f64, f64) = (std::f64::consts::FRAC_1_SQRT_2, 3.0);

/// Dense samples of the exact RE21 front, evenly spaced in both normalized
/// objectives and sorted by `f1`.
///
/// Minimizing `f2` at fixed `f1` is a separable convex program in
/// `(x1, x2, x4)` with one linear constraint, so its minimizers are the box
/// projections of the stationary point; sweeping the multiplier traces the
/// whole front with `f1` increasing and `f2` decreasing.
pub fn re21_exact_front(per_axis: usize) -> Vec<[f64; 2]> {
    let (s_lo, s_hi) = RE21_S_RANGE;
    let start = re21_eval(re21_kkt_point(s_lo));
    let end = re21_eval(re21_kkt_point(s_hi));
    let solve = |axis: usize, target: f64| {
        let (mut a, mut b) = (s_lo, s_hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let v = re21_eval(re21_kkt_point(mid))[axis];
            // f1 grows with s, f2 shrinks
            if (axis == 0) == (v < target) {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };
    let mut params = Vec::with_capacity(2 * per_axis);
    for i in 0..per_axis {
        let t = i as f64 / (per_axis - 1) as f64;
        params.push(solve(0, start[0] + t * (end[0] - start[0])));
        params.push(solve(1, start[1] + t * (end[1] - start[1])));
    }
    params.sort_by(|a, b| a.total_cmp(b));
    params.dedup();
    params.into_iter().map(|s| re21_eval(re21_kkt_point(s))).collect()
}

impl<T: Scalar> Re21<T> {
    pub fn new() -> Self {
        let (lo, hi) = re21_bounds();
        let ideal = [
            re21_eval(re21_kkt_point(RE21_S_RANGE.0))[0],
            re21_eval(re21_kkt_point(RE21_S_RANGE.1))[1],
        ];
        let nadir = [
            re21_eval(re21_kkt_point(RE21_S_RANGE.1))[0],
            re21_eval(re21_kkt_point(RE21_S_RANGE.0))[1],
        ];
        let spec = spec("re21", 2, &lo, &hi)
            .with_hints(ideal.map(c).to_vec(), nadir.map(c).to_vec())
            .expect("RE21 ideal lies below nadir");
        Self { spec }
    }
}

impl<T: Scalar> Default for Re21<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Problem<T> for Re21<T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn objectives(&self, x: &[T]) -> Vec<T> {
        let s2 = T::SQRT_2();
        let (f, e, l) = (c::<T>(RE21_F), c::<T>(RE21_E), c::<T>(RE21_L));
        let two = c::<T>(2.0);
        let f1 = l * (two * x[0] + s2 * x[1] + x[2].sqrt() + x[3]);
        let f2 = (f * l / e) * (two / x[0] + two * s2 / x[1] - two * s2 / x[2] + two / x[3]);
        vec![f1, f2]
    }

    fn builtin_ground_truth(&self) -> GroundTruth<T> {
        GroundTruth {
            ps_relation: None,
            pf_samples: Some(
                re21_exact_front(1000)
                    .into_iter()
                    .map(|f| f.map(c).to_vec())
                    .collect(),
            ),
        }
    }
}

/// Pressure vessel design. `x1`, `x2` are rounded to integer multiples of 1/16 inch.
#[derive(Debug, Clone)]
pub struct Re23<T> {
    spec: ProblemSpec<T>,
}

impl<T: Scalar> Re23<T> {
    pub fn new() -> Self {
        Self {
            spec: spec("re23", 2, &[1.0, 1.0, 10.0, 10.0], &[100.0, 100.0, 200.0, 240.0]),
        }
    }
}

impl<T: Scalar> Default for Re23<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Problem<T> for Re23<T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn objectives(&self, x: &[T]) -> Vec<T> {
        let x1 = c::<T>(0.0625) * round_even(x[0]);
        let x2 = c::<T>(0.0625) * round_even(x[1]);
        let (x3, x4) = (x[2], x[3]);
        let f1 = c::<T>(0.6224) * x1 * x3 * x4
            + c::<T>(1.7781) * x2 * x3 * x3
            + c::<T>(3.1661) * x1 * x1 * x4
            + c::<T>(19.84) * x1 * x1 * x3;
        let g = [
            x1 - c::<T>(0.0193) * x3,
            x2 - c::<T>(0.00954) * x3,
            T::PI() * x3 * x3 * x4 + c::<T>(4.0 / 3.0) * T::PI() * x3 * x3 * x3 - c::<T>(1_296_000.0),
        ];
        vec![f1, violation(&g)]
    }
}

/// Hatch cover design.
#[derive(Debug, Clone)]
pub struct Re24<T> {
    spec: ProblemSpec<T>,
}

impl<T: Scalar> Re24<T> {
    pub fn new() -> Self {
        Self {
            spec: spec("re24", 2, &[0.5, 4.0], &[4.0, 50.0]),
        }
    }
}

impl<T: Scalar> Default for Re24<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Problem<T> for Re24<T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn objectives(&self, x: &[T]) -> Vec<T> {
        let (x1, x2) = (x[0], x[1]);
        let f1 = x1 + c::<T>(120.0) * x2;
        let e = c::<T>(700_000.0);
        let sigma_b_max = c::<T>(700.0);
        let tau_max = c::<T>(450.0);
        let delta_max = c::<T>(1.5);
        let sigma_k = e * x1 * x1 / c(100.0);
        let sigma_b = c::<T>(4500.0) / (x1 * x2);
        let tau = c::<T>(1800.0) / x2;
        let delta = c::<T>(56.2 * 10000.0) / (e * x1 * x2 * x2);
        let one = T::one();
        let g = [
            one - sigma_b / sigma_b_max,
            one - tau / tau_max,
            one - delta / delta_max,
            one - sigma_b / sigma_k,
        ];
        vec![f1, violation(&g)]
    }
}

/// Coil compression spring design. `x1` is rounded to an integer and `x3`
/// snapped to the nearest standard wire diameter.
#[derive(Debug, Clone)]
pub struct Re25<T> {
    spec: ProblemSpec<T>,
}

const RE25_WIRE_DIAMETERS: [f64; 42] = [
    0.009, 0.0095, 0.0104, 0.0118, 0.0128, 0.0132, 0.014, 0.015, 0.0162, 0.0173, 0.018, 0.02, 0.023,
    0.025, 0.028, 0.032, 0.035, 0.041, 0.047, 0.054, 0.063, 0.072, 0.08, 0.092, 0.105, 0.12, 0.135,
    0.148, 0.162, 0.177, 0.192, 0.207, 0.225, 0.244, 0.263, 0.283, 0.307, 0.331, 0.362, 0.394,
    0.4375, 0.5,
];

impl<T: Scalar> Re25<T> {
    pub fn new() -> Self {
        Self {
            spec: spec("re25", 2, &[1.0, 0.6, 0.09], &[70.0, 3.0, 0.5]),
        }
    }
}

impl<T: Scalar> Default for Re25<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Problem<T> for Re25<T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn objectives(&self, x: &[T]) -> Vec<T> {
        let x1 = round_even(x[0]);
        let x2 = x[1];
        let target = x[2].as_f64();
        // first index of the closest diameter
        let mut best = 0;
        for (i, d) in RE25_WIRE_DIAMETERS.iter().enumerate() {
            if (d - target).abs() < (RE25_WIRE_DIAMETERS[best] - target).abs() {
                best = i;
            }
        }
        let x3 = c::<T>(RE25_WIRE_DIAMETERS[best]);
        let pi = T::PI();
        let two = c::<T>(2.0);
        let f1 = pi * pi * x2 * x3 * x3 * (x1 + two) / c(4.0);

        let ratio = x2 / x3;
        let cf = (c::<T>(4.0) * ratio - T::one()) / (c::<T>(4.0) * ratio - c(4.0)) + c::<T>(0.615) * x3 / x2;
        let fmax = c::<T>(1000.0);
        let s = c::<T>(189_000.0);
        let g_mod = c::<T>(11.5e6);
        let k = g_mod * x3 * x3 * x3 * x3 / (c::<T>(8.0) * x1 * x2 * x2 * x2);
        let lmax = c::<T>(14.0);
        let lf = fmax / k + c::<T>(1.05) * (x1 + two) * x3;
        let fp = c::<T>(300.0);
        let sigma_p = fp / k;
        let sigma_pm = c::<T>(6.0);
        let sigma_w = c::<T>(1.25);
        let g = [
            -(c::<T>(8.0) * cf * fmax * x2 / (pi * x3 * x3 * x3)) + s,
            -lf + lmax,
            -c::<T>(3.0) + ratio,
            -sigma_p + sigma_pm,
            -sigma_p - (fmax - fp) / k - c::<T>(1.05) * (x1 + two) * x3 + lf,
            sigma_w - (fmax - fp) / k,
        ];
        vec![f1, violation(&g)]
    }
}

/// Disc brake design.
#[derive(Debug, Clone)]
pub struct Re33<T> {
    spec: ProblemSpec<T>,
}

impl<T: Scalar> Re33<T> {
    pub fn new() -> Self {
        Self {
            spec: spec("re33", 3, &[55.0, 75.0, 1000.0, 11.0], &[80.0, 110.0, 3000.0, 20.0]),
        }
    }
}

impl<T: Scalar> Default for Re33<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Problem<T> for Re33<T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn objectives(&self, x: &[T]) -> Vec<T> {
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        let sq = x2 * x2 - x1 * x1;
        let cu = x2 * x2 * x2 - x1 * x1 * x1;
        let f1 = c::<T>(4.9e-5) * sq * (x4 - T::one());
        let f2 = c::<T>(9.82e6) * sq / (x3 * x4 * cu);
        let g = [
            (x2 - x1) - c(20.0),
            c::<T>(0.4) - x3 / (c::<T>(3.14) * sq),
            T::one() - c::<T>(2.22e-3) * x3 * cu / (sq * sq),
            c::<T>(2.66e-2) * x3 * x4 * cu / sq - c(900.0),
        ];
        vec![f1, f2, violation(&g)]
    }
}

/// Rocket injector design (response-surface objectives on the unit box).
#[derive(Debug, Clone)]
pub struct Re37<T> {
    spec: ProblemSpec<T>,
}

impl<T: Scalar> Re37<T> {
    pub fn new() -> Self {
        Self {
            spec: spec("re37", 3, &[0.0; 4], &[1.0; 4]),
        }
    }
}

impl<T: Scalar> Default for Re37<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Problem<T> for Re37<T> {
    fn spec(&self) -> &ProblemSpec<T> {
        &self.spec
    }

    fn objectives(&self, x: &[T]) -> Vec<T> {
        let (a, ha, oa, optt) = (x[0], x[1], x[2], x[3]);
        let k = c::<T>;
        let f1 = k(0.692) + k(0.477) * a - k(0.687) * ha - k(0.080) * oa - k(0.0650) * optt
            - k(0.167) * a * a
            - k(0.0129) * ha * a
            + k(0.0796) * ha * ha
            - k(0.0634) * oa * a
            - k(0.0257) * oa * ha
            + k(0.0877) * oa * oa
            - k(0.0521) * optt * a
            + k(0.00156) * optt * ha
            + k(0.00198) * optt * oa
            + k(0.0184) * optt * optt;
        let f2 = k(0.153) - k(0.322) * a + k(0.396) * ha + k(0.424) * oa + k(0.0226) * optt
            + k(0.175) * a * a
            + k(0.0185) * ha * a
            - k(0.0701) * ha * ha
            - k(0.251) * oa * a
            + k(0.179) * oa * ha
            + k(0.0150) * oa * oa
            + k(0.0134) * optt * a
            + k(0.0296) * optt * ha
            + k(0.0752) * optt * oa
            + k(0.0192) * optt * optt;
        let f3 = k(0.370) - k(0.205) * a + k(0.0307) * ha + k(0.108) * oa + k(1.019) * optt
            - k(0.135) * a * a
            + k(0.0141) * ha * a
            + k(0.0998) * ha * ha
            + k(0.208) * oa * a
            - k(0.0301) * oa * ha
            - k(0.226) * oa * oa
            + k(0.353) * optt * a
            - k(0.0497) * optt * oa
            - k(0.423) * optt * optt
            + k(0.202) * ha * a * a
            - k(0.281) * oa * a * a
            - k(0.342) * ha * ha * a
            - k(0.245) * ha * ha * oa
            + k(0.281) * oa * oa * ha
            - k(0.184) * optt * optt * a
            - k(0.281) * ha * a * oa;
        vec![f1, f2, f3]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::RngStream;
    use crate::metrics::dominates;

    #[test]
    fn re21_hints_match_box_corners() {
        let p = Re21::<f64>::new();
        let (ideal, nadir) = p.spec().hints().unwrap();
        let (lo, hi) = re21_bounds();
        let at_lo = p.evaluate(&[lo[0], lo[1], lo[2], lo[3]]).unwrap();
        let best_f2 = p.evaluate(&[hi[0], hi[1], lo[2], hi[3]]).unwrap();
        assert!((ideal[0] - at_lo[0]).abs() < 1e-9);
        assert!((nadir[1] - at_lo[1]).abs() < 1e-12);
        assert!((ideal[1] - best_f2[1]).abs() < 1e-12);
        assert!((nadir[0] - best_f2[0]).abs() < 1e-9);
        assert!((ideal[0] - 1237.8414230005742).abs() < 1e-6);
        assert!((nadir[1] - 0.04).abs() < 1e-12);
    }

    #[test]
    fn re21_front_is_mutually_nondominated_brute_force() {
        let front = re21_exact_front(300);
        for (i, a) in front.iter().enumerate() {
            for (j, b) in front.iter().enumerate() {
                if i != j {
                    assert!(!dominates(&a[..], &b[..]).unwrap(), "{a:?} dominates {b:?}");
                }
            }
        }
    }

    #[test]
    fn re21_front_is_not_dominated_by_random_designs() {
        let p = Re21::<f64>::new();
        let front = re21_exact_front(200);
        let mut rng = RngStream::new(12);
        for _ in 0..2000 {
            let x = p.spec().bounds.sample_uniform(&mut rng);
            let f = p.evaluate(&x).unwrap();
            assert!(front.iter().all(|z| !dominates(&f[..], &z[..]).unwrap()));
        }
    }

    #[test]
    fn rounding_follows_ties_to_even() {
        assert_eq!(round_even(2.5_f64), 2.0);
        assert_eq!(round_even(3.5_f64), 4.0);
        let p = Re23::<f64>::new();
        let a = p.evaluate(&[2.5, 3.0, 50.0, 100.0]).unwrap();
        let b = p.evaluate(&[2.0, 3.0, 50.0, 100.0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn re24_feasible_design_has_zero_violation() {
        let p = Re24::<f64>::new();
        let f = p.evaluate(&[4.0, 50.0]).unwrap();
        assert_eq!(f[1], 0.0);
        assert_eq!(f[0], 4.0 + 120.0 * 50.0);
    }

    #[test]
    fn re37_matches_constant_terms_at_origin() {
        let p = Re37::<f64>::new();
        assert_eq!(p.evaluate(&[0.0; 4]).unwrap().0, vec![0.692, 0.153, 0.370]);
    }
}
