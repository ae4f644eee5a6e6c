use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default vertex count of the polygonal chain.
pub const DEFAULT_VERTICES: usize = 4;

/// 0-based segment index and position inside it for a tracer `t in [1, K]`.
pub(crate) fn segment<T: Scalar>(vertices: usize, t: T) -> (usize, T) {
    let last = vertices - 2;
    let k = t.floor().to_f64().unwrap_or(1.0).max(1.0) as usize - 1;
    let k = k.min(last);
    (k, t - T::from_usize_lossy(k + 1))
}

/// Point at tracer `t` (1-based, `t in [1, K]`) on the chain through `vertices`.
pub fn chain_point<T: Scalar>(vertices: &[Vec<T>], t: T) -> Result<Vec<T>> {
    let k = vertices.len();
    if k < 2 {
        return Err(Error::InvalidConfig(format!("chain needs K >= 2 vertices, got {k}")));
    }
    let n = vertices[0].len();
    for v in vertices {
        Error::check_len(n, v.len())?;
    }
    if !(t >= T::one() && t <= T::from_usize_lossy(k)) {
        return Err(Error::InvalidConfig(format!("tracer {t} outside [1, {k}]")));
    }
    let (seg, frac) = segment(k, t);
    let (a, b) = (&vertices[seg], &vertices[seg + 1]);
    Ok(a.iter().zip(b).map(|(&p, &q)| p + frac * (q - p)).collect())
}

/// Euclidean distance from `x` to the nearest segment of the chain.
pub fn distance_to_chain<T: Scalar>(vertices: &[Vec<T>], x: &[T]) -> T {
    vertices
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let ab: Vec<T> = a.iter().zip(b).map(|(&p, &q)| q - p).collect();
            let len2: T = ab.iter().map(|&d| d * d).sum();
            let s = if len2 > T::zero() {
                let dot: T = x.iter().zip(a).zip(&ab).map(|((&xi, &ai), &d)| (xi - ai) * d).sum();
                (dot / len2).max(T::zero()).min(T::one())
            } else {
                T::zero()
            };
            x.iter()
                .zip(a)
                .zip(&ab)
                .map(|((&xi, &ai), &d)| {
                    let r = xi - (ai + s * d);
                    r * r
                })
                .sum::<T>()
                .sqrt()
        })
        .fold(T::infinity(), T::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_examples() {
        let p = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 0.0]];
        assert_eq!(chain_point(&p, 1.5).unwrap(), vec![0.5, 0.5]);
        assert_eq!(chain_point(&p, 2.0).unwrap(), vec![1.0, 1.0]);
        assert_eq!(chain_point(&p, 1.0).unwrap(), vec![0.0, 0.0]);
        assert_eq!(chain_point(&p, 3.0).unwrap(), vec![2.0, 0.0]);
        assert_eq!(chain_point(&p, 2.5).unwrap(), vec![1.5, 0.5]);
        assert!(chain_point(&p, 0.5).is_err());
        assert!(chain_point(&p, 3.5).is_err());
    }

    #[test]
    fn distance_is_zero_on_chain() {
        let p = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 0.0]];
        for i in 0..=200 {
            let t = 1.0 + 2.0 * i as f64 / 200.0;
            let x = chain_point(&p, t).unwrap();
            assert!(distance_to_chain(&p, &x) < 1e-15);
        }
        assert!((distance_to_chain(&p, &[1.0, 0.0]) - 0.5_f64.sqrt()).abs() < 1e-15);
    }
}
