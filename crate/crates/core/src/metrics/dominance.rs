use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Pareto dominance for minimization: `a` is no worse everywhere and strictly
/// better somewhere.
pub fn dominates<T: Scalar>(a: &[T], b: &[T]) -> Result<bool> {
    Error::check_len(a.len(), b.len())?;
    Ok(dominates_unchecked(a, b))
}

/// `a` is strictly better than `b` in every objective.
pub fn strictly_dominates<T: Scalar>(a: &[T], b: &[T]) -> Result<bool> {
    Error::check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b).all(|(x, y)| x < y))
}

#[inline]
pub(crate) fn dominates_unchecked<T: Scalar>(a: &[T], b: &[T]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// Indices of the points no other point dominates, in ascending index order.
///
/// Points are visited in lexicographic order, so a point can only be dominated
/// by one visited earlier; each is checked against the current survivors only.
/// Duplicates never dominate each other and are all kept.
pub fn nondominated_filter<T: Scalar, P: AsRef<[T]>>(points: &[P]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lex_cmp(points[i].as_ref(), points[j].as_ref()).then(i.cmp(&j)));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let p = points[i].as_ref();
        if !kept.iter().any(|&k| dominates_unchecked(points[k].as_ref(), p)) {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[1.0, 2.0], &[2.0, 3.0]).unwrap());
        assert!(strictly_dominates(&[1.0, 2.0], &[2.0, 3.0]).unwrap());
        assert!(!dominates(&[1.0, 3.0], &[3.0, 1.0]).unwrap());
        assert!(!dominates(&[3.0, 1.0], &[1.0, 3.0]).unwrap());
        assert!(!dominates(&[1.0, 2.0], &[1.0, 2.0]).unwrap());
        assert!(dominates(&[1.0, 2.0], &[1.0, 3.0]).unwrap());
        assert!(!strictly_dominates(&[1.0, 2.0], &[1.0, 3.0]).unwrap());
        assert!(dominates(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn filter_examples() {
        let pts = vec![vec![1.0, 2.0], vec![2.0, 1.0], vec![2.0, 2.0]];
        assert_eq!(nondominated_filter(&pts), vec![0, 1]);
        let same = vec![vec![0.5, 0.5]; 4];
        assert_eq!(nondominated_filter(&same), vec![0, 1, 2, 3]);
        let empty: Vec<Vec<f64>> = vec![];
        assert!(nondominated_filter(&empty).is_empty());
    }
}
