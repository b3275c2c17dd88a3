//! Exact closest-vector enumeration (Fincke–Pohst) for a positive definite
//! quadratic form given through its LDLᵀ factorization.
//!
//! The search minimizes `(n − y)ᵀ G (n − y)` over integer vectors `n` and
//! returns every minimizer. With an exact scalar type ties are detected
//! exactly, which is what corner detection needs.

use thiserror::Error;

use crate::linalg::Ldl;
use crate::scalar::Scalar;

/// Default limit on the number of enumeration nodes.
pub const MAX_ENUMERATION_NODES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("lattice enumeration exceeded {limit} candidate vectors")]
    LimitExceeded { limit: usize },
    #[error("coordinate does not fit in a machine integer")]
    Overflow,
}

/// All integer vectors at minimal distance from the target.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosestVectors<T> {
    pub distance: T,
    /// Sorted lexicographically.
    pub points: Vec<Vec<i64>>,
}

struct Search<'a, T> {
    ldl: &'a Ldl<T>,
    target: &'a [T],
    radius: T,
    best: Vec<Vec<i64>>,
    current: Vec<i64>,
    nodes: usize,
    limit: usize,
}

impl<T: Scalar> Search<'_, T> {
    // Level `i` fixes coordinate `i`; coordinates above `i` are already set.
    fn descend(&mut self, i: usize, partial: T) -> Result<(), EnumerationError> {
        let n = self.ldl.dim();
        let mut center = self.target[i].clone();
        for j in i + 1..n {
            center = center
                - self.ldl.l[(j, i)].clone()
                    * (T::from_int(self.current[j]) - self.target[j].clone());
        }
        let pivot = self.ldl.d[i].clone();
        let term = |k: i64| {
            let diff = T::from_int(k) - center.clone();
            pivot.clone() * diff.clone() * diff
        };
        let start = center.round_half_down().ok_or(EnumerationError::Overflow)?;
        // The nearest integer to the center is the first one to enter the
        // ellipsoid slice, so walking outward from it visits the whole slice.
        for direction in [0i64, 1] {
            let mut k = if direction == 0 { start } else { start + 1 };
            loop {
                let value = partial.clone() + term(k);
                if value > self.radius {
                    break;
                }
                self.nodes += 1;
                if self.nodes > self.limit {
                    return Err(EnumerationError::LimitExceeded { limit: self.limit });
                }
                self.current[i] = k;
                if i == 0 {
                    if value < self.radius {
                        self.radius = value;
                        self.best.clear();
                    }
                    self.best.push(self.current.clone());
                } else {
                    self.descend(i - 1, value)?;
                }
                k = if direction == 0 { k - 1 } else { k + 1 };
            }
        }
        Ok(())
    }
}

/// Every integer `n` minimizing `(n − y)ᵀ G (n − y)`, where `G = L D Lᵀ`.
pub fn closest_vectors<T: Scalar>(
    ldl: &Ldl<T>,
    target: &[T],
    limit: usize,
) -> Result<ClosestVectors<T>, EnumerationError> {
    let n = ldl.dim();
    assert_eq!(target.len(), n, "target dimension mismatch");
    if n == 0 {
        return Ok(ClosestVectors {
            distance: T::zero(),
            points: vec![vec![]],
        });
    }
    let seed = target
        .iter()
        .map(|y| y.round_half_down().ok_or(EnumerationError::Overflow))
        .collect::<Result<Vec<_>, _>>()?;
    let radius = form_distance(ldl, &seed, target);
    let mut search = Search {
        ldl,
        target,
        radius,
        best: Vec::new(),
        current: vec![0; n],
        nodes: 0,
        limit,
    };
    search.descend(n - 1, T::zero())?;
    let mut points = search.best;
    points.sort();
    points.dedup();
    Ok(ClosestVectors {
        distance: search.radius,
        points,
    })
}

/// `(n − y)ᵀ L D Lᵀ (n − y)`.
pub fn form_distance<T: Scalar>(ldl: &Ldl<T>, n: &[i64], y: &[T]) -> T {
    let dim = ldl.dim();
    let v: Vec<T> = n
        .iter()
        .zip(y)
        .map(|(&k, t)| T::from_int(k) - t.clone())
        .collect();
    (0..dim).fold(T::zero(), |acc, i| {
        let z = (i..dim).fold(T::zero(), |s, j| s + ldl.l[(j, i)].clone() * v[j].clone());
        acc + ldl.d[i].clone() * z.clone() * z
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::scalar::{rat, ratio};
    use num_rational::BigRational;

    fn brute_force(g: &Matrix<BigRational>, y: &[BigRational], r: i64) -> ClosestVectors<BigRational> {
        let ldl = g.ldl().unwrap();
        let n = y.len();
        let mut best: Option<BigRational> = None;
        let mut pts = Vec::new();
        let total = (2 * r + 1).pow(n as u32);
        for idx in 0..total {
            let mut rem = idx;
            let v: Vec<i64> = (0..n)
                .map(|_| {
                    let k = rem % (2 * r + 1) - r;
                    rem /= 2 * r + 1;
                    k
                })
                .collect();
            let d = form_distance(&ldl, &v, y);
            match &best {
                Some(b) if d > *b => {}
                Some(b) if d == *b => pts.push(v),
                _ => {
                    best = Some(d);
                    pts = vec![v];
                }
            }
        }
        pts.sort();
        ClosestVectors { distance: best.unwrap(), points: pts }
    }

    #[test]
    fn one_dimensional_tie() {
        let g = Matrix::from_rows(vec![vec![rat(2)]]);
        let cv = closest_vectors(&g.ldl().unwrap(), &[ratio(1, 2)], MAX_ENUMERATION_NODES).unwrap();
        assert_eq!(cv.points, vec![vec![0], vec![1]]);
        assert_eq!(cv.distance, ratio(1, 2));
    }

    #[test]
    fn hexagonal_deep_hole_has_three_neighbours() {
        let g = Matrix::from_rows(vec![vec![rat(2), rat(1)], vec![rat(1), rat(2)]]);
        let y = [ratio(1, 3), ratio(1, 3)];
        let cv = closest_vectors(&g.ldl().unwrap(), &y, MAX_ENUMERATION_NODES).unwrap();
        assert_eq!(cv, brute_force(&g, &y, 4));
        assert_eq!(cv.points.len(), 3);
    }

    #[test]
    fn agrees_with_brute_force_on_skewed_form() {
        let g = Matrix::from_rows(vec![
            vec![rat(5), rat(2), ratio(-3, 2)],
            vec![rat(2), rat(3), ratio(1, 2)],
            vec![ratio(-3, 2), ratio(1, 2), rat(4)],
        ]);
        for (a, b, c) in [(1, 2, 3), (-7, 5, 0), (13, -4, 9), (1, 1, 1)] {
            let y = [ratio(a, 4), ratio(b, 3), ratio(c, 6)];
            let cv = closest_vectors(&g.ldl().unwrap(), &y, MAX_ENUMERATION_NODES).unwrap();
            assert_eq!(cv, brute_force(&g, &y, 5), "target {y:?}");
        }
    }

    #[test]
    fn node_limit_is_enforced() {
        let g = Matrix::from_rows(vec![vec![rat(1), rat(0)], vec![rat(0), rat(1)]]);
        let y = [ratio(1, 2), ratio(1, 2)];
        assert_eq!(
            closest_vectors(&g.ldl().unwrap(), &y, 2),
            Err(EnumerationError::LimitExceeded { limit: 2 })
        );
    }

    #[test]
    fn zero_dimensional() {
        let g: Matrix<BigRational> = Matrix::zeros(0, 0);
        let cv = closest_vectors(&g.ldl().unwrap(), &[], 10).unwrap();
        assert_eq!(cv.points, vec![Vec::<i64>::new()]);
    }
}
