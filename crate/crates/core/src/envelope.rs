//! Upper envelope of a family of affine functions on a closed interval.

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Line<T> {
    pub slope: T,
    pub intercept: T,
}

impl<T: Scalar> Line<T> {
    pub fn new(slope: T, intercept: T) -> Self {
        Line { slope, intercept }
    }

    pub fn eval(&self, t: &T) -> T {
        self.slope.clone() * t.clone() + self.intercept.clone()
    }

    /// Abscissa where two non-parallel lines meet.
    pub fn crossing(&self, other: &Line<T>) -> Option<T> {
        let ds = other.slope.clone() - self.slope.clone();
        if ds.is_zero() {
            None
        } else {
            Some((self.intercept.clone() - other.intercept.clone()) / ds)
        }
    }
}

/// A maximal interval on which one line attains the envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece<T> {
    pub start: T,
    pub end: T,
    /// Index into the input slice.
    pub line: usize,
}

/// Pieces of `max_i lines[i]` over `[lo, hi]`, left to right.
///
/// Among lines that coincide the lowest index is reported. Pieces have
/// positive length unless `lo == hi`.
pub fn upper_envelope<T: Scalar>(lines: &[Line<T>], lo: &T, hi: &T) -> Vec<Piece<T>> {
    assert!(lo <= hi, "empty interval");
    if lines.is_empty() {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..lines.len()).collect();
    order.sort_by(|&a, &b| {
        lines[a]
            .slope
            .partial_cmp(&lines[b].slope)
            .unwrap()
            .then_with(|| lines[b].intercept.partial_cmp(&lines[a].intercept).unwrap())
            .then(a.cmp(&b))
    });
    // keep the highest line per slope
    order.dedup_by(|b, a| lines[*a].slope == lines[*b].slope);

    let mut hull: Vec<usize> = Vec::new();
    for &c in &order {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let ab = lines[a].crossing(&lines[b]).unwrap();
            let ac = lines[a].crossing(&lines[c]).unwrap();
            if ac <= ab {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(c);
    }

    if lo == hi {
        let best = hull
            .iter()
            .copied()
            .reduce(|a, b| if lines[b].eval(lo) > lines[a].eval(lo) { b } else { a })
            .unwrap();
        return vec![Piece {
            start: lo.clone(),
            end: hi.clone(),
            line: best,
        }];
    }

    let mut pieces = Vec::new();
    for (k, &idx) in hull.iter().enumerate() {
        let left = if k == 0 {
            lo.clone()
        } else {
            max(lo, &lines[hull[k - 1]].crossing(&lines[idx]).unwrap())
        };
        let right = if k + 1 == hull.len() {
            hi.clone()
        } else {
            min(hi, &lines[idx].crossing(&lines[hull[k + 1]]).unwrap())
        };
        if left < right {
            pieces.push(Piece {
                start: left,
                end: right,
                line: idx,
            });
        }
    }
    pieces
}

fn max<T: Scalar>(a: &T, b: &T) -> T {
    if a >= b { a.clone() } else { b.clone() }
}

fn min<T: Scalar>(a: &T, b: &T) -> T {
    if a <= b { a.clone() } else { b.clone() }
}

/// Interior points of `(lo, hi)` where the envelope changes line.
pub fn breakpoints<T: Scalar>(pieces: &[Piece<T>]) -> Vec<T> {
    pieces.windows(2).map(|w| w[0].end.clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn line(s: i64, c: BigRational) -> Line<BigRational> {
        Line::new(rat(s), c)
    }

    #[test]
    fn circle_two_lines_cross_at_midpoint() {
        // lines of n = 0 and n = 1 for the circle of length 2 at shift 0
        let lines = vec![line(0, rat(0)), line(1, rat(-1))];
        let pieces = upper_envelope(&lines, &rat(0), &rat(2));
        assert_eq!(breakpoints(&pieces), vec![rat(1)]);
        assert_eq!(pieces[0].line, 0);
        assert_eq!(pieces[1].line, 1);
    }

    #[test]
    fn dominated_and_parallel_lines_drop_out() {
        let lines = vec![
            line(0, rat(0)),
            line(0, rat(-5)),
            line(1, rat(-10)),
            line(-1, rat(0)),
            line(2, rat(-2)),
        ];
        let pieces = upper_envelope(&lines, &rat(-3), &rat(3));
        let used: Vec<usize> = pieces.iter().map(|p| p.line).collect();
        assert_eq!(used, vec![3, 0, 4]);
        assert_eq!(breakpoints(&pieces), vec![rat(0), rat(1)]);
    }

    #[test]
    fn clipped_to_interval() {
        let lines = vec![line(0, rat(0)), line(1, rat(-1))];
        let pieces = upper_envelope(&lines, &ratio(3, 2), &rat(4));
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].line, 1);
    }

    proptest! {
        #[test]
        fn envelope_matches_pointwise_max(
            raw in proptest::collection::vec((-4i64..5, -20i64..21), 1..8),
            samples in proptest::collection::vec(0i64..=60, 1..20),
        ) {
            let lines: Vec<_> = raw.iter().map(|&(s, c)| line(s, ratio(c, 3))).collect();
            let pieces = upper_envelope(&lines, &rat(0), &rat(6));
            prop_assert_eq!(&pieces.first().unwrap().start, &rat(0));
            prop_assert_eq!(&pieces.last().unwrap().end, &rat(6));
            for w in pieces.windows(2) {
                prop_assert_eq!(&w[0].end, &w[1].start);
                prop_assert!(lines[w[0].line].slope < lines[w[1].line].slope);
            }
            for s in samples {
                let t = ratio(s, 10);
                let best = lines.iter().map(|l| l.eval(&t)).max().unwrap();
                let piece = pieces.iter().find(|p| p.start <= t && t <= p.end).unwrap();
                prop_assert_eq!(lines[piece.line].eval(&t), best);
            }
        }
    }
}
