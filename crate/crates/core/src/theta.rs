//! The tropical theta function `Θ(x) = max_n (nᵀx − ½ nᵀGn)`, its corner
//! locus, pulled-back divisors and the Riemann constant.

use std::collections::BTreeSet;

use crate::curve::{Divisor, Point};
use crate::divisor::{JacPoint, Jacobian};
use crate::envelope::{breakpoints, upper_envelope, Line};
use crate::error::{Error, Result};
use crate::homology::GramForm;
use crate::lattice::{closest_vectors, MAX_ENUMERATION_NODES};
use crate::linalg::{self, dot_int, Ldl};
use crate::orientation::{moderator, Sign};
use crate::scalar::rat;
use crate::{Rational, RationalMatrix};

/// `Θ(x)` with every maximizing lattice vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaValue {
    pub value: Rational,
    /// Sorted, nonempty.
    pub argmax: Vec<Vec<i64>>,
}

impl ThetaValue {
    /// `x` lies on the theta divisor.
    pub fn is_corner(&self) -> bool {
        self.argmax.len() >= 2
    }
}

/// Theta function of a fixed Gram form.
#[derive(Debug, Clone)]
pub struct Theta {
    gram: RationalMatrix,
    ldl: Ldl<Rational>,
    limit: usize,
}

impl Theta {
    pub fn new(form: &GramForm) -> Self {
        Theta {
            gram: form.gram().clone(),
            ldl: form.ldl(),
            limit: MAX_ENUMERATION_NODES,
        }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn genus(&self) -> usize {
        self.ldl.dim()
    }

    /// `nᵀx − ½ nᵀGn`.
    pub fn term(&self, n: &[i64], x: &[Rational]) -> Rational {
        dot_int(n, x) - self.gram.quadratic_int(n) / rat(2)
    }

    /// Exact maximum over all of `Zᵍ`: the maximizers are the lattice points
    /// closest to `G⁻¹x` in the norm of `G`.
    pub fn eval(&self, x: &[Rational]) -> Result<ThetaValue> {
        if x.len() != self.genus() {
            return Err(Error::DimensionMismatch {
                expected: self.genus(),
                got: x.len(),
            });
        }
        let target = self.ldl.solve(x);
        let closest = closest_vectors(&self.ldl, &target, self.limit)?;
        let value = self.term(&closest.points[0], x);
        Ok(ThetaValue {
            value,
            argmax: closest.points,
        })
    }
}

pub fn theta_eval(x: &[Rational], form: &GramForm) -> Result<ThetaValue> {
    Theta::new(form).eval(x)
}

/// `|argmax| ≥ 2`.
pub fn on_theta_divisor(x: &[Rational], form: &GramForm) -> Result<bool> {
    Ok(theta_eval(x, form)?.is_corner())
}

/// Corner divisor of `p ↦ Θ(μ(p) − shift)` on the Jacobian's model.
///
/// Along an edge the Abel–Jacobi lift moves with integer velocity `s`, so
/// each lattice vector contributes a line of integer slope `nᵀs`. The
/// envelope is built from the maximizers at both ends and grown until an
/// exact evaluation at every breakpoint finds no new maximizer.
pub fn pullback_divisor(jac: &Jacobian, shift: &JacPoint) -> Result<Divisor> {
    let theta = Theta::new(jac.form());
    pullback_with(jac, &theta, shift)
}

pub(crate) fn pullback_with(jac: &Jacobian, theta: &Theta, shift: &JacPoint) -> Result<Divisor> {
    let g = jac.genus();
    if shift.dim() != g {
        return Err(Error::DimensionMismatch {
            expected: g,
            got: shift.dim(),
        });
    }
    let graph = jac.graph();
    let mut divisor = Divisor::new();
    if g == 0 {
        return Ok(divisor);
    }
    let at = |p: &Point| (&jac.point_image(p) - shift).coords;

    for (i, edge) in graph.edges().iter().enumerate() {
        let s = jac.direction_int(i);
        if s.iter().all(|&c| c == 0) {
            continue;
        }
        let sr = jac.direction(i);
        let x0 = at(&Point::Vertex(edge.tail));
        let x_at = |t: &Rational| linalg::add(&x0, &linalg::scale(t, &sr));
        let mut candidates: BTreeSet<Vec<i64>> = BTreeSet::new();
        candidates.extend(theta.eval(&x0)?.argmax);
        candidates.extend(theta.eval(&x_at(&edge.length))?.argmax);

        let zero = rat(0);
        let corners = loop {
            let list: Vec<&Vec<i64>> = candidates.iter().collect();
            let lines: Vec<Line<Rational>> = list
                .iter()
                .map(|n| Line::new(rat(dot_int_i(n, &s)), theta.term(n, &x0)))
                .collect();
            let pieces = upper_envelope(&lines, &zero, &edge.length);
            let mut grown = false;
            let mut corners = Vec::new();
            for t in breakpoints(&pieces) {
                let value = theta.eval(&x_at(&t))?;
                for n in &value.argmax {
                    grown |= candidates.insert(n.clone());
                }
                corners.push((t, value));
            }
            if !grown {
                break corners;
            }
        };
        for (t, value) in corners {
            let slopes = value.argmax.iter().map(|n| dot_int_i(n, &s));
            let (lo, hi) = slopes.fold((i64::MAX, i64::MIN), |(lo, hi), k| (lo.min(k), hi.max(k)));
            divisor.add_point(Point::Edge { edge: i, offset: t }, hi - lo);
        }
    }

    for v in 0..graph.num_vertices() {
        let value = theta.eval(&at(&Point::Vertex(v)))?;
        let mut total = 0;
        for (i, edge) in graph.edges().iter().enumerate() {
            let s = jac.direction_int(i);
            for (end, sign) in [(edge.tail, 1), (edge.head, -1)] {
                if end != v {
                    continue;
                }
                total += value
                    .argmax
                    .iter()
                    .map(|n| sign * dot_int_i(n, &s))
                    .max()
                    .expect("argmax is nonempty");
            }
        }
        divisor.add_point(Point::Vertex(v), total);
    }
    Ok(divisor)
}

fn dot_int_i(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The Riemann constant `κ` and the distinguished characteristic `K₀ = −κ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KappaClass {
    pub kappa: JacPoint,
    pub k0: JacPoint,
}

/// `K₀` is the class of the moderator `K⁻_{p₀}` and `κ = −K₀`.
pub fn compute_kappa(jac: &Jacobian) -> Result<KappaClass> {
    let graph = jac.graph();
    let moderator = moderator(graph, std::slice::from_ref(graph.basepoint()), Sign::Minus)?;
    let k0 = jac.abel_jacobi(&moderator);
    Ok(KappaClass {
        kappa: -&k0,
        k0,
    })
}

impl KappaClass {
    /// `2·K₀ = μ(K)`.
    pub fn doubles_to_canonical(&self, jac: &Jacobian) -> bool {
        let canonical = jac.abel_jacobi(&jac.graph().canonical_divisor());
        jac.equal(&self.k0.scaled(&rat(2)), &canonical)
    }
}

/// `μ(D_λ) + κ = λ` for the pulled-back divisor `D_λ`.
pub fn jacobi_inversion_check(jac: &Jacobian, lambda: &JacPoint, kappa: &KappaClass) -> Result<bool> {
    let d = pullback_divisor(jac, lambda)?;
    Ok(jac.equal(&(&jac.abel_jacobi(&d) + &kappa.kappa), lambda))
}

/// A degree `g − 1` class `c` is effective iff `c + κ` lies on the theta divisor.
pub fn effective_class_test(jac: &Jacobian, class: &JacPoint, kappa: &KappaClass) -> Result<bool> {
    on_theta_divisor(&(class + &kappa.kappa).coords, jac.form())
}
