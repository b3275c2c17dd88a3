//! Piecewise-linear functions, principal divisors and the Abel–Jacobi map.

use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::curve::{Divisor, MetricGraph, Point};
use crate::error::{Error, Result};
use crate::homology::{fundamental_cycles, gram_matrix, Cycle, GramForm, SpanningTree};
use crate::linalg::{self, Ldl};
use crate::scalar::{rat, Scalar};
use crate::Rational;

/// Largest genus for which `2^g` enumerations are attempted.
pub const MAX_ENUMERATION_GENUS: usize = 20;

/// Continuous PL function with integer slopes, stored per edge as
/// breakpoints `(offset, value)` from offset `0` to the edge length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    edges: Vec<Vec<(Rational, Rational)>>,
}

impl PLFunction {
    pub fn new(graph: &MetricGraph, edges: Vec<Vec<(Rational, Rational)>>) -> Result<Self> {
        let bad = |msg: String| Err(Error::MalformedFunction(msg));
        if edges.len() != graph.num_edges() {
            return Err(Error::DimensionMismatch {
                expected: graph.num_edges(),
                got: edges.len(),
            });
        }
        let mut at_vertex: Vec<Option<Rational>> = vec![None; graph.num_vertices()];
        for (i, (e, pts)) in graph.edges().iter().zip(&edges).enumerate() {
            if pts.len() < 2 || !pts[0].0.is_zero() || pts[pts.len() - 1].0 != e.length {
                return bad(format!("edge {} must have breakpoints at 0 and its length", e.id));
            }
            for w in pts.windows(2) {
                let dt = &w[1].0 - &w[0].0;
                if dt <= Rational::zero() {
                    return bad(format!("offsets on edge {} are not increasing", e.id));
                }
                if !((&w[1].1 - &w[0].1) / dt).is_integer() {
                    return bad(format!("non-integral slope on edge {}", e.id));
                }
            }
            for (v, value) in [(e.tail, &pts[0].1), (e.head, &pts[pts.len() - 1].1)] {
                match &at_vertex[v] {
                    Some(prev) if prev != value => {
                        return bad(format!(
                            "discontinuous at vertex {} (edge index {i})",
                            graph.vertices()[v]
                        ));
                    }
                    _ => at_vertex[v] = Some(value.clone()),
                }
            }
        }
        Ok(PLFunction { edges })
    }

    pub fn constant(graph: &MetricGraph, c: Rational) -> Self {
        PLFunction {
            edges: graph
                .edges()
                .iter()
                .map(|e| vec![(Rational::zero(), c.clone()), (e.length.clone(), c.clone())])
                .collect(),
        }
    }

    pub fn breakpoints(&self, edge: usize) -> &[(Rational, Rational)] {
        &self.edges[edge]
    }

    /// Slopes of consecutive segments on an edge (tail → head).
    pub fn slopes(&self, edge: usize) -> Vec<i64> {
        self.edges[edge]
            .windows(2)
            .map(|w| {
                let s = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                s.floor_int().expect("slope fits in i64")
            })
            .collect()
    }

    pub fn value_at(&self, graph: &MetricGraph, p: &Point) -> Rational {
        match p {
            Point::Vertex(v) => {
                let (i, e) = graph
                    .edges()
                    .iter()
                    .enumerate()
                    .find(|(_, e)| e.tail == *v || e.head == *v)
                    .expect("connected graph with an edge at every vertex");
                let pts = &self.edges[i];
                if e.tail == *v {
                    pts[0].1.clone()
                } else {
                    pts[pts.len() - 1].1.clone()
                }
            }
            Point::Edge { edge, offset } => {
                let pts = &self.edges[*edge];
                let k = pts.partition_point(|(t, _)| t <= offset).min(pts.len() - 1);
                let (t0, v0) = &pts[k - 1];
                let (t1, v1) = &pts[k];
                v0 + (v1 - v0) * (offset - t0) / (t1 - t0)
            }
        }
    }

    /// Pointwise sum; breakpoints are merged.
    pub fn add(&self, other: &PLFunction, graph: &MetricGraph) -> PLFunction {
        let edges = (0..self.edges.len())
            .map(|i| {
                let mut ts: Vec<Rational> = self.edges[i]
                    .iter()
                    .chain(&other.edges[i])
                    .map(|(t, _)| t.clone())
                    .collect();
                ts.sort();
                ts.dedup();
                ts.into_iter()
                    .map(|t| {
                        let p = graph
                            .point_on_edge(i, t.clone())
                            .expect("offset within edge");
                        (t, self.value_at(graph, &p) + other.value_at(graph, &p))
                    })
                    .collect()
            })
            .collect();
        PLFunction { edges }
    }

    pub fn scaled(&self, k: i64) -> PLFunction {
        PLFunction {
            edges: self
                .edges
                .iter()
                .map(|pts| pts.iter().map(|(t, v)| (t.clone(), v * rat(k))).collect())
                .collect(),
        }
    }
}

/// `(f) = Σ_p (sum of outgoing slopes at p) · p`.
pub fn principal_divisor(f: &PLFunction, graph: &MetricGraph) -> Divisor {
    let mut d = Divisor::new();
    for (i, e) in graph.edges().iter().enumerate() {
        let slopes = f.slopes(i);
        d.add_point(Point::Vertex(e.tail), slopes[0]);
        d.add_point(Point::Vertex(e.head), -slopes[slopes.len() - 1]);
        for (k, w) in slopes.windows(2).enumerate() {
            let offset = f.breakpoints(i)[k + 1].0.clone();
            d.add_point(Point::Edge { edge: i, offset }, w[1] - w[0]);
        }
    }
    d
}

/// A point of the Jacobian in basis-pairing coordinates, defined modulo `G·Zᵍ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JacPoint {
    pub coords: Vec<Rational>,
}

impl JacPoint {
    pub fn new(coords: Vec<Rational>) -> Self {
        JacPoint { coords }
    }

    pub fn zero(g: usize) -> Self {
        JacPoint {
            coords: vec![Rational::zero(); g],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn scaled(&self, k: &Rational) -> JacPoint {
        JacPoint::new(linalg::scale(k, &self.coords))
    }
}

impl Add for &JacPoint {
    type Output = JacPoint;
    fn add(self, rhs: &JacPoint) -> JacPoint {
        JacPoint::new(linalg::add(&self.coords, &rhs.coords))
    }
}

impl Sub for &JacPoint {
    type Output = JacPoint;
    fn sub(self, rhs: &JacPoint) -> JacPoint {
        JacPoint::new(linalg::sub(&self.coords, &rhs.coords))
    }
}

impl Neg for &JacPoint {
    type Output = JacPoint;
    fn neg(self) -> JacPoint {
        JacPoint::new(self.coords.iter().map(|c| -c).collect())
    }
}

/// The Jacobian of one curve model: a cycle basis, its Gram form, and a
/// spanning tree fixing the integration paths from the basepoint.
#[derive(Debug, Clone)]
pub struct Jacobian {
    graph: MetricGraph,
    form: GramForm,
    ldl: Ldl<Rational>,
    tree: SpanningTree,
    /// Lift of each vertex: integral over the tree path from the root.
    vertex_lifts: Vec<Vec<Rational>>,
    base_lift: Vec<Rational>,
}

impl Jacobian {
    /// Fundamental-cycle basis of the breadth-first tree; paths follow the same tree.
    pub fn new(graph: &MetricGraph) -> Self {
        let tree = SpanningTree::bfs(graph);
        let basis = fundamental_cycles(graph, &tree);
        Self::with_basis(graph, basis, tree).expect("fundamental cycles form a basis")
    }

    /// Uses a given basis of `H₁` and a given tree for the paths.
    pub fn with_basis(graph: &MetricGraph, basis: Vec<Cycle>, tree: SpanningTree) -> Result<Self> {
        if basis.len() != graph.genus() {
            return Err(Error::DimensionMismatch {
                expected: graph.genus(),
                got: basis.len(),
            });
        }
        if basis.iter().any(|c| c.0.len() != graph.num_edges() || !c.is_closed(graph)) {
            return Err(Error::MalformedFunction("basis element is not a cycle".into()));
        }
        let form = gram_matrix(&basis, graph);
        let ldl = form
            .gram()
            .ldl()
            .ok_or_else(|| Error::MalformedFunction("basis cycles are dependent".into()))?;
        let g = basis.len();
        let mut jac = Jacobian {
            graph: graph.clone(),
            form,
            ldl,
            tree,
            vertex_lifts: vec![vec![Rational::zero(); g]; graph.num_vertices()],
            base_lift: vec![Rational::zero(); g],
        };
        for &v in jac.tree.order().iter().skip(1) {
            let e = jac.tree.parent_edge(v).expect("non-root vertex has a parent");
            let edge = graph.edge(e);
            let step = linalg::scale(&edge.length, &jac.direction(e));
            jac.vertex_lifts[v] = if edge.head == v {
                linalg::add(&jac.vertex_lifts[edge.tail], &step)
            } else {
                linalg::sub(&jac.vertex_lifts[edge.head], &step)
            };
        }
        jac.base_lift = jac.lift(graph.basepoint());
        Ok(jac)
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn form(&self) -> &GramForm {
        &self.form
    }

    pub fn ldl(&self) -> &Ldl<Rational> {
        &self.ldl
    }

    pub fn tree(&self) -> &SpanningTree {
        &self.tree
    }

    pub fn genus(&self) -> usize {
        self.form.genus()
    }

    /// `(λᵢ(e))ᵢ`: derivative of the Abel–Jacobi lift along edge `e` per unit length.
    pub fn direction(&self, edge: usize) -> Vec<Rational> {
        self.form.basis().iter().map(|c| rat(c.0[edge])).collect()
    }

    pub fn direction_int(&self, edge: usize) -> Vec<i64> {
        self.form.basis().iter().map(|c| c.0[edge]).collect()
    }

    /// Integral from the tree root to `p` along the tree path, then along the edge.
    pub fn lift(&self, p: &Point) -> Vec<Rational> {
        match p {
            Point::Vertex(v) => self.vertex_lifts[*v].clone(),
            Point::Edge { edge, offset } => {
                let tail = self.graph.edge(*edge).tail;
                linalg::add(
                    &self.vertex_lifts[tail],
                    &linalg::scale(offset, &self.direction(*edge)),
                )
            }
        }
    }

    /// Image of a single point, `∫_{p₀}^{p}`, as a lift.
    pub fn point_image(&self, p: &Point) -> JacPoint {
        JacPoint::new(linalg::sub(&self.lift(p), &self.base_lift))
    }

    /// `μ(D) = Σ aᵢ ∫_{p₀}^{pᵢ}`.
    pub fn abel_jacobi(&self, d: &Divisor) -> JacPoint {
        let mut acc = JacPoint::zero(self.genus());
        for (p, c) in d.iter() {
            acc = &acc + &self.point_image(p).scaled(&rat(c));
        }
        acc
    }

    /// Coordinates of the lattice vector `Σ nⱼλⱼ`, i.e. `G·n`.
    pub fn lattice_vector(&self, n: &[i64]) -> JacPoint {
        JacPoint::new(self.form.gram().mul_int_vec(n))
    }

    /// `G⁻¹x`, the coordinates of `x` in the basis of `Λ`.
    pub fn lattice_coordinates(&self, x: &JacPoint) -> Vec<Rational> {
        self.ldl.solve(&x.coords)
    }

    /// Equality in `Rᵍ/Λ`: `G⁻¹(x − y)` is integral.
    pub fn equal(&self, x: &JacPoint, y: &JacPoint) -> bool {
        self.lattice_coordinates(&(x - y))
            .iter()
            .all(Rational::is_integer)
    }

    pub fn is_zero(&self, x: &JacPoint) -> bool {
        self.equal(x, &JacPoint::zero(self.genus()))
    }

    /// `x − G·round(G⁻¹x)` with ties rounded down.
    pub fn canonical(&self, x: &JacPoint) -> JacPoint {
        let n: Vec<i64> = self
            .lattice_coordinates(x)
            .iter()
            .map(|c| c.round_half_down().expect("coordinate fits in i64"))
            .collect();
        x - &self.lattice_vector(&n)
    }

    /// Equal degree and equal Abel–Jacobi image.
    pub fn lin_equiv(&self, d1: &Divisor, d2: &Divisor) -> bool {
        d1.degree() == d2.degree() && self.is_zero(&self.abel_jacobi(&(d1 - d2)))
    }

    /// The `2^g` points `½·G·n`, `n ∈ {0,1}ᵍ`, with bit `i` of the index as `nᵢ`.
    pub fn two_torsion(&self) -> Result<Vec<(Vec<u8>, JacPoint)>> {
        let g = self.genus();
        if g > MAX_ENUMERATION_GENUS {
            return Err(Error::GenusTooLarge {
                genus: g,
                cap: MAX_ENUMERATION_GENUS,
            });
        }
        let half = Rational::one() / rat(2);
        Ok((0..1usize << g)
            .map(|mask| {
                let bits = bits_of(mask, g);
                let n: Vec<i64> = bits.iter().map(|&b| i64::from(b)).collect();
                (bits, self.lattice_vector(&n).scaled(&half))
            })
            .collect())
    }
}

/// Little-endian bit vector of length `g`.
pub fn bits_of(mask: usize, g: usize) -> Vec<u8> {
    (0..g).map(|i| ((mask >> i) & 1) as u8).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::scalar::ratio;

    fn q(n: i64) -> Rational {
        rat(n)
    }

    #[test]
    fn tent_on_circle() {
        let g = samples::circle(rat(2));
        let f = PLFunction::new(&g, vec![vec![(q(0), q(0)), (q(1), q(1)), (q(2), q(0))]]).unwrap();
        let d = principal_divisor(&f, &g);
        let m = Point::Edge { edge: 0, offset: q(1) };
        assert_eq!(d, Divisor::from_iter([(Point::Vertex(0), 2), (m, -2)]));
    }

    #[test]
    fn constant_has_empty_divisor() {
        let g = samples::k4_unit();
        assert!(principal_divisor(&PLFunction::constant(&g, ratio(7, 3)), &g).is_empty());
    }

    #[test]
    fn distance_from_u_on_theta() {
        let g = samples::theta_unit();
        let up = vec![(q(0), q(0)), (q(1), q(1))];
        let f = PLFunction::new(&g, vec![up.clone(), up.clone(), up]).unwrap();
        let d = principal_divisor(&f, &g);
        assert_eq!(d, Divisor::from_iter([(Point::Vertex(0), 3), (Point::Vertex(1), -3)]));
    }

    #[test]
    fn malformed_functions_rejected() {
        let g = samples::circle(rat(2));
        let half_slope = vec![vec![(q(0), q(0)), (q(2), q(1))]];
        assert!(matches!(PLFunction::new(&g, half_slope), Err(Error::MalformedFunction(_))));
        let jump = vec![vec![(q(0), q(0)), (q(2), q(2))]];
        assert!(matches!(PLFunction::new(&g, jump), Err(Error::MalformedFunction(_))));
    }

    #[test]
    fn circle_half_period() {
        let g = samples::circle(rat(2));
        let jac = Jacobian::new(&g);
        let m = Point::Edge { edge: 0, offset: q(1) };
        let d = &Divisor::point(m.clone()) - &Divisor::point(Point::Vertex(0));
        assert_eq!(jac.abel_jacobi(&d).coords, vec![q(1)]);
        assert!(jac.abel_jacobi(&Divisor::new()).coords.iter().all(Zero::is_zero));
        assert!(!jac.lin_equiv(&Divisor::point(Point::Vertex(0)), &Divisor::point(m)));
    }

    #[test]
    fn jac_equality_on_circle() {
        let jac = Jacobian::new(&samples::circle(rat(2)));
        let p = |c: i64| JacPoint::new(vec![q(c)]);
        assert!(jac.equal(&p(3), &p(1)));
        assert!(!jac.equal(&p(1), &p(0)));
        assert!(jac.equal(&p(5), &p(5)));
        assert_eq!(jac.canonical(&p(3)), p(1));
        assert_eq!(jac.canonical(&p(-1)), p(1));
    }

    #[test]
    fn two_torsion_points() {
        let jac = Jacobian::new(&samples::circle(rat(2)));
        let tt = jac.two_torsion().unwrap();
        assert_eq!(tt, vec![(vec![0], JacPoint::new(vec![q(0)])), (vec![1], JacPoint::new(vec![q(1)]))]);

        let tree = Jacobian::new(&samples::path(2));
        assert_eq!(tree.two_torsion().unwrap(), vec![(vec![], JacPoint::new(vec![]))]);

        let theta = samples::theta_unit();
        let t = SpanningTree::from_edges(&theta, &[1]).unwrap();
        let basis = fundamental_cycles(&theta, &t);
        let jac = Jacobian::with_basis(&theta, basis, t).unwrap();
        let coords: Vec<Vec<Rational>> =
            jac.two_torsion().unwrap().into_iter().map(|(_, p)| p.coords).collect();
        assert_eq!(
            coords,
            vec![
                vec![q(0), q(0)],
                vec![q(1), ratio(1, 2)],
                vec![ratio(1, 2), q(1)],
                vec![ratio(3, 2), ratio(3, 2)],
            ]
        );
        for (i, a) in coords.iter().enumerate() {
            let a = JacPoint::new(a.clone());
            assert!(jac.is_zero(&a.scaled(&q(2))));
            for b in &coords[i + 1..] {
                assert!(!jac.equal(&a, &JacPoint::new(b.clone())));
            }
        }
    }

    #[test]
    fn closed_paths_land_in_the_lattice() {
        let g = samples::theta_mixed();
        let jac = Jacobian::new(&g);
        for v in 0..g.num_vertices() {
            for (e, edge) in g.edges().iter().enumerate() {
                let via_edge = if edge.tail == v {
                    linalg::add(&jac.lift(&Point::Vertex(v)), &linalg::scale(&edge.length, &jac.direction(e)))
                } else {
                    continue;
                };
                let direct = jac.lift(&Point::Vertex(edge.head));
                assert!(jac.equal(&JacPoint::new(via_edge), &JacPoint::new(direct)));
            }
        }
    }
}
