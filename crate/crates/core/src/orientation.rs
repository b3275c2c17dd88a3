//! Distance functions, gradient-flow orientations, moderators and the
//! divisors attached to classes in `H₁(C, Z/2)`.
//!
//! Every orientation lives on a refined model in which each source point
//! and each ridge point (local maximum of the distance) is a vertex. Along
//! every refined edge the distance is then affine with slope ±1, or
//! identically zero on the support of a cycle class, so in/out valences are
//! plain counts.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt::Write as _;

use num_traits::Zero;

use crate::curve::{Divisor, MetricGraph, Point, Refinement};
use crate::divisor::{bits_of, JacPoint, Jacobian, PLFunction, MAX_ENUMERATION_GENUS};
use crate::error::{Error, Result};
use crate::homology::Cycle;
use crate::scalar::rat;
use crate::theta::{effective_class_test, KappaClass};
use crate::Rational;

/// Which valence a moderator-type divisor counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    /// Outgoing edges: `Σ (val₊(p) − 1) p`.
    Plus,
    /// Incoming edges: `Σ (val₋(p) − 1) p`.
    Minus,
}

/// Set the distance is measured from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    Points(Vec<Point>),
    /// Closed union of the given edges.
    Edges(Vec<usize>),
}

/// Exact distance to a source, tabulated on a model where it is affine on every edge.
#[derive(Debug, Clone)]
struct DistanceField {
    /// Coarse graph → model with sources and ridges as vertices.
    refinement: Refinement,
    dist: Vec<Rational>,
    /// Per refined edge: lies in the source edge set.
    on_source: Vec<bool>,
    ridge: Vec<bool>,
}

fn dijkstra(graph: &MetricGraph, sources: &[usize]) -> Vec<Rational> {
    let adj = graph.adjacency();
    let mut dist: Vec<Option<Rational>> = vec![None; graph.num_vertices()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = Some(Rational::zero());
        heap.push(Reverse((Rational::zero(), s)));
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v].as_ref().is_some_and(|best| *best < d) {
            continue;
        }
        for &(e, w) in &adj[v] {
            let nd = &d + &graph.edge(e).length;
            if dist[w].as_ref().is_none_or(|cur| nd < *cur) {
                dist[w] = Some(nd.clone());
                heap.push(Reverse((nd, w)));
            }
        }
    }
    dist.into_iter()
        .map(|d| d.expect("connected graph"))
        .collect()
}

impl DistanceField {
    fn new(graph: &MetricGraph, source: &Source) -> Result<Self> {
        let (first, source_vertices, source_edges) = match source {
            Source::Points(points) => {
                if points.is_empty() {
                    return Err(Error::EmptySource);
                }
                let r = graph.subdivide_at(points);
                let vs: Vec<usize> = points
                    .iter()
                    .map(|p| match r.map_point(p) {
                        Point::Vertex(v) => v,
                        Point::Edge { .. } => unreachable!("source points are vertices after refinement"),
                    })
                    .collect();
                let on = vec![false; r.graph().num_edges()];
                (r, vs, on)
            }
            Source::Edges(edges) => {
                if edges.is_empty() {
                    return Err(Error::EmptySource);
                }
                let r = Refinement::identity(graph);
                let mut on = vec![false; graph.num_edges()];
                let mut vs = Vec::new();
                for &e in edges {
                    on[e] = true;
                    vs.push(graph.edge(e).tail);
                    vs.push(graph.edge(e).head);
                }
                (r, vs, on)
            }
        };
        let mid = first.graph();
        let d1 = dijkstra(mid, &source_vertices);

        let mut ridges = Vec::new();
        for (i, e) in mid.edges().iter().enumerate() {
            if source_edges[i] {
                continue;
            }
            let rise = &d1[e.head] - &d1[e.tail];
            if rise == e.length || -rise.clone() == e.length {
                continue;
            }
            let offset = (&e.length + &rise) / rat(2);
            ridges.push(Point::Edge { edge: i, offset });
        }
        let second = mid.subdivide_at(&ridges);
        let fine = second.graph();

        let mut dist = d1.clone();
        let mut ridge = vec![false; fine.num_vertices()];
        for v in mid.num_vertices()..fine.num_vertices() {
            let Point::Edge { edge, offset } = second.vertex_origin(v) else {
                unreachable!("new vertices are interior points")
            };
            dist.push(&d1[mid.edge(*edge).tail] + offset);
            ridge[v] = true;
        }
        let on_source = (0..fine.num_edges())
            .map(|e| source_edges[second.edge_origin(e).0])
            .collect();
        Ok(DistanceField {
            refinement: first.then(&second),
            dist,
            on_source,
            ridge,
        })
    }

    fn to_function(&self, coarse: &MetricGraph) -> PLFunction {
        let fine = self.refinement.graph();
        let edges = (0..coarse.num_edges())
            .map(|e| {
                let pieces = self.refinement.pieces(e);
                let mut pts: Vec<(Rational, Rational)> = pieces
                    .iter()
                    .map(|(f, start)| (start.clone(), self.dist[fine.edge(*f).tail].clone()))
                    .collect();
                let (last, _) = pieces[pieces.len() - 1];
                pts.push((coarse.edge(e).length.clone(), self.dist[fine.edge(last).head].clone()));
                pts
            })
            .collect();
        PLFunction::new(coarse, edges).expect("distance functions have slopes ±1 or 0")
    }
}

/// `x ↦ dist(S, x)` as a PL function on the given model.
pub fn distance_function(graph: &MetricGraph, source: &Source) -> Result<PLFunction> {
    Ok(DistanceField::new(graph, source)?.to_function(graph))
}

/// A refined model with one direction per edge.
#[derive(Debug, Clone)]
pub struct Orientation {
    refinement: Refinement,
    /// Per refined edge: flow runs tail → head.
    forward: Vec<bool>,
    ridge: Vec<bool>,
    /// Per refined edge: part of the cycle support.
    on_cycle: Vec<bool>,
}

impl Orientation {
    /// Gradient flow of `d_S`: every edge points towards increasing distance.
    pub fn gradient(graph: &MetricGraph, sources: &[Point]) -> Result<Self> {
        let field = DistanceField::new(graph, &Source::Points(sources.to_vec()))?;
        Ok(Self::from_field(field, |_| unreachable!("no constant edges off a cycle")))
    }

    /// Circuit directions on `|γ|` plus the gradient of `d_γ` elsewhere.
    pub fn for_gamma(graph: &MetricGraph, gamma: &GammaClass) -> Result<Self> {
        if gamma.is_trivial() {
            return Err(Error::TrivialGamma);
        }
        let field = DistanceField::new(graph, &Source::Edges(gamma.support_edges()))?;
        let refinement = field.refinement.clone();
        Ok(Self::from_field(field, |fine_edge| {
            let (coarse, _) = refinement.edge_origin(fine_edge);
            gamma.direction(coarse).expect("constant edges lie on the support")
        }))
    }

    fn from_field(field: DistanceField, mut on_cycle_direction: impl FnMut(usize) -> bool) -> Self {
        let fine = field.refinement.graph();
        let forward = fine
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| {
                if field.on_source[i] {
                    on_cycle_direction(i)
                } else {
                    field.dist[e.head] > field.dist[e.tail]
                }
            })
            .collect();
        Orientation {
            forward,
            ridge: field.ridge,
            on_cycle: field.on_source,
            refinement: field.refinement,
        }
    }

    /// The refined model.
    pub fn graph(&self) -> &MetricGraph {
        self.refinement.graph()
    }

    pub fn refinement(&self) -> &Refinement {
        &self.refinement
    }

    pub fn is_forward(&self, fine_edge: usize) -> bool {
        self.forward[fine_edge]
    }

    pub fn is_ridge(&self, fine_vertex: usize) -> bool {
        self.ridge[fine_vertex]
    }

    fn source_and_target(&self, e: usize) -> (usize, usize) {
        let edge = self.graph().edge(e);
        if self.forward[e] {
            (edge.tail, edge.head)
        } else {
            (edge.head, edge.tail)
        }
    }

    /// `(val₊, val₋)` of every refined vertex.
    pub fn valences(&self) -> Vec<(usize, usize)> {
        let mut val = vec![(0, 0); self.graph().num_vertices()];
        for e in 0..self.graph().num_edges() {
            let (s, t) = self.source_and_target(e);
            val[s].0 += 1;
            val[t].1 += 1;
        }
        val
    }

    /// `Σ (val±(p) − 1) p`, expressed on the coarse model.
    pub fn divisor(&self, sign: Sign) -> Divisor {
        let fine: Divisor = self
            .valences()
            .into_iter()
            .enumerate()
            .map(|(v, (out, inc))| {
                let val = match sign {
                    Sign::Plus => out,
                    Sign::Minus => inc,
                };
                (Point::Vertex(v), val as i64 - 1)
            })
            .collect();
        self.refinement.unmap_divisor(&fine)
    }

    /// Topological sort succeeds on the edges selected by `keep`.
    fn acyclic_on(&self, keep: impl Fn(usize) -> bool) -> bool {
        let n = self.graph().num_vertices();
        let mut indeg = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in (0..self.graph().num_edges()).filter(|&e| keep(e)) {
            let (s, t) = self.source_and_target(e);
            out[s].push(t);
            indeg[t] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop_front() {
            seen += 1;
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        seen == n
    }

    pub fn is_acyclic(&self) -> bool {
        self.acyclic_on(|_| true)
    }

    /// Every directed cycle uses only cycle-support edges.
    pub fn cycles_within_support(&self) -> bool {
        self.acyclic_on(|e| !self.on_cycle[e])
    }

    /// DOT digraph of the refined model; `dir` records the flow direction.
    pub fn to_dot(&self, name: &str) -> String {
        let g = self.graph();
        let mut out = String::new();
        let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
        for (v, id) in g.vertices().iter().enumerate() {
            let shape = if self.ridge[v] { "diamond" } else { "ellipse" };
            let _ = writeln!(out, "  \"{}\" [shape={shape}];", escape(id));
        }
        for (i, e) in g.edges().iter().enumerate() {
            let dir = if self.forward[i] { "forward" } else { "back" };
            let style = if self.on_cycle[i] { ", style=bold" } else { "" };
            let _ = writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{} ({})\", dir={dir}{style}];",
                escape(&g.vertices()[e.tail]),
                escape(&g.vertices()[e.head]),
                escape(&e.id),
                e.length,
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// `K±_S` of the gradient orientation of `d_S`.
pub fn moderator(graph: &MetricGraph, sources: &[Point], sign: Sign) -> Result<Divisor> {
    Ok(Orientation::gradient(graph, sources)?.divisor(sign))
}

/// An element of `H₁(C, Z/2)` with its support and an oriented circuit decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaClass {
    bits: Vec<u8>,
    support: Vec<bool>,
    /// Edge-disjoint closed trails; `true` means traversed tail → head.
    circuits: Vec<Vec<(usize, bool)>>,
}

impl GammaClass {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn is_trivial(&self) -> bool {
        !self.support.iter().any(|&s| s)
    }

    pub fn support(&self) -> &[bool] {
        &self.support
    }

    pub fn support_edges(&self) -> Vec<usize> {
        (0..self.support.len()).filter(|&e| self.support[e]).collect()
    }

    pub fn circuits(&self) -> &[Vec<(usize, bool)>] {
        &self.circuits
    }

    /// Orientation the circuits give a support edge.
    pub fn direction(&self, edge: usize) -> Option<bool> {
        self.circuits
            .iter()
            .flatten()
            .find(|(e, _)| *e == edge)
            .map(|(_, f)| *f)
    }

    /// Same class with every circuit reversed.
    pub fn reversed(&self) -> GammaClass {
        GammaClass {
            circuits: self
                .circuits
                .iter()
                .map(|c| c.iter().rev().map(|&(e, f)| (e, !f)).collect())
                .collect(),
            ..self.clone()
        }
    }

    /// Re-decomposes the support, letting `choose` pick among candidate edges
    /// (given in id order) and circuit directions.
    pub fn redecomposed(
        &self,
        graph: &MetricGraph,
        mut choose: impl FnMut(usize) -> usize,
    ) -> GammaClass {
        GammaClass {
            circuits: decompose(graph, &self.support, &mut choose),
            ..self.clone()
        }
    }

    /// Per vertex, number of support edge ends.
    pub fn support_valence(&self, graph: &MetricGraph) -> Vec<usize> {
        let mut val = vec![0; graph.num_vertices()];
        for e in self.support_edges() {
            val[graph.edge(e).tail] += 1;
            val[graph.edge(e).head] += 1;
        }
        val
    }
}

fn decompose(
    graph: &MetricGraph,
    support: &[bool],
    choose: &mut dyn FnMut(usize) -> usize,
) -> Vec<Vec<(usize, bool)>> {
    let adj = graph.adjacency();
    let mut used = vec![false; graph.num_edges()];
    let mut circuits = Vec::new();
    loop {
        let open: Vec<usize> = (0..graph.num_edges())
            .filter(|&e| support[e] && !used[e])
            .collect();
        if open.is_empty() {
            break;
        }
        let first = open[choose(open.len())];
        let edge = graph.edge(first);
        let forward = choose(2) == 0;
        let (start, mut cur) = if forward {
            (edge.tail, edge.head)
        } else {
            (edge.head, edge.tail)
        };
        used[first] = true;
        let mut circuit = vec![(first, forward)];
        while cur != start {
            let mut candidates: Vec<usize> = adj[cur]
                .iter()
                .map(|&(e, _)| e)
                .filter(|&e| support[e] && !used[e])
                .collect();
            candidates.dedup();
            assert!(!candidates.is_empty(), "support has an odd-valent vertex");
            let e = candidates[choose(candidates.len())];
            let edge = graph.edge(e);
            let fwd = edge.tail == cur;
            used[e] = true;
            circuit.push((e, fwd));
            cur = if fwd { edge.head } else { edge.tail };
        }
        circuits.push(circuit);
    }
    circuits
}

/// Support of `Σ bitsᵢ λᵢ` mod 2 with the deterministic circuit decomposition
/// (lowest unused edge first, traversed tail → head, exits by lowest id).
pub fn gamma_support(bits: &[u8], basis: &[Cycle], graph: &MetricGraph) -> GammaClass {
    assert_eq!(bits.len(), basis.len(), "one bit per basis cycle");
    let coeffs: Vec<i64> = bits.iter().map(|&b| i64::from(b)).collect();
    let sum = Cycle::combination(basis, &coeffs, graph.num_edges());
    let support: Vec<bool> = sum.0.iter().map(|c| c.rem_euclid(2) == 1).collect();
    let class = GammaClass {
        bits: bits.to_vec(),
        circuits: decompose(graph, &support, &mut |_| 0),
        support,
    };
    debug_assert!(class.support_valence(graph).iter().all(|v| v % 2 == 0));
    class
}

/// `K±_γ` for a nontrivial class.
pub fn char_divisor(gamma: &GammaClass, graph: &MetricGraph, sign: Sign) -> Result<Divisor> {
    Ok(Orientation::for_gamma(graph, gamma)?.divisor(sign))
}

/// One theta characteristic.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicRecord {
    pub bits: Vec<u8>,
    /// `K⁻_γ`, or `K⁻_{p₀}` for `γ = 0`.
    pub divisor: Divisor,
    pub class: JacPoint,
    pub half_gamma: JacPoint,
    pub effective: bool,
}

/// Outcome of the built-in consistency checks over the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicChecks {
    /// `class_γ − class_0 = ½γ` for every row.
    pub difference_is_half_gamma: bool,
    /// `2·class_γ = μ(K)` for every row.
    pub doubles_to_canonical: bool,
    /// Exactly one row is non-effective and it is `γ = 0`.
    pub unique_non_effective: bool,
    /// Classes are pairwise distinct.
    pub injective: bool,
}

impl CharacteristicChecks {
    pub fn all(&self) -> bool {
        self.difference_is_half_gamma
            && self.doubles_to_canonical
            && self.unique_non_effective
            && self.injective
    }
}

/// All `2^g` theta characteristics, indexed by `γ ∈ {0,1}ᵍ` over the
/// Jacobian's basis.
pub fn theta_characteristics(
    jac: &Jacobian,
    kappa: &KappaClass,
) -> Result<(Vec<CharacteristicRecord>, CharacteristicChecks)> {
    let g = jac.genus();
    if g > MAX_ENUMERATION_GENUS {
        return Err(Error::GenusTooLarge {
            genus: g,
            cap: MAX_ENUMERATION_GENUS,
        });
    }
    let graph = jac.graph();
    let basis = jac.form().basis();
    let half = rat(1) / rat(2);
    let mut rows = Vec::with_capacity(1 << g);
    for mask in 0..1usize << g {
        let bits = bits_of(mask, g);
        let divisor = if mask == 0 {
            moderator(graph, std::slice::from_ref(graph.basepoint()), Sign::Minus)?
        } else {
            char_divisor(&gamma_support(&bits, basis, graph), graph, Sign::Minus)?
        };
        let class = jac.abel_jacobi(&divisor);
        let n: Vec<i64> = bits.iter().map(|&b| i64::from(b)).collect();
        let half_gamma = jac.lattice_vector(&n).scaled(&half);
        let effective = effective_class_test(jac, &class, kappa)?;
        rows.push(CharacteristicRecord {
            bits,
            divisor,
            class,
            half_gamma,
            effective,
        });
    }
    let canonical = jac.abel_jacobi(&graph.canonical_divisor());
    let base = rows[0].class.clone();
    let checks = CharacteristicChecks {
        difference_is_half_gamma: rows
            .iter()
            .all(|r| jac.equal(&(&r.class - &base), &r.half_gamma)),
        doubles_to_canonical: rows
            .iter()
            .all(|r| jac.equal(&r.class.scaled(&rat(2)), &canonical)),
        unique_non_effective: !rows[0].effective && rows[1..].iter().all(|r| r.effective),
        injective: rows.iter().enumerate().all(|(i, a)| {
            rows[i + 1..].iter().all(|b| !jac.equal(&a.class, &b.class))
        }),
    };
    Ok((rows, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::principal_divisor;
    use crate::homology::{fundamental_cycles, SpanningTree};
    use crate::samples;
    use crate::scalar::ratio;

    fn q(n: i64) -> Rational {
        rat(n)
    }

    #[test]
    fn tent_on_circle() {
        let g = samples::circle(q(2));
        let f = distance_function(&g, &Source::Points(vec![Point::Vertex(0)])).unwrap();
        assert_eq!(f.breakpoints(0), &[(q(0), q(0)), (q(1), q(1)), (q(2), q(0))]);
    }

    #[test]
    fn theta_distance_from_u() {
        let g = samples::theta_unit();
        let f = distance_function(&g, &Source::Points(vec![Point::Vertex(0)])).unwrap();
        for e in 0..3 {
            assert_eq!(f.breakpoints(e), &[(q(0), q(0)), (q(1), q(1))]);
        }
    }

    #[test]
    fn whole_circle_source_is_zero() {
        let g = samples::circle(q(2));
        let f = distance_function(&g, &Source::Edges(vec![0])).unwrap();
        assert!(principal_divisor(&f, &g).is_empty());
        assert_eq!(f.slopes(0), vec![0]);
    }

    #[test]
    fn empty_source_rejected() {
        let g = samples::circle(q(2));
        assert!(matches!(distance_function(&g, &Source::Points(vec![])), Err(Error::EmptySource)));
    }

    #[test]
    fn circle_moderators() {
        let g = samples::circle(q(2));
        let m = Point::Edge { edge: 0, offset: q(1) };
        let qv = Point::Vertex(0);
        let minus = moderator(&g, std::slice::from_ref(&qv), Sign::Minus).unwrap();
        let plus = moderator(&g, std::slice::from_ref(&qv), Sign::Plus).unwrap();
        assert_eq!(minus, Divisor::from_iter([(m.clone(), 1), (qv.clone(), -1)]));
        assert_eq!(plus, Divisor::from_iter([(m, -1), (qv, 1)]));
    }

    #[test]
    fn theta_moderator_from_u() {
        let g = samples::theta_unit();
        let minus = moderator(&g, &[Point::Vertex(0)], Sign::Minus).unwrap();
        assert_eq!(minus, Divisor::from_iter([(Point::Vertex(1), 2), (Point::Vertex(0), -1)]));
        let o = Orientation::gradient(&g, &[Point::Vertex(0)]).unwrap();
        assert!(o.is_acyclic());
    }

    #[test]
    fn interior_source_point() {
        let g = samples::theta_mixed();
        let s = Point::Edge { edge: 1, offset: ratio(1, 3) };
        let o = Orientation::gradient(&g, std::slice::from_ref(&s)).unwrap();
        assert!(o.is_acyclic());
        let minus = o.divisor(Sign::Minus);
        assert_eq!(minus.coeff(&s), -1);
        assert_eq!(minus.degree(), 1);
    }

    fn theta_e2_basis() -> Vec<Cycle> {
        let g = samples::theta_unit();
        fundamental_cycles(&g, &SpanningTree::from_edges(&g, &[1]).unwrap())
    }

    #[test]
    fn gamma_supports_on_theta() {
        let g = samples::theta_unit();
        let basis = theta_e2_basis();
        assert!(gamma_support(&[0, 0], &basis, &g).is_trivial());
        assert_eq!(gamma_support(&[1, 0], &basis, &g).support_edges(), vec![0, 1]);
        assert_eq!(gamma_support(&[1, 1], &basis, &g).support_edges(), vec![0, 2]);
    }

    #[test]
    fn theta_char_divisor_is_ridge_on_e3() {
        let g = samples::theta_unit();
        let gamma = gamma_support(&[1, 0], &theta_e2_basis(), &g);
        let minus = char_divisor(&gamma, &g, Sign::Minus).unwrap();
        assert_eq!(minus, Divisor::point(Point::Edge { edge: 2, offset: ratio(1, 2) }));
        let o = Orientation::for_gamma(&g, &gamma).unwrap();
        assert!(!o.is_acyclic());
        assert!(o.cycles_within_support());
    }

    #[test]
    fn loop_gamma_on_circle_is_empty() {
        let g = samples::circle(q(2));
        let gamma = gamma_support(&[1], &[Cycle(vec![1])], &g);
        assert!(char_divisor(&gamma, &g, Sign::Minus).unwrap().is_empty());
        let trivial = gamma_support(&[0], &[Cycle(vec![1])], &g);
        assert!(matches!(char_divisor(&trivial, &g, Sign::Minus), Err(Error::TrivialGamma)));
    }

    #[test]
    fn reversed_circuits_give_same_divisor() {
        let g = samples::k4_unit();
        let jac = Jacobian::new(&g);
        for mask in 1..8 {
            let gamma = gamma_support(&bits_of(mask, 3), jac.form().basis(), &g);
            for sign in [Sign::Plus, Sign::Minus] {
                let a = char_divisor(&gamma, &g, sign).unwrap();
                let b = char_divisor(&gamma.reversed(), &g, sign).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn dot_export_marks_ridges() {
        let g = samples::circle(q(2));
        let o = Orientation::gradient(&g, &[Point::Vertex(0)]).unwrap();
        let dot = o.to_dot("circle");
        assert!(dot.starts_with("digraph \"circle\" {"));
        assert!(dot.contains("shape=diamond"));
        assert_eq!(dot.matches("->").count(), 2);
    }
}
