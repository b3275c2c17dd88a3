//! Metric graphs, points, divisors and refinement.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    pub length: Rational,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// A point of the curve in canonical form.
///
/// Points at offset `0` or at the full edge length are always stored as
/// [`Point::Vertex`], so equality is equality of curve points.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Vertex(usize),
    /// Strictly interior: `0 < offset < length`.
    Edge { edge: usize, offset: Rational },
}

/// One model of a compact tropical curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricGraph {
    name: Option<String>,
    vertices: Vec<String>,
    edges: Vec<Edge>,
    basepoint: Point,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

/// Where the basepoint sits, by id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointSpec {
    Vertex(String),
    Edge { edge: String, offset: Rational },
}

impl MetricGraph {
    /// Validates and builds a graph. Edges are `(id, tail, head, length)`.
    pub fn new(
        name: Option<String>,
        vertices: Vec<String>,
        edges: Vec<(String, String, String, Rational)>,
        basepoint: Option<PointSpec>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Empty);
        }
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut edge_index = HashMap::new();
        let mut built = Vec::with_capacity(edges.len());
        for (i, (id, tail, head, length)) in edges.into_iter().enumerate() {
            if edge_index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id));
            }
            if !length.is_positive() {
                return Err(Error::NonpositiveLength {
                    edge: id,
                    length: length.to_string(),
                });
            }
            let t = *vertex_index
                .get(&tail)
                .ok_or_else(|| Error::UnknownVertex(tail.clone()))?;
            let h = *vertex_index
                .get(&head)
                .ok_or_else(|| Error::UnknownVertex(head.clone()))?;
            built.push(Edge {
                id,
                tail: t,
                head: h,
                length,
            });
        }
        let mut graph = MetricGraph {
            name,
            vertices,
            edges: built,
            basepoint: Point::Vertex(0),
            vertex_index,
            edge_index,
        };
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        if let Some(spec) = basepoint {
            graph.basepoint = graph.resolve(&spec)?;
        }
        Ok(graph)
    }

    fn is_connected(&self) -> bool {
        let adj = self.adjacency();
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Per vertex, `(edge, other endpoint)` in edge order; loops listed twice.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.tail].push((i, e.head));
            adj[e.head].push((i, e.tail));
        }
        adj
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn basepoint(&self) -> &Point {
        &self.basepoint
    }

    /// Same graph with another basepoint.
    pub fn with_basepoint(&self, p: Point) -> Self {
        MetricGraph {
            basepoint: p,
            ..self.clone()
        }
    }

    pub fn vertex_by_id(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_by_id(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// First Betti number `|E| − |V| + 1`.
    pub fn genus(&self) -> usize {
        self.edges.len() + 1 - self.vertices.len()
    }

    /// Number of edge ends at a vertex; loops count twice.
    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.tail == v) + usize::from(e.head == v))
            .sum()
    }

    /// `K = Σ (val(p) − 2) p`.
    pub fn canonical_divisor(&self) -> Divisor {
        let mut k = Divisor::new();
        for v in 0..self.vertices.len() {
            k.add_point(Point::Vertex(v), self.valence(v) as i64 - 2);
        }
        k
    }

    pub fn total_length(&self) -> Rational {
        self.edges.iter().map(|e| e.length.clone()).sum()
    }

    /// Canonical point at `offset` along `edge` (tail → head).
    pub fn point_on_edge(&self, edge: usize, offset: Rational) -> Result<Point> {
        let e = &self.edges[edge];
        if offset.is_negative() || offset > e.length {
            return Err(Error::OffsetOutOfRange {
                edge: e.id.clone(),
                offset: offset.to_string(),
            });
        }
        Ok(if offset.is_zero() {
            Point::Vertex(e.tail)
        } else if offset == e.length {
            Point::Vertex(e.head)
        } else {
            Point::Edge { edge, offset }
        })
    }

    pub fn resolve(&self, spec: &PointSpec) -> Result<Point> {
        match spec {
            PointSpec::Vertex(id) => self
                .vertex_by_id(id)
                .map(Point::Vertex)
                .ok_or_else(|| Error::UnknownVertex(id.clone())),
            PointSpec::Edge { edge, offset } => {
                let e = self
                    .edge_by_id(edge)
                    .ok_or_else(|| Error::UnknownEdge(edge.clone()))?;
                self.point_on_edge(e, offset.clone())
            }
        }
    }

    /// The id-based description of a point.
    pub fn describe(&self, p: &Point) -> PointSpec {
        match p {
            Point::Vertex(v) => PointSpec::Vertex(self.vertices[*v].clone()),
            Point::Edge { edge, offset } => PointSpec::Edge {
                edge: self.edges[*edge].id.clone(),
                offset: offset.clone(),
            },
        }
    }

    pub fn point_label(&self, p: &Point) -> String {
        match p {
            Point::Vertex(v) => self.vertices[*v].clone(),
            Point::Edge { edge, offset } => format!("{}@{}", self.edges[*edge].id, offset),
        }
    }

    /// Makes every given point a vertex. Points already at vertices are
    /// ignored, so subdividing at vertices returns an identical model.
    pub fn subdivide_at<'a, I>(&self, points: I) -> Refinement
    where
        I: IntoIterator<Item = &'a Point>,
    {
        let mut cuts: Vec<BTreeSet<Rational>> = vec![BTreeSet::new(); self.edges.len()];
        for p in points {
            if let Point::Edge { edge, offset } = p {
                cuts[*edge].insert(offset.clone());
            }
        }

        let mut used_ids: HashSet<String> = self
            .vertices
            .iter()
            .chain(self.edges.iter().map(|e| &e.id))
            .cloned()
            .collect();
        let mut fresh = |base: String| {
            let mut id = base;
            while used_ids.contains(&id) {
                id.push('\'');
            }
            used_ids.insert(id.clone());
            id
        };

        let mut vertices = self.vertices.clone();
        let mut origin: Vec<Point> = (0..self.vertices.len()).map(Point::Vertex).collect();
        let mut edges = Vec::new();
        let mut edge_origin = Vec::new();
        let mut pieces = Vec::with_capacity(self.edges.len());

        for (i, e) in self.edges.iter().enumerate() {
            if cuts[i].is_empty() {
                pieces.push(vec![(edges.len(), Rational::zero())]);
                edge_origin.push((i, Rational::zero()));
                edges.push(e.clone());
                continue;
            }
            let mut stops: Vec<(usize, Rational)> = vec![(e.tail, Rational::zero())];
            for off in &cuts[i] {
                let v = vertices.len();
                vertices.push(fresh(format!("{}@{}", e.id, off)));
                origin.push(Point::Edge {
                    edge: i,
                    offset: off.clone(),
                });
                stops.push((v, off.clone()));
            }
            stops.push((e.head, e.length.clone()));
            let mut list = Vec::new();
            for (k, w) in stops.windows(2).enumerate() {
                list.push((edges.len(), w[0].1.clone()));
                edge_origin.push((i, w[0].1.clone()));
                edges.push(Edge {
                    id: fresh(format!("{}.{}", e.id, k + 1)),
                    tail: w[0].0,
                    head: w[1].0,
                    length: w[1].1.clone() - w[0].1.clone(),
                });
            }
            pieces.push(list);
        }

        let vertex_index = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let edge_index = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        let mut graph = MetricGraph {
            name: self.name.clone(),
            vertices,
            edges,
            basepoint: Point::Vertex(0),
            vertex_index,
            edge_index,
        };
        let mut refinement = Refinement {
            graph: graph.clone(),
            pieces,
            origin,
            edge_origin,
        };
        graph.basepoint = refinement.map_point(&self.basepoint);
        refinement.graph = graph;
        refinement
    }
}

/// A subdivided model together with the point correspondence to the coarse one.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    graph: MetricGraph,
    /// Per coarse edge: fine edges in order, with their start offsets.
    pieces: Vec<Vec<(usize, Rational)>>,
    /// Per fine vertex: its coarse point.
    origin: Vec<Point>,
    /// Per fine edge: coarse edge and start offset.
    edge_origin: Vec<(usize, Rational)>,
}

impl Refinement {
    pub fn identity(graph: &MetricGraph) -> Self {
        graph.subdivide_at(std::iter::empty())
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn into_graph(self) -> MetricGraph {
        self.graph
    }

    /// Fine edges covering a coarse edge, with start offsets.
    pub fn pieces(&self, coarse_edge: usize) -> &[(usize, Rational)] {
        &self.pieces[coarse_edge]
    }

    pub fn vertex_origin(&self, fine_vertex: usize) -> &Point {
        &self.origin[fine_vertex]
    }

    pub fn edge_origin(&self, fine_edge: usize) -> (usize, &Rational) {
        let (e, s) = &self.edge_origin[fine_edge];
        (*e, s)
    }

    pub fn map_point(&self, p: &Point) -> Point {
        match p {
            Point::Vertex(v) => Point::Vertex(*v),
            Point::Edge { edge, offset } => {
                let list = &self.pieces[*edge];
                let k = list.partition_point(|(_, start)| start <= offset) - 1;
                let (fine, start) = &list[k];
                if start == offset {
                    Point::Vertex(self.graph.edges[*fine].tail)
                } else {
                    Point::Edge {
                        edge: *fine,
                        offset: offset.clone() - start.clone(),
                    }
                }
            }
        }
    }

    pub fn unmap_point(&self, p: &Point) -> Point {
        match p {
            Point::Vertex(v) => self.origin[*v].clone(),
            Point::Edge { edge, offset } => {
                let (coarse, start) = &self.edge_origin[*edge];
                Point::Edge {
                    edge: *coarse,
                    offset: start.clone() + offset.clone(),
                }
            }
        }
    }

    pub fn map_divisor(&self, d: &Divisor) -> Divisor {
        d.iter()
            .map(|(p, c)| (self.map_point(p), c))
            .collect()
    }

    pub fn unmap_divisor(&self, d: &Divisor) -> Divisor {
        d.iter()
            .map(|(p, c)| (self.unmap_point(p), c))
            .collect()
    }

    /// Edge-coefficient vector on the fine model (each piece inherits its edge's value).
    pub fn map_edge_vector<T: Clone>(&self, v: &[T]) -> Vec<T> {
        self.edge_origin
            .iter()
            .map(|(coarse, _)| v[*coarse].clone())
            .collect()
    }

    /// Refinement of the coarse model equal to `self` followed by `next`.
    pub fn then(&self, next: &Refinement) -> Refinement {
        let origin = next
            .origin
            .iter()
            .map(|p| self.unmap_point(p))
            .collect();
        let edge_origin = next
            .edge_origin
            .iter()
            .map(|(mid, s2)| {
                let (coarse, s1) = &self.edge_origin[*mid];
                (*coarse, s1.clone() + s2.clone())
            })
            .collect();
        let pieces = self
            .pieces
            .iter()
            .map(|list| {
                list.iter()
                    .flat_map(|(mid, s1)| {
                        next.pieces[*mid]
                            .iter()
                            .map(move |(fine, s2)| (*fine, s1.clone() + s2.clone()))
                    })
                    .collect()
            })
            .collect();
        Refinement {
            graph: next.graph.clone(),
            pieces,
            origin,
            edge_origin,
        }
    }
}

/// Finite formal sum of points with integer coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Divisor(BTreeMap<Point, i64>);

impl Divisor {
    pub fn new() -> Self {
        Divisor(BTreeMap::new())
    }

    pub fn point(p: Point) -> Self {
        let mut d = Divisor::new();
        d.add_point(p, 1);
        d
    }

    pub fn add_point(&mut self, p: Point, c: i64) {
        if c == 0 {
            return;
        }
        match self.0.entry(p) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if *slot.get() == 0 {
                    slot.remove();
                }
            }
        }
    }

    pub fn coeff(&self, p: &Point) -> i64 {
        self.0.get(p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.0.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.0.values().all(|&c| c >= 0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, i64)> + '_ {
        self.0.iter().map(|(p, c)| (p, *c))
    }

    pub fn support(&self) -> impl Iterator<Item = &Point> + '_ {
        self.0.keys()
    }

    pub fn scaled(&self, k: i64) -> Divisor {
        self.iter().map(|(p, c)| (p.clone(), c * k)).collect()
    }

    pub fn display<'a>(&'a self, graph: &'a MetricGraph) -> DivisorDisplay<'a> {
        DivisorDisplay { divisor: self, graph }
    }
}

impl<P: Into<Point>> FromIterator<(P, i64)> for Divisor {
    fn from_iter<I: IntoIterator<Item = (P, i64)>>(iter: I) -> Self {
        let mut d = Divisor::new();
        for (p, c) in iter {
            d.add_point(p.into(), c);
        }
        d
    }
}

impl<'a> From<&'a Point> for Point {
    fn from(p: &'a Point) -> Point {
        p.clone()
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, rhs: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, c) in rhs.iter() {
            out.add_point(p.clone(), c);
        }
        out
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, rhs: &Divisor) -> Divisor {
        let mut out = self.clone();
        for (p, c) in rhs.iter() {
            out.add_point(p.clone(), -c);
        }
        out
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        self.scaled(-1)
    }
}

pub struct DivisorDisplay<'a> {
    divisor: &'a Divisor,
    graph: &'a MetricGraph,
}

impl fmt::Display for DivisorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.divisor.is_empty() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.divisor.iter().enumerate() {
            let label = self.graph.point_label(p);
            match (i, c) {
                (0, 1) => write!(f, "{label}")?,
                (0, -1) => write!(f, "-{label}")?,
                (0, _) => write!(f, "{c}{label}")?,
                (_, 1) => write!(f, " + {label}")?,
                (_, -1) => write!(f, " - {label}")?,
                (_, c) if c < 0 => write!(f, " - {}{label}", -c)?,
                (_, c) => write!(f, " + {c}{label}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use crate::scalar::{rat, ratio};

    #[test]
    fn genus_of_samples() {
        assert_eq!(samples::circle(rat(2)).genus(), 1);
        assert_eq!(samples::theta_unit().genus(), 2);
        assert_eq!(samples::k4_unit().genus(), 3);
        assert_eq!(samples::path(3).genus(), 0);
    }

    #[test]
    fn canonical_divisor_of_samples() {
        assert!(samples::circle(rat(2)).canonical_divisor().is_empty());
        let theta = samples::theta_unit();
        let k = theta.canonical_divisor();
        assert_eq!(k, Divisor::from_iter([(Point::Vertex(0), 1), (Point::Vertex(1), 1)]));
        let k4 = samples::k4_unit().canonical_divisor();
        assert_eq!(k4.degree(), 4);
        assert!(k4.iter().all(|(_, c)| c == 1));
        assert_eq!(k4.len(), 4);
    }

    #[test]
    fn validation_errors() {
        let e = MetricGraph::new(
            None,
            vec!["u".into(), "v".into()],
            vec![("e".into(), "u".into(), "v".into(), rat(0))],
            None,
        );
        assert!(matches!(e, Err(Error::NonpositiveLength { .. })));
        let e = MetricGraph::new(
            None,
            vec!["u".into(), "v".into()],
            vec![],
            None,
        );
        assert!(matches!(e, Err(Error::Disconnected)));
        let e = MetricGraph::new(None, vec!["u".into(), "u".into()], vec![], None);
        assert!(matches!(e, Err(Error::DuplicateId(_))));
        let e = MetricGraph::new(
            None,
            vec!["u".into()],
            vec![
                ("e".into(), "u".into(), "u".into(), rat(1)),
                ("e".into(), "u".into(), "u".into(), rat(1)),
            ],
            None,
        );
        assert!(matches!(e, Err(Error::DuplicateId(_))));
    }

    #[test]
    fn endpoint_offsets_canonicalize() {
        let g = samples::theta_unit();
        assert_eq!(g.point_on_edge(0, rat(0)).unwrap(), Point::Vertex(0));
        assert_eq!(g.point_on_edge(2, rat(1)).unwrap(), Point::Vertex(1));
        assert!(g.point_on_edge(0, rat(2)).is_err());
        let a: Divisor = [(g.point_on_edge(0, rat(1)).unwrap(), 2)].into_iter().collect();
        let b: Divisor = [(g.point_on_edge(1, rat(1)).unwrap(), 1), (Point::Vertex(1), 1)]
            .into_iter()
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn subdivide_circle() {
        let g = samples::circle(rat(2));
        let r = g.subdivide_at([&Point::Edge { edge: 0, offset: rat(1) }]);
        let fine = r.graph();
        assert_eq!(fine.num_vertices(), 2);
        assert_eq!(fine.num_edges(), 2);
        assert!(fine.edges().iter().all(|e| e.length == rat(1)));
        assert_eq!(fine.genus(), 1);
        assert_eq!(
            r.unmap_point(&Point::Vertex(1)),
            Point::Edge { edge: 0, offset: rat(1) }
        );
    }

    #[test]
    fn subdivide_at_vertex_is_identity() {
        let g = samples::theta_unit();
        let r = g.subdivide_at([&Point::Vertex(1)]);
        assert_eq!(r.graph(), &g);
    }

    #[test]
    fn subdivide_theta_keeps_invariants() {
        let g = samples::theta_unit();
        let r = g.subdivide_at([&Point::Edge { edge: 0, offset: ratio(1, 2) }]);
        assert_eq!(r.graph().genus(), 2);
        assert_eq!(r.unmap_divisor(&r.graph().canonical_divisor()), g.canonical_divisor());
    }

    #[test]
    fn nested_refinement_composes() {
        let g = samples::circle(rat(3));
        let r1 = g.subdivide_at([&Point::Edge { edge: 0, offset: rat(1) }]);
        let p = Point::Edge { edge: 1, offset: ratio(1, 2) };
        let r2 = r1.graph().subdivide_at([&p]);
        let both = r1.then(&r2);
        let q = Point::Edge { edge: 0, offset: ratio(3, 2) };
        assert_eq!(both.map_point(&q), Point::Vertex(2));
        assert_eq!(both.unmap_point(&Point::Vertex(2)), q);
        let mid = Point::Edge { edge: 0, offset: ratio(5, 2) };
        assert_eq!(both.unmap_point(&both.map_point(&mid)), mid);
    }

    #[test]
    fn divisor_arithmetic_drops_zeros() {
        let a = Divisor::from_iter([(Point::Vertex(0), 2), (Point::Vertex(1), -1)]);
        let b = Divisor::from_iter([(Point::Vertex(0), 2)]);
        let d = &a - &b;
        assert_eq!(d, Divisor::from_iter([(Point::Vertex(1), -1)]));
        assert_eq!((&d + &(-&d)).len(), 0);
        assert_eq!(a.degree(), 1);
    }
}
