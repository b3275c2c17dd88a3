//! Independent effectiveness oracle: scale the curve to integer lengths,
//! subdivide into unit segments and run classical chip-firing reduction
//! (Dhar's burning algorithm) on the resulting multigraph.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::curve::{Divisor, MetricGraph, Point};
use crate::error::{Error, Result};
use crate::Rational;

/// Largest unit model the oracle will build, in unit segments.
pub const MAX_UNIT_SEGMENTS: usize = 1_000_000;

/// Unit-length subdivision of a metric graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitModel {
    scale: BigInt,
    /// Per node, neighbours with edge multiplicities; loops dropped.
    adjacency: Vec<Vec<(usize, i64)>>,
    /// Per coarse edge, nodes from tail to head.
    edge_nodes: Vec<Vec<usize>>,
    points: Vec<Point>,
    segments: usize,
}

impl UnitModel {
    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_segments(&self) -> usize {
        self.segments
    }

    pub fn neighbours(&self, v: usize) -> &[(usize, i64)] {
        &self.adjacency[v]
    }

    /// Number of non-loop edge ends at a node.
    pub fn degree(&self, v: usize) -> i64 {
        self.adjacency[v].iter().map(|(_, m)| m).sum()
    }

    /// Metric point of a node.
    pub fn point_of(&self, node: usize) -> &Point {
        &self.points[node]
    }

    /// Node at a grid point, `None` off the grid.
    pub fn node_of(&self, p: &Point) -> Option<usize> {
        match p {
            Point::Vertex(v) => Some(*v),
            Point::Edge { edge, offset } => {
                let k = offset * Rational::from_integer(self.scale.clone());
                if !k.is_integer() {
                    return None;
                }
                self.edge_nodes[*edge].get(k.to_integer().to_usize()?).copied()
            }
        }
    }

    /// Vertex-supported divisor as a metric divisor.
    pub fn to_divisor(&self, chips: &[i64]) -> Divisor {
        chips
            .iter()
            .enumerate()
            .map(|(v, &c)| (self.points[v].clone(), c))
            .collect()
    }

    pub fn degree_of(chips: &[i64]) -> i64 {
        chips.iter().sum()
    }

    /// Fires every node of `set` `times` times: each sends one chip per edge leaving the set.
    pub fn fire_set(&self, chips: &mut [i64], set: &[bool], times: i64) {
        for v in 0..self.num_nodes() {
            if !set[v] {
                continue;
            }
            for &(w, m) in &self.adjacency[v] {
                if !set[w] {
                    chips[v] -= times * m;
                    chips[w] += times * m;
                }
            }
        }
    }

    /// Edges from `v` to nodes outside `set`.
    fn out_degree(&self, v: usize, set: &[bool]) -> i64 {
        self.adjacency[v]
            .iter()
            .filter(|(w, _)| !set[*w])
            .map(|(_, m)| m)
            .sum()
    }
}

/// Least common multiple of the denominators of all lengths and offsets.
fn common_scale(graph: &MetricGraph, points: &[&Point]) -> BigInt {
    let mut scale = BigInt::one();
    let mut absorb = |q: &Rational| scale = scale.lcm(q.denom());
    for e in graph.edges() {
        absorb(&e.length);
    }
    for p in points {
        if let Point::Edge { offset, .. } = p {
            absorb(offset);
        }
    }
    scale
}

/// Builds the unit model for `graph`, placing `divisor` and the extra points on nodes.
pub fn to_unit_model(
    graph: &MetricGraph,
    divisor: &Divisor,
    extra: &[Point],
) -> Result<(UnitModel, Vec<i64>)> {
    let points: Vec<&Point> = divisor.support().chain(extra).collect();
    let scale = common_scale(graph, &points);
    let scale_q = Rational::from_integer(scale.clone());
    let lengths: Vec<BigInt> = graph
        .edges()
        .iter()
        .map(|e| (&e.length * &scale_q).to_integer())
        .collect();
    let required: BigInt = lengths.iter().sum();
    let segments = required
        .to_usize()
        .filter(|&s| s <= MAX_UNIT_SEGMENTS)
        .ok_or_else(|| Error::UnitModelTooLarge {
            required: required.to_string(),
            scale: scale.to_string(),
            cap: MAX_UNIT_SEGMENTS,
        })?;

    let mut node_points: Vec<Point> = (0..graph.num_vertices()).map(Point::Vertex).collect();
    let mut links: BTreeMap<(usize, usize), i64> = BTreeMap::new();
    let mut edge_nodes = Vec::with_capacity(graph.num_edges());
    for (i, (e, k)) in graph.edges().iter().zip(&lengths).enumerate() {
        let k = k.to_usize().expect("bounded by the segment cap");
        let mut chain = vec![e.tail];
        for j in 1..k {
            chain.push(node_points.len());
            node_points.push(Point::Edge {
                edge: i,
                offset: Rational::new(BigInt::from(j), scale.clone()),
            });
        }
        chain.push(e.head);
        for w in chain.windows(2) {
            if w[0] != w[1] {
                *links.entry((w[0].min(w[1]), w[0].max(w[1]))).or_insert(0) += 1;
            }
        }
        edge_nodes.push(chain);
    }
    let mut adjacency = vec![Vec::new(); node_points.len()];
    for ((a, b), m) in links {
        adjacency[a].push((b, m));
        adjacency[b].push((a, m));
    }
    let model = UnitModel {
        scale,
        adjacency,
        edge_nodes,
        points: node_points,
        segments,
    };
    let mut chips = vec![0; model.num_nodes()];
    for (p, c) in divisor.iter() {
        chips[model.node_of(p).expect("support lies on the grid")] += c;
    }
    Ok((model, chips))
}

/// Hop distance from `q`.
fn layers(model: &UnitModel, q: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; model.num_nodes()];
    dist[q] = 0;
    let mut queue = VecDeque::from([q]);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in model.neighbours(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Nodes that do not burn when a fire starts at `q`; empty when everything burns.
fn unburnt(model: &UnitModel, chips: &[i64], q: usize) -> Vec<bool> {
    let n = model.num_nodes();
    let mut burnt = vec![false; n];
    let mut exposure = vec![0i64; n];
    burnt[q] = true;
    let mut queue = VecDeque::from([q]);
    while let Some(u) = queue.pop_front() {
        for &(w, m) in model.neighbours(u) {
            if burnt[w] {
                continue;
            }
            exposure[w] += m;
            if exposure[w] > chips[w] {
                burnt[w] = true;
                queue.push_back(w);
            }
        }
    }
    burnt.into_iter().map(|b| !b).collect()
}

/// The `q`-reduced divisor linearly equivalent to `chips`.
pub fn dhar_reduce(model: &UnitModel, chips: &[i64], q: usize) -> Vec<i64> {
    let mut d = chips.to_vec();
    let dist = layers(model, q);
    let depth = dist.iter().copied().max().unwrap_or(0);

    // Make every node other than q nonnegative, deepest layer first. Firing
    // the ball of radius j − 1 feeds layer j and leaves deeper layers alone.
    for j in (1..=depth).rev() {
        let ball: Vec<bool> = dist.iter().map(|&r| r < j).collect();
        let outside: Vec<bool> = ball.iter().map(|b| !b).collect();
        let times = (0..model.num_nodes())
            .filter(|&v| dist[v] == j && d[v] < 0)
            .map(|v| Integer::div_ceil(&-d[v], &model.out_degree(v, &outside)))
            .max()
            .unwrap_or(0);
        if times > 0 {
            model.fire_set(&mut d, &ball, times);
        }
    }

    loop {
        let set = unburnt(model, &d, q);
        if !set.iter().any(|&s| s) {
            return d;
        }
        let times = (0..model.num_nodes())
            .filter(|&v| set[v])
            .filter_map(|v| {
                let out = model.out_degree(v, &set);
                (out > 0).then(|| d[v] / out)
            })
            .min()
            .expect("an unburnt set has a boundary edge");
        debug_assert!(times >= 1);
        model.fire_set(&mut d, &set, times);
    }
}

/// Dhar's criterion by exhaustion over subsets avoiding `q` (small models only).
pub fn is_reduced_exhaustive(model: &UnitModel, chips: &[i64], q: usize) -> bool {
    let n = model.num_nodes();
    assert!(n <= 20, "exhaustive check is exponential");
    let others: Vec<usize> = (0..n).filter(|&v| v != q).collect();
    if others.iter().any(|&v| chips[v] < 0) {
        return false;
    }
    (1u32..1 << others.len()).all(|mask| {
        let mut set = vec![false; n];
        for (i, &v) in others.iter().enumerate() {
            set[v] = mask >> i & 1 == 1;
        }
        others
            .iter()
            .any(|&v| set[v] && chips[v] < model.out_degree(v, &set))
    })
}

/// Effectiveness of the class of `D` via the `q`-reduced representative.
pub fn is_effective_oracle(graph: &MetricGraph, d: &Divisor, q: &Point) -> Result<bool> {
    if d.degree() < 0 {
        return Ok(false);
    }
    let (model, chips) = to_unit_model(graph, d, std::slice::from_ref(q))?;
    let base = model.node_of(q).expect("q lies on the grid");
    Ok(dhar_reduce(&model, &chips, base)[base] >= 0)
}
