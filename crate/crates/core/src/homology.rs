//! Cycle space, spanning trees and the length pairing on cycles.

use std::collections::VecDeque;

use crate::curve::{MetricGraph, Point};
use crate::error::{Error, Result};
use crate::linalg::{Ldl, Matrix};
use crate::scalar::rat;
use crate::Rational;

/// Integer 1-chain in edge coordinates (sign relative to tail → head).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle(pub Vec<i64>);

impl Cycle {
    pub fn coefficients(&self) -> &[i64] {
        &self.0
    }

    pub fn is_simple(&self) -> bool {
        self.0.iter().all(|c| c.abs() <= 1)
    }

    pub fn is_closed(&self, graph: &MetricGraph) -> bool {
        boundary(graph, &self.0).iter().all(|&b| b == 0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, c)| **c != 0).map(|(i, _)| i)
    }

    /// `Σ kᵢ · cyclesᵢ`.
    pub fn combination(cycles: &[Cycle], coeffs: &[i64], num_edges: usize) -> Cycle {
        let mut out = vec![0; num_edges];
        for (c, &k) in cycles.iter().zip(coeffs) {
            for (o, x) in out.iter_mut().zip(&c.0) {
                *o += k * x;
            }
        }
        Cycle(out)
    }

    pub fn as_rational(&self) -> Vec<Rational> {
        self.0.iter().map(|&c| rat(c)).collect()
    }
}

/// Signed boundary `Σ c(e)·(head − tail)` per vertex.
pub fn boundary(graph: &MetricGraph, chain: &[i64]) -> Vec<i64> {
    let mut b = vec![0; graph.num_vertices()];
    for (e, &c) in graph.edges().iter().zip(chain) {
        b[e.head] += c;
        b[e.tail] -= c;
    }
    b
}

/// A rooted spanning tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    root: usize,
    in_tree: Vec<bool>,
    /// Vertices in discovery order.
    order: Vec<usize>,
    /// Edge leading to each vertex from its parent.
    parent_edge: Vec<Option<usize>>,
}

/// The vertex a basepoint hangs from: itself, or its edge's tail.
pub fn root_vertex(graph: &MetricGraph) -> usize {
    match graph.basepoint() {
        Point::Vertex(v) => *v,
        Point::Edge { edge, .. } => graph.edge(*edge).tail,
    }
}

impl SpanningTree {
    /// Breadth-first tree from the basepoint's vertex, scanning edges in file order.
    pub fn bfs(graph: &MetricGraph) -> Self {
        Self::search(graph, root_vertex(graph), |_| true)
    }

    /// Tree consisting of exactly the given edges.
    pub fn from_edges(graph: &MetricGraph, edges: &[usize]) -> Result<Self> {
        let mut allowed = vec![false; graph.num_edges()];
        for &e in edges {
            allowed[e] = true;
        }
        if edges.len() + 1 != graph.num_vertices() {
            return Err(Error::NotASpanningTree);
        }
        let tree = Self::search(graph, root_vertex(graph), |e| allowed[e]);
        if tree.order.len() != graph.num_vertices() {
            return Err(Error::NotASpanningTree);
        }
        Ok(tree)
    }

    fn search(graph: &MetricGraph, root: usize, allowed: impl Fn(usize) -> bool) -> Self {
        let adj = graph.adjacency();
        let mut in_tree = vec![false; graph.num_edges()];
        let mut parent_edge = vec![None; graph.num_vertices()];
        let mut seen = vec![false; graph.num_vertices()];
        let mut order = vec![root];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adj[v] {
                if !seen[w] && allowed(e) {
                    seen[w] = true;
                    in_tree[e] = true;
                    parent_edge[w] = Some(e);
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        SpanningTree {
            root,
            in_tree,
            order,
            parent_edge,
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.in_tree[edge]
    }

    pub fn edges(&self) -> Vec<usize> {
        (0..self.in_tree.len()).filter(|&e| self.in_tree[e]).collect()
    }

    /// Vertices in an order where every parent precedes its children.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn parent_edge(&self, v: usize) -> Option<usize> {
        self.parent_edge[v]
    }

    /// Tree path from the root to `v` as an edge chain.
    pub fn path_from_root(&self, graph: &MetricGraph, v: usize) -> Vec<i64> {
        let mut chain = vec![0; graph.num_edges()];
        let mut cur = v;
        while let Some(e) = self.parent_edge[cur] {
            let edge = graph.edge(e);
            if edge.head == cur {
                chain[e] += 1;
                cur = edge.tail;
            } else {
                chain[e] -= 1;
                cur = edge.head;
            }
        }
        chain
    }
}

/// Fundamental cycles of `tree`, one per non-tree edge in file order. Each
/// runs along its edge tail → head and returns through the tree.
pub fn fundamental_cycles(graph: &MetricGraph, tree: &SpanningTree) -> Vec<Cycle> {
    graph
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| !tree.contains(*i))
        .map(|(i, e)| {
            let to_tail = tree.path_from_root(graph, e.tail);
            let to_head = tree.path_from_root(graph, e.head);
            let mut c: Vec<i64> = to_tail.iter().zip(&to_head).map(|(a, b)| a - b).collect();
            c[i] += 1;
            Cycle(c)
        })
        .collect()
}

/// The default basis: fundamental cycles of the BFS tree.
pub fn cycle_basis(graph: &MetricGraph) -> Vec<Cycle> {
    fundamental_cycles(graph, &SpanningTree::bfs(graph))
}

/// `Σ_e a(e)·b(e)·ℓ_e`.
pub fn q_pair(a: &[Rational], b: &[Rational], graph: &MetricGraph) -> Rational {
    assert_eq!(a.len(), graph.num_edges());
    assert_eq!(b.len(), graph.num_edges());
    graph
        .edges()
        .iter()
        .zip(a.iter().zip(b))
        .map(|(e, (x, y))| x * y * &e.length)
        .sum()
}

fn q_pair_int(a: &[i64], b: &[i64], graph: &MetricGraph) -> Rational {
    graph
        .edges()
        .iter()
        .zip(a.iter().zip(b))
        .filter(|(_, (x, y))| **x != 0 && **y != 0)
        .map(|(e, (x, y))| rat(x * y) * &e.length)
        .sum()
}

/// Basis cycles and their Gram matrix under the length pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct GramForm {
    basis: Vec<Cycle>,
    gram: Matrix<Rational>,
}

impl GramForm {
    pub fn basis(&self) -> &[Cycle] {
        &self.basis
    }

    pub fn gram(&self) -> &Matrix<Rational> {
        &self.gram
    }

    pub fn genus(&self) -> usize {
        self.basis.len()
    }

    pub fn ldl(&self) -> Ldl<Rational> {
        self.gram.ldl().expect("Gram matrix of a cycle basis is nondegenerate")
    }

    /// Exact positive-definiteness check through LDLᵀ pivots.
    pub fn is_positive_definite(&self) -> bool {
        self.gram.ldl().is_some_and(|f| f.is_positive_definite())
    }
}

/// `Gᵢⱼ = Σ_e λᵢ(e) λⱼ(e) ℓ_e`.
pub fn gram_matrix(basis: &[Cycle], graph: &MetricGraph) -> GramForm {
    let g = basis.len();
    let mut gram = Matrix::zeros(g, g);
    for i in 0..g {
        for j in 0..=i {
            let v = q_pair_int(&basis[i].0, &basis[j].0, graph);
            gram[(i, j)] = v.clone();
            gram[(j, i)] = v;
        }
    }
    GramForm {
        basis: basis.to_vec(),
        gram,
    }
}
