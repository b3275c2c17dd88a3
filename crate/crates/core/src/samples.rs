//! Small reference curves and a seeded random curve generator.

use rand::Rng;

use crate::curve::{MetricGraph, Point, Refinement};
use crate::scalar::{rat, ratio};
use crate::Rational;

fn build(name: &str, vertices: &[&str], edges: Vec<(&str, &str, &str, Rational)>) -> MetricGraph {
    MetricGraph::new(
        Some(name.to_string()),
        vertices.iter().map(|v| v.to_string()).collect(),
        edges
            .into_iter()
            .map(|(id, t, h, l)| (id.to_string(), t.to_string(), h.to_string(), l))
            .collect(),
        None,
    )
    .expect("sample curve is valid")
}

/// One vertex `q` with a loop of the given length.
pub fn circle(length: Rational) -> MetricGraph {
    build("circle", &["q"], vec![("e1", "q", "q", length)])
}

/// Two vertices `u`, `v` joined by three parallel edges `u → v`.
pub fn theta(lengths: [Rational; 3]) -> MetricGraph {
    let [a, b, c] = lengths;
    build(
        "theta",
        &["u", "v"],
        vec![("e1", "u", "v", a), ("e2", "u", "v", b), ("e3", "u", "v", c)],
    )
}

pub fn theta_unit() -> MetricGraph {
    theta([rat(1), rat(1), rat(1)])
}

/// Theta graph with edge lengths 1, 3/2, 5/3.
pub fn theta_mixed() -> MetricGraph {
    theta([rat(1), ratio(3, 2), ratio(5, 3)])
}

/// Two unit loops joined by a unit bridge.
pub fn dumbbell_unit() -> MetricGraph {
    build(
        "dumbbell",
        &["a", "b"],
        vec![
            ("l1", "a", "a", rat(1)),
            ("bridge", "a", "b", rat(1)),
            ("l2", "b", "b", rat(1)),
        ],
    )
}

/// Complete graph on four vertices, unit lengths.
pub fn k4_unit() -> MetricGraph {
    build(
        "K4",
        &["v1", "v2", "v3", "v4"],
        vec![
            ("e12", "v1", "v2", rat(1)),
            ("e13", "v1", "v3", rat(1)),
            ("e14", "v1", "v4", rat(1)),
            ("e23", "v2", "v3", rat(1)),
            ("e24", "v2", "v4", rat(1)),
            ("e34", "v3", "v4", rat(1)),
        ],
    )
}

/// A path with `n` unit edges (genus 0).
pub fn path(n: usize) -> MetricGraph {
    let names: Vec<String> = (0..=n).map(|i| format!("p{i}")).collect();
    MetricGraph::new(
        Some("path".into()),
        names.clone(),
        (0..n)
            .map(|i| (format!("s{}", i + 1), names[i].clone(), names[i + 1].clone(), rat(1)))
            .collect(),
        None,
    )
    .unwrap()
}

/// Random connected multigraph with `genus ≤ max_genus` (at least 1 when
/// `max_genus ≥ 1`) and lengths `k/d`, `d ≤ max_den`, `k ≤ 2d`.
///
/// Loops and parallel edges occur; orientations are random.
pub fn random_curve<R: Rng>(rng: &mut R, max_genus: usize, max_den: i64) -> MetricGraph {
    let n = rng.gen_range(1..=4usize);
    let genus = if max_genus == 0 {
        0
    } else {
        rng.gen_range(1..=max_genus)
    };
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let length = |rng: &mut R| {
        let d = rng.gen_range(1..=max_den);
        ratio(rng.gen_range(1..=2 * d), d)
    };
    let mut edges = Vec::new();
    let push = |rng: &mut R, a: usize, b: usize, edges: &mut Vec<(String, String, String, Rational)>| {
        let (t, h) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        let l = length(rng);
        edges.push((format!("e{}", edges.len() + 1), names[t].clone(), names[h].clone(), l));
    };
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        push(rng, parent, v, &mut edges);
    }
    for _ in 0..genus {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        push(rng, a, b, &mut edges);
    }
    // shuffle file order so the BFS tree is not always the generating tree
    for i in (1..edges.len()).rev() {
        let j = rng.gen_range(0..=i);
        edges.swap(i, j);
    }
    for (i, e) in edges.iter_mut().enumerate() {
        e.0 = format!("e{}", i + 1);
    }
    MetricGraph::new(Some("random".into()), names, edges, None).unwrap()
}

/// The five fixed curves used throughout the test suites.
pub fn reference_curves() -> Vec<(&'static str, MetricGraph)> {
    vec![
        ("circle2", circle(rat(2))),
        ("theta_unit", theta_unit()),
        ("theta_mixed", theta_mixed()),
        ("dumbbell_unit", dumbbell_unit()),
        ("k4_unit", k4_unit()),
    ]
}

/// Random rational `k/d` with `d ≤ max_den` and `|k/d| ≤ bound`.
pub fn random_rational<R: Rng>(rng: &mut R, bound: i64, max_den: i64) -> Rational {
    let d = rng.gen_range(1..=max_den);
    ratio(rng.gen_range(-bound * d..=bound * d), d)
}

/// Random point: a vertex, or an edge point at a rational fraction of the edge.
pub fn random_point<R: Rng>(rng: &mut R, graph: &MetricGraph, max_den: i64) -> Point {
    if rng.gen_bool(0.25) {
        return Point::Vertex(rng.gen_range(0..graph.num_vertices()));
    }
    let e = rng.gen_range(0..graph.num_edges());
    let d = rng.gen_range(2..=max_den.max(2));
    let t = ratio(rng.gen_range(1..d), d);
    graph
        .point_on_edge(e, t * graph.edge(e).length.clone())
        .expect("offset lies inside the edge")
}

/// Between 1 and `max` distinct random points.
pub fn random_points<R: Rng>(rng: &mut R, graph: &MetricGraph, max: usize, max_den: i64) -> Vec<Point> {
    let k = rng.gen_range(1..=max);
    let mut pts: Vec<Point> = (0..k).map(|_| random_point(rng, graph, max_den)).collect();
    pts.sort();
    pts.dedup();
    pts
}

/// Random Jacobian coordinates in `[−bound, bound]ᵍ`.
pub fn random_coords<R: Rng>(rng: &mut R, g: usize, bound: i64, max_den: i64) -> Vec<Rational> {
    (0..g).map(|_| random_rational(rng, bound, max_den)).collect()
}

/// Subdivision at up to `max_points` random interior points.
pub fn random_subdivision<R: Rng>(rng: &mut R, graph: &MetricGraph, max_points: usize) -> Refinement {
    let pts = random_points(rng, graph, max_points, 6);
    graph.subdivide_at(&pts)
}
