//! Nerves of coverings, Betti numbers over F2, systoles and the
//! bounded-adjacency width bound.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::coverings::{UrysohnCovering, UrysohnTriple};
use crate::error::{invalid, Result};
use crate::graph::WeightedGraph;
use crate::metric::{Geometry, MetricSpace, Point, EPS};

/// When two supports count as overlapping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum OverlapRule {
    /// The supports share a sample point.
    SharedSample,
    /// Some points of the supports lie within `h` of each other.
    Proximity { h: f64 },
}

/// Nerve truncated at dimension 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<(usize, usize, usize)>,
    /// Sample ids witnessing each edge, in support order.
    pub edge_witnesses: Vec<Vec<usize>>,
    pub triangle_witnesses: Vec<Vec<usize>>,
    pub rule: OverlapRule,
}

/// Nerve of a covering: one vertex per triple.
pub fn nerve(space: &MetricSpace, cov: &UrysohnCovering, rule: OverlapRule) -> SimplicialComplex {
    let n = cov.triples.len();
    let mut edges = Vec::new();
    let mut edge_witnesses = Vec::new();
    let mut triangles = Vec::new();
    let mut triangle_witnesses = Vec::new();
    match rule {
        OverlapRule::SharedSample => {
            let mut holders: HashMap<usize, Vec<usize>> = HashMap::new();
            for (t, triple) in cov.triples.iter().enumerate() {
                for &s in &triple.support {
                    let list = holders.entry(s).or_default();
                    if list.last() != Some(&t) {
                        list.push(t);
                    }
                }
            }
            let mut samples: Vec<usize> = holders.keys().copied().collect();
            samples.sort_unstable();
            let mut edge_seen: HashMap<(usize, usize), usize> = HashMap::new();
            let mut tri_seen: HashMap<(usize, usize, usize), usize> = HashMap::new();
            for s in samples {
                let list = &holders[&s];
                for a in 0..list.len() {
                    for b in (a + 1)..list.len() {
                        edge_seen.entry((list[a], list[b])).or_insert(s);
                        for c in (b + 1)..list.len() {
                            tri_seen.entry((list[a], list[b], list[c])).or_insert(s);
                        }
                    }
                }
            }
            let mut e: Vec<_> = edge_seen.into_iter().collect();
            e.sort_unstable();
            for (pair, s) in e {
                edges.push(pair);
                edge_witnesses.push(vec![s]);
            }
            let mut t: Vec<_> = tri_seen.into_iter().collect();
            t.sort_unstable();
            for (tri, s) in t {
                triangles.push(tri);
                triangle_witnesses.push(vec![s]);
            }
        }
        OverlapRule::Proximity { h } => {
            let near = |x: usize, t: &UrysohnTriple| {
                t.support
                    .iter()
                    .copied()
                    .find(|&y| space.sample_distance(x, y) <= h + EPS)
            };
            let mut adjacent = vec![vec![false; n]; n];
            for (a, row) in adjacent.iter_mut().enumerate() {
                for (b, cell) in row.iter_mut().enumerate().skip(a + 1) {
                    let hit = cov.triples[a]
                        .support
                        .iter()
                        .find_map(|&x| near(x, &cov.triples[b]).map(|y| vec![x, y]));
                    if let Some(w) = hit {
                        *cell = true;
                        edges.push((a, b));
                        edge_witnesses.push(w);
                    }
                }
            }
            for a in 0..n {
                for b in (a + 1)..n {
                    for c in (b + 1)..n {
                        if !(adjacent[a][b] && adjacent[a][c] && adjacent[b][c]) {
                            continue;
                        }
                        let hit = cov.triples[a].support.iter().find_map(|&x| {
                            let y = near(x, &cov.triples[b])?;
                            let z = near(x, &cov.triples[c])?;
                            Some(vec![x, y, z])
                        });
                        if let Some(w) = hit {
                            triangles.push((a, b, c));
                            triangle_witnesses.push(w);
                        }
                    }
                }
            }
        }
    }
    SimplicialComplex {
        vertices: n,
        edges,
        triangles,
        edge_witnesses,
        triangle_witnesses,
        rule,
    }
}

impl SimplicialComplex {
    /// Builds a complex from face lists, adding any missing edges of triangles.
    pub fn from_faces(vertices: usize, edges: &[(usize, usize)], triangles: &[(usize, usize, usize)]) -> Self {
        let norm2 = |(a, b): (usize, usize)| (a.min(b), a.max(b));
        let mut e: Vec<(usize, usize)> = edges.iter().copied().map(norm2).collect();
        let mut t: Vec<(usize, usize, usize)> = triangles
            .iter()
            .map(|&(a, b, c)| {
                let mut v = [a, b, c];
                v.sort_unstable();
                (v[0], v[1], v[2])
            })
            .collect();
        for &(a, b, c) in &t {
            e.extend([(a, b), (a, c), (b, c)]);
        }
        e.sort_unstable();
        e.dedup();
        t.sort_unstable();
        t.dedup();
        SimplicialComplex {
            vertices,
            edge_witnesses: vec![Vec::new(); e.len()],
            triangle_witnesses: vec![Vec::new(); t.len()],
            edges: e,
            triangles: t,
            rule: OverlapRule::SharedSample,
        }
    }

    /// Euler characteristic `|V| - |E| + |T|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Face-list text: `v i`, `e a b`, `t a b c`, one face per line.
    pub fn write_faces<W: Write>(&self, mut out: W) -> Result<()> {
        for v in 0..self.vertices {
            writeln!(out, "v {v}")?;
        }
        for (a, b) in &self.edges {
            writeln!(out, "e {a} {b}")?;
        }
        for (a, b, c) in &self.triangles {
            writeln!(out, "t {a} {b} {c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Betti {
    pub b0: usize,
    pub b1: usize,
    pub b2: usize,
}

/// Rank over F2 of a set of column vectors given as bitsets.
pub fn f2_rank(columns: &[Vec<u64>]) -> usize {
    let mut pivots: HashMap<usize, Vec<u64>> = HashMap::new();
    let mut rank = 0;
    for col in columns {
        let mut v = col.clone();
        while let Some(top) = highest_bit(&v) {
            match pivots.get(&top) {
                Some(p) => {
                    for (a, b) in v.iter_mut().zip(p) {
                        *a ^= b;
                    }
                }
                None => {
                    pivots.insert(top, v);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn highest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

fn column(len: usize, ones: &[usize]) -> Vec<u64> {
    let mut v = vec![0u64; len.div_ceil(64).max(1)];
    for &i in ones {
        v[i / 64] ^= 1 << (i % 64);
    }
    v
}

/// Betti numbers over F2 from the ranks of the boundary maps.
pub fn betti(cx: &SimplicialComplex) -> Betti {
    let d1: Vec<Vec<u64>> = cx.edges.iter().map(|&(a, b)| column(cx.vertices, &[a, b])).collect();
    let index: HashMap<(usize, usize), usize> = cx.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let d2: Vec<Vec<u64>> = cx
        .triangles
        .iter()
        .map(|&(a, b, c)| {
            let faces = [(a, b), (a, c), (b, c)].map(|e| index[&e]);
            column(cx.edges.len(), &faces)
        })
        .collect();
    let r1 = f2_rank(&d1);
    let r2 = f2_rank(&d2);
    Betti {
        b0: cx.vertices - r1,
        b1: cx.edges.len() - r1 - r2,
        b2: cx.triangles.len() - r2,
    }
}

/// Maximum vertex degree of the 1-skeleton.
pub fn max_adjacency(cx: &SimplicialComplex) -> usize {
    let mut degree = vec![0usize; cx.vertices];
    for &(a, b) in &cx.edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    degree.into_iter().max().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub size: usize,
    pub beta1: usize,
    pub delta0: usize,
    /// `2 β1 / Δ0`; `None` when `Δ0 = 0`.
    pub bound: Option<f64>,
    pub slack: Option<f64>,
    pub pass: bool,
    pub note: Option<String>,
}

/// Checks `N >= 2 β1 / Δ0`.
pub fn betti_bound_check(size: usize, beta1: usize, delta0: usize) -> BoundCheck {
    if delta0 == 0 {
        let pass = beta1 == 0;
        return BoundCheck {
            size,
            beta1,
            delta0,
            bound: None,
            slack: None,
            pass,
            note: Some(if pass {
                "no adjacency and no loops: vacuous".into()
            } else {
                "patches are pairwise disjoint yet the space has loops".into()
            }),
        };
    }
    let bound = 2.0 * beta1 as f64 / delta0 as f64;
    BoundCheck {
        size,
        beta1,
        delta0,
        bound: Some(bound),
        slack: Some(size as f64 - bound),
        pass: size as f64 >= bound,
        note: None,
    }
}

/// First Betti number of a graph: `|E| - |V| + c`.
pub fn graph_beta1(g: &WeightedGraph) -> usize {
    g.cycle_rank()
}

/// Length of the shortest non-contractible loop; `None` when there is none.
pub fn systole(space: &MetricSpace) -> Option<f64> {
    match space.geometry() {
        Geometry::Bouquet { length, .. } => Some(*length),
        Geometry::Graph { graph, .. } => graph.girth(),
        Geometry::WedgeSpheres { dim: 1, radius, .. } => Some(2.0 * std::f64::consts::PI * radius),
        Geometry::WedgeSpheres { .. } | Geometry::Interval => None,
        Geometry::DisjointUnion { left, right, .. } => match (systole(left), systole(right)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCheck {
    pub d0: f64,
    pub systole: Option<f64>,
    /// `sys/2 - D0`.
    pub margin: Option<f64>,
    pub pass: bool,
}

/// Passes iff `D0 < sys/2`, so every patch fits in a convex ball.
pub fn convexity_window(space: &MetricSpace, d0: f64) -> ConvexityCheck {
    let sys = systole(space);
    let margin = sys.map(|s| s / 2.0 - d0);
    ConvexityCheck {
        d0,
        systole: sys,
        margin,
        pass: margin.is_none_or(|m| m > 0.0),
    }
}

/// Covers every loop of a bouquet by `arcs` arcs centered at `i L / arcs`,
/// each reaching one sample spacing past its neighbors' centers' midpoints.
pub fn cyclic_arc_cover(space: &MetricSpace, arcs: usize) -> Result<UrysohnCovering> {
    let Geometry::Bouquet { loops, length } = space.geometry() else {
        return Err(invalid("space", "cyclic arc covers need a bouquet"));
    };
    if arcs < 3 {
        return Err(invalid("arcs", format!("need at least 3 arcs per loop, got {arcs}")));
    }
    let half = length / (2.0 * arcs as f64) + space.resolution();
    let mut triples = Vec::with_capacity(loops * arcs);
    for j in 0..*loops {
        for i in 0..arcs {
            let center = i as f64 * length / arcs as f64;
            let support: Vec<usize> = space
                .samples()
                .iter()
                .enumerate()
                .filter(|(_, p)| match p {
                    Point::Loop { index, arc } if *index == j || *arc == 0.0 => {
                        let d = (arc - center).abs();
                        d.min(length - d) <= half + EPS
                    }
                    _ => false,
                })
                .map(|(s, _)| s)
                .collect();
            triples.push(UrysohnTriple::constant(support, 1, 0));
        }
    }
    Ok(UrysohnCovering {
        triples,
        d0: 2.0 * half,
        step: space.connectivity_step(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverings::canonical_covering;
    use crate::graph::Edge;
    use crate::metric::{bouquet_space, graph_space};
    use crate::problems::bouquet_problem;

    #[test]
    fn canonical_bouquet_nerve_is_discrete() {
        let p = bouquet_problem(3, 10.0, 1.0, 0.1).unwrap();
        let cov = canonical_covering(&p, 4.0).unwrap();
        let cx = nerve(&p.space, &cov, OverlapRule::SharedSample);
        assert!(cx.edges.is_empty());
        assert_eq!(betti(&cx), Betti { b0: 3, b1: 0, b2: 0 });
        assert_eq!(max_adjacency(&cx), 0);
    }

    #[test]
    fn six_arcs_on_a_circle_form_a_hexagon() {
        let x = bouquet_space(1, 12.0, 0.5).unwrap();
        let cov = cyclic_arc_cover(&x, 6).unwrap();
        let cx = nerve(&x, &cov, OverlapRule::SharedSample);
        assert_eq!(cx.edges.len(), 6);
        assert!(cx.triangles.is_empty());
        assert_eq!(betti(&cx), Betti { b0: 1, b1: 1, b2: 0 });
        assert_eq!(max_adjacency(&cx), 2);
        let check = betti_bound_check(6, 1, 2);
        assert!(check.pass);
        assert_eq!(check.slack, Some(5.0));
    }

    #[test]
    fn three_loops_share_a_triangle_at_the_wedge_point() {
        let x = bouquet_space(3, 12.0, 0.5).unwrap();
        let cov = cyclic_arc_cover(&x, 6).unwrap();
        let cx = nerve(&x, &cov, OverlapRule::SharedSample);
        assert_eq!((cx.vertices, cx.edges.len(), cx.triangles.len()), (18, 21, 1));
        assert_eq!(betti(&cx), Betti { b0: 1, b1: 3, b2: 0 });
        assert_eq!(max_adjacency(&cx), 4);
        for (w, &(a, b, c)) in cx.triangle_witnesses.iter().zip(&cx.triangles) {
            for t in [a, b, c] {
                assert!(cov.triples[t].support.contains(&w[0]));
            }
        }
    }

    #[test]
    fn proximity_rule_matches_shared_rule_on_overlapping_arcs() {
        let x = bouquet_space(1, 12.0, 0.5).unwrap();
        let cov = cyclic_arc_cover(&x, 6).unwrap();
        let a = nerve(&x, &cov, OverlapRule::SharedSample);
        let b = nerve(&x, &cov, OverlapRule::Proximity { h: 1e-6 });
        assert_eq!(a.edges, b.edges);
        assert_eq!(a.triangles, b.triangles);
    }

    #[test]
    fn filled_triangle_and_star() {
        let tri = SimplicialComplex::from_faces(3, &[], &[(0, 1, 2)]);
        assert_eq!(betti(&tri), Betti { b0: 1, b1: 0, b2: 0 });
        let hollow = SimplicialComplex::from_faces(3, &[(0, 1), (1, 2), (0, 2)], &[]);
        assert_eq!(betti(&hollow).b1, 1);
        let star = SimplicialComplex::from_faces(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)], &[]);
        assert_eq!(max_adjacency(&star), 5);
        let dots = SimplicialComplex::from_faces(4, &[], &[]);
        assert_eq!(betti(&dots), Betti { b0: 4, b1: 0, b2: 0 });
    }

    #[test]
    fn bound_arithmetic() {
        assert!(!betti_bound_check(2, 3, 2).pass);
        assert!(betti_bound_check(18, 3, 2).pass);
        assert!(betti_bound_check(3, 0, 0).pass);
        assert!(!betti_bound_check(3, 1, 0).pass);
    }

    #[test]
    fn graph_invariants() {
        let k4: Vec<Edge> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(a, b)| Edge::new(a, b, 1.0))
            .collect();
        let g = WeightedGraph::from_edges(&k4).unwrap();
        assert_eq!(graph_beta1(&g), 3);
        let cycles: Vec<Edge> = [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 0),
            (0, 4),
            (4, 5),
            (5, 6),
            (6, 7),
            (7, 8),
            (8, 9),
            (9, 0),
        ]
        .iter()
        .map(|&(a, b)| Edge::new(a, b, 1.0))
        .collect();
        assert_eq!(systole(&graph_space(&cycles).unwrap()), Some(4.0));
        let tree = graph_space(&[Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]).unwrap();
        assert_eq!(systole(&tree), None);
    }

    #[test]
    fn systole_and_convexity() {
        let x = bouquet_space(2, 10.0, 0.5).unwrap();
        assert_eq!(systole(&x), Some(10.0));
        assert!(convexity_window(&x, 4.0).pass);
        assert!(!convexity_window(&x, 5.0).pass);
        let tri = graph_space(&[Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 0, 1.0)]).unwrap();
        assert_eq!(systole(&tri), Some(3.0));
        assert!(convexity_window(&tri, 1.0).pass);
    }

    #[test]
    fn face_list_export() {
        let tri = SimplicialComplex::from_faces(3, &[], &[(0, 1, 2)]);
        let mut buf = Vec::new();
        tri.write_faces(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3 + 3 + 1);
        assert!(text.ends_with("t 0 1 2\n"));
    }
}
