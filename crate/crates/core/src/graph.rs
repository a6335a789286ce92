//! Weighted undirected graphs: shortest paths, components, weighted girth.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// An undirected edge with a positive length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

impl Edge {
    pub fn new(a: usize, b: usize, weight: f64) -> Self {
        Edge { a, b, weight }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    vertices: usize,
    edges: Vec<Edge>,
    // (neighbor, edge index)
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl WeightedGraph {
    /// Builds a graph on the vertices `0..=max id` appearing in `edges`.
    pub fn from_edges(edges: &[Edge]) -> Result<Self> {
        let vertices = edges.iter().map(|e| e.a.max(e.b) + 1).max().unwrap_or(0);
        Self::with_vertices(vertices, edges)
    }

    pub fn with_vertices(vertices: usize, edges: &[Edge]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertices];
        for (idx, e) in edges.iter().enumerate() {
            if e.a >= vertices || e.b >= vertices {
                return Err(invalid(
                    "edges",
                    format!("edge {idx} references a vertex outside 0..{vertices}"),
                ));
            }
            if e.a == e.b {
                return Err(invalid("edges", format!("edge {idx} is a self-loop")));
            }
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(invalid(
                    "edges",
                    format!("edge {idx} has nonpositive weight {}", e.weight),
                ));
            }
            adjacency[e.a].push((e.b, idx));
            adjacency[e.b].push((e.a, idx));
        }
        Ok(WeightedGraph {
            vertices,
            edges: edges.to_vec(),
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut sets = DisjointSets::new(self.vertices);
        for e in &self.edges {
            sets.union(e.a, e.b);
        }
        sets.groups()
    }

    /// Single-source shortest paths, optionally ignoring one edge.
    pub fn dijkstra(&self, source: usize, skip_edge: Option<usize>) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertices];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(State {
            cost: 0.0,
            vertex: source,
        });
        while let Some(State { cost, vertex }) = heap.pop() {
            if cost > dist[vertex] {
                continue;
            }
            for &(next, idx) in &self.adjacency[vertex] {
                if Some(idx) == skip_edge {
                    continue;
                }
                let candidate = cost + self.edges[idx].weight;
                if candidate < dist[next] {
                    dist[next] = candidate;
                    heap.push(State {
                        cost: candidate,
                        vertex: next,
                    });
                }
            }
        }
        dist
    }

    /// Row-major all-pairs shortest-path matrix.
    pub fn all_pairs(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.vertices * self.vertices);
        for s in 0..self.vertices {
            out.extend(self.dijkstra(s, None));
        }
        out
    }

    /// Weighted girth: min over edges `uv` of `w(uv) + d_{G - uv}(u, v)`.
    /// `None` for forests.
    pub fn girth(&self) -> Option<f64> {
        let mut best = f64::INFINITY;
        for (idx, e) in self.edges.iter().enumerate() {
            if e.weight >= best {
                continue;
            }
            let detour = self.dijkstra(e.a, Some(idx))[e.b];
            best = best.min(e.weight + detour);
        }
        best.is_finite().then_some(best)
    }

    /// First Betti number of the graph: |E| - |V| + c.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.components().len() - self.vertices
    }
}

#[derive(Clone, Copy)]
struct State {
    cost: f64,
    vertex: usize,
}

impl PartialEq for State {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Union-find with path halving.
#[derive(Clone, Debug)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    pub(crate) fn groups(&mut self) -> Vec<Vec<usize>> {
        let n = self.parent.len();
        let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            let r = self.find(v);
            by_root[r].push(v);
        }
        by_root.into_iter().filter(|g| !g.is_empty()).collect()
    }
}
