//! Geodesic metric spaces used by the width laboratory.
//!
//! Bouquets, wedges of spheres and intervals carry closed-form distances, so
//! the sampling resolution only decides which points are listed in the sample
//! set and never perturbs a distance. Graph spaces use all-pairs shortest
//! paths. Disjoint unions route cross-component distances through one anchor
//! point per side.

use std::f64::consts::PI;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::{DisjointSets, Edge, WeightedGraph};

/// Slack used for closed-ball membership and diameter bounds.
pub const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// A point of one of the supported spaces.
///
/// The wedge point of a bouquet is `Loop { index: 0, arc: 0.0 }`; any loop
/// index with `arc == 0` names the same point. Likewise the wedge point of a
/// wedge of spheres is any sphere's `e0` direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Point {
    Loop { index: usize, arc: f64 },
    Sphere { index: usize, dir: Vec<f64> },
    Interval { t: f64 },
    Vertex { id: usize },
    Union { side: Side, inner: Box<Point> },
}

impl Point {
    pub fn on_loop(index: usize, arc: f64) -> Point {
        Point::Loop { index, arc }
    }

    pub fn at(t: f64) -> Point {
        Point::Interval { t }
    }

    pub fn vertex(id: usize) -> Point {
        Point::Vertex { id }
    }

    pub fn left(inner: Point) -> Point {
        Point::Union {
            side: Side::Left,
            inner: Box::new(inner),
        }
    }

    pub fn right(inner: Point) -> Point {
        Point::Union {
            side: Side::Right,
            inner: Box::new(inner),
        }
    }
}

/// Serializable description of a space, sufficient to rebuild it exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    Bouquet {
        loops: usize,
        length: f64,
        resolution: f64,
    },
    WedgeSpheres {
        spheres: usize,
        dim: usize,
        radius: f64,
        samples: usize,
        seed: u64,
    },
    Interval {
        grid: usize,
    },
    Graph {
        edges: Vec<Edge>,
    },
    DisjointUnion {
        left: Box<SpaceSpec>,
        right: Box<SpaceSpec>,
        separation: f64,
    },
}

impl SpaceSpec {
    pub fn build(&self) -> Result<MetricSpace> {
        match self {
            SpaceSpec::Bouquet {
                loops,
                length,
                resolution,
            } => bouquet_space(*loops, *length, *resolution),
            SpaceSpec::WedgeSpheres {
                spheres,
                dim,
                radius,
                samples,
                seed,
            } => wedge_sphere_space(*spheres, *dim, *radius, *samples, *seed),
            SpaceSpec::Interval { grid } => interval_space(*grid),
            SpaceSpec::Graph { edges } => graph_space(edges),
            SpaceSpec::DisjointUnion {
                left,
                right,
                separation,
            } => disjoint_union(left.build()?, right.build()?, *separation),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Bouquet,
    WedgeSpheres,
    Interval,
    Graph,
    DisjointUnion,
}

#[derive(Clone, Debug)]
pub enum Geometry {
    Bouquet {
        loops: usize,
        length: f64,
    },
    WedgeSpheres {
        spheres: usize,
        dim: usize,
        radius: f64,
    },
    Interval,
    Graph {
        graph: WeightedGraph,
        distances: Vec<f64>,
    },
    DisjointUnion {
        left: Box<MetricSpace>,
        right: Box<MetricSpace>,
        separation: f64,
    },
}

/// A finite-sampled geodesic space with a total distance function.
#[derive(Clone, Debug)]
pub struct MetricSpace {
    geometry: Geometry,
    samples: Vec<Point>,
    resolution: f64,
    spec: SpaceSpec,
}

/// Wedge of `w` circles of circumference `length`, sampled at spacing at most `h`.
pub fn bouquet_space(w: usize, length: f64, h: f64) -> Result<MetricSpace> {
    if w == 0 {
        return Err(invalid("w", "a bouquet needs at least one loop"));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(invalid("L", format!("loop length must be positive, got {length}")));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid("h", format!("resolution must be positive, got {h}")));
    }
    if h > length / 8.0 + EPS {
        return Err(invalid(
            "h",
            format!("resolution {h} is coarser than L/8 = {}", length / 8.0),
        ));
    }
    let per_loop = ((length / h) - 1e-9).ceil().max(1.0) as usize;
    let spacing = length / per_loop as f64;
    let mut samples = Vec::with_capacity(1 + w * (per_loop - 1));
    samples.push(Point::on_loop(0, 0.0));
    for j in 0..w {
        for i in 1..per_loop {
            samples.push(Point::on_loop(j, i as f64 * spacing));
        }
    }
    Ok(MetricSpace {
        geometry: Geometry::Bouquet { loops: w, length },
        samples,
        resolution: spacing,
        spec: SpaceSpec::Bouquet {
            loops: w,
            length,
            resolution: h,
        },
    })
}

/// Wedge of `w` round `k`-spheres of radius `radius`, glued at `e0`.
///
/// Each sphere gets `n` uniform random directions; the wedge point and every
/// antipode `-e0` are always included.
pub fn wedge_sphere_space(w: usize, k: usize, radius: f64, n: usize, seed: u64) -> Result<MetricSpace> {
    if w == 0 {
        return Err(invalid("w", "a wedge needs at least one sphere"));
    }
    if k == 0 {
        return Err(invalid("k", "sphere dimension must be at least 1"));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(invalid("R", format!("radius must be positive, got {radius}")));
    }
    if n < 16 {
        return Err(invalid("n", format!("need at least 16 samples per sphere, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(1 + w * (n + 1));
    samples.push(Point::Sphere {
        index: 0,
        dir: basis(k + 1, 0, 1.0),
    });
    for j in 0..w {
        samples.push(Point::Sphere {
            index: j,
            dir: basis(k + 1, 0, -1.0),
        });
        for _ in 0..n {
            samples.push(Point::Sphere {
                index: j,
                dir: random_direction(&mut rng, k + 1),
            });
        }
    }
    let resolution = radius * (sphere_area(k) / n as f64).powf(1.0 / k as f64);
    Ok(MetricSpace {
        geometry: Geometry::WedgeSpheres {
            spheres: w,
            dim: k,
            radius,
        },
        samples,
        resolution,
        spec: SpaceSpec::WedgeSpheres {
            spheres: w,
            dim: k,
            radius,
            samples: n,
            seed,
        },
    })
}

/// The unit interval on an `n`-point grid.
pub fn interval_space(n: usize) -> Result<MetricSpace> {
    if n < 2 {
        return Err(invalid("n", format!("grid needs at least 2 points, got {n}")));
    }
    let step = 1.0 / (n - 1) as f64;
    let samples = (0..n).map(|i| Point::at(i as f64 / (n - 1) as f64)).collect();
    Ok(MetricSpace {
        geometry: Geometry::Interval,
        samples,
        resolution: step,
        spec: SpaceSpec::Interval { grid: n },
    })
}

/// A connected weighted graph with its shortest-path metric on the vertices.
pub fn graph_space(edges: &[Edge]) -> Result<MetricSpace> {
    let graph = WeightedGraph::from_edges(edges)?;
    if graph.vertex_count() == 0 {
        return Err(invalid("edges", "graph has no vertices"));
    }
    let components = graph.components();
    if components.len() > 1 {
        return Err(Error::Disconnected { components });
    }
    let distances = graph.all_pairs();
    let max_weight = edges.iter().map(|e| e.weight).fold(0.0, f64::max);
    let samples = (0..graph.vertex_count()).map(Point::vertex).collect();
    Ok(MetricSpace {
        geometry: Geometry::Graph { graph, distances },
        samples,
        resolution: max_weight / 2.0,
        spec: SpaceSpec::Graph { edges: edges.to_vec() },
    })
}

/// Disjoint union with cross distance `s + d(x, anchor_a) + d(anchor_b, y)`.
///
/// Anchors are the first sample point of each side (the wedge point for
/// bouquets and wedges of spheres).
pub fn disjoint_union(a: MetricSpace, b: MetricSpace, s: f64) -> Result<MetricSpace> {
    if !(s.is_finite() && s > 0.0) {
        return Err(invalid("s", format!("separation must be positive, got {s}")));
    }
    let samples = a
        .samples
        .iter()
        .cloned()
        .map(Point::left)
        .chain(b.samples.iter().cloned().map(Point::right))
        .collect();
    let resolution = a.resolution.max(b.resolution);
    let spec = SpaceSpec::DisjointUnion {
        left: Box::new(a.spec.clone()),
        right: Box::new(b.spec.clone()),
        separation: s,
    };
    Ok(MetricSpace {
        geometry: Geometry::DisjointUnion {
            left: Box::new(a),
            right: Box::new(b),
            separation: s,
        },
        samples,
        resolution,
        spec,
    })
}

impl MetricSpace {
    pub fn kind(&self) -> SpaceKind {
        match self.geometry {
            Geometry::Bouquet { .. } => SpaceKind::Bouquet,
            Geometry::WedgeSpheres { .. } => SpaceKind::WedgeSpheres,
            Geometry::Interval => SpaceKind::Interval,
            Geometry::Graph { .. } => SpaceKind::Graph,
            Geometry::DisjointUnion { .. } => SpaceKind::DisjointUnion,
        }
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Point] {
        &self.samples
    }

    pub fn sample(&self, id: usize) -> &Point {
        &self.samples[id]
    }

    /// Actual spacing of the sample set.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Step used for chain connectivity of sampled supports: twice the resolution.
    pub fn connectivity_step(&self) -> f64 {
        2.0 * self.resolution
    }

    /// True when closed balls realize `d(B(a, r), B(b, s)) = max(0, d(a, b) - r - s)`.
    pub fn is_geodesic(&self) -> bool {
        matches!(
            self.geometry,
            Geometry::Bouquet { .. } | Geometry::WedgeSpheres { .. } | Geometry::Interval
        )
    }

    /// The anchor used by disjoint unions; the wedge point where one exists.
    pub fn anchor(&self) -> &Point {
        &self.samples[0]
    }

    /// Distance between two points of this space.
    ///
    /// # Panics
    /// If a point does not belong to this kind of space.
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        match (&self.geometry, x, y) {
            (Geometry::Bouquet { length, .. }, Point::Loop { index: i, arc: s }, Point::Loop { index: j, arc: t }) => {
                if i == j {
                    circle_gap(*length, *s, *t)
                } else {
                    s.min(length - s) + t.min(length - t)
                }
            }
            (
                Geometry::WedgeSpheres { radius, .. },
                Point::Sphere { index: i, dir: u },
                Point::Sphere { index: j, dir: v },
            ) => {
                if i == j {
                    radius * angle(u, v)
                } else {
                    radius * (angle_to_pole(u) + angle_to_pole(v))
                }
            }
            (Geometry::Interval, Point::Interval { t: s }, Point::Interval { t }) => (s - t).abs(),
            (Geometry::Graph { graph, distances }, Point::Vertex { id: a }, Point::Vertex { id: b }) => {
                distances[a * graph.vertex_count() + b]
            }
            (
                Geometry::DisjointUnion {
                    left,
                    right,
                    separation,
                },
                Point::Union { side: sx, inner: px },
                Point::Union { side: sy, inner: py },
            ) => match (sx, sy) {
                (Side::Left, Side::Left) => left.distance(px, py),
                (Side::Right, Side::Right) => right.distance(px, py),
                (Side::Left, Side::Right) => {
                    separation + left.distance(px, left.anchor()) + right.distance(right.anchor(), py)
                }
                (Side::Right, Side::Left) => {
                    separation + right.distance(px, right.anchor()) + left.distance(left.anchor(), py)
                }
            },
            _ => panic!("point kinds {x:?} / {y:?} do not belong to a {:?} space", self.kind()),
        }
    }

    pub fn sample_distance(&self, i: usize, j: usize) -> f64 {
        if let Geometry::Graph { graph, distances } = &self.geometry {
            return distances[i * graph.vertex_count() + j];
        }
        self.distance(&self.samples[i], &self.samples[j])
    }

    /// Checks that a point is a valid member of this space.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidPoint(msg));
        match (&self.geometry, p) {
            (Geometry::Bouquet { loops, length }, Point::Loop { index, arc }) => {
                if index >= loops {
                    return bad(format!("loop index {index} outside 0..{loops}"));
                }
                if !(arc.is_finite() && *arc >= 0.0 && arc < length) {
                    return bad(format!("arc position {arc} outside [0, {length})"));
                }
                Ok(())
            }
            (Geometry::WedgeSpheres { spheres, dim, .. }, Point::Sphere { index, dir }) => {
                if index >= spheres {
                    return bad(format!("sphere index {index} outside 0..{spheres}"));
                }
                if dir.len() != dim + 1 {
                    return bad(format!("direction has {} coordinates, expected {}", dir.len(), dim + 1));
                }
                let norm = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
                if !((norm - 1.0).abs() <= 1e-12) {
                    return bad(format!("direction norm {norm} is not 1"));
                }
                Ok(())
            }
            (Geometry::Interval, Point::Interval { t }) => {
                if !(0.0..=1.0).contains(t) {
                    return bad(format!("{t} outside [0, 1]"));
                }
                Ok(())
            }
            (Geometry::Graph { graph, .. }, Point::Vertex { id }) => {
                if *id >= graph.vertex_count() {
                    return bad(format!("vertex {id} not in graph"));
                }
                Ok(())
            }
            (Geometry::DisjointUnion { left, right, .. }, Point::Union { side, inner }) => match side {
                Side::Left => left.check_point(inner),
                Side::Right => right.check_point(inner),
            },
            _ => bad(format!("{p:?} does not belong to a {:?} space", self.kind())),
        }
    }

    /// Sample ids within `radius` (closed, with `EPS` slack) of `center`.
    pub fn ball(&self, center: &Point, radius: f64) -> Vec<usize> {
        (0..self.samples.len())
            .filter(|&i| self.distance(center, &self.samples[i]) <= radius + EPS)
            .collect()
    }

    /// Diameter of a set of sample ids, with a witnessing pair.
    pub fn diameter_of(&self, ids: &[usize]) -> (f64, Option<(usize, usize)>) {
        diameter_by(ids.len(), |a, b| self.sample_distance(ids[a], ids[b]))
            .map_or((0.0, None), |(d, a, b)| (d, Some((ids[a], ids[b]))))
    }

    /// Whether the `h`-chain graph on the given sample ids is connected.
    pub fn chain_connected(&self, ids: &[usize], h: f64) -> bool {
        chain_connected_by(ids.len(), h, |a, b| self.sample_distance(ids[a], ids[b]))
    }

    /// Writes the sample set as CSV: `id,kind,side,index,coords`.
    pub fn write_samples_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["id", "kind", "side", "index", "coords"])?;
        for (id, p) in self.samples.iter().enumerate() {
            let (kind, side, index, coords) = flatten(p);
            let coords = coords.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(";");
            writer.write_record([id.to_string(), kind.into(), side, index.to_string(), coords])?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn flatten(p: &Point) -> (&'static str, String, usize, Vec<f64>) {
    match p {
        Point::Loop { index, arc } => ("loop", String::new(), *index, vec![*arc]),
        Point::Sphere { index, dir } => ("sphere", String::new(), *index, dir.clone()),
        Point::Interval { t } => ("interval", String::new(), 0, vec![*t]),
        Point::Vertex { id } => ("vertex", String::new(), *id, Vec::new()),
        Point::Union { side, inner } => {
            let (kind, rest, index, coords) = flatten(inner);
            let tag = match side {
                Side::Left => "left",
                Side::Right => "right",
            };
            let side = if rest.is_empty() {
                tag.to_string()
            } else {
                format!("{tag}.{rest}")
            };
            (kind, side, index, coords)
        }
    }
}

/// Largest pairwise distance of a point list.
pub fn subset_diameter(space: &MetricSpace, pts: &[Point]) -> Result<f64> {
    if pts.is_empty() {
        return Err(Error::EmptyPointList);
    }
    Ok(diameter_by(pts.len(), |a, b| space.distance(&pts[a], &pts[b])).map_or(0.0, |t| t.0))
}

/// True iff the graph on `pts` with edges `d <= h` is connected.
pub fn is_chain_connected(space: &MetricSpace, pts: &[Point], h: f64) -> Result<bool> {
    if pts.is_empty() {
        return Err(Error::EmptyPointList);
    }
    if !(h > 0.0) {
        return Err(invalid("h", format!("step must be positive, got {h}")));
    }
    Ok(chain_connected_by(pts.len(), h, |a, b| {
        space.distance(&pts[a], &pts[b])
    }))
}

fn diameter_by(n: usize, dist: impl Fn(usize, usize) -> f64) -> Option<(f64, usize, usize)> {
    let mut best: Option<(f64, usize, usize)> = None;
    for a in 0..n {
        for b in a..n {
            let d = dist(a, b);
            if best.is_none_or(|(bd, _, _)| d > bd) {
                best = Some((d, a, b));
            }
        }
    }
    best
}

fn chain_connected_by(n: usize, h: f64, dist: impl Fn(usize, usize) -> f64) -> bool {
    if n <= 1 {
        return true;
    }
    let mut sets = DisjointSets::new(n);
    let mut merges = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            if dist(a, b) <= h + EPS && sets.union(a, b) {
                merges += 1;
                if merges == n - 1 {
                    return true;
                }
            }
        }
    }
    false
}

fn circle_gap(length: f64, s: f64, t: f64) -> f64 {
    let d = (s - t).abs();
    d.min(length - d)
}

fn basis(len: usize, axis: usize, sign: f64) -> Vec<f64> {
    let mut v = vec![0.0; len];
    v[axis] = sign;
    v
}

fn random_direction(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// Angle between unit vectors, `2 atan2(|u - v|, |u + v|)`; accurate near 0 and pi.
pub fn angle(u: &[f64], v: &[f64]) -> f64 {
    let (mut minus, mut plus) = (0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    2.0 * minus.sqrt().atan2(plus.sqrt())
}

fn angle_to_pole(u: &[f64]) -> f64 {
    let (mut minus, mut plus) = (0.0, 0.0);
    for (i, a) in u.iter().enumerate() {
        let pole = if i == 0 { 1.0 } else { 0.0 };
        minus += (a - pole) * (a - pole);
        plus += (a + pole) * (a + pole);
    }
    2.0 * minus.sqrt().atan2(plus.sqrt())
}

/// Surface measure of the unit `k`-sphere.
pub fn sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_area(k - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bouquet_examples() {
        let x = bouquet_space(2, 10.0, 0.5).unwrap();
        assert_eq!(x.distance(&Point::on_loop(0, 2.0), &Point::on_loop(0, 9.0)), 3.0);
        assert_eq!(x.distance(&Point::on_loop(0, 2.0), &Point::on_loop(1, 3.0)), 5.0);
        let x = bouquet_space(3, 10.0, 0.5).unwrap();
        assert_eq!(x.distance(&Point::on_loop(0, 5.0), &Point::on_loop(1, 5.0)), 10.0);
    }

    #[test]
    fn bouquet_sample_layout() {
        let x = bouquet_space(3, 10.0, 0.1).unwrap();
        // 100 points per loop with the wedge point shared
        assert_eq!(x.samples().len(), 1 + 3 * 99);
        assert_abs_diff_eq!(x.resolution(), 0.1, epsilon = 1e-12);
        let x = bouquet_space(1, 10.0, 0.3).unwrap();
        assert_eq!(x.samples().len(), 34);
        assert!(x.resolution() <= 0.3);
    }

    #[test]
    fn bouquet_rejects_bad_parameters() {
        assert!(bouquet_space(0, 10.0, 0.5).is_err());
        assert!(bouquet_space(2, 0.0, 0.5).is_err());
        assert!(bouquet_space(2, -1.0, 0.5).is_err());
        assert!(bouquet_space(2, 10.0, 0.0).is_err());
        assert!(bouquet_space(2, 10.0, 1.3).is_err());
        assert!(bouquet_space(2, 10.0, 1.25).is_ok());
    }

    #[test]
    fn wedge_examples() {
        let x = wedge_sphere_space(2, 2, 2.0, 32, 1).unwrap();
        let v = Point::Sphere {
            index: 0,
            dir: vec![1.0, 0.0, 0.0],
        };
        let p = |j| Point::Sphere {
            index: j,
            dir: vec![-1.0, 0.0, 0.0],
        };
        assert_abs_diff_eq!(x.distance(&v, &p(0)), 2.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(x.distance(&p(0), &p(1)), 4.0 * PI, epsilon = 1e-12);
        assert_eq!(x.samples().len(), 1 + 2 * 33);
        for p in x.samples() {
            x.check_point(p).unwrap();
        }
    }

    #[test]
    fn wedge_rejects_bad_parameters() {
        assert!(wedge_sphere_space(0, 2, 1.0, 16, 0).is_err());
        assert!(wedge_sphere_space(1, 0, 1.0, 16, 0).is_err());
        assert!(wedge_sphere_space(1, 2, 0.0, 16, 0).is_err());
        assert!(wedge_sphere_space(1, 2, 1.0, 15, 0).is_err());
        let x = wedge_sphere_space(1, 2, 1.0, 16, 0).unwrap();
        let skewed = Point::Sphere {
            index: 0,
            dir: vec![1.0, 1.0, 0.0],
        };
        assert!(x.check_point(&skewed).is_err());
        let zero = Point::Sphere {
            index: 0,
            dir: vec![0.0, 0.0, 0.0],
        };
        assert!(x.check_point(&zero).is_err());
    }

    #[test]
    fn interval_examples() {
        let x = interval_space(11).unwrap();
        assert_abs_diff_eq!(x.distance(&Point::at(0.3), &Point::at(0.7)), 0.4, epsilon = 1e-12);
        let x = interval_space(2).unwrap();
        assert_eq!(subset_diameter(&x, x.samples()).unwrap(), 1.0);
        let x = interval_space(101).unwrap();
        assert_abs_diff_eq!(x.resolution(), 0.01, epsilon = 1e-15);
        assert!(interval_space(1).is_err());
    }

    #[test]
    fn graph_examples() {
        let tri = graph_space(&[Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 0, 1.0)]).unwrap();
        assert_eq!(tri.distance(&Point::vertex(0), &Point::vertex(2)), 1.0);
        let path = graph_space(&[Edge::new(0, 1, 2.0), Edge::new(1, 2, 3.0)]).unwrap();
        assert_eq!(path.distance(&Point::vertex(0), &Point::vertex(2)), 5.0);
    }

    #[test]
    fn disconnected_graph_reports_components() {
        let err = graph_space(&[Edge::new(0, 1, 1.0), Edge::new(2, 3, 1.0)]).unwrap_err();
        match err {
            Error::Disconnected { components } => {
                assert_eq!(components, vec![vec![0, 1], vec![2, 3]]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn union_cross_distance() {
        let a = bouquet_space(2, 10.0, 0.5).unwrap();
        let b = bouquet_space(2, 10.0, 0.5).unwrap();
        let u = disjoint_union(a.clone(), b, 100.0).unwrap();
        let x = Point::left(Point::on_loop(0, 2.0));
        let y = Point::right(Point::on_loop(1, 3.0));
        assert_eq!(u.distance(&x, &y), 105.0);
        let x2 = Point::left(Point::on_loop(1, 7.0));
        assert_eq!(
            u.distance(&x, &x2).to_bits(),
            a.distance(&Point::on_loop(0, 2.0), &Point::on_loop(1, 7.0)).to_bits()
        );
        assert!(disjoint_union(a.clone(), a, 0.0).is_err());
    }

    #[test]
    fn diameter_and_chains() {
        let x = bouquet_space(2, 10.0, 0.25).unwrap();
        assert_eq!(subset_diameter(&x, &[Point::on_loop(0, 1.0)]).unwrap(), 0.0);
        assert!(subset_diameter(&x, &[]).is_err());
        let arc: Vec<Point> = (0..7).map(|i| Point::on_loop(0, 4.25 + 0.25 * i as f64)).collect();
        assert_abs_diff_eq!(subset_diameter(&x, &arc).unwrap(), 1.5, epsilon = 1e-12);
        assert!(is_chain_connected(&x, &arc, 0.25).unwrap());
        let far = [Point::on_loop(0, 1.0), Point::on_loop(0, 4.0)];
        assert!(!is_chain_connected(&x, &far, 1.0).unwrap());
        assert!(is_chain_connected(&x, &far, 0.0).is_err());
        assert!(is_chain_connected(&x, &[], 1.0).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert_abs_diff_eq!(sphere_area(2), 4.0 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(sphere_area(3), 2.0 * PI * PI, epsilon = 1e-12);
    }

    #[test]
    fn samples_csv_has_header_and_rows() {
        let x = bouquet_space(1, 8.0, 1.0).unwrap();
        let mut buf = Vec::new();
        x.write_samples_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("id,kind,side,index,coords\n"));
        assert_eq!(text.lines().count(), 1 + 8);
    }
}
