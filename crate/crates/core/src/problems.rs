//! Margin problems: labeled class sets on a metric space, margin validation
//! and safe regions.

use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::{
    bouquet_space, disjoint_union, interval_space, wedge_sphere_space, MetricSpace, Point, Side, SpaceSpec, EPS,
};

/// The closed set backing one class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Region {
    /// Closed geodesic ball.
    Ball { center: Point, radius: f64 },
    /// Union of closed subintervals of `[0, 1]`; interval spaces only.
    Intervals { spans: Vec<(f64, f64)> },
    /// An explicit list of sample ids.
    Samples { ids: Vec<usize> },
}

impl Region {
    /// Distance from `x` to the region.
    pub fn distance(&self, space: &MetricSpace, x: &Point) -> f64 {
        match self {
            Region::Ball { center, radius } => (space.distance(x, center) - radius).max(0.0),
            Region::Intervals { spans } => {
                let t = match x {
                    Point::Interval { t } => *t,
                    _ => panic!("interval region queried with {x:?}"),
                };
                spans
                    .iter()
                    .map(|&(a, b)| (a - t).max(t - b).max(0.0))
                    .fold(f64::INFINITY, f64::min)
            }
            Region::Samples { ids } => ids
                .iter()
                .map(|&i| space.distance(x, space.sample(i)))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// One class: its region and the sample ids lying in it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSet {
    pub region: Region,
    pub ids: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyTag {
    Bouquet,
    Scaled,
    Wedge,
    IntervalUnion,
    Union,
    Custom,
    Permuted { sigma: Vec<usize> },
}

/// Serializable recipe for a problem; `build` reconstructs it exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProblemSpec {
    Bouquet {
        loops: usize,
        length: f64,
        gamma: f64,
        resolution: f64,
    },
    Scaled {
        loops: usize,
        per_loop: usize,
        length: f64,
        gamma: f64,
        resolution: f64,
    },
    Wedge {
        spheres: usize,
        dim: usize,
        radius: f64,
        samples: usize,
        seed: u64,
        gamma: f64,
    },
    IntervalUnion {
        intervals: Vec<(f64, f64)>,
        gamma: f64,
        grid: usize,
    },
    Union {
        left: Box<ProblemSpec>,
        right: Box<ProblemSpec>,
        separation: f64,
    },
    Permuted {
        base: Box<ProblemSpec>,
        sigma: Vec<usize>,
    },
    Custom {
        space: SpaceSpec,
        classes: Vec<Region>,
        gamma: f64,
    },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<MarginProblem> {
        match self {
            ProblemSpec::Bouquet {
                loops,
                length,
                gamma,
                resolution,
            } => bouquet_problem(*loops, *length, *gamma, *resolution),
            ProblemSpec::Scaled {
                loops,
                per_loop,
                length,
                gamma,
                resolution,
            } => scaled_problem(*loops, *per_loop, *length, *gamma, *resolution),
            ProblemSpec::Wedge {
                spheres,
                dim,
                radius,
                samples,
                seed,
                gamma,
            } => wedge_problem(*spheres, *dim, *radius, *samples, *seed, *gamma),
            ProblemSpec::IntervalUnion { intervals, gamma, grid } => interval_union_problem(intervals, *gamma, *grid),
            ProblemSpec::Union {
                left,
                right,
                separation,
            } => union_problem(&left.build()?, &right.build()?, *separation),
            ProblemSpec::Permuted { base, sigma } => permuted_problem(&base.build()?, sigma),
            ProblemSpec::Custom { space, classes, gamma } => {
                custom_problem(Arc::new(space.build()?), classes.clone(), *gamma)
            }
        }
    }
}

/// A K-class margin-γ problem on a sampled space.
#[derive(Clone, Debug)]
pub struct MarginProblem {
    pub space: Arc<MetricSpace>,
    pub classes: Vec<ClassSet>,
    /// Label of each class, a permutation of `0..K`.
    pub labels: Vec<usize>,
    pub gamma: f64,
    pub family: FamilyTag,
    pub spec: ProblemSpec,
}

impl MarginProblem {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Distance between classes `i` and `j`.
    ///
    /// Ball pairs in geodesic spaces use `max(0, d(c_i, c_j) - r_i - r_j)`;
    /// everything else scans the sample ids of one class against the exact
    /// region of the other.
    pub fn class_distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.classes[i], &self.classes[j]);
        if let (Some(d), true) = (ball_gap(&self.space, &a.region, &b.region), self.space.is_geodesic()) {
            return d;
        }
        let one = |x: &ClassSet, y: &ClassSet| {
            x.ids
                .iter()
                .map(|&s| y.region.distance(&self.space, self.space.sample(s)))
                .fold(f64::INFINITY, f64::min)
        };
        one(a, b).min(one(b, a))
    }

    /// Distance from sample `id` to class `k`.
    pub fn distance_to_class(&self, id: usize, k: usize) -> f64 {
        self.classes[k].region.distance(&self.space, self.space.sample(id))
    }
}

fn ball_gap(space: &MetricSpace, a: &Region, b: &Region) -> Option<f64> {
    match (a, b) {
        (Region::Ball { center: c1, radius: r1 }, Region::Ball { center: c2, radius: r2 }) => {
            Some((space.distance(c1, c2) - r1 - r2).max(0.0))
        }
        _ => None,
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(invalid("gamma", format!("margin must be positive, got {gamma}")));
    }
    Ok(())
}

/// Builds a problem from explicit regions; labels are the class indices.
///
/// The margin is not enforced here; `validate_margin` reports on it and
/// `safe_region` refuses invalid problems.
pub fn custom_problem(space: Arc<MetricSpace>, regions: Vec<Region>, gamma: f64) -> Result<MarginProblem> {
    let spec = ProblemSpec::Custom {
        space: space.spec().clone(),
        classes: regions.clone(),
        gamma,
    };
    let labels = (0..regions.len()).collect();
    assemble(space, regions, labels, gamma, FamilyTag::Custom, spec)
}

fn assemble(
    space: Arc<MetricSpace>,
    regions: Vec<Region>,
    labels: Vec<usize>,
    gamma: f64,
    family: FamilyTag,
    spec: ProblemSpec,
) -> Result<MarginProblem> {
    check_gamma(gamma)?;
    if regions.is_empty() {
        return Err(invalid("classes", "a problem needs at least one class"));
    }
    let mut classes = Vec::with_capacity(regions.len());
    for (k, region) in regions.into_iter().enumerate() {
        match &region {
            Region::Ball { center, radius } => {
                space.check_point(center)?;
                if !(radius.is_finite() && *radius >= 0.0) {
                    return Err(invalid("radius", format!("class {k} has radius {radius}")));
                }
            }
            Region::Intervals { spans } => {
                if !matches!(space.sample(0), Point::Interval { .. }) {
                    return Err(invalid("classes", "interval regions need an interval space"));
                }
                for &(a, b) in spans {
                    if !(0.0 <= a && a <= b && b <= 1.0) {
                        return Err(invalid("classes", format!("span [{a}, {b}] outside [0, 1]")));
                    }
                }
            }
            Region::Samples { ids } => {
                if let Some(&bad) = ids.iter().find(|&&i| i >= space.samples().len()) {
                    return Err(invalid("classes", format!("sample id {bad} out of range")));
                }
            }
        }
        let ids: Vec<usize> = match &region {
            Region::Samples { ids } => {
                let mut ids = ids.clone();
                ids.sort_unstable();
                ids.dedup();
                ids
            }
            _ => (0..space.samples().len())
                .filter(|&i| region.distance(&space, space.sample(i)) <= EPS)
                .collect(),
        };
        if ids.is_empty() {
            return Err(Error::EmptyClass(k));
        }
        classes.push(ClassSet { region, ids });
    }
    Ok(MarginProblem {
        space,
        classes,
        labels,
        gamma,
        family,
        spec,
    })
}

/// `w` classes: balls of radius γ/4 around the loop antipodes of a bouquet.
pub fn bouquet_problem(w: usize, length: f64, gamma: f64, h: f64) -> Result<MarginProblem> {
    check_gamma(gamma)?;
    // the boundary gamma = L/10 is admitted: the width window is still nonempty there
    if gamma > length / 10.0 {
        return Err(invalid(
            "gamma",
            format!("need gamma <= L/10 = {}, got {gamma}", length / 10.0),
        ));
    }
    let space = Arc::new(bouquet_space(w, length, h)?);
    let regions = (0..w)
        .map(|j| Region::Ball {
            center: Point::on_loop(j, length / 2.0),
            radius: gamma / 4.0,
        })
        .collect();
    let spec = ProblemSpec::Bouquet {
        loops: w,
        length,
        gamma,
        resolution: h,
    };
    assemble(space, regions, (0..w).collect(), gamma, FamilyTag::Bouquet, spec)
}

/// Arc positions of the `m` class centers on each loop of a scaled problem.
///
/// For `m >= 2` the centers sit at `L/4 + r L/(2m)`; a single center sits at
/// the antipode so that `m = 1` coincides with the bouquet family.
pub fn scaled_centers(m: usize, length: f64) -> Vec<f64> {
    if m == 1 {
        return vec![length / 2.0];
    }
    (0..m)
        .map(|r| length / 4.0 + r as f64 * length / (2.0 * m as f64))
        .collect()
}

/// `w·m` classes: `m` balls of radius γ/4 per loop on the half opposite the wedge point.
pub fn scaled_problem(w: usize, m: usize, length: f64, gamma: f64, h: f64) -> Result<MarginProblem> {
    check_gamma(gamma)?;
    if m == 0 {
        return Err(invalid("m", "need at least one class per loop"));
    }
    if length / (m as f64) < 3.0 * gamma {
        return Err(invalid(
            "m",
            format!("spacing L/m = {} is below 3 gamma = {}", length / m as f64, 3.0 * gamma),
        ));
    }
    let space = Arc::new(bouquet_space(w, length, h)?);
    let centers = scaled_centers(m, length);
    let mut regions = Vec::with_capacity(w * m);
    for j in 0..w {
        for &c in &centers {
            regions.push(Region::Ball {
                center: Point::on_loop(j, c),
                radius: gamma / 4.0,
            });
        }
    }
    let spec = ProblemSpec::Scaled {
        loops: w,
        per_loop: m,
        length,
        gamma,
        resolution: h,
    };
    assemble(space, regions, (0..w * m).collect(), gamma, FamilyTag::Scaled, spec)
}

/// `w` classes: balls of radius γ/4 around the antipodes of a wedge of `k`-spheres.
pub fn wedge_problem(w: usize, k: usize, radius: f64, n: usize, seed: u64, gamma: f64) -> Result<MarginProblem> {
    check_gamma(gamma)?;
    if gamma >= 2.0 * std::f64::consts::PI * radius / 10.0 {
        return Err(invalid("gamma", "need gamma < pi R / 5"));
    }
    let space = Arc::new(wedge_sphere_space(w, k, radius, n, seed)?);
    let regions = (0..w)
        .map(|j| {
            let mut dir = vec![0.0; k + 1];
            dir[0] = -1.0;
            Region::Ball {
                center: Point::Sphere { index: j, dir },
                radius: gamma / 4.0,
            }
        })
        .collect();
    let spec = ProblemSpec::Wedge {
        spheres: w,
        dim: k,
        radius,
        samples: n,
        seed,
        gamma,
    };
    assemble(space, regions, (0..w).collect(), gamma, FamilyTag::Wedge, spec)
}

/// Binary problem on `[0, 1]`: class 0 is the union `C` of the given
/// intervals, class 1 is every grid point farther than γ from `C`.
pub fn interval_union_problem(intervals: &[(f64, f64)], gamma: f64, grid: usize) -> Result<MarginProblem> {
    check_gamma(gamma)?;
    if intervals.is_empty() {
        return Err(invalid("intervals", "need at least one interval"));
    }
    let mut sorted = intervals.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(a, b) in &sorted {
        if !(0.0 <= a && a <= b && b <= 1.0) {
            return Err(invalid(
                "intervals",
                format!("[{a}, {b}] is not a closed subinterval of [0, 1]"),
            ));
        }
    }
    for pair in sorted.windows(2) {
        let gap = pair[1].0 - pair[0].1;
        if gap <= gamma {
            return Err(invalid(
                "intervals",
                format!(
                    "[{}, {}] and [{}, {}] are {gap} apart, need more than gamma = {gamma}",
                    pair[0].0, pair[0].1, pair[1].0, pair[1].1
                ),
            ));
        }
    }
    let space = Arc::new(interval_space(grid)?);
    let positive = Region::Intervals { spans: sorted };
    let negative: Vec<usize> = (0..grid)
        .filter(|&i| positive.distance(&space, space.sample(i)) > gamma + EPS)
        .collect();
    if negative.is_empty() {
        return Err(invalid(
            "intervals",
            "no grid point lies farther than gamma from the intervals; the negative class is empty",
        ));
    }
    let spec = ProblemSpec::IntervalUnion {
        intervals: intervals.to_vec(),
        gamma,
        grid,
    };
    assemble(
        space,
        vec![positive, Region::Samples { ids: negative }],
        vec![0, 1],
        gamma,
        FamilyTag::IntervalUnion,
        spec,
    )
}

/// Problem on the disjoint union of two problems' spaces. Labels of the
/// right problem are shifted past those of the left.
pub fn union_problem(a: &MarginProblem, b: &MarginProblem, separation: f64) -> Result<MarginProblem> {
    if a.gamma.to_bits() != b.gamma.to_bits() {
        return Err(invalid("gamma", "both problems must share the margin"));
    }
    let offset = a.space.samples().len();
    let space = Arc::new(disjoint_union((*a.space).clone(), (*b.space).clone(), separation)?);
    let lift = |class: &ClassSet, side: Side, shift: usize| match &class.region {
        Region::Ball { center, radius } => Region::Ball {
            center: Point::Union {
                side,
                inner: Box::new(center.clone()),
            },
            radius: *radius,
        },
        _ => Region::Samples {
            ids: class.ids.iter().map(|i| i + shift).collect(),
        },
    };
    let mut regions: Vec<Region> = a.classes.iter().map(|c| lift(c, Side::Left, 0)).collect();
    regions.extend(b.classes.iter().map(|c| lift(c, Side::Right, offset)));
    let mut labels = a.labels.clone();
    labels.extend(b.labels.iter().map(|l| l + a.num_classes()));
    let spec = ProblemSpec::Union {
        left: Box::new(a.spec.clone()),
        right: Box::new(b.spec.clone()),
        separation,
    };
    assemble(space, regions, labels, a.gamma, FamilyTag::Union, spec)
}

/// Relabels class `j` with `sigma[label_j]`; geometry is untouched.
pub fn permuted_problem(p: &MarginProblem, sigma: &[usize]) -> Result<MarginProblem> {
    let k = p.num_classes();
    let mut seen = vec![false; k];
    if sigma.len() != k {
        return Err(Error::NotBijection(k));
    }
    for &s in sigma {
        if s >= k || seen[s] {
            return Err(Error::NotBijection(k));
        }
        seen[s] = true;
    }
    let mut out = p.clone();
    out.labels = p.labels.iter().map(|&l| sigma[l]).collect();
    out.family = FamilyTag::Permuted { sigma: sigma.to_vec() };
    out.spec = ProblemSpec::Permuted {
        base: Box::new(p.spec.clone()),
        sigma: sigma.to_vec(),
    };
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    /// Distance between the two γ/2 safe neighborhoods.
    pub safe_gap: f64,
}

/// Both readings of the same-loop center spacing of a scaled problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledSpacing {
    pub stated: f64,
    pub implemented: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginReport {
    pub gamma: f64,
    /// `None` for single-class problems.
    pub min_distance: Option<f64>,
    pub strict_pass: bool,
    /// First pair with distance at most γ, if any.
    pub violation: Option<(usize, usize)>,
    pub pairs: Vec<PairRow>,
    /// Safe neighborhoods pairwise disjoint (positive gaps and disjoint sample lists).
    pub safe_disjoint: bool,
    pub scaled_spacing: Option<ScaledSpacing>,
}

/// Checks the strict margin and the disjointness of the safe neighborhoods.
pub fn validate_margin(p: &MarginProblem) -> MarginReport {
    let k = p.num_classes();
    let safe = raw_safe_lists(p);
    let mut pairs = Vec::with_capacity(k * k.saturating_sub(1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            pairs.push(PairRow {
                i,
                j,
                distance: p.class_distance(i, j),
                safe_gap: safe_gap(p, &safe, i, j),
            });
        }
    }
    let min_distance = pairs.iter().map(|r| r.distance).reduce(f64::min);
    let violation = pairs.iter().find(|r| r.distance <= p.gamma).map(|r| (r.i, r.j));
    let lists_disjoint = {
        let mut owner = vec![usize::MAX; p.space.samples().len()];
        let mut ok = true;
        for (c, list) in safe.iter().enumerate() {
            for &s in list {
                ok &= owner[s] == usize::MAX;
                owner[s] = c;
            }
        }
        ok
    };
    let scaled_spacing = scaled_spacing(&p.spec);
    MarginReport {
        gamma: p.gamma,
        min_distance,
        strict_pass: violation.is_none(),
        violation,
        safe_disjoint: lists_disjoint && pairs.iter().all(|r| r.safe_gap > 0.0),
        pairs,
        scaled_spacing,
    }
}

fn scaled_spacing(spec: &ProblemSpec) -> Option<ScaledSpacing> {
    match spec {
        ProblemSpec::Scaled { per_loop, length, .. } => Some(ScaledSpacing {
            stated: length / *per_loop as f64,
            implemented: if *per_loop == 1 {
                *length
            } else {
                length / (2.0 * *per_loop as f64)
            },
        }),
        ProblemSpec::Permuted { base, .. } => scaled_spacing(base),
        _ => None,
    }
}

/// Distance between the γ/2 neighborhoods of classes `i` and `j`.
pub(crate) fn safe_gap(p: &MarginProblem, safe: &[Vec<usize>], i: usize, j: usize) -> f64 {
    if p.space.is_geodesic() {
        if let Some(d) = ball_gap(&p.space, &p.classes[i].region, &p.classes[j].region) {
            return (d - p.gamma).max(0.0);
        }
    }
    let mut best = f64::INFINITY;
    for &a in &safe[i] {
        for &b in &safe[j] {
            best = best.min(p.space.sample_distance(a, b));
        }
    }
    best
}

fn raw_safe_lists(p: &MarginProblem) -> Vec<Vec<usize>> {
    let half = p.gamma / 2.0;
    (0..p.num_classes())
        .map(|k| {
            (0..p.space.samples().len())
                .filter(|&i| p.distance_to_class(i, k) <= half + EPS)
                .collect()
        })
        .collect()
}

/// Sample points within γ/2 of each class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SafeRegion {
    pub per_class: Vec<Vec<usize>>,
    /// Owning class of each sample, if safe.
    pub class_of: Vec<Option<usize>>,
    pub resolution: f64,
}

impl SafeRegion {
    /// All safe sample ids, ascending.
    pub fn points(&self) -> Vec<usize> {
        self.class_of
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|_| i))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.per_class.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// CSV of `point,class,label`.
    pub fn write_csv<W: Write>(&self, p: &MarginProblem, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["point", "class", "label"])?;
        for (k, list) in self.per_class.iter().enumerate() {
            for &i in list {
                writer.write_record([i.to_string(), k.to_string(), p.labels[k].to_string()])?;
            }
        }
        writer.flush()?;
        Ok(())
    }
}

/// The safe region of a margin-valid problem.
pub fn safe_region(p: &MarginProblem) -> Result<SafeRegion> {
    let k = p.num_classes();
    for i in 0..k {
        for j in (i + 1)..k {
            let distance = p.class_distance(i, j);
            if distance <= p.gamma {
                return Err(Error::MarginViolated {
                    i,
                    j,
                    distance,
                    gamma: p.gamma,
                });
            }
        }
    }
    let per_class = raw_safe_lists(p);
    let mut class_of = vec![None; p.space.samples().len()];
    for (c, list) in per_class.iter().enumerate() {
        for &s in list {
            if let Some(other) = class_of[s] {
                return Err(Error::MarginViolated {
                    i: other,
                    j: c,
                    distance: p.class_distance(other, c),
                    gamma: p.gamma,
                });
            }
            class_of[s] = Some(c);
        }
    }
    Ok(SafeRegion {
        per_class,
        class_of,
        resolution: p.space.resolution(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bouquet_margin_and_safe_balls() {
        let p = bouquet_problem(3, 10.0, 1.0, 0.1).unwrap();
        let report = validate_margin(&p);
        assert!(report.strict_pass);
        assert!(report.safe_disjoint);
        assert_abs_diff_eq!(report.min_distance.unwrap(), 9.5, epsilon = 1e-12);
        let safe = safe_region(&p).unwrap();
        for (j, list) in safe.per_class.iter().enumerate() {
            assert!(list.len() >= 15);
            for &i in list {
                let d = p.space.distance(p.space.sample(i), &Point::on_loop(j, 5.0));
                assert!(d <= 0.75 + EPS);
            }
            for &i in &p.classes[j].ids {
                assert!(list.contains(&i));
            }
        }
    }

    #[test]
    fn single_class_is_vacuously_valid() {
        let p = bouquet_problem(1, 10.0, 1.0, 0.1).unwrap();
        let report = validate_margin(&p);
        assert!(report.strict_pass);
        assert_eq!(report.min_distance, None);
    }

    #[test]
    fn bouquet_rejects_large_gamma() {
        assert!(bouquet_problem(2, 10.0, 1.0, 0.1).is_ok());
        assert!(bouquet_problem(2, 10.0, 1.01, 0.1).is_err());
        assert!(bouquet_problem(2, 10.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn scaled_geometry() {
        let p = scaled_problem(2, 3, 60.0, 1.0, 0.5).unwrap();
        assert_eq!(p.num_classes(), 6);
        assert_eq!(scaled_centers(3, 60.0), vec![15.0, 25.0, 35.0]);
        let v = Point::on_loop(0, 0.0);
        let nearest = p
            .classes
            .iter()
            .map(|c| match &c.region {
                Region::Ball { center, .. } => p.space.distance(&v, center),
                _ => unreachable!(),
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(nearest, 15.0, epsilon = 1e-12);
        let report = validate_margin(&p);
        assert!(report.strict_pass && report.safe_disjoint);
        let same_loop = report.pairs.iter().find(|r| r.i == 0 && r.j == 1).unwrap();
        assert_abs_diff_eq!(same_loop.safe_gap, 8.5, epsilon = 1e-12);
        let spacing = report.scaled_spacing.unwrap();
        assert_eq!((spacing.stated, spacing.implemented), (20.0, 10.0));
        assert!(scaled_problem(2, 30, 60.0, 2.1, 0.5).is_err());
    }

    #[test]
    fn scaled_single_center_matches_bouquet() {
        let a = scaled_problem(3, 1, 10.0, 1.0, 0.1).unwrap();
        let b = bouquet_problem(3, 10.0, 1.0, 0.1).unwrap();
        for (x, y) in a.classes.iter().zip(&b.classes) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn interval_union_examples() {
        let p = interval_union_problem(&[(0.1, 0.2), (0.6, 0.8)], 0.05, 101).unwrap();
        assert!(validate_margin(&p).min_distance.unwrap() > 0.05);
        assert!(interval_union_problem(&[(0.0, 1.0)], 0.05, 101).is_err());
        let p = interval_union_problem(&[(0.0, 0.4)], 0.1, 101).unwrap();
        // 0.5 sits at exactly gamma from C and is excluded by the strict margin
        assert_eq!(p.classes[1].ids.len(), 50);
        assert!(validate_margin(&p).strict_pass);
        assert!(interval_union_problem(&[(0.1, 0.3), (0.35, 0.5)], 0.1, 101).is_err());
    }

    #[test]
    fn interval_safe_region_widens_by_half_margin() {
        let p = interval_union_problem(&[(0.3, 0.4)], 0.1, 101).unwrap();
        let safe = safe_region(&p).unwrap();
        assert_eq!(p.classes[0].ids.len(), 11);
        assert_eq!(safe.per_class[0].len(), 11 + 2 * 5);
    }

    #[test]
    fn margin_boundary_fails_with_named_pair() {
        let space = Arc::new(interval_space(11).unwrap());
        let p = custom_problem(
            space,
            vec![
                Region::Ball {
                    center: Point::at(0.0),
                    radius: 0.0,
                },
                Region::Ball {
                    center: Point::at(0.5),
                    radius: 0.0,
                },
            ],
            0.5,
        )
        .unwrap();
        let report = validate_margin(&p);
        assert!(!report.strict_pass);
        assert_eq!(report.violation, Some((0, 1)));
        assert!(matches!(safe_region(&p), Err(Error::MarginViolated { i: 0, j: 1, .. })));
    }

    #[test]
    fn permutations_relabel_only() {
        let p = bouquet_problem(3, 10.0, 1.0, 0.25).unwrap();
        let id = permuted_problem(&p, &[0, 1, 2]).unwrap();
        assert_eq!(id.labels, p.labels);
        let swapped = permuted_problem(&p, &[0, 2, 1]).unwrap();
        assert_eq!(swapped.labels, vec![0, 2, 1]);
        assert_eq!(swapped.classes, p.classes);
        assert_eq!(validate_margin(&swapped), validate_margin(&p));
        assert!(permuted_problem(&p, &[0, 0, 1]).is_err());
        assert!(permuted_problem(&p, &[0, 1]).is_err());
        let rebuilt = swapped.spec.build().unwrap();
        assert_eq!(rebuilt.labels, swapped.labels);
    }

    #[test]
    fn union_shifts_labels_and_keeps_margin() {
        let a = bouquet_problem(2, 10.0, 1.0, 0.4).unwrap();
        let b = bouquet_problem(3, 10.0, 1.0, 0.4).unwrap();
        let u = union_problem(&a, &b, 100.0).unwrap();
        assert_eq!(u.labels, vec![0, 1, 2, 3, 4]);
        let report = validate_margin(&u);
        assert!(report.strict_pass && report.safe_disjoint);
        let cross = report.pairs.iter().find(|r| r.i == 0 && r.j == 2).unwrap();
        assert!(cross.distance >= 100.0);
    }

    #[test]
    fn wedge_problem_is_valid() {
        let p = wedge_problem(2, 2, 2.0, 64, 7, 1.0).unwrap();
        let report = validate_margin(&p);
        assert!(report.strict_pass && report.safe_disjoint);
        assert_abs_diff_eq!(
            report.min_distance.unwrap(),
            4.0 * std::f64::consts::PI - 0.5,
            epsilon = 1e-12
        );
    }
}
