//! Urysohn coverings: verification, canonical coverings, and certified
//! width brackets.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metric::EPS;
use crate::problems::{safe_gap, safe_region, MarginProblem, ProblemSpec, Region, SafeRegion};
use crate::setcover::{exact_cover, greedy_cover, maximal_cliques, prune_dominated, Bits, EXACT_LIMIT};

/// Finite surrogate for the label map `f_i` of a triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Assignment {
    /// Every support point gets `label`.
    Constant { label: usize },
    /// One label per support point.
    PerPoint { labels: Vec<usize> },
    /// One score vector per support point; the prediction is the argmax,
    /// lowest label on ties.
    Scores { scores: Vec<Vec<f64>> },
}

/// Index of the largest score, lowest index on ties.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UrysohnTriple {
    /// Sample ids of the support.
    pub support: Vec<usize>,
    pub num_labels: usize,
    pub assignment: Assignment,
}

impl UrysohnTriple {
    pub fn constant(support: Vec<usize>, num_labels: usize, label: usize) -> Self {
        UrysohnTriple {
            support,
            num_labels,
            assignment: Assignment::Constant { label },
        }
    }

    /// Predicted label at support position `pos`.
    pub fn label_at(&self, pos: usize) -> usize {
        match &self.assignment {
            Assignment::Constant { label } => *label,
            Assignment::PerPoint { labels } => labels[pos],
            Assignment::Scores { scores } => argmax(&scores[pos]),
        }
    }

    fn well_formed(&self, samples: usize) -> std::result::Result<(), String> {
        if self.support.is_empty() {
            return Err("empty support".into());
        }
        if let Some(&bad) = self.support.iter().find(|&&s| s >= samples) {
            return Err(format!("support id {bad} out of range"));
        }
        let n = self.support.len();
        match &self.assignment {
            Assignment::Constant { label } if *label >= self.num_labels => {
                Err(format!("label {label} outside 0..{}", self.num_labels))
            }
            Assignment::PerPoint { labels } if labels.len() != n => {
                Err(format!("{} labels for {n} support points", labels.len()))
            }
            Assignment::PerPoint { labels } => match labels.iter().find(|&&l| l >= self.num_labels) {
                Some(l) => Err(format!("label {l} outside 0..{}", self.num_labels)),
                None => Ok(()),
            },
            Assignment::Scores { scores } if scores.len() != n => {
                Err(format!("{} score rows for {n} support points", scores.len()))
            }
            Assignment::Scores { scores } if scores.iter().any(|r| r.len() != self.num_labels) => {
                Err("score row length differs from the label count".into())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UrysohnCovering {
    pub triples: Vec<UrysohnTriple>,
    pub d0: f64,
    /// Chain step used for the connectivity surrogate.
    pub step: f64,
}

impl UrysohnCovering {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleCheck {
    pub index: usize,
    /// Why the triple could not be checked, if malformed.
    pub malformed: Option<String>,
    pub connected: bool,
    pub diameter: f64,
    /// A pair realizing the diameter.
    pub witness: Option<(usize, usize)>,
    pub diameter_ok: bool,
    /// `(point, expected label, predicted label)` for every mislabeled safe point.
    pub mislabeled: Vec<(usize, usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub size: usize,
    pub d0: f64,
    /// Set when the problem itself fails the margin, so no safe region exists.
    pub problem_error: Option<String>,
    pub triples: Vec<TripleCheck>,
    pub connectivity: bool,
    pub diameter: bool,
    pub coverage: bool,
    pub correctness: bool,
    pub uncovered: Vec<usize>,
    /// Classes with at least one uncovered safe point.
    pub uncovered_classes: Vec<usize>,
    pub pass: bool,
}

/// Checks connectivity, diameter, coverage and local correctness of a covering.
pub fn verify_covering(p: &MarginProblem, cov: &UrysohnCovering) -> CoveringReport {
    let mut report = CoveringReport {
        size: cov.triples.len(),
        d0: cov.d0,
        problem_error: None,
        triples: Vec::new(),
        connectivity: false,
        diameter: false,
        coverage: false,
        correctness: false,
        uncovered: Vec::new(),
        uncovered_classes: Vec::new(),
        pass: false,
    };
    if !(cov.d0 > 0.0 && cov.step > 0.0) {
        report.problem_error = Some(format!("need D0 > 0 and step > 0, got {} and {}", cov.d0, cov.step));
        return report;
    }
    let safe = match safe_region(p) {
        Ok(s) => s,
        Err(e) => {
            report.problem_error = Some(e.to_string());
            return report;
        }
    };
    let space = &p.space;
    let mut covered = vec![false; space.samples().len()];
    for (index, t) in cov.triples.iter().enumerate() {
        if let Err(msg) = t.well_formed(space.samples().len()) {
            report.triples.push(TripleCheck {
                index,
                malformed: Some(msg),
                connected: false,
                diameter: f64::NAN,
                witness: None,
                diameter_ok: false,
                mislabeled: Vec::new(),
            });
            continue;
        }
        let (diameter, witness) = space.diameter_of(&t.support);
        let mut mislabeled = Vec::new();
        for (pos, &s) in t.support.iter().enumerate() {
            covered[s] = true;
            if let Some(k) = safe.class_of[s] {
                let got = t.label_at(pos);
                if got != p.labels[k] {
                    mislabeled.push((s, p.labels[k], got));
                }
            }
        }
        report.triples.push(TripleCheck {
            index,
            malformed: None,
            connected: space.chain_connected(&t.support, cov.step),
            diameter,
            witness,
            diameter_ok: diameter <= cov.d0 + EPS,
            mislabeled,
        });
    }
    let well = report.triples.iter().all(|c| c.malformed.is_none());
    report.connectivity = well && report.triples.iter().all(|c| c.connected);
    report.diameter = well && report.triples.iter().all(|c| c.diameter_ok);
    report.correctness = well && report.triples.iter().all(|c| c.mislabeled.is_empty());
    report.uncovered = safe.points().into_iter().filter(|&s| !covered[s]).collect();
    report.uncovered_classes = safe
        .per_class
        .iter()
        .enumerate()
        .filter(|(_, list)| list.iter().any(|&s| !covered[s]))
        .map(|(k, _)| k)
        .collect();
    report.coverage = report.uncovered.is_empty();
    report.pass = report.connectivity && report.diameter && report.coverage && report.correctness;
    report
}

/// One triple per class: the class's safe list with its constant label.
///
/// Every class must be a ball of radius `r` with `D0 >= 2r + γ`, so the safe
/// ball has diameter at most `D0` (for the standard radius γ/4 this is
/// `D0 >= 3γ/2`).
pub fn canonical_covering(p: &MarginProblem, d0: f64) -> Result<UrysohnCovering> {
    for (k, class) in p.classes.iter().enumerate() {
        match &class.region {
            Region::Ball { radius, .. } => {
                let need = 2.0 * radius + p.gamma;
                if d0 + EPS < need {
                    return Err(invalid(
                        "D0",
                        format!("D0 = {d0} is below the safe-ball diameter {need} of class {k}"),
                    ));
                }
            }
            _ => return Err(invalid("problem", "canonical coverings need every class to be a ball")),
        }
    }
    let safe = safe_region(p)?;
    let triples = safe
        .per_class
        .iter()
        .enumerate()
        .map(|(k, list)| UrysohnTriple::constant(list.clone(), p.num_classes(), p.labels[k]))
        .collect();
    Ok(UrysohnCovering {
        triples,
        d0,
        step: p.space.connectivity_step(),
    })
}

/// Lower-bound certificate.
///
/// Every class sample must be covered, and a support of diameter at most
/// `D0` can only meet classes pairwise within `D0` of each other. So the
/// number of connected components of the reach graph (edge `jk` iff
/// `d(A_j, A_k) <= D0`) bounds the width from below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub d0: f64,
    pub num_classes: usize,
    /// Minimum distance between safe lists of distinct classes; `None` for one class.
    pub delta_star: Option<f64>,
    /// Minimum distance between distinct classes; `None` for one class.
    pub min_class_distance: Option<f64>,
    /// Reach-graph components over classes.
    pub components: Vec<Vec<usize>>,
    pub lb: usize,
    /// True when some reach edge exists, so `lb < K` is a conservative count.
    pub conservative: bool,
}

pub fn separation_certificate(p: &MarginProblem, d0: f64) -> Result<SeparationCertificate> {
    let safe = safe_region(p)?;
    Ok(separation_with(p, &safe, d0))
}

fn separation_with(p: &MarginProblem, safe: &SafeRegion, d0: f64) -> SeparationCertificate {
    let k = p.num_classes();
    let mut sets = crate::graph::DisjointSets::new(k);
    let mut delta_star: Option<f64> = None;
    let mut min_class: Option<f64> = None;
    let mut edges = false;
    for i in 0..k {
        for j in (i + 1)..k {
            let class_d = p.class_distance(i, j);
            let gap = safe_gap(p, &safe.per_class, i, j);
            delta_star = Some(delta_star.map_or(gap, |d| d.min(gap)));
            min_class = Some(min_class.map_or(class_d, |d| d.min(class_d)));
            if class_d <= d0 {
                sets.union(i, j);
                edges = true;
            }
        }
    }
    let components = sets.groups();
    SeparationCertificate {
        d0,
        num_classes: k,
        delta_star,
        min_class_distance: min_class,
        lb: components.len(),
        components,
        conservative: edges,
    }
}

/// Radii tried by `min_ball_cover` by default: `0` and `D0/2 · i/8`.
pub fn default_radii(d0: f64) -> Vec<f64> {
    std::iter::once(0.0)
        .chain((1..=8).map(|i| d0 / 2.0 * i as f64 / 8.0))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMethod {
    Exact,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallCover {
    pub covering: UrysohnCovering,
    pub method: CoverMethod,
    /// `(center sample id, radius)` of each chosen ball.
    pub balls: Vec<(usize, f64)>,
}

/// Minimum cover of the safe samples by sampled geodesic balls.
///
/// Candidates are balls around sample points with the given radii, kept
/// when their diameter is at most `D0` and they are chain connected. Exact
/// for at most 24 safe points, greedy above.
pub fn min_ball_cover(p: &MarginProblem, d0: f64, radii: &[f64]) -> Result<BallCover> {
    if !(d0 > 0.0) {
        return Err(invalid("D0", format!("locality scale must be positive, got {d0}")));
    }
    let safe = safe_region(p)?;
    let space = &p.space;
    let step = space.connectivity_step();
    let points = safe.points();
    let index_of = |s: usize| points.binary_search(&s).ok();
    let rmax = radii.iter().copied().fold(0.0, f64::max);

    let mut candidates: Vec<(usize, f64, Vec<usize>)> = Vec::new();
    let mut masks: Vec<Bits> = Vec::new();
    for c in 0..space.samples().len() {
        let near = points.iter().any(|&s| space.sample_distance(c, s) <= rmax + EPS);
        if !near {
            continue;
        }
        let mut by_distance: Vec<(f64, usize)> = (0..space.samples().len())
            .map(|s| (space.sample_distance(c, s), s))
            .filter(|&(d, _)| d <= rmax + EPS)
            .collect();
        by_distance.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &r in radii {
            let mut support: Vec<usize> = by_distance
                .iter()
                .take_while(|(d, _)| *d <= r + EPS)
                .map(|&(_, s)| s)
                .collect();
            support.sort_unstable();
            let mut mask = Bits::new(points.len());
            for &s in &support {
                if let Some(i) = index_of(s) {
                    mask.insert(i);
                }
            }
            if mask.is_empty() {
                continue;
            }
            if space.diameter_of(&support).0 > d0 + EPS || !space.chain_connected(&support, step) {
                continue;
            }
            candidates.push((c, r, support));
            masks.push(mask);
        }
    }
    let kept = prune_dominated(&masks);
    let kept_masks: Vec<Bits> = kept.iter().map(|&i| masks[i].clone()).collect();
    let (chosen, method) = if points.len() <= EXACT_LIMIT {
        let small: Vec<u32> = kept_masks.iter().map(Bits::low_u32).collect();
        match exact_cover(points.len(), &small) {
            Some(c) => (c, CoverMethod::Exact),
            None => {
                return Err(Error::Uncoverable {
                    uncovered: uncoverable(&points, &kept_masks),
                })
            }
        }
    } else {
        match greedy_cover(points.len(), &kept_masks) {
            Ok(c) => (c, CoverMethod::Greedy),
            Err(missing) => {
                return Err(Error::Uncoverable {
                    uncovered: missing.into_iter().map(|i| points[i]).collect(),
                })
            }
        }
    };
    let mut triples = Vec::with_capacity(chosen.len());
    let mut balls = Vec::with_capacity(chosen.len());
    for idx in chosen {
        let (c, r, support) = &candidates[kept[idx]];
        let labels = support
            .iter()
            .map(|&s| p.labels[safe.class_of[s].unwrap_or_else(|| nearest_class(p, s))])
            .collect();
        triples.push(UrysohnTriple {
            support: support.clone(),
            num_labels: p.num_classes(),
            assignment: Assignment::PerPoint { labels },
        });
        balls.push((*c, *r));
    }
    Ok(BallCover {
        covering: UrysohnCovering { triples, d0, step },
        method,
        balls,
    })
}

fn uncoverable(points: &[usize], masks: &[Bits]) -> Vec<usize> {
    (0..points.len())
        .filter(|&i| masks.iter().all(|m| !m.contains(i)))
        .map(|i| points[i])
        .collect()
}

fn nearest_class(p: &MarginProblem, s: usize) -> usize {
    (0..p.num_classes())
        .map(|k| (p.distance_to_class(s, k), k))
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(_, k)| k)
        .expect("problems have at least one class")
}

/// Lower bound on any covering: the minimum number of `D0`-cliques of safe
/// points needed to cover them (every support of diameter at most `D0` is
/// such a clique). Needs at most 24 safe points.
pub fn clique_cover_bound(p: &MarginProblem, d0: f64) -> Result<usize> {
    let safe = safe_region(p)?;
    let points = safe.points();
    if points.len() > EXACT_LIMIT {
        return Err(invalid(
            "problem",
            format!("{} safe points exceed the exact limit {EXACT_LIMIT}", points.len()),
        ));
    }
    let n = points.len();
    let mut adj = vec![0u64; n];
    for a in 0..n {
        for b in (a + 1)..n {
            if p.space.sample_distance(points[a], points[b]) <= d0 + EPS {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
    }
    let cliques: Vec<u32> = maximal_cliques(&adj).into_iter().map(|c| c as u32).collect();
    Ok(exact_cover(n, &cliques).map_or(0, |c| c.len()))
}

/// True iff no covering of `size` triples can exist.
pub fn covering_infeasible(p: &MarginProblem, d0: f64, size: usize) -> Result<bool> {
    Ok(clique_cover_bound(p, d0)? > size)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperSource {
    Canonical,
    BallCover,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperCertificate {
    pub source: UpperSource,
    pub method: Option<CoverMethod>,
    pub covering: UrysohnCovering,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthBracket {
    pub problem: ProblemSpec,
    pub d0: f64,
    pub lb: usize,
    pub ub: usize,
    pub exact: bool,
    pub lower: SeparationCertificate,
    pub upper: UpperCertificate,
}

/// Certified interval around the width at scale `D0`.
pub fn width_bracket(p: &MarginProblem, d0: f64) -> Result<WidthBracket> {
    width_bracket_with(p, d0, &default_radii(d0))
}

pub fn width_bracket_with(p: &MarginProblem, d0: f64, radii: &[f64]) -> Result<WidthBracket> {
    if !(d0 > 0.0) {
        return Err(invalid("D0", format!("locality scale must be positive, got {d0}")));
    }
    let safe = safe_region(p)?;
    let lower = separation_with(p, &safe, d0);
    let mut best: Option<UpperCertificate> = None;
    if let Ok(cov) = canonical_covering(p, d0) {
        if verify_covering(p, &cov).pass {
            best = Some(UpperCertificate {
                source: UpperSource::Canonical,
                method: None,
                covering: cov,
            });
        }
    }
    let ball = min_ball_cover(p, d0, radii);
    match ball {
        Ok(b) => {
            let better = best.as_ref().is_none_or(|u| b.covering.len() < u.covering.len());
            if better && verify_covering(p, &b.covering).pass {
                best = Some(UpperCertificate {
                    source: UpperSource::BallCover,
                    method: Some(b.method),
                    covering: b.covering,
                });
            }
        }
        Err(e) if best.is_none() => return Err(e),
        Err(_) => {}
    }
    let upper = best.ok_or_else(|| Error::Uncoverable {
        uncovered: safe.points(),
    })?;
    let ub = upper.covering.len();
    Ok(WidthBracket {
        problem: p.spec.clone(),
        d0,
        lb: lower.lb,
        ub,
        exact: lower.lb == ub,
        lower,
        upper,
    })
}

/// Family parameters for the admissible `D0` window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WindowFamily {
    Bouquet { length: f64, gamma: f64 },
    Scaled { length: f64, gamma: f64, per_loop: usize },
    Wedge { radius: f64, gamma: f64 },
}

/// Half-open interval `[lo, hi)` of admissible `D0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
    /// Explanation when empty.
    pub message: Option<String>,
}

impl Window {
    pub fn contains(&self, d0: f64) -> bool {
        !self.empty && self.lo <= d0 && d0 < self.hi
    }
}

pub fn parameter_window(family: WindowFamily) -> Window {
    let (lo, hi) = match family {
        WindowFamily::Bouquet { length, gamma } => (1.5 * gamma, length / 2.0 - 0.75 * gamma),
        WindowFamily::Scaled {
            length,
            gamma,
            per_loop,
        } => (
            1.5 * gamma,
            (length / (2.0 * per_loop as f64) - 1.5 * gamma).min(length / 4.0 - 0.75 * gamma),
        ),
        WindowFamily::Wedge { radius, gamma } => (1.5 * gamma, std::f64::consts::PI * radius - 0.75 * gamma),
    };
    let empty = !(lo < hi);
    let message = empty.then(|| match family {
        WindowFamily::Bouquet { length, gamma } => format!(
            "empty D0 window [{lo}, {hi}): the bouquet construction is satisfiable only when L > 9γ/2 (L = {length}, 9γ/2 = {})",
            4.5 * gamma
        ),
        _ => format!("empty D0 window [{lo}, {hi})"),
    });
    Window { lo, hi, empty, message }
}
