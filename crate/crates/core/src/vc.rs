//! Exact VC dimension on small ground sets, the interval-union and
//! patchwise hypothesis classes, and the width-versus-VC report.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::coverings::width_bracket;
use crate::error::{invalid, Error, Result};
use crate::problems::{bouquet_problem, interval_union_problem};

/// Largest ground set accepted by binary tables.
pub const GROUND_CAP: usize = 22;

/// Hypotheses over an ordered ground set `0..ground`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisTable {
    /// Each hypothesis is the bitmask of points labeled 1. Sorted, deduplicated.
    Binary { ground: usize, masks: Vec<u32> },
    /// Label vectors over `num_labels` labels. Sorted, deduplicated.
    Multiclass {
        ground: usize,
        num_labels: usize,
        rows: Vec<Vec<usize>>,
    },
}

impl HypothesisTable {
    pub fn binary(ground: usize, masks: impl IntoIterator<Item = u32>) -> Result<Self> {
        if ground > GROUND_CAP {
            return Err(Error::GroundSetTooLarge {
                size: ground,
                cap: GROUND_CAP,
            });
        }
        let mut masks: Vec<u32> = masks.into_iter().collect();
        if let Some(&bad) = masks.iter().find(|&&m| ground < 32 && m >> ground != 0) {
            return Err(invalid(
                "masks",
                format!("mask {bad:#b} has bits outside the ground set"),
            ));
        }
        masks.sort_unstable();
        masks.dedup();
        Ok(HypothesisTable::Binary { ground, masks })
    }

    pub fn multiclass(ground: usize, num_labels: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        if rows.iter().any(|r| r.len() != ground) {
            return Err(invalid("rows", format!("every label vector needs {ground} entries")));
        }
        if rows.iter().flatten().any(|&l| l >= num_labels) {
            return Err(invalid("rows", format!("labels must lie in 0..{num_labels}")));
        }
        let mut rows = rows;
        rows.sort();
        rows.dedup();
        Ok(HypothesisTable::Multiclass {
            ground,
            num_labels,
            rows,
        })
    }

    pub fn ground(&self) -> usize {
        match self {
            HypothesisTable::Binary { ground, .. } | HypothesisTable::Multiclass { ground, .. } => *ground,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            HypothesisTable::Binary { masks, .. } => masks.len(),
            HypothesisTable::Multiclass { rows, .. } => rows.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `log2 |H|`, the cardinality bound on any dimension of the class.
    pub fn log2_cardinality(&self) -> f64 {
        (self.len() as f64).log2()
    }

    /// CSV with a header `x0,x1,...` naming the ground points and one row of
    /// labels per hypothesis.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        writer.write_record((0..self.ground()).map(|i| format!("x{i}")))?;
        match self {
            HypothesisTable::Binary { ground, masks } => {
                for m in masks {
                    writer.write_record((0..*ground).map(|i| (m >> i & 1).to_string()))?;
                }
            }
            HypothesisTable::Multiclass { rows, .. } => {
                for r in rows {
                    writer.write_record(r.iter().map(|l| l.to_string()))?;
                }
            }
        }
        writer.flush()?;
        Ok(())
    }

    /// Reads label rows; all-binary rows give a binary table.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(input);
        let ground = reader.headers()?.len();
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| f.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| invalid("table", e.to_string()))?;
            rows.push(row);
        }
        if rows.iter().any(|r| r.len() != ground) {
            return Err(invalid("table", "rows differ in length from the header"));
        }
        let top = rows.iter().flatten().copied().max().unwrap_or(0);
        if top <= 1 && ground <= GROUND_CAP {
            let masks = rows
                .iter()
                .map(|r| r.iter().enumerate().fold(0u32, |m, (i, &b)| m | (b as u32) << i));
            return Self::binary(ground, masks);
        }
        Self::multiclass(ground, top + 1, rows)
    }
}

/// Exact VC dimension of a binary table.
///
/// Depth-first over subsets in increasing element order, extending only
/// shattered sets. Each node keeps one hypothesis per distinct pattern on
/// the chosen points and the points not yet considered, which is all any
/// extension can distinguish.
pub fn vc_dimension(t: &HypothesisTable) -> Result<usize> {
    let (ground, masks) = match t {
        HypothesisTable::Binary { ground, masks } => (*ground, masks),
        HypothesisTable::Multiclass { .. } => return Err(Error::MulticlassTable),
    };
    if ground > GROUND_CAP {
        return Err(Error::GroundSetTooLarge {
            size: ground,
            cap: GROUND_CAP,
        });
    }
    let mut best = 0;
    if masks.len() >= 2 {
        search(masks, 0, 0, 0, ground, &mut best);
    }
    Ok(best)
}

fn search(reps: &[u32], chosen: u32, size: usize, start: usize, ground: usize, best: &mut usize) {
    for x in start..ground {
        if size + (ground - x) <= *best {
            return;
        }
        let next = chosen | 1 << x;
        let mut proj: Vec<u32> = reps.iter().map(|h| h & next).collect();
        proj.sort_unstable();
        proj.dedup();
        if proj.len() != 1 << (size + 1) {
            continue;
        }
        *best = (*best).max(size + 1);
        let above = if x + 1 >= 32 { 0 } else { !0u32 << (x + 1) };
        let key = next | above;
        let mut child: Vec<u32> = Vec::with_capacity(reps.len());
        let mut keys: Vec<(u32, u32)> = reps.iter().map(|&h| (h & key, h)).collect();
        keys.sort_unstable_by_key(|k| k.0);
        keys.dedup_by_key(|k| k.0);
        child.extend(keys.into_iter().map(|k| k.1));
        if child.len() >= 1 << (size + 2) {
            search(&child, next, size + 1, x + 1, ground, best);
        }
    }
}

/// Indicators of all unions of at most `n` grid-aligned intervals on a grid of `grid` points.
pub fn intervals_class(n: usize, grid: usize) -> Result<HypothesisTable> {
    if n == 0 {
        return Err(invalid("n", "need at least one interval"));
    }
    if grid < 4 * n + 4 {
        return Err(invalid("grid", format!("grid {grid} is below 4n + 4 = {}", 4 * n + 4)));
    }
    if grid > GROUND_CAP {
        return Err(Error::GroundSetTooLarge {
            size: grid,
            cap: GROUND_CAP,
        });
    }
    let masks = (0u32..1 << grid).filter(|&m| (m & !(m << 1)).count_ones() as usize <= n);
    HypothesisTable::binary(grid, masks)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Patchwise {
    pub w: usize,
    /// `w^w` as a float; exact for the small `w` used here.
    pub cardinality: f64,
    /// `w log2 w`.
    pub log2_bound: f64,
    /// All label assignments over one representative point per arc, for `w <= 6`.
    pub table: Option<HypothesisTable>,
    /// One-vs-rest indicators of those assignments, for `w <= 6`.
    pub one_vs_rest: Option<HypothesisTable>,
}

/// Classifiers constant on each of `w` arcs with labels in `0..w`.
pub fn patchwise_class(w: usize) -> Result<Patchwise> {
    if w == 0 {
        return Err(invalid("w", "need at least one arc"));
    }
    let wf = w as f64;
    let (table, one_vs_rest) = if w <= 6 {
        let total = w.pow(w as u32);
        let rows: Vec<Vec<usize>> = (0..total)
            .map(|mut code| {
                (0..w)
                    .map(|_| {
                        let l = code % w;
                        code /= w;
                        l
                    })
                    .collect()
            })
            .collect();
        let indicators = rows.iter().flat_map(|r| {
            (0..w).map(move |l| {
                r.iter()
                    .enumerate()
                    .fold(0u32, |m, (i, &x)| if x == l { m | 1 << i } else { m })
            })
        });
        let binary = HypothesisTable::binary(w, indicators)?;
        (Some(HypothesisTable::multiclass(w, w, rows)?), Some(binary))
    } else {
        (None, None)
    };
    Ok(Patchwise {
        w,
        cardinality: wf.powf(wf),
        log2_bound: wf * wf.log2(),
        table,
        one_vs_rest,
    })
}

/// Parameters of the two problem families compared by the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSetup {
    pub length: f64,
    pub gamma: f64,
    pub resolution: f64,
    pub d0: f64,
    pub interval_gamma: f64,
    pub interval_grid: usize,
    pub interval_d0: f64,
}

impl Default for ReportSetup {
    fn default() -> Self {
        ReportSetup {
            length: 10.0,
            gamma: 1.0,
            resolution: 0.4,
            d0: 4.0,
            interval_gamma: 0.05,
            interval_grid: 101,
            interval_d0: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BouquetRow {
    pub w: usize,
    pub lb: usize,
    pub ub: usize,
    pub cardinality: f64,
    pub log2_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalRow {
    pub n: usize,
    pub lb: usize,
    pub ub: usize,
    pub grid: usize,
    pub vc: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub setup: ReportSetup,
    pub bouquet: BouquetRow,
    pub interval: IntervalRow,
}

/// `n` evenly spread intervals `[(2i+1)/(2n+1), (2i+2)/(2n+1)]`.
pub fn spread_intervals(n: usize) -> Vec<(f64, f64)> {
    let m = (2 * n + 1) as f64;
    (0..n)
        .map(|i| ((2 * i + 1) as f64 / m, (2 * i + 2) as f64 / m))
        .collect()
}

/// Width against hypothesis-class size in both directions: many loops give
/// large width with a small multiclass class, many intervals give width one
/// with growing VC dimension.
pub fn separation_report(w: usize, n: usize, setup: &ReportSetup) -> Result<SeparationReport> {
    let bouquet = bouquet_problem(w, setup.length, setup.gamma, setup.resolution)?;
    let b = width_bracket(&bouquet, setup.d0)?;
    let patch = patchwise_class(w)?;
    let intervals = interval_union_problem(&spread_intervals(n), setup.interval_gamma, setup.interval_grid)?;
    let i = width_bracket(&intervals, setup.interval_d0)?;
    let grid = 4 * n + 8;
    let vc = vc_dimension(&intervals_class(n, grid)?)?;
    Ok(SeparationReport {
        setup: setup.clone(),
        bouquet: BouquetRow {
            w,
            lb: b.lb,
            ub: b.ub,
            cardinality: patch.cardinality,
            log2_bound: patch.log2_bound,
        },
        interval: IntervalRow {
            n,
            lb: i.lb,
            ub: i.ub,
            grid,
            vc,
        },
    })
}

impl SeparationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let b = &self.bouquet;
        let i = &self.interval;
        writeln!(s, "family              width     class size").unwrap();
        writeln!(
            s,
            "bouquet w={:<9} ({}, {})    |H| = {} , log2 bound {:.2}",
            b.w, b.lb, b.ub, b.cardinality, b.log2_bound
        )
        .unwrap();
        writeln!(
            s,
            "intervals n={:<7} ({}, {})    VC = {} (grid {})",
            i.n, i.lb, i.ub, i.vc, i.grid
        )
        .unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_full_tables() {
        let one = HypothesisTable::binary(5, [0b10101]).unwrap();
        assert_eq!(vc_dimension(&one).unwrap(), 0);
        let full = HypothesisTable::binary(4, 0..16).unwrap();
        assert_eq!(vc_dimension(&full).unwrap(), 4);
    }

    #[test]
    fn thresholds_have_vc_one() {
        let t = HypothesisTable::binary(10, (0..=10).map(|k| ((1u32 << k) - 1) << (10 - k) & 0x3ff)).unwrap();
        assert_eq!(vc_dimension(&t).unwrap(), 1);
    }

    #[test]
    fn intervals_small_cases() {
        assert_eq!(vc_dimension(&intervals_class(1, 12).unwrap()).unwrap(), 2);
        assert_eq!(vc_dimension(&intervals_class(2, 16).unwrap()).unwrap(), 4);
        assert!(intervals_class(2, 11).is_err());
    }

    #[test]
    fn caps_and_multiclass() {
        assert!(matches!(
            HypothesisTable::binary(23, [0]),
            Err(Error::GroundSetTooLarge { size: 23, cap: 22 })
        ));
        let m = HypothesisTable::multiclass(2, 3, vec![vec![0, 2], vec![1, 1]]).unwrap();
        assert!(matches!(vc_dimension(&m), Err(Error::MulticlassTable)));
    }

    #[test]
    fn patchwise_counts() {
        let p = patchwise_class(3).unwrap();
        assert_eq!(p.table.as_ref().unwrap().len(), 27);
        assert!((p.log2_bound - 3.0 * 3f64.log2()).abs() < 1e-12);
        assert_eq!(vc_dimension(p.one_vs_rest.as_ref().unwrap()).unwrap(), 3);
        let one = patchwise_class(1).unwrap();
        assert_eq!(one.table.unwrap().len(), 1);
        assert_eq!(vc_dimension(one.one_vs_rest.as_ref().unwrap()).unwrap(), 0);
        assert!(patchwise_class(9).unwrap().table.is_none());
    }

    #[test]
    fn csv_round_trip() {
        let t = HypothesisTable::binary(3, [0b001, 0b110]).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "x0,x1,x2\n1,0,0\n0,1,1\n");
        assert_eq!(HypothesisTable::read_csv(buf.as_slice()).unwrap(), t);
    }

    #[test]
    fn degenerate_report_row() {
        let r = separation_report(1, 1, &ReportSetup::default()).unwrap();
        assert_eq!((r.bouquet.lb, r.bouquet.ub), (1, 1));
        assert_eq!((r.interval.lb, r.interval.ub), (1, 1));
        assert_eq!(r.interval.vc, 2);
        assert!(r.to_text().contains("VC = 2"));
    }
}
