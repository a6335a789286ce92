//! Sampling experiments on safe regions: coupon-collector coverage times
//! and the label-permutation learner.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metric::Point;
use crate::problems::{MarginProblem, SafeRegion};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Generator for one trial; independent streams per `(w, trial)` under one seed.
pub fn trial_rng(seed: u64, w: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((w as u64) << 32) | trial as u64);
    rng
}

/// Region weights `q_1..q_K` within the band `[1/(c1 K), c2/K]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionLaw {
    weights: Vec<f64>,
    cdf: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
}

impl RegionLaw {
    pub fn new(weights: Vec<f64>, c1: f64, c2: f64) -> Result<Self> {
        let k = weights.len();
        if k == 0 {
            return Err(invalid("weights", "need at least one region"));
        }
        if !(c1 >= 1.0 && c2 >= 1.0) {
            return Err(invalid(
                "c1",
                format!("band constants must be at least 1, got {c1}, {c2}"),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("weights", format!("weights sum to {total}, not 1")));
        }
        let (lo, hi) = (1.0 / (c1 * k as f64), c2 / k as f64);
        if let Some((j, q)) = weights
            .iter()
            .enumerate()
            .find(|(_, &q)| q < lo - 1e-12 || q > hi + 1e-12)
        {
            return Err(invalid(
                "weights",
                format!("weight {q} of region {j} outside the band [{lo}, {hi}]"),
            ));
        }
        let mut acc = 0.0;
        let cdf = weights
            .iter()
            .map(|q| {
                acc += q;
                acc
            })
            .collect();
        Ok(RegionLaw { weights, cdf, c1, c2 })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![1.0 / k as f64; k], 1.0, 1.0)
    }

    /// Alternating heavy (`1.5/K`) and light (`0.5/K`) regions, `c1 = c2 = 2`.
    /// With odd `K` the last region keeps `1/K`.
    pub fn stress(k: usize) -> Result<Self> {
        let kf = k as f64;
        let weights = (0..k)
            .map(|j| {
                if k % 2 == 1 && j == k - 1 {
                    1.0 / kf
                } else if j % 2 == 0 {
                    1.5 / kf
                } else {
                    0.5 / kf
                }
            })
            .collect::<Vec<_>>();
        let total: f64 = weights.iter().sum();
        Self::new(weights.iter().map(|q| q / total).collect(), 2.0, 2.0)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Inverse-CDF draw from one uniform.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let j = self.cdf.partition_point(|&c| c <= u);
        j.min(self.weights.len() - 1)
    }
}

/// A region law attached to the safe lists of a problem.
#[derive(Clone, Debug)]
pub struct SamplingDistribution<'a> {
    pub law: RegionLaw,
    problem: &'a MarginProblem,
    safe: &'a SafeRegion,
}

impl<'a> SamplingDistribution<'a> {
    pub fn new(problem: &'a MarginProblem, safe: &'a SafeRegion, law: RegionLaw) -> Result<Self> {
        if law.len() != problem.num_classes() {
            return Err(invalid(
                "weights",
                format!("{} weights for {} regions", law.len(), problem.num_classes()),
            ));
        }
        Ok(SamplingDistribution { law, problem, safe })
    }

    /// A labeled safe sample: region by weight, point uniform in its safe list.
    pub fn sample_safe<R: Rng + ?Sized>(&self, rng: &mut R) -> (Point, usize) {
        let j = self.law.draw(rng);
        let list = &self.safe.per_class[j];
        let s = list[rng.random_range(0..list.len())];
        (self.problem.space.sample(s).clone(), self.problem.labels[j])
    }

    /// A stream of `n` labeled safe samples.
    pub fn stream<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<(Point, usize)> {
        (0..n).map(|_| self.sample_safe(rng)).collect()
    }
}

/// Draws until every region has appeared.
pub fn coupon_time<R: Rng + ?Sized>(law: &RegionLaw, rng: &mut R) -> usize {
    let mut seen = vec![false; law.len()];
    let mut left = law.len();
    let mut n = 0;
    while left > 0 {
        n += 1;
        let j = law.draw(rng);
        if !seen[j] {
            seen[j] = true;
            left -= 1;
        }
    }
    n
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouponRow {
    pub w: usize,
    pub trials: usize,
    pub mean: f64,
    pub median: f64,
    pub seed: u64,
}

pub fn coupon_stats(law: &RegionLaw, trials: usize, seed: u64) -> Result<CouponRow> {
    if trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    let w = law.len();
    let mut times: Vec<usize> = (0..trials)
        .map(|t| coupon_time(law, &mut trial_rng(seed, w, t)))
        .collect();
    let mean = times.iter().sum::<usize>() as f64 / trials as f64;
    times.sort_unstable();
    let median = if trials % 2 == 1 {
        times[trials / 2] as f64
    } else {
        (times[trials / 2 - 1] + times[trials / 2]) as f64 / 2.0
    };
    Ok(CouponRow {
        w,
        trials,
        mean,
        median,
        seed,
    })
}

/// Ordinary least squares `y = slope x + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    LinearFit {
        slope,
        intercept,
        r_squared: 1.0 - ss_res / ss_tot,
    }
}

/// Fits `mean T - γ_E w` against `w ln w`.
///
/// The expected coverage time is `w H_w = w ln w + γ_E w + 1/2 + o(1)`;
/// removing the linear term leaves a unit slope on `w ln w`.
pub fn coupon_regression(rows: &[CouponRow]) -> LinearFit {
    let x: Vec<f64> = rows.iter().map(|r| r.w as f64 * (r.w as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mean - EULER_GAMMA * r.w as f64).collect();
    linear_fit(&x, &y)
}

/// Wilson score interval for `successes / trials`.
pub fn wilson(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // exact endpoints at the boundary, where rounding could exclude p itself
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0).min(p)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (center + half).min(1.0).max(p)
    };
    (lo, hi)
}

/// Outcome of one learner trial at one budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct TrialOutcome {
    success: bool,
    missed: usize,
}

/// Runs one trial and reports the outcome at each budget in ascending `budgets`.
///
/// The learner labels every observed region with its observed label and
/// matches the missed regions, in index order, to the unused labels sorted
/// by a random priority: a uniform random bijection. All budgets share one
/// sample prefix.
fn learner_trial(law: &RegionLaw, budgets: &[usize], rng: &mut ChaCha8Rng) -> Vec<TrialOutcome> {
    let w = law.len();
    let mut sigma: Vec<usize> = (0..w).collect();
    sigma.shuffle(rng);
    let mut priority: Vec<usize> = (0..w).collect();
    priority.shuffle(rng);
    let mut seen = vec![false; w];
    let mut drawn = 0;
    let mut out = Vec::with_capacity(budgets.len());
    for &n in budgets {
        while drawn < n {
            seen[law.draw(rng)] = true;
            drawn += 1;
        }
        let missed: Vec<usize> = (0..w).filter(|&j| !seen[j]).collect();
        let mut unused: Vec<usize> = missed.iter().map(|&j| sigma[j]).collect();
        unused.sort_by_key(|&l| priority[l]);
        let success = missed.iter().zip(&unused).all(|(&j, &l)| sigma[j] == l);
        out.push(TrialOutcome {
            success,
            missed: missed.len(),
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerRow {
    pub w: usize,
    pub n: usize,
    /// `n / (w ln w)`.
    pub ratio: f64,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub all_seen: usize,
    pub one_missed: usize,
    pub multi_missed: usize,
    /// `P(all seen) + P(some missed)/2`.
    pub stated_bound: f64,
    /// `P(all seen) + P(exactly one missed) + P(two or more missed)/2`.
    pub corrected_bound: f64,
    /// Mean and standard error of `1[success] - (1[all seen] + 1[missed]/2)`.
    pub stated_excess: f64,
    pub stated_excess_se: f64,
    /// Same for the corrected bound.
    pub corrected_excess: f64,
    pub corrected_excess_se: f64,
    pub seed: u64,
}

impl LearnerRow {
    /// The stated bound holds within Monte-Carlo error (one-sided, 95%).
    pub fn stated_bound_holds(&self) -> bool {
        self.stated_excess <= Z95 * self.stated_excess_se
    }

    /// The corrected bound holds within Monte-Carlo error (one-sided, 95%).
    pub fn corrected_bound_holds(&self) -> bool {
        self.corrected_excess <= Z95 * self.corrected_excess_se
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    n: f64,
    sum: f64,
    sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sq += x * x;
    }

    fn mean(&self) -> f64 {
        self.sum / self.n
    }

    fn standard_error(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        let m = self.mean();
        let var = (self.sq - self.n * m * m) / (self.n - 1.0);
        (var.max(0.0) / self.n).sqrt()
    }
}

fn w_ln_w(w: usize) -> f64 {
    let wf = w as f64;
    wf * wf.ln()
}

fn learner_rows(law: &RegionLaw, budgets: &[usize], trials: usize, seed: u64) -> Vec<LearnerRow> {
    let w = law.len();
    let mut sorted = budgets.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut success = vec![0usize; sorted.len()];
    let mut counts = vec![[0usize; 3]; sorted.len()];
    // per-trial excess of success over the stated bound
    let mut excess = vec![Moments::default(); sorted.len()];
    let mut corrected = vec![Moments::default(); sorted.len()];
    for t in 0..trials {
        let mut rng = trial_rng(seed, w, t);
        for (g, o) in learner_trial(law, &sorted, &mut rng).into_iter().enumerate() {
            success[g] += o.success as usize;
            counts[g][o.missed.min(2)] += 1;
            let hit = o.success as u8 as f64;
            excess[g].push(hit - if o.missed == 0 { 1.0 } else { 0.5 });
            corrected[g].push(hit - if o.missed <= 1 { 1.0 } else { 0.5 });
        }
    }
    let n = trials as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(g, &budget)| {
            let [all, one, multi] = counts[g];
            let (lo, hi) = wilson(success[g], trials, Z95);
            LearnerRow {
                w,
                n: budget,
                ratio: budget as f64 / w_ln_w(w),
                trials,
                successes: success[g],
                rate: success[g] as f64 / n,
                wilson_lo: lo,
                wilson_hi: hi,
                all_seen: all,
                one_missed: one,
                multi_missed: multi,
                stated_bound: (all as f64 + 0.5 * (one + multi) as f64) / n,
                corrected_bound: (all as f64 + one as f64 + 0.5 * multi as f64) / n,
                stated_excess: excess[g].mean(),
                stated_excess_se: excess[g].standard_error(),
                corrected_excess: corrected[g].mean(),
                corrected_excess_se: corrected[g].standard_error(),
                seed,
            }
        })
        .collect()
}

/// Success rate of the permutation learner at budget `n`.
pub fn permutation_learner_experiment(law: &RegionLaw, n: usize, trials: usize, seed: u64) -> Result<LearnerRow> {
    if law.len() < 2 {
        return Err(invalid("w", "the permutation learner needs at least two regions"));
    }
    if trials == 0 {
        return Err(invalid("trials", "need at least one trial"));
    }
    Ok(learner_rows(law, &[n], trials, seed).remove(0))
}

/// Budgets of a sweep, either as absolute counts or as ratios to `w ln w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum SweepGrid {
    Counts(Vec<usize>),
    Ratios(Vec<f64>),
}

impl SweepGrid {
    pub fn budgets(&self, w: usize) -> Vec<usize> {
        match self {
            SweepGrid::Counts(c) => c.clone(),
            SweepGrid::Ratios(r) => r.iter().map(|&x| ((x * w_ln_w(w)).ceil() as usize).max(1)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub rows: Vec<LearnerRow>,
    /// First grid ratio with success at least 2/3, per `w`.
    pub crossings: Vec<(usize, Option<f64>)>,
}

/// Success rate versus budget for each `w`, with shared sample prefixes
/// across budgets of the same trial.
pub fn threshold_sweep(ws: &[usize], grid: &SweepGrid, trials: usize, seed: u64, stress: bool) -> Result<TrialStats> {
    let mut rows = Vec::new();
    let mut crossings = Vec::new();
    for &w in ws {
        let law = if stress {
            RegionLaw::stress(w)?
        } else {
            RegionLaw::uniform(w)?
        };
        if w < 2 {
            return Err(invalid("w", "the permutation learner needs at least two regions"));
        }
        let block = learner_rows(&law, &grid.budgets(w), trials, seed);
        crossings.push((w, block.iter().find(|r| r.rate >= 2.0 / 3.0).map(|r| r.ratio)));
        rows.extend(block);
    }
    Ok(TrialStats { rows, crossings })
}

impl TrialStats {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for row in &self.rows {
            writer.serialize(row)?;
        }
        writer.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_region_always_drawn() {
        let law = RegionLaw::uniform(1).unwrap();
        let mut rng = trial_rng(1, 1, 0);
        for _ in 0..100 {
            assert_eq!(law.draw(&mut rng), 0);
        }
        assert_eq!(coupon_time(&law, &mut rng), 1);
    }

    #[test]
    fn band_is_enforced() {
        assert!(RegionLaw::new(vec![0.7, 0.3], 1.0, 1.0).is_err());
        assert!(RegionLaw::new(vec![0.7, 0.3], 2.0, 2.0).is_ok());
        assert!(RegionLaw::new(vec![0.5, 0.4], 2.0, 2.0).is_err());
        let s = RegionLaw::stress(5).unwrap();
        assert!((s.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coupon_mean_for_four_regions() {
        let law = RegionLaw::uniform(4).unwrap();
        let row = coupon_stats(&law, 100_000, 11).unwrap();
        assert!((row.mean - 25.0 / 3.0).abs() < 0.1, "{}", row.mean);
    }

    #[test]
    fn wilson_interval_brackets_the_rate() {
        let (lo, hi) = wilson(50, 100, Z95);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!((hi - lo - 0.19).abs() < 0.01);
        assert_eq!(wilson(0, 10, Z95).0, 0.0);
    }

    #[test]
    fn fit_recovers_a_line() {
        let fit = linear_fit(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_missed_region_always_succeeds() {
        let law = RegionLaw::uniform(6).unwrap();
        for t in 0..500 {
            let mut rng = trial_rng(3, 6, t);
            for o in learner_trial(&law, &[1, 3, 5, 8, 12, 20], &mut rng) {
                if o.missed <= 1 {
                    assert!(o.success);
                }
            }
        }
    }

    #[test]
    fn huge_budget_succeeds() {
        let law = RegionLaw::uniform(16).unwrap();
        let n = (10.0 * w_ln_w(16)).ceil() as usize;
        let row = permutation_learner_experiment(&law, n, 1000, 5).unwrap();
        assert!(row.rate >= 0.99);
    }

    #[test]
    fn sweep_is_deterministic_and_monotone() {
        let grid = SweepGrid::Counts(vec![1, 2, 4, 6, 10]);
        let a = threshold_sweep(&[2, 5], &grid, 300, 9, false).unwrap();
        let b = threshold_sweep(&[2, 5], &grid, 300, 9, false).unwrap();
        assert_eq!(a, b);
        for pair in a.rows.windows(2) {
            if pair[0].w == pair[1].w {
                assert!(pair[0].successes <= pair[1].successes);
            }
        }
        assert!(a.crossings[0].1.is_some());
    }
}
