//! Certificate files and their independent re-check.
//!
//! Verification rebuilds the problem from its embedded recipe and recomputes
//! every stored quantity; nothing in the file is trusted beyond the recipe,
//! `D0` and the covering itself.

use serde::{Deserialize, Serialize};
use urysohn::coverings::{separation_certificate, verify_covering, CoveringReport};
use urysohn::{ProblemSpec, UrysohnCovering, WidthBracket};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "certificate", rename_all = "snake_case")]
pub enum Certificate {
    WidthBracket(WidthBracket),
    Covering {
        problem: ProblemSpec,
        covering: UrysohnCovering,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    /// One line per mismatch or failed check.
    pub failures: Vec<String>,
    pub summary: Vec<String>,
}

impl Verdict {
    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }
}

fn same(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x.to_bits() == y.to_bits(),
        (None, None) => true,
        _ => false,
    }
}

fn covering_failures(report: &CoveringReport, out: &mut Verdict) {
    if let Some(e) = &report.problem_error {
        out.fail(format!("covering: {e}"));
        return;
    }
    if !report.connectivity {
        let bad: Vec<usize> = report
            .triples
            .iter()
            .filter(|t| !t.connected)
            .map(|t| t.index)
            .collect();
        out.fail(format!("connectivity fail: triples {bad:?} are not chain-connected"));
    }
    if !report.diameter {
        let bad: Vec<String> = report
            .triples
            .iter()
            .filter(|t| !t.diameter_ok)
            .map(|t| format!("{} (diameter {:.6})", t.index, t.diameter))
            .collect();
        out.fail(format!("diameter fail: triples {}", bad.join(", ")));
    }
    if !report.coverage {
        out.fail(format!(
            "coverage fail: {} safe points uncovered, classes {:?}",
            report.uncovered.len(),
            report.uncovered_classes
        ));
    }
    if !report.correctness {
        let n: usize = report.triples.iter().map(|t| t.mislabeled.len()).sum();
        out.fail(format!("correctness fail: {n} mislabeled safe points"));
    }
    for t in &report.triples {
        if let Some(m) = &t.malformed {
            out.fail(format!("triple {}: {m}", t.index));
        }
    }
}

pub fn verify(cert: &Certificate) -> Verdict {
    let mut out = Verdict::default();
    match cert {
        Certificate::WidthBracket(b) => {
            let problem = match b.problem.build() {
                Ok(p) => p,
                Err(e) => {
                    out.fail(format!("problem recipe does not build: {e}"));
                    return out;
                }
            };
            match separation_certificate(&problem, b.d0) {
                Ok(lower) => {
                    if lower.lb != b.lb {
                        out.fail(format!("lb mismatch: stored {}, recomputed {}", b.lb, lower.lb));
                    }
                    if lower.lb != b.lower.lb {
                        out.fail(format!(
                            "lower certificate lb mismatch: stored {}, recomputed {}",
                            b.lower.lb, lower.lb
                        ));
                    }
                    if !same(lower.delta_star, b.lower.delta_star) {
                        out.fail(format!(
                            "delta* mismatch: stored {:?}, recomputed {:?}",
                            b.lower.delta_star, lower.delta_star
                        ));
                    }
                    if !same(lower.min_class_distance, b.lower.min_class_distance) {
                        out.fail(format!(
                            "class distance mismatch: stored {:?}, recomputed {:?}",
                            b.lower.min_class_distance, lower.min_class_distance
                        ));
                    }
                    if lower.components != b.lower.components {
                        out.fail("reach components mismatch".into());
                    }
                    if lower.conservative != b.lower.conservative {
                        out.fail("conservative flag mismatch".into());
                    }
                    out.summary.push(format!(
                        "lower: lb = {} from {} reach components, delta* = {:?}{}",
                        lower.lb,
                        lower.components.len(),
                        lower.delta_star,
                        if lower.conservative { " (conservative)" } else { "" }
                    ));
                }
                Err(e) => out.fail(format!("lower bound recomputation failed: {e}")),
            }
            if (b.upper.covering.d0 - b.d0).abs() > 0.0 {
                out.fail(format!(
                    "covering D0 {} differs from bracket D0 {}",
                    b.upper.covering.d0, b.d0
                ));
            }
            if b.upper.covering.len() != b.ub {
                out.fail(format!(
                    "ub mismatch: stored {}, covering has {} triples",
                    b.ub,
                    b.upper.covering.len()
                ));
            }
            if b.lb > b.ub {
                out.fail(format!("lb {} exceeds ub {}", b.lb, b.ub));
            }
            if b.exact != (b.lb == b.ub) {
                out.fail(format!("exact flag {} disagrees with ({}, {})", b.exact, b.lb, b.ub));
            }
            let report = verify_covering(&problem, &b.upper.covering);
            covering_failures(&report, &mut out);
            out.summary.push(format!(
                "upper: covering of {} triples at D0 = {} {}",
                b.upper.covering.len(),
                b.d0,
                if report.pass { "verified" } else { "rejected" }
            ));
            out.summary.push(format!("bracket ({}, {})", b.lb, b.ub));
        }
        Certificate::Covering { problem, covering } => {
            let problem = match problem.build() {
                Ok(p) => p,
                Err(e) => {
                    out.fail(format!("problem recipe does not build: {e}"));
                    return out;
                }
            };
            let report = verify_covering(&problem, covering);
            covering_failures(&report, &mut out);
            out.summary.push(format!(
                "covering of {} triples at D0 = {}: connectivity {}, diameter {}, coverage {}, correctness {}",
                covering.len(),
                covering.d0,
                report.connectivity,
                report.diameter,
                report.coverage,
                report.correctness
            ));
        }
    }
    out.pass = out.failures.is_empty();
    out
}

/// Human-readable listing of a covering: one block per triple.
pub fn covering_text(cov: &UrysohnCovering) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "covering size {} D0 {} step {}", cov.len(), cov.d0, cov.step);
    for (i, t) in cov.triples.iter().enumerate() {
        let labels: Vec<String> = (0..t.support.len()).map(|p| t.label_at(p).to_string()).collect();
        let _ = writeln!(s, "triple {i} labels {}", t.num_labels);
        let _ = writeln!(
            s,
            "  support {}",
            t.support.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        );
        let _ = writeln!(s, "  assigned {}", labels.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use urysohn::{bouquet_problem, width_bracket};

    fn fresh() -> WidthBracket {
        width_bracket(&bouquet_problem(3, 10.0, 1.0, 0.4).unwrap(), 4.0).unwrap()
    }

    #[test]
    fn fresh_certificate_passes() {
        let v = verify(&Certificate::WidthBracket(fresh()));
        assert!(v.pass, "{:?}", v.failures);
    }

    #[test]
    fn raised_lb_fails() {
        let mut b = fresh();
        b.lb += 1;
        b.lower.lb += 1;
        let v = verify(&Certificate::WidthBracket(b));
        assert!(!v.pass);
        assert!(v.failures.iter().any(|f| f.starts_with("lb mismatch")));
    }

    #[test]
    fn dropped_triple_fails_coverage() {
        let b = fresh();
        let mut covering = b.upper.covering.clone();
        covering.triples.pop();
        let v = verify(&Certificate::Covering {
            problem: b.problem.clone(),
            covering,
        });
        assert!(!v.pass);
        assert!(v.failures.iter().any(|f| f.starts_with("coverage fail")));
    }

    #[test]
    fn json_roundtrip_is_exact() {
        let c = Certificate::WidthBracket(fresh());
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Certificate>(&text).unwrap(), c);
    }
}
