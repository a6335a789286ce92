//! Experiment configuration files.
//!
//! TOML, one table of scalar or list values. Distances (`length`, `radius`,
//! `gamma`, `d0`, `h`, `separation`, `r_construct`, `tau`) are in the
//! space's own length unit; counts are plain integers.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use urysohn::coverings::{parameter_window, WindowFamily};
use urysohn::problems::{bouquet_problem, interval_union_problem, scaled_problem, wedge_problem, MarginProblem};
use urysohn::sampling::RegionLaw;
use urysohn::vc::spread_intervals;

/// A configuration problem, naming the offending field.
#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Hierarchy,
    Scaling,
    VcSeparation,
    SampleComplexity,
    NerveBetti,
    MachineRun,
    Additivity,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Hierarchy => "hierarchy",
            ExperimentKind::Scaling => "scaling",
            ExperimentKind::VcSeparation => "vc_separation",
            ExperimentKind::SampleComplexity => "sample_complexity",
            ExperimentKind::NerveBetti => "nerve_betti",
            ExperimentKind::MachineRun => "machine_run",
            ExperimentKind::Additivity => "additivity",
        }
    }

    /// Kinds whose exact width needs `D0` inside the family window.
    fn checks_window(self) -> bool {
        matches!(
            self,
            ExperimentKind::Hierarchy | ExperimentKind::Scaling | ExperimentKind::Additivity
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[default]
    Bouquet,
    Scaled,
    Wedge,
    IntervalUnion,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightsProfile {
    #[default]
    Uniform,
    Stress,
}

/// A single count or a list of counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Counts {
    One(usize),
    Many(Vec<usize>),
}

impl Counts {
    pub fn values(&self) -> Vec<usize> {
        match self {
            Counts::One(v) => vec![*v],
            Counts::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<ExperimentKind>,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub family: Family,
    /// Loops, spheres or regions.
    pub w: Option<Counts>,
    /// Class centers per loop (scaled family).
    pub m: Option<usize>,
    /// Loop length `L`.
    pub length: Option<f64>,
    /// Sphere radius `R`.
    pub radius: Option<f64>,
    /// Sphere dimension.
    pub k: Option<usize>,
    pub gamma: Option<f64>,
    pub d0: Option<f64>,
    /// Sampling resolution of a bouquet.
    pub h: Option<f64>,
    /// Random directions per sphere.
    pub samples: Option<usize>,
    /// Number of intervals of an interval-union problem.
    pub n: Option<Counts>,
    /// Grid points of the unit interval.
    pub grid: Option<usize>,
    pub separation: Option<f64>,
    pub trials: Option<usize>,
    pub coupon_trials: Option<usize>,
    /// Budgets as multiples of `w ln w`.
    pub ratios: Option<Vec<f64>>,
    /// Budgets as absolute draw counts; overrides `ratios`.
    pub budgets: Option<Vec<usize>>,
    #[serde(default)]
    pub weights: WeightsProfile,
    pub tau: Option<f64>,
    pub r_construct: Option<f64>,
    pub stream: Option<PathBuf>,
    pub stream_length: Option<usize>,
    pub runs: Option<usize>,
    /// Arcs per loop of a cyclic cover.
    pub arcs: Option<usize>,
}

/// A parsed config together with the hash of its source text.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub sha256: String,
    pub path: PathBuf,
}

pub fn load(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("path", format!("cannot read {}: {e}", path.display())))?;
    let config = parse(&text)?;
    Ok(LoadedConfig {
        config,
        sha256: hex::encode(Sha256::digest(text.as_bytes())),
        path: path.to_path_buf(),
    })
}

pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        let field = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.contains("field"))
            .unwrap_or("config")
            .to_string();
        ConfigError::new(field, msg)
    })
}

fn missing(field: &str) -> ConfigError {
    ConfigError::new(field, "required for this command")
}

fn positive(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(field, format!("must be a positive number, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn ws(&self) -> Result<Vec<usize>, ConfigError> {
        let ws = self.w.as_ref().ok_or_else(|| missing("w"))?.values();
        if ws.is_empty() || ws.contains(&0) {
            return Err(ConfigError::new("w", "needs one or more positive counts"));
        }
        Ok(ws)
    }

    /// The single `w` of commands that act on one problem.
    pub fn single_w(&self) -> Result<usize, ConfigError> {
        match self.ws()?.as_slice() {
            [w] => Ok(*w),
            many => Err(ConfigError::new("w", format!("expected one value, got {many:?}"))),
        }
    }

    pub fn ns(&self) -> Result<Vec<usize>, ConfigError> {
        let ns = self.n.as_ref().ok_or_else(|| missing("n"))?.values();
        if ns.is_empty() || ns.contains(&0) {
            return Err(ConfigError::new("n", "needs one or more positive counts"));
        }
        Ok(ns)
    }

    pub fn length(&self) -> Result<f64, ConfigError> {
        positive("length", self.length.ok_or_else(|| missing("length"))?)
    }

    pub fn gamma(&self) -> Result<f64, ConfigError> {
        positive("gamma", self.gamma.ok_or_else(|| missing("gamma"))?)
    }

    pub fn d0(&self) -> Result<f64, ConfigError> {
        positive("d0", self.d0.ok_or_else(|| missing("d0"))?)
    }

    pub fn radius(&self) -> Result<f64, ConfigError> {
        positive("radius", self.radius.ok_or_else(|| missing("radius"))?)
    }

    pub fn h(&self) -> Result<f64, ConfigError> {
        positive("h", self.h.ok_or_else(|| missing("h"))?)
    }

    pub fn separation(&self) -> Result<f64, ConfigError> {
        positive("separation", self.separation.ok_or_else(|| missing("separation"))?)
    }

    pub fn trials(&self) -> Result<usize, ConfigError> {
        match self.trials {
            Some(0) => Err(ConfigError::new("trials", "must be positive")),
            Some(t) => Ok(t),
            None => Err(missing("trials")),
        }
    }

    pub fn law(&self, w: usize) -> Result<RegionLaw, ConfigError> {
        let law = match self.weights {
            WeightsProfile::Uniform => RegionLaw::uniform(w),
            WeightsProfile::Stress => RegionLaw::stress(w),
        };
        law.map_err(|e| ConfigError::new("weights", e.to_string()))
    }

    /// The `D0` window of the configured family, when it has one.
    pub fn window(&self) -> Result<Option<WindowFamily>, ConfigError> {
        Ok(match self.family {
            Family::Bouquet => Some(WindowFamily::Bouquet {
                length: self.length()?,
                gamma: self.gamma()?,
            }),
            Family::Scaled => Some(WindowFamily::Scaled {
                length: self.length()?,
                gamma: self.gamma()?,
                per_loop: self.m.ok_or_else(|| missing("m"))?,
            }),
            Family::Wedge => Some(WindowFamily::Wedge {
                radius: self.radius()?,
                gamma: self.gamma()?,
            }),
            Family::IntervalUnion => None,
        })
    }

    /// Rejects a `D0` outside the family's window, or an empty window.
    pub fn check_window(&self) -> Result<(), ConfigError> {
        let Some(family) = self.window()? else { return Ok(()) };
        let window = parameter_window(family);
        if window.empty {
            let msg = window.message.unwrap_or_else(|| "empty D0 window".into());
            return Err(ConfigError::new("d0", msg));
        }
        let d0 = self.d0()?;
        if !window.contains(d0) {
            return Err(ConfigError::new(
                "d0",
                format!(
                    "D0 = {d0} lies outside the admissible window [{}, {})",
                    window.lo, window.hi
                ),
            ));
        }
        Ok(())
    }

    /// Window check for kinds whose exact width depends on `D0`.
    pub fn check_kind(&self, kind: ExperimentKind) -> Result<(), ConfigError> {
        if kind.checks_window() {
            self.check_window()?;
        }
        Ok(())
    }

    /// The configured problem family with `w` loops, spheres or intervals.
    pub fn problem(&self, w: usize) -> Result<MarginProblem, ConfigError> {
        let built = match self.family {
            Family::Bouquet => bouquet_problem(w, self.length()?, self.gamma()?, self.h()?),
            Family::Scaled => scaled_problem(
                w,
                self.m.ok_or_else(|| missing("m"))?,
                self.length()?,
                self.gamma()?,
                self.h()?,
            ),
            Family::Wedge => wedge_problem(
                w,
                self.k.ok_or_else(|| missing("k"))?,
                self.radius()?,
                self.samples.ok_or_else(|| missing("samples"))?,
                self.seed,
                self.gamma()?,
            ),
            Family::IntervalUnion => interval_union_problem(
                &spread_intervals(w),
                self.gamma()?,
                self.grid.ok_or_else(|| missing("grid"))?,
            ),
        };
        built.map_err(|e| match e {
            urysohn::Error::InvalidParameter { name, reason } => ConfigError::new(name, reason),
            other => ConfigError::new("family", other.to_string()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_scalars_and_lists() {
        let c = parse("seed = 3\nw = [1, 2]\nlength = 10.0\ngamma = 1.0\nd0 = 4.0\nh = 0.4\n").unwrap();
        assert_eq!(c.ws().unwrap(), vec![1, 2]);
        assert!(c.single_w().is_err());
        let c = parse("seed = 3\nw = 4\n").unwrap();
        assert_eq!(c.single_w().unwrap(), 4);
    }

    #[test]
    fn seed_is_mandatory_and_fields_are_checked() {
        let e = parse("w = 3\n").unwrap_err();
        assert_eq!(e.field, "seed");
        let e = parse("seed = 1\nwidth = 3\n").unwrap_err();
        assert_eq!(e.field, "width");
    }

    #[test]
    fn empty_bouquet_window_names_the_condition() {
        let c = parse("seed = 1\nw = 2\nlength = 4.0\ngamma = 1.0\nd0 = 1.6\nh = 0.4\n").unwrap();
        let e = c.check_window().unwrap_err();
        assert_eq!(e.field, "d0");
        assert!(e.message.contains("L > 9γ/2"), "{}", e.message);
    }

    #[test]
    fn d0_outside_window() {
        let c = parse("seed = 1\nw = 2\nlength = 10.0\ngamma = 1.0\nd0 = 5.0\nh = 0.4\n").unwrap();
        assert!(c.check_window().unwrap_err().message.contains("outside"));
    }
}
