//! One function per command. Each writes its artifacts and returns the
//! printed summary together with the checks that decide the exit code.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use urysohn::coverings::{covering_infeasible, parameter_window, WidthBracket};
use urysohn::machine::{read_stream_csv, write_stream_csv, Event};
use urysohn::metric::{bouquet_space, interval_space, wedge_sphere_space, MetricSpace};
use urysohn::sampling::{coupon_regression, coupon_stats, trial_rng, SweepGrid};
use urysohn::topology::{
    betti, betti_bound_check, convexity_window, cyclic_arc_cover, max_adjacency, nerve, systole, OverlapRule,
};
use urysohn::vc::{separation_report, ReportSetup};
use urysohn::{
    machine_new, run_stream, safe_region, threshold_sweep, union_problem, validate_margin, width_bracket,
    MarginProblem, Outcome, SamplingDistribution,
};

use crate::certificate::{covering_text, verify, Certificate};
use crate::config::{ConfigError, ExperimentConfig, Family};
use crate::output::Output;
use crate::svg::{Guide, Plot, Series};

/// Why a command could not produce a verdict.
#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Runtime(anyhow::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<urysohn::Error> for CliError {
    fn from(e: urysohn::Error) -> Self {
        match e {
            urysohn::Error::InvalidParameter { name, reason } => ConfigError::new(name, reason).into(),
            other => CliError::Runtime(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or("none".into(), |x| format!("{x}"))
}

pub fn space(cfg: &ExperimentConfig, out: &mut Output) -> Result<Report> {
    let w = cfg.single_w()?;
    let space: MetricSpace = match cfg.family {
        Family::Bouquet | Family::Scaled => bouquet_space(w, cfg.length()?, cfg.h()?)?,
        Family::Wedge => wedge_sphere_space(
            w,
            cfg.k
                .ok_or_else(|| ConfigError::new("k", "required for this command"))?,
            cfg.radius()?,
            cfg.samples
                .ok_or_else(|| ConfigError::new("samples", "required for this command"))?,
            cfg.seed,
        )?,
        Family::IntervalUnion => interval_space(
            cfg.grid
                .ok_or_else(|| ConfigError::new("grid", "required for this command"))?,
        )?,
    };
    out.with("samples.csv", |b| space.write_samples_csv(b))?;
    out.json("space.json", space.spec())?;
    let mut r = Report::default();
    let all: Vec<usize> = (0..space.samples().len()).collect();
    let connected = space.chain_connected(&all, space.connectivity_step());
    r.line(format!(
        "space {:?}: {} sample points",
        space.kind(),
        space.samples().len()
    ));
    r.line(format!(
        "resolution {} (connectivity step {})",
        space.resolution(),
        space.connectivity_step()
    ));
    r.line(format!("systole {}", opt(systole(&space))));
    if let Some(d0) = cfg.d0 {
        let c = convexity_window(&space, d0);
        r.line(format!(
            "convexity at D0 = {d0}: margin {} ({})",
            opt(c.margin),
            if c.pass { "ok" } else { "too large" }
        ));
    }
    r.check(
        "sample chain connected",
        connected,
        format!("step {}", space.connectivity_step()),
    );
    Ok(r)
}

pub fn problem(cfg: &ExperimentConfig, out: &mut Output) -> Result<Report> {
    let w = cfg.single_w()?;
    let p = cfg.problem(w)?;
    let margin = validate_margin(&p);
    out.json("problem.json", &p.spec)?;
    out.json("margin.json", &margin)?;
    out.csv("pairs.csv", &margin.pairs)?;
    let mut r = Report::default();
    r.line(format!(
        "{} classes on {} sample points, gamma {}",
        p.num_classes(),
        p.space.samples().len(),
        p.gamma
    ));
    r.line(format!("min class distance {}", opt(margin.min_distance)));
    if let Some(s) = &margin.scaled_spacing {
        r.line(format!(
            "scaled center spacing: stated {} implemented {}",
            s.stated, s.implemented
        ));
    }
    if margin.strict_pass {
        let safe = safe_region(&p)?;
        out.with("safe_region.csv", |b| safe.write_csv(&p, b))?;
        r.line(format!("safe region: {} points", safe.len()));
    }
    r.check(
        "strict margin",
        margin.strict_pass,
        match margin.violation {
            Some((i, j)) => format!("classes {i} and {j} are within gamma"),
            None => "all pairs separated".into(),
        },
    );
    r.check("safe neighborhoods disjoint", margin.safe_disjoint, "");
    Ok(r)
}

#[derive(Serialize)]
struct BracketRow {
    w: usize,
    lb: usize,
    ub: usize,
    exact: bool,
    delta_star: Option<f64>,
    min_class_distance: Option<f64>,
    conservative: bool,
    upper_source: String,
    cover_method: String,
    expected: Option<usize>,
    infeasible_below: Option<bool>,
}

fn bracket_row(w: usize, b: &WidthBracket) -> BracketRow {
    BracketRow {
        w,
        lb: b.lb,
        ub: b.ub,
        exact: b.exact,
        delta_star: b.lower.delta_star,
        min_class_distance: b.lower.min_class_distance,
        conservative: b.lower.conservative,
        upper_source: format!("{:?}", b.upper.source).to_lowercase(),
        cover_method: b.upper.method.map_or("-".into(), |m| format!("{m:?}").to_lowercase()),
        expected: None,
        infeasible_below: None,
    }
}

/// Writes both certificates of a bracket and re-verifies them.
fn emit_bracket(out: &mut Output, r: &mut Report, tag: &str, b: &WidthBracket) -> Result<()> {
    let cert = Certificate::WidthBracket(b.clone());
    out.json(&format!("width_{tag}.json"), &cert)?;
    let cov = Certificate::Covering {
        problem: b.problem.clone(),
        covering: b.upper.covering.clone(),
    };
    out.json(&format!("covering_{tag}.json"), &cov)?;
    out.write(
        &format!("covering_{tag}.txt"),
        covering_text(&b.upper.covering).as_bytes(),
    )?;
    let v = verify(&cert);
    r.check(format!("certificate {tag} verifies"), v.pass, v.failures.join("; "));
    Ok(())
}

fn window_line(cfg: &ExperimentConfig, r: &mut Report) -> Result<()> {
    if let Some(family) = cfg.window()? {
        let win = parameter_window(family);
        let d0 = cfg.d0()?;
        r.line(if win.empty {
            win.message.unwrap_or_else(|| "empty D0 window".into())
        } else {
            format!(
                "D0 = {d0}, window [{}, {}): {}",
                win.lo,
                win.hi,
                if win.contains(d0) { "inside" } else { "outside" }
            )
        });
    }
    Ok(())
}

fn brackets(cfg: &ExperimentConfig, out: &mut Output, infeasibility: bool) -> Result<(Report, Vec<BracketRow>)> {
    let d0 = cfg.d0()?;
    let mut r = Report::default();
    window_line(cfg, &mut r)?;
    let mut rows = Vec::new();
    for w in cfg.ws()? {
        let p = cfg.problem(w)?;
        let b = width_bracket(&p, d0)?;
        let mut row = bracket_row(w, &b);
        if infeasibility && w >= 2 {
            row.infeasible_below = Some(covering_infeasible(&p, d0, w - 1)?);
        }
        r.line(format!(
            "w = {w}: bracket ({}, {}){}, delta* {}, upper {} ({})",
            b.lb,
            b.ub,
            if b.exact { " exact" } else { "" },
            opt(b.lower.delta_star),
            row.upper_source,
            row.cover_method
        ));
        emit_bracket(out, &mut r, &format!("w{w}"), &b)?;
        rows.push(row);
    }
    Ok((r, rows))
}

pub fn width(cfg: &ExperimentConfig, out: &mut Output) -> Result<Report> {
    let (r, rows) = brackets(cfg, out, false)?;
    out.csv("brackets.csv", &rows)?;
    Ok(r)
}

fn bracket_plot(title: &str, rows: &[BracketRow]) -> String {
    let pts = |f: fn(&BracketRow) -> usize| rows.iter().map(|row| (row.w as f64, f(row) as f64)).collect();
    Plot {
        title,
        x_label: "w",
        y_label: "width",
        series: vec![
            Series {
                name: "lower bound".into(),
                points: pts(|row| row.lb),
            },
            Series {
                name: "upper bound".into(),
                points: pts(|row| row.ub),
            },
        ],
        guides: Vec::new(),
    }
    .render()
}

pub fn hierarchy(cfg: &ExperimentConfig, out: &mut Output) -> Result<Report> {
    let (mut r, mut rows) = brackets(cfg, out, true)?;
    for row in &mut rows {
        row.expected = Some(row.w);
        let ok = row.lb == row.w && row.ub == row.w && row.infeasible_below != Some(false);
        r.check(
            format!("w = {} width is w", row.w),
            ok,
            format!(
                "bracket ({}, {}), size w-1 ruled out: {:?}",
                row.lb, row.ub, row.infeasible_below
            ),
        );
    }
    out.csv("hierarchy.csv", &rows)?;
    out.write(
        "hierarchy.svg",
        bracket_plot("width bracket versus w", &rows).as_bytes(),
    )?;
    Ok(r)
}

pub fn scaling(cfg: &ExperimentConfig, out: &mut Output) -> Result<Report> {
    if cfg.family != Family::Scaled {
        return Err(ConfigError::new("family", "the scaling experiment needs family = \"scaled\"").into());
    }
    let m = cfg
        .m
        .ok_or_else(|| ConfigError::new("m", "required for this command"))?;
    let (mut r, mut rows) = brackets(cfg, out, false)?;
    for row in &mut rows {
        let target = row.w * m;
        row.expected = Some(target);
        r.check(
            format!("w = {}, m = {m} width is wm", row.w),
            row.lb == target && row.ub == target,
            format!("bracket ({}, {}), wm = {target}", row.lb, row.ub),
        );
    }
    out.csv("scaling.csv", &rows)?;
    out.write(
        "scaling.svg",
        bracket_plot("width bracket versus w (m classes per loop)", &rows).as_bytes(),
    )?;
    Ok(r)
}

pub fn additivity(cfg: &ExperimentConfig, out: &mut Output) -> Result<Report> {
    let ws = cfg.ws()?;
    let [a, b] = ws.as_slice() else {
        return Err(ConfigError::new("w", format!("additivity needs two values, got {ws:?}")).into());
    };
    let d0 = cfg.d0()?;
    let s = cfg.separation()?;
    let mut r = Report::default();
    window_line(cfg, &mut r)?;
    if s <= d0 {
        r.line(format!("note: separation {s} does not exceed D0 = {d0}"));
    }
    let (pa, pb) = (cfg.problem(*a)?, cfg.problem(*b)?);
    let union = union_problem(&pa, &pb, s)?;
    let parts: Vec<(String, &MarginProblem)> = vec![
        (format!("w{a}"), &pa),
        (format!("w{b}"), &pb),
        (format!("union_w{a}_w{b}"), &union),
    ];
    let mut got = Vec::new();
    let mut rows = Vec::new();
    for (tag, p) in parts {
        let br = width_bracket(p, d0)?;
        r.line(format!("{tag}: bracket ({}, {})", br.lb, br.ub));
        emit_bracket(out, &mut r, &tag, &br)?;
        rows.push(bracket_row(p.num_classes(), &br));
        got.push((br.lb, br.ub));
    }
    out.csv("additivity.csv", &rows)?;
    let sum = (got[0].0 + got[1].0, got[0].1 + got[1].1);
    r.check(
        "union bracket is the sum",
        got[2] == sum,
        format!("union ({}, {}), sum ({}, {})", got[2].0, got[2].1, sum.0, sum.1),
    );
    Ok(r)
}

pub fn vc_separation(cfg: &ExperimentConfig, out: &mut Output) -> Result<Report> {
    let w = cfg.single_w()?;
    let mut setup = ReportSetup::default();
    setup.length = cfg.length.unwrap_or(setup.length);
    setup.gamma = cfg.gamma.unwrap_or(setup.gamma);
    setup.resolution = cfg.h.unwrap_or(setup.resolution);
    setup.d0 = cfg.d0.unwrap_or(setup.d0);
    setup.interval_grid = cfg.grid.unwrap_or(setup.interval_grid);
    let mut r = Report::default();
    let mut reports = Vec::new();
    let mut text = String::new();
    for n in cfg.ns()? {
        let rep = separation_report(w, n, &setup)?;
        text.push_str(&rep.to_text());
        text.push('\n');
        r.line(format!(
            "n = {n}: interval width ({}, {}), VC {} on grid {}",
            rep.interval.lb, rep.interval.ub, rep.interval.vc, rep.interval.grid
        ));
        r.check(
            format!("n = {n}: width one, VC 2n"),
            rep.interval.lb == 1 && rep.interval.ub == 1 && rep.interval.vc == 2 * n,
            format!("({}, {}), VC {}", rep.interval.lb, rep.interval.ub, rep.interval.vc),
        );
        reports.push(rep);
    }
    let b = &reports[0].bouquet;
    r.lines.insert(
        0,
        format!(
            "bouquet w = {w}: width ({}, {}), patchwise class size {} (log2 {:.2})",
            b.lb, b.ub, b.cardinality, b.log2_bound
        ),
    );
    r.check(
        format!("bouquet w = {w} width is w"),
        b.lb == w && b.ub == w,
        format!("({}, {})", b.lb, b.ub),
    );
    out.write("vc_separation.txt", text.as_bytes())?;
    out.json("vc_separation.json", &reports)?;
    #[derive(Serialize)]
    struct Row {
        n: usize,
        interval_lb: usize,
        interval_ub: usize,
        grid: usize,
        vc: usize,
        bouquet_w: usize,
        bouquet_lb: usize,
        bouquet_ub: usize,
        log2_class_size: f64,
    }
    let rows: Vec<Row> = reports
        .iter()
        .map(|x| Row {
            n: x.interval.n,
            interval_lb: x.interval.lb,
            interval_ub: x.interval.ub,
            grid: x.interval.grid,
            vc: x.interval.vc,
            bouquet_w: x.bouquet.w,
            bouquet_lb: x.bouquet.lb,
            bouquet_ub: x.bouquet.ub,
            log2_class_size: x.bouquet.log2_bound,
        })
        .collect();
    out.csv("vc_separation.csv", &rows)?;
    Ok(r)
}

pub fn sample_complexity(cfg: &ExperimentConfig, out: &mut Output) -> Result<Report> {
    let ws = cfg.ws()?;
    if ws.iter().any(|&w| w < 2) {
        return Err(ConfigError::new("w", "the learner needs at least two regions").into());
    }
    let trials = cfg.trials()?;
    let coupon_trials = cfg.coupon_trials.unwrap_or(trials);
    let grid = match (&cfg.budgets, &cfg.ratios) {
        (Some(b), _) => SweepGrid::Counts(b.clone()),
        (None, Some(x)) => SweepGrid::Ratios(x.clone()),
        (None, None) => SweepGrid::Ratios((1..=12).map(|i| 0.25 * i as f64).collect()),
    };
    let mut r = Report::default();
    let coupons = ws
        .iter()
        .map(|&w| Ok(coupon_stats(&cfg.law(w)?, coupon_trials, cfg.seed)?))
        .collect::<Result<Vec<_>>>()?;
    let fit = coupon_regression(&coupons);
    out.csv("coupon.csv", &coupons)?;
    out.json("coupon_regression.json", &fit)?;
    r.line(format!(
        "coupon time: slope {:.4} against w ln w, R^2 {:.5}",
        fit.slope, fit.r_squared
    ));
    let stats = threshold_sweep(
        &ws,
        &grid,
        trials,
        cfg.seed,
        cfg.weights == crate::config::WeightsProfile::Stress,
    )?;
    out.with("trial_stats.csv", |b| stats.write_csv(b))?;
    out.json("crossings.json", &stats.crossings)?;
    for (w, c) in &stats.crossings {
        r.line(format!(
            "w = {w}: success reaches 2/3 at n/(w ln w) = {}",
            c.map_or("not within grid".into(), |x| format!("{x:.3}"))
        ));
    }
    let stated = stats.rows.iter().filter(|x| !x.stated_bound_holds()).count();
    r.line(format!(
        "P(all seen) + P(missed)/2 bound exceeded at {stated} of {} grid points",
        stats.rows.len()
    ));
    let corrected: Vec<String> = stats
        .rows
        .iter()
        .filter(|x| !x.corrected_bound_holds())
        .map(|x| format!("w={} n={}", x.w, x.n))
        .collect();
    r.check(
        "success within P(all seen) + P(one missed) + P(more missed)/2",
        corrected.is_empty(),
        corrected.join(", "),
    );
    let success = Plot {
        title: "permutation learner success",
        x_label: "n / (w ln w)",
        y_label: "success rate",
        series: ws
            .iter()
            .map(|&w| Series {
                name: format!("w = {w}"),
                points: stats
                    .rows
                    .iter()
                    .filter(|x| x.w == w)
                    .map(|x| (x.ratio, x.rate))
                    .collect(),
            })
            .collect(),
        guides: vec![Guide {
            label: "2/3".into(),
            y: 2.0 / 3.0,
        }],
    };
    out.write("success.svg", success.render().as_bytes())?;
    let coupon = Plot {
        title: "coupon time",
        x_label: "w ln w",
        y_label: "mean draws",
        series: vec![Series {
            name: "mean".into(),
            points: coupons
                .iter()
                .map(|c| ((c.w as f64) * (c.w as f64).ln(), c.mean))
                .collect(),
        }],
        guides: Vec::new(),
    };
    out.write("coupon.svg", coupon.render().as_bytes())?;
    Ok(r)
}

pub fn nerve_betti(cfg: &ExperimentConfig, out: &mut Output) -> Result<Report> {
    let w = cfg.single_w()?;
    let arcs = cfg.arcs.unwrap_or(6);
    let space = bouquet_space(w, cfg.length()?, cfg.h()?)?;
    let cov = cyclic_arc_cover(&space, arcs)?;
    let cx = nerve(&space, &cov, OverlapRule::SharedSample);
    let b = betti(&cx);
    let delta0 = max_adjacency(&cx);
    let check = betti_bound_check(cov.len(), b.b1, delta0);
    out.with("nerve_faces.txt", |buf| cx.write_faces(buf))?;
    #[derive(Serialize)]
    struct Summary<'a> {
        arcs_per_loop: usize,
        vertices: usize,
        edges: usize,
        triangles: usize,
        betti: urysohn::topology::Betti,
        euler_characteristic: i64,
        delta0: usize,
        bound: &'a urysohn::topology::BoundCheck,
    }
    out.json(
        "nerve.json",
        &Summary {
            arcs_per_loop: arcs,
            vertices: cx.vertices,
            edges: cx.edges.len(),
            triangles: cx.triangles.len(),
            betti: b,
            euler_characteristic: cx.euler_characteristic(),
            delta0,
            bound: &check,
        },
    )?;
    let mut r = Report::default();
    r.line(format!(
        "nerve of {} arcs: {} edges, {} triangles, betti ({}, {}, {}), max degree {delta0}",
        cov.len(),
        cx.edges.len(),
        cx.triangles.len(),
        b.b0,
        b.b1,
        b.b2
    ));
    r.line(format!("bound 2 b1 / delta0 = {}", opt(check.bound)));
    r.check("b1 of the nerve is at least w", b.b1 >= w, format!("b1 = {}", b.b1));
    r.check("N >= 2 b1 / delta0", check.pass, check.note.clone().unwrap_or_default());
    Ok(r)
}

#[derive(Serialize)]
struct EventRow {
    step: usize,
    event: &'static str,
    entry: Option<usize>,
    label: Option<usize>,
    predicted: Option<usize>,
    correct: Option<bool>,
    residue: Option<f64>,
    radius: Option<f64>,
}

fn event_row(e: &Event) -> EventRow {
    let blank = |step, event| EventRow {
        step,
        event,
        entry: None,
        label: None,
        predicted: None,
        correct: None,
        residue: None,
        radius: None,
    };
    match e {
        Event::Evaluate {
            step,
            entry,
            label,
            predicted,
            correct,
        } => EventRow {
            entry: Some(*entry),
            label: Some(*label),
            predicted: Some(*predicted),
            correct: Some(*correct),
            ..blank(*step, "evaluate")
        },
        Event::Alarm { step, residue } => EventRow {
            residue: *residue,
            ..blank(*step, "alarm")
        },
        Event::Construct {
            step,
            entry,
            label,
            radius,
            ..
        } => EventRow {
            entry: Some(*entry),
            label: Some(*label),
            radius: Some(*radius),
            ..blank(*step, "construct")
        },
    }
}

pub fn machine_run(cfg: &ExperimentConfig, out: &mut Output) -> Result<Report> {
    let w = cfg.single_w()?;
    let p = cfg.problem(w)?;
    let d0 = cfg.d0()?;
    let tau = cfg.tau.unwrap_or(0.0);
    let r_construct = cfg.r_construct.unwrap_or(d0 / 2.0);
    let streams: Vec<Vec<(urysohn::Point, usize)>> = match &cfg.stream {
        Some(path) => {
            let file = std::fs::File::open(path)
                .map_err(|e| ConfigError::new("stream", format!("cannot open {}: {e}", path.display())))?;
            vec![read_stream_csv(file).map_err(|e| ConfigError::new("stream", e.to_string()))?]
        }
        None => {
            let safe = safe_region(&p)?;
            let dist = SamplingDistribution::new(&p, &safe, cfg.law(w)?)?;
            let len = cfg
                .stream_length
                .ok_or_else(|| ConfigError::new("stream_length", "required without a stream file"))?;
            (0..cfg.runs.unwrap_or(1))
                .map(|run| dist.stream(len, &mut trial_rng(cfg.seed, w, run)))
                .collect()
        }
    };
    #[derive(Serialize)]
    struct RunRow {
        run: usize,
        draws: usize,
        regions_seen: usize,
        final_size: usize,
        constructs: usize,
        errors: usize,
    }
    let mut rows = Vec::new();
    let mut replay_failures = Vec::new();
    let mut r = Report::default();
    for (run, stream) in streams.iter().enumerate() {
        let mut m = machine_new(Arc::clone(&p.space), tau, d0, r_construct, p.num_classes())?;
        let trace = run_stream(&mut m, stream)?;
        let constructs = trace
            .outcomes
            .iter()
            .filter(|o| matches!(o, Outcome::Construct { .. }))
            .count();
        let seen: BTreeSet<usize> = stream.iter().map(|s| s.1).collect();
        let mut replay_ok = true;
        let mut built = 0;
        for len in 0..=m.events().len() {
            if len > 0 && matches!(m.events()[len - 1], Event::Construct { .. }) {
                built += 1;
            }
            replay_ok &= m.replay(len) == m.library()[..built];
        }
        if !replay_ok {
            replay_failures.push(run);
        }
        if run == 0 {
            out.json("trace.json", &trace)?;
            let events: Vec<EventRow> = trace.events.iter().map(event_row).collect();
            out.csv("events.csv", &events)?;
            out.with("stream.csv", |b| write_stream_csv(stream, b))?;
            let plot = Plot {
                title: "library size",
                x_label: "draws",
                y_label: "supports",
                series: vec![Series {
                    name: "run 0".into(),
                    points: trace
                        .sizes
                        .iter()
                        .enumerate()
                        .map(|(i, &s)| (i as f64, s as f64))
                        .collect(),
                }],
                guides: vec![Guide {
                    label: format!("{} regions", p.num_classes()),
                    y: p.num_classes() as f64,
                }],
            };
            out.write("sizes.svg", plot.render().as_bytes())?;
        }
        rows.push(RunRow {
            run,
            draws: stream.len(),
            regions_seen: seen.len(),
            final_size: m.library().len(),
            constructs,
            errors: trace.errors,
        });
    }
    out.csv("machine_runs.csv", &rows)?;
    let erring: Vec<usize> = rows.iter().filter(|x| x.errors > 0).map(|x| x.run).collect();
    let runs_detail = |runs: &[usize]| {
        if runs.is_empty() {
            String::new()
        } else {
            format!("runs {runs:?}")
        }
    };
    r.check(
        "replay reproduces every library",
        replay_failures.is_empty(),
        runs_detail(&replay_failures),
    );
    r.check("no prediction errors", erring.is_empty(), runs_detail(&erring));
    let sizes: BTreeSet<usize> = rows.iter().map(|x| x.final_size).collect();
    r.lines.push(format!(
        "{} runs, tau {tau}, D0 {d0}, r_construct {r_construct}: final sizes {sizes:?}, total errors {}",
        rows.len(),
        rows.iter().map(|x| x.errors).sum::<usize>()
    ));
    Ok(r)
}
