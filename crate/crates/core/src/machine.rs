//! The Urysohn Machine: an Evaluate / Detect / Construct loop over a
//! labeled stream with an append-only library of local classifiers.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coverings::UrysohnTriple;
use crate::error::{invalid, Error, Result};
use crate::metric::{MetricSpace, Point, EPS};

/// A library entry: a triple plus the ball it was built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LibraryEntry {
    pub triple: UrysohnTriple,
    pub center: Point,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Evaluate {
        step: usize,
        entry: usize,
        label: usize,
        predicted: usize,
        correct: bool,
    },
    /// `residue` is `None` when the library was empty.
    Alarm { step: usize, residue: Option<f64> },
    Construct {
        step: usize,
        entry: usize,
        center: Point,
        label: usize,
        radius: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Evaluate {
        entry: usize,
        predicted: usize,
        correct: bool,
    },
    Construct {
        entry: usize,
    },
}

#[derive(Clone, Debug)]
pub struct MachineState {
    space: Arc<MetricSpace>,
    library: Vec<LibraryEntry>,
    tau: f64,
    d0: f64,
    r_construct: f64,
    num_labels: usize,
    steps: usize,
    log: Vec<Event>,
}

/// A fresh machine with an empty library.
pub fn machine_new(
    space: Arc<MetricSpace>,
    tau: f64,
    d0: f64,
    r_construct: f64,
    num_labels: usize,
) -> Result<MachineState> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(invalid("tau", format!("tolerance must be nonnegative, got {tau}")));
    }
    if !(r_construct > 0.0 && 2.0 * r_construct <= d0 + EPS) {
        return Err(invalid(
            "r_construct",
            format!("need 0 < 2 r_construct <= D0, got r_construct = {r_construct}, D0 = {d0}"),
        ));
    }
    if num_labels == 0 {
        return Err(invalid("num_labels", "need at least one label"));
    }
    Ok(MachineState {
        space,
        library: Vec::new(),
        tau,
        d0,
        r_construct,
        num_labels,
        steps: 0,
        log: Vec::new(),
    })
}

impl MachineState {
    pub fn library(&self) -> &[LibraryEntry] {
        &self.library
    }

    pub fn events(&self) -> &[Event] {
        &self.log
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn r_construct(&self) -> f64 {
        self.r_construct
    }

    /// Prediction residue of `x`: distance to the nearest library ball,
    /// `f64::INFINITY` when the library is empty.
    pub fn alarm(&self, x: &Point) -> f64 {
        self.residues(x).map(|(_, r)| r).fold(f64::INFINITY, f64::min)
    }

    fn residues<'a>(&'a self, x: &'a Point) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.library
            .iter()
            .enumerate()
            .map(move |(i, e)| (i, (self.space.distance(x, &e.center) - e.radius).max(0.0)))
    }

    /// One Evaluate / Detect / Construct transition.
    pub fn step(&mut self, x: &Point, y: usize) -> Result<Outcome> {
        if y >= self.num_labels {
            return Err(Error::LabelOutOfRange {
                label: y,
                num_labels: self.num_labels,
            });
        }
        self.space.check_point(x)?;
        let step = self.steps;
        self.steps += 1;
        // minimal residue, lowest index on ties
        let best = self.residues(x).fold(None, |acc: Option<(usize, f64)>, cur| match acc {
            Some(a) if a.1 <= cur.1 => Some(a),
            _ => Some(cur),
        });
        if let Some((entry, residue)) = best {
            if residue <= self.tau {
                let triple = &self.library[entry].triple;
                let pos = nearest_position(&self.space, &triple.support, x);
                let predicted = triple.label_at(pos);
                let correct = predicted == y;
                self.log.push(Event::Evaluate {
                    step,
                    entry,
                    label: y,
                    predicted,
                    correct,
                });
                return Ok(Outcome::Evaluate {
                    entry,
                    predicted,
                    correct,
                });
            }
        }
        self.log.push(Event::Alarm {
            step,
            residue: best.map(|b| b.1),
        });
        let entry = self.library.len();
        self.library
            .push(build_entry(&self.space, x, y, self.r_construct, self.num_labels));
        self.log.push(Event::Construct {
            step,
            entry,
            center: x.clone(),
            label: y,
            radius: self.r_construct,
        });
        Ok(Outcome::Construct { entry })
    }

    /// Rebuilds the library from the first `len` events of the log.
    pub fn replay(&self, len: usize) -> Vec<LibraryEntry> {
        replay_events(&self.space, &self.log[..len], self.num_labels)
    }
}

fn build_entry(space: &MetricSpace, x: &Point, y: usize, radius: f64, num_labels: usize) -> LibraryEntry {
    let mut support = space.ball(x, radius);
    if support.is_empty() {
        let nearest = nearest_position(space, &(0..space.samples().len()).collect::<Vec<_>>(), x);
        support.push(nearest);
    }
    LibraryEntry {
        triple: UrysohnTriple::constant(support, num_labels, y),
        center: x.clone(),
        radius,
    }
}

fn nearest_position(space: &MetricSpace, ids: &[usize], x: &Point) -> usize {
    let mut best = (f64::INFINITY, 0);
    for (pos, &s) in ids.iter().enumerate() {
        let d = space.distance(x, space.sample(s));
        if d < best.0 {
            best = (d, pos);
        }
    }
    best.1
}

/// Library implied by an event sequence.
pub fn replay_events(space: &MetricSpace, events: &[Event], num_labels: usize) -> Vec<LibraryEntry> {
    events
        .iter()
        .filter_map(|e| match e {
            Event::Construct {
                center, label, radius, ..
            } => Some(build_entry(space, center, *label, *radius, num_labels)),
            _ => None,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    /// Library size before the first sample and after each step.
    pub sizes: Vec<usize>,
    pub outcomes: Vec<Outcome>,
    pub errors: usize,
    pub events: Vec<Event>,
}

/// Folds `step` over a stream.
pub fn run_stream(state: &mut MachineState, stream: &[(Point, usize)]) -> Result<Trace> {
    let mut sizes = Vec::with_capacity(stream.len() + 1);
    sizes.push(state.library.len());
    let mut outcomes = Vec::with_capacity(stream.len());
    let first_event = state.log.len();
    for (x, y) in stream {
        outcomes.push(state.step(x, *y)?);
        sizes.push(state.library.len());
    }
    let errors = outcomes
        .iter()
        .filter(|o| matches!(o, Outcome::Evaluate { correct: false, .. }))
        .count();
    Ok(Trace {
        sizes,
        outcomes,
        errors,
        events: state.log[first_event..].to_vec(),
    })
}

#[derive(Serialize, Deserialize)]
struct StreamRow {
    step: usize,
    label: usize,
    point: String,
}

/// Writes a stream as CSV `step,label,point` with the point as JSON.
pub fn write_stream_csv<W: Write>(stream: &[(Point, usize)], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for (step, (x, label)) in stream.iter().enumerate() {
        writer.serialize(StreamRow {
            step,
            label: *label,
            point: serde_json::to_string(x).expect("points serialize"),
        })?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a stream written by `write_stream_csv`, ordered by step.
pub fn read_stream_csv<R: Read>(input: R) -> Result<Vec<(Point, usize)>> {
    let mut reader = csv::Reader::from_reader(input);
    let mut rows: Vec<StreamRow> = reader.deserialize().collect::<std::result::Result<_, _>>()?;
    rows.sort_by_key(|r| r.step);
    rows.into_iter()
        .map(|r| {
            let point =
                serde_json::from_str(&r.point).map_err(|e| Error::InvalidPoint(format!("step {}: {e}", r.step)))?;
            Ok((point, r.label))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::bouquet_space;

    fn machine() -> MachineState {
        let space = Arc::new(bouquet_space(3, 10.0, 0.1).unwrap());
        machine_new(space, 0.0, 4.0, 2.0, 3).unwrap()
    }

    #[test]
    fn construction_parameters() {
        let space = Arc::new(bouquet_space(1, 10.0, 0.1).unwrap());
        assert!(machine_new(space.clone(), 0.0, 4.0, 2.0, 1).is_ok());
        assert!(machine_new(space.clone(), 0.0, 4.0, 2.1, 1).is_err());
        assert!(machine_new(space, -1.0, 4.0, 1.0, 1).is_err());
    }

    #[test]
    fn first_sample_constructs_then_evaluates() {
        let mut m = machine();
        assert_eq!(m.alarm(&Point::on_loop(0, 5.0)), f64::INFINITY);
        let x = Point::on_loop(0, 5.0);
        assert_eq!(m.step(&x, 0).unwrap(), Outcome::Construct { entry: 0 });
        assert_eq!(m.library().len(), 1);
        let again = m.step(&x, 0).unwrap();
        assert_eq!(
            again,
            Outcome::Evaluate {
                entry: 0,
                predicted: 0,
                correct: true
            }
        );
        assert_eq!(m.library().len(), 1);
    }

    #[test]
    fn residue_is_distance_past_the_radius() {
        let mut m = machine();
        m.step(&Point::on_loop(0, 5.0), 0).unwrap();
        assert!((m.alarm(&Point::on_loop(1, 5.0)) - 8.0).abs() < 1e-12);
        assert_eq!(m.alarm(&Point::on_loop(0, 6.0)), 0.0);
        let mut single = machine();
        single.step(&Point::on_loop(0, 2.0), 1).unwrap();
        // d = 5 from the center, radius 2
        assert!((single.alarm(&Point::on_loop(1, 3.0)) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn labels_out_of_range_are_rejected() {
        let mut m = machine();
        assert!(matches!(
            m.step(&Point::on_loop(0, 5.0), 3),
            Err(Error::LabelOutOfRange {
                label: 3,
                num_labels: 3
            })
        ));
    }

    #[test]
    fn stream_curves() {
        let mut m = machine();
        assert_eq!(run_stream(&mut m, &[]).unwrap().sizes, vec![0]);
        let x = Point::on_loop(2, 5.0);
        let trace = run_stream(&mut m, &vec![(x, 2); 4]).unwrap();
        assert_eq!(trace.sizes, vec![0, 1, 1, 1, 1]);
        assert_eq!(trace.errors, 0);
    }

    #[test]
    fn replay_reproduces_every_prefix() {
        let mut m = machine();
        let stream: Vec<(Point, usize)> = [(0, 5.0), (1, 4.5), (0, 5.5), (2, 5.2), (1, 5.0)]
            .iter()
            .map(|&(j, a)| (Point::on_loop(j, a), j))
            .collect();
        run_stream(&mut m, &stream).unwrap();
        let mut built = 0;
        for len in 0..=m.events().len() {
            if len > 0 && matches!(m.events()[len - 1], Event::Construct { .. }) {
                built += 1;
            }
            assert_eq!(m.replay(len), m.library()[..built].to_vec());
        }
        assert_eq!(built, 3);
    }

    #[test]
    fn stream_csv_round_trip() {
        let stream = vec![(Point::on_loop(0, 5.0), 0), (Point::on_loop(1, 4.9), 1)];
        let mut buf = Vec::new();
        write_stream_csv(&stream, &mut buf).unwrap();
        assert_eq!(read_stream_csv(buf.as_slice()).unwrap(), stream);
    }
}
