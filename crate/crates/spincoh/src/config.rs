//! Scenario and star-list configuration files (TOML, `schema_version = 1`).

use std::path::Path;

use serde::Deserialize;
use spincoh_core::{CoherentEnsemble, DirectionAngles, EnsembleComponent, FieldSchedule, FieldSegment, SpinLabel, Vec3};

use crate::error::{at_field, CliError};

pub const SCHEMA_VERSION: u32 = 1;
/// Largest accepted `twice_s`.
pub const MAX_TWICE_S: u32 = 40;
/// Largest accepted number of integration steps per scenario.
pub const MAX_STEPS: usize = 50_000_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
/// How far an amplitude list may be from unit norm.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

pub const TRAJECTORY_CSV: &str = "trajectory.csv";
pub const REPORT_JSON: &str = "report.json";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const STARS_CSV: &str = "stars.csv";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: u32,
    twice_s: u32,
    gamma: f64,
    dt_s: f64,
    sample_every: usize,
    #[serde(default = "default_hbar")]
    hbar: f64,
    tolerance: Option<f64>,
    outputs: Option<Vec<String>>,
    initial: RawInitial,
    schedule: Vec<RawSegment>,
    sweep: Option<RawSweep>,
}

fn default_hbar() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    theta: Option<f64>,
    phi: Option<f64>,
    ensemble: Option<Vec<RawComponent>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComponent {
    weight: f64,
    theta: f64,
    phi: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSegment {
    duration_s: f64,
    #[serde(rename = "B_tesla")]
    b_tesla: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: SweepAxis,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    TwiceS,
    Theta,
    DtS,
    /// Time step as a fraction of the shortest precession period.
    DtPeriods,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::TwiceS => "twice_s",
            SweepAxis::Theta => "theta",
            SweepAxis::DtS => "dt_s",
            SweepAxis::DtPeriods => "dt_periods",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Initial {
    Direction(DirectionAngles),
    Ensemble(Vec<EnsembleComponent>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// A validated evolution scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: SpinLabel,
    pub hbar: f64,
    pub dt: f64,
    pub sample_every: usize,
    pub tolerance: f64,
    pub initial: Initial,
    pub schedule: FieldSchedule,
    pub outputs: Vec<String>,
    pub sweep: Option<Sweep>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn parse<'a, T: Deserialize<'a>>(path: &Path, text: &'a str) -> Result<T, CliError> {
    toml::from_str(text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn finite(field: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(at_field(field, format!("{x} is not finite")))
    }
}

fn positive(field: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(at_field(field, format!("{x} must be positive and finite")))
    }
}

fn check_schema(version: u32) -> Result<(), CliError> {
    if version != SCHEMA_VERSION {
        return Err(at_field("schema_version", format!("unsupported version {version}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

fn check_twice_s(field: &str, twice_s: u32, min: u32, max: u32) -> Result<SpinLabel, CliError> {
    if !(min..=max).contains(&twice_s) {
        return Err(at_field(field, format!("{twice_s} is outside {min}..={max}")));
    }
    Ok(SpinLabel::new(twice_s))
}

fn angles(prefix: &str, theta: f64, phi: f64) -> Result<DirectionAngles, CliError> {
    finite(&format!("{prefix}theta"), theta)?;
    finite(&format!("{prefix}phi"), phi)?;
    DirectionAngles::new(theta, phi).map_err(|e| at_field(&format!("{prefix}theta/{prefix}phi"), e))
}

impl Scenario {
    pub fn load(path: &Path, max_twice_s: u32) -> Result<Self, CliError> {
        Self::parse(path, &read(path)?, max_twice_s)
    }

    /// `path` only labels diagnostics.
    pub fn parse(path: &Path, text: &str, max_twice_s: u32) -> Result<Self, CliError> {
        let raw: RawScenario = parse(path, text)?;
        check_schema(raw.schema_version)?;
        let label = check_twice_s("twice_s", raw.twice_s, 1, max_twice_s)?;
        let hbar = positive("hbar", raw.hbar)?;
        let gamma = finite("gamma", raw.gamma)?;
        let dt = positive("dt_s", raw.dt_s)?;
        if raw.sample_every == 0 {
            return Err(at_field("sample_every", "must be at least 1"));
        }
        let tolerance = positive("tolerance", raw.tolerance.unwrap_or(DEFAULT_TOLERANCE))?;

        let initial = match (raw.initial.theta, raw.initial.phi, raw.initial.ensemble) {
            (Some(theta), Some(phi), None) => Initial::Direction(angles("initial.", theta, phi)?),
            (None, None, Some(list)) => {
                let mut components = Vec::with_capacity(list.len());
                for (i, c) in list.iter().enumerate() {
                    let prefix = format!("initial.ensemble[{i}].");
                    finite(&format!("{prefix}weight"), c.weight)?;
                    components.push(EnsembleComponent { weight: c.weight, angles: angles(&prefix, c.theta, c.phi)? });
                }
                CoherentEnsemble::new(label, components.clone()).map_err(|e| at_field("initial.ensemble.weight", e))?;
                Initial::Ensemble(components)
            }
            _ => {
                return Err(at_field(
                    "initial",
                    "give either both theta and phi, or an ensemble list, but not both",
                ))
            }
        };

        if raw.schedule.is_empty() {
            return Err(at_field("schedule", "needs at least one segment"));
        }
        let mut segments = Vec::with_capacity(raw.schedule.len());
        for (i, seg) in raw.schedule.iter().enumerate() {
            let duration = positive(&format!("schedule[{i}].duration_s"), seg.duration_s)?;
            for (axis, b) in ["x", "y", "z"].iter().zip(seg.b_tesla) {
                finite(&format!("schedule[{i}].B_tesla.{axis}"), b)?;
            }
            segments.push(FieldSegment { duration, field: Vec3(seg.b_tesla) });
        }
        let schedule = FieldSchedule::new(segments, gamma).map_err(|e| at_field("schedule", e))?;

        let outputs = match raw.outputs {
            None => vec![TRAJECTORY_CSV.to_owned(), REPORT_JSON.to_owned()],
            Some(list) => {
                for (i, name) in list.iter().enumerate() {
                    if ![TRAJECTORY_CSV, REPORT_JSON, SWEEP_CSV].contains(&name.as_str()) {
                        return Err(at_field(
                            &format!("outputs[{i}]"),
                            format!("unknown artifact {name:?} (known: {TRAJECTORY_CSV}, {REPORT_JSON}, {SWEEP_CSV})"),
                        ));
                    }
                }
                list
            }
        };

        let sweep = match raw.sweep {
            None => None,
            Some(s) => {
                if s.values.is_empty() {
                    return Err(at_field("sweep.values", "empty sweep list"));
                }
                Some(Sweep { axis: s.axis, values: s.values })
            }
        };

        let scenario = Scenario { label, hbar, dt, sample_every: raw.sample_every, tolerance, initial, schedule, outputs, sweep };
        scenario.check_grid("dt_s", dt)?;
        if let Some(sweep) = &scenario.sweep {
            for (i, &v) in sweep.values.iter().enumerate() {
                scenario.point(sweep.axis, v, max_twice_s).map_err(|e| match e {
                    CliError::Config(msg) => CliError::Config(format!("sweep.values[{i}]: {msg}")),
                    other => other,
                })?;
            }
        }
        Ok(scenario)
    }

    fn check_grid(&self, field: &str, dt: f64) -> Result<(), CliError> {
        self.schedule.check_step(dt, self.sample_every).map_err(|e| at_field(field, e))?;
        let steps = self.schedule.step_count(dt);
        if steps > MAX_STEPS {
            return Err(at_field(field, format!("needs {steps} steps, more than the limit of {MAX_STEPS}")));
        }
        Ok(())
    }

    /// The scenario with one sweep coordinate substituted.
    pub fn point(&self, axis: SweepAxis, value: f64, max_twice_s: u32) -> Result<Scenario, CliError> {
        let mut out = self.clone();
        out.sweep = None;
        match axis {
            SweepAxis::TwiceS => {
                if value.fract() != 0.0 || value < 0.0 || value > u32::MAX as f64 {
                    return Err(at_field("twice_s", format!("{value} is not a non-negative integer")));
                }
                out.label = check_twice_s("twice_s", value as u32, 1, max_twice_s)?;
            }
            SweepAxis::Theta => {
                let Initial::Direction(a) = self.initial else {
                    return Err(at_field("initial", "a theta sweep needs a single initial direction"));
                };
                out.initial = Initial::Direction(angles("", value, a.phi())?);
            }
            SweepAxis::DtS => {
                out.dt = positive("dt_s", value)?;
                out.check_grid("dt_s", out.dt)?;
            }
            SweepAxis::DtPeriods => {
                let period = self
                    .schedule
                    .shortest_period()
                    .ok_or_else(|| at_field("dt_periods", "the schedule has no precession period (gamma or B is zero)"))?;
                out.dt = positive("dt_periods", value)? * period;
                out.check_grid("dt_periods", out.dt)?;
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStars {
    schema_version: u32,
    twice_s: u32,
    state: RawState,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    theta: Option<f64>,
    phi: Option<f64>,
    /// `[[re, im], ...]` in the `m = +s ... -s` order.
    amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Angles(DirectionAngles),
    Amplitudes(Vec<num_complex::Complex64>),
}

/// A validated star-list request.
#[derive(Debug, Clone, PartialEq)]
pub struct StarsConfig {
    pub label: SpinLabel,
    pub state: StateSpec,
}

impl StarsConfig {
    pub fn load(path: &Path, max_twice_s: u32) -> Result<Self, CliError> {
        Self::parse(path, &read(path)?, max_twice_s)
    }

    pub fn parse(path: &Path, text: &str, max_twice_s: u32) -> Result<Self, CliError> {
        let raw: RawStars = parse(path, text)?;
        check_schema(raw.schema_version)?;
        let label = check_twice_s("twice_s", raw.twice_s, 0, max_twice_s)?;
        let state = match (raw.state.theta, raw.state.phi, raw.state.amplitudes) {
            (Some(theta), Some(phi), None) => StateSpec::Angles(angles("state.", theta, phi)?),
            (None, None, Some(list)) => {
                if list.len() != label.dim() {
                    return Err(at_field(
                        "state.amplitudes",
                        format!("{} entries given, twice_s = {} needs {}", list.len(), label.twice_s(), label.dim()),
                    ));
                }
                for (i, [re, im]) in list.iter().enumerate() {
                    finite(&format!("state.amplitudes[{i}]"), re + im)?;
                }
                let amps: Vec<_> = list.iter().map(|&[re, im]| num_complex::Complex64::new(re, im)).collect();
                let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > NORMALIZATION_TOLERANCE {
                    return Err(at_field(
                        "state.amplitudes",
                        format!("norm is {norm}, expected 1 within {NORMALIZATION_TOLERANCE:e}"),
                    ));
                }
                StateSpec::Amplitudes(amps)
            }
            _ => return Err(at_field("state", "give either both theta and phi, or amplitudes, but not both")),
        };
        Ok(StarsConfig { label, state })
    }
}
