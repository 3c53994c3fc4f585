//! Independent scenario variants evolved in parallel.

use std::time::Instant;

use rayon::prelude::*;
use spincoh_core::OperatorTriple;

use crate::config::{Scenario, Sweep};
use crate::error::CliError;
use crate::evolve::simulate;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub dt: f64,
    pub max_deviation: f64,
    pub passed: bool,
    pub runtime_s: f64,
}

/// One result per sweep value, in input order.
pub fn run(base: &Scenario, sweep: &Sweep, max_twice_s: u32) -> Result<Vec<SweepPoint>, CliError> {
    let points = sweep
        .values
        .iter()
        .map(|&v| base.point(sweep.axis, v, max_twice_s))
        .collect::<Result<Vec<_>, _>>()?;
    points
        .par_iter()
        .zip(&sweep.values)
        .map(|(sc, &value)| {
            let start = Instant::now();
            let ops = OperatorTriple::with_hbar(sc.label, sc.hbar);
            let ev = simulate(sc, &ops)?;
            Ok(SweepPoint {
                value,
                dt: sc.dt,
                max_deviation: ev.report.max_direction_deviation,
                passed: ev.report.passed,
                runtime_s: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}
