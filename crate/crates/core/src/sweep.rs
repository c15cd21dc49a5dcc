//! Feasibility scans over target lengths.
//!
//! Every grid point runs an independent target-length search whose restart
//! seeds are derived from the master seed and the target value, so a resumed
//! or re-ordered grid gives the same rows.

use std::io::{Read, Write};
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, worker_count, Execution};
use crate::optimizer::{optimize_operators, LossSpec, OptimizerConfig, DEFAULT_MU};
use crate::pauli::ErrorBasis;

pub const SWEEP_HEADER: [&str; 6] = [
    "target_lambda_sq",
    "final_loss",
    "kl_violation",
    "achieved_lambda_sq",
    "restarts_used",
    "wall_ms",
];

/// Loss below which a grid point counts as feasible.
pub const FEASIBLE_LOSS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub target_lambda_sq: f64,
    /// `(||lambda||^2 - target)^2 + L_KL` of the best restart.
    pub final_loss: f64,
    pub kl_violation: f64,
    pub achieved_lambda_sq: f64,
    pub restarts_used: usize,
    pub wall_ms: u64,
}

impl SweepRow {
    pub fn feasible(&self) -> bool {
        self.final_loss <= FEASIBLE_LOSS
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = RowWriter::new(writer)?;
        for row in &self.rows {
            out.write(row)?;
        }
        Ok(())
    }

    /// Reads rows written by [`SweepResult::write_csv`]; the header must match exactly.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut input = csv::Reader::from_reader(reader);
        let header = input.headers()?.clone();
        if header.iter().ne(SWEEP_HEADER.iter().copied()) {
            return Err(Error::Validation(format!(
                "unexpected sweep header {:?}",
                header.iter().collect::<Vec<_>>()
            )));
        }
        let rows = input
            .deserialize()
            .collect::<std::result::Result<Vec<SweepRow>, _>>()?;
        Ok(SweepResult { rows })
    }

    pub fn row(&self, target: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| same_target(r.target_lambda_sq, target))
    }
}

/// Streams rows to CSV, flushing after each one.
pub struct RowWriter<W: Write> {
    out: csv::Writer<W>,
}

impl<W: Write> RowWriter<W> {
    pub fn new(writer: W) -> Result<Self> {
        let mut out = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(writer);
        out.write_record(SWEEP_HEADER)?;
        out.flush()?;
        Ok(RowWriter { out })
    }

    pub fn write(&mut self, row: &SweepRow) -> Result<()> {
        self.out.serialize(row)?;
        self.out.flush()?;
        Ok(())
    }
}

fn same_target(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

/// `from, from + step, ...` up to `to` inclusive, rounded to 12 decimals.
pub fn grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() || to < from {
        return Err(Error::Domain(format!(
            "grid needs from <= to and step > 0, got {from}..{to} step {step}"
        )));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub mu: f64,
    /// Per-point optimizer settings; `seed` is the master seed.
    pub optimizer: OptimizerConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            mu: DEFAULT_MU,
            optimizer: OptimizerConfig {
                warmup_mu: vec![1.0, 10.0, 100.0],
                stop_loss: Some(1e-12),
                ..OptimizerConfig::default()
            },
        }
    }
}

/// Seed for the grid point at `target`.
pub fn point_seed(master: u64, target: f64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(target.to_bits());
    rng.next_u64()
}

/// Runs one grid point.
pub fn sweep_point(
    basis: &ErrorBasis,
    k: usize,
    target: f64,
    config: &SweepConfig,
    execution: Execution,
) -> Result<SweepRow> {
    if !(target >= 0.0) {
        return Err(Error::Domain(format!(
            "target length squared must be >= 0, got {target}"
        )));
    }
    let start = Instant::now();
    let spec = LossSpec::target_length(config.mu, target.sqrt());
    let opt = OptimizerConfig {
        seed: point_seed(config.optimizer.seed, target),
        execution,
        ..config.optimizer.clone()
    };
    let (best, used) = optimize_operators(basis, k, &spec, &opt)?;
    let s = best.eval.lambda_sq;
    Ok(SweepRow {
        target_lambda_sq: target,
        final_loss: (s - target).powi(2) + best.eval.kl_violation,
        kl_violation: best.eval.kl_violation,
        achieved_lambda_sq: s,
        restarts_used: used,
        wall_ms: start.elapsed().as_millis() as u64,
    })
}

/// Scans `grid`, reusing rows from `resume` whose target matches a grid
/// point. `on_row` sees every row in grid order as soon as it and all rows
/// before it are available.
pub fn sweep<F>(
    basis: &ErrorBasis,
    k: usize,
    grid: &[f64],
    config: &SweepConfig,
    resume: &[SweepRow],
    mut on_row: F,
) -> Result<SweepResult>
where
    F: FnMut(&SweepRow) -> Result<()>,
{
    if grid.is_empty() {
        return Err(Error::Domain("sweep grid is empty".into()));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup_by(|a, b| same_target(*a, *b));

    let exec = config.optimizer.execution;
    let batch = worker_count(exec);
    // one point per worker, restarts inside a point run sequentially
    let inner = if batch > 1 {
        Execution::Sequential
    } else {
        exec
    };
    let mut rows = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        if let Some(row) = resume
            .iter()
            .find(|r| same_target(r.target_lambda_sq, sorted[i]))
        {
            on_row(row)?;
            rows.push(row.clone());
            i += 1;
            continue;
        }
        let mut pending = Vec::new();
        while i < sorted.len()
            && pending.len() < batch
            && !resume
                .iter()
                .any(|r| same_target(r.target_lambda_sq, sorted[i]))
        {
            pending.push(sorted[i]);
            i += 1;
        }
        let done = map_indexed(pending.len(), exec, |j| {
            sweep_point(basis, k, pending[j], config, inner)
        });
        for row in done {
            let row = row?;
            on_row(&row)?;
            rows.push(row);
        }
    }
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = grid(0.5, 1.1, 0.02).unwrap();
        assert_eq!(g.len(), 31);
        assert_eq!(g[0], 0.5);
        assert_eq!(g[5], 0.6);
        assert_eq!(g[30], 1.1);
        assert_eq!(grid(0.0, 0.0, 0.1).unwrap(), vec![0.0]);
        assert!(grid(1.0, 0.0, 0.1).is_err());
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn seeds_depend_on_target_only() {
        assert_eq!(point_seed(7, 0.6), point_seed(7, 0.6));
        assert_ne!(point_seed(7, 0.6), point_seed(7, 0.62));
        assert_ne!(point_seed(7, 0.6), point_seed(8, 0.6));
    }

    #[test]
    fn csv_round_trip() {
        let result = SweepResult {
            rows: vec![SweepRow {
                target_lambda_sq: 0.6,
                final_loss: 1.5e-27,
                kl_violation: 3e-30,
                achieved_lambda_sq: 0.6000000000001,
                restarts_used: 3,
                wall_ms: 120,
            }],
        };
        let mut buf = Vec::new();
        result.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "target_lambda_sq,final_loss,kl_violation,achieved_lambda_sq,restarts_used,wall_ms\n"
        ));
        assert_eq!(SweepResult::read_csv(&buf[..]).unwrap(), result);
        assert!(SweepResult::read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
