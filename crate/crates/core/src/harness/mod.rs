// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.


//! Seeded experiment trials, parallel p-sweeps and CSV output.

mod generators;

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::{embed_bounded, embed_degenerate, embed_direct, EmbedConfig, EmbedOutcome, Phase, PipelineError, Route, TraceEvent};
use crate::graph::Graph;
use crate::random::{sample_exposures, RandomSource};

pub use generators::{
    clique_cycles, clique_factor, cycle_union, erdos_renyi_capped, generate_test_graph, power_path, random_forest,
    random_regular, GenError, TargetSpec,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub mode: Route,
    #[serde(default = "one")]
    pub d: usize,
    pub delta: usize,
    pub p_grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub target: TargetSpec,
    /// Target vertices as a fraction of `n`; the rest is isolated padding.
    #[serde(default = "full")]
    pub coverage: f64,
    /// Record wall time in `mean_ms`; off keeps the CSV reproducible.
    #[serde(default)]
    pub timing: bool,
    #[serde(flatten)]
    pub embed: EmbedConfig,
}

fn one() -> usize {
    1
}

fn full() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.p_grid.is_empty() || self.p_grid.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return bad(format!("grid {:?} must lie in (0, 1]", self.p_grid));
        }
        if self.p_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("grid must be strictly ascending".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n == 0 || !(self.coverage > 0.0 && self.coverage <= 1.0) {
            return bad(format!("n = {}, coverage = {}", self.n, self.coverage));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Number of exposures the mode consumes.
    pub fn rounds(&self) -> usize {
        match self.mode {
            Route::Degenerate => 3,
            Route::Bounded => 2,
            Route::Direct => 1,
        }
    }

    pub fn target_vertices(&self) -> usize {
        (self.coverage * self.n as f64).floor() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub stream: u64,
    pub p: f64,
    pub success: bool,
    pub phase: Option<Phase>,
    pub detail: String,
    pub ms: f64,
    /// Reservoir occupancy of the first S-embedding of the winning attempt.
    pub occupancy: Vec<usize>,
    pub t: usize,
    pub attempts: usize,
    pub degraded: bool,
}

/// The four CSV failure columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureColumn {
    Decompose,
    Absorber,
    Phase2,
    Matching,
}

impl From<Phase> for FailureColumn {
    fn from(p: Phase) -> Self {
        match p {
            Phase::Decompose | Phase::PartitionR => FailureColumn::Decompose,
            Phase::Absorber | Phase::Phase1 => FailureColumn::Absorber,
            Phase::Phase2a | Phase::Phase2b | Phase::Phase2c | Phase::Verify => FailureColumn::Phase2,
            Phase::Matching => FailureColumn::Matching,
        }
    }
}

/// Source for trial `stream` at grid point `p`.
pub fn trial_source(cfg: &ExperimentConfig, p: f64, stream: u64) -> RandomSource {
    RandomSource::new(cfg.seed, stream).child(p.to_bits())
}

pub fn generate_target(cfg: &ExperimentConfig, src: RandomSource) -> Result<Graph, GenError> {
    generate_test_graph(&cfg.target, cfg.target_vertices(), cfg.delta, src)
}

/// Runs one pipeline on the given exposures.
pub fn run_pipeline(cfg: &ExperimentConfig, exposures: &[Graph], target: &Graph, src: RandomSource) -> Result<EmbedOutcome, PipelineError> {
    match cfg.mode {
        Route::Degenerate => embed_degenerate(exposures, target, cfg.d, cfg.delta, &cfg.embed, src),
        Route::Bounded => embed_bounded(exposures, target, cfg.delta, &cfg.embed, src),
        Route::Direct => embed_direct(exposures, target, cfg.delta, &cfg.embed, src),
    }
}

/// One seeded trial; failures are recorded, never raised.
pub fn run_trial(cfg: &ExperimentConfig, p: f64, stream: u64) -> TrialRecord {
    let src = trial_source(cfg, p, stream);
    let start = Instant::now();
    let mut rec = TrialRecord {
        stream,
        p,
        success: false,
        phase: None,
        detail: String::new(),
        ms: 0.0,
        occupancy: Vec::new(),
        t: 0,
        attempts: 0,
        degraded: false,
    };
    let target = match generate_target(cfg, src.child(0)) {
        Ok(g) => g,
        Err(e) => {
            rec.phase = Some(Phase::Decompose);
            rec.detail = e.to_string();
            return rec;
        }
    };
    let exposures = match sample_exposures(cfg.n, p, cfg.rounds(), src.child(1)) {
        Ok(g) => g,
        Err(e) => {
            rec.phase = Some(Phase::Decompose);
            rec.detail = e.to_string();
            return rec;
        }
    };
    match run_pipeline(cfg, &exposures, &target, src.child(2)) {
        Ok(out) => {
            rec.success = true;
            rec.t = out.t;
            rec.attempts = out.attempts;
            rec.degraded = out.degraded.is_some();
            rec.occupancy = out
                .trace
                .iter()
                .rev()
                .find_map(|e| match e {
                    TraceEvent::Steps { occupancy, .. } => Some(occupancy.clone()),
                    _ => None,
                })
                .unwrap_or_default();
        }
        Err(e) => {
            rec.phase = Some(e.phase);
            rec.attempts = e.attempts;
            rec.detail = e.detail;
        }
    }
    rec.ms = start.elapsed().as_secs_f64() * 1e3;
    rec
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub p: f64,
    pub n: usize,
    pub mode: Route,
    pub trials: usize,
    pub successes: usize,
    pub fail_decompose: usize,
    pub fail_absorber: usize,
    pub fail_phase2: usize,
    pub fail_matching: usize,
    pub mean_ms: f64,
}

impl SweepRow {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

pub fn aggregate(cfg: &ExperimentConfig, p: f64, records: &[TrialRecord]) -> SweepRow {
    let mut row = SweepRow {
        p,
        n: cfg.n,
        mode: cfg.mode,
        trials: records.len(),
        successes: records.iter().filter(|r| r.success).count(),
        fail_decompose: 0,
        fail_absorber: 0,
        fail_phase2: 0,
        fail_matching: 0,
        mean_ms: 0.0,
    };
    for r in records.iter().filter(|r| !r.success) {
        let col = match r.phase.map(FailureColumn::from) {
            Some(FailureColumn::Absorber) => &mut row.fail_absorber,
            Some(FailureColumn::Phase2) => &mut row.fail_phase2,
            Some(FailureColumn::Matching) => &mut row.fail_matching,
            Some(FailureColumn::Decompose) | None => &mut row.fail_decompose,
        };
        *col += 1;
    }
    if cfg.timing && !records.is_empty() {
        row.mean_ms = records.iter().map(|r| r.ms).sum::<f64>() / records.len() as f64;
    }
    row
}

/// All trials of the grid, in `(p, stream)` order, run in parallel.
pub fn sweep_records(cfg: &ExperimentConfig) -> Result<Vec<Vec<TrialRecord>>, HarnessError> {
    cfg.validate()?;
    let jobs: Vec<(usize, u64)> = (0..cfg.p_grid.len()).flat_map(|i| (0..cfg.trials as u64).map(move |s| (i, s))).collect();
    let flat: Vec<TrialRecord> = jobs.par_iter().map(|&(i, s)| run_trial(cfg, cfg.p_grid[i], s)).collect();
    Ok(flat.chunks(cfg.trials).map(<[TrialRecord]>::to_vec).collect())
}

pub fn sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, HarnessError> {
    let records = sweep_records(cfg)?;
    Ok(cfg.p_grid.iter().zip(&records).map(|(&p, r)| aggregate(cfg, p, r)).collect())
}

pub fn write_csv(rows: &[SweepRow], out: impl Write) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}
