//! Run directory layout.
//!
//! refined-spec.json  the input document with learned constraints attached
//! model.json         the full refined model
//! iterations.json    per-iteration summaries
//! requests.jsonl     one line per issued request
//! failures.json      unique failures in first-seen order
//! verdicts.json      analyzer verdicts in application order
//! defects.json       unique 5xx responses
//! metrics.json       coverage and distribution figures
//! summary.txt        the same figures as a table

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use serde::Serialize;

use apirefine::engine::{ExecutionReport, RequestRecord, StatusCounts};
use apirefine::metrics::{emit_report, Metrics, ReportFormat};
use apirefine::model::{export_spec, SpecModel};
use apirefine::pipeline::{IterationReport, PipelineOutcome, StopReason};

pub fn describe(stop: &StopReason) -> String {
    match stop {
        StopReason::Converged => "converged".into(),
        StopReason::MaxIterations => "iteration cap reached".into(),
        StopReason::BudgetExhausted => "hit budget exhausted".into(),
        StopReason::Aborted(why) => format!("aborted: {why}"),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> anyhow::Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

pub fn write_run(dir: &Path, outcome: &PipelineOutcome, metrics: &Metrics) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    write_json(&dir.join("refined-spec.json"), &export_spec(&outcome.model))?;
    write_json(&dir.join("model.json"), &outcome.model)?;
    write_json(&dir.join("iterations.json"), &outcome.iterations)?;

    let mut log = BufWriter::new(fs::File::create(dir.join("requests.jsonl"))?);
    for r in outcome.reports.iter().flat_map(|r| &r.requests) {
        serde_json::to_writer(&mut log, r)?;
        writeln!(log)?;
    }
    log.flush()?;

    write_json(&dir.join("failures.json"), &outcome.failures)?;
    write_json(&dir.join("verdicts.json"), &outcome.verdicts)?;
    write_json(&dir.join("defects.json"), &metrics.defects)?;
    write_json(&dir.join("metrics.json"), metrics)?;
    fs::write(dir.join("summary.txt"), emit_report(metrics, ReportFormat::Text))?;
    Ok(())
}

/// What `report` needs back from a run directory.
pub struct SavedRun {
    pub model: SpecModel,
    pub iterations: Vec<IterationReport>,
    pub reports: Vec<ExecutionReport>,
}

impl SavedRun {
    /// The request log agrees with the iteration summaries.
    pub fn consistent(&self) -> Result<(), String> {
        for it in &self.iterations {
            let logged = self.reports.iter().find(|r| r.iteration == it.index).map(|r| r.counts).unwrap_or_default();
            if logged != it.counts {
                return Err(format!("iteration {}: request log {:?}, summary {:?}", it.index, logged, it.counts));
            }
        }
        if let Some(r) = self.reports.iter().find(|r| !self.iterations.iter().any(|it| it.index == r.iteration)) {
            return Err(format!("requests logged for unknown iteration {}", r.iteration));
        }
        Ok(())
    }
}

pub fn read_run(dir: &Path) -> anyhow::Result<SavedRun> {
    let read = |name: &str| fs::read_to_string(dir.join(name)).with_context(|| format!("missing {name}"));
    let model: SpecModel = serde_json::from_str(&read("model.json")?).context("model.json")?;
    let iterations: Vec<IterationReport> = serde_json::from_str(&read("iterations.json")?).context("iterations.json")?;

    let file = fs::File::open(dir.join("requests.jsonl")).context("missing requests.jsonl")?;
    let mut by_iteration: BTreeMap<usize, Vec<RequestRecord>> = BTreeMap::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: RequestRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => bail!("requests.jsonl line {}: {e}", n + 1),
        };
        by_iteration.entry(r.iteration).or_default().push(r);
    }
    let reports = by_iteration
        .into_iter()
        .map(|(iteration, requests)| {
            let mut counts = StatusCounts::default();
            requests.iter().for_each(|r| counts.add(r.status));
            let issued = iterations.iter().find(|it| it.index == iteration).map(|it| it.issued).unwrap_or(0);
            ExecutionReport { iteration, issued, counts, requests, ..Default::default() }
        })
        .collect();
    Ok(SavedRun { model, iterations, reports })
}
