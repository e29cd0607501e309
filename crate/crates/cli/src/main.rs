use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use apirefine::analyzer::InferenceConfig;
use apirefine::engine::ExecParams;
use apirefine::metrics::{compute_metrics, emit_report, ReportFormat};
use apirefine::model::load_spec_file;
use apirefine::pipeline::{run_pipeline, PipelineConfig, StopReason};

mod output;

#[derive(Parser)]
#[command(name = "apirefine", version, about = "Refine REST API tests from the service's own error messages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Text => ReportFormat::Text,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate, execute and refine tests until no new failure appears
    Run {
        /// OpenAPI 2.0/3.x document (JSON or YAML)
        #[arg(long)]
        spec: PathBuf,
        /// Execution parameters (JSON)
        #[arg(long)]
        exec_params: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        hit_budget: Option<usize>,
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Fallback analysis service; defaults to $APIREFINE_INFERENCE_URL
        #[arg(long)]
        inference_url: Option<String>,
        #[arg(long, default_value = "apirefine-out")]
        out: PathBuf,
        /// Format of the summary printed on stdout
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Recompute the metrics of a finished run
    Report {
        dir: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Exit codes: 1 usage or I/O problem, 2 inconsistent run artifacts,
/// 3 the service could not be reached.
fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match real_main(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("apirefine: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn real_main(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Run { spec, exec_params, seed, hit_budget, max_iterations, inference_url, out, format } => {
            let model = load_spec_file(&spec).with_context(|| format!("loading {}", spec.display()))?;
            for w in &model.warnings {
                log::warn!("{w}");
            }
            let text = std::fs::read_to_string(&exec_params)
                .with_context(|| format!("reading {}", exec_params.display()))?;
            let mut exec = ExecParams::from_json(&text)?;
            if let Some(s) = seed {
                exec.seed = s;
            }
            if hit_budget.is_some() {
                exec.hit_budget = hit_budget;
            }
            if let Some(m) = max_iterations {
                exec.max_iterations = m;
            }
            exec.validate()?;
            let inference = inference_url.map(InferenceConfig::new).or_else(InferenceConfig::from_env);
            let config = PipelineConfig { exec, inference };

            let outcome = run_pipeline(model, &config);
            let metrics = compute_metrics(&outcome.reports, &outcome.model);
            output::write_run(&out, &outcome, &metrics).with_context(|| format!("writing {}", out.display()))?;
            print!("{}", emit_report(&metrics, format.into()));
            println!("stopped: {}", output::describe(&outcome.stop));
            Ok(match outcome.stop {
                StopReason::Aborted(_) => ExitCode::from(3),
                _ => ExitCode::SUCCESS,
            })
        }
        Command::Report { dir, format } => {
            let run = output::read_run(&dir).with_context(|| format!("reading {}", dir.display()))?;
            let metrics = compute_metrics(&run.reports, &run.model);
            if let Err(e) = metrics.check(&run.reports).and_then(|_| run.consistent()) {
                eprintln!("apirefine: inconsistent run in {}: {e}", dir.display());
                return Ok(ExitCode::from(2));
            }
            print!("{}", emit_report(&metrics, format.into()));
            Ok(ExitCode::SUCCESS)
        }
    }
}
