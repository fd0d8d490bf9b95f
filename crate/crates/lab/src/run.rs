use std::path::PathBuf;
use std::time::Instant;

use crate::config::{Command, ExperimentConfig, Resolved};
use crate::error::LabError;
use crate::output::write_record;
use crate::record::ResultRecord;
use crate::suites::run_suite;

/// Runs one experiment inside a pool of `cfg.threads` workers. No files are written.
pub fn execute(cfg: &Resolved) -> Result<ResultRecord, LabError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build()?;
    let start = Instant::now();
    let mut rec = pool.install(|| run_suite(cfg))?;
    rec.wall_time_s = start.elapsed().as_secs_f64();
    Ok(rec)
}

/// Validates, runs and persists; the caller maps `record.passed()` to the exit status.
pub fn run(config: &ExperimentConfig) -> Result<(ResultRecord, PathBuf), LabError> {
    if config.command == Command::Report {
        return Err(LabError::Config("use the report subcommand for aggregation".into()));
    }
    let cfg = config.resolve()?;
    let rec = execute(&cfg)?;
    let dir = write_record(&rec, &cfg.out)?;
    Ok((rec, dir))
}
