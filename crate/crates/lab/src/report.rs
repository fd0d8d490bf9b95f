//! Summary table over every `record.json` found one level below the output directory.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::LabError;
use crate::output::read_record;
use crate::record::ResultRecord;

pub fn collect(out: &Path) -> Result<Vec<ResultRecord>, LabError> {
    let mut dirs: Vec<_> = std::fs::read_dir(out)
        .map_err(|e| LabError::io(out, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("record.json").is_file())
        .collect();
    dirs.sort();
    dirs.iter().map(|d| read_record(&d.join("record.json"))).collect()
}

/// Markdown table: one row per record.
pub fn summary_table(records: &[ResultRecord]) -> String {
    let mut s = String::from("| experiment | command | checks passed | failed checks | wall time (s) |\n|---|---|---|---|---|\n");
    for r in records {
        let passed = r.checks.values().filter(|c| c.passed).count();
        let failed = r.failures().join(", ");
        let _ = writeln!(s, "| {} | {} | {}/{} | {} | {:.2} |", r.experiment_id, r.command, passed, r.checks.len(), if failed.is_empty() { "-" } else { &failed }, r.wall_time_s);
    }
    s
}

pub fn write_summary(out: &Path) -> Result<String, LabError> {
    let records = collect(out)?;
    let table = summary_table(&records);
    let path = out.join("summary.md");
    std::fs::write(&path, &table).map_err(|e| LabError::io(&path, e))?;
    Ok(table)
}
