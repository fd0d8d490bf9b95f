//! Files under `<out>/<experiment-id>/`: `record.json`, `series_<name>.csv`, `plot_<name>.svg`.

use std::path::{Path, PathBuf};

use crate::error::LabError;
use crate::plot::emit_plot;
use crate::record::{ResultRecord, Series};

pub fn write_csv(series: &Series, path: &Path) -> Result<(), LabError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&series.columns)?;
    for row in &series.rows {
        w.write_record(row.iter().map(|v| format!("{v:e}")))?;
    }
    w.flush().map_err(|e| LabError::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), LabError> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| LabError::Config(format!("{}: `{s}` is not a number", path.display()))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Writes every artifact of one record; returns its directory.
pub fn write_record(rec: &ResultRecord, out: &Path) -> Result<PathBuf, LabError> {
    let dir = out.join(&rec.experiment_id);
    std::fs::create_dir_all(&dir).map_err(|e| LabError::io(&dir, e))?;
    let path = dir.join("record.json");
    std::fs::write(&path, rec.to_json()).map_err(|e| LabError::io(&path, e))?;
    for (name, s) in &rec.series {
        write_csv(s, &dir.join(format!("series_{name}.csv")))?;
        if !s.rows.is_empty() {
            emit_plot(s, &format!("{} {}", rec.command, name), &dir.join(format!("plot_{name}.svg")))?;
        }
    }
    Ok(dir)
}

pub fn read_record(path: &Path) -> Result<ResultRecord, LabError> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    ResultRecord::from_json(&text, path)
}
