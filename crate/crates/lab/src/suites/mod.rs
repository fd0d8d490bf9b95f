//! One suite per subcommand. A suite fills a [`ResultRecord`] from resolved inputs; it never
//! touches the filesystem.

use crate::config::{Command, Resolved};
use crate::error::LabError;
use crate::record::ResultRecord;

pub mod fermi21;
pub mod kvb;
pub mod stm3;
pub mod twobody;

/// Check tolerances understood by a subcommand, with defaults.
pub fn tolerances(command: Command) -> &'static [(&'static str, f64)] {
    match command {
        Command::Twobody => twobody::TOLERANCES,
        Command::Stm3 => stm3::TOLERANCES,
        Command::Fermi21 => fermi21::TOLERANCES,
        Command::Kvb => kvb::TOLERANCES,
        Command::Report => &[],
    }
}

pub fn run_suite(cfg: &Resolved) -> Result<ResultRecord, LabError> {
    let mut rec = ResultRecord::new(cfg);
    match cfg.command {
        Command::Twobody => twobody::run(cfg, &mut rec)?,
        Command::Stm3 => stm3::run(cfg, &mut rec)?,
        Command::Fermi21 => fermi21::run(cfg, &mut rec)?,
        Command::Kvb => kvb::run(cfg, &mut rec)?,
        Command::Report => return Err(LabError::Config("report aggregates records; it has no suite".into())),
    }
    Ok(rec)
}

pub(crate) fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
