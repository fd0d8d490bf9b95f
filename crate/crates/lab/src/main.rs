use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tmslab::config::{Command, ExperimentConfig, ENV_OUT};
use tmslab::{report, LabError};

#[derive(Parser)]
#[command(name = "tmslab", version, about = "Zero-range few-body numerics: experiments, records and plots")]
struct Cli {
    #[command(subcommand)]
    cmd: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Two-body point interaction: τ/α map, bound state, shell asymptotics.
    Twobody(RunArgs),
    /// Three-boson STM equation: Thomas cascade and Danilov tail.
    Stm3(RunArgs),
    /// 2+1 fermion sectors: T, W, A operators, mapping norms, mass criticality.
    Fermi21(RunArgs),
    /// Krein-von Neumann-Birman inequalities.
    Kvb(RunArgs),
    /// Summarise every record under the output directory.
    Report {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Tolerances are passed as `--tol-<name> <value>` or `--tol-<name>=<value>` and are
/// extracted before clap sees the arguments.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    p_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mass: Option<f64>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn flags(&self, command: Command, tolerances: BTreeMap<String, f64>) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(command);
        c.grid.n = self.grid_n;
        c.grid.p_min = self.p_min;
        c.grid.p_max = self.p_max;
        c.physics.alpha = self.alpha;
        c.physics.lambda = self.lambda;
        c.physics.mass = self.mass;
        c.physics.ell = self.ell;
        c.physics.levels = self.levels;
        c.output.dir = self.out.clone();
        c.output.threads = self.threads;
        c.tolerances = tolerances;
        c
    }
}

fn split_tolerances(args: Vec<OsString>) -> Result<(Vec<OsString>, BTreeMap<String, f64>), LabError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut tols = BTreeMap::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(flag) = a.to_str().and_then(|s| s.strip_prefix("--tol-")) else {
            rest.push(a);
            continue;
        };
        let (name, value) = match flag.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it.next().and_then(|v| v.into_string().ok());
                let v = v.ok_or_else(|| LabError::Config(format!("--tol-{flag} needs a value")))?;
                (flag.to_string(), v)
            }
        };
        let v: f64 = value.parse().map_err(|_| LabError::Config(format!("--tol-{name}: `{value}` is not a number")))?;
        tols.insert(name.replace('-', "_"), v);
    }
    Ok((rest, tols))
}

fn build_config(command: Command, args: &RunArgs, tols: BTreeMap<String, f64>) -> Result<ExperimentConfig, LabError> {
    let flags = args.flags(command, tols);
    let mut cfg = match &args.config {
        Some(path) => {
            let file = ExperimentConfig::load(path)?;
            if file.command != command {
                return Err(LabError::Config(format!(
                    "{} is a `{}` config, not `{}`",
                    path.display(),
                    file.command.name(),
                    command.name()
                )));
            }
            file
        }
        None => ExperimentConfig::new(command),
    };
    cfg.apply_env(&flags)?;
    cfg.overlay(&flags);
    Ok(cfg)
}

fn exit_code(e: &LabError) -> u8 {
    match e {
        LabError::Config(_) | LabError::ConfigParse { .. } => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let (argv, tols) = match split_tolerances(std::env::args_os().collect()) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(argv);
    let (command, args) = match &cli.cmd {
        Sub::Twobody(a) => (Command::Twobody, a),
        Sub::Stm3(a) => (Command::Stm3, a),
        Sub::Fermi21(a) => (Command::Fermi21, a),
        Sub::Kvb(a) => (Command::Kvb, a),
        Sub::Report { out } => {
            let out = out.clone().or_else(|| std::env::var_os(ENV_OUT).map(PathBuf::from)).unwrap_or_else(|| "tmslab-out".into());
            return match report::write_summary(&out) {
                Ok(table) => {
                    print!("{table}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            };
        }
    };
    let result = build_config(command, args, tols).and_then(|cfg| tmslab::run(&cfg));
    match result {
        Ok((rec, dir)) => {
            for (name, c) in &rec.checks {
                let v = c.value.map_or("-".to_string(), |v| format!("{v:.3e}"));
                println!("{} {name}: {v} (tol {:.1e}) {}", if c.passed { "PASS" } else { "FAIL" }, c.tolerance, c.detail);
            }
            println!("record written to {}", dir.display());
            if rec.passed() {
                ExitCode::SUCCESS
            } else {
                eprintln!("failed checks: {}", rec.failures().join(", "));
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(v: &[&str]) -> Vec<OsString> {
        v.iter().map(OsString::from).collect()
    }

    #[test]
    fn tolerance_flags_both_forms() {
        let (rest, t) = split_tolerances(os(&["tmslab", "stm3", "--tol-ratio-spread", "0.02", "--tol-cutoff_rescale=0.5", "--levels", "3"])).unwrap();
        assert_eq!(rest, os(&["tmslab", "stm3", "--levels", "3"]));
        assert_eq!(t["ratio_spread"], 0.02);
        assert_eq!(t["cutoff_rescale"], 0.5);
    }

    #[test]
    fn tolerance_flag_without_value() {
        assert!(split_tolerances(os(&["tmslab", "kvb", "--tol-krein"])).is_err());
        assert!(split_tolerances(os(&["tmslab", "kvb", "--tol-krein", "x"])).is_err());
    }
}
