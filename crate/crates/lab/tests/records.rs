use tmslab::config::{Command, ExperimentConfig};
use tmslab::output::{read_csv, read_record, write_record};
use tmslab::plot::render_svg;
use tmslab::{execute, ResultRecord};

fn record(cmd: Command, threads: usize) -> ResultRecord {
    let mut c = ExperimentConfig::new(cmd);
    c.output.threads = Some(threads);
    execute(&c.resolve().unwrap()).unwrap()
}

#[test]
fn written_record_reads_back_equal() {
    let dir = tempfile::tempdir().unwrap();
    for cmd in [Command::Twobody, Command::Kvb] {
        let rec = record(cmd, 2);
        let d = write_record(&rec, dir.path()).unwrap();
        assert_eq!(read_record(&d.join("record.json")).unwrap(), rec);
        for (name, s) in &rec.series {
            let (cols, rows) = read_csv(&d.join(format!("series_{name}.csv"))).unwrap();
            assert_eq!(&cols, &s.columns);
            assert_eq!(&rows, &s.rows);
        }
    }
}

#[test]
fn thread_count_does_not_change_records() {
    for cmd in [Command::Twobody, Command::Kvb] {
        assert_eq!(record(cmd, 1).without_timing(), record(cmd, 8).without_timing());
    }
}

#[test]
fn plots_are_byte_identical_across_runs() {
    let a = record(Command::Kvb, 1);
    let b = record(Command::Kvb, 4);
    for (name, s) in &a.series {
        let x = render_svg(s, name).unwrap();
        assert_eq!(x, render_svg(&b.series[name], name).unwrap());
        assert!(x.starts_with("<svg") && x.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn experiment_id_tracks_inputs() {
    let mut c = ExperimentConfig::new(Command::Twobody);
    let a = execute(&c.resolve().unwrap()).unwrap();
    c.physics.alpha = Some(-0.3);
    let b = execute(&c.resolve().unwrap()).unwrap();
    assert_ne!(a.experiment_id, b.experiment_id);
    assert!(a.experiment_id.starts_with("twobody-"));
}

#[test]
fn shipped_configs_resolve() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap();
        assert_eq!(path.file_stem().unwrap(), cfg.command.name());
        cfg.resolve().unwrap();
        seen += 1;
    }
    assert_eq!(seen, 4);
}
