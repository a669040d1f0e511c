//! The `schumpeter` binary: exit codes, artifacts, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn schumpeter(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schumpeter"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref())
        .unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

const SMALL: [&str; 10] = [
    "--n",
    "30",
    "--p",
    "0.01",
    "--steps",
    "40000",
    "--density-plus",
    "0.02",
    "--density-minus",
    "0.01",
];

#[test]
fn simulate_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["simulate", "--out", "run", "--rule2", "fitness"];
    args.extend(SMALL);
    let o = schumpeter(tmp.path(), &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dir = tmp.path().join("run");

    let ts = read(dir.join("timeseries.csv"));
    let mut lines = ts.lines();
    assert_eq!(lines.next(), Some("t,diversity,tracked_state"));
    assert_eq!(lines.clone().count(), 40_000);
    assert!(lines.next().unwrap().starts_with("1,"));

    assert!(read(dir.join("plateaus.csv")).starts_with("tau\n"));
    assert!(read(dir.join("histogram.csv")).starts_with("bin_lo,bin_hi,count,density\n"));
    let summary = read(dir.join("summary.txt"));
    for key in [
        "verdict=",
        "slope_loglog=",
        "alpha_mle=",
        "lambda=",
        "tau_min=",
        "n_plateaus=",
        "seed=1",
        "version=schumpeter-cli",
    ] {
        assert!(summary.lines().any(|l| l.starts_with(key)), "missing {key}");
    }
    assert!(summary.contains("config.rule2=fitness"));
    assert!(read(dir.join("report.txt")).contains("rule2 = \"fitness\""));
    assert!(read(dir.join("config.toml")).contains("steps = 40000"));
}

#[test]
fn config_file_reproduces_the_run_byte_for_byte() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["simulate", "--out", "a"];
    args.extend(SMALL);
    assert_eq!(code(&schumpeter(tmp.path(), &args)), 0);

    let o = schumpeter(
        tmp.path(),
        &["simulate", "--config", "a/config.toml", "--out", "b"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["timeseries.csv", "plateaus.csv", "histogram.csv"] {
        assert_eq!(
            std::fs::read(tmp.path().join("a").join(f)).unwrap(),
            std::fs::read(tmp.path().join("b").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn range_error_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let o = schumpeter(tmp.path(), &["simulate", "--p", "1.5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("invalid p"), "{}", stderr(&o));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("c.toml"), "n = 20\nmystery = 3\n").unwrap();
    let o = schumpeter(tmp.path(), &["simulate", "--config", "c.toml"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("mystery"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_config_status() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&schumpeter(tmp.path(), &["simulate", "--n", "many"])),
        2
    );
    assert_eq!(code(&schumpeter(tmp.path(), &["preset", "fig9"])), 2);
    let o = schumpeter(tmp.path(), &["sweep", "--steps", "100"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("seeds"), "{}", stderr(&o));
}

#[test]
fn too_few_plateaus_is_insufficient_data() {
    let tmp = tempfile::tempdir().unwrap();
    let o = schumpeter(tmp.path(), &["simulate", "--steps", "50", "--out", "tiny"]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    assert!(stderr(&o).contains("insufficient data"));
    let summary = read(tmp.path().join("tiny/summary.txt"));
    assert!(summary.contains("verdict=Inconclusive"));
}

#[test]
fn unreadable_input_is_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&schumpeter(tmp.path(), &["analyze", "missing.csv"])),
        3
    );
    std::fs::write(
        tmp.path().join("bad.csv"),
        "t,diversity,tracked_state\n1,3,0\n2,x,1\n",
    )
    .unwrap();
    let o = schumpeter(tmp.path(), &["analyze", "bad.csv"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("bad.csv:3"), "{}", stderr(&o));
}

#[test]
fn analyze_matches_the_simulation_analysis() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec![
        "simulate",
        "--out",
        "sim",
        "--burn-in",
        "0.2",
        "--tau-min",
        "auto",
    ];
    args.extend(SMALL);
    assert_eq!(code(&schumpeter(tmp.path(), &args)), 0);
    let o = schumpeter(
        tmp.path(),
        &[
            "analyze",
            "sim/timeseries.csv",
            "--out",
            "re",
            "--burn-in",
            "0.2",
            "--tau-min",
            "auto",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        read(tmp.path().join("sim/plateaus.csv")),
        read(tmp.path().join("re/plateaus.csv"))
    );
    let pick = |f: &str| -> Vec<String> {
        read(tmp.path().join(f))
            .lines()
            .filter(|l| {
                ["verdict=", "alpha_mle=", "lambda=", "tau_min="]
                    .iter()
                    .any(|k| l.starts_with(k))
            })
            .map(String::from)
            .collect()
    };
    assert_eq!(pick("sim/summary.txt"), pick("re/summary.txt"));
}

#[test]
fn sweep_writes_one_row_per_point_and_aggregates() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec![
        "sweep",
        "--seeds",
        "1,2,3,4,5",
        "--jobs",
        "3",
        "--out",
        "sw",
        "--rule2",
        "fitness",
    ];
    args.extend(SMALL);
    let o = schumpeter(tmp.path(), &args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = read(tmp.path().join("sw/sweep.csv"));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    for (i, row) in rows.iter().enumerate() {
        assert!(
            row.starts_with(&format!("p0.01_seed{},0.01,{},ok,", i + 1, i + 1)),
            "{row}"
        );
        assert!(tmp
            .path()
            .join(format!("sw/p0.01_seed{}/timeseries.csv", i + 1))
            .exists());
    }
    let agg = read(tmp.path().join("sw/sweep_summary.txt"));
    assert!(agg.contains("n_runs=5\n"));
    let std_line = agg
        .lines()
        .find(|l| l.starts_with("slope_loglog_std="))
        .unwrap();
    assert!(
        std_line["slope_loglog_std=".len()..].parse::<f64>().is_ok(),
        "{std_line}"
    );
}

#[test]
fn failed_sweep_point_does_not_abort_the_others() {
    let tmp = tempfile::tempdir().unwrap();
    // Without interactions or innovation the diversity never changes.
    let o = schumpeter(
        tmp.path(),
        &[
            "sweep",
            "--p-values",
            "0.0,0.02",
            "--out",
            "sw",
            "--n",
            "20",
            "--steps",
            "20000",
            "--density-plus",
            "0.0",
            "--density-minus",
            "0.0",
        ],
    );
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    let csv = read(tmp.path().join("sw/sweep.csv"));
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",failed,"), "{}", rows[0]);
    assert!(rows[1].contains(",ok,"), "{}", rows[1]);
    assert!(read(tmp.path().join("sw/sweep_summary.txt")).contains("n_failed=1\n"));
}

#[test]
fn sweep_is_independent_of_job_count() {
    let tmp = tempfile::tempdir().unwrap();
    for (jobs, out) in [("1", "serial"), ("4", "parallel")] {
        let mut args = vec![
            "sweep",
            "--seeds",
            "7,8",
            "--p-values",
            "0.01,0.02",
            "--jobs",
            jobs,
            "--out",
            out,
        ];
        args.extend(&SMALL[4..]);
        args.extend(["--n", "30"]);
        assert_eq!(code(&schumpeter(tmp.path(), &args)), 0);
    }
    for point in ["p0.01_seed7", "p0.02_seed8"] {
        assert_eq!(
            std::fs::read(tmp.path().join("serial").join(point).join("timeseries.csv")).unwrap(),
            std::fs::read(
                tmp.path()
                    .join("parallel")
                    .join(point)
                    .join("timeseries.csv")
            )
            .unwrap()
        );
    }
    let strip = |s: String| {
        s.replace("config.jobs=1", "")
            .replace("config.jobs=4", "")
            .replace("serial", "")
            .replace("parallel", "")
    };
    assert_eq!(
        strip(read(tmp.path().join("serial/sweep.csv"))),
        strip(read(tmp.path().join("parallel/sweep.csv")))
    );
}

#[test]
fn bak_sneppen_runs_write_extinctions() {
    let tmp = tempfile::tempdir().unwrap();
    let o = schumpeter(
        tmp.path(),
        &[
            "preset",
            "bs-control",
            "--steps",
            "100000",
            "--lattice-size",
            "50",
            "--out",
            "bs",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for rule in ["minimum", "random"] {
        let dir = tmp.path().join(format!("bs/bs-{rule}_seed1"));
        let ext = read(dir.join("extinctions.csv"));
        assert!(ext.starts_with("t,site,fitness\n"));
        assert_eq!(ext.lines().count(), 100_001);
        assert!(read(dir.join("summary.txt")).contains(&format!("extinction={rule}")));
    }
}

#[test]
fn preset_flags_override_preset_values() {
    let tmp = tempfile::tempdir().unwrap();
    let o = schumpeter(
        tmp.path(),
        &[
            "preset",
            "fig1",
            "--steps",
            "1000000",
            "--out",
            "f1",
            "--artifacts",
            "summary",
        ],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let dir = tmp.path().join("f1");
    let summary = read(dir.join("summary.txt"));
    assert!(summary.contains("steps=1000000\n"));
    assert!(summary.contains("config.density_plus=0.001\n"));
    assert!(!dir.join("timeseries.csv").exists());
}
