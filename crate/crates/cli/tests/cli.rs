use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tower-primes"))
        .args(args)
        .env_remove("TOWER_PRIMES_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn iterate_prints_bare_values() {
    let o = run(&["iterate", "--n", "1", "--k", "4"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "11\n"));
    let o = run(&["iterate", "--n", "1", "--k", "0"]);
    assert_eq!((code(&o), stdout(&o).as_str()), (0, "1\n"));
    let o = run(&["--ceiling", "1000", "iterate", "--n", "3", "--k", "3"]);
    assert_eq!(stdout(&o), "31\n");
}

#[test]
fn rosser_sweep_passes() {
    let o = run(&["--ceiling", "20000000", "verify", "rosser", "--n-max", "1000000"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.matches("passed=true").count(), 2, "{out}");
}

#[test]
fn exit_codes() {
    // range
    assert_eq!(code(&run(&["--ceiling", "1000", "iterate", "--n", "1", "--k", "8"])), 3);
    assert_eq!(code(&run(&["--ceiling", "1000", "count", "--family", "nested:1", "--x", "1001"])), 3);
    // usage
    assert_eq!(code(&run(&["iterate", "--n", "1"])), 2);
    assert_eq!(code(&run(&["count", "--family", "tower:0", "--x", "10"])), 2);
    assert_eq!(code(&run(&["--ceiling", "1", "iterate", "--n", "1", "--k", "1"])), 2);
    // verification: the power-alpha upper bound fails one step past its start
    let o = run(&["--ceiling", "1000000", "verify", "tower-upper", "--n", "1", "--l-max", "10", "--k-start", "4"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("passed=false"));
    // no certifiable starting depth
    assert_eq!(code(&run(&["--ceiling", "1000000", "verify", "tower-upper", "--n", "1", "--l-max", "10"])), 1);
}

#[test]
fn csv_is_versioned() {
    let o = run(&["--ceiling", "1000", "--format", "csv", "count", "--family", "tower:1", "--x", "709"]);
    assert_eq!(stdout(&o), "#v1\nfamily,x,count\ntower:1,709,7\n");
    let o = run(&["--ceiling", "1000", "--format", "csv", "enumerate", "--family", "diagonal", "--x", "31"]);
    assert_eq!(stdout(&o), "#v1\nvalue\n2\n5\n31\n");
}

#[test]
fn rows_format() {
    let o = run(&["--ceiling", "1000", "--format", "rows", "tails", "--n", "1", "--m", "11", "--x", "127"]);
    assert_eq!(
        stdout(&o),
        "n=1\tm=11\trelation=contained\tk=4\nn=1\tm=11\tx=127\tj0=4\tdifference=4\twithin_band=true\n"
    );
    let o = run(&["--ceiling", "1000", "--format", "rows", "tails", "--n", "2", "--m", "4"]);
    assert_eq!(stdout(&o), "n=2\tm=4\trelation=disjoint\tk=-\n");
}

#[test]
fn enumeration_and_levels() {
    let o = run(&["--ceiling", "1000", "enumerate", "--family", "nested:2", "--x", "31"]);
    assert_eq!(stdout(&o), "3\n5\n11\n17\n31\n");
    let o = run(&["--ceiling", "1000", "enumerate", "--family", "tower:1", "--x", "127"]);
    assert_eq!(stdout(&o), "2\n3\n5\n11\n31\n127\n");
    for (m, level) in [("4", "0"), ("11", "4"), ("17", "2")] {
        assert_eq!(stdout(&run(&["--ceiling", "1000", "level", "--m", m])), format!("{level}\n"));
    }
}

#[test]
fn logs_stay_off_stdout() {
    let o = run(&["--ceiling", "1000000", "trace", "c8"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("truncated"));
    for line in stdout(&o).lines() {
        let cols: Vec<&str> = line.split(' ').collect();
        assert_eq!(cols.len(), 2, "{line}");
        cols[0].parse::<f64>().unwrap();
        cols[1].parse::<f64>().unwrap();
    }
}

#[test]
fn series_and_witness_text() {
    let o = run(&["--ceiling", "1000", "series", "--family", "diagonal", "--alpha", "0.5", "--x", "31"]);
    let out = stdout(&o);
    assert!(out.starts_with("31 [1.333"), "{out}");
    let o = run(&["--ceiling", "1000", "ratio", "witness", "--k", "2", "--target", "1", "--epsilon", "0", "--bound", "100"]);
    assert_eq!(stdout(&o), "1.0 3 3 0.0\n");
    let o = run(&["--ceiling", "1000", "tail-bound", "--family", "tower:1", "--alpha", "1", "--k", "2"]);
    assert!(stdout(&o).starts_with("3.7135"));
}

#[test]
fn output_is_deterministic_and_cache_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--ceiling", "3000000", "--format", "csv", "experiment", "q1"];
    let first = Command::new(env!("CARGO_BIN_EXE_tower-primes"))
        .args(args)
        .env("TOWER_PRIMES_CACHE", dir.path())
        .output()
        .unwrap();
    let second = Command::new(env!("CARGO_BIN_EXE_tower-primes"))
        .args(args)
        .env("TOWER_PRIMES_CACHE", dir.path())
        .output()
        .unwrap();
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, run(&args).stdout);
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert!(names.iter().any(|n| n.starts_with("seg_0_") && n.ends_with(".bits")), "{names:?}");
    assert!(names.iter().any(|n| n == "iterated.memo"));
}
