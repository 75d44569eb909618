use std::fs;
use std::process::{Command, Output};

fn revlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(csv: &str, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|&h| h == column).unwrap();
    row[i].to_string()
}

#[test]
fn pebble_bennett_row() {
    let out = revlab(&["pebble", "bennett", "--k", "2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(field(&text, "moves"), "27");
    assert_eq!(field(&text, "max_pebbles"), "4");
    assert_eq!(field(&text, "first_reach_time"), "27");
}

#[test]
fn pebble_search_eight() {
    let out = revlab(&["pebble", "search", "--t", "8"]);
    assert_eq!(field(&stdout(&out), "min_pebbles"), "4");
}

#[test]
fn sim_bennett_three_two() {
    let out = revlab(&[
        "sim",
        "bennett",
        "--k",
        "3",
        "--n",
        "2",
        "--seg-len",
        "1",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(field(&text, "peak_checkpoints"), "5");
    assert_eq!(field(&text, "verdict"), "MATCH");
    assert_eq!(field(&text, "seed"), "7");
}

#[test]
fn bad_parameter_exits_two() {
    let out = revlab(&["pebble", "bennett", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`k`"));
}

#[test]
fn config_file_and_output_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.conf");
    fs::write(&config, "# grid\nk = 2-4\nn = 0-4\n").unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let out = revlab(&[
            "report",
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "-o",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = fs::read(&paths[0]).unwrap();
    assert_eq!(a, fs::read(&paths[1]).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 16);
}

#[test]
fn separator_exit_code_follows_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.txt");
    let c = chain.to_str().unwrap();
    let out = revlab(&[
        "oracle", "build", "--space", "6", "--t", "5", "--seed", "3", "-o", c,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&chain).unwrap();
    let last = text.lines().last().unwrap();
    let expected = u64::from_str_radix(last, 16).unwrap() >> 5 & 1 == 1;
    let out = revlab(&["oracle", "separator", "--chain", c]);
    assert_eq!(out.status.code(), Some(if expected { 0 } else { 1 }));
    let rom = revlab(&["oracle", "rom", "--chain", c]);
    assert_eq!(rom.status.code(), out.status.code());
}

#[test]
fn compress_then_decompress() {
    let dir = tempfile::tempdir().unwrap();
    let desc = dir.path().join("d.bin");
    let d = desc.to_str().unwrap();
    let out = revlab(&[
        "analyze",
        "compress",
        "--k",
        "2",
        "--n",
        "2",
        "--tau",
        "20",
        "-o",
        d,
        "--report-sizes",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("component,wire_bits,compact_bits\n"));
    let out = revlab(&[
        "analyze",
        "decompress",
        "--k",
        "2",
        "--n",
        "2",
        "--input",
        d,
    ]);
    assert_eq!(out.status.code(), Some(0));
    // A different chain does not match the description.
    let out = revlab(&[
        "analyze",
        "decompress",
        "--k",
        "2",
        "--n",
        "2",
        "--seed",
        "1",
        "--input",
        d,
    ]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn derived_moves_match_the_schedule() {
    let out = revlab(&["analyze", "pebbles", "--derive", "--k", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let expected = revlab(&["pebble", "bennett", "--k", "3", "--n", "2", "--moves"]);
    assert_eq!(stdout(&out), stdout(&expected));
}

#[test]
fn euler_table_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("m.txt");
    fs::write(&table, "width=2 initial=1\n1 -> 2\n2 -> 3\n").unwrap();
    let out = revlab(&["euler", "run", "--table", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "found 3 at step 2, tour length 4\n");
    fs::write(&table, "width=2\n0 -> 1\n1 -> 0\n").unwrap();
    let out = revlab(&["euler", "run", "--table", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = revlab(&["euler", "audit", "--depth", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("reverse=ok"));
}
