use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_paratile"));
    c.env_remove("SELFSIM_BUDGET");
    c
}

fn machine_file() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../machines/two_state.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

/// Runs a build command and stores its stdout in `dir/name`.
fn build(dir: &TempDir, name: &str, args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let p = dir.path().join(name);
    std::fs::write(&p, &o.stdout).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn tm_run_reproduces_the_demo_rows() {
    let m = machine_file();
    let o = run(&["tm", "run", m.to_str().unwrap(), "--steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "OK");
    let text: Vec<&str> = v["text"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(
        text,
        [
            "(a,_)",
            "0 (b,_)",
            "(a,0) 0",
            "1 (b,0)",
            "1 (b,1)",
            "1 0 (a,_)"
        ]
    );
}

#[test]
fn tm_tile_and_renders() {
    let m = machine_file();
    let m = m.to_str().unwrap();
    let o = run(&["tm", "tile", m, "--steps", "5", "--width", "7"]);
    let v = json(&o);
    assert_eq!(
        (
            v["status"].as_str(),
            v["width"].as_u64(),
            v["height"].as_u64()
        ),
        (Some("OK"), Some(7), Some(6))
    );
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);

    let text = run(&[
        "tm", "tile", m, "--steps", "5", "--width", "7", "--render", "text",
    ]);
    let s = String::from_utf8(text.stdout.clone()).unwrap();
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l.split_whitespace().count() == 7));
    let again = run(&[
        "tm", "tile", m, "--steps", "5", "--width", "7", "--render", "text",
    ]);
    assert_eq!(text.stdout, again.stdout);

    let pgm = run(&[
        "tm", "tile", m, "--steps", "5", "--width", "7", "--render", "pgm",
    ]);
    assert!(pgm.stdout.starts_with(b"P5\n"));
    let svg = run(&[
        "tm", "tile", m, "--steps", "5", "--width", "7", "--render", "svg",
    ]);
    assert_eq!(
        String::from_utf8_lossy(&svg.stdout)
            .matches("<polygon")
            .count(),
        4 * 42
    );

    let bad = run(&[
        "tm", "tile", m, "--steps", "5", "--width", "7", "--render", "png",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json(&bad)["status"], "ERROR");
}

#[test]
fn tm_compile_counts() {
    let m = machine_file();
    let v = json(&run(&["tm", "compile", m.to_str().unwrap()]));
    let kinds: Vec<&str> = v["tiles"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds.iter().filter(|k| **k == "left_move").count(), 1);
    assert_eq!(kinds.iter().filter(|k| **k == "right_move").count(), 4);
    assert_eq!(v["count"].as_u64().unwrap() as usize, kinds.len());
}

#[test]
fn paradox_round_trip_and_corruption() {
    let dir = TempDir::new().unwrap();
    let f = build(&dir, "p.json", &["paradox", "gen", "--radius", "4"]);
    let o = run(&["paradox", "check", &f]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "OK");
    assert!(v["skipped"].as_u64().unwrap() > 0);

    let mut p: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let cell = p["cells"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|c| c["at"] == "e")
        .unwrap();
    let lg = cell["lg"].clone();
    cell["lg"] = cell["lb"].clone();
    cell["lb"] = lg;
    std::fs::write(&f, p.to_string()).unwrap();
    let o = run(&["paradox", "check", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["status"], "VIOLATIONS");

    let f = build(&dir, "q.json", &["paradox", "gen", "--radius", "6"]);
    let v = json(&run(&[
        "paradox", "paths", &f, "--from", "a", "--steps", "2",
    ]));
    assert_eq!(v["path"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_json_reports_position() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("bad.json");
    std::fs::write(&f, "{\"moveset\": [").unwrap();
    let o = run(&["paradox", "check", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["status"], "ERROR");
    assert!(v["message"].as_str().unwrap().contains("line 1"));
}

#[test]
fn tilespace_round_trip() {
    let dir = TempDir::new().unwrap();
    let args = [
        "tilespace",
        "build",
        "--y",
        "010010010100",
        "--width",
        "8",
        "--height",
        "5",
    ];
    let f = build(&dir, "t.json", &args);
    let o = run(&["tilespace", "check", &f, "--budget", "10"]);
    assert_eq!(
        (o.status.code(), json(&o)["status"].as_str()),
        (Some(0), Some("OK"))
    );
    let r = run(&["tilespace", "render", &f, "--fmt", "text"]);
    assert_eq!(String::from_utf8(r.stdout).unwrap().lines().count(), 5);

    let o = run(&[
        "tilespace",
        "build",
        "--y",
        "011000000000",
        "--width",
        "8",
        "--height",
        "5",
    ]);
    assert_eq!(
        (o.status.code(), json(&o)["status"].as_str()),
        (Some(1), Some("REJECTED"))
    );
}

#[test]
fn selfsim_round_trip() {
    let dir = TempDir::new().unwrap();
    let f = build(
        &dir,
        "z.json",
        &["selfsim", "build", "--x", "01010010", "--radius", "3"],
    );
    let o = run(&["selfsim", "check", &f]);
    assert_eq!(
        (o.status.code(), json(&o)["status"].as_str()),
        (Some(0), Some("OK"))
    );
    let v = json(&run(&["selfsim", "extract", &f, "--len", "3"]));
    assert_eq!(v["word"], "010");
    let o = run(&["selfsim", "equivariance", &f, "--gen", "va", "--len", "3"]);
    assert_eq!(json(&o)["holds"], true);
    let o = run(&["selfsim", "equivariance", &f, "--gen", "vz"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["selfsim", "build", "--x", "0110", "--radius", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selfsim_budget_from_environment() {
    // budget 1 cannot see the rejection of 0110, budget 3 can
    let o = bin()
        .args(["selfsim", "build", "--x", "0110", "--radius", "1"])
        .env("SELFSIM_BUDGET", "1")
        .output()
        .unwrap();
    let low = o.status.code();
    let o = bin()
        .args(["selfsim", "build", "--x", "0110", "--radius", "1"])
        .env("SELFSIM_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(low, Some(0));
}

#[test]
fn copied_layer_round_trip() {
    let dir = TempDir::new().unwrap();
    let f = build(
        &dir,
        "s.json",
        &["selfsim", "copy-build", "--radius", "3", "--x", "01001010"],
    );
    let o = run(&["selfsim", "copy-check", &f, "--set", "golden"]);
    assert_eq!(
        (o.status.code(), json(&o)["status"].as_str()),
        (Some(0), Some("OK"))
    );
}

#[test]
fn mirror_commands() {
    let v = json(&run(&[
        "mirror", "bound", "--N", "7", "--alpha", "4", "--m", "1",
    ]));
    assert_eq!(
        (v["lhs"].as_u64(), v["rhs"].as_u64(), v["holds"].as_bool()),
        (Some(128), Some(64), Some(true))
    );

    let v = json(&run(&[
        "mirror", "collide", "--alpha", "2", "--N", "4", "--m", "2",
    ]));
    assert_ne!(v["collision"]["p"], v["collision"]["q"]);
    let v = json(&run(&[
        "mirror", "collide", "--alpha", "2", "--N", "1", "--m", "1",
    ]));
    assert!(v["collision"].is_null());
    assert_eq!(
        run(&["mirror", "collide", "--alpha", "2", "--N", "9", "--m", "3"])
            .status
            .code(),
        Some(2)
    );

    let v = json(&run(&["mirror", "forbid", "--rank", "2", "--budget", "1"]));
    assert_eq!(v["count"], 20);

    let dir = TempDir::new().unwrap();
    let f = build(
        &dir,
        "m.json",
        &[
            "mirror", "gen", "--seed", "5", "--radius", "3", "--levels", "2",
        ],
    );
    let g = build(
        &dir,
        "m2.json",
        &[
            "mirror", "gen", "--seed", "5", "--radius", "3", "--levels", "2",
        ],
    );
    assert_eq!(std::fs::read(&f).unwrap(), std::fs::read(&g).unwrap());
    let o = run(&["mirror", "check", &f]);
    assert_eq!(
        (o.status.code(), json(&o)["status"].as_str()),
        (Some(0), Some("OK"))
    );

    let mut p: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let cell = p["cells"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|c| c["g"] == "a" && c["n"] == 0)
        .unwrap();
    cell["sym"] = if cell["sym"] == "0" {
        "1".into()
    } else {
        "0".into()
    };
    std::fs::write(&f, p.to_string()).unwrap();
    let o = run(&["mirror", "check", &f]);
    assert_eq!(
        (o.status.code(), json(&o)["status"].as_str()),
        (Some(1), Some("VIOLATIONS"))
    );
}

#[test]
fn help_and_unknown_flags() {
    for args in [
        &["--help"][..],
        &["tm", "--help"],
        &["mirror", "collide", "--help"],
        &["selfsim", "copy-check", "--help"],
    ] {
        assert_eq!(run(args).status.code(), Some(0), "{args:?}");
    }
    assert_eq!(
        run(&["paradox", "gen", "--radius", "2", "--bogus"])
            .status
            .code(),
        Some(2)
    );
}
