use std::fs;
use std::process::{Command, Output};

use ous_core::harness::{replay_witness, search, Suite};
use ous_core::{parse_element, VerificationReport};

fn ous(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ous"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--model", "matrix:3", "--seed", "5", "--trials", "10"];
    let a = ous(&args);
    let b = ous(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("wall_time_ms"));
}

#[test]
fn timing_is_opt_in() {
    let out = ous(&["verify", "--model", "matrix:2", "--trials", "2", "--suite", "rickart", "--timing"]);
    assert!(stdout(&out).contains("wall_time_ms: "));
}

#[test]
fn seeds_give_different_streams() {
    let a = ous(&["gen", "--model", "matrix:3", "--seed", "0", "--count", "3"]);
    let b = ous(&["gen", "--model", "matrix:3", "--seed", "1", "--count", "3"]);
    assert_eq!(code(&a), 0);
    assert_ne!(a.stdout, b.stdout);
    for line in stdout(&a).lines() {
        parse_element(line).unwrap();
    }
}

#[test]
fn exit_codes() {
    let pass = ous(&["verify", "--model", "spin:2:3", "--trials", "20", "--suite", "jb-condition"]);
    assert_eq!(code(&pass), 0);
    let fail = ous(&["verify", "--model", "spin:3:2", "--trials", "20", "--suite", "jb-condition"]);
    assert_eq!(code(&fail), 1);
    for bad in [
        vec!["verify", "--model", "spin:12:2"],
        vec!["verify", "--model", "spin:1.05:2"],
        vec!["verify", "--model", "tensor:2"],
        vec!["verify", "--model", "matrix:2", "--suite", "nope"],
        vec!["verify", "--model", "matrix:2", "--suite", "duality"],
        vec!["verify", "--model", "matrix:2", "--trials", "0"],
        vec!["verify", "--model", "matrix:2", "--tol", "eq7"],
        vec!["counterexample", "--model", "matrix:2", "--target", "eq7"],
        vec!["counterexample", "--model", "spin:3:2", "--target", "nope"],
        vec!["calculus", "--in", "/nonexistent", "--fn", "bogus"],
        vec!["frobnicate"],
    ] {
        assert_eq!(code(&ous(&bad)), 2, "{bad:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("r.txt");
    let io = ous(&["verify", "--model", "matrix:2", "--trials", "1", "--suite", "rickart", "--out", target.to_str().unwrap()]);
    assert_eq!(code(&io), 3);
    assert!(String::from_utf8_lossy(&io.stderr).contains("cannot write report"));
}

#[test]
fn report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.txt");
    let second = dir.path().join("b.txt");
    let out = ous(&["verify", "--model", "spin:3:2", "--trials", "15", "--out", first.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let text = fs::read_to_string(&first).unwrap();
    assert_eq!(text, stdout(&out));
    assert!(text.ends_with('\n'));
    let parsed = VerificationReport::from_text(&text).unwrap();
    assert_eq!(parsed.to_text(), text);

    let re = ous(&["report", "--in", first.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert_eq!(code(&re), 1);
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());

    let third = dir.path().join("c.txt");
    let run = ous(&["report", "--model", "spin:3:2", "--trials", "15", "--out", third.to_str().unwrap()]);
    assert_eq!(code(&run), 1);
    assert_eq!(fs::read(&first).unwrap(), fs::read(&third).unwrap());
}

fn assert_replays(report: &VerificationReport, replay: impl Fn(&str, &[ous_core::Element]) -> f64) {
    assert!(!report.witnesses.is_empty());
    for w in &report.witnesses {
        let elems: Vec<_> = w.elements.iter().map(|e| parse_element(e).unwrap().1).collect();
        let v = replay(&w.label, &elems);
        assert!((v - w.value).abs() <= 0.01 * w.value.abs(), "{}: {v} vs {}", w.label, w.value);
    }
}

#[test]
fn suite_witnesses_replay() {
    let out = ous(&["verify", "--model", "spin:5:3", "--trials", "40", "--suite", "jb-condition"]);
    let report = VerificationReport::from_text(&stdout(&out)).unwrap();
    assert_eq!(code(&out), 1);
    let ctx = ous_core::ModelContext::spin_lp(5.0, 3).unwrap();
    assert_replays(&report, |label, elems| {
        let (suite, check) = label.split_once('/').unwrap();
        replay_witness(&ctx, suite.parse::<Suite>().unwrap(), check, elems).unwrap()
    });
}

#[test]
fn counterexample_witnesses_replay() {
    for (model, p, target) in [("spin:3:2", 3.0, "eq7"), ("spin:5:3", 5.0, "psi-linearity"), ("spin:1.5:3", 1.5, "bilinearity")] {
        let out = ous(&["counterexample", "--model", model, "--target", target, "--samples", "500"]);
        assert_eq!(code(&out), 1, "{model} {target}");
        let report = VerificationReport::from_text(&stdout(&out)).unwrap();
        let ctx = ous_core::ModelContext::spin_lp(p, report.model.rsplit(':').next().unwrap().parse().unwrap()).unwrap();
        assert_replays(&report, |label, elems| {
            search::replay(&ctx, label.parse().unwrap(), elems).unwrap()
        });
    }
}

#[test]
fn euclidean_search_finds_nothing() {
    let out = ous(&["counterexample", "--model", "spin:2:4", "--target", "eq7"]);
    assert_eq!(code(&out), 0);
    let report = VerificationReport::from_text(&stdout(&out)).unwrap();
    assert!(report.witnesses.is_empty());
    assert_eq!(report.trials, 10_000);
}

#[test]
fn spectrum_and_calculus() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("a.txt");
    fs::write(&file, "# diag(2,-3)\nmatrix n 2 rowmajor 2 0 0 -3\nspin p 2 alpha 2 y -3 0\n").unwrap();
    let path = file.to_str().unwrap();

    let spec = stdout(&ous(&["spectrum", "--in", path]));
    assert!(spec.contains("value: -3.0") && spec.contains("value: 2.0"));
    assert!(spec.contains("value: -1.0") && spec.contains("value: 5.0"));

    let chi = ous(&["calculus", "--in", path, "--fn", "chi -3 2"]);
    assert_eq!(code(&chi), 0);
    let lines: Vec<String> = stdout(&chi).lines().map(String::from).collect();
    assert_eq!(lines[0], "matrix n 2 rowmajor 1.0 0.0 0.0 0.0");
    assert_eq!(lines[1], "spin p 2.0 alpha 0.5 y 0.5 0.0");

    let sq = stdout(&ous(&["calculus", "--in", path, "--fn", "square"]));
    assert_eq!(sq.lines().next().unwrap(), "matrix n 2 rowmajor 4.0 0.0 0.0 9.0");

    // sqrt is undefined at -3
    assert_eq!(code(&ous(&["calculus", "--in", path, "--fn", "root 2"])), 2);
}
