//! Golden reports for the fixture corpus. Set `UPDATE_GOLDEN=1` to rewrite
//! them after an intended change.

mod common;

use std::process::Command;

use common::{fixture_dir, fixtures, golden_dir, report};

#[test]
fn reports_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let fixtures = fixtures();
    assert!(fixtures.len() >= 5);
    for (stem, text) in fixtures {
        let got = report(&text);
        let path = golden_dir().join(format!("{stem}.json"));
        if update {
            std::fs::write(&path, &got).unwrap();
            continue;
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file for {stem}"));
        assert_eq!(got, want, "report for {stem} drifted from its golden file");
    }
}

#[test]
fn reports_are_byte_stable() {
    for (stem, text) in fixtures() {
        assert_eq!(report(&text), report(&text), "{stem}");
    }
}

#[test]
fn corpus_covers_every_command() {
    let mut seen = std::collections::BTreeSet::new();
    for (_, text) in fixtures() {
        let site = ltsheaf_cli::load(&text).unwrap();
        for c in &site.commands {
            seen.insert(c.kind.name());
        }
    }
    for name in ltsheaf_cli::ast::CommandKind::NAMES {
        assert!(seen.contains(name), "no fixture runs `{name}`");
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ltsheaf"))
}

#[test]
fn binary_prints_golden_json_and_exit_code() {
    for (stem, _) in fixtures() {
        let out = bin().arg(fixture_dir().join(format!("{stem}.site"))).output().unwrap();
        let want = std::fs::read_to_string(golden_dir().join(format!("{stem}.json"))).unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), want, "{stem}");
        let passed = want.contains("\n  \"passed\": true");
        assert_eq!(out.status.code(), Some(if passed { 0 } else { 1 }), "{stem}");
    }
}

#[test]
fn terminal_fixture_passes_with_exit_zero() {
    let out = bin().arg(fixture_dir().join("terminal.site")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn json_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("ltsheaf-json-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let out = bin()
        .arg(fixture_dir().join("sierpinski.site"))
        .args(["check-coverage", "--human", "--json"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("ok   check-coverage"));
    let written: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["commands"][0]["report"], serde_json::json!({"valid": true, "violations": []}));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn input_errors_exit_two_with_position() {
    let dir = std::env::temp_dir().join(format!("ltsheaf-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.site");
    std::fs::write(&path, "category { objects a\n  arrow f: a -> b }\n").unwrap();
    let out = bin().arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.site:2:"), "{err}");
    assert!(err.contains("unknown object `b`"), "{err}");

    let out = bin().arg(fixture_dir().join("sierpinski.site")).args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("unknown command `frobnicate`"));

    let out = bin().arg(dir.join("missing.site")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn cap_flag_surfaces_structured_errors() {
    let out = bin().arg(fixture_dir().join("sierpinski.site")).args(["--cap", "1", "sheafify", "K"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["commands"][0]["report"]["error"]["kind"], "cap-exceeded");
}
