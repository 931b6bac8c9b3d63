use std::path::Path;

use nzfcheck::cli::{run, EXIT_DISAGREE, EXIT_ENGINE, EXIT_INPUT, EXIT_IO, EXIT_TOO_LARGE, EXIT_USAGE};

fn nzf(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("nzfcheck").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const LAMP: &str = "clocks x;\nmode off;\nmode on { inv: x <= 2; }\ntrans off -> on { reset: x; }\ntrans on -> off { guard: x >= 1; }\ninit off;\n";

#[test]
fn verdicts_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "lamp.ta", LAMP);
    let (code, out, _) = nzf(&["check", "--model", &m, "--formula", "AG (on -> x <= 2)"]);
    assert_eq!((code, out.trim()), (0, "AG (on -> x <= 2): SATISFIED"));
    let (code, _, _) = nzf(&["check", "--model", &m, "--formula", "AG off"]);
    assert_eq!(code, 1);
    // Level 0 finds no fair cycle through `on`, so it cannot refute.
    let (code, _, _) = nzf(&["check", "--model", &m, "--formula", "AFG off", "--mode", "under", "--level", "0"]);
    assert_eq!(code, 2);
    let (code, _, _) = nzf(&["check", "--model", &m, "--formula", "AFG off", "--mode", "under", "--level", "1"]);
    assert_eq!(code, 1);
}

#[test]
fn witness_lists_violating_initial_states() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "lamp.ta", LAMP);
    let (code, out, _) = nzf(&["check", "--model", &m, "--formula", "AG off", "--witness"]);
    assert_eq!(code, 1);
    assert!(out.contains("off"), "{out}");
}

#[test]
fn errors_use_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "lamp.ta", LAMP);
    let bad = write(dir.path(), "bad.ta", "clocks x;\nmode a;\ntrans a -> b;\ninit a;\n");
    let missing = dir.path().join("missing.ta");

    assert_eq!(nzf(&["check", "--model", &m]).0, EXIT_USAGE);
    assert_eq!(nzf(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(nzf(&["check", "--model", missing.to_str().unwrap(), "--formula", "EF on"]).0, EXIT_IO);
    let (code, _, err) = nzf(&["check", "--model", &bad, "--formula", "EF a"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line 3"), "{err}");
    assert_eq!(nzf(&["check", "--model", &m, "--formula", "EF dim"]).0, EXIT_INPUT);
    assert_eq!(nzf(&["check", "--model", &m, "--formula", "EGF on", "--max-iterations", "1"]).0, EXIT_ENGINE);
    assert_eq!(nzf(&["gen", "--family", "fischer", "--n", "9", "--out", dir.path().to_str().unwrap()]).0, EXIT_USAGE);

    let wide = write(dir.path(), "wide.ta", "clocks a b c d;\nmode m;\ninit m;\n");
    assert_eq!(nzf(&["oracle-check", "--model", &wide, "--formula", "EF m"]).0, EXIT_TOO_LARGE);
    assert_ne!(EXIT_DISAGREE, 0);
}

#[test]
fn oracle_check_agrees_on_a_small_model() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "lamp.ta", LAMP);
    let (code, out, _) = nzf(&["oracle-check", "--model", &m, "--formula", "AGF on"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("agree"), "{out}");
}

#[test]
fn stats_file_has_the_documented_keys() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "lamp.ta", LAMP);
    let stats = dir.path().join("stats.json");
    let (code, _, _) = nzf(&["check", "--model", &m, "--formula", "EGF on", "--stats", stats.to_str().unwrap()]);
    assert_eq!(code, 0);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    let mut keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(
        keys,
        ["final_zone_count", "fixpoint_iterations", "level_used", "mode", "peak_zone_count", "verdict", "wall_ms"]
    );
    assert_eq!(json["verdict"], "SATISFIED");
    assert_eq!(json["mode"], "exact");
}

#[test]
fn generated_pathos_is_refuted_at_level_zero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, _) = nzf(&["gen", "--family", "pathos", "--n", "3", "--out", d]);
    assert_eq!(code, 0);
    assert!(out.contains("pathos-3.ta"), "{out}");
    let model = dir.path().join("pathos-3.ta");
    let formula = dir.path().join("pathos-3.tctl");
    let stats = dir.path().join("s.json");
    let (code, _, err) = nzf(&[
        "check",
        "--model",
        model.to_str().unwrap(),
        "--formula-file",
        formula.to_str().unwrap(),
        "--mode",
        "under",
        "--level",
        "0",
        "--stats",
        stats.to_str().unwrap(),
    ]);
    assert_eq!(code, 1, "{err}");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(json["level_used"], 0);
}

#[test]
fn formula_files_skip_comments_and_blank_lines() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "lamp.ta", LAMP);
    let f = write(dir.path(), "p.tctl", "// lamp properties\n\nEF on\n  AG off  \n");
    let (code, out, _) = nzf(&["check", "--model", &m, "--formula-file", &f]);
    assert_eq!(code, 1);
    assert_eq!(out.lines().collect::<Vec<_>>(), ["EF on: SATISFIED", "AG off: REFUTED"]);
}
