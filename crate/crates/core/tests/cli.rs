//! End-to-end runs of the bramsey binary: exit codes per command,
//! report files, and re-verification of every witness file it writes.

use std::path::Path;
use std::process::{Command, Output};

use butterfly_ramsey::cli::CellReport;
use butterfly_ramsey::witnesses::load_witness;

fn bramsey(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bramsey"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn arrow_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bramsey(&["arrow", "--j", "3", "--s", "2", "--blue", "P3"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("NOT-ARROWS"));

    let out = bramsey(&["arrow", "--j", "3", "--s", "3", "--blue", "P3"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("ARROWS"));

    // Bad bounds and bad names are usage errors.
    let out = bramsey(&["arrow", "--j", "1", "--s", "2", "--blue", "P3"], dir.path());
    assert_eq!(code(&out), 1);
    let out = bramsey(&["arrow", "--j", "3", "--s", "2", "--blue", "P99"], dir.path());
    assert_eq!(code(&out), 1);

    // Zero budget cannot decide a nontrivial instance.
    let out = bramsey(
        &["arrow", "--j", "6", "--s", "2", "--blue", "B2", "--budget-secs", "0"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn arrow_witness_file_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = bramsey(
        &["arrow", "--j", "3", "--s", "2", "--blue", "P3", "--witness-out", "w.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let record = load_witness(&dir.path().join("w.json")).unwrap();
    assert_eq!(record.shape().parts(), 3);
    assert_eq!(record.shape().part_size(), 2);
}

#[test]
fn verify_table_exit_codes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    // A fully confirmed cell.
    let out = bramsey(
        &["verify-table", "--rows", "5", "--targets", "K1_3"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);

    // The conflicted (3, P3) cell: table refuted, theorem confirmed.
    let out = bramsey(
        &["verify-table", "--rows", "3", "--targets", "P3", "--report", "p3.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 3);
    let text = std::fs::read_to_string(dir.path().join("p3.json")).unwrap();
    let reports: Vec<CellReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(reports.len(), 2);
    let verdicts: Vec<String> = reports
        .iter()
        .map(|r| serde_json::to_value(r.verdict).unwrap().as_str().unwrap().to_string())
        .collect();
    assert!(verdicts.contains(&"REFUTED".to_string()));
    assert!(verdicts.contains(&"CONFIRMED".to_string()));

    // A deferred out-of-scale cell stays partial.
    let out = bramsey(
        &["verify-table", "--rows", "7", "--targets", "C3"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn witness_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = bramsey(&["witness", "blue_c9_3x3"], dir.path());
    assert_eq!(code(&out), 0);
    // Two records under one id, suffixed by the blue claim.
    let k13 = load_witness(&dir.path().join("blue_c9_3x3_k1_3.json")).unwrap();
    let c4 = load_witness(&dir.path().join("blue_c9_3x3_c4.json")).unwrap();
    assert_eq!(k13.coloring, c4.coloring);

    let out = bramsey(&["witness", "no_such_id"], dir.path());
    assert_eq!(code(&out), 1);

    // The refuted record is absent, not fabricated.
    let out = bramsey(&["witness", "b2_witness_6x2"], dir.path());
    assert_eq!(code(&out), 2);

    let out = bramsey(
        &["witness", "--generate", "pentagon", "--j", "5", "--s", "4"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    load_witness(&dir.path().join("pentagon_blowup_5x4.json")).unwrap();
}

#[test]
fn cnf_export_and_model_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = bramsey(
        &["export-cnf", "--j", "3", "--s", "2", "--blue", "P3", "--out", "inst.cnf"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let cnf = std::fs::read_to_string(dir.path().join("inst.cnf")).unwrap();
    assert!(cnf.contains("p cnf 12 48"));

    // Get a model from an engine witness.
    use butterfly_ramsey::engine::{decide_arrowing, ArrowVerdict, SearchOptions};
    use butterfly_ramsey::mpgraph::{make_shape, Color};
    use butterfly_ramsey::patterns::PatternName;
    let shape = make_shape(3, 2).unwrap();
    let verdict = decide_arrowing(shape, PatternName::B, PatternName::P3, &SearchOptions::default())
        .unwrap();
    let ArrowVerdict::NotArrows { witness, .. } = verdict else {
        panic!("expected NotArrows");
    };
    let lits: Vec<String> = (0..shape.edge_count())
        .map(|e| {
            let lit = e as i64 + 1;
            match witness.color(e).unwrap() {
                Some(Color::Red) => lit.to_string(),
                _ => (-lit).to_string(),
            }
        })
        .collect();
    std::fs::write(
        dir.path().join("good.model"),
        format!("s SATISFIABLE\nv {} 0\n", lits.join(" ")),
    )
    .unwrap();
    let out = bramsey(
        &[
            "check-model",
            "--meta",
            "inst.cnf.meta.json",
            "--model",
            "good.model",
            "--witness-out",
            "model_w.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    load_witness(&dir.path().join("model_w.json")).unwrap();

    // Truncated model is rejected.
    std::fs::write(
        dir.path().join("bad.model"),
        format!("v {} 0\n", lits[..6].join(" ")),
    )
    .unwrap();
    let out = bramsey(
        &["check-model", "--meta", "inst.cnf.meta.json", "--model", "bad.model"],
        dir.path(),
    );
    assert_eq!(code(&out), 1);
}
