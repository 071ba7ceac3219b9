use std::path::PathBuf;
use std::process::{Command, Output};

fn assets() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../assets/domains")
}

fn asset(name: &str) -> String {
    assets().join(name).display().to_string()
}

fn planlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planlab"))
        .args(args)
        .env_remove("PLANLAB_SEED")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn verify_fig9(plan: &str) -> Output {
    planlab(&[
        "verify",
        "--domain",
        &asset("grippers-wf.pdom"),
        "--instance",
        &asset("grippers-fig9.pinst"),
        "--plan",
        &asset(plan),
    ])
}

#[test]
fn verify_reports_each_status() {
    let ok = verify_fig9("grippers-pi.pplan");
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout_json(&ok)["status"], "valid");

    let bad = verify_fig9("grippers-pi2.pplan");
    assert_eq!(bad.status.code(), Some(1));
    let v = stdout_json(&bad);
    assert_eq!(v["status"], "non_executable");
    assert_eq!(v["step"], 8);
    assert_eq!(v["violated"], "(carry object_76 object_223)");

    let short = verify_fig9("grippers-pi1.pplan");
    assert_eq!(short.status.code(), Some(1));
    assert_eq!(stdout_json(&short)["unsat_goals"], serde_json::json!(["(at object_94 object_280)"]));
}

#[test]
fn builtin_domain_ids_and_traces() {
    let out = planlab(&[
        "verify",
        "--domain",
        "grippers-df",
        "--instance",
        &asset("grippers-fig9.pinst"),
        "--plan",
        &asset("grippers-pi2.pplan"),
        "--trace",
    ]);
    // the instance names the well-formed domain
    assert_eq!(out.status.code(), Some(2));

    let out = planlab(&[
        "verify",
        "--domain",
        "grippers-wf",
        "--instance",
        &asset("grippers-fig9.pinst"),
        "--plan",
        &asset("grippers-pi.pplan"),
        "--trace",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["trace"].as_array().unwrap().len(), 9);
}

#[test]
fn missing_files_are_usage_errors() {
    let out = planlab(&["verify", "--domain", "grippers-wf", "--instance", "/no/such.pinst", "--plan", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such.pinst"));
    assert_eq!(planlab(&["stats", "/no/such.jsonl"]).status.code(), Some(2));
    assert_eq!(planlab(&["gen", "grippers"]).status.code(), Some(2));
}

#[test]
fn gen_is_byte_identical_across_runs_and_jobs() {
    let args = ["gen", "colors-wf", "--seed", "7", "--count", "30"];
    let a = planlab(&args);
    assert_eq!(a.status.code(), Some(0));
    let mut more = args.to_vec();
    more.extend(["--jobs", "3"]);
    let b = planlab(&more);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 30);
}

#[test]
fn gen_dir_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let out = planlab(&["gen", "lightsout-ce", "--lengths", "11:40", "--ood-lengths", "41:60", "--count", "8", "--out", &d]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = stdout_json(&out);
    assert_eq!(summary["splits"]["train"]["records"], 8);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("lightsout-ce.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["args"]["command"]["gen"]["lengths"], "11:40");

    let train = dir.path().join("lightsout-ce.train.jsonl").display().to_string();
    let st = stdout_json(&planlab(&["stats", &train]));
    assert_eq!(st["min_objects"], 25);
    assert_eq!(st["max_objects"], 25);
    assert_eq!(st["correct"], st["incorrect"]);
}

#[test]
fn compile_encode_and_run() {
    let dir = tempfile::tempdir().unwrap();
    let program = dir.path().join("p.crasp").display().to_string();
    let word = dir.path().join("w.txt");
    let out = planlab(&["compile-crasp", "--domain", "grippers-wf", "--mode", "wf", "--out", &program]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["universe"], "variable");

    for (plan, accept) in [("grippers-pi.pplan", true), ("grippers-pi1.pplan", false), ("grippers-pi2.pplan", false)] {
        let enc = planlab(&[
            "encode",
            "--domain",
            "grippers-wf",
            "--instance",
            &asset("grippers-fig9.pinst"),
            "--plan",
            &asset(plan),
        ]);
        assert_eq!(enc.status.code(), Some(0));
        std::fs::write(&word, &enc.stdout).unwrap();
        let w = word.display().to_string();
        let run = planlab(&["run-crasp", "--program", &program, "--input", &w, "--classify"]);
        assert_eq!(run.status.code(), Some(if accept { 0 } else { 1 }), "{plan}");
        let v = stdout_json(&run);
        assert_eq!(v["accept"], accept);
        assert!(v["class"]["match_ops"].as_u64().unwrap() > 0);

        let table = planlab(&["run-crasp", "--program", &program, "--input", &w, "--dump-table"]);
        let text = String::from_utf8(table.stdout).unwrap();
        let rows: Vec<&str> = text.lines().collect();
        assert_eq!(rows.len(), v["lines"].as_u64().unwrap() as usize);
        assert!(rows.iter().all(|r| r.split('\t').count() == v["length"].as_u64().unwrap() as usize));
    }
}

#[test]
fn compile_refuses_non_well_formed_domains() {
    let out = planlab(&["compile-crasp", "--domain", "colors-strips", "--mode", "wf"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not supported"));
}

#[test]
fn lowered_programs_drop_matches() {
    let dir = tempfile::tempdir().unwrap();
    let program = dir.path().join("p.crasp").display().to_string();
    let lowered = dir.path().join("l.crasp").display().to_string();
    let out = planlab(&["compile-crasp", "--domain", "colors-wf", "--mode", "wf", "--out", &program]);
    assert_eq!(out.status.code(), Some(0));
    let out = planlab(&["lower", "--program", &program, "--values", "0,1,2", "--out", &lowered]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!(v["match_ops_before"].as_u64().unwrap() > 0);
    assert_eq!(v["match_ops_after"], 0);
}

#[test]
fn theory_checks_pass_and_report() {
    let out = planlab(&["check-theory", "flipflop", "--max-len", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["tested"], 9840);
    assert_eq!(v["disagree"], 0);

    let out = planlab(&["check-theory", "parity", "--board", "2x2", "--exhaustive", "--max-len", "4"]);
    assert_eq!(out.status.code(), Some(0));

    let out = planlab(&["check-theory", "parity", "--board", "4x4", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(2));

    let out = planlab(&["check-theory", "compiled", "--variant", "grippers-df", "--pairs", "6", "--lengths", "11:20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout_json(&out)["tested"].as_u64().unwrap() >= 12);
}
