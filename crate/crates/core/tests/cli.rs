use std::process::Command;

fn lab() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_maximal-lab"));
    c.env_remove("MAXIMAL_LAB_SEED");
    c
}

fn code(c: &mut Command) -> i32 {
    c.output().unwrap().status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(lab().args(["analyze", "--set", "lacunary"])), 0);
    assert_eq!(code(lab().args(["check", "--set", "power:1", "--p", "1.6", "--condition", "cpq"])), 2);
    assert_eq!(code(lab().args(["check", "--set", "power:1", "--p", "2.5"])), 1);
    assert_eq!(code(lab().args(["analyze"])), 1);
    assert_eq!(code(lab().args(["counterexample", "kakeya", "--set", "lacunary", "--n", "4"])), 0);
}

#[test]
fn errors_name_their_module() {
    let out = lab().args(["analyze", "--set", r#"{"type": "power"}"#]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error [dilation_set]"));
}

#[test]
fn env_seed_overrides_and_reports_match() {
    let run = |seed: Option<&str>| {
        let mut c = lab();
        c.args(["counterexample", "cantor", "--N", "2", "--samples", "300", "--json"]);
        if let Some(s) = seed {
            c.env("MAXIMAL_LAB_SEED", s);
        }
        let mut v: serde_json::Value = serde_json::from_slice(&c.output().unwrap().stdout).unwrap();
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let a = run(Some("11"));
    assert_eq!(a["config"]["seed"], 11);
    assert_eq!(a, run(Some("11")));
    assert_ne!(a, run(None));
}

#[test]
fn paper_defaults_conflict_with_truncation_flags() {
    assert_ne!(code(lab().args(["analyze", "--set", "full", "--paper-defaults", "--nmax", "12"])), 0);
    assert_eq!(code(lab().args(["analyze", "--set", "full", "--paper-defaults"])), 0);
}

#[test]
fn side_files() {
    let dir = std::env::temp_dir().join(format!("maximal-lab-cli-{}", std::process::id()));
    assert_eq!(code(lab().args(["analyze", "--set", "power:1", "--nmax", "8", "--out"]).arg(&dir)), 0);
    let csv = std::fs::read_to_string(dir.join("profile.csv")).unwrap();
    assert!(csv.starts_with("k,n,N"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["n_max"], 8);
    std::fs::remove_dir_all(dir).unwrap();
}
