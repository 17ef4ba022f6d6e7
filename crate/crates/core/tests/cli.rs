use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_continuant"));
    c.env_remove("CONTINUANT_CACHE");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn out_arg(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn continuant_verb() {
    let o = run(&["continuant", "2,1,3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("continuant=11"), "{}", stdout(&o));
    let o = run(&["continuant", ""]);
    assert!(stdout(&o).contains("continuant=1 "));
    let o = run(&["continuant", "0,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    for args in [
        vec!["density", "--alphabet", "0..3", "--out", &out],
        vec!["density", "--bound", "ten", "--out", &out],
        vec!["density", "--parity", "odd", "--out", &out],
        vec!["ensemble", "--mode", "strict", "--out", &out],
        vec!["ensemble", "--mode", "literal", "--override", "J=1", "--out", &out],
        vec!["ensemble", "--override", "q=1", "--out", &out],
        vec!["ensemble", "--override", "J", "--out", &out],
        vec!["dimension", "--grid", "1000,x", "--out", &out],
        vec!["frobnicate"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn infeasible_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    for args in [
        vec!["ensemble", "--alphabet", "1,2", "--mode", "literal", "--out", &out],
        vec!["ensemble", "--alphabet", "1,2", "--epsilon0", "0.9", "--out", &out],
        vec!["density", "--bound", "0", "--out", &out],
        vec!["dimension", "--alphabet", "1..7", "--grid", "10,100,1000", "--out", &out],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(3), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn density_and_dimension_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["density", "--alphabet", "1..5", "--bound", "1000", "--out", &out_arg(dir.path())]);
    assert!(stdout(&o).starts_with("density coverage=1000/1000 "), "{}", stdout(&o));
    assert!(stdout(&o).contains(" input="));

    let o = run(&["dimension", "--alphabet", "1..7", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("dimension.json")).unwrap()).unwrap();
    let delta = json["delta"].as_f64().unwrap();
    assert!((0.8689..=0.9089).contains(&delta), "{delta}");
    for key in ["alphabet", "grid", "stderr", "thresholds"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn dedekind_sweep_clean() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dedekind", "--out", &out_arg(dir.path())]);
    assert!(stdout(&o).starts_with("dedekind failures=0 "), "{}", stdout(&o));
    let csv = std::fs::read_to_string(dir.path().join("dedekind.csv")).unwrap();
    assert!(csv.starts_with("y1,y2,P,R,lhs,rhs,slack\n"));
}

#[test]
fn arcs_report_keyed_by_domain() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "expsum", "--alphabet", "1,2", "--override", "J=1", "--override", "p=2", "--out", &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("arcs.json")).unwrap()).unwrap();
    let keys: Vec<&String> = json["domains"].as_object().unwrap().keys().collect();
    assert_eq!(keys, (1..=9).map(|d| d.to_string()).collect::<Vec<_>>().iter().collect::<Vec<_>>());
    assert!(std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap().starts_with("n,multiplicity\n"));
}

fn read_all(dir: &Path, names: &[&str]) -> Vec<Vec<u8>> {
    names.iter().map(|n| std::fs::read(dir.join(n)).unwrap()).collect()
}

#[test]
fn cache_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let configs: [(&str, &[&str], &[&str]); 3] = [
        ("density", &["--alphabet", "1..4", "--bound", "3000"], &["denominators.table", "missing.txt"]),
        ("density", &["--alphabet", "1,3", "--bound", "500", "--parity", "even"], &["denominators.table", "missing.txt"]),
        ("enumerate", &["--alphabet", "1..3", "--bound", "300"], &["words.txt"]),
    ];
    for (i, (verb, args, files)) in configs.iter().enumerate() {
        let mut results = Vec::new();
        for (j, cached) in [false, true, true].into_iter().enumerate() {
            let out = tmp.path().join(format!("{i}-{j}"));
            let mut cmd = bin();
            cmd.arg(verb).args(*args).arg("--out").arg(&out);
            if cached {
                cmd.arg("--cache").arg(&cache);
            }
            let o = cmd.output().unwrap();
            assert!(o.status.success());
            results.push((o.stdout, read_all(&out, files)));
        }
        assert!(results.windows(2).all(|w| w[0] == w[1]), "{verb} {args:?}");
    }
    assert!(std::fs::read_dir(&cache).unwrap().count() >= 3);
}

#[test]
fn cache_env_overrides_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let (flag, env) = (tmp.path().join("flag"), tmp.path().join("env"));
    let o = Command::new(env!("CARGO_BIN_EXE_continuant"))
        .args(["enumerate", "--alphabet", "1,2", "--bound", "40", "--out"])
        .arg(tmp.path().join("out"))
        .arg("--cache")
        .arg(&flag)
        .env("CONTINUANT_CACHE", &env)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(!flag.exists());
    assert_eq!(std::fs::read_dir(&env).unwrap().count(), 1);
}

#[test]
fn hash_ignores_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let a = run(&["density", "--bound", "200", "--out", &out_arg(&tmp.path().join("a"))]);
    let b = run(&["density", "--bound", "200", "--out", &out_arg(&tmp.path().join("b"))]);
    let c = run(&["density", "--bound", "201", "--out", &out_arg(&tmp.path().join("c"))]);
    assert_eq!(a.stdout, b.stdout);
    let hash = |o: &Output| stdout(o).split("input=").nth(1).unwrap().trim().to_string();
    assert_ne!(hash(&a), hash(&c));
    assert_eq!(hash(&a).len(), 64);
}
