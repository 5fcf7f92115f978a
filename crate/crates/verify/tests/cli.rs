use std::process::{Command, Output};

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify")).args(args).output().expect("verify runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn degenerate_product_passes_with_zero_residual() {
    let o = verify(&["--model", "product", "--mu", "0", "--suite", "killing", "--format", "json", "--points", "50"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let killing = &v["suites"][0];
    assert_eq!(killing["suite"], "killing");
    let cyclic = killing["checks"].as_array().unwrap().iter().find(|c| c["name"] == "cyclic").unwrap();
    assert_eq!(cyclic["stats"]["max"].as_f64(), Some(0.0));
}

#[test]
fn tolerance_below_rounding_fails_honestly() {
    let o = verify(&["--model", "cp2-radial", "--suite", "killing", "--tol", "1e-15", "--points", "200"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn configuration_errors_exit_2() {
    for args in [
        &["--model", "nope"][..],
        &["--model", "cp2-radial", "--suite", "kahlr"],
        &["--model", "cp2-radial", "--points", "0"],
        &["--model", "cp2-radial", "--param", "bogus=1"],
        &["--model", "cp2-radial", "--mu", "1"],
        &["--model", "cp2-radial", "--fd-step", "0.1"],
        &["--suite", "all"],
    ] {
        assert_eq!(verify(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn construction_errors_exit_3() {
    let o = verify(&["--model", "calabi", "--param", "tau_min=3", "--param", "tau_max=2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = verify(&["--model", "cpn-radial", "--param", "n=1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn listings_in_both_formats() {
    let text = stdout(&verify(&["list-models"]));
    for family in ["cpn-radial", "product", "calabi"] {
        assert!(text.contains(family));
    }
    let json: serde_json::Value = serde_json::from_str(&stdout(&verify(&["list-models", "--format", "json"]))).unwrap();
    assert_eq!(json["families"].as_array().unwrap().len(), 3);
    assert_eq!(json["models"].as_array().unwrap().len(), 7);

    let suites = stdout(&verify(&["list-suites"]));
    assert_eq!(suites.lines().count(), 9);
    assert!(suites.lines().all(|l| l.contains(" -> ")));
    let json: serde_json::Value = serde_json::from_str(&stdout(&verify(&["list-suites", "--format", "json"]))).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 9);
    assert!(json.as_array().unwrap().iter().all(|s| !s["identity"].as_str().unwrap().is_empty()));
}

#[test]
fn config_file_with_flag_override_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "model = \"calabi\"\npoints = 20\nseed = 3\nsuite = [\"calabi_relations\", \"killing\"]\nformat = \"json\"\n[params]\nprofile = \"sine\"\n").unwrap();
    let out = dir.path().join("report.csv");
    let o = verify(&["--config", cfg.to_str().unwrap(), "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "model,suite,status,points,checks,failed_checks,max,mean,p95,seed");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("calabi,calabi_relations,pass,20,"));
    assert!(rows[1].starts_with("calabi,killing,pass,20,"));
}

#[test]
fn text_report_names_conventions_and_wall_time() {
    let o = verify(&["--model", "cp2-radial", "--suite", "kahler", "--points", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("d^c f(X) = -df(JX)"));
    assert!(s.contains("wall time"));
}

#[test]
fn different_seeds_give_different_reports() {
    let run = |seed: &str| stdout(&verify(&["--model", "cp2-radial", "--suite", "killing", "--points", "20", "--seed", seed, "--format", "json"]));
    assert_ne!(run("1"), run("2"));
    assert_eq!(run("1"), run("1"));
}
