use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn repo(path: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..");
    root.join(path).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sectors")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = run(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid json")
}

fn groups(v: &Value) -> Vec<Vec<i64>> {
    v["sectors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| serde_json::from_value(s["based_group"].clone()).unwrap())
        .collect()
}

#[test]
fn torus_to_rp2_free() {
    let v = json(&["classify", "--source", "torus2", "--target", "rp2", "--free"]);
    assert_eq!(groups(&v), vec![vec![0], vec![2], vec![2], vec![2]]);
    assert_eq!(v["sectors"][0]["free_family"]["min"], 0);
    for s in 1..4 {
        assert_eq!(v["sectors"][s]["free_orbits"].as_array().unwrap().len(), 2);
    }
    let text = stdout(&run(&["classify", "--source", "torus2", "--target", "rp2", "--free"]));
    assert!(text.contains("4 sector(s), infinitely many free classes"));
}

#[test]
fn knot_has_three_free_classes() {
    let o = run(&["classify", "--source", "torus_knot:2,3", "--target", "rp2", "--free"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3 free class(es)"));
}

#[test]
fn torus3_to_lens_space() {
    let o = run(&["classify", "--source", "torus3", "--target", "lens:2,1", "--free"]);
    assert!(stdout(&o).contains("free: (Z_2)^3 x Z"));
    let v = json(&["classify", "--source", "torus3", "--target", "so3"]);
    assert_eq!(v["sectors"].as_array().unwrap().len(), 8);
    assert_eq!(v["description"], "(Z_2)^3 x Z");
}

#[test]
fn text_and_json_agree() {
    for (source, target) in [("torus2", "rp2"), ("klein_bottle", "rp2"), ("torus_knot:4,6", "rp2"), ("rp2", "sphere2")] {
        let v = json(&["classify", "--source", source, "--target", target, "--free"]);
        let text = stdout(&run(&["classify", "--source", source, "--target", target, "--free"]));
        let lines: Vec<&str> = text.lines().filter(|l| l.starts_with("sector")).collect();
        assert_eq!(lines.len(), v["sectors"].as_array().unwrap().len());
        for (line, g) in lines.iter().zip(groups(&v)) {
            let shown = sectors::zlinalg::AbelianGroup::from_cyclic(&g).to_string();
            assert!(line.contains(&format!("based {shown};")), "{line} vs {shown}");
        }
    }
}

#[test]
fn crosschecks() {
    assert_eq!(run(&["crosscheck", "--source", "torus2", "--target", "rp2"]).status.code(), Some(0));
    assert_eq!(run(&["crosscheck", "--source", "torus3", "--target", "sphere2"]).status.code(), Some(0));
    let good = repo("data/torus3_cup.json");
    let o = run(&["crosscheck", "--source", "torus3", "--target", "sphere2", "--bound", "2", "--cup", &good]);
    assert_eq!(o.status.code(), Some(0));
    let bad = repo("data/torus3_cup_corrupted.json");
    let o = run(&["crosscheck", "--source", "torus3", "--target", "sphere2", "--bound", "2", "--cup", &bad]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("MISMATCH"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["classify", "--source", "nowhere", "--target", "rp2"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "--source", "torus2", "--target", "nowhere"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "--source", "torus3", "--target", "rp2"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--source", "torus2", "--target", "so3"]).status.code(), Some(2));
    assert_eq!(run(&["crosscheck", "--source", "torus3", "--target", "lens:3,1"]).status.code(), Some(2));
    let first = run(&["classify", "--source", "genus_surface:2", "--target", "rp2", "--free"]);
    let second = run(&["classify", "--source", "genus_surface:2", "--target", "rp2", "--free"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn snf_command() {
    let v = json(&["snf", "--matrix", "[[2,4],[6,8]]"]);
    assert_eq!(v["diagonal"], serde_json::json!([2, 4]));
    let rows = |k: &str| -> Vec<Vec<i64>> { serde_json::from_value(v[k].clone()).unwrap() };
    let (u, s, w) = (rows("U"), rows("S"), rows("V"));
    let mul = |a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        (0..a.len()).map(|i| (0..b[0].len()).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
    };
    assert_eq!(mul(&mul(&u, &s), &w), vec![vec![2, 4], vec![6, 8]]);
    assert_eq!(run(&["snf", "--matrix", "[[1,2],[3]]"]).status.code(), Some(1));
}

#[test]
fn validate_and_hoang() {
    assert_eq!(run(&["validate", &repo("targets/rp2.json")]).status.code(), Some(0));
    assert_eq!(run(&["validate", &repo("targets/sphere2.json")]).status.code(), Some(0));
    assert_eq!(run(&["validate", "rp2"]).status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("sectors-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let broken = dir.join("broken.json");
    std::fs::write(&broken, r#"{"G":{"free_rank":1,"torsion":[]},"rank":2,"action":[[[0,1],[1,0]]],"boundary":[[2],[1]]}"#)
        .unwrap();
    assert_eq!(run(&["validate", broken.to_str().unwrap()]).status.code(), Some(1));
    let v = json(&["hoang", &repo("data/z4_mod2.json")]);
    assert_eq!(v["pi1_order"], 1);
    assert_eq!(v["pi2"], serde_json::json!([2]));
    assert_eq!(v["beta_cocycle"], true);
    let out = dir.join("report.json");
    let o = run(&["report", "--source", "torus3", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["three_cells"][0]["boundary"], "ε");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn s2_sectors_over_the_sphere_product() {
    let v = json(&["classify", "--source", "s1_x_s2", "--target", "sphere2", "--bound", "3"]);
    let got: Vec<(i64, Vec<i64>)> = v["sectors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| (s["phi2"][0].as_i64().unwrap(), serde_json::from_value(s["group"].clone()).unwrap()))
        .collect();
    let expected: Vec<(i64, Vec<i64>)> = (-3..=3).map(|q: i64| (q, vec![2 * q.abs()])).collect();
    assert_eq!(got, expected);
}
