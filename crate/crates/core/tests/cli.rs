use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn buildings(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_buildings")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = buildings(args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn inspect_reports_known_counts() {
    let fano = json(&["inspect", &data("fano.json"), "--json"]);
    assert_eq!(fano["chambers"], 21);
    assert_eq!(fano["apartments"], 28);
    assert_eq!(fano["diagram"], "A2");
    assert_eq!(fano["thick"], true);
    let gq = json(&["inspect", &data("gq22.json"), "--json"]);
    assert_eq!(gq["chambers"], 45);
    assert_eq!(gq["diagram"], "B2");
    let thin = json(&["inspect", &data("a2_coxeter.json"), "--json"]);
    assert_eq!(thin["chambers"], 6);
    assert_eq!(thin["thick"], false);
}

#[test]
fn build_output_round_trips() {
    let dump = json(&["build", &data("fano.json"), "--json"]);
    let dir = std::env::temp_dir().join(format!("buildings-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fano_dump.json");
    std::fs::write(&path, serde_json::to_string(&dump).unwrap()).unwrap();
    let p = path.display().to_string();
    assert_eq!(json(&["build", &p, "--json"]), dump);
    assert_eq!(json(&["inspect", &p, "--json"])["apartments"], 28);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn projectivity_groups() {
    let g = json(&["proj", &data("fano.json"), "--panel", "point:0", "--json"]);
    assert_eq!(g["even_order"], 6);
    assert_eq!(g["even_two_transitive"], true);
    let (code, out, _) = buildings(&["proj", &data("gq22.json"), "--panel", "line:3"]);
    assert_eq!(code, 0);
    assert!(out.contains("2-transitive=true"));
}

#[test]
fn reconstruction() {
    let (code, out, _) = buildings(&["reconstruct", &data("fano.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("isomorphic=true"));
    let r = json(&["reconstruct", &data("rank1_nerve.json"), "--json"]);
    assert_eq!(r["building"]["chambers"].as_array().unwrap().len(), 3);
}

#[test]
fn tree_commands() {
    let (_, out, _) = buildings(&["tree", &data("tripod.json"), "--classify"]);
    assert!(out.contains("class=type I"));
    let (_, out, _) = buildings(&["tree", &data("h_tree.json"), "--classify"]);
    assert!(out.contains("inconsistent"));
    let rec = json(&["tree", &data("regular3_depth3.json"), "--recover", "--automorphisms", "--json"]);
    assert_eq!(rec["automorphisms"]["order"], "3072");
    assert_eq!(rec["recovery"]["disagreements"], 0);
    assert_eq!(rec["recovery"]["isolation_matches_branch_points"], true);
}

#[test]
fn cone_and_coarse() {
    let cone = json(&["cone", &data("fano.json"), "--panel", "point:0", "--points", &data("fano_cone_points.json"), "--json"]);
    assert_eq!(cone["apex"]["apex_thick"], true);
    let fit = json(&["coarse", &data("tripod_rotation.json"), "--json"]);
    assert_eq!(fit["fit"]["c"], 1.0);
    assert_eq!(fit["fit"]["d"], 0.125);
    assert!(fit["matches"].as_array().unwrap().iter().all(|m| m["best"].as_array().unwrap().len() == 1));
}

#[test]
fn dot_export_to_file_and_stdout() {
    let (code, out, _) = buildings(&["export", &data("triangle.json")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("graph G {"));
    assert_eq!(out.matches(" -- ").count(), 6);
    let path = std::env::temp_dir().join(format!("buildings-dot-{}.dot", std::process::id()));
    let p = path.display().to_string();
    let (code, _, _) = buildings(&["export", &data("fano.json"), "--dot", &p, "--kind", "opposition"]);
    assert_eq!(code, 0);
    let dot = std::fs::read_to_string(&path).unwrap();
    assert_eq!(dot.matches(" -- ").count(), 28);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(buildings(&["frobnicate"]).0, 2);
    assert_eq!(buildings(&["proj", &data("fano.json")]).0, 2);
    let (code, _, err) = buildings(&["inspect", "/no/such/file.json"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"));
    let (code, _, err) = buildings(&["proj", &data("fano.json"), "--panel", "plane:0"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
    assert_eq!(buildings(&["tree", &data("fano.json")]).0, 1);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["cone".to_string(), data("fano.json"), "--panel".into(), "point:0".into(), "--seed".into(), "7".into(), "--json".into()],
        vec!["coarse".to_string(), data("tripod_rotation.json"), "--json".into()],
        vec!["tree".to_string(), data("regular3_depth3.json"), "--automorphisms".into()],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(buildings(&args), buildings(&args));
    }
}
