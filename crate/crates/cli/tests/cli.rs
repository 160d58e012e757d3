use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn asdim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asdim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn graph_header(text: &str) -> String {
    text.lines().find(|l| !l.starts_with('#')).unwrap().to_string()
}

#[test]
fn gen_writes_graph_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "grid.txt");
    let out = asdim(&["gen", "--family", "grid", "--k", "2", "--side", "8", "--out", &g]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&g).unwrap();
    assert_eq!(graph_header(&text), "graph 64");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 112);
    let stats: Value = serde_json::from_str(&std::fs::read_to_string(format!("{g}.json")).unwrap()).unwrap();
    assert_eq!(stats["graph"]["vertices"], 64);
    assert_eq!(stats["meta"]["tool"], "asdim");
}

#[test]
fn long_edge_families_subdivide_on_request() {
    let out = asdim(&["gen", "--family", "ptree", "--k", "1", "--depth", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(graph_header(&String::from_utf8(out.stdout).unwrap()), "long_edge_graph 15");
    let out = asdim(&["gen", "--family", "ptree", "--k", "1", "--depth", "3", "--subdivide"]);
    assert_eq!(code(&out), 0);
    // Level-l edges have length 2^l: 15 junctions plus 2*0 + 4*1 + 8*3 interior vertices.
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(graph_header(&text), "graph 43");
}

#[test]
fn verify_flags_a_damaged_cover() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "path.txt");
    let c = path(dir.path(), "cover.json");
    assert_eq!(code(&asdim(&["gen", "--family", "path", "--side", "10000", "--out", &g])), 0);
    let out = asdim(&["cover", "--graph", &g, "--exponent", "2", "--scale", "4", "--out", &c]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = asdim(&["verify", "--graph", &g, "--cover", &c]);
    assert_eq!(code(&out), 0);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], true);

    let mut cover: Value = serde_json::from_str(&std::fs::read_to_string(&c).unwrap()).unwrap();
    let cells = cover["cells"].as_array_mut().unwrap();
    assert!(cells.len() > 1);
    cells.remove(0);
    std::fs::write(&c, serde_json::to_string(&cover).unwrap()).unwrap();
    let out = asdim(&["verify", "--graph", &g, "--cover", &c]);
    assert_eq!(code(&out), 2);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert!(!report["uncovered"].as_array().unwrap().is_empty());
}

#[test]
fn certificate_over_several_scales() {
    let out = asdim(&["cover", "--family", "path", "--side", "300", "--exponent", "1", "--scale", "2,4,8"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let cert: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["results"].as_array().unwrap().len(), 3);
}

#[test]
fn growth_csv_and_fit() {
    let out = asdim(&["growth", "--family", "path", "--side", "100", "--radii", "1,2,4,8", "--fit", "2,8"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["r,gamma,mode", "1,3,exact", "2,5,exact", "4,9,exact", "8,17,exact"]);
    assert!(text.lines().any(|l| l.starts_with("# fit lo=2 hi=8 slope=")));
}

#[test]
fn implicit_growth_matches_materialized() {
    let base = ["growth", "--family", "ptree", "--k", "2", "--depth", "5", "--radii", "1,3,9,27"];
    let explicit = asdim(&base);
    let implicit = asdim(&[&base[..], &["--implicit"]].concat());
    assert_eq!(code(&explicit), 0);
    assert_eq!(code(&implicit), 0);
    let body = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .map(String::from)
            .collect::<Vec<_>>()
    };
    assert_eq!(body(&explicit), body(&implicit));
}

#[test]
fn pipeline_passes_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.json");
    let b = path(dir.path(), "b.json");
    let args = ["pipeline", "--disc-points", "400", "--disc-radius", "12", "--seed", "7", "--t", "1", "--scale", "4"];
    for out in [&a, &b] {
        let res = asdim(&[&args[..], &["--out", out]].concat());
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    }
    let a = std::fs::read(&a).unwrap();
    assert_eq!(a, std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["report"]["passed"], true);
    assert_eq!(v["meta"]["seed"], 7);
}

#[test]
fn net_reports_validation() {
    let out = asdim(&["net", "--disc-points", "300", "--disc-radius", "10", "--eps", "2"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["dense"], true);
    assert_eq!(v["report"]["separated"], true);
}

#[test]
fn explicit_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "run.cfg");
    std::fs::write(&cfg, "family = grid\nk = 2\nside = 8\n").unwrap();
    let out = asdim(&["gen", "--config", &cfg]);
    assert_eq!(graph_header(&String::from_utf8(out.stdout).unwrap()), "graph 64");
    let out = asdim(&["gen", "--config", &cfg, "--side", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(graph_header(&String::from_utf8(out.stdout).unwrap()), "graph 16");
}

#[test]
fn probe_reports_both_legs() {
    let out = asdim(&["probe-an", "--family", "rescaled-grid-ball", "--n", "2", "--k", "2", "--scale", "2,8"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# achieved upper bounds only"));
    let legs: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("direct,") || l.starts_with("transfer,"))
        .collect();
    assert_eq!(legs.len(), 4);
    assert!(legs.iter().all(|l| l.ends_with(",true")));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.txt");
    std::fs::write(&bad, "graph 3\n0 7\n").unwrap();
    let c = path(dir.path(), "none.json");
    assert_eq!(code(&asdim(&["verify", "--graph", &bad, "--cover", &c])), 5);
    let missing = path(dir.path(), "missing.txt");
    assert_eq!(code(&asdim(&["growth", "--graph", &missing, "--radii", "1"])), 1);
    assert_eq!(code(&asdim(&["gen", "--family", "grid", "--side", "1000", "--cap-vertices", "100"])), 4);
    assert_eq!(code(&asdim(&["gen", "--family", "nope"])), 5);
    assert_eq!(code(&asdim(&["growth", "--family", "path", "--side", "5", "--radii", "1.5"])), 5);
    assert_eq!(code(&asdim(&["pipeline", "--disc-points", "50", "--t", "3", "--scale", "4"])), 5);
    assert_eq!(code(&asdim(&["--help"])), 0);
    assert_eq!(code(&asdim(&["--version"])), 0);
}
