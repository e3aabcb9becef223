use std::fs;
use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("elimdist-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_elimdist")).args(args).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(text.trim()).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), v, text)
}

fn star(leaves: usize) -> String {
    (1..=leaves).map(|i| format!("0 {i}\n")).collect()
}

fn path(n: usize) -> String {
    (1..n).map(|i| format!("{} {i}\n", i - 1)).collect()
}

// The component with ports 1 = {t2,t3,t4}, 2 = {A,l1,l2,l3}, 3 = {B,r1,r2,r3}.
const FIG_GRAPH: &str = "0 1\n1 2\n3 0\n8 2\n3 7\n4 7\n5 7\n6 7\n8 12\n9 12\n10 12\n11 12\n";
const FIG_PORTS: &str = "0 1\n1 1\n2 1\n3 2\n4 2\n5 2\n6 2\n8 3\n9 3\n10 3\n11 3\n";
const TOP: &str = "P=1,2,3 L=1,2,3 D=\n";
const SPLIT: &str = "P=1|2|3 L=1,2,3 D=\n";

#[test]
fn star_is_a_member() {
    let s = Scratch::new("star");
    let big = s.file("star15.txt", &star(15));
    let (code, v, _) = run(&["decide", "--k", "1", "--d", "2", "--input", &big]);
    assert_eq!(code, 0);
    assert_eq!(v["member"], true);
    assert_eq!(v["route"], "pipeline");
    let small = s.file("star6.txt", &star(6));
    let (code, v, _) = run(&["decide", "--k", "1", "--d", "2", "--input", &small, "--mode", "both"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["oracle"], true);
    assert_eq!(v["agree"], true);
}

#[test]
fn oracle_and_treedepth_on_a_path() {
    let s = Scratch::new("path");
    let p7 = s.file("p7.txt", &path(7));
    let (code, v, _) = run(&["oracle", "--d", "0", "--input", &p7]);
    assert_eq!((code, v["ed"].as_u64()), (0, Some(2)));
    let (code, v, _) = run(&["treedepth", "--input", &p7]);
    assert_eq!((code, v["td"].as_u64()), (0, Some(2)));
}

#[test]
fn label_matches_the_worked_sequences() {
    let s = Scratch::new("label");
    let g = s.file("fig.txt", FIG_GRAPH);
    let ports = s.file("fig.ports", FIG_PORTS);
    let cases = [
        (format!("{TOP}{SPLIT}{SPLIT}{SPLIT}"), true),
        (format!("{TOP}{SPLIT}{SPLIT}"), false),
        (format!("{TOP}{SPLIT}P=1|2|3 L=1,2|3 D=3\n"), true),
    ];
    for (i, (text, want)) in cases.iter().enumerate() {
        let seq = s.file(&format!("s{i}.seq"), text);
        let args = ["label", "--k", "5", "--d", "2", "--input", &g, "--ports", &ports, "--sequence", &seq];
        let (code, v, _) = run(&args);
        assert_eq!(code, 0, "{v}");
        assert_eq!(v["satisfies"], *want, "sequence {i}");
    }
}

#[test]
fn bad_input_exits_2_with_error() {
    let s = Scratch::new("bad");
    let missing = s.path("missing.txt");
    let (code, v, _) = run(&["decide", "--k", "1", "--d", "1", "--input", &missing]);
    assert_eq!(code, 2);
    assert!(v["error"].is_string());
    let bad = s.file("bad.txt", "0 1\n1 x\n");
    let (code, v, _) = run(&["decide", "--k", "1", "--d", "1", "--input", &bad]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("line 2"));
    let g = s.file("fig.txt", FIG_GRAPH);
    let ports = s.file("fig.ports", FIG_PORTS);
    let seq = s.file("bad.seq", "P=1,2 L=1,2,3 D=\n");
    let args = ["label", "--k", "5", "--d", "2", "--input", &g, "--ports", &ports, "--sequence", &seq];
    let (code, v, _) = run(&args);
    assert_eq!(code, 2, "{v}");
    assert!(v["error"].is_string());
}

#[test]
fn guard_exits_3() {
    let s = Scratch::new("guard");
    let g = s.file("star.txt", &star(15));
    let (code, v, _) = run(&["decide", "--k", "1", "--d", "2", "--input", &g, "--mode", "oracle"]);
    assert_eq!(code, 3);
    assert_eq!(v["kind"], "resource");
}

#[test]
fn witness_round_trips_through_validate_order() {
    let s = Scratch::new("witness");
    // Two stars joined at their centres.
    let mut text = String::from("0 1\n");
    for i in 2..7 {
        text += &format!("0 {i}\n");
    }
    for i in 7..12 {
        text += &format!("1 {i}\n");
    }
    let g = s.file("double.txt", &text);
    let (code, v, _) = run(&["decide", "--k", "2", "--d", "1", "--input", &g, "--mode", "both"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["member"], true);
    let order: String = v["witness"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| match p[1].as_u64() {
            Some(parent) => format!("{} {parent}\n", p[0]),
            None => format!("{} -\n", p[0]),
        })
        .collect();
    let o = s.file("w.order", &order);
    let (code, v, _) = run(&["validate-order", "--d", "1", "--k", "2", "--input", &g, "--order", &o]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true, "{v}");
}

fn read_edges(path: &str) -> Vec<(u64, u64)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split_whitespace().map(|t| t.parse().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect()
}

fn ids(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

#[test]
fn certificates_name_real_vertices() {
    let s = Scratch::new("cert");
    let cases: [(&str, &[&str], &str); 2] = [
        ("5", &["1,1,6"], "red_path_bound"),
        ("6", &["1,1,6", "1,2,6"], "red_neighbor_bound"),
    ];
    for (m, hubs, reason) in cases {
        let prefix = s.path(&format!("g{m}"));
        let mut args = vec!["gen-grid", "--m", m, "--k", "1", "--d", "3", "--out", &prefix];
        for h in hubs {
            args.extend(["--hubs", h]);
        }
        assert_eq!(run(&args).0, 0);
        let g = format!("{prefix}.graph");
        let (code, v, _) = run(&["decide", "--k", "1", "--d", "3", "--input", &g, "--mode", "pipeline"]);
        assert_eq!(code, 0);
        assert_eq!(v["member"], false);
        let edges = read_edges(&g);
        let adjacent = |a: u64, b: u64| edges.contains(&(a.min(b), a.max(b)));
        let cert = v["trace"].as_array().unwrap().iter().find(|s| s["step"] == "rejected").expect("a certificate");
        assert_eq!(cert["reason"], reason, "{cert}");
        let (verts, reds) = (ids(&cert["vertices"]), ids(&cert["reds"]));
        if reason == "red_path_bound" {
            // A path with at least 2^k red vertices on it.
            assert!(verts.windows(2).all(|w| adjacent(w[0], w[1])));
            assert!(reds.len() >= 2 && reds.iter().all(|r| verts.contains(r)));
        } else {
            // More than (k+d)^k red neighbors of one component.
            assert!(reds.len() > 4);
            assert!(reds.iter().all(|&r| verts.iter().any(|&x| adjacent(r, x))));
        }
    }
}

#[test]
fn generated_model_validates_and_output_is_stable() {
    let s = Scratch::new("gen");
    let prefix = s.path("w");
    let args = ["gen-grid", "--m", "5", "--base", "wall", "--hubs", "2,2,5", "--subdivide", "3", "--pendants", "2", "--seed", "9", "--out", &prefix];
    let (code, v, first) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(v["expected"]["planar"], true);
    let (_, _, second) = run(&args);
    assert_eq!(first, second);
    let (code, v, _) = run(&["validate-model", "--input", &s.path("w.graph"), "--model", &s.path("w.model")]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true, "{v}");
    let (code, v, _) = run(&["gen-grid", "--m", "2"]);
    assert_eq!(code, 2);
    assert!(v["error"].is_string());
}

#[test]
fn both_modes_agree_on_small_graphs() {
    let s = Scratch::new("both");
    let graphs = [
        path(6),
        star(5),
        "0 1\n1 2\n2 0\n2 3\n3 4\n4 5\n5 3\n".to_string(),
        (0..5).flat_map(|i| (i + 1..5).map(move |j| format!("{i} {j}\n"))).collect(),
    ];
    for (i, text) in graphs.iter().enumerate() {
        let g = s.file(&format!("g{i}.txt"), text);
        for (k, d) in [(0, 1), (1, 1), (1, 2), (2, 0)] {
            let (k, d) = (k.to_string(), d.to_string());
            let (code, v, _) = run(&["decide", "--k", &k, "--d", &d, "--input", &g, "--mode", "both"]);
            assert_eq!(code, 0, "graph {i}, k {k}, d {d}: {v}");
        }
    }
}
