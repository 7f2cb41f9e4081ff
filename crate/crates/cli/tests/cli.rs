use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horocomb")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[track_caller]
fn expect_error(args: &[&str], code: &str) -> String {
    let o = run(args);
    let err = stderr(&o);
    assert_eq!(o.status.code(), Some(1), "{args:?}: {err}");
    assert!(err.starts_with(&format!("error[{code}]")), "{args:?}: {err}");
    err
}

#[test]
fn certify_tripod_passes() {
    let o = run(&["certify", "--all", "--input", &fixture("tripod.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("== convexity: pass"));
    assert!(out.contains("== gromov: pass"));
    assert!(out.contains("max min-diameter: 2"));
    assert!(out.ends_with("status: pass\n"));
}

#[test]
fn certify_tree_passes() {
    let o = run(&["certify", "--all", "--input", &fixture("wedge.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("assembled: E=3 C=0"));
}

#[test]
fn malformed_edge_reports_location() {
    let err = expect_error(&["validate", "--input", &fixture("malformed.json")], "BAD_EDGE");
    assert!(err.contains("malformed.json"));
    assert!(err.contains("edges[1] (line 6)"));
}

#[test]
fn grids_and_the_triangle_bound() {
    let o = run(&["hyperbolicity", "--all", "--input", &fixture("grid8.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max min-diameter: 7"));
    let o = run(&["hyperbolicity", "--all", "--input", &fixture("grid11.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("max min-diameter: 10"));
    assert!(stdout(&o).contains("status: fail"));
    let o = run(&["hyperbolicity", "--all", "--bound", "6", "--input", &fixture("grid8.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_error_codes() {
    let cases = [
        ("truncated.json", "PARSE"),
        ("disconnected.json", "DISCONNECTED"),
        ("sparse_lattice.json", "BAD_LATTICE"),
        ("malformed.json", "BAD_EDGE"),
        ("missing_basepoint.json", "MISSING_BASEPOINT"),
        ("not_bipartite.json", "NOT_BIPARTITE"),
        ("cut_off_lattice.json", "CUT_NOT_IN_LATTICE"),
        ("disconnected_tree.json", "DISCONNECTED_ASSEMBLY"),
    ];
    for (file, code) in cases {
        let err = expect_error(&["validate", "--input", &fixture(file)], code);
        assert!(err.contains(file), "{err}");
    }
}

#[test]
fn parameter_error_codes() {
    let path = fixture("path3.json");
    let star = fixture("star.json");
    let wedge = fixture("wedge.json");
    expect_error(&["geodesic", "--input", &path, "--from", "s0", "--to", "zz"], "UNKNOWN_VERTEX");
    expect_error(&["horoball", "--input", &path, "--depth-max", "0"], "DEPTH_TOO_SMALL");
    expect_error(&["convexity", "--input", &path, "--sample", "0", "--seed", "1", "--E", "1", "--C", "0"], "EMPTY_SAMPLE");
    expect_error(&["convexity", "--input", &path, "--E", "1/2", "--C", "0"], "BAD_PARAMS");
    expect_error(&["gromov", "--input", &path, "--lambda", "0"], "BAD_PARAMS");
    expect_error(&["freeproduct", "--input", &path, "--input", &path, "--word-depth", "0"], "BAD_DEPTH");
    expect_error(&["augment", "--input", &star, "--depth-max", "3", "--level", "9"], "BAD_LEVEL");
    expect_error(&["boundary", "--input", &path, "--radius", "3"], "RADIUS_TOO_LARGE");
    expect_error(&["boundary", "--input", &path, "--radius", "2", "--n-max", "3"], "BAD_THRESHOLD");
    expect_error(&["boundary", "--input", &star, "--depth-max", "4", "--level", "1", "--rho", "1"], "NOT_FULLY_AUGMENTED");
    expect_error(&["retract", "--input", &fixture("fork.json"), "--radius", "2", "--component", "x"], "NEVER_MEETS");
    expect_error(&["retract", "--input", &wedge, "--radius", "6"], "RADIUS_TOO_LARGE");
}

#[test]
fn usage_errors_exit_one() {
    let o = run(&["convexity", "--input", &fixture("path3.json"), "--sample", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--sample requires --seed"));
    let o = run(&["validate"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sampled_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for out in [&a, &b] {
        let o = run(&[
            "convexity",
            "--input",
            &fixture("grid8.json"),
            "--sample",
            "2000",
            "--seed",
            "42",
            "--output",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert_eq!(ta, tb);
    assert!(ta.contains("# seed: 42"));
    assert!(ta.contains("best: E="));
}

#[test]
fn emitters() {
    let path = fixture("path3.json");
    let dot = stdout(&run(&["horoball", "--input", &path, "--depth-max", "2", "--format", "dot"]));
    assert!(dot.starts_with("graph "));
    assert!(dot.contains("s1@2"));
    let xml = stdout(&run(&["horoball", "--input", &path, "--depth-max", "2", "--format", "graphml"]));
    assert!(xml.contains("<graphml"));
    let csv = stdout(&run(&["boundary", "--input", &fixture("tripod.json"), "--radius", "3", "--format", "csv"]));
    assert_eq!(csv.lines().next(), Some("ray,a3,b3,c3"));
    let newick = stdout(&run(&["boundary", "--input", &fixture("tripod.json"), "--radius", "3", "--format", "newick"]));
    assert!(newick.trim_end().ends_with(";"));
    assert!(newick.contains("a3"));
}

#[test]
fn pipeline_commands() {
    let path = fixture("path3.json");
    let edge = fixture("edge.json");
    let o = run(&["freeproduct", "--input", &path, "--input", &edge, "--word-depth", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("components: "));
    let o = run(&["assemble", "--input", &fixture("wedge.json")]);
    assert!(stdout(&o).contains("vertices: 7"));
    let o = run(&["geodesic", "--input", &path, "--depth-max", "3", "--from", "s0@0", "--to", "s2@0"]);
    assert!(stdout(&o).contains("path: s0@0 s0@1 s2@1 s2@0"));
    let o = run(&["boundary", "--input", &fixture("star.json"), "--depth-max", "24", "--n-max", "9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("agree: true"));
    let o = run(&["retract", "--input", &fixture("wedge.json"), "--radius", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("monotone: true"));
    let o = run(&["validate", "--input", &fixture("weighted.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("scale: 2"));
}
