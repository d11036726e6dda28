use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use medax::EventDatabase;

const TETRA: &str = "OFF\n4 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 0 1 3\n3 0 2 3\n3 1 2 3\n";

fn medax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medax")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn compute_tetra(dir: &Path) -> PathBuf {
    let mesh = dir.join("tetra.off");
    std::fs::write(&mesh, TETRA).unwrap();
    let out = dir.join("events.json");
    let o = medax(&[
        "compute", "--mesh", s(&mesh), "--grid-origin", "-0.5,-0.5,-0.5", "--grid-dims", "3,3,3",
        "--spacing", "0.6", "--chunks", "2", "--out", s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn icosphere_mid_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mid.json");
    let o = medax(&[
        "compute", "--mesh", s(&fixture("icosphere2.obj")), "--grid-origin", "-1.2,-1.2,-1.2",
        "--grid-dims", "4,4,4", "--spacing", "0.6", "--axes", "mid", "--out", s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let db = EventDatabase::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(db.header.grid.dims, [4, 4, 4]);
    assert_eq!(db.header.grid.origin, [-1.2; 3]);
    assert_eq!(db.header.grid.spacing, 0.6);
    assert!(!db.events.is_empty());
    assert!(db.events.iter().all(|e| e.axis == medax::AxisKind::MidSphere));
}

#[test]
fn mesh_with_hole_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("hole.off");
    std::fs::write(&mesh, "OFF\n4 3 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 0 1 3\n3 0 2 3\n").unwrap();
    let o = medax(&["compute", "--mesh", s(&mesh), "--grid-origin", "0,0,0", "--grid-dims", "1,1,1", "--spacing", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for edge in ["edge (1, 2)", "edge (1, 3)", "edge (2, 3)"] {
        assert!(err.contains(&format!("{edge} belongs to 1 triangle")), "{err}");
    }
}

#[test]
fn bad_flags_exit_1() {
    assert_eq!(medax(&["compute", "--mesh", "x.off"]).status.code(), Some(1));
    assert_eq!(medax(&["frobnicate"]).status.code(), Some(1));
    let o = medax(&["compute", "--mesh", "x.off", "--grid-origin", "0,0", "--grid-dims", "1,1,1", "--spacing", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(medax(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_input_exits_1() {
    assert_eq!(medax(&["prune", "--in", "/nonexistent/events.json"]).status.code(), Some(1));
    let o = medax(&["compute", "--mesh", "/nonexistent/m.off", "--grid-origin", "0,0,0", "--grid-dims", "1,1,1", "--spacing", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_export_format_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let db = compute_tetra(dir.path());
    assert_eq!(medax(&["export", "--in", s(&db), "--format", "ply"]).status.code(), Some(1));
}

#[test]
fn prune_identity_and_idempotence() {
    let dir = tempfile::tempdir().unwrap();
    let db = compute_tetra(dir.path());
    let zero = dir.path().join("zero.json");
    let o = medax(&["prune", "--in", s(&db), "--euclidean-min", "0", "--persistence-min", "0", "--out", s(&zero)]);
    assert!(o.status.success());
    let before = EventDatabase::from_json(&std::fs::read_to_string(&db).unwrap()).unwrap();
    let after = EventDatabase::from_json(&std::fs::read_to_string(&zero).unwrap()).unwrap();
    assert!(!before.events.is_empty());
    assert_eq!(before.events, after.events);
    assert_eq!(after.header.pruning.len(), 1);

    let (once, twice) = (dir.path().join("once.json"), dir.path().join("twice.json"));
    assert!(medax(&["prune", "--in", s(&db), "--standard", "--euclidean-min", "0.3", "--out", s(&once)]).status.success());
    assert!(medax(&["prune", "--in", s(&once), "--standard", "--euclidean-min", "0.3", "--out", s(&twice)]).status.success());
    assert_eq!(std::fs::read(&once).unwrap(), std::fs::read(&twice).unwrap());

    let none = dir.path().join("none.json");
    assert!(medax(&["prune", "--in", s(&db), "--persistence-min", "1e9", "--out", s(&none)]).status.success());
    let none = EventDatabase::from_json(&std::fs::read_to_string(&none).unwrap()).unwrap();
    assert!(none.events.iter().all(|e| e.involves_essential) || none.events.is_empty());
}

#[test]
fn export_after_identity_prune_matches() {
    let dir = tempfile::tempdir().unwrap();
    let db = compute_tetra(dir.path());
    let zero = dir.path().join("zero.json");
    assert!(medax(&["prune", "--in", s(&db), "--out", s(&zero)]).status.success());
    let a = medax(&["export", "--in", s(&db), "--format", "obj"]);
    let b = medax(&["export", "--in", s(&zero)]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let parsed = EventDatabase::from_json(&std::fs::read_to_string(&db).unwrap()).unwrap();
    let quads = parsed.approximation().total();
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2 * quads);
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4 * quads);
    for name in ["o medial", "o mid", "o circum"] {
        assert!(text.lines().any(|l| l == name));
    }
}

#[test]
fn summary_counts() {
    let dir = tempfile::tempdir().unwrap();
    let db = compute_tetra(dir.path());
    let o = medax(&["summary", "--in", s(&db)]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("medial ")));
    assert!(text.contains("grid dims [3, 3, 3]"));
}
