use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use heatclust::components::{best_match_accuracy, connected_components_oracle, same_partition};
use heatclust::io::{read_labels, read_points};
use heatclust::pairwise_distances;
use tempfile::TempDir;

fn heatclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatclust"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = heatclust(args);
    assert!(
        out.status.success(),
        "heatclust {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn labels(p: &Path) -> Vec<usize> {
    read_labels(fs::File::open(p).unwrap()).unwrap()
}

fn report(p: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(p).unwrap()).unwrap()
}

#[test]
fn gen_three_circles_shape() {
    let dir = TempDir::new().unwrap();
    let pts = path(&dir, "pts.csv");
    let truth = path(&dir, "truth.csv");
    ok(&[
        "gen",
        "three-circles",
        "--n",
        "500",
        "--sigma",
        "0.05",
        "--out",
        s(&pts),
        "--labels-out",
        s(&truth),
    ]);
    let cloud = read_points(fs::File::open(&pts).unwrap(), false).unwrap();
    assert_eq!((cloud.len(), cloud.dim()), (500, 3));
    let l = labels(&truth);
    assert_eq!(l.len(), 500);
    assert_eq!(l.iter().filter(|&&c| c == 0).count(), 168);
}

#[test]
fn gen_three_points_one_per_circle() {
    let dir = TempDir::new().unwrap();
    let pts = path(&dir, "pts.csv");
    let truth = path(&dir, "truth.csv");
    ok(&[
        "gen",
        "three-circles",
        "--n",
        "3",
        "--out",
        s(&pts),
        "--labels-out",
        s(&truth),
    ]);
    assert_eq!(
        fs::read_to_string(&truth).unwrap(),
        "index,label\n0,1\n1,2\n2,3\n"
    );
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.csv");
    let b = path(&dir, "b.csv");
    let c = path(&dir, "c.csv");
    ok(&[
        "gen",
        "three-circles",
        "--n",
        "200",
        "--seed",
        "4",
        "--out",
        s(&a),
    ]);
    ok(&[
        "gen",
        "three-circles",
        "--n",
        "200",
        "--seed",
        "4",
        "--out",
        s(&b),
    ]);
    ok(&[
        "gen",
        "three-circles",
        "--n",
        "200",
        "--seed",
        "5",
        "--out",
        s(&c),
    ]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn single_point() {
    let dir = TempDir::new().unwrap();
    let pts = path(&dir, "one.csv");
    let out = path(&dir, "labels.csv");
    let rep = path(&dir, "report.json");
    fs::write(&pts, "0.5,1.5\n").unwrap();
    let run = ok(&[
        "cluster",
        "--input",
        s(&pts),
        "--out-labels",
        s(&out),
        "--out-report",
        s(&rep),
    ]);
    assert!(String::from_utf8_lossy(&run.stderr).contains("single-point"));
    assert_eq!(fs::read_to_string(&out).unwrap(), "index,label\n0,1\n");
    let r = report(&rep);
    assert_eq!(r["beta0"], 1);
    assert_eq!(r["warnings"].as_array().unwrap().len(), 1);

    let strict = heatclust(&[
        "cluster",
        "--input",
        s(&pts),
        "--out-labels",
        s(&out),
        "--strict",
    ]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn fixed_bandwidth_matches_components() {
    let dir = TempDir::new().unwrap();
    let pts = path(&dir, "pts.csv");
    let out = path(&dir, "labels.csv");
    let curve = path(&dir, "curve.csv");
    let rep = path(&dir, "report.json");
    ok(&[
        "gen",
        "three-circles",
        "--n",
        "120",
        "--sigma",
        "0.05",
        "--seed",
        "2",
        "--out",
        s(&pts),
    ]);
    let run = ok(&[
        "cluster",
        "--input",
        s(&pts),
        "--bandwidth",
        "0.2",
        "--out-labels",
        s(&out),
        "--out-curve",
        s(&curve),
        "--out-report",
        s(&rep),
    ]);
    assert!(String::from_utf8_lossy(&run.stderr).contains("no variance curve"));
    assert!(!curve.exists());

    let cloud = read_points(fs::File::open(&pts).unwrap(), false).unwrap();
    let oracle = connected_components_oracle(&pairwise_distances(&cloud), 0.2);
    assert!(same_partition(&labels(&out), &oracle));
    let r = report(&rep);
    assert_eq!(r["r_hat"], 0.2);
    assert!(r["bandwidth_index"].is_null());
    assert_eq!(r["config"]["bandwidth"], "0.2");
}

#[test]
fn malformed_csv_exits_1() {
    let dir = TempDir::new().unwrap();
    let pts = path(&dir, "bad.csv");
    let out = path(&dir, "labels.csv");
    fs::write(&pts, "0,0\n1,1\n2,oops\n").unwrap();
    let run = heatclust(&["cluster", "--input", s(&pts), "--out-labels", s(&out)]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 3"));
    assert!(!out.exists());
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(heatclust(&["cluster"]).status.code(), Some(1));
    assert_eq!(heatclust(&["frobnicate"]).status.code(), Some(1));
    let missing = heatclust(&[
        "cluster",
        "--input",
        "/nonexistent/pts.csv",
        "--out-labels",
        "/tmp/x",
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(heatclust(&["--help"]).status.success());
}

#[test]
fn blobs_round_trip() {
    let dir = TempDir::new().unwrap();
    let pts = path(&dir, "pts.csv");
    let truth = path(&dir, "truth.csv");
    let out = path(&dir, "labels.csv");
    let rep = path(&dir, "report.json");
    let curve = path(&dir, "curve.csv");
    ok(&[
        "gen",
        "blobs",
        "--n",
        "90",
        "--k",
        "3",
        "--seed",
        "1",
        "--out",
        s(&pts),
        "--labels-out",
        s(&truth),
    ]);
    ok(&[
        "cluster",
        "--input",
        s(&pts),
        "--out-labels",
        s(&out),
        "--out-report",
        s(&rep),
        "--out-curve",
        s(&curve),
    ]);
    assert_eq!(best_match_accuracy(&labels(&out), &labels(&truth)), 1.0);

    let r = report(&rep);
    assert_eq!(r["n"], 90);
    assert_eq!(r["dim"], 2);
    assert_eq!(r["beta0"], 3);
    assert_eq!(r["cluster_sizes"], serde_json::json!([30, 30, 30]));
    assert_eq!(r["elbow_fallback"], false);
    assert_eq!(r["config"]["kernel"], "row-ball");
    let eig = r["eigenvalues_near_one"].as_array().unwrap();
    assert_eq!(eig.len(), 6);
    assert!(eig[..3].iter().all(|v| v.as_f64().unwrap() >= 1.0 - 1e-6));
    assert!(eig[3].as_f64().unwrap() < 1.0 - 1e-6);

    let text = fs::read_to_string(&curve).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,v_hat");
    assert_eq!(lines.len(), 31);
    let r_hat = r["r_hat"].as_f64().unwrap();
    let index = r["bandwidth_index"].as_u64().unwrap() as usize;
    let grid_r: f64 = lines[index + 1].split(',').next().unwrap().parse().unwrap();
    assert_eq!(grid_r, r_hat);
}

#[test]
fn header_flag() {
    let dir = TempDir::new().unwrap();
    let pts = path(&dir, "pts.csv");
    let out = path(&dir, "labels.csv");
    fs::write(&pts, "x,y\n0,0\n0,0.1\n5,5\n").unwrap();
    ok(&[
        "cluster",
        "--input",
        s(&pts),
        "--header",
        "--bandwidth",
        "1",
        "--out-labels",
        s(&out),
    ]);
    assert_eq!(
        fs::read_to_string(&out).unwrap(),
        "index,label\n0,1\n1,1\n2,2\n"
    );
    // without --header the first line is data and fails to parse
    assert_eq!(
        heatclust(&["cluster", "--input", s(&pts), "--out-labels", s(&out)])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn phi_rows_are_basis_vectors() {
    let dir = TempDir::new().unwrap();
    let pts = path(&dir, "pts.csv");
    let out = path(&dir, "labels.csv");
    let phi = path(&dir, "phi.csv");
    ok(&[
        "gen",
        "blobs",
        "--n",
        "60",
        "--k",
        "3",
        "--seed",
        "8",
        "--out",
        s(&pts),
    ]);
    ok(&[
        "cluster",
        "--input",
        s(&pts),
        "--bandwidth",
        "0.9",
        "--out-labels",
        s(&out),
        "--out-phi",
        s(&phi),
    ]);
    let text = fs::read_to_string(&phi).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phi_1,phi_2,phi_3"));
    let l = labels(&out);
    for (j, line) in lines.enumerate() {
        let row: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        for (i, v) in row.iter().enumerate() {
            let target = if i == l[j] { 1.0 } else { 0.0 };
            assert!((v - target).abs() < 1e-6, "point {j}: {row:?}");
        }
    }
}

#[test]
fn plots() {
    let dir = TempDir::new().unwrap();
    let pts = path(&dir, "pts.csv");
    let out = path(&dir, "labels.csv");
    let phi = path(&dir, "phi.csv");
    let rep = path(&dir, "report.json");
    let curve = path(&dir, "curve.csv");
    ok(&[
        "gen",
        "blobs",
        "--n",
        "90",
        "--k",
        "3",
        "--seed",
        "1",
        "--out",
        s(&pts),
    ]);
    ok(&[
        "cluster",
        "--input",
        s(&pts),
        "--out-labels",
        s(&out),
        "--out-report",
        s(&rep),
        "--out-curve",
        s(&curve),
        "--out-phi",
        s(&phi),
    ]);

    let svg_curve = path(&dir, "curve.svg");
    ok(&[
        "plot",
        "curve",
        "--input",
        s(&curve),
        "--report",
        s(&rep),
        "--out",
        s(&svg_curve),
    ]);
    let svg = fs::read_to_string(&svg_curve).unwrap();
    assert!(svg.contains("<svg") && svg.trim_end().ends_with("</svg>"));
    let polyline = svg.lines().find(|l| l.contains("class=\"curve\"")).unwrap();
    let points = polyline
        .split("points=\"")
        .nth(1)
        .unwrap()
        .split('"')
        .next()
        .unwrap();
    assert_eq!(points.split_whitespace().count(), 30);
    assert_eq!(svg.matches("class=\"r-hat\"").count(), 1);

    let svg_clusters = path(&dir, "clusters.svg");
    ok(&[
        "plot",
        "clusters",
        "--input",
        s(&pts),
        "--labels",
        s(&out),
        "--out",
        s(&svg_clusters),
    ]);
    let svg = fs::read_to_string(&svg_clusters).unwrap();
    let fills: std::collections::BTreeSet<&str> = svg
        .lines()
        .filter(|l| l.starts_with("<circle cx"))
        .filter_map(|l| l.split("fill=\"").nth(1)?.split('"').next())
        .collect();
    assert_eq!(svg.matches("<circle").count(), 90);
    assert_eq!(fills.len(), 3);

    let svg_phi = path(&dir, "phi.svg");
    ok(&[
        "plot",
        "phi",
        "--input",
        s(&phi),
        "--labels",
        s(&out),
        "--out",
        s(&svg_phi),
    ]);
    assert_eq!(
        fs::read_to_string(&svg_phi)
            .unwrap()
            .matches("<circle")
            .count(),
        90
    );

    let missing = heatclust(&[
        "plot",
        "clusters",
        "--input",
        s(&pts),
        "--out",
        s(&svg_clusters),
    ]);
    assert_eq!(missing.status.code(), Some(1));
}
