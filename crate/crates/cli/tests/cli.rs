use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bicent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bicent"))
        .args(args)
        .env_remove("BICENT_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let o = bicent(&full);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    path
}

#[test]
fn solve_triangle_prints_euler_radius() {
    let o = bicent(&["solve", "--n", "3", "--rk", "1", "--d", "0.2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("R_C = 0.48\n"), "{text}");
    let residual: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("euler3_residual = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(residual.abs() <= 1e-12);
}

#[test]
fn solve_json_has_fuss_residual() {
    let o = bicent(&["solve", "--n", "4", "--rk", "2", "--d", "0.5", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["fuss4_residual"].as_f64().unwrap().abs() <= 1e-11);
}

#[test]
fn solve_error_codes() {
    // Not coprime: usage.
    assert_eq!(
        bicent(&[
            "solve",
            "--n",
            "6",
            "--winding",
            "2",
            "--rk",
            "1",
            "--d",
            "0.1"
        ])
        .status
        .code(),
        Some(2)
    );
    // No nested incircle: numeric.
    assert_eq!(
        bicent(&["solve", "--n", "3", "--rk", "1", "--d", "1.5"])
            .status
            .code(),
        Some(3)
    );
    // Bad flag value: usage.
    assert_eq!(
        bicent(&["solve", "--n", "2", "--rk", "1", "--d", "0.1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn generate_then_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    for (i, args) in [
        [
            "--n",
            "3",
            "--winding",
            "1",
            "--rk",
            "1",
            "--d",
            "0.4",
            "--start-angle",
            "0.3",
        ],
        [
            "--n",
            "5",
            "--winding",
            "2",
            "--rk",
            "3",
            "--d",
            "0.6",
            "--start-angle",
            "-1",
        ],
        [
            "--n",
            "9",
            "--winding",
            "4",
            "--rk",
            "1",
            "--d",
            "0.05",
            "--start-angle",
            "2",
        ],
    ]
    .iter()
    .enumerate()
    {
        let path = generate(dir.path(), &format!("s{i}.json"), args);
        let o = bicent(&["verify", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains("overall: pass"));
    }
}

#[test]
fn tampered_scene_fails_concyclicity() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(
        dir.path(),
        "s.json",
        &["--n", "5", "--rk", "1", "--d", "0.2"],
    );
    let mut v: Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    let y = v["excenters"][0][1].as_f64().unwrap();
    v["excenters"][0][1] = Value::from(y + 1e-3);
    let tampered = dir.path().join("tampered.json");
    fs::write(&tampered, v.to_string()).unwrap();

    let o = bicent(&["verify", tampered.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["overall_pass"], false);
    let conc = report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["name"] == "concyclicity")
        .unwrap();
    assert_eq!(conc["pass"], false);
    assert!(conc["value"].as_f64().unwrap() >= 5e-4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("concyclicity"));
}

#[test]
fn verify_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        bicent(&["verify", "/definitely/not/here.json"])
            .status
            .code(),
        Some(2)
    );

    let garbage = dir.path().join("garbage.json");
    fs::write(&garbage, "{\"schema_version\": 7}").unwrap();
    assert_eq!(
        bicent(&["verify", garbage.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let path = generate(
        dir.path(),
        "s.json",
        &["--n", "4", "--rk", "1", "--d", "0.2"],
    );
    let mut v: Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    v["sides"].as_array_mut().unwrap().pop();
    let broken = dir.path().join("broken.json");
    fs::write(&broken, v.to_string()).unwrap();
    let o = bicent(&["verify", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("arity"));
}

#[test]
fn tolerance_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(
        dir.path(),
        "s.json",
        &["--n", "7", "--rk", "1", "--d", "0.02"],
    );
    let file = path.to_str().unwrap();
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_bicent"));
        cmd.args(["verify", file]);
        if let Some(t) = flag {
            cmd.args(["--tol", t]);
        }
        match env {
            Some(t) => cmd.env("BICENT_TOL", t),
            None => cmd.env_remove("BICENT_TOL"),
        };
        cmd.output().unwrap().status.code()
    };
    // Residuals are ~1e-15: a 1e-30 threshold fails, the default passes.
    assert_eq!(run(None, None), Some(0));
    assert_eq!(run(Some("1e-30"), None), Some(1));
    assert_eq!(run(Some("1e-30"), Some("1e-9")), Some(0));
    assert_eq!(run(None, Some("-1")), Some(2));
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(
        dir.path(),
        "tri.json",
        &["--n", "3", "--rk", "1", "--d", "0"],
    );
    let svg = dir.path().join("tri.svg");
    let o = bicent(&[
        "render",
        path.to_str().unwrap(),
        "--out",
        svg.to_str().unwrap(),
        "--show-excircles",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&svg).unwrap();
    let orange = text
        .lines()
        .filter(|l| l.contains("<circle") && l.contains("#ff8c00"))
        .count();
    assert_eq!(orange, 3);
}

#[test]
fn sweep_writes_frames_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = bicent(&[
        "sweep",
        "--n",
        "5",
        "--rk",
        "1",
        "--d",
        "0.15",
        "--frames",
        "12",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(out.join("frame_0000.json").exists());
    assert!(out.join("frame_0011.json").exists());
    assert!(!out.join("frame_0012.json").exists());
    let summary: Value =
        serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["porism_ok"], true);
    assert_eq!(summary["rolling_ok"], true);
    assert!(summary["max_excenter_deviation"].as_f64().unwrap() <= 1e-9);
    let frame = out.join("frame_0005.json");
    assert_eq!(
        bicent(&["verify", frame.to_str().unwrap()]).status.code(),
        Some(0)
    );
}
