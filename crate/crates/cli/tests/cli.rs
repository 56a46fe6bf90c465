use std::path::Path;
use std::process::Command;

fn shplace(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_shplace"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("run shplace")
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{
            "trials": 2,
            "sweep": [5.0, 7.0],
            "channel": {"gamma_bar_db": 5},
            "density_estimator": {"grid": [40, 40]},
            "pso": {"particles": 5, "iterations": 4},
            "ga": {"population": 5, "generations": 4},
            "grid_search": {"nx": 12, "ny": 12}
        }"#,
    )
    .unwrap();
    path
}

#[test]
fn generate_writes_scene_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("gen");
    let o = shplace(&["generate", "--seed", "9"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let scene = shplace_core::Scene::from_json(&std::fs::read_to_string(out.join("scene.json")).unwrap()).unwrap();
    assert_eq!(scene.seed, Some(9));
    assert!(out.join("manifest.json").exists());
}

#[test]
fn estimate_and_surface_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let config = config.to_str().unwrap();
    let out = dir.path().join("est");
    let o = shplace(&["estimate", "--config", config, "--estimator", "kde"], &out);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("kde mse"));
    let csv = std::fs::read_to_string(out.join("density_kde.csv")).unwrap();
    assert!(csv.starts_with("x,y,value"));
    assert_eq!(csv.lines().count(), 1 + 40 * 40);

    let out = dir.path().join("surf");
    assert!(shplace(&["surface", "--config", config], &out).status.success());
    let csv = std::fs::read_to_string(out.join("surface.csv")).unwrap();
    assert!(csv.starts_with("x,y,hit_rate"));
    assert_eq!(csv.lines().count(), 1 + 12 * 12);
}

#[test]
fn optimize_compare_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let config = config.to_str().unwrap();

    let out = dir.path().join("opt");
    assert!(shplace(&["optimize", "--config", config, "--strategy", "ga"], &out).status.success());
    let csv = std::fs::read_to_string(out.join("placements.csv")).unwrap();
    assert!(csv.starts_with("trial,lambda_r,seed,strategy,x,y,value,cached_value,evaluations,status"));
    assert!(csv.contains(",ga,"));
    assert!(!csv.contains(",pso,"));

    let out = dir.path().join("cmp");
    assert!(shplace(&["compare", "--config", config], &out).status.success());
    for f in ["placements.csv", "boxplot.csv", "mse.csv", "compare.csv", "compare_summary.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }

    let out = dir.path().join("sweep");
    assert!(shplace(&["sweep", "--config", config, "--trials", "1"], &out).status.success());
    let summary = std::fs::read_to_string(out.join("sweep_summary.csv")).unwrap();
    assert!(summary.contains("5.0,pso,hit_rate,1,") && summary.contains("7.0,pso,hit_rate,1,"));
}

#[test]
fn figure_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let o = shplace(&["figure", "--which", "voronoi_loads", "--config", config.to_str().unwrap()], &dir.path().join("f"));
    assert!(o.status.success());
    let o = shplace(&["figure", "--which", "histogram"], &dir.path().join("g"));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown figure"));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = shplace(&["estimate", "--estimator", "spline"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = shplace(&["optimize", "--strategy", "annealing"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"trials": 0}"#).unwrap();
    let o = shplace(&["compare", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = shplace(&["compare", "--config", "/nonexistent/config.json"], dir.path());
    assert!(!o.status.success());
}
