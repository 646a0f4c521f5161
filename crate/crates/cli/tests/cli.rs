//! End-to-end runs of the `pointloss` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use approx::assert_relative_eq;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn pointloss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pointloss"))
        .args(args)
        .env_remove("POINTLOSS_REGISTRY")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn kv(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .to_string()
}

#[test]
fn mars_budget_text() {
    let out = pointloss(&["budget", scenario("mars.toml").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    for needle in [
        "-373.51", "-8.45", "-130.97", "-33.68", "2.08", "400", "3.10", "9.00e-05",
    ] {
        assert!(text.contains(needle), "missing {needle}\n{text}");
    }
}

#[test]
fn full_precision_kv_parses_back() {
    let mars = scenario("mars.toml");
    let out = pointloss(&[
        "--format",
        "kv",
        "--precision",
        "full",
        "budget",
        mars.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let margin: f64 = kv(&stdout(&out), "link_margin.db").parse().unwrap();
    assert_relative_eq!(margin, 2.0800, epsilon = 5e-4);
}

#[test]
fn ignore_pointing_reports_actual_margin() {
    let path = scenario("mars_16ns.toml");
    let out = pointloss(&[
        "--format",
        "kv",
        "budget",
        path.to_str().unwrap(),
        "--ignore-pointing",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(kv(&text, "link_margin.db"), "3.07");
    assert_eq!(kv(&text, "actual_link_margin.db"), "-5.38");
}

#[test]
fn monte_carlo_output_is_reproducible() {
    let args = [
        "outage",
        "--gain-db",
        "129",
        "--sigma-urad",
        "0.3",
        "--margin-db",
        "6",
        "--method",
        "mc",
        "--trials",
        "20000",
        "--seed",
        "11",
    ];
    let a = pointloss(&args);
    let b = pointloss(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other_seed = pointloss(&[&args[..11], &["12"]].concat());
    assert_ne!(a.stdout, other_seed.stdout);
}

#[test]
fn partition_count_changes_the_stream_not_the_answer() {
    let base = [
        "--format",
        "kv",
        "outage",
        "--gain-db",
        "129",
        "--sigma-urad",
        "0.3",
        "--margin-db",
        "6",
    ];
    let closed: f64 = kv(&stdout(&pointloss(&base)), "p_out").parse().unwrap();
    for parts in ["1", "3"] {
        let args = [
            &base[..],
            &[
                "--method",
                "mc",
                "--trials",
                "200000",
                "--partitions",
                parts,
            ],
        ]
        .concat();
        let text = stdout(&pointloss(&args));
        let p: f64 = kv(&text, "p_out").parse().unwrap();
        let se: f64 = kv(&text, "std_error").parse().unwrap();
        assert!((p - closed).abs() < 5.0 * se, "{parts}: {p} vs {closed}");
    }
}

#[test]
fn sweep_csv_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = pointloss(&[
        "optimize",
        "--theta-max-urad",
        "0.35",
        "--sweep",
        path.to_str().unwrap(),
        "--grid-step-db",
        "1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = pointloss_cli::read_sweep_csv(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(rows.len(), 101);
    let best = rows
        .iter()
        .max_by(|a, b| a.geff_db.total_cmp(&b.geff_db))
        .unwrap();
    assert_relative_eq!(best.gain_db, 129.0, epsilon = 0.51);
    let mut again = Vec::new();
    pointloss_cli::write_sweep_csv(&rows, &mut again).unwrap();
    assert_eq!(again, fs::read(&path).unwrap());
}

#[test]
fn range_table_csv_shape() {
    let path = scenario("mars.toml");
    let out = pointloss(&[
        "--format",
        "csv",
        "range",
        path.to_str().unwrap(),
        "--table",
        "outage",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "accuracy_urad,M256,M128,M64,M32,M16,M8,M4"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert!(rows[6].starts_with("0.05,45.4"), "{}", rows[6]);
    assert_eq!(
        rows[7],
        "data_rate_kbps,32.33,56.58,97.00,161.66,258.66,387.99,517.32"
    );
    assert_eq!(rows[8], "peak_power_w,1600,800,400,200,100,50,25");
}

#[test]
fn registry_from_environment_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("flux.txt");
    fs::write(&reg, "# M R T_s n_b n_s_min\n64 1/3 256 1.21e-2 -36.76\n").unwrap();
    let mars = scenario("mars.toml");
    let out = Command::new(env!("CARGO_BIN_EXE_pointloss"))
        .args(["--format", "kv", "budget", mars.to_str().unwrap()])
        .env("POINTLOSS_REGISTRY", &reg)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(kv(&stdout(&out), "link_margin.db"), "3.08");
}

#[test]
fn missing_registry_entry_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let reg = dir.path().join("flux.txt");
    fs::write(&reg, "128 1/3 256 1.21e-2 -38.37\n").unwrap();
    let mars = scenario("mars.toml");
    let out = pointloss(&[
        "--registry",
        reg.to_str().unwrap(),
        "budget",
        mars.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn bad_input_exits_with_two() {
    let missing = pointloss(&["budget", "/nonexistent/scenario.toml"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[link]\nwavelength_nm = 1064\nbogus = 1\n").unwrap();
    assert_eq!(
        pointloss(&["budget", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );

    assert_eq!(
        pointloss(&["outage", "--margin-db", "x"]).status.code(),
        Some(2)
    );
}

#[test]
fn precondition_violation_exits_with_three() {
    let negative = pointloss(&["optimize", "--theta-max-urad=-1"]);
    assert_eq!(negative.status.code(), Some(3));
}
