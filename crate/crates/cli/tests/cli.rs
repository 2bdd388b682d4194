//! End-to-end smoke tests of the binary: exit codes, file contract, formats.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SQRT2: &str = "1.4142135623730951";

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qhd-dsw"));
    cmd.env_remove("QHD_DSW_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary launches")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exits normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    let mut lines = text.lines();
    let header: Vec<String> =
        lines.next().expect("header line").split(',').map(str::to_string).collect();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().expect("numeric cell")).collect())
        .collect();
    (header, rows)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(
        &std::fs::read_to_string(path)
            .unwrap_or_else(|e| panic!("reading {}: {e}", path.display())),
    )
    .expect("valid JSON")
}

const TRAVEL_DEMO: &[&str] = &[
    "travel", "--p-plus", "1.2", "--p-minus", "2", "--s", "1", "--gamma", "1.5", "--mu", "0.3",
    "--k", SQRT2,
];

#[test]
fn classify_picks_the_second_branch_for_the_demo_jump() {
    let out = run(&["classify", "--p-plus", "1.2", "--p-minus", "2", "--s", "1", "--gamma", "1.5"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).expect("classification is JSON");
    assert_eq!(doc["admissible"], 2);
    let b2 = &doc["branches"][1];
    assert_eq!(b2["branch"], 2);
    assert_eq!(b2["classification"]["lax_type"], "Lax2");
    assert_eq!(b2["classification"]["regime_plus"], "Subsonic");
    assert_eq!(doc["branches"][0]["classification"]["lax_type"], "NotAdmissible");
    for b in doc["branches"].as_array().unwrap() {
        assert!(b["residuals"]["mass"].as_f64().unwrap().abs() < 1e-10);
        assert!(b["residuals"]["momentum"].as_f64().unwrap().abs() < 1e-10);
    }
    assert!(doc.get("zero-speed").is_none(), "moving front carries no zero-speed note");
}

#[test]
fn classify_equal_end_states_is_degenerate() {
    let out = run(&["classify", "--p-plus", "2", "--p-minus", "2", "--s", "1", "--gamma", "1.5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("degenerate: equal end states"), "{}", stderr(&out));
}

#[test]
fn classify_zero_speed_attaches_energy_certificates() {
    let out = run(&["classify", "--p-plus", "1.2", "--p-minus", "2", "--s", "0", "--gamma", "1.5"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let certs = doc["zero-speed"]["certificates"].as_array().expect("certificates");
    assert_eq!(certs.len(), 2);
    for c in certs {
        assert!(c["energy-gap"].as_f64().unwrap() > 0.0);
        assert_eq!(c["smaller-state-is-energy-maximum"], true);
    }
}

#[test]
fn travel_demo_writes_profile_and_meta() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[TRAVEL_DEMO, &["--out", dir.path().to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let (header, rows) = read_csv(&dir.path().join("profile.csv"));
    assert_eq!(header, ["y", "P", "Q", "J"]);
    assert_eq!(rows.len(), 2001);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]), "y strictly increasing");
    assert!((rows[0][1] - 2.0).abs() < 1e-6, "left tail at the upstream state");
    assert!((rows[rows.len() - 1][1] - 1.2).abs() < 1e-6, "right tail at the downstream state");

    let meta = read_json(&dir.path().join("profile.meta.json"));
    assert_eq!(meta["command"], "travel");
    assert_eq!(meta["branch"], 2);
    assert_eq!(meta["reversed"], false);
    assert_eq!(meta["classification"]["lax_type"], "Lax2");
    assert_eq!(meta["oscillation"]["oscillatory"], true);
    let residual = meta["diagnostics"]["terminal_residual"].as_f64().unwrap();
    assert!(residual > 0.0 && residual < 1.3e-8, "residual {residual}");
    assert_eq!(meta["data"], "profile.csv");
}

#[test]
fn travel_zero_speed_is_refused_with_the_level_gap() {
    let out = run(&[
        "travel", "--p-plus", "1.2", "--p-minus", "2", "--s", "0", "--gamma", "1.5", "--mu",
        "0.3", "--k", SQRT2,
    ]);
    assert_eq!(code(&out), 3);
    let err = stderr(&out);
    assert!(err.contains("zero speed"), "{err}");
    assert!(err.contains("separated by"), "{err}");
}

#[test]
fn travel_that_cannot_reach_the_far_state_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        TRAVEL_DEMO,
        &["--y-max", "5", "--out", dir.path().to_str().unwrap()],
    ]
    .concat());
    assert_eq!(code(&out), 4, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("residual"), "{}", stderr(&out));
}

#[test]
fn travel_missing_parameter_names_the_flag_and_key() {
    let out = run(&["travel", "--p-plus", "1.2", "--p-minus", "2", "--s", "1", "--gamma", "1.5"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("--mu"), "{err}");
    assert!(err.contains("config"), "{err}");
}

#[test]
fn standing_demo_profile_has_velocity_and_density_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "standing", "--rho-plus", "2", "--u-plus", "0.8", "--gamma", "1.5", "--k", SQRT2,
        "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let (header, rows) = read_csv(&dir.path().join("profile.csv"));
    assert_eq!(header, ["y", "V", "W", "U", "rho"]);
    assert_eq!(rows.len() % 2, 1, "odd count so the grid contains y = 0");
    let far = 2.0f64.sqrt();
    for row in &rows {
        let (v, u, rho) = (row[1], row[3], row[4]);
        assert_eq!(rho, v * v, "rho column is the squared amplitude");
        assert!((u * v * v - 1.6).abs() < 1e-9, "mass flux U*rho stays 1.6");
    }
    let mid = &rows[rows.len() / 2];
    assert_eq!(mid[0], 0.0);
    assert!(mid[1] < far, "amplitude dips at the core");
    assert!((rows[0][1] - far).abs() < 1e-6, "tails sit at the far amplitude");

    let meta = read_json(&dir.path().join("profile.meta.json"));
    assert_eq!(meta["verdict"], "Exists");
    assert_eq!(meta["viscosity"], "nonlinear");
    assert_eq!(meta["structure"]["layout"], "LoopInterior");
}

#[test]
fn standing_at_rest_is_refused() {
    let out = run(&["standing", "--rho-plus", "2", "--u-plus", "0", "--gamma", "1.5", "--k", SQRT2]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("vacuum"), "{}", stderr(&out));
}

#[test]
fn standing_sonic_writes_level_branches_and_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "standing", "--rho-plus", "1", "--u-plus", "1.224744871391589", "--gamma", "1.5",
        "--k", "1", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("NoneSonic"), "{}", stderr(&out));

    let (header, plus) = read_csv(&dir.path().join("branch_plus.csv"));
    assert_eq!(header, ["V", "W"]);
    let (_, minus) = read_csv(&dir.path().join("branch_minus.csv"));
    assert_eq!(plus.len(), minus.len());
    assert_eq!(plus[0][0], 1.0, "branches start at the far amplitude");
    assert_eq!(plus[0][1], 0.0);
    assert!(plus.last().unwrap()[1] > 0.0);
    assert!(minus.last().unwrap()[1] < 0.0);
}

#[test]
fn standing_linear_demo_carries_constant_momentum() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "standing", "--viscosity", "linear", "--rho-plus", "2", "--u-plus", "0.8", "--gamma",
        "1.5", "--mu", "0.7", "--k", SQRT2, "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let (header, rows) = read_csv(&dir.path().join("profile.csv"));
    assert_eq!(header, ["y", "P", "Q", "J"]);
    for row in &rows {
        assert_eq!(row[3], 1.6, "momentum is constant across a standing pulse");
    }
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    assert_eq!(first[1], last[1], "density profile is symmetric");
    assert_eq!(first[2], -last[2], "slope profile is antisymmetric");
    let meta = read_json(&dir.path().join("profile.meta.json"));
    assert_eq!(meta["viscosity"], "linear");
    assert_eq!(meta["system"]["a"], -1.6);
}

#[test]
fn standing_linear_supersonic_is_refused() {
    let out = run(&[
        "standing", "--viscosity", "linear", "--rho-plus", "1", "--u-plus", "3", "--gamma",
        "1.5", "--k", "1",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("supersonic"), "{}", stderr(&out));
}

#[test]
fn figure_datasets_have_their_fixed_names() {
    let dir = tempfile::tempdir().unwrap();
    let expected: [(&str, &[&str]); 4] = [
        ("1", &["fig1_separatrix_lower.csv", "fig1_separatrix_upper.csv"]),
        ("2", &["fig2_loop.csv"]),
        ("3", &["fig3_branch_plus.csv", "fig3_branch_minus.csv"]),
        ("4", &["fig4_loop.csv", "fig4_heteroclinic.csv"]),
    ];
    for (id, files) in expected {
        let out = run(&["figure", id, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code(&out), 0, "figure {id} stderr: {}", stderr(&out));
        for f in files {
            assert!(dir.path().join(f).is_file(), "figure {id} should write {f}");
        }
    }

    let (header, loop_rows) = read_csv(&dir.path().join("fig2_loop.csv"));
    assert_eq!(header, ["V", "W"]);
    let (first, last) = (&loop_rows[0], &loop_rows[loop_rows.len() - 1]);
    assert!((first[0] - last[0]).abs() < 1e-12 && first[1] == 0.0 && last[1] == 0.0,
        "loop closes at the saddle");

    let (header, het) = read_csv(&dir.path().join("fig4_heteroclinic.csv"));
    assert_eq!(header, ["y", "P", "Q", "J"]);
    assert!(het.iter().all(|r| r[1] > 0.9 && r[1] < 2.1), "front stays inside the loop");
}

#[test]
fn figure_out_of_range_id_is_a_usage_error() {
    for bad in ["0", "5", "nine"] {
        let out = run(&["figure", bad]);
        assert_eq!(code(&out), 2, "figure {bad}: {}", stderr(&out));
    }
}

#[test]
fn json_format_is_deterministic_and_lossless() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            TRAVEL_DEMO,
            &["--format", "json", "--out", dir.path().to_str().unwrap()],
        ]
        .concat());
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    let data = read_json(&dir_a.path().join("profile.json"));
    assert_eq!(data["columns"], serde_json::json!(["y", "P", "Q", "J"]));
    assert_eq!(data["samples"].as_array().unwrap().len(), 2001);
    assert!(data["samples"][0].as_array().unwrap().len() == 4);

    // identical inputs give byte-identical outputs, run to run
    for name in ["profile.json", "profile.meta.json"] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn config_supplies_missing_flags_and_cli_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("front.json");
    std::fs::write(
        &cfg_path,
        format!(
            r#"{{"p-plus": 1.2, "p-minus": 2.0, "s": 1.0, "gamma": 1.5, "mu": 55.0,
                "k": {SQRT2}, "out": {:?}}}"#,
            dir.path().to_str().unwrap()
        ),
    )
    .unwrap();

    // --mu on the command line overrides the config's 55.0
    let out = run(&["travel", "--config", cfg_path.to_str().unwrap(), "--mu", "0.3"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let meta = read_json(&dir.path().join("profile.meta.json"));
    assert_eq!(meta["inputs"]["mu"], 0.3);
    assert_eq!(meta["inputs"]["p-minus"], 2.0);

    // a config missing a required key still fails with the flag named
    let sparse = dir.path().join("sparse.json");
    std::fs::write(&sparse, r#"{"p-plus": 1.2, "p-minus": 2.0, "gamma": 1.5}"#).unwrap();
    let out = run(&["classify", "--config", sparse.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--s"), "{}", stderr(&out));
}

#[test]
fn sweep_writes_a_full_pass_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "sweep", "rh", "--cases", "25", "--seed", "9", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report = read_json(&dir.path().join("sweep_report.json"));
    assert_eq!(report["kind"], "rh");
    assert_eq!(report["seed"], 9);
    assert_eq!(report["cases"], 25);
    assert_eq!(report["pass_count"], 25);
    assert_eq!(report["hard_failures"], 0);
    assert_eq!(report["records"].as_array().unwrap().len(), 25);

    // a bad thread cap is an input error, reported before any work
    let out = bin()
        .args(["sweep", "rh", "--cases", "5", "--out", dir.path().to_str().unwrap()])
        .env("QHD_DSW_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("QHD_DSW_THREADS"), "{}", stderr(&out));
}
