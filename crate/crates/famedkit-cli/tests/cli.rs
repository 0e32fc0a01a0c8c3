//! End-to-end checks of the command-line interface: exit codes and the
//! JSON-report round-trip guarantee.

use std::process::Command;

fn famedkit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_famedkit"))
}

fn fixture(name: &str) -> String {
    format!(
        "{}/../famedkit/presets/{name}",
        env!("CARGO_MANIFEST_DIR")
    )
}

#[test]
fn famed_on_fig8_exits_zero() {
    let out = famedkit().args(["famed", "fig8"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("famed = true"), "{text}");
}

#[test]
fn parse_error_exits_two() {
    let dir = std::env::temp_dir().join("famedkit-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.tri");
    std::fs::write(
        &path,
        "triangulation broken tets=2 kind=generic\n\
         tet 0 sign=+1 glue 0->1.0 1->1.1 2->1.2 3->1.3\n\
         tet 1 sign=-1 glue 0->0.0 1->0.1 2->0.2 3->0.0\n",
    )
    .unwrap();
    let out = famedkit().args(["famed", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn json_reports_round_trip_byte_identical() {
    let out = famedkit().args(["parse", "x5", "--json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rendered = serde_json::to_string_pretty(&value).unwrap();
    assert_eq!(text.trim_end(), rendered, "JSON report must round-trip");
    assert_eq!(value["outputs"]["tetrahedra"], 4);
    assert_eq!(value["outputs"]["edge_classes"], 4);
}

#[test]
fn matrices_prints_exact_rationals() {
    let out = famedkit().args(["matrices", "fig8", "--json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(value["outputs"]["Q"][0][0], "1");
    assert_eq!(value["outputs"]["Q"][1][1], "-1");
    assert_eq!(value["outputs"]["G"][1][1], "2");
}

#[test]
fn qdilog_reports_residuals() {
    let out = famedkit()
        .args(["qdilog", "--b", "0.8", "--z", "0.3,0.0", "--json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let res = value["outputs"]["inversion_residual"].as_f64().unwrap();
    assert!(res < 1e-9, "{res}");
}

#[test]
fn aj_verdicts_drive_exit_codes() {
    let geometric = fixture("fig8.apoly");
    let out = famedkit()
        .args(["aj", "fig8", "--poly", &geometric, "--samples", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    let dir = std::env::temp_dir().join("famedkit-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let unit = dir.join("unit.apoly");
    std::fs::write(&unit, "1 0 0\n").unwrap();
    let out = famedkit()
        .args(["aj", "fig8", "--poly", unit.to_str().unwrap(), "--samples", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn volume_csv_has_expected_columns() {
    let out = famedkit()
        .args(["volume", "fig8", "--slice", "0.1", "--csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("theta,volume,converged\n"), "{text}");
}

#[test]
fn preset_dir_override_is_honored() {
    let dir = std::env::temp_dir().join("famedkit-preset-override");
    std::fs::create_dir_all(&dir).unwrap();
    // a renamed copy of fig8 shadows the built-in preset
    let fig8 = std::fs::read_to_string(fixture("fig8.tri")).unwrap();
    std::fs::write(dir.join("fig8.tri"), fig8.replace("triangulation fig8", "triangulation shadowed")).unwrap();
    let out = famedkit()
        .env("FAMEDKIT_PRESET_DIR", &dir)
        .args(["parse", "fig8", "--json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(value["outputs"]["name"], "shadowed");
}
