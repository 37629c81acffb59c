use std::fs;
use std::process::{Command, Output};

fn fogran(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fogran")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SWEEP: &[&str] =
    &["--sweep", "bh=100e6:1000e6:3", "--users", "6", "--dus", "2", "--rus", "4", "--realizations", "3", "--seed", "9"];

#[test]
fn sweep_csv_is_byte_identical_across_runs() {
    let first = fogran(SWEEP);
    let second = fogran(SWEEP);
    let text = stdout(&first);
    assert_eq!(first.stdout, second.stdout);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap().split(',').count(),
        lines.next().unwrap().split(',').count(),
        "header and rows have the same width"
    );
    // 3 points × 4 schemes
    assert_eq!(text.lines().count(), 1 + 12);
}

#[test]
fn sweep_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let mut args = SWEEP.to_vec();
    args.extend(["--out", path.to_str().unwrap()]);
    stdout(&fogran(&args));
    assert_eq!(fs::read(&path).unwrap(), fogran(SWEEP).stdout);
}

#[test]
fn cloud_scheme_offloads_everything_to_the_cloud() {
    let text = stdout(&fogran(&["--scheme", "cloud", "--users", "12", "--seed", "3"]));
    let rows: Vec<&str> =
        text.lines().filter(|l| l.trim_start().chars().next().is_some_and(|c| c.is_ascii_digit())).collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.split_whitespace().nth(1) == Some("C")), "{text}");
    assert!(text.contains("tasks: 12 (L 0, H 0, C 12)"));
}

#[test]
fn saved_scenario_replans_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    let generated = stdout(&fogran(&["--users", "7", "--seed", "21", "--save-scenario", path.to_str().unwrap()]));
    let loaded = stdout(&fogran(&["--scenario", path.to_str().unwrap()]));
    assert_eq!(generated, loaded);
}

#[test]
fn empty_task_set_plans_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.toml");
    fs::write(
        &path,
        r#"num_dus = 1
num_rus = 1
num_users = 0
num_antennas = 10
ru_to_du = [0]
user_to_ru = []
uplink_bandwidth_hz = [10000000.0]
fronthaul_capacity_hz = [300000000.0]
midhaul_capacity_hz = [500000000.0]
fronthaul_se_bps_per_hz = [3.0]
midhaul_se_bps_per_hz = [3.0]
mecl_capacity_hz = [2000000000.0]
mech_capacity_hz = [25000000000.0]
cloud_capacity_hz = 5000000000000.0
data_bits = []
cycles_per_bit = []
tx_power_w = 3.1622776601683795
noise_density_w_per_hz = 3.981071705534986e-21
path_loss_exponent = 4.0
reference_loss_db = 38.0
ru_x_m = [0.0]
ru_y_m = [0.0]
user_x_m = []
user_y_m = []
channel_seed = "0x1"
"#,
    )
    .unwrap();
    let text = stdout(&fogran(&["--scenario", path.to_str().unwrap(), "--scheme", "fog", "--oracle-check"]));
    assert!(text.contains("tasks: 0 (L 0, H 0, C 0)"), "{text}");
    assert!(text.contains("total_delay_s: 0\n"), "{text}");
    assert!(text.contains("oracle_total_delay_s: 0 "), "{text}");
}

#[test]
fn oracle_check_reports_gap_table() {
    let text = stdout(&fogran(&["--oracle-check", "--realizations", "5", "--scheme", "fog"]));
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row.split_whitespace().next(), Some("fog"));
    assert_eq!(row.split_whitespace().nth(1), Some("5"));
}

#[test]
fn bad_input_fails() {
    assert!(!fogran(&["--no-such-flag"]).status.success());
    assert!(!fogran(&["--scheme", "edge"]).status.success());
    assert!(!fogran(&["--sweep", "fl=1e9:5e9:5"]).status.success(), "sweep needs --users");
    assert!(!fogran(&["--sweep", "zz=1:2:3", "--users", "4"]).status.success());
    assert!(!fogran(&["--scenario", "/nonexistent/file.toml"]).status.success());
    let out = fogran(&["--fix", "fl=abc"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
