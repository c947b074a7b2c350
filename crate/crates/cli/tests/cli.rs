use std::fs;
use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stokes-spectra")).args(args).output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn collisions_table() {
    let output = cli(&["--model", "whitham:h=inf,sigma=2.5", "collisions", "--m", "1"]);
    assert!(output.status.success());
    let text = stdout(&output);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "family,params,m,k1,k2,p0,lambda0_im,krein_negative,cg1,cg2"
    );
    let row = lines
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|f| (f[5].parse::<f64>().unwrap() - 0.2681).abs() < 1e-3)
        .expect("collision near 0.2681");
    assert_eq!(row[0], "CapillaryWhitham");
    assert!((row[6].parse::<f64>().unwrap() + 0.0608).abs() < 1e-3);
    assert_eq!(row[7], "true");
}

#[test]
fn unstable_spectrum_only_lists_growing_modes() {
    let output = cli(&[
        "--model", "kawahara:a=-3,b=1", "--epsilon", "1e-2", "spectrum", "--p-min", "0.001", "--p-max", "0.01", "--n-p", "5",
        "--unstable-only",
    ]);
    assert!(output.status.success());
    let text = stdout(&output);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let re = header.iter().position(|h| *h == "re").unwrap();
    let rows: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(re).unwrap().parse().unwrap()).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|&r| r > 1e-10));
}

#[test]
fn json_output_and_out_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let output = cli(&["--model", "akersmilewski:sigma=2", "--format", "json", "--out", out, "isola", "--p0", "0.1464", "--n-theta", "8"]);
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("isola.json")).unwrap()).unwrap();
    assert!(value.to_string().contains("theta"));
}

#[test]
fn run_writes_a_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("bundle");
    let output = cli(&["--out", target.to_str().unwrap(), "--jobs", "1", "run", "fig1-right"]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    for file in ["config.json", "isola.csv", "summary.json"] {
        assert!(target.join(file).is_file(), "{file}");
    }
    assert_eq!(stdout(&output).trim(), target.to_str().unwrap());
}

#[test]
fn configuration_errors_exit_with_status_two() {
    for args in [
        &["--model", "whitham:g=2", "collisions"][..],
        &["run", "no-such-experiment"][..],
        &["--format", "yaml", "collisions"][..],
        &["isola"][..],
    ] {
        let output = cli(args);
        assert_eq!(output.status.code(), Some(2), "{args:?}");
        assert!(!output.stderr.is_empty());
    }
}

#[test]
fn numerical_failures_exit_with_status_three() {
    // The second harmonic of this wave is resonant with the carrier.
    let output = cli(&["--model", "whitham:h=inf,sigma=0.5", "bf"]);
    assert_eq!(output.status.code(), Some(3), "{}", String::from_utf8_lossy(&output.stderr));
}
