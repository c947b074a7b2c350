use std::fs;

use stokes_spectra::harness::{fit_power_law, log_log_fit, preset, run, ExperimentConfig, Pipeline, REGISTRY};
use stokes_spectra::Error;

#[test]
fn fits_exact_power_laws() {
    let pairs: Vec<(f64, f64)> = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2].iter().map(|&e| (e, 6.0 * e * e * e)).collect();
    let (slope, prefactor) = fit_power_law(&pairs).unwrap();
    assert!((slope - 3.0).abs() < 1e-12 && (prefactor - 6.0).abs() < 1e-9);
    assert!(matches!(fit_power_law(&pairs[..3]), Err(Error::InvalidData(_))));
    let (slope, _) = log_log_fit(&pairs[..2]).unwrap();
    assert!((slope - 3.0).abs() < 1e-12);
    assert!(log_log_fit(&[(1e-3, 0.0), (1e-2, 1.0)]).is_err());
}

#[test]
fn every_registered_experiment_writes_a_bundle() {
    let root = tempfile::tempdir().unwrap();
    for name in REGISTRY {
        let config = preset(name, root.path().join(name)).unwrap();
        let output = run(&config).unwrap();
        assert!(output.dir.join("summary.json").is_file(), "{name}");
        let echo: ExperimentConfig = serde_json::from_slice(&fs::read(output.dir.join("config.json")).unwrap()).unwrap();
        assert_eq!(echo, config);
        let summary: serde_json::Value = serde_json::from_slice(&fs::read(output.dir.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary, output.summary);
        assert_eq!(summary["name"], name);
        let csvs = fs::read_dir(&output.dir)
            .unwrap()
            .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
            .count();
        assert!(csvs > 0, "{name}");
    }
}

#[test]
fn reruns_are_bit_identical() {
    let root = tempfile::tempdir().unwrap();
    let read = |dir: &std::path::Path| -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
            .unwrap()
            .map(|e| {
                let path = e.unwrap().path();
                (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap())
            })
            .filter(|(name, _)| name != "config.json")
            .collect();
        files.sort();
        files
    };
    for name in ["fig1-right", "fig6"] {
        let first = run(&preset(name, root.path().join("a")).unwrap()).unwrap();
        let second = run(&preset(name, root.path().join("b")).unwrap()).unwrap();
        assert_eq!(read(&first.dir), read(&second.dir), "{name}");
    }
}

#[test]
fn scaling_study_reports_a_fit() {
    let root = tempfile::tempdir().unwrap();
    let output = run(&preset("fig4", root.path()).unwrap()).unwrap();
    let fit = &output.summary["results"]["error_fit"];
    assert!(fit["slope"].as_f64().unwrap().is_finite());
    let text = fs::read_to_string(root.path().join("error_scaling.csv")).unwrap();
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn bad_configurations_are_config_errors() {
    let root = tempfile::tempdir().unwrap();
    let mut config = preset("fig1-left", root.path()).unwrap();
    config.models = vec!["whitham:g=2".into()];
    assert!(run(&config).unwrap_err().is_config());
    assert!(preset("fig99", root.path()).unwrap_err().is_config());
    let mut config = preset("fig2", root.path()).unwrap();
    config.epsilons.clear();
    assert_eq!(config.pipeline, Pipeline::Sheet);
    assert!(run(&config).unwrap_err().is_config());
}
