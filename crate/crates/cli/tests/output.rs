use std::fs;
use std::path::PathBuf;

use ofdm_sync::{HistogramResult, PeakReport, TraceResult};
use ofdm_sync_cli::output::{HISTOGRAM_HEADER, META_FILE, TRACE_HEADER};
use ofdm_sync_cli::{emit_plot_script, write_histogram_csv, write_trace_csv, CliError, PlotKind};

fn three_point() -> TraceResult {
    TraceResult {
        indices: vec![128, 129, 130],
        m_old: vec![0.123456789012, 1.0 / 3.0, 4.0],
        m_new: vec![1e-12, 0.999999999949, 0.0],
        m_delayed_r: vec![123456.789012, 2.0 / 3.0, 7.25e-6],
        expected_peak_index: 129,
        burst_end_index: 130,
        channel_duration: 0,
        exclusion_radius: 32,
        spurious_peaks_old: vec![],
        spurious_peaks_new: vec![],
        detection: PeakReport {
            candidates: vec![],
            accepted: None,
            threshold: 0.6,
            search_window: 128,
        },
        seed: 0,
    }
}

fn meta() -> Vec<(String, String)> {
    vec![
        ("fft_size".to_string(), "128".to_string()),
        ("seed".to_string(), "7".to_string()),
    ]
}

fn parse_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[test]
fn trace_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    write_trace_csv(&three_point(), &path, &meta()).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text.lines().next(), Some(TRACE_HEADER));
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    assert_eq!(
        text.lines().nth(1),
        Some("128,0.123456789,1e-12,123456.789")
    );

    let sidecar = fs::read_to_string(dir.path().join(META_FILE)).unwrap();
    assert_eq!(sidecar, "fft_size = 128\nseed = 7\n");
}

#[test]
fn trace_csv_round_trip() {
    // Nine significant digits bound the relative rounding error by 5e-9.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.csv");
    let r = three_point();
    write_trace_csv(&r, &path, &meta()).unwrap();
    let rows = parse_rows(&fs::read_to_string(&path).unwrap());
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0] as usize, r.indices[i]);
        for (got, want) in row[1..]
            .iter()
            .zip([r.m_old[i], r.m_new[i], r.m_delayed_r[i]])
        {
            assert!(rel_err(*got, want) <= 5e-9, "{got} vs {want}");
        }
    }
}

#[test]
fn trace_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a").join("trace.csv");
    let b = dir.path().join("b").join("trace.csv");
    fs::create_dir_all(a.parent().unwrap()).unwrap();
    fs::create_dir_all(b.parent().unwrap()).unwrap();
    write_trace_csv(&three_point(), &a, &meta()).unwrap();
    write_trace_csv(&three_point(), &b, &meta()).unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn trace_csv_unwritable_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("trace.csv");
    let err = write_trace_csv(&three_point(), &path, &meta()).unwrap_err();
    assert!(err.to_string().contains("trace.csv"), "{err}");
}

fn histogram() -> HistogramResult {
    let old: Vec<f64> = (0..500)
        .map(|i| 0.3 + 0.7 * ((i * 37) % 500) as f64 / 500.0)
        .collect();
    let new: Vec<f64> = (0..500)
        .map(|i| 0.6 + 0.2 * ((i * 11) % 500) as f64 / 500.0)
        .collect();
    HistogramResult::from_values(old, new).unwrap()
}

#[test]
fn histogram_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("histogram.csv");
    let h = histogram();
    write_histogram_csv(&h, &path, &meta()).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 65);
    assert_eq!(text.lines().next(), Some(HISTOGRAM_HEADER));

    let rows = parse_rows(&text);
    let sum_old: f64 = h.normalized_old().iter().sum();
    let sum_new: f64 = h.normalized_new().iter().sum();
    assert!((sum_old - 1.0).abs() <= 1e-12);
    assert!((sum_new - 1.0).abs() <= 1e-12);
    // the rendered columns recover the counts exactly
    let counts_old: u64 = rows
        .iter()
        .map(|r| (r[2] * h.trials as f64).round() as u64)
        .sum();
    assert_eq!(counts_old, h.trials as u64);
    for w in rows.windows(2) {
        assert_eq!(w[0][1], w[1][0]);
    }

    let sidecar = fs::read_to_string(dir.path().join(META_FILE)).unwrap();
    for key in ["mean_old", "mean_new", "var_old", "var_new"] {
        assert!(sidecar.contains(&format!("{key} = ")), "{sidecar}");
    }
}

#[test]
fn zero_trials_rejected_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("histogram.csv");
    let mut h = histogram();
    h.trials = 0;
    assert!(write_histogram_csv(&h, &path, &meta()).is_err());
    assert!(!path.exists());
    assert!(!dir.path().join(META_FILE).exists());
}

#[test]
fn plot_scripts_reference_csv_relatively() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    write_trace_csv(&three_point(), &csv, &meta()).unwrap();
    let script = dir.path().join("plot_trace.py");
    emit_plot_script(PlotKind::Trace, std::slice::from_ref(&csv), &script).unwrap();
    let text = fs::read_to_string(&script).unwrap();
    assert!(text.contains("(\"trace.csv\",)"));
    assert!(!text.contains(&dir.path().display().to_string()));
    assert!(text.contains("label=\"M old\"") && text.contains("label=\"M new\""));

    let hist = dir.path().join("histogram.csv");
    write_histogram_csv(&histogram(), &hist, &meta()).unwrap();
    let sub = dir.path().join("plots");
    fs::create_dir(&sub).unwrap();
    let script = sub.join("plot_histogram.py");
    emit_plot_script(PlotKind::Histogram, &[hist], &script).unwrap();
    let text = fs::read_to_string(&script).unwrap();
    assert!(text.contains("(\"..\", \"histogram.csv\",)"), "{text}");
    assert!(text.contains("ax.bar("));
}

#[test]
fn plot_script_needs_existing_csv() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("plot.py");
    let err = emit_plot_script(PlotKind::Trace, &[PathBuf::from("nope.csv")], &script);
    assert!(matches!(err, Err(CliError::MissingCsv(_))));
    assert!(!script.exists());
}
