use std::path::PathBuf;

use ofdm_sync::{OfdmConfig, SnrConvention};
use ofdm_sync_cli::{load_config, parse_config, CliError, Settings, Subcommand};

#[test]
fn empty_file_gives_defaults() {
    let cfg = parse_config(Subcommand::Trace, Some(""), &Settings::default()).unwrap();
    assert_eq!(cfg.ofdm.fft_size, 128);
    assert_eq!(cfg.ofdm.half_len(), 64);
    assert_eq!(cfg.ofdm.cp_len, 32);
    assert_eq!(cfg.ofdm.num_data_symbols, 16);
    assert_eq!(cfg.ofdm.lead_noise_len, 512);
    assert_eq!(cfg.ofdm.tail_noise_len, 512);
    assert_eq!(cfg.ofdm.snr.convention, SnrConvention::EbN0Qpsk);
    assert_eq!(cfg.ofdm.snr.level_db, 10.0);
    assert_eq!(cfg.ofdm, OfdmConfig::default());
    assert!(cfg.channel.is_none());
    assert!(cfg.emit_plot_script);

    let none = parse_config(Subcommand::Trace, None, &Settings::default()).unwrap();
    assert_eq!(none, cfg);
}

#[test]
fn non_power_of_two_rejected() {
    let err = parse_config(
        Subcommand::Trace,
        Some("fft_size = 127\n"),
        &Settings::default(),
    )
    .unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("fft_size") && msg.contains("power of two"),
        "{msg}"
    );
}

#[test]
fn flag_overrides_file() {
    let flags = Settings {
        snr: Some(ofdm_sync::Snr::es_n0_db(7.0)),
        ..Settings::default()
    };
    let cfg = parse_config(Subcommand::Histogram, Some("es_n0_db = 10\n"), &flags).unwrap();
    assert_eq!(cfg.ofdm.snr.convention, SnrConvention::EsN0);
    assert_eq!(cfg.ofdm.snr.level_db, 7.0);

    // an Eb/N0 flag replaces an Es/N0 file setting outright
    let flags = Settings {
        snr: Some(ofdm_sync::Snr::eb_n0_db(3.0)),
        fft_size: Some(64),
        ..Settings::default()
    };
    let cfg = parse_config(
        Subcommand::Trace,
        Some("es_n0_db = 10\nfft_size = 256\n"),
        &flags,
    )
    .unwrap();
    assert_eq!(cfg.ofdm.snr.convention, SnrConvention::EbN0Qpsk);
    assert_eq!(cfg.ofdm.fft_size, 64);
}

#[test]
fn unknown_key_reports_line() {
    let text = "# comment\nfft_size = 64\n\nfft_sise = 64\n";
    match parse_config(Subcommand::Trace, Some(text), &Settings::default()) {
        Err(CliError::UnknownKey { line, key }) => {
            assert_eq!(line, 4);
            assert_eq!(key, "fft_sise");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn malformed_values_name_the_key() {
    for (text, key) in [
        ("cp_len = -3", "cp_len"),
        ("preamble_has_cp = yes", "preamble_has_cp"),
        ("eb_n0_db = ten", "eb_n0_db"),
        ("taps = 1:0.8", "taps"),
        ("taps = 5:1,0;2:1,0", "taps"),
        ("trials = 0", "trials"),
        ("threshold = -1", "threshold"),
    ] {
        let err = parse_config(Subcommand::Trace, Some(text), &Settings::default()).unwrap_err();
        assert!(err.to_string().contains(key), "{text}: {err}");
    }
    let err = parse_config(
        Subcommand::Trace,
        Some("cp_len = 128"),
        &Settings::default(),
    );
    assert!(err.unwrap_err().to_string().contains("cp_len"));
}

#[test]
fn both_snr_keys_in_one_file_rejected() {
    let err = parse_config(
        Subcommand::Trace,
        Some("eb_n0_db = 10\nes_n0_db = 7\n"),
        &Settings::default(),
    )
    .unwrap_err();
    assert!(
        matches!(err, CliError::BadValue { line: Some(2), .. }),
        "{err}"
    );
}

#[test]
fn every_key_is_accepted() {
    let text = "\
fft_size = 64
cp_len = 16
num_data_symbols = 4
lead_noise_len = 100
tail_noise_len = 50
preamble_has_cp = true
es_n0_db = 7.5
seed = 42
taps = 1:0.8,0; 16:0.35,0.35
trials = 10
threshold = 0.5
output_dir = results
emit_plot_script = false
";
    let cfg = parse_config(Subcommand::Trace, Some(text), &Settings::default()).unwrap();
    assert_eq!(cfg.ofdm.fft_size, 64);
    assert_eq!(cfg.ofdm.cp_len, 16);
    assert_eq!(cfg.ofdm.num_data_symbols, 4);
    assert_eq!(cfg.ofdm.lead_noise_len, 100);
    assert_eq!(cfg.ofdm.tail_noise_len, 50);
    assert!(cfg.ofdm.preamble_has_cp);
    assert_eq!(cfg.ofdm.snr.level_db, 7.5);
    assert_eq!(cfg.ofdm.base_seed, 42);
    assert_eq!(cfg.channel.as_ref().unwrap().duration(), 16);
    assert_eq!(cfg.trials, 10);
    assert_eq!(cfg.threshold, 0.5);
    assert_eq!(cfg.output_dir, PathBuf::from("results"));
    assert!(!cfg.emit_plot_script);
}

#[test]
fn echo_reparses_to_same_config() {
    let text = "fft_size = 64\ncp_len = 16\ntaps = 1:0.8,0;16:0.35,-0.35\nes_n0_db = 7\n";
    let cfg = parse_config(Subcommand::Trace, Some(text), &Settings::default()).unwrap();
    let echoed: String = cfg
        .echo()
        .into_iter()
        .filter(|(k, _)| k != "subcommand" && k != "noise_variance")
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect();
    let back = parse_config(Subcommand::Trace, Some(&echoed), &Settings::default()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn missing_config_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("absent.conf");
    let err = load_config(Subcommand::Trace, Some(&path), &Settings::default()).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }));
    assert_eq!(err.exit_code(), 2);

    std::fs::write(&path, "seed = 9\n").unwrap();
    let cfg = load_config(Subcommand::Trace, Some(&path), &Settings::default()).unwrap();
    assert_eq!(cfg.ofdm.base_seed, 9);
    assert_eq!(cfg.config_path.as_deref(), Some(path.as_path()));
}
