mod common;

use std::io::Cursor;

use common::*;
use lpcss::css::Algorithm;
use lpcss::harness::{
    column_order, evaluation_irls, gen_synthetic, load_matrix, read_binary, read_csv, report_from_file, run_experiment,
    run_on_matrix, save_matrix, summarize, synthetic_certificate, write_binary, write_csv, write_outputs,
    ExperimentConfig, MatrixFormat, Mode,
};
use lpcss::numerics::{entrywise_lp_norm, lp_fit_error};
use lpcss::{CssError, Matrix, PNorm};

#[test]
fn config_parsing() {
    let text = r#"
mode = "distributed"
algorithms = ["regular", "greedy", "uniform", "svd"]
k = 10
p = 1.0
seeds = [0, 1, 2]
dataset = "synthetic"
synthetic_n = 200
batch_size = 50
coreset_size = 20
sketch_rows = 105
servers = 5
delta = 0.1
"#;
    let cfg = ExperimentConfig::from_toml(text).unwrap();
    assert_eq!(cfg.mode, Mode::Distributed);
    assert_eq!(cfg.algorithms.len(), 4);
    assert_eq!(cfg.sketch_rows, Some(105));
    let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(back.to_toml().unwrap(), cfg.to_toml().unwrap());

    let unknown = format!("{text}batchsize = 3\n");
    assert!(matches!(ExperimentConfig::from_toml(&unknown), Err(CssError::Config(_))));
    assert!(ExperimentConfig::from_toml(&text.replace("k = 10", "k = 0")).is_err());
    assert!(ExperimentConfig::from_toml(&text.replace("\"svd\"", "\"pca\"")).is_err());
    assert!(ExperimentConfig::from_toml(&text.replace("p = 1.0", "p = 2.5")).is_err());
    assert!(ExperimentConfig::from_toml(&text.replace("synthetic_n = 200", "")).is_err());
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::load(&path).unwrap();
            assert_eq!(cfg.k, 10, "{}", path.display());
            count += 1;
        }
    }
    assert!(count >= 3);
}

#[test]
fn csv_and_binary_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian(5, 7, &mut rng(1));
    for (fmt, name) in [(MatrixFormat::Csv, "a.csv"), (MatrixFormat::Binary, "a.bin")] {
        let path = dir.path().join(name);
        save_matrix(&path, &a, fmt).unwrap();
        assert_eq!(load_matrix(&path, fmt, false).unwrap(), a);
    }
    let mut buf = Vec::new();
    write_binary(&mut buf, &a).unwrap();
    assert_eq!(buf.len(), 16 + 35 * 8);
    assert_eq!(read_binary(&buf[..]).unwrap(), a);
    let mut text = Vec::new();
    write_csv(&mut text, &a).unwrap();
    assert_eq!(String::from_utf8(text).unwrap().lines().count(), 7);
    assert_eq!("bin".parse::<MatrixFormat>().unwrap(), MatrixFormat::Binary);
}

#[test]
fn csv_header_and_shape() {
    let with_header = "x,y,z\n1,2,3\n4,5,6\n";
    assert!(read_csv(Cursor::new(with_header), false).is_err());
    let m = read_csv(Cursor::new(with_header), true).unwrap();
    assert_eq!(m.shape(), (3, 2));
    assert_eq!(m.col(1), &[4.0, 5.0, 6.0]);
    let one = read_csv(Cursor::new("1.5,2.5,-3\n"), false).unwrap();
    assert_eq!(one.shape(), (3, 1));
}

#[test]
fn malformed_files_carry_locations() {
    let msg = |e: CssError| e.to_string();
    let ragged = msg(read_csv(Cursor::new("1,2\n3\n"), false).unwrap_err());
    assert!(ragged.contains("line 2"), "{ragged}");
    let bad = msg(read_csv(Cursor::new("1,2\n3,x\n"), false).unwrap_err());
    assert!(bad.contains("line 2"), "{bad}");
    assert!(read_csv(Cursor::new("1,inf\n"), false).is_err());
    assert!(read_csv(Cursor::new(""), false).is_err());

    let a = gaussian(2, 2, &mut rng(2));
    let mut buf = Vec::new();
    write_binary(&mut buf, &a).unwrap();
    let short = msg(read_binary(&buf[..buf.len() - 4]).unwrap_err());
    assert!(short.contains("offset"), "{short}");
    buf.push(0);
    assert!(read_binary(&buf[..]).is_err());
}

#[test]
fn synthetic_construction() {
    let a = gen_synthetic::<f64>(2, 1).unwrap();
    assert_eq!(a.shape(), (3, 3));
    assert!((a[(0, 0)] - 2f64.powf(1.5)).abs() < 1e-15);
    assert_eq!((a[(1, 1)], a[(2, 1)], a[(1, 2)], a[(2, 2)]), (1.0, 1.0, 1.0, 1.0));
    assert_eq!((a[(0, 1)], a[(1, 0)]), (0.0, 0.0));

    let (n, k) = (40usize, 4usize);
    let a = gen_synthetic::<f64>(n, k).unwrap();
    let nf = n as f64;
    let norm = entrywise_lp_norm(&a, PNorm::ONE).unwrap();
    assert!((norm - (k as f64 * nf.powf(1.5) + nf * nf)).abs() < 1e-9);
    let cert = synthetic_certificate(k);
    assert_eq!(cert, vec![0, 1, 2, 4]);
    let err = lp_fit_error(&a.select_columns(&cert), &a, PNorm::ONE, &evaluation_irls()).unwrap();
    assert!((err - nf.powf(1.5)).abs() < 1e-6 * nf.powf(1.5), "{err}");
    assert!(gen_synthetic::<f64>(0, 1).is_err());
}

#[test]
fn svd_row_matches_closed_form() {
    let (n, k) = (100usize, 5usize);
    let cfg = ExperimentConfig::synthetic(Mode::Offline, vec![Algorithm::Svd], n, k, vec![0]);
    let out = run_experiment(&cfg).unwrap();
    let nf = n as f64;
    let expect = nf * nf / (k as f64 * nf.powf(1.5) + nf * nf);
    let got = out.rows[0].err_ratio;
    assert!((got - expect).abs() <= 0.01 * expect, "{got} vs {expect}");
}

#[test]
fn offline_equals_streaming_on_one_batch() {
    let a = gaussian(10, 30, &mut rng(3));
    for alg in [Algorithm::Regular, Algorithm::Greedy] {
        let mut cfg = ExperimentConfig::synthetic(Mode::Offline, vec![alg], 30, 3, vec![4, 5, 6]);
        cfg.batch_size = Some(40);
        let offline = run_on_matrix(&a, &cfg).unwrap().rows;
        cfg.mode = Mode::Streaming;
        let streaming = run_on_matrix(&a, &cfg).unwrap().rows;
        for (x, y) in offline.iter().zip(&streaming) {
            assert!(x.ok() && y.ok());
            assert_eq!(x.err_ratio, y.err_ratio);
            assert_eq!(x.selected, y.selected);
        }
    }
}

#[test]
fn runs_are_reproducible_bit_exactly() {
    let a = gen_synthetic::<f64>(30, 3).unwrap();
    for mode in [Mode::Streaming, Mode::Offline, Mode::Distributed] {
        let mut cfg = ExperimentConfig::synthetic(mode, vec![Algorithm::Uniform, Algorithm::Regular], 30, 3, (0..10).collect());
        let x = run_on_matrix(&a, &cfg).unwrap();
        cfg.parallel = false;
        let y = run_on_matrix(&a, &cfg).unwrap();
        for (r, s) in x.rows.iter().zip(&y.rows) {
            assert_eq!((r.seed, r.err_ratio.to_bits(), r.words), (s.seed, s.err_ratio.to_bits(), s.words));
        }
        assert_eq!(x.summary[0].err_mean.to_bits(), y.summary[0].err_mean.to_bits());
        assert_eq!(x.summary[0].runs, 10);
    }
}

#[test]
fn column_order_is_a_seeded_permutation() {
    let o = column_order(50, 3, true);
    let mut sorted = o.clone();
    sorted.sort();
    assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    assert_eq!(o, column_order(50, 3, true));
    assert_ne!(o, column_order(50, 4, true));
    assert_eq!(column_order(5, 3, false), vec![0, 1, 2, 3, 4]);
}

#[test]
fn summary_recomputed_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::synthetic(
        Mode::Streaming,
        vec![Algorithm::Regular, Algorithm::Uniform, Algorithm::Svd],
        40,
        4,
        vec![1, 2, 3, 4],
    );
    cfg.output = dir.path().to_path_buf();
    let out = run_experiment(&cfg).unwrap();
    let files = write_outputs(&cfg, &out).unwrap();
    assert!(files.iter().all(|f| f.exists()));
    let (rows, summary) = report_from_file(&dir.path().join("metrics.csv")).unwrap();
    assert_eq!(rows.len(), 12);
    for (a, b) in summary.iter().zip(&out.summary) {
        assert_eq!(a.algorithm, b.algorithm);
        assert!((a.err_mean - b.err_mean).abs() <= 1e-12 * b.err_mean.abs().max(1.0));
        assert!((a.err_std - b.err_std).abs() <= 1e-12);
    }
    // independent mean and population std of the regular rows
    let errs: Vec<f64> = rows.iter().filter(|r| r.algorithm == Algorithm::Regular).map(|r| r.err_ratio).collect();
    let mean = errs.iter().sum::<f64>() / errs.len() as f64;
    let std = (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / errs.len() as f64).sqrt();
    assert!((summary[0].err_mean - mean).abs() < 1e-12);
    assert!((summary[0].err_std - std).abs() < 1e-12);
    assert_eq!(summarize(&rows), summary);
    let txt = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(txt.contains("regular") && txt.contains("svd"));
}

#[test]
fn small_inputs_do_not_abort_the_run() {
    let a = Matrix::from_fn(4, 6, |i, j| (i * j) as f64 + 1.0);
    let mut cfg = ExperimentConfig::synthetic(Mode::Offline, vec![Algorithm::Regular, Algorithm::Svd], 6, 5, vec![0]);
    cfg.dataset = "inline".into();
    let rows = run_on_matrix(&a, &cfg).unwrap().rows;
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ok() || r.err_ratio.is_nan()));
}

#[test]
fn assignment_file_drives_sharding() {
    let dir = tempfile::tempdir().unwrap();
    let a = gaussian(6, 20, &mut rng(5));
    let path = dir.path().join("assign.txt");
    let lines: Vec<String> = (0..20).map(|j| (j % 3).to_string()).collect();
    std::fs::write(&path, lines.join("\n")).unwrap();
    let mut cfg = ExperimentConfig::synthetic(Mode::Distributed, vec![Algorithm::Regular], 20, 2, vec![0, 1]);
    cfg.servers = 3;
    cfg.assignment = Some(path);
    cfg.transcripts = true;
    cfg.output = dir.path().join("out");
    let rows = run_on_matrix(&a, &cfg).unwrap().rows;
    assert!(rows.iter().all(|r| r.ok() && r.words > 0));
    assert!(dir.path().join("out/transcript-regular-0.jsonl").exists());
}
