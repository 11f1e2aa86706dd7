//! End-to-end behavior of the `bct` binary: exit codes, file contracts and
//! reproducibility.

use std::path::Path;
use std::process::{Command, Output};

use bct_core::entropy::entropy_rate_exact;
use bct_core::simulator::{fixture_chain, ChainFile};

fn bct(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bct"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run bct")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = bct(dir, args);
    assert!(out.status.success(), "bct {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

/// Value of `key = value` in a report.
fn field<'a>(doc: &'a str, key: &str) -> &'a str {
    doc.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
        .unwrap_or_else(|| panic!("missing {key}"))
}

/// Rows of the CSV section following `[header]`.
fn section_rows<'a>(doc: &'a str, header: &str) -> Vec<&'a str> {
    doc.lines()
        .skip_while(|l| *l != header)
        .skip(1)
        .take_while(|l| !l.starts_with('['))
        .filter(|l| !l.is_empty())
        .collect()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("empty.txt"), "").unwrap();
    std::fs::write(d.join("bad.txt"), "0120\n").unwrap();
    std::fs::write(d.join("short.txt"), "0101\n").unwrap();

    assert_eq!(bct(d, &["estimate", "--alphabet", "2"]).status.code(), Some(2));
    assert_eq!(bct(d, &["estimate", "--input", "missing.txt", "--alphabet", "2"]).status.code(), Some(2));
    assert_eq!(
        bct(d, &["estimate", "--input", "bad.txt", "--alphabet", "2", "--beta", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(bct(d, &["simulate", "--fixture", "nope", "--length", "5", "--out", "x"]).status.code(), Some(2));
    let empty = bct(d, &["posterior", "--input", "empty.txt", "--alphabet", "2", "--out", "p"]);
    assert_eq!(empty.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&empty.stderr).contains("empty"));
    assert_eq!(bct(d, &["estimate", "--input", "bad.txt", "--alphabet", "2"]).status.code(), Some(3));
    assert_eq!(
        bct(d, &["posterior", "--input", "short.txt", "--alphabet", "2", "--depth", "10", "--out", "p"]).status.code(),
        Some(3)
    );
    let over = Command::new(env!("CARGO_BIN_EXE_bct"))
        .args(["prior", "--alphabet", "2", "--depth", "3", "--samples", "10", "--out", "p"])
        .env("BCT_WORKERS", "zero")
        .current_dir(d)
        .output()
        .unwrap();
    assert_eq!(over.status.code(), Some(2));
}

#[test]
fn simulate_then_estimate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--fixture", "ternary-d2", "--length", "1000", "--seed", "3", "--out", "t.txt"]);
    let text = read(d, "t.txt");
    assert_eq!(text.trim_end().len(), 1000);
    assert!(text.trim_end().bytes().all(|b| (b'0'..=b'2').contains(&b)));

    let meta = read(d, "t.txt.meta");
    let truth: f64 = field(&meta, "true_entropy").parse().unwrap();
    let fixture = fixture_chain("ternary-d2").unwrap();
    assert_eq!(Some(truth), fixture.entropy);
    assert!((truth - entropy_rate_exact(&fixture.spec).unwrap()).abs() < 1e-12);
    let chain_text: String = meta
        .lines()
        .skip_while(|l| *l != "[chain]")
        .skip(1)
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(ChainFile::parse(&chain_text).unwrap().spec, fixture.spec);

    let report = ok(d, &["estimate", "--input", "t.txt", "--alphabet", "3", "--samples", "500", "--seed", "1"]);
    assert_eq!(field(&report, "symbols"), "1000");
    let rows = section_rows(&report, "[estimates]");
    assert_eq!(rows[0], "estimator,value,std_dev,credible_lower,credible_upper,note");
    let names: Vec<&str> = rows[1..].iter().map(|r| r.split(',').next().unwrap()).collect();
    assert_eq!(names, ["bct", "ctw", "ppm", "lz", "plugin_k5", "plugin_k6", "plugin_k7"]);
    for row in &rows[1..] {
        let value: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!(value >= 0.0, "{row}");
        // Order-10 interpolated PPM overshoots log m badly on short data, so
        // it is exempt from the upper bound.
        if !row.starts_with("ppm") {
            assert!(value <= 3f64.ln() + 0.1, "{row}");
        }
    }
    let bct_row: Vec<&str> = rows[1].split(',').collect();
    let lo: f64 = bct_row[3].parse().unwrap();
    let hi: f64 = bct_row[4].parse().unwrap();
    let mean: f64 = bct_row[1].parse().unwrap();
    assert!(lo <= mean && mean <= hi);
}

#[test]
fn posterior_histogram_is_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--fixture", "binary-d1", "--length", "2000", "--seed", "5", "--out", "b.txt"]);
    ok(
        d,
        &["posterior", "--input", "b.txt", "--alphabet", "2", "--samples", "100000", "--seed", "2", "--out", "post", "--dump-samples"],
    );
    let hist = read(d, "post.hist.csv");
    let mut lines = hist.lines();
    assert_eq!(lines.next(), Some("bin_lo,bin_hi,frequency"));
    let freqs: Vec<f64> = lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(freqs.len(), 50);
    assert!((freqs.iter().sum::<f64>() - 1.0).abs() < 1e-9);

    let summary = read(d, "post.summary.txt");
    assert!(summary.starts_with("format_version = 1\n"));
    assert_eq!(field(&summary, "samples"), "100000");
    let dump = read(d, "post.samples.tsv");
    assert_eq!(dump.lines().count(), 100_001);
}

#[test]
fn prior_support_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["prior", "--alphabet", "2", "--depth", "0", "--samples", "20000", "--seed", "1", "--out", "p2"]);
    let s = read(d, "p2.summary.txt");
    let min: f64 = field(&s, "min").parse().unwrap();
    let max: f64 = field(&s, "max").parse().unwrap();
    assert!(min >= 0.0 && max <= 2f64.ln());

    ok(d, &["prior", "--alphabet", "3", "--depth", "3", "--samples", "20000", "--seed", "1", "--out", "p3"]);
    let s = read(d, "p3.summary.txt");
    let upper: f64 = field(&s, "credible_upper").parse().unwrap();
    let max: f64 = field(&s, "max").parse().unwrap();
    assert!(max <= 3f64.ln() && upper < 3f64.ln());
    let first = read(d, "p3.hist.csv");
    ok(d, &["prior", "--alphabet", "3", "--depth", "3", "--samples", "20000", "--seed", "1", "--out", "p3"]);
    assert_eq!(first, read(d, "p3.hist.csv"));
}

#[test]
fn convergence_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "convergence", "--fixture", "binary-d1", "--grid", "1000,10000", "--replicates", "10", "--samples", "2000",
            "--seed", "3", "--out", "conv.csv",
        ],
    );
    let csv = read(d, "conv.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,replicate,estimator,value,abs_error"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let estimators = 7;
    assert_eq!(rows.len(), 2 * estimators * 10 + 2 * estimators);
    assert!(rows.iter().all(|r| r.len() == 5));
    let median_error = |n: &str| -> f64 {
        rows.iter()
            .find(|r| r[0] == n && r[1] == "median" && r[2] == "bct")
            .unwrap()[4]
            .parse()
            .unwrap()
    };
    assert!(median_error("10000") <= median_error("1000"));
}

#[test]
fn config_file_and_flags_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("x.txt"), "0110100110010110\n").unwrap();
    std::fs::write(d.join("run.toml"), "alphabet = 2\ndepth = 2\nseed = 7\nestimators = \"ctw,plugin\"\nplugin_k = \"1,2\"\n").unwrap();
    let report = ok(d, &["estimate", "--input", "x.txt", "--config", "run.toml", "--depth", "3"]);
    assert_eq!(field(&report, "depth"), "3");
    assert_eq!(field(&report, "seed"), "7");
    let names: Vec<&str> = section_rows(&report, "[estimates]")[1..]
        .iter()
        .map(|r| r.split(',').next().unwrap())
        .collect();
    assert_eq!(names, ["ctw", "plugin_k1", "plugin_k2"]);
    std::fs::write(d.join("bad.toml"), "colour = 3\n").unwrap();
    assert_eq!(bct(d, &["estimate", "--input", "x.txt", "--config", "bad.toml"]).status.code(), Some(2));
}

#[test]
fn values_input_is_quantized() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let prices: String = (0..400).map(|i| format!("{}\n", 100.0 + ((i * 7) % 11) as f64 - 5.0)).collect();
    std::fs::write(d.join("prices.csv"), format!("price\n{prices}")).unwrap();
    let report = ok(
        d,
        &["estimate", "--input", "prices.csv", "--format", "values", "--depth", "2", "--samples", "200", "--estimators", "ctw"],
    );
    assert_eq!(field(&report, "alphabet"), "3");
    assert_eq!(field(&report, "symbols"), "399");
}
