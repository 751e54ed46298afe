use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ranksim::harness::{
    aggregate, parse_run_records, render_aggregate_csv, AGGREGATE_HEADER, RUN_RECORD_HEADER,
};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn planted() -> PathBuf {
    fixtures().join("planted").join("attack.toml")
}

fn ranksim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ranksim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Copies the planted fixture into `dir` with `extra` appended to its config.
fn planted_variant(dir: &Path, extra: &str, synonyms: &str) -> PathBuf {
    for name in ["corpus.tsv", "lexicon.tsv"] {
        fs::copy(fixtures().join("planted").join(name), dir.join(name)).unwrap();
    }
    fs::write(dir.join("synonyms.tsv"), synonyms).unwrap();
    let base = fs::read_to_string(planted()).unwrap();
    let cfg = dir.join("attack.toml");
    fs::write(&cfg, format!("{base}{extra}")).unwrap();
    cfg
}

#[test]
fn measure_prints_six_decimals() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.tsv");
    let b = dir.path().join("b.tsv");
    fs::write(&a, "a\t2\nb\t1\n").unwrap();
    fs::write(&b, "b\t2\na\t1\n").unwrap();

    let o = ranksim(&[
        "measure",
        "--a",
        path(&a),
        "--b",
        path(&a),
        "--measure",
        "kendall",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.000000\n");

    let o = ranksim(&[
        "measure",
        "--a",
        path(&a),
        "--b",
        path(&b),
        "--measure",
        "rbo",
        "--p",
        "0.5",
    ]);
    assert_eq!(stdout(&o), "0.500000\n");

    let o = ranksim(&[
        "measure",
        "--a",
        path(&a),
        "--b",
        path(&b),
        "--measure",
        "spearman",
        "--penalty",
        "1",
    ]);
    assert_eq!(stdout(&o), "0.000000\n");
}

#[test]
fn measure_usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.tsv");
    fs::write(&a, "a\t2\nb\t1\n").unwrap();
    let missing = dir.path().join("missing.tsv");

    let o = ranksim(&[
        "measure",
        "--a",
        path(&a),
        "--b",
        path(&missing),
        "--measure",
        "kendall",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.tsv"));

    let o = ranksim(&[
        "measure",
        "--a",
        path(&a),
        "--b",
        path(&a),
        "--measure",
        "cosine",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "a\t1\nb\tNaN\n").unwrap();
    let o = ranksim(&[
        "measure",
        "--a",
        path(&bad),
        "--b",
        path(&a),
        "--measure",
        "kendall",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = ranksim(&["measure", "--a", path(&a)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explain_is_deterministic() {
    let cfg = planted();
    let args = ["explain", "--config", path(&cfg), "--doc-id", "0"];
    let first = ranksim(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&ranksim(&args)));
    let text = stdout(&first);
    assert_eq!(
        text.lines().next().unwrap().split('\t').next(),
        Some("great")
    );
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn explain_single_word_text() {
    let cfg = planted();
    let o = ranksim(&["explain", "--config", path(&cfg), "--text", "great"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("great\t"));
}

#[test]
fn explain_needs_a_document() {
    let cfg = planted();
    let o = ranksim(&["explain", "--config", path(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    let o = ranksim(&["explain", "--config", path(&cfg), "--doc-id", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn attack_planted_fixture_succeeds() {
    let cfg = planted();
    let o = ranksim(&["attack", "--config", path(&cfg), "--doc-id", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("success: true\n"));
    assert!(text.contains("n_perturbed: 1\n"));
    assert!(text.contains("perturbed_text: the movie was decent and fun\n"));
    let listed: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "perturbations:")
        .skip(1)
        .collect();
    assert_eq!(listed, ["  3\tgreat\tdecent"]);
}

#[test]
fn attack_without_synonyms_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = planted_variant(dir.path(), "", "");
    let o = ranksim(&["attack", "--config", path(&cfg), "--doc-id", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("success: false\n"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = planted_variant(dir.path(), "colour = \"blue\"\n", "great\tdecent\n");
    let o = ranksim(&["attack", "--config", path(&cfg), "--doc-id", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = planted_variant(
        dir.path(),
        "stopwords = \"nowhere.txt\"\n",
        "great\tdecent\n",
    );
    let o = ranksim(&["attack", "--config", path(&cfg), "--doc-id", "0"]);
    assert_eq!(o.status.code(), Some(2));

    let o = ranksim(&[
        "attack",
        "--config",
        "/no/such/config.toml",
        "--doc-id",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let cfg = planted();
    let o = ranksim(&[
        "attack",
        "--config",
        path(&cfg),
        "--doc-id",
        "0",
        "--tau",
        "1.5",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flag_overrides_apply() {
    let cfg = planted();
    let o = ranksim(&[
        "attack",
        "--config",
        path(&cfg),
        "--doc-id",
        "0",
        "--measure",
        "jaccard",
        "--tau",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("measure: jaccard\n"));
    assert!(stdout(&o).contains("tau: 0.100000\n"));
}

fn experiment(dir: &Path, extra: &[&str]) -> (String, String) {
    let cfg = fixtures().join("experiment.toml");
    let mut args = vec![
        "experiment",
        "--config",
        path(&cfg),
        "--output-dir",
        path(dir),
    ];
    args.extend_from_slice(extra);
    let o = ranksim(&args);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    (
        fs::read_to_string(dir.join("runrecords.csv")).unwrap(),
        fs::read_to_string(dir.join("aggregate.csv")).unwrap(),
    )
}

#[test]
fn experiment_writes_recomputable_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let measures = ["--measure", "kendall,rbo", "--tau", "0.3,0.6"];
    let (runs, agg) = experiment(&out, &measures);

    assert_eq!(runs.lines().next(), Some(RUN_RECORD_HEADER));
    assert_eq!(agg.lines().next(), Some(AGGREGATE_HEADER));
    // 30 documents, 4 measures, 2 thresholds
    assert_eq!(runs.lines().count(), 1 + 30 * 4 * 2);
    assert_eq!(agg.lines().count(), 1 + 4 * 2);

    let records = parse_run_records(&runs).unwrap();
    assert_eq!(render_aggregate_csv(&aggregate(&records).unwrap()), agg);

    let rows: Vec<Vec<&str>> = agg
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    for pair in rows.chunks(2) {
        assert_eq!(pair[0][0], pair[1][0]);
        assert_eq!((pair[0][1], pair[1][1]), ("0.300000", "0.600000"));
        let low: f64 = pair[0][2].parse().unwrap();
        let high: f64 = pair[1][2].parse().unwrap();
        assert!(high >= low, "{}", pair[0][0]);
    }

    let (runs2, agg2) = experiment(&out, &measures);
    assert_eq!((runs, agg), (runs2, agg2));
    let leftovers: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with('.'))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn experiment_rejects_bad_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixtures().join("experiment.toml");
    let o = Command::new(env!("CARGO_BIN_EXE_ranksim"))
        .args([
            "experiment",
            "--config",
            path(&cfg),
            "--output-dir",
            path(dir.path()),
        ])
        .env("RANKSIM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("runrecords.csv").exists());
}

#[test]
fn baseline_kendall_is_less_stable_than_rbo() {
    let cfg = fixtures().join("experiment.toml");
    let o = ranksim(&[
        "baseline",
        "--config",
        path(&cfg),
        "--measure",
        "jaccard,kendall,rbo",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mean = |m: &str| -> f64 {
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("{m},")))
            .unwrap();
        line.split(',').nth(1).unwrap().parse().unwrap()
    };
    assert_eq!(mean("jaccard"), 1.0);
    assert!(mean("kendall") < mean("rbo_0.5"));
    // frozen on the bundled corpus with seed 42 and 5 repetitions
    assert!(
        (mean("kendall") - 0.234303).abs() < 1e-6,
        "{}",
        mean("kendall")
    );
    assert!(
        (mean("rbo_0.5") - 0.857890).abs() < 1e-6,
        "{}",
        mean("rbo_0.5")
    );
}
