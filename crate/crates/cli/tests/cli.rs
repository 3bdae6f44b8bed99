use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_goa-ids"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn synth(dir: &Path, rows: usize) -> String {
    let data = dir.join("data.txt");
    let (code, _, err) = run(&[
        "synth",
        "--out",
        data.to_str().unwrap(),
        "--rows",
        &rows.to_string(),
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0, "{err}");
    data.to_str().unwrap().to_string()
}

const FAST: [&str; 6] = ["--folds", "3", "--pop", "6", "--iters", "4"];

fn pipeline(data: &str, out: &Path, extra: &[&str]) -> (i32, String, String) {
    let mut args = vec!["pipeline", "--data", data, "--out", out.to_str().unwrap()];
    args.extend_from_slice(&FAST);
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn pipeline_writes_every_stage_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 1_500);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let (code, stdout, err) = pipeline(&data, &a, &[]);
    assert_eq!(code, 0, "{err}");
    assert!(
        stdout.contains("prepared 1500 rows, 41 features"),
        "{stdout}"
    );
    assert_eq!(pipeline(&data, &b, &["--threads", "2"]).0, 0);

    for name in [
        "config.resolved.txt",
        "prepare.records.txt",
        "prepare.matrix.csv",
        "prepare.encoding.txt",
        "prepare.normstats.txt",
        "prepare.histogram.csv",
        "prepare.summary.json",
        "select.mask.txt",
        "select.history.csv",
        "select.convergence.svg",
        "evaluate.report.json",
        "evaluate.confusion.csv",
        "evaluate.timings.csv",
        "evaluate.accuracy.svg",
        "evaluate.tpr.svg",
        "evaluate.fpr.svg",
        "evaluate.tnr.svg",
        "evaluate.fnr.svg",
    ] {
        let pa = a.join(name);
        assert!(pa.exists(), "missing {name}");
        if name != "evaluate.timings.csv" && name != "config.resolved.txt" {
            assert_eq!(
                fs::read(&pa).unwrap(),
                fs::read(b.join(name)).unwrap(),
                "{name} differs"
            );
        }
        let text = fs::read_to_string(&pa).unwrap();
        assert!(
            text.contains("config_digest"),
            "{name} lacks the config digest"
        );
    }
    assert!(fs::read_dir(&a).unwrap().all(|e| !e
        .unwrap()
        .file_name()
        .to_string_lossy()
        .ends_with(".partial")));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.join("evaluate.report.json")).unwrap()).unwrap();
    assert_eq!(report["folds"].as_array().unwrap().len(), 3);
    assert_eq!(report["macro_summary"].as_object().unwrap().len(), 5);
    assert_eq!(
        report["metadata"]["tool_version"],
        env!("CARGO_PKG_VERSION")
    );

    let mask = fs::read_to_string(a.join("select.mask.txt")).unwrap();
    let bits = mask.lines().find_map(|l| l.strip_prefix("mask=")).unwrap();
    assert_eq!(bits.len(), 41);
    assert!(bits.contains('1'));
    let history = fs::read_to_string(a.join("select.history.csv")).unwrap();
    let rows = history.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert!((1..=4).contains(&rows));

    for entry in fs::read_dir(&a).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "svg") {
            let text = fs::read_to_string(&path).unwrap();
            let doc = roxmltree::Document::parse(&text).unwrap();
            assert_eq!(doc.root_element().tag_name().name(), "svg");
            assert!(!text.contains("href"), "{}", path.display());
        }
    }
}

#[test]
fn persisted_config_replays_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 1_200);
    let a = tmp.path().join("a");
    assert_eq!(pipeline(&data, &a, &["--seed", "5", "--no-plots"]).0, 0);
    let b = tmp.path().join("b");
    let cfg = a.join("config.resolved.txt");
    let (code, _, err) = run(&[
        "pipeline",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(
        fs::read(a.join("evaluate.report.json")).unwrap(),
        fs::read(b.join("evaluate.report.json")).unwrap()
    );
}

#[test]
fn no_plots_writes_no_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 800);
    let out = tmp.path().join("o");
    assert_eq!(pipeline(&data, &out, &["--no-plots"]).0, 0);
    assert!(fs::read_dir(&out).unwrap().all(|e| e
        .unwrap()
        .path()
        .extension()
        .is_none_or(|x| x != "svg")));
}

#[test]
fn stages_can_run_separately() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 900);
    let out = tmp.path().join("o");
    let o = out.to_str().unwrap();
    assert_eq!(
        run(&["prepare", "--data", &data, "--out", o, "--subsample", "600"]).0,
        0
    );
    let hist = fs::read_to_string(out.join("prepare.histogram.csv")).unwrap();
    let total: usize = hist
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("class"))
        .map(|l| l.rsplit(',').next().unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 600);
    let before = fs::read(out.join("prepare.records.txt")).unwrap();
    assert_eq!(
        run(&["prepare", "--data", &data, "--out", o, "--subsample", "600"]).0,
        0
    );
    assert_eq!(before, fs::read(out.join("prepare.records.txt")).unwrap());

    let mut args = vec!["select", "--out", o];
    args.extend_from_slice(&FAST);
    assert_eq!(run(&args).0, 0);
    args[0] = "evaluate";
    assert_eq!(run(&args).0, 0);
}

#[test]
fn exit_codes_follow_the_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let t = tmp.path();
    let out = t.join("o");
    let o = out.to_str().unwrap();

    let (code, _, err) = run(&[
        "prepare",
        "--data",
        t.join("nope.txt").to_str().unwrap(),
        "--out",
        o,
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("nope.txt"), "{err}");

    assert_eq!(run(&["prepare", "--frobnicate"]).0, 1);
    assert_eq!(run(&[]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["select", "--out", o, "--pop", "1"]).0, 1);
    assert_eq!(run(&["select", "--out", o, "--c-min", "2"]).0, 1);
    assert_eq!(run(&["select", "--out", o]).0, 2);

    let cfg = t.join("bad.cfg");
    fs::write(&cfg, "seed=1\npopulation=4\n").unwrap();
    let (code, _, err) = run(&["prepare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("population"), "{err}");

    let bad = t.join("bad.txt");
    fs::write(&bad, "0,tcp,http,SF,1,2\n").unwrap();
    let (code, _, err) = run(&["prepare", "--data", bad.to_str().unwrap(), "--out", o]);
    assert_eq!(code, 2);
    assert!(err.contains("line 1"), "{err}");

    let label = t.join("label.txt");
    let line = "0,tcp,http,SF,1,2,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1,1,0,0,0,0,1,0,0,1,1,1,0,0,0,0,0,0,0,martian,1\n";
    fs::write(&label, line).unwrap();
    assert_eq!(
        run(&["prepare", "--data", label.to_str().unwrap(), "--out", o]).0,
        2
    );
}
