use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use goa_ids::dataset::{
    apply_normalize, category_table_version, encode, fit_encoding, fit_normalize, map_label,
    parse_kdd_str, stratified_split_indices, stratified_subsample_indices, AttackClass,
    DatasetError, RawRecord, FEATURE_NAMES,
};
use goa_ids::evaluation::{cross_validate, CvError, CvReport, METRIC_NAMES};
use goa_ids::optimizer::{self, FeatureMask, GoaConfig, RunError};
use goa_ids::seed::derive_seed;
use goa_ids::selection::{SelectionError, WrapperObjective};
use goa_ids::{synthetic, SvmConfig};
use serde_json::json;

use crate::config::{sha256_hex, RunConfig};
use crate::{svg, CliError, VERSION};

/// File-name prefixes of each stage's artifacts. Files still being written
/// carry an extra `.partial` suffix.
pub const STAGE_PREFIXES: [&str; 3] = ["prepare.", "select.", "evaluate."];

const RECORDS: &str = "prepare.records.txt";
const CONFIG_FILE: &str = "config.resolved.txt";

fn data_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn cv_err(e: CvError) -> CliError {
    fn is_data(e: &CvError) -> bool {
        match e {
            CvError::Dataset(_) => true,
            CvError::Fold { source, .. } => is_data(source),
            _ => false,
        }
    }
    match &e {
        CvError::Config(_) => CliError::Config(e.to_string()),
        _ if is_data(&e) => CliError::Data(e.to_string()),
        _ => CliError::Runtime(e.to_string()),
    }
}

/// Comment header embedding the tool version and config digest.
fn header(cfg: &RunConfig) -> String {
    format!("# goa-ids {VERSION}\n# config_digest={}\n", cfg.digest())
}

/// Writes `name` under `dir` via a `.partial` file and a rename, so a crash
/// never leaves a truncated file under the final name.
fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let target = dir.join(name);
    let partial = dir.join(format!("{name}.partial"));
    fs::write(&partial, contents).map_err(|e| io_err(&partial, e))?;
    fs::rename(&partial, &target).map_err(|e| io_err(&target, e))?;
    Ok(target)
}

fn ensure_out(cfg: &RunConfig) -> Result<(), CliError> {
    fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;
    let text = format!("{}{}", header(cfg), cfg.to_text());
    write_artifact(&cfg.out, CONFIG_FILE, &text)?;
    Ok(())
}

fn check_labels(records: &[RawRecord], path: &Path) -> Result<Vec<usize>, CliError> {
    records
        .iter()
        .enumerate()
        .map(|(i, r)| {
            map_label(&r.label)
                .map(AttackClass::index)
                .map_err(|e| data_err(path, format!("record {}: {e}", i + 1)))
        })
        .collect()
}

/// Reads the input, subsamples, fits the preprocessing and writes the
/// prepared records plus inspection artifacts.
pub fn prepare(cfg: &RunConfig) -> Result<(), CliError> {
    let path = cfg.data.clone().ok_or_else(|| {
        CliError::Config("no input file: pass --data or set data= in the config".into())
    })?;
    let text = fs::read_to_string(&path).map_err(|e| data_err(&path, e))?;
    let source = parse_kdd_str(&text).map_err(|e| data_err(&path, e))?;
    if source.is_empty() {
        return Err(data_err(&path, "no records"));
    }
    let labels = check_labels(&source, &path)?;
    ensure_out(cfg)?;

    let seed = derive_seed(cfg.seed, "prepare");
    let records: Vec<RawRecord> = if cfg.subsample > 0 && cfg.subsample < source.len() {
        stratified_subsample_indices(&labels, AttackClass::ALL.len(), cfg.subsample, seed)
            .map_err(|e| data_err(&path, e))?
            .into_iter()
            .map(|i| source[i].clone())
            .collect()
    } else {
        if cfg.subsample > source.len() {
            eprintln!(
                "note: subsample {} exceeds the {} available rows; using all of them",
                cfg.subsample,
                source.len()
            );
        }
        source.clone()
    };

    let mut table = fit_encoding(&records).map_err(|e| data_err(&path, e))?;
    table.set_fitted_on(format!("{} prepared rows", records.len()));
    let encoded = encode(&records, &table).map_err(|e| data_err(&path, e))?;
    let stats = fit_normalize(&encoded);
    let normalized = apply_normalize(&encoded, &stats).map_err(|e| data_err(&path, e))?;

    let head = header(cfg);
    let mut kdd = head.clone();
    for r in &records {
        kdd.push_str(&r.to_line());
        kdd.push('\n');
    }
    write_artifact(&cfg.out, RECORDS, &kdd)?;

    let mut matrix = head.clone();
    let names: Vec<&str> = if normalized.n_features() == FEATURE_NAMES.len() {
        FEATURE_NAMES.to_vec()
    } else {
        Vec::new()
    };
    if names.is_empty() {
        let cols: Vec<String> = (0..normalized.n_features())
            .map(|i| format!("f{i}"))
            .collect();
        matrix.push_str(&cols.join(","));
    } else {
        matrix.push_str(&names.join(","));
    }
    matrix.push_str(",class\n");
    for (row, &label) in normalized.rows().zip(normalized.labels()) {
        for v in row {
            let _ = write!(matrix, "{v},");
        }
        matrix.push_str(&normalized.class_names()[label]);
        matrix.push('\n');
    }
    write_artifact(&cfg.out, "prepare.matrix.csv", &matrix)?;
    write_artifact(
        &cfg.out,
        "prepare.encoding.txt",
        &format!("{head}{}", table.to_key_value()),
    )?;
    write_artifact(
        &cfg.out,
        "prepare.normstats.txt",
        &format!("{head}{}", stats.to_key_value()),
    )?;

    let counts = normalized.class_counts();
    let mut hist = format!("{head}class,count\n");
    for (name, c) in normalized.class_names().iter().zip(&counts) {
        let _ = writeln!(hist, "{name},{c}");
    }
    write_artifact(&cfg.out, "prepare.histogram.csv", &hist)?;

    let summary = json!({
        "tool_version": VERSION,
        "config_digest": cfg.digest(),
        "source": path.display().to_string(),
        "source_sha256": sha256_hex(text.as_bytes()),
        "source_rows": source.len(),
        "rows": records.len(),
        "features": normalized.n_features(),
        "category_table_version": category_table_version(),
        "class_counts": normalized.class_names().iter().cloned().zip(counts.iter().copied()).collect::<BTreeMap<_, _>>(),
    });
    write_artifact(
        &cfg.out,
        "prepare.summary.json",
        &format!(
            "{}\n",
            serde_json::to_string_pretty(&summary).expect("json")
        ),
    )?;
    println!(
        "prepared {} rows, {} features (from {} source rows) -> {}",
        records.len(),
        normalized.n_features(),
        source.len(),
        cfg.out.display()
    );
    Ok(())
}

fn load_prepared(cfg: &RunConfig) -> Result<(Vec<RawRecord>, String), CliError> {
    let path = cfg.out.join(RECORDS);
    let text = fs::read_to_string(&path).map_err(|e| {
        CliError::Data(format!(
            "{}: {e} (run `goa-ids prepare` with the same --out first)",
            path.display()
        ))
    })?;
    let records = parse_kdd_str(&text).map_err(|e| data_err(&path, e))?;
    if records.is_empty() {
        return Err(data_err(&path, "no records"));
    }
    check_labels(&records, &path)?;
    Ok((records, sha256_hex(text.as_bytes())))
}

fn selection_err(e: RunError<SelectionError>) -> CliError {
    match e {
        RunError::Config(m) => CliError::Config(m),
        RunError::Objective { mask, source } => match source {
            SelectionError::Dataset(d) => CliError::Data(d.to_string()),
            other => CliError::Runtime(format!("fitness failed on mask {mask}: {other}")),
        },
    }
}

fn dataset_err(e: DatasetError) -> CliError {
    CliError::Data(e.to_string())
}

/// Feature selection on all prepared rows: the swarm scores masks on a
/// stratified validation split of them.
pub fn select(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let (records, _) = load_prepared(cfg)?;
    ensure_out(cfg)?;
    let seed = derive_seed(cfg.seed, "select");

    let table = fit_encoding(&records).map_err(dataset_err)?;
    let encoded = encode(&records, &table).map_err(dataset_err)?;
    let data = apply_normalize(&encoded, &fit_normalize(&encoded)).map_err(dataset_err)?;
    let (fit_idx, valid_idx) = stratified_split_indices(
        data.labels(),
        data.n_classes(),
        cfg.validation_fraction,
        derive_seed(seed, "validation"),
    )
    .map_err(dataset_err)?;
    let train = data.select(&fit_idx);
    let valid = data.select(&valid_idx);
    let objective = WrapperObjective::new(
        &train,
        &valid,
        SvmConfig {
            epochs: cfg.fitness_epochs,
            ..cfg.svm()
        },
        derive_seed(seed, "fitness"),
        AttackClass::Normal.index(),
    );
    let goa = GoaConfig {
        dim: data.n_features(),
        seed: derive_seed(seed, "goa"),
        ..cfg.goa()
    };
    let outcome = optimizer::run(&objective, &goa).map_err(selection_err)?;
    let all = objective
        .breakdown(&FeatureMask::all(data.n_features()))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let best = objective
        .breakdown(&outcome.best_mask)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let head = header(cfg);
    let selected: Vec<String> = outcome
        .best_mask
        .selected()
        .into_iter()
        .map(|i| {
            FEATURE_NAMES
                .get(i)
                .map_or_else(|| format!("f{i}"), |s| s.to_string())
        })
        .collect();
    let stop = serde_json::to_value(outcome.stop).expect("json");
    let mask_text = format!(
        "{head}mask={}\npopcount={}\nbest_fitness={}\nr_tp={}\nr_e={}\nall_features_fitness={}\niterations={}\nstop={}\ndistinct_masks_evaluated={}\nselected={}\n",
        outcome.best_mask,
        outcome.best_mask.popcount(),
        outcome.best_fitness,
        best.r_tp,
        best.r_e,
        all.fitness,
        outcome.history.len(),
        stop.as_str().unwrap_or_default(),
        objective.distinct_evaluations(),
        selected.join(","),
    );
    write_artifact(&cfg.out, "select.mask.txt", &mask_text)?;
    write_artifact(
        &cfg.out,
        "select.history.csv",
        &format!("{head}{}", outcome.history_csv()),
    )?;
    if cfg.plots {
        let points: Vec<(f64, f64)> = outcome
            .history
            .iter()
            .map(|r| (r.iteration as f64, r.best_fitness))
            .collect();
        let chart = svg::line_chart(
            "Best fitness per iteration",
            "iteration",
            "best fitness",
            &points,
            &svg_comment(cfg),
        );
        write_artifact(&cfg.out, "select.convergence.svg", &chart)?;
    }
    println!(
        "selected {} of {} features, fitness {:.4} (all features {:.4}) after {} iterations",
        outcome.best_mask.popcount(),
        outcome.best_mask.len(),
        outcome.best_fitness,
        all.fitness,
        outcome.history.len()
    );
    println!("mask {}", outcome.best_mask);
    Ok(())
}

fn svg_comment(cfg: &RunConfig) -> String {
    format!("goa-ids {VERSION}; config_digest={}", cfg.digest())
}

/// Cross-validates the full pipeline on the prepared rows.
pub fn evaluate(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let (records, records_sha) = load_prepared(cfg)?;
    ensure_out(cfg)?;
    let cv = cfg.cv(derive_seed(cfg.seed, "evaluate"));
    let mut report = cross_validate(&records, &cv, None).map_err(cv_err)?;
    report
        .metadata
        .insert("tool_version".into(), VERSION.into());
    report.metadata.insert("config_digest".into(), cfg.digest());
    report.metadata.insert("records_sha256".into(), records_sha);
    report.metadata.insert(
        "category_table_version".into(),
        category_table_version().to_string(),
    );
    write_artifact(&cfg.out, "evaluate.report.json", &report.to_json())?;

    let head = header(cfg);
    write_artifact(
        &cfg.out,
        "evaluate.confusion.csv",
        &format!("{head}{}", confusion_csv(&report)),
    )?;
    let mut timings = format!("{head}fold,wall_time_secs\n");
    for (i, t) in report.wall_times().iter().enumerate() {
        let _ = writeln!(timings, "{i},{t:.3}");
    }
    write_artifact(&cfg.out, "evaluate.timings.csv", &timings)?;

    if cfg.plots {
        for metric in METRIC_NAMES {
            let bars = metric_bars(&report, metric);
            let chart = svg::bar_chart(
                &format!(
                    "{} by class (mean over {} folds)",
                    metric.to_uppercase(),
                    report.k
                ),
                metric,
                &bars,
                &svg_comment(cfg),
            );
            write_artifact(&cfg.out, &format!("evaluate.{metric}.svg"), &chart)?;
        }
    }

    let m = |name: &str| report.macro_summary.get(name).map_or(f64::NAN, |s| s.mean);
    let p = |name: &str| report.pooled_summary.get(name).map_or(f64::NAN, |s| s.mean);
    println!(
        "{}-fold macro: accuracy {:.4} tpr {:.4} fpr {:.4}; attack-vs-normal: tpr {:.4} fpr {:.4}",
        report.k,
        m("accuracy"),
        m("tpr"),
        m("fpr"),
        p("tpr"),
        p("fpr")
    );
    let pops: Vec<String> = report
        .folds
        .iter()
        .map(|f| f.popcount.to_string())
        .collect();
    println!("selected features per fold: {}", pops.join(" "));
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

/// Per-fold and summed confusion tables.
fn confusion_csv(report: &CvReport) -> String {
    let mut out = String::from("fold,class,tp,fn,fp,tn\n");
    let mut totals: BTreeMap<(usize, String), [u64; 4]> = BTreeMap::new();
    for f in &report.folds {
        let mut rows: Vec<(String, goa_ids::ConfusionCounts)> = f
            .metrics
            .per_class
            .iter()
            .map(|c| (c.class.clone(), c.confusion))
            .collect();
        if let Some(p) = &f.metrics.pooled {
            rows.push((format!("attack_vs_{}", p.negative_class), p.confusion));
        }
        for (order, (class, k)) in rows.into_iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{class},{},{},{},{}",
                f.fold, k.tp, k.fn_, k.fp, k.tn
            );
            let t = totals.entry((order, class)).or_default();
            t[0] += k.tp;
            t[1] += k.fn_;
            t[2] += k.fp;
            t[3] += k.tn;
        }
    }
    for ((_, class), t) in totals {
        let _ = writeln!(out, "all,{class},{},{},{},{}", t[0], t[1], t[2], t[3]);
    }
    out
}

/// Per-class means over folds where the class was present, then the macro
/// average and the pooled attack-vs-normal value.
fn metric_bars(report: &CvReport, metric: &str) -> Vec<(String, f64)> {
    let mut bars = Vec::new();
    if let Some(first) = report.folds.first() {
        for (k, class) in first.metrics.per_class.iter().enumerate() {
            let vals: Vec<f64> = report
                .folds
                .iter()
                .map(|f| &f.metrics.per_class[k])
                .filter(|c| c.support > 0)
                .filter_map(|c| c.rates.get(metric))
                .collect();
            if !vals.is_empty() {
                bars.push((
                    class.class.clone(),
                    vals.iter().sum::<f64>() / vals.len() as f64,
                ));
            }
        }
    }
    if let Some(s) = report.macro_summary.get(metric) {
        bars.push(("Macro avg".into(), s.mean));
    }
    if let Some(s) = report.pooled_summary.get(metric) {
        bars.push(("Attack vs Normal".into(), s.mean));
    }
    bars
}

/// `prepare`, `select` and `evaluate` in sequence.
pub fn pipeline(cfg: &RunConfig) -> Result<(), CliError> {
    prepare(cfg)?;
    select(cfg)?;
    evaluate(cfg)
}

pub(crate) fn synth(out: &Path, rows: usize, seed: u64) -> Result<(), CliError> {
    if rows == 0 {
        return Err(CliError::Config("rows must be positive".into()));
    }
    let records = synthetic::generate(rows, seed);
    let text = format!(
        "# synthetic records in NSL-KDD format (goa-ids {VERSION}, seed {seed}); not real traffic\n{}",
        synthetic::to_kdd_text(&records)
    );
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let name = out
        .file_name()
        .ok_or_else(|| CliError::Config(format!("{} is not a file path", out.display())))?
        .to_string_lossy()
        .into_owned();
    let dir = out
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    write_artifact(dir, &name, &text)?;
    println!("wrote {rows} synthetic records to {}", out.display());
    Ok(())
}
