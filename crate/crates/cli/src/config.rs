//! Run configuration: defaults, a flat `key=value` file format, and a digest
//! identifying the settings that influence results.

use std::fmt::Write as _;
use std::path::PathBuf;

use goa_ids::classifier::SvmConfig;
use goa_ids::evaluation::CvConfig;
use goa_ids::GoaConfig;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Every setting of a run. A persisted config replays the run exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// NSL-KDD style input file.
    pub data: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub folds: usize,
    /// Stratified subsample size; 0 keeps every row.
    pub subsample: usize,
    pub pop: usize,
    pub iters: usize,
    pub delta_stop: f64,
    pub c_max: f64,
    pub c_min: f64,
    pub s_f: f64,
    pub s_l: f64,
    pub swap_prob: f64,
    pub rev_prob: f64,
    pub svm_c: f64,
    pub epochs: usize,
    pub eta0: f64,
    pub fitness_epochs: usize,
    pub validation_fraction: f64,
    /// Worker threads; 0 uses every available processor.
    pub threads: usize,
    pub plots: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let goa = GoaConfig::default();
        let svm = SvmConfig::default();
        let cv = CvConfig::default();
        Self {
            data: None,
            out: PathBuf::from("goa-ids-out"),
            seed: 0,
            folds: cv.k,
            subsample: 0,
            pop: goa.population_size,
            iters: goa.max_iterations,
            delta_stop: goa.fitness_delta_stop,
            c_max: goa.c_max,
            c_min: goa.c_min,
            s_f: goa.s_f,
            s_l: goa.s_l,
            swap_prob: goa.swap_prob,
            rev_prob: goa.reversion_prob,
            svm_c: svm.c,
            epochs: svm.epochs,
            eta0: svm.eta0,
            fitness_epochs: cv.fitness_epochs,
            validation_fraction: cv.validation_fraction,
            threads: 0,
            plots: true,
        }
    }
}

/// Keys accepted in config files, with one-line descriptions, in file order.
pub const KEYS: [(&str, &str); 21] = [
    ("data", "input file in NSL-KDD format"),
    ("out", "output directory"),
    ("seed", "master seed"),
    ("folds", "cross-validation folds"),
    ("subsample", "stratified subsample size, 0 = all rows"),
    ("pop", "grasshopper population size"),
    ("iters", "maximum optimizer iterations"),
    (
        "delta_stop",
        "stop when the best fitness changes by less than this, 0 = off",
    ),
    ("c_max", "initial comfort-zone coefficient"),
    ("c_min", "final comfort-zone coefficient"),
    ("s_f", "attraction intensity of the social kernel"),
    ("s_l", "attractive length scale of the social kernel"),
    ("swap_prob", "per-member SWAP mutation probability"),
    ("rev_prob", "per-member Reversion mutation probability"),
    ("svm_c", "SVM regularization constant C"),
    ("epochs", "SVM training epochs for the final classifier"),
    ("eta0", "SVM initial step size"),
    (
        "fitness_epochs",
        "SVM training epochs inside the fitness function",
    ),
    (
        "validation_fraction",
        "share of training rows held out to score masks",
    ),
    ("threads", "worker threads, 0 = all processors"),
    ("plots", "write SVG plots (true/false)"),
];

/// Keys that do not influence any computed number.
const PRESENTATION_KEYS: [&str; 3] = ["out", "threads", "plots"];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value {value:?} for {key}")))
}

impl RunConfig {
    /// Sets one key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "data" => self.data = (!value.is_empty()).then(|| PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = parse(key, value)?,
            "folds" => self.folds = parse(key, value)?,
            "subsample" => self.subsample = parse(key, value)?,
            "pop" => self.pop = parse(key, value)?,
            "iters" => self.iters = parse(key, value)?,
            "delta_stop" => self.delta_stop = parse(key, value)?,
            "c_max" => self.c_max = parse(key, value)?,
            "c_min" => self.c_min = parse(key, value)?,
            "s_f" => self.s_f = parse(key, value)?,
            "s_l" => self.s_l = parse(key, value)?,
            "swap_prob" => self.swap_prob = parse(key, value)?,
            "rev_prob" => self.rev_prob = parse(key, value)?,
            "svm_c" => self.svm_c = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "eta0" => self.eta0 = parse(key, value)?,
            "fitness_epochs" => self.fitness_epochs = parse(key, value)?,
            "validation_fraction" => self.validation_fraction = parse(key, value)?,
            "threads" => self.threads = parse(key, value)?,
            "plots" => self.plots = parse(key, value)?,
            _ => return Err(CliError::Config(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    /// Text form of one key, as written by [`RunConfig::to_text`].
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "data" => self
                .data
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            "out" => self.out.display().to_string(),
            "seed" => self.seed.to_string(),
            "folds" => self.folds.to_string(),
            "subsample" => self.subsample.to_string(),
            "pop" => self.pop.to_string(),
            "iters" => self.iters.to_string(),
            "delta_stop" => self.delta_stop.to_string(),
            "c_max" => self.c_max.to_string(),
            "c_min" => self.c_min.to_string(),
            "s_f" => self.s_f.to_string(),
            "s_l" => self.s_l.to_string(),
            "swap_prob" => self.swap_prob.to_string(),
            "rev_prob" => self.rev_prob.to_string(),
            "svm_c" => self.svm_c.to_string(),
            "epochs" => self.epochs.to_string(),
            "eta0" => self.eta0.to_string(),
            "fitness_epochs" => self.fitness_epochs.to_string(),
            "validation_fraction" => self.validation_fraction.to_string(),
            "threads" => self.threads.to_string(),
            "plots" => self.plots.to_string(),
            _ => return None,
        })
    }

    /// Applies a `key=value` document on top of `self`.
    ///
    /// Blank lines and `#` comments are ignored; unknown keys and malformed
    /// lines are errors.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key=value, got {line:?}", i + 1))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// All keys in schema order, one `key=value` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, _) in KEYS {
            let _ = writeln!(out, "{key}={}", self.get(key).expect("schema key"));
        }
        out
    }

    /// SHA-256 over the result-relevant keys, as lowercase hex.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for (key, _) in KEYS {
            if PRESENTATION_KEYS.contains(&key) {
                continue;
            }
            hasher.update(format!("{key}={}\n", self.get(key).expect("schema key")));
        }
        hex(&hasher.finalize())
    }

    pub fn goa(&self) -> GoaConfig {
        GoaConfig {
            population_size: self.pop,
            max_iterations: self.iters,
            fitness_delta_stop: self.delta_stop,
            c_max: self.c_max,
            c_min: self.c_min,
            s_f: self.s_f,
            s_l: self.s_l,
            swap_prob: self.swap_prob,
            reversion_prob: self.rev_prob,
            ..GoaConfig::default()
        }
    }

    pub fn svm(&self) -> SvmConfig {
        SvmConfig {
            c: self.svm_c,
            epochs: self.epochs,
            eta0: self.eta0,
            ..SvmConfig::default()
        }
    }

    pub fn cv(&self, seed: u64) -> CvConfig {
        CvConfig {
            k: self.folds,
            goa: self.goa(),
            svm: self.svm(),
            fitness_epochs: self.fitness_epochs,
            validation_fraction: self.validation_fraction,
            seed,
        }
    }

    /// Checks everything that can be checked before reading data.
    pub fn validate(&self) -> Result<(), CliError> {
        self.goa().validate().map_err(CliError::Config)?;
        self.svm()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if self.folds < 2 {
            return Err(CliError::Config(format!(
                "folds = {}; need at least 2",
                self.folds
            )));
        }
        if self.fitness_epochs == 0 {
            return Err(CliError::Config("fitness_epochs must be at least 1".into()));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(CliError::Config(format!(
                "validation_fraction = {} outside (0,1)",
                self.validation_fraction
            )));
        }
        Ok(())
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// SHA-256 of arbitrary bytes, as lowercase hex.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}
