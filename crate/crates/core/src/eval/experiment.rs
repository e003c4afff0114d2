use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::similarity::{covering_bounds, marginal_similarity};
use super::tree::{downstream_accuracy, EvalClassifier};
use crate::data::{Bounds, SchemaFile, Table, DEFAULT_BINS};
use crate::engine::fit;
use crate::error::{Error, Result};
use crate::instances::InstanceKind;

pub const DEFAULT_EPSILONS: [f64; 6] = [0.01, 0.1, 1.0, 10.0, 100.0, 1000.0];
pub const DEFAULT_RUNS: usize = 5;
pub const TEST_FRACTION: f64 = 0.2;
pub const BASELINE: &str = "real";

fn default_engines() -> Vec<InstanceKind> {
    InstanceKind::ALL.to_vec()
}

fn default_epsilons() -> Vec<f64> {
    DEFAULT_EPSILONS.to_vec()
}

fn default_runs() -> usize {
    DEFAULT_RUNS
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

/// The sweep itself, independent of where the data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    #[serde(default = "default_engines")]
    pub engines: Vec<InstanceKind>,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_runs")]
    pub fits: usize,
    #[serde(default = "default_runs")]
    pub generations: usize,
    #[serde(default)]
    pub master_seed: u64,
    pub target: String,
    #[serde(default)]
    pub classifier: EvalClassifier,
    #[serde(default = "default_bins")]
    pub n_bins: usize,
}

impl Sweep {
    pub fn new(target: &str, master_seed: u64) -> Self {
        Self {
            engines: default_engines(),
            epsilons: default_epsilons(),
            fits: DEFAULT_RUNS,
            generations: DEFAULT_RUNS,
            master_seed,
            target: target.to_string(),
            classifier: EvalClassifier::default(),
            n_bins: DEFAULT_BINS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.engines.is_empty() {
            return Err(Error::InvalidSpec("engines: at least one engine is required".into()));
        }
        if self.epsilons.is_empty() {
            return Err(Error::InvalidSpec("epsilons: at least one value is required".into()));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::InvalidSpec(format!(
                "epsilons: {e} is not a positive finite number"
            )));
        }
        if self.fits == 0 || self.generations == 0 {
            return Err(Error::InvalidSpec("fits and generations must be positive".into()));
        }
        if self.n_bins == 0 {
            return Err(Error::InvalidSpec("n_bins must be positive".into()));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.engines.len() * self.epsilons.len() * self.fits * self.generations + 1
    }
}

/// Experiment config file: data and schema paths plus the sweep fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub data: PathBuf,
    pub schema: PathBuf,
    #[serde(flatten)]
    pub sweep: Sweep,
}

impl ExperimentConfig {
    /// Relative paths are resolved against `base` (normally the config's directory).
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("experiment config: {e}")))?;
        if let Some(base) = base {
            cfg.data = base.join(&cfg.data);
            cfg.schema = base.join(&cfg.schema);
        }
        cfg.sweep.validate()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path)?, path.parent())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub engine: String,
    pub epsilon: Option<f64>,
    pub fit: Option<usize>,
    pub gen: Option<usize>,
    pub similarity: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub engine: String,
    pub epsilon: f64,
    pub runs: usize,
    pub similarity_mean: f64,
    pub similarity_std: f64,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub baseline_similarity: f64,
    pub baseline_accuracy: f64,
    pub cells: Vec<CellSummary>,
}

/// First row is the real-data baseline, then engine × epsilon × fit × generation.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub rows: Vec<MetricRow>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl MetricReport {
    pub fn baseline(&self) -> Option<&MetricRow> {
        self.rows.iter().find(|r| r.engine == BASELINE)
    }

    pub fn cell(&self, engine: &str, epsilon: f64) -> impl Iterator<Item = &MetricRow> {
        let engine = engine.to_string();
        self.rows
            .iter()
            .filter(move |r| r.engine == engine && r.epsilon == Some(epsilon))
    }

    pub fn summary(&self) -> Summary {
        let base = self.baseline();
        let mut cells: Vec<CellSummary> = Vec::new();
        for r in &self.rows {
            let Some(eps) = r.epsilon else { continue };
            if cells.iter().any(|c| c.engine == r.engine && c.epsilon == eps) {
                continue;
            }
            let (sim, acc): (Vec<f64>, Vec<f64>) =
                self.cell(&r.engine, eps).map(|r| (r.similarity, r.accuracy)).unzip();
            let (similarity_mean, similarity_std) = mean_std(&sim);
            let (accuracy_mean, accuracy_std) = mean_std(&acc);
            cells.push(CellSummary {
                engine: r.engine.clone(),
                epsilon: eps,
                runs: sim.len(),
                similarity_mean,
                similarity_std,
                accuracy_mean,
                accuracy_std,
            });
        }
        Summary {
            baseline_similarity: base.map_or(f64::NAN, |b| b.similarity),
            baseline_accuracy: base.map_or(f64::NAN, |b| b.accuracy),
            cells,
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["engine", "epsilon", "fit", "gen", "similarity", "accuracy"])?;
        for r in &self.rows {
            w.write_record([
                r.engine.clone(),
                opt(&r.epsilon),
                opt(&r.fit),
                opt(&r.gen),
                r.similarity.to_string(),
                r.accuracy.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn summary_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.summary())?;
        s.push('\n');
        Ok(s)
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for the stream identified by `coords` under `master`.
pub fn cell_seed(master: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix(master), |acc, c| splitmix(acc ^ splitmix(*c)))
}

const SPLIT_STREAM: u64 = u64::MAX;

/// Seeded shuffle, first `TEST_FRACTION` of rows become the test split.
pub fn train_test_split(table: &Table, master_seed: u64) -> Result<(Table, Table)> {
    let n = table.n_rows();
    let n_test = ((n as f64) * TEST_FRACTION).round() as usize;
    if n_test == 0 || n_test == n {
        return Err(Error::InvalidArgument(format!(
            "{n} rows are too few for a train/test split"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha20Rng::seed_from_u64(cell_seed(master_seed, &[SPLIT_STREAM])));
    Ok((table.select_rows(&idx[n_test..]), table.select_rows(&idx[..n_test])))
}

/// Runs the sweep on `data`. `bounds` are handed to every engine and, completed from the
/// data, define the bins of the similarity metric.
pub fn run_sweep(data: &Table, bounds: &Bounds, sweep: &Sweep) -> Result<MetricReport> {
    sweep.validate()?;
    let (train, test) = train_test_split(data, sweep.master_seed)?;
    let eval_bounds = covering_bounds(&[data], bounds)?;
    let target = sweep.target.as_str();

    let mut rows = vec![MetricRow {
        engine: BASELINE.into(),
        epsilon: None,
        fit: None,
        gen: None,
        similarity: marginal_similarity(&train, &test, &eval_bounds, sweep.n_bins)?,
        accuracy: downstream_accuracy(&train, &test, target, sweep.classifier)?,
    }];

    let cells: Vec<(usize, usize, usize)> = (0..sweep.engines.len())
        .flat_map(|e| (0..sweep.epsilons.len()).flat_map(move |k| (0..sweep.fits).map(move |f| (e, k, f))))
        .collect();
    let results: Vec<Result<Vec<MetricRow>>> = cells
        .par_iter()
        .map(|&(e, k, f)| {
            let engine = sweep.engines[e];
            let eps = sweep.epsilons[k];
            let mut rng = ChaCha20Rng::seed_from_u64(cell_seed(sweep.master_seed, &[e as u64, k as u64, f as u64]));
            let out = fit(&train, &engine.spec(Some(eps), Some(bounds.clone())), &mut rng)?;
            for w in &out.warnings {
                log::debug!("{engine} epsilon={eps} fit={f}: {w}");
            }
            (0..sweep.generations)
                .map(|g| {
                    let synth = out.model.generate(train.n_rows(), &mut rng)?;
                    Ok(MetricRow {
                        engine: engine.name().into(),
                        epsilon: Some(eps),
                        fit: Some(f),
                        gen: Some(g),
                        similarity: marginal_similarity(&train, &synth, &eval_bounds, sweep.n_bins)?,
                        accuracy: downstream_accuracy(&synth, &test, target, sweep.classifier)?,
                    })
                })
                .collect()
        })
        .collect();
    for r in results {
        rows.extend(r?);
    }
    Ok(MetricReport { rows })
}

/// Loads the config's data and schema and runs its sweep.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MetricReport> {
    let schema = SchemaFile::read(&config.schema)?;
    let data = Table::load_csv(&config.data, &schema.schema)?;
    run_sweep(&data, &schema.bounds, &config.sweep)
}
