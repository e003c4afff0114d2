use std::path::{Path, PathBuf};

use dpart::data::{Bounds, SchemaFile, Table, DEFAULT_BINS};
use dpart::eval::adult::{adult_bounds, adult_reconstruction, TARGET};
use dpart::eval::{
    covering_bounds, downstream_accuracy, marginal_similarity, run_experiment, EvalClassifier, ExperimentConfig, Sweep,
};
use dpart::{FittedModel, InstanceKind, ModelSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use crate::output::{at, io_at, write_atomic, write_output, Failure};

fn rng(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_rng(&mut rand::rng()),
    }
}

fn read_json(path: &Path, flag: &str) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(io_at(flag))?;
    serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{flag}: {e}")))
}

/// Overlays the keys of a `--config` document on the preset spec. Setting an explicit
/// visit order or prediction matrix drops the preset's dependency mode.
fn merge_config(preset: ModelSpec, config: Value) -> Result<ModelSpec, Failure> {
    let Value::Object(overlay) = config else {
        return Err(Failure::usage("--config: expected a JSON object"));
    };
    for key in ["epsilon", "bounds"] {
        if overlay.contains_key(key) {
            return Err(Failure::usage(format!("--config: set \"{key}\" with --{key} instead")));
        }
    }
    let mut base = serde_json::to_value(&preset).map_err(|e| Failure::runtime(e.to_string()))?;
    let obj = base.as_object_mut().expect("spec serializes to an object");
    if (overlay.contains_key("visit_order") || overlay.contains_key("prediction_matrix"))
        && !overlay.contains_key("dependency")
    {
        obj.insert("dependency".into(), Value::Null);
    }
    obj.extend(overlay);
    ModelSpec::from_json(&base.to_string()).map_err(at("--config"))
}

pub struct FitArgs {
    pub data: PathBuf,
    pub schema: PathBuf,
    pub engine: InstanceKind,
    pub epsilon: Option<f64>,
    pub bounds: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

pub fn fit(args: FitArgs) -> Result<(), Failure> {
    if let Some(e) = args.epsilon {
        if !(e.is_finite() && e > 0.0) {
            return Err(Failure::usage(format!(
                "--epsilon: {e} is not a positive finite number"
            )));
        }
    }
    let schema = SchemaFile::read(&args.schema).map_err(at("--schema"))?;
    let mut bounds: Bounds = schema.bounds.clone();
    if let Some(path) = &args.bounds {
        let extra = SchemaFile::read(path).map_err(at("--bounds"))?;
        for (name, b) in extra.bounds.iter() {
            bounds.insert(name, b.clone());
        }
    }
    let given = (!bounds.is_empty()).then_some(bounds);
    let mut spec = args.engine.spec(args.epsilon, given);
    if let Some(path) = &args.config {
        spec = merge_config(spec, read_json(path, "--config")?)?;
    }
    spec.validate(&schema.schema).map_err(at("--config"))?;

    let table = Table::load_csv(&args.data, &schema.schema).map_err(at("--data"))?;
    let out = dpart::fit(&table, &spec, &mut rng(args.seed)).map_err(at("fit"))?;
    for w in &out.warnings {
        eprintln!("WARNING: {w}");
    }
    let text = out.model.to_json().map_err(at("--out"))?;
    write_atomic(&args.out, text.as_bytes())
}

pub fn generate(model: &Path, rows: usize, out: &Path, seed: Option<u64>) -> Result<(), Failure> {
    let model = FittedModel::load(model).map_err(|e| Failure::runtime(format!("--model: {e}")))?;
    let table = model.generate(rows, &mut rng(seed)).map_err(at("generate"))?;
    let csv = table.to_csv_string().map_err(at("--out"))?;
    write_output(out, csv.as_bytes())
}

pub fn evaluate(real: &Path, synth: &Path, schema: &Path, target: &str, test: Option<&Path>) -> Result<(), Failure> {
    let schema = SchemaFile::read(schema).map_err(at("--schema"))?;
    schema.schema.require(target).map_err(at("--target"))?;
    let real = Table::load_csv(real, &schema.schema).map_err(at("--real"))?;
    let synth = Table::load_csv(synth, &schema.schema).map_err(at("--synth"))?;
    let test = match test {
        Some(p) => Some(Table::load_csv(p, &schema.schema).map_err(at("--test"))?),
        None => None,
    };
    let bounds = covering_bounds(&[&real, &synth], &schema.bounds).map_err(at("--schema"))?;
    let similarity = marginal_similarity(&real, &synth, &bounds, DEFAULT_BINS).map_err(at("evaluate"))?;
    let accuracy = downstream_accuracy(
        &synth,
        test.as_ref().unwrap_or(&real),
        target,
        EvalClassifier::default(),
    )
    .map_err(at("--target"))?;
    println!("{}", json!({ "similarity": similarity, "accuracy": accuracy }));
    Ok(())
}

pub fn experiment(config: &Path, out_dir: &Path) -> Result<(), Failure> {
    let cfg = ExperimentConfig::read(config).map_err(at("--config"))?;
    std::fs::create_dir_all(out_dir).map_err(io_at("--out-dir"))?;
    log::info!("running {} report rows", cfg.sweep.n_rows());
    let report = run_experiment(&cfg).map_err(at("experiment"))?;
    write_atomic(
        &out_dir.join("report.csv"),
        report.to_csv_string().map_err(at("--out-dir"))?.as_bytes(),
    )?;
    write_atomic(
        &out_dir.join("summary.json"),
        report.summary_json().map_err(at("--out-dir"))?.as_bytes(),
    )
}

pub fn dataset(out_dir: &Path, rows: usize, seed: u64) -> Result<(), Failure> {
    if rows < 5 {
        return Err(Failure::usage(
            "--rows: at least 5 rows are needed for a train/test split",
        ));
    }
    std::fs::create_dir_all(out_dir).map_err(io_at("--out-dir"))?;
    let table = adult_reconstruction(rows, seed);
    let schema = SchemaFile {
        schema: table.schema().clone(),
        bounds: adult_bounds(),
    };
    let config = ExperimentConfig {
        data: "adult.csv".into(),
        schema: "adult.schema.json".into(),
        sweep: Sweep::new(TARGET, seed),
    };
    let mut config_text = serde_json::to_string_pretty(&config).map_err(|e| Failure::runtime(e.to_string()))?;
    config_text.push('\n');
    write_atomic(
        &out_dir.join("adult.csv"),
        table.to_csv_string().map_err(at("--out-dir"))?.as_bytes(),
    )?;
    write_atomic(
        &out_dir.join("adult.schema.json"),
        schema.to_json().map_err(at("--out-dir"))?.as_bytes(),
    )?;
    write_atomic(&out_dir.join("experiment.json"), config_text.as_bytes())
}
