use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use boson_reupload::data::{gen_circle, load_csv, save_csv};
use boson_reupload::eval::{decision_grid, evaluate, fit_threshold};
use boson_reupload::{CircuitSpec, Dataset, Error, Metrics, ProbeMode, Theta};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::{CliError, Common, EvalArgs, ExactProbe, GenDataArgs, GridArgs, TrainArgs};

/// Trained parameters as written by `train` and read by `eval` and `grid`.
#[derive(Debug, Serialize, Deserialize)]
struct ThetaFile {
    theta: Vec<f64>,
    #[serde(default = "default_threshold")]
    threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    best_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweeps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    converged: Option<bool>,
}

fn default_threshold() -> f64 {
    0.5
}

fn base_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    if let Some(dir) = &common.output_dir {
        cfg.output_dir = dir.clone();
    }
    Ok(cfg)
}

fn create_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir)
            .map_err(|e| CliError::data(format!("cannot create directory {}: {e}", dir.display()))),
        _ => Ok(()),
    }
}

fn create_file(path: &Path) -> Result<BufWriter<File>, CliError> {
    create_parent(path)?;
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

fn load_dataset(path: &Path, spec: &CircuitSpec) -> Result<Dataset, CliError> {
    let ds = load_csv(path).map_err(|e| CliError::from_lib(format!("dataset {}", path.display()), e))?;
    if ds.feature_dim() != spec.feature_dim() {
        return Err(CliError::from_lib(
            format!("dataset {}", path.display()),
            Error::DimensionMismatch { expected: spec.feature_dim(), found: ds.feature_dim() },
        ));
    }
    Ok(ds)
}

fn read_theta(path: &Path, spec: &CircuitSpec) -> Result<ThetaFile, CliError> {
    let context = || format!("parameters {}", path.display());
    let text = fs::read_to_string(path).map_err(|e| CliError::from_lib(context(), e.into()))?;
    let file: ThetaFile = serde_json::from_str(&text).map_err(|e| CliError::from_lib(context(), e.into()))?;
    if file.theta.len() != spec.param_count() {
        return Err(CliError::from_lib(
            context(),
            Error::DimensionMismatch { expected: spec.param_count(), found: file.theta.len() },
        ));
    }
    Ok(file)
}

pub fn gen_data(args: GenDataArgs) -> Result<(), CliError> {
    let mut cfg = base_config(&args.common)?;
    let data = &mut cfg.data;
    if let Some(n) = args.n_train {
        data.n_train = n;
    }
    if let Some(n) = args.n_test {
        data.n_test = n;
    }
    if let Some(seed) = args.seed {
        data.seed = seed;
    }
    if let Some(c) = args.center {
        data.center = [c[0], c[1]];
    }
    if let Some(r) = args.radius {
        data.radius = r;
    }
    if args.train_out.is_some() {
        data.train_path = args.train_out;
    }
    if args.test_out.is_some() {
        data.test_path = args.test_out;
    }
    if data.n_train == 0 || data.n_test == 0 {
        return Err(CliError::usage("--n-train and --n-test must be at least 1"));
    }

    let circle = cfg.data.circle();
    let seed = cfg.data.seed;
    let sets = [(cfg.train_path(), cfg.data.n_train, seed), (cfg.test_path(), cfg.data.n_test, seed.wrapping_add(1))];
    for (path, n, seed) in sets {
        let ds = gen_circle(n, circle, seed).map_err(|e| CliError::from_lib("generation", e))?;
        create_parent(&path)?;
        save_csv(&ds, &path).map_err(|e| CliError::from_lib(path.display(), e))?;
        println!("{}: {} points, {} labeled 1", path.display(), ds.len(), ds.positives());
    }
    Ok(())
}

pub fn train(args: TrainArgs) -> Result<(), CliError> {
    let mut cfg = base_config(&args.common)?;
    if args.train.is_some() {
        cfg.data.train_path = args.train;
    }
    if let Some(shots) = args.shots {
        cfg.train.probe = ProbeMode::Sampled { shots };
    }
    match args.probe {
        Some(ExactProbe::Analytic) => cfg.train.probe = ProbeMode::Analytic,
        Some(ExactProbe::Probed) => cfg.train.probe = ProbeMode::Probed,
        None => {}
    }
    if let Some(n) = args.max_sweeps {
        cfg.train.max_sweeps = n;
    }
    if let Some(tol) = args.rel_tol {
        cfg.train.rel_tol = tol;
    }
    if let Some(seed) = args.seed {
        cfg.train.seed = seed;
    }
    if let Some(seed) = args.init_seed {
        cfg.init_seed = seed;
    }
    let spec = &cfg.circuit;
    cfg.train.validate(spec).map_err(|e| CliError::from_lib("training config", e))?;

    let data = load_dataset(&cfg.train_path(), spec)?;
    let theta0 = match &args.init {
        Some(path) => Theta::new(read_theta(path, spec)?.theta)
            .map_err(|e| CliError::from_lib(format!("parameters {}", path.display()), e))?,
        None => Theta::random_init(spec, cfg.init_seed),
    };
    let out = boson_reupload::train(spec, &theta0, &data, &cfg.train).map_err(|e| CliError::from_lib("training", e))?;
    let threshold = if args.fit_threshold {
        fit_threshold(spec, &out.theta, &data).map_err(|e| CliError::from_lib("threshold fit", e))?
    } else {
        spec.threshold()
    };

    let theta_path = args.theta_out.unwrap_or_else(|| cfg.output("theta.json"));
    let history_path = args.history_out.unwrap_or_else(|| cfg.output("history.csv"));
    let file = ThetaFile {
        theta: out.theta.values().to_vec(),
        threshold,
        cost: Some(out.history[out.best_index]),
        best_index: Some(out.best_index),
        sweeps: Some(out.sweeps()),
        converged: Some(out.converged),
    };
    let mut w = create_file(&theta_path)?;
    serde_json::to_writer_pretty(&mut w, &file).map_err(|e| CliError::from_lib(theta_path.display(), e.into()))?;
    std::io::Write::write_all(&mut w, b"\n").map_err(|e| CliError::from_lib(theta_path.display(), e.into()))?;
    out.write_history_csv(create_file(&history_path)?)
        .map_err(|e| CliError::from_lib(history_path.display(), e))?;

    println!(
        "{} sweeps ({}), best cost {:.6e} at sweep {}",
        out.sweeps(),
        if out.converged { "converged" } else { "sweep cap" },
        out.history[out.best_index],
        out.best_index
    );
    println!("wrote {} and {}", theta_path.display(), history_path.display());
    Ok(())
}

fn theta_path(cfg: &RunConfig, flag: Option<PathBuf>) -> PathBuf {
    flag.unwrap_or_else(|| cfg.output("theta.json"))
}

/// Parameters and the circuit carrying the threshold to apply.
fn load_model(cfg: &RunConfig, path: &Path, threshold: Option<f64>) -> Result<(CircuitSpec, Theta), CliError> {
    let file = read_theta(path, &cfg.circuit)?;
    let theta = Theta::new(file.theta).map_err(|e| CliError::from_lib(path.display(), e))?;
    let spec = cfg
        .circuit
        .with_threshold(threshold.unwrap_or(file.threshold))
        .map_err(|e| CliError::from_lib("threshold", e))?;
    Ok((spec, theta))
}

fn write_grid(spec: &CircuitSpec, theta: &Theta, resolution: usize, path: &Path) -> Result<(), CliError> {
    let grid = decision_grid(spec, theta, resolution).map_err(|e| CliError::from_lib("grid", e))?;
    grid.write_csv(create_file(path)?).map_err(|e| CliError::from_lib(path.display(), e))?;
    eprintln!("wrote {} ({} rows)", path.display(), grid.values.len());
    Ok(())
}

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    let mut cfg = base_config(&args.common)?;
    if args.test.is_some() {
        cfg.data.test_path = args.test;
    }
    let (spec, theta) = load_model(&cfg, &theta_path(&cfg, args.theta), args.threshold)?;
    let data = load_dataset(&cfg.test_path(), &spec)?;
    let cm = evaluate(&spec, &theta, &data).map_err(|e| CliError::from_lib("evaluation", e))?;
    let json = serde_json::to_string_pretty(&Metrics::new(cm, spec.threshold())).expect("metrics serialize");
    println!("{json}");
    if let Some(path) = args.metrics_out {
        fs::write(&path, format!("{json}\n")).map_err(|e| CliError::from_lib(path.display(), e.into()))?;
    }
    if let Some(resolution) = args.grid {
        let path = args.grid_out.unwrap_or_else(|| cfg.output("grid.csv"));
        write_grid(&spec, &theta, resolution, &path)?;
    }
    Ok(())
}

pub fn grid(args: GridArgs) -> Result<(), CliError> {
    let cfg = base_config(&args.common)?;
    let (spec, theta) = load_model(&cfg, &theta_path(&cfg, args.theta), args.threshold)?;
    let path = args.out.unwrap_or_else(|| cfg.output("grid.csv"));
    write_grid(&spec, &theta, args.resolution, &path)
}
