use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use qelm_lab::circuit::Circuit;
use qelm_lab::dataset::{Split, Task};
use qelm_lab::harness::{
    emit_report, load_report, run_scenario, run_uq, scenario_backends, ScenarioBackends, UqSummary,
};
use qelm_lab::mitigation::{zne_calibrate, zne_error, Extrapolation, ZneConfig};
use qelm_lab::qelm::{train as train_model, FeatureCache, QelmConfig};
use qelm_lab::rng::derive_seed;
use qelm_lab::simulator::{ideal_distribution, noisy_distribution, sample};
use serde::Serialize;

use crate::config::{load_profile, parse_and_validate, Purpose, RunConfig};
use crate::{CalibrateArgs, Failure, ReportArgs, RunArgs, SimulateArgs};

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| io_failure(&path, e))?;
    Ok(path)
}

fn to_json(value: &impl Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

fn set_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        // a second initialisation only happens in-process and is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Shared prologue of config-driven commands. `None` means an early exit
/// (`--print-config` or `--dump-circuit`) already happened.
fn prepare(args: &RunArgs, env_seed: Option<&str>, purpose: Purpose) -> Result<Option<(RunConfig, Split)>, Failure> {
    let config = parse_and_validate(args.config.as_deref(), &args.overrides(), env_seed, purpose)?;
    if args.print_config {
        print!("{}", config.to_json());
        return Ok(None);
    }
    let split = config.dataset.generate().map_err(|e| Failure::Usage(format!("`dataset`: {e}")))?;
    if args.dump_circuit {
        let front = config.model.front(&split.train.feature_ranges()).map_err(runtime)?;
        print!("{}", front.circuit(&split.train.features[0]).map_err(runtime)?);
        return Ok(None);
    }
    set_jobs(config.jobs);
    Ok(Some((config, split)))
}

fn read_circuit(path: &Path) -> Result<Circuit, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("`circuit`: {}: {e}", path.display())))?;
    text.parse().map_err(|e| Failure::Usage(format!("`circuit`: {e}")))
}

/// Probabilities rounded to 12 decimals so that values such as
/// `0.5000000000000001` print as `0.5`.
fn rounded(map: BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    map.into_iter().map(|(k, p)| (k, (p * 1e12).round() / 1e12)).collect()
}

pub fn simulate(args: &SimulateArgs, env_seed: Option<&str>) -> Result<(), Failure> {
    let circuit = read_circuit(&args.circuit)?;
    if args.dump_circuit {
        print!("{circuit}");
        return Ok(());
    }
    let dist = match &args.profile {
        None => ideal_distribution(&circuit),
        Some(reference) => {
            let profile = load_profile(reference)?;
            if profile.n_qubits() < circuit.n_qubits() {
                return Err(Failure::Usage(format!(
                    "`profile`: covers {} qubits but the circuit has {}",
                    profile.n_qubits(),
                    circuit.n_qubits()
                )));
            }
            noisy_distribution(&circuit, &profile)
        }
    }
    .map_err(runtime)?;
    let body = match args.shots {
        Some(0) => return Err(Failure::Usage("`shots`: must be at least 1".into())),
        Some(shots) => {
            let seed = match (args.seed, env_seed) {
                (Some(s), _) => s,
                (None, Some(text)) => text
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("`QELM_LAB_SEED`: not an unsigned integer: `{text}`")))?,
                (None, None) => 0,
            };
            serde_json::to_string(&sample(&dist, shots, seed).to_map()).expect("counts serialize")
        }
        None => serde_json::to_string(&rounded(dist.to_map(1e-12))).expect("map serializes"),
    };
    println!("{body}");
    if let Some(dir) = &args.out {
        write_file(dir, "distribution.json", &format!("{body}\n"))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Evaluation {
    model: String,
    scenario: String,
    train_backend: String,
    test_backend: String,
    task: Task,
    metric: &'static str,
    value: f64,
    seed: u64,
}

pub fn train(args: &RunArgs, env_seed: Option<&str>) -> Result<(), Failure> {
    let purpose = if args.ideal { Purpose::Inspect } else { Purpose::Scenario };
    let Some((config, split)) = prepare(args, env_seed, purpose)? else {
        return Ok(());
    };
    let model_config: QelmConfig = config.model.clone();
    let backends = if args.ideal {
        ScenarioBackends::ideal()
    } else {
        scenario_backends(&config.scenario_config()?, &split, &model_config).map_err(runtime)?
    };
    let mut train_config = model_config.clone();
    train_config.feature_map.shots = backends.train_shots;
    let cache = FeatureCache::new();
    let mut model = train_model(&split.train, &train_config, &backends.train, derive_seed(config.seed, 0), Some(&cache))
        .map_err(runtime)?;
    model.front.feature_map.shots = backends.test_shots;
    let predictions = model
        .predict_rows(&split.test.features, &backends.test, derive_seed(config.seed, 1), Some(&cache))
        .map_err(runtime)?;
    let targets = &split.test.targets;
    let (metric, value) = match split.test.task {
        Task::Regression => (
            "mse",
            predictions.iter().zip(targets).map(|(p, t)| (p.value() - t).powi(2)).sum::<f64>() / targets.len() as f64,
        ),
        Task::Classification => (
            "accuracy",
            predictions.iter().zip(targets).filter(|(p, t)| p.value() == **t).count() as f64 / targets.len() as f64,
        ),
    };
    let eval = Evaluation {
        model: model_config.name(),
        scenario: config.scenario.to_string(),
        train_backend: backends.train.label(),
        test_backend: backends.test.label(),
        task: split.test.task,
        metric,
        value,
        seed: config.seed,
    };
    write_file(&config.out, "model.json", &model.to_json().map_err(runtime)?)?;
    write_file(&config.out, "evaluation.json", &to_json(&eval))?;
    println!("{} {metric} = {value}", eval.model);
    Ok(())
}

pub fn scenario(args: &RunArgs, env_seed: Option<&str>) -> Result<(), Failure> {
    let Some((config, split)) = prepare(args, env_seed, Purpose::Scenario)? else {
        return Ok(());
    };
    let report = run_scenario(&config.scenario_config()?, &split, &config.model).map_err(runtime)?;
    let files = emit_report(&report, &config.out).map_err(runtime)?;
    write_file(&config.out, "config.json", &config.to_json())?;
    match (&report.ideal_value, &report.median_percent_change, &report.statistics) {
        (Some(ideal), Some(median), Some(s)) => println!(
            "{} {}: ideal {:?} = {ideal:.6}, median change {median:.3}%, U = {}, p = {:.4}, A12 = {:.3}",
            report.scenario, report.model_name, report.metric, s.mann_whitney.u, s.mann_whitney.p_value, s.a12
        ),
        _ => println!("{} {}: statistics unavailable ({})", report.scenario, report.model_name, report.notes.join("; ")),
    }
    println!("wrote {} files to {}", files.len() + 1, config.out.display());
    Ok(())
}

pub fn uq(args: &RunArgs, env_seed: Option<&str>) -> Result<(), Failure> {
    let Some((mut config, split)) = prepare(args, env_seed, Purpose::Scenario)? else {
        return Ok(());
    };
    if config.uq.is_none() {
        config.uq = Some(qelm_lab::harness::UqSettings::bootstrap());
    }
    let report = run_uq(&config.scenario_config()?, &split, &config.model).map_err(runtime)?;
    write_file(&config.out, "uq.json", &to_json(&report))?;
    match (&report.scenario, &report.ideal) {
        (UqSummary::Regression(s), UqSummary::Regression(i)) => println!(
            "mean interval width {:.4} (ideal {:.4}), coverage {:.3} (ideal {:.3}), CRPS {:.4} (ideal {:.4})",
            s.mean_width, i.mean_width, s.coverage, i.coverage, s.mean_crps, i.mean_crps
        ),
        (UqSummary::Classification(s), UqSummary::Classification(i)) => println!(
            "brier {:.4} (ideal {:.4}), log loss {:.4} (ideal {:.4})",
            s.brier, i.brier, s.log_loss, i.log_loss
        ),
        _ => {}
    }
    Ok(())
}

/// Scale sets crossed with extrapolation methods; pairings with too few
/// points for the method are left out.
pub fn default_zne_grid() -> Vec<ZneConfig> {
    let scale_sets: [&[f64]; 3] = [&[1.0, 2.0, 3.0], &[1.0, 3.0, 5.0], &[1.0, 2.0, 3.0, 5.0]];
    let methods = [
        Extrapolation::Linear,
        Extrapolation::Polynomial { degree: 2 },
        Extrapolation::Polynomial { degree: 3 },
        Extrapolation::Exponential,
    ];
    scale_sets
        .iter()
        .flat_map(|s| methods.iter().filter_map(|&m| ZneConfig::new(s.to_vec(), m).ok()))
        .collect()
}

#[derive(Serialize)]
struct Calibration {
    profile: String,
    circuit: String,
    chosen: ZneConfig,
    grid: Vec<(ZneConfig, f64)>,
}

pub fn calibrate_zne(args: &CalibrateArgs, env_seed: Option<&str>) -> Result<(), Failure> {
    let config = parse_and_validate(args.run.config.as_deref(), &args.run.overrides(), env_seed, Purpose::Inspect)?;
    if args.run.print_config {
        print!("{}", config.to_json());
        return Ok(());
    }
    let circuit = match &args.circuit {
        Some(path) => read_circuit(path)?,
        None => {
            let split = config.dataset.generate().map_err(|e| Failure::Usage(format!("`dataset`: {e}")))?;
            let front = config.model.front(&split.train.feature_ranges()).map_err(runtime)?;
            front.circuit(&split.train.features[0]).map_err(runtime)?
        }
    };
    if args.run.dump_circuit {
        print!("{circuit}");
        return Ok(());
    }
    set_jobs(config.jobs);
    let reference = config
        .profile
        .as_deref()
        .ok_or_else(|| Failure::Usage("`profile`: calibration needs a noise profile".into()))?;
    let profile = load_profile(reference)?;
    let grid = default_zne_grid();
    let chosen = zne_calibrate(&profile, &circuit, &grid).map_err(runtime)?;
    let errors = grid
        .iter()
        .map(|c| zne_error(&circuit, &profile, c).map(|e| (c.clone(), e)))
        .collect::<qelm_lab::Result<Vec<_>>>()
        .map_err(runtime)?;
    let result = Calibration {
        profile: profile.name.clone(),
        circuit: circuit.to_string(),
        chosen: chosen.clone(),
        grid: errors,
    };
    write_file(&config.out, "zne.json", &to_json(&result))?;
    println!("{}", serde_json::to_string(&chosen).expect("config serializes"));
    Ok(())
}

pub fn report(args: &ReportArgs) -> Result<(), Failure> {
    let path = if args.results.is_dir() {
        args.results.join("results.json")
    } else {
        args.results.clone()
    };
    let report = load_report(&path).map_err(|e| Failure::Usage(format!("`results`: {}: {e}", path.display())))?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| path.parent().map(Path::to_path_buf).unwrap_or_default());
    let files = emit_report(&report, &out).map_err(runtime)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}
