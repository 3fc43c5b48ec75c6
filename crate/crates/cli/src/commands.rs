use std::fs;
use std::path::{Path, PathBuf};

use beamsnet::data_io::checkpoint::CheckpointMeta;
use beamsnet::data_io::{
    discover_missions, load_checkpoint, load_missions, recorrupt_mission, save_checkpoint, save_mission, MissionFile,
    RecorruptOptions,
};
use beamsnet::dvl::{build_geometry, ls_estimate, BeamGeometry, BodyVelocity};
use beamsnet::metrics::EvalReport;
use beamsnet::model::{train, BeamsNet, NetConfig, TrainLog};
use beamsnet::par;
use beamsnet::seed::component_rng;
use beamsnet::sim::fixture::generate_fixture;
use beamsnet::sim::{build_dataset_from_missions, simulate_mission, Dataset, TrajectorySpec};
use serde::Serialize;

use crate::config::{DatasetSpec, EvalConfig, ExperimentConfig, FixtureConfig, SimulateConfig, SweepConfig, TrainRunConfig};
use crate::plot::{bar_chart, line_chart, Series};
use crate::CliError;

pub const CHECKPOINT_FILE: &str = "model.ckpt";

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Runtime(format!("writing {}: {e}", path.display())))
}

/// Create the output directory and record the resolved config in it.
fn prepare_out(cfg: &ExperimentConfig) -> Result<PathBuf, CliError> {
    let out = cfg.out().clone();
    fs::create_dir_all(&out).map_err(|e| CliError::Runtime(format!("creating {}: {e}", out.display())))?;
    write(&out.join("config.json"), cfg.to_json())?;
    Ok(out)
}

fn geometry(alpha_deg: f64) -> Result<BeamGeometry, CliError> {
    build_geometry(alpha_deg.to_radians()).map_err(|e| CliError::Config(e.to_string()))
}

pub fn run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    match cfg {
        ExperimentConfig::Simulate(c) => cmd_simulate(c).map(|_| ()),
        ExperimentConfig::MakeFixture(c) => cmd_make_fixture(c).map(|_| ()),
        ExperimentConfig::Train(c) => cmd_train(c).map(|_| ()),
        ExperimentConfig::Eval(c) => cmd_eval(c).map(|_| ()),
        ExperimentConfig::SweepPast(c) => cmd_sweep_past(c).map(|_| ()),
    }
}

fn speed_dir_name(speed: f64) -> String {
    format!("sim_{speed:.2}mps")
}

/// One mission directory per speed. All speeds share the IMU and beam
/// noise seeds.
pub fn cmd_simulate(c: &SimulateConfig) -> Result<Vec<PathBuf>, CliError> {
    if c.speeds.is_empty() {
        return Err(CliError::Config("at least one speed is required".into()));
    }
    let geom = geometry(c.alpha_deg)?;
    let specs: Vec<TrajectorySpec> = c
        .speeds
        .iter()
        .map(|&s| TrajectorySpec {
            heading: c.heading_deg.to_radians(),
            imu_rate: c.imu_rate,
            dvl_rate: c.dvl_rate,
            ..TrajectorySpec::new(s, c.duration)
        })
        .collect();
    for s in &specs {
        s.validate().map_err(|e| CliError::Config(e.to_string()))?;
    }
    c.imu_errors.validate().map_err(|e| CliError::Config(e.to_string()))?;
    c.beam_errors.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let out = prepare_out(&ExperimentConfig::Simulate(c.clone()))?;

    let mut dirs = Vec::new();
    for spec in &specs {
        let name = speed_dir_name(spec.speed);
        let m = simulate_mission(&name, spec, &geom, &c.imu_errors, &c.beam_errors)?;
        let dir = out.join(&name);
        save_mission(&m, &dir)?;
        log::info!("{name}: {} imu rows, {} dvl rows", m.imu.t.len(), m.dvl.t.len());
        println!("{}: {} imu rows, {} dvl rows", dir.display(), m.imu.t.len(), m.dvl.t.len());
        dirs.push(dir);
    }
    Ok(dirs)
}

pub fn cmd_make_fixture(c: &FixtureConfig) -> Result<Vec<PathBuf>, CliError> {
    c.fixture.validate().map_err(|e| CliError::Config(e.to_string()))?;
    c.imu_errors.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let out = prepare_out(&ExperimentConfig::MakeFixture(c.clone()))?;
    let missions = generate_fixture(&c.fixture, &c.imu_errors)?;
    let mut dirs = Vec::new();
    for m in &missions {
        let dir = out.join(&m.meta.mission_id);
        save_mission(m, &dir)?;
        dirs.push(dir);
    }
    println!("{}: {} missions", out.display(), missions.len());
    Ok(dirs)
}

pub fn load_mission_set(spec: &DatasetSpec) -> Result<Vec<MissionFile>, CliError> {
    let paths = discover_missions(&spec.path)?;
    Ok(load_missions(&paths)?)
}

/// Build the windowed dataset described by `spec`.
pub fn build_dataset(spec: &DatasetSpec) -> Result<(Dataset, BeamGeometry), CliError> {
    let geom = geometry(spec.alpha_deg)?;
    spec.beam_errors.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let missions = load_mission_set(spec)?;
    let opts = RecorruptOptions {
        pre_noise_std: spec.pre_noise_std,
    };
    let prepared = missions
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            if m.dvl.beams.is_some() {
                Ok(m)
            } else {
                recorrupt_mission(&m, i, &geom, &spec.beam_errors, &opts)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let ds = build_dataset_from_missions(&prepared, spec.n_past).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((ds, geom))
}

pub fn ls_predictions(geom: &BeamGeometry, ds: &Dataset) -> Vec<BodyVelocity> {
    par::map_slice(ds.test(), |w| ls_estimate(geom, w.current_beams))
}

fn truth(ds: &Dataset) -> Vec<BodyVelocity> {
    ds.test().iter().map(|w| w.gt_velocity).collect()
}

/// LS baseline and model reports on the test split, LS first.
pub fn evaluate(net: &BeamsNet, ds: &Dataset, geom: &BeamGeometry) -> Result<Vec<EvalReport>, CliError> {
    let truth = truth(ds);
    let ls = EvalReport::from_velocities("LS", &truth, &ls_predictions(geom, ds))?;
    let pred = net.predict_batch(ds.test())?;
    let model = EvalReport::from_velocities(&net.variant().to_string(), &truth, &pred)?.with_baseline(ls.rmse)?;
    Ok(vec![ls, model])
}

#[derive(Debug, Clone, Serialize)]
struct EpochTiming {
    epoch: usize,
    wall_time_s: f64,
}

pub struct TrainOutcome {
    pub net: BeamsNet,
    pub log: TrainLog,
    pub reports: Vec<EvalReport>,
    pub checkpoint: PathBuf,
    pub fingerprint: String,
}

fn train_on(
    net_cfg: &NetConfig,
    tc: &beamsnet::model::TrainConfig,
    seed: u64,
    ds: &Dataset,
) -> Result<(BeamsNet, TrainLog), CliError> {
    let net = BeamsNet::new(net_cfg.clone(), &mut component_rng(seed, "init", 0))
        .map_err(|e| CliError::Config(e.to_string()))?;
    net.check_dataset(ds).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(train(net, ds, tc)?)
}

pub fn cmd_train(c: &TrainRunConfig) -> Result<TrainOutcome, CliError> {
    c.train.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let out = prepare_out(&ExperimentConfig::Train(c.clone()))?;
    let (ds, geom) = build_dataset(&c.dataset)?;
    let fingerprint = ds.fingerprint();
    log::info!(
        "dataset {}: {} windows ({} train / {} test), fingerprint {}",
        c.dataset.path.display(),
        ds.len(),
        ds.train().len(),
        ds.test().len(),
        &fingerprint[..16]
    );
    let (net, log) = train_on(&c.net, &c.train, c.seed, &ds)?;
    let reports = evaluate(&net, &ds, &geom)?;

    write(&out.join("train_log.csv"), log.to_csv())?;
    let timing: Vec<EpochTiming> = log
        .epochs
        .iter()
        .map(|e| EpochTiming {
            epoch: e.epoch,
            wall_time_s: e.wall_time_s,
        })
        .collect();
    write(&out.join("timing.json"), serde_json::to_string_pretty(&timing).expect("serializes") + "\n")?;
    let series = [
        Series {
            label: "train",
            points: log.epochs.iter().map(|e| (e.epoch as f64, e.train_loss)).collect(),
        },
        Series {
            label: "test",
            points: log.epochs.iter().map(|e| (e.epoch as f64, e.test_loss)).collect(),
        },
    ];
    write(
        &out.join("loss_curve.svg"),
        line_chart(&format!("{} loss", net.variant()), "epoch", "MSE", &series, true),
    )?;

    let meta = CheckpointMeta {
        dataset_fingerprint: Some(fingerprint.clone()),
        train: Some(c.train.clone()),
        metrics: reports.clone(),
        notes: String::new(),
        extra: serde_json::json!({ "dataset": c.dataset, "seed": c.seed }),
    };
    let checkpoint = out.join(CHECKPOINT_FILE);
    save_checkpoint(&net, &meta, &checkpoint)?;
    for r in &reports {
        println!("{}", report_line(r));
    }
    Ok(TrainOutcome {
        net,
        log,
        reports,
        checkpoint,
        fingerprint,
    })
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.prec$}"))
}

fn report_line(r: &EvalReport) -> String {
    format!(
        "{:<12} {:>11.6} {:>11.6} {:>10} {:>11} {:>16}",
        r.method,
        r.rmse,
        r.mae,
        fmt_opt(r.r2, 6),
        fmt_opt(r.vaf, 6),
        fmt_opt(r.improvement_vs_baseline, 2)
    )
}

pub fn report_table(reports: &[EvalReport]) -> String {
    let mut s = format!(
        "{:<12} {:>11} {:>11} {:>10} {:>11} {:>16}\n",
        "method", "rmse [m/s]", "mae [m/s]", "r2", "vaf", "improvement [%]"
    );
    for r in reports {
        s.push_str(&report_line(r));
        s.push('\n');
    }
    s.push_str(&format!("\ntest windows: {}\n", reports.first().map_or(0, |r| r.n)));
    s
}

pub struct EvalOutcome {
    pub reports: Vec<EvalReport>,
    pub fingerprint_matched: bool,
}

pub fn cmd_eval(c: &EvalConfig) -> Result<EvalOutcome, CliError> {
    let (net, meta) = load_checkpoint(&c.checkpoint)?;
    let spec = match &c.dataset {
        Some(s) => s.clone(),
        None => serde_json::from_value(meta.extra["dataset"].clone())
            .map_err(|_| CliError::Config("checkpoint does not record its dataset; pass --dataset".into()))?,
    };
    let (ds, geom) = build_dataset(&spec)?;
    let fp = ds.fingerprint();
    let matched = meta.dataset_fingerprint.as_deref() == Some(fp.as_str());
    if !matched {
        log::warn!(
            "dataset fingerprint {} differs from the one recorded at training time ({})",
            &fp[..16],
            meta.dataset_fingerprint.as_deref().unwrap_or("none")
        );
        if !c.allow_fingerprint_mismatch {
            return Err(CliError::Config(
                "dataset differs from the training dataset; pass --allow-fingerprint-mismatch to evaluate anyway".into(),
            ));
        }
    }
    net.check_dataset(&ds).map_err(|e| CliError::Config(e.to_string()))?;
    let out = prepare_out(&ExperimentConfig::Eval(c.clone()))?;
    let reports = evaluate(&net, &ds, &geom)?;
    write_eval_outputs(&out, &reports)?;
    print!("{}", report_table(&reports));
    Ok(EvalOutcome {
        reports,
        fingerprint_matched: matched,
    })
}

/// `report.json`, `report.txt`, `rmse_bars.csv` and `rmse_bars.svg`.
pub fn write_eval_outputs(out: &Path, reports: &[EvalReport]) -> Result<(), CliError> {
    write(&out.join("report.json"), serde_json::to_string_pretty(reports).expect("serializes") + "\n")?;
    write(&out.join("report.txt"), report_table(reports))?;
    let mut csv = String::from("method,rmse\n");
    for r in reports {
        csv.push_str(&format!("{},{}\n", r.method, r.rmse));
    }
    write(&out.join("rmse_bars.csv"), csv)?;
    let bars: Vec<(String, f64)> = reports.iter().map(|r| (r.method.clone(), r.rmse)).collect();
    write(&out.join("rmse_bars.svg"), bar_chart("velocity norm RMSE (test split)", "RMSE [m/s]", &bars))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub rmse: f64,
    pub mae: f64,
    pub ls_rmse: f64,
    pub improvement: f64,
}

/// Train one V2 per past-window length on a shared dataset.
pub fn cmd_sweep_past(c: &SweepConfig) -> Result<Vec<SweepRow>, CliError> {
    if c.min_n > c.max_n {
        return Err(CliError::Config(format!("empty range {}..={}", c.min_n, c.max_n)));
    }
    if c.min_n < c.net.conv_kernel {
        return Err(CliError::Config(format!(
            "n = {} is shorter than the conv kernel ({})",
            c.min_n, c.net.conv_kernel
        )));
    }
    if c.dataset.n_past != c.max_n {
        return Err(CliError::Config(format!(
            "dataset n_past ({}) must equal max_n ({})",
            c.dataset.n_past, c.max_n
        )));
    }
    c.train.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let out = prepare_out(&ExperimentConfig::SweepPast(c.clone()))?;
    let (ds, geom) = build_dataset(&c.dataset)?;
    let ns: Vec<usize> = (c.min_n..=c.max_n).collect();
    let results = par::map_slice(&ns, |&n| -> Result<SweepRow, CliError> {
        let cfg = NetConfig::V2(beamsnet::model::BeamsNetV2Config {
            n_past: n,
            ..c.net.clone()
        });
        let (net, _) = train_on(&cfg, &c.train, c.seed, &ds)?;
        let r = evaluate(&net, &ds, &geom)?;
        Ok(SweepRow {
            n,
            rmse: r[1].rmse,
            mae: r[1].mae,
            ls_rmse: r[0].rmse,
            improvement: r[1].improvement_vs_baseline.expect("baseline set"),
        })
    });
    let rows = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut csv = String::from("n,rmse,mae,ls_rmse,improvement\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{},{},{}\n", r.n, r.rmse, r.mae, r.ls_rmse, r.improvement));
        println!("n = {}: rmse {:.6} (LS {:.6}, {:.2}%)", r.n, r.rmse, r.ls_rmse, r.improvement);
    }
    write(&out.join("sweep.csv"), csv)?;
    let series = [Series {
        label: "BeamsNetV2",
        points: rows.iter().map(|r| (r.n as f64, r.rmse)).collect(),
    }];
    write(
        &out.join("sweep.svg"),
        line_chart("RMSE vs past beam measurements", "n past", "RMSE [m/s]", &series, false),
    )?;
    Ok(rows)
}
