//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. `ACCEPTANCE_ONLY=3,5` runs a subset.
//!
//! The end-to-end criteria drive the `beamsnet` binary exactly as a user
//! would and read back the files it writes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use beamsnet::dvl::{beams_from_velocity, corrupt_beams, ls_estimate, BeamErrorParams, BeamGeometry, BodyVelocity};
use beamsnet::metrics::{mae, r2, rmse, vaf, EvalReport};
use beamsnet::model::{BeamsNet, BeamsNetV1Config, BeamsNetV2Config};
use beamsnet::nn::{grad_check, grad_check_sampled, GradCheckReport, GraphBuilder, NodeId, Tensor};
use beamsnet::seed::{component_rng, rng_from_seed, Rng};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

type Outcome = Result<String, String>;
type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------- CLI plumbing

fn beamsnet(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_beamsnet"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .map_err(|e| format!("spawning beamsnet: {e}"))?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "beamsnet {} exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn read_reports(dir: &Path) -> Result<Vec<EvalReport>, String> {
    let text = fs::read_to_string(dir.join("report.json")).map_err(|e| e.to_string())?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

/// Train a variant and evaluate it; returns (LS, model) reports.
fn train_eval(dataset: &Path, variant: &str, work: &Path, extra: &[&str]) -> Result<(EvalReport, EvalReport), String> {
    let train_dir = work.join(format!("train_{variant}"));
    let eval_dir = work.join(format!("eval_{variant}"));
    let mut args = vec!["train", "--variant", variant, "--dataset", s(dataset), "--out", s(&train_dir)];
    args.extend_from_slice(extra);
    beamsnet(&args)?;
    let ckpt = train_dir.join("model.ckpt");
    beamsnet(&["eval", "--checkpoint", s(&ckpt), "--out", s(&eval_dir)])?;
    let r = read_reports(&eval_dir)?;
    ensure(r.len() == 2 && r[0].method == "LS", || format!("unexpected report layout in {}", eval_dir.display()))?;
    Ok((r[0].clone(), r[1].clone()))
}

fn rmse_not_below_mae(reports: &[&EvalReport]) -> Result<(), String> {
    for r in reports {
        ensure(r.rmse >= r.mae, || format!("{}: rmse {} < mae {}", r.method, r.rmse, r.mae))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- criterion 1

/// HᵀH = diag(2 sin²α, 2 sin²α, 4 cos²α) for the Janus layout.
fn janus_normal_inverse(alpha: f64) -> [[f64; 3]; 3] {
    let (sn, c) = (alpha.sin(), alpha.cos());
    [
        [1.0 / (2.0 * sn * sn), 0.0, 0.0],
        [0.0, 1.0 / (2.0 * sn * sn), 0.0],
        [0.0, 0.0, 1.0 / (4.0 * c * c)],
    ]
}

fn criterion_1() -> Outcome {
    let g = BeamGeometry::default();
    let mut worst_id: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let v: f64 = (0..4).map(|k| g.h_pinv()[i][k] * g.h()[k][j]).sum();
            worst_id = worst_id.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    ensure(worst_id <= 1e-12, || format!("|H⁺H − I| = {worst_id:e}"))?;

    let mut rng = rng_from_seed(1);
    let mut worst_rt: f64 = 0.0;
    for _ in 0..1000 {
        let v = BodyVelocity([
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        ]);
        let e = ls_estimate(&g, beams_from_velocity(&g, v).map_err(|e| e.to_string())?);
        for i in 0..3 {
            worst_rt = worst_rt.max((e.0[i] - v.0[i]).abs());
        }
    }
    ensure(worst_rt <= 1e-10, || format!("round-trip error {worst_rt:e}"))?;

    let sigma = 0.042;
    let p = BeamErrorParams {
        noise_std: sigma,
        ..BeamErrorParams::zero(5)
    };
    let v = BodyVelocity([1.3, -0.4, 0.2]);
    let mut rng = rng_from_seed(p.seed);
    let n = 100_000;
    let mut sq = [[0.0; 3]; 3];
    for _ in 0..n {
        let e = ls_estimate(&g, corrupt_beams(&g, v, &p, &mut rng));
        let d = [e.0[0] - v.0[0], e.0[1] - v.0[1], e.0[2] - v.0[2]];
        for i in 0..3 {
            for j in 0..3 {
                sq[i][j] += d[i] * d[j];
            }
        }
    }
    let want = janus_normal_inverse(g.pitch()).map(|r| r.map(|x| x * sigma * sigma));
    let mut worst_cov: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let got = sq[i][j] / n as f64;
            // diagonal: relative; off-diagonal (zero): relative to √(C_ii C_jj)
            let scale = (want[i][i] * want[j][j]).sqrt();
            worst_cov = worst_cov.max((got - want[i][j]).abs() / scale);
        }
    }
    ensure(worst_cov <= 0.05, || format!("covariance deviation {:.2}%", worst_cov * 100.0))?;
    Ok(format!(
        "|H⁺H−I| {worst_id:.1e}, round trip {worst_rt:.1e}, MC covariance within {:.2}%",
        worst_cov * 100.0
    ))
}

// ---------------------------------------------------------------- criterion 2

fn randn(shape: &[usize], rng: &mut Rng) -> Tensor {
    let n = shape.iter().product();
    let data = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    Tensor::new(shape.to_vec(), data).expect("shape matches")
}

fn check_layer(
    what: &str,
    shapes: &[&[usize]],
    layer: impl FnOnce(&mut GraphBuilder, &[NodeId]) -> NodeId,
) -> Result<GradCheckReport, String> {
    let mut rng = component_rng(11, what, 0);
    let model = {
        let mut b = GraphBuilder::new(&mut rng);
        let ins: Vec<NodeId> = shapes
            .iter()
            .enumerate()
            .map(|(i, sh)| b.input(&format!("x{i}"), sh).expect("input"))
            .collect();
        let x = layer(&mut b, &ins);
        let x = b.flatten("flat_out", x).expect("flatten");
        let y = b.dense("readout", x, 3).expect("dense");
        b.build(y).map_err(|e| e.to_string())?
    };
    let mut data_rng = component_rng(12, what, 0);
    let xs: Vec<Tensor> = shapes.iter().map(|sh| randn(sh, &mut data_rng)).collect();
    let target = randn(&[3], &mut data_rng);
    let refs: Vec<&Tensor> = xs.iter().collect();
    grad_check(&model, &refs, &target, 1e-6).map_err(|e| e.to_string())
}

fn criterion_2() -> Outcome {
    let started = Instant::now();
    let mut reports: Vec<(&str, GradCheckReport)> = vec![
        ("dense", check_layer("dense", &[&[7]], |b, x| b.dense("d", x[0], 5).unwrap())?),
        ("conv1d", check_layer("conv1d", &[&[9, 3]], |b, x| b.conv1d("c", x[0], 4, 3).unwrap())?),
        (
            "relu",
            check_layer("relu", &[&[8]], |b, x| {
                let d = b.dense("d", x[0], 6).unwrap();
                b.relu("r", d).unwrap()
            })?,
        ),
        (
            "tanh",
            check_layer("tanh", &[&[8]], |b, x| {
                let d = b.dense("d", x[0], 6).unwrap();
                b.tanh("t", d).unwrap()
            })?,
        ),
        (
            "dropout",
            check_layer("dropout", &[&[8]], |b, x| {
                let d = b.dense("d", x[0], 6).unwrap();
                b.dropout("drop", d, 0.2).unwrap()
            })?,
        ),
        ("flatten", check_layer("flatten", &[&[4, 3]], |b, x| b.flatten("f", x[0]).unwrap())?),
        (
            "concat",
            check_layer("concat", &[&[4], &[2, 3], &[5]], |b, x| {
                let f = b.flatten("f", x[1]).unwrap();
                b.concat("cat", &[x[0], f, x[2]]).unwrap()
            })?,
        ),
    ];

    let v2 = BeamsNet::v2(BeamsNetV2Config::default(), &mut rng_from_seed(21)).map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(22);
    let (past, beams, target) = (randn(&[3, 4], &mut rng), randn(&[4], &mut rng), randn(&[3], &mut rng));
    reports.push(("v2", grad_check(v2.model(), &[&past, &beams], &target, 1e-6).map_err(|e| e.to_string())?));

    let v1 = BeamsNet::v1(BeamsNetV1Config::default(), &mut rng_from_seed(31)).map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(32);
    let (accel, gyro) = (randn(&[100, 3], &mut rng), randn(&[100, 3], &mut rng));
    let (beams, target) = (randn(&[4], &mut rng), randn(&[3], &mut rng));
    let r = grad_check_sampled(v1.model(), &[&accel, &gyro, &beams], &target, 1e-6, Some(40), &mut rng)
        .map_err(|e| e.to_string())?;
    reports.push(("v1 (sampled)", r));

    let worst = reports.iter().map(|(_, r)| r.max_rel_error()).fold(0.0, f64::max);
    for (name, r) in &reports {
        ensure(r.max_rel_error() < 1e-4, || format!("{name}: max rel error {:.3e}", r.max_rel_error()))?;
    }
    let secs = started.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{} checks, max rel error {worst:.2e}, {secs:.1}s", reports.len()))
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6() -> Outcome {
    let mut rng = rng_from_seed(17);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..400);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
        let xh: Vec<f64> = x.iter().map(|v| v + rng.random_range(-0.2..0.2)).collect();
        let nf = n as f64;
        let err: Vec<f64> = x.iter().zip(&xh).map(|(a, b)| a - b).collect();
        let se: f64 = err.iter().map(|e| e * e).sum();
        let ae: f64 = err.iter().map(|e| e.abs()).sum();
        let mx = x.iter().sum::<f64>() / nf;
        let tot: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
        let me = err.iter().sum::<f64>() / nf;
        let var_e = err.iter().map(|e| (e - me) * (e - me)).sum::<f64>() / nf;
        let want = [(se / nf).sqrt(), ae / nf, 1.0 - se / tot, (1.0 - var_e / (tot / nf)) * 100.0];
        let got = [
            rmse(&x, &xh).map_err(|e| e.to_string())?,
            mae(&x, &xh).map_err(|e| e.to_string())?,
            r2(&x, &xh).map_err(|e| e.to_string())?,
            vaf(&x, &xh).map_err(|e| e.to_string())?,
        ];
        for k in 0..4 {
            worst = worst.max((got[k] - want[k]).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    let x = [0.5, 1.0, 1.7, 2.2];
    let perfect = (
        rmse(&x, &x).unwrap(),
        mae(&x, &x).unwrap(),
        r2(&x, &x).unwrap(),
        vaf(&x, &x).unwrap(),
    );
    ensure(perfect == (0.0, 0.0, 1.0, 100.0), || format!("perfect prediction gives {perfect:?}"))?;
    Ok(format!("max deviation {worst:.1e} over 100 series, perfect = (0, 0, 1, 100)"))
}

// ---------------------------------------------------------------- criteria 3 and 4

struct SimResults {
    /// speed → (LS, V1, V2)
    by_speed: BTreeMap<u32, (EvalReport, EvalReport, EvalReport)>,
    secs: f64,
}

fn run_simulation(work: &Path) -> Result<SimResults, String> {
    let started = Instant::now();
    let sim = work.join("sim");
    beamsnet(&["simulate", "--speed", "1,2,3", "--duration", "7200", "--out", s(&sim)])?;
    let mut by_speed = BTreeMap::new();
    for speed in [1u32, 2, 3] {
        let mission = sim.join(format!("sim_{speed}.00mps"));
        let w = work.join(format!("speed_{speed}"));
        let (ls1, v1) = train_eval(&mission, "v1", &w, &[])?;
        let (ls2, v2) = train_eval(&mission, "v2", &w, &[])?;
        ensure(ls1 == ls2, || format!("LS baselines differ between variants at {speed} m/s"))?;
        by_speed.insert(speed, (ls1, v1, v2));
    }
    Ok(SimResults {
        by_speed,
        secs: started.elapsed().as_secs_f64(),
    })
}

fn criterion_3(r: &Result<SimResults, String>) -> Outcome {
    let r = r.as_ref().map_err(|e| e.clone())?;
    let impr = |e: &EvalReport| e.improvement_vs_baseline.expect("baseline set");
    let mut parts = Vec::new();
    for (speed, (ls, v1, v2)) in &r.by_speed {
        rmse_not_below_mae(&[ls, v1, v2])?;
        parts.push(format!("{speed} m/s V1 {:.1}% V2 {:.1}%", impr(v1), impr(v2)));
        ensure(impr(v1) >= 50.0 && impr(v2) >= 50.0, || format!("below 50%: {}", parts.join(", ")))?;
    }
    let (_, a1, a2) = &r.by_speed[&1];
    let (_, c1, c2) = &r.by_speed[&3];
    let trend_v1 = impr(c1) > impr(a1);
    let trend_v2 = impr(c2) > impr(a2);
    ensure(trend_v1 || trend_v2, || format!("no variant improves more at 3 m/s than at 1 m/s: {}", parts.join(", ")))?;
    Ok(format!(
        "{}; trend holds for {} ({:.0}s)",
        parts.join(", "),
        match (trend_v1, trend_v2) {
            (true, true) => "V1 and V2",
            (true, false) => "V1",
            _ => "V2",
        },
        r.secs
    ))
}

fn criterion_4(r: &Result<SimResults, String>) -> Outcome {
    let r = r.as_ref().map_err(|e| e.clone())?;
    let ls: Vec<f64> = r.by_speed.values().map(|(ls, _, _)| ls.rmse).collect();
    ensure(ls.windows(2).all(|w| w[1] > w[0]), || format!("LS RMSE not increasing: {ls:?}"))?;
    Ok(format!("LS RMSE {:.5} < {:.5} < {:.5} m/s", ls[0], ls[1], ls[2]))
}

// ---------------------------------------------------------------- criteria 5 and 8

fn make_fixture(work: &Path) -> Result<PathBuf, String> {
    let dir = work.join("fixture");
    if !dir.exists() {
        beamsnet(&["make-fixture", "--out", s(&dir)])?;
    }
    Ok(dir)
}

fn criterion_5(work: &Path) -> Outcome {
    let started = Instant::now();
    let fixture = make_fixture(work)?;
    let w = work.join("recorded");
    let (ls1, v1) = train_eval(&fixture, "v1", &w, &[])?;
    let (ls2, v2) = train_eval(&fixture, "v2", &w, &[])?;
    ensure(ls1 == ls2, || "LS baselines differ between variants".into())?;
    rmse_not_below_mae(&[&ls1, &v1, &v2])?;
    let (i1, i2) = (v1.improvement_vs_baseline.unwrap(), v2.improvement_vs_baseline.unwrap());
    let msg = format!(
        "LS {:.5} m/s, V1 {:.5} ({i1:.1}%), V2 {:.5} ({i2:.1}%), rmse ≥ mae in all reports ({:.0}s)",
        ls1.rmse,
        v1.rmse,
        v2.rmse,
        started.elapsed().as_secs_f64()
    );
    ensure(i1 >= 40.0 && i2 >= 40.0, || msg.clone())?;
    Ok(msg)
}

fn criterion_8(work: &Path) -> Outcome {
    let fixture = make_fixture(work)?;
    let out = work.join("sweep");
    beamsnet(&["sweep-past", "--dataset", s(&fixture), "--min-n", "2", "--max-n", "7", "--out", s(&out)])?;
    let csv = fs::read_to_string(out.join("sweep.csv")).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let n: usize = f[0].parse().map_err(|_| format!("bad row {line:?}"))?;
        let r: f64 = f[1].parse().map_err(|_| format!("bad row {line:?}"))?;
        ensure(r.is_finite() && r >= 0.0, || format!("n = {n}: rmse {r}"))?;
        rows.push((n, r));
    }
    let ns: Vec<usize> = rows.iter().map(|r| r.0).collect();
    ensure(ns == (2..=7).collect::<Vec<_>>(), || format!("rows for n = {ns:?}"))?;
    ensure(out.join("sweep.svg").exists(), || "sweep.svg missing".into())?;
    let best = rows.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    Ok(format!("6 rows, lowest RMSE {:.5} m/s at n = {}", best.1, best.0))
}

// ---------------------------------------------------------------- criterion 7

fn dir_files(dir: &Path) -> Result<BTreeMap<PathBuf, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).map_err(|e| e.to_string())? {
            let p = e.map_err(|e| e.to_string())?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let name = p.file_name().unwrap().to_string_lossy();
                // config.json records the output path; wall-clock times are not reproducible
                if name != "config.json" && name != "timing.json" {
                    out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).map_err(|e| e.to_string())?);
                }
            }
        }
    }
    Ok(out)
}

fn same_outputs(a: &Path, b: &Path) -> Result<usize, String> {
    let (fa, fb) = (dir_files(a)?, dir_files(b)?);
    ensure(!fa.is_empty(), || format!("{} is empty", a.display()))?;
    ensure(fa.keys().eq(fb.keys()), || format!("{} and {} hold different files", a.display(), b.display()))?;
    for (k, v) in &fa {
        ensure(fb[k] == *v, || format!("{} differs between runs", k.display()))?;
    }
    Ok(fa.len())
}

fn criterion_7(work: &Path) -> Outcome {
    let w = work.join("determinism");
    let mut compared = 0;
    let replay = |dir: &Path, copy: &Path| beamsnet(&["replay", s(&dir.join("config.json")), "--out", s(copy)]);

    let (sim_a, sim_b) = (w.join("sim_a"), w.join("sim_b"));
    beamsnet(&["simulate", "--speed", "1.5", "--duration", "300", "--seed", "9", "--out", s(&sim_a)])?;
    beamsnet(&["simulate", "--speed", "1.5", "--duration", "300", "--seed", "9", "--out", s(&sim_b)])?;
    compared += same_outputs(&sim_a, &sim_b)?;

    let (fx_a, fx_b) = (w.join("fixture_a"), w.join("fixture_b"));
    beamsnet(&["make-fixture", "--missions", "2", "--duration", "120", "--seed", "4", "--out", s(&fx_a)])?;
    replay(&fx_a, &fx_b)?;
    compared += same_outputs(&fx_a, &fx_b)?;

    let mission = sim_a.join("sim_1.50mps");
    for (variant, data) in [("v1", &mission), ("v2", &mission), ("v2", &fx_a)] {
        let tag = format!("{variant}_{}", data.file_name().unwrap().to_string_lossy());
        let (ta, tb) = (w.join(format!("train_{tag}_a")), w.join(format!("train_{tag}_b")));
        let args = |out: &Path| -> Vec<String> {
            ["train", "--variant", variant, "--dataset", s(data), "--epochs", "3", "--seed", "5", "--out", s(out)]
                .map(String::from)
                .to_vec()
        };
        let run = |out: &Path| beamsnet(&args(out).iter().map(String::as_str).collect::<Vec<_>>());
        run(&ta)?;
        run(&tb)?;
        compared += same_outputs(&ta, &tb)?;
        let tc = w.join(format!("train_{tag}_replay"));
        replay(&ta, &tc)?;
        compared += same_outputs(&ta, &tc)?;

        let (ea, eb) = (w.join(format!("eval_{tag}_a")), w.join(format!("eval_{tag}_b")));
        beamsnet(&["eval", "--checkpoint", s(&ta.join("model.ckpt")), "--out", s(&ea)])?;
        beamsnet(&["eval", "--checkpoint", s(&tb.join("model.ckpt")), "--out", s(&eb)])?;
        compared += same_outputs(&ea, &eb)?;
        // plot files are regenerated identically after deletion
        fs::remove_file(ea.join("rmse_bars.svg")).map_err(|e| e.to_string())?;
        replay(&ea, &ea)?;
        compared += same_outputs(&ea, &eb)?;
    }

    let (sa, sb) = (w.join("sweep_a"), w.join("sweep_b"));
    let sweep = |out: &Path| {
        beamsnet(&["sweep-past", "--dataset", s(&fx_a), "--min-n", "2", "--max-n", "4", "--epochs", "3", "--out", s(out)])
    };
    sweep(&sa)?;
    sweep(&sb)?;
    compared += same_outputs(&sa, &sb)?;
    Ok(format!("{compared} output files byte-identical across repeated and replayed runs"))
}

// ---------------------------------------------------------------- driver

fn main() {
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |n: u32| only.as_ref().is_none_or(|o| o.contains(&n));
    let tmp = tempfile::tempdir().expect("temp dir");
    let work = tmp.path();

    let sim = if wanted(3) || wanted(4) {
        Some(run_simulation(work))
    } else {
        None
    };
    let criteria: Vec<Criterion> = vec![
        (1, "geometry and LS oracle", Box::new(criterion_1)),
        (2, "gradient fidelity", Box::new(criterion_2)),
        (3, "simulation improvement over LS", Box::new(|| criterion_3(sim.as_ref().unwrap()))),
        (4, "LS RMSE grows with speed", Box::new(|| criterion_4(sim.as_ref().unwrap()))),
        (5, "recorded-style fixture", Box::new(|| criterion_5(work))),
        (6, "metrics oracle", Box::new(criterion_6)),
        (7, "CLI determinism", Box::new(|| criterion_7(work))),
        (8, "past-window sweep", Box::new(|| criterion_8(work))),
    ];

    let mut failed = 0;
    let mut lines = Vec::new();
    for (n, name, f) in &criteria {
        if !wanted(*n) {
            continue;
        }
        let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let line = match res {
            Ok(detail) => format!("criterion {n} PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                format!("criterion {n} FAIL  {name}: {detail}")
            }
        };
        println!("{line}");
        lines.push(line);
    }
    println!("\nacceptance summary:");
    for l in &lines {
        println!("  {l}");
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
