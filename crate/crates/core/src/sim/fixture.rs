//! Recorded-style mission fixtures.
//!
//! These stand in for real AUV logs: each mission is a sequence of straight
//! legs at a few cruise speeds, joined by acceleration-limited speed changes
//! and constant-rate turns, with small sway/heave oscillations. The IMU
//! stream is kinematically consistent with the motion and carries the usual
//! speed-dependent signatures of a torpedo-shaped vehicle: a trim pitch that
//! shrinks with speed and propeller vibration whose amplitude and frequency
//! scale with speed. The DVL table holds only the vehicle velocity (no
//! beams), exactly like a converted sea log.

use std::f64::consts::PI;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{corrupt_imu, ImuErrorParams, SimError};
use crate::data_io::mission::{DvlTable, ImuTable, MissionFile, MissionKind, MissionMeta};
use crate::dvl::BodyVelocity;
use crate::seed::{component_rng, derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub missions: usize,
    /// Per-mission duration, s.
    pub duration: f64,
    pub imu_rate: f64,
    pub dvl_rate: f64,
    pub gravity: f64,
    /// Commanded speeds each leg picks from, m/s.
    pub cruise_speeds: Vec<f64>,
    /// Leg length range, s.
    pub leg_duration: (f64, f64),
    /// Longitudinal acceleration limit during speed changes, m/s².
    pub max_accel: f64,
    /// Turn rate, rad/s.
    pub turn_rate: f64,
    /// Trim pitch at 1 m/s, rad; trim ∝ 1/speed.
    pub trim_at_unit_speed: f64,
    /// Vibration amplitude per m/s of speed, m/s².
    pub vibration_gain: f64,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            missions: 9,
            duration: 400.0,
            imu_rate: 100.0,
            dvl_rate: 1.0,
            gravity: 9.81,
            cruise_speeds: vec![1.0, 1.5, 2.0],
            leg_duration: (40.0, 110.0),
            max_accel: 0.05,
            turn_rate: 3f64.to_radians(),
            trim_at_unit_speed: 0.08,
            vibration_gain: 0.05,
            seed: 0,
        }
    }
}

impl FixtureSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidSpec(m.to_string()));
        if self.missions == 0 {
            return bad("at least one mission");
        }
        if !(self.duration > 0.0) {
            return bad("duration must be > 0");
        }
        if self.cruise_speeds.is_empty() || self.cruise_speeds.iter().any(|s| !(*s > 0.0)) {
            return bad("cruise speeds must be positive");
        }
        if !(self.leg_duration.0 > 0.0 && self.leg_duration.1 >= self.leg_duration.0) {
            return bad("invalid leg duration range");
        }
        if !(self.max_accel > 0.0) {
            return bad("max_accel must be > 0");
        }
        let ratio = self.imu_rate / self.dvl_rate;
        if !(ratio >= 1.0) || (ratio - ratio.round()).abs() > 1e-9 {
            return bad("imu rate must be an integer multiple of dvl rate");
        }
        Ok(())
    }
}

struct Leg {
    start: f64,
    speed: f64,
    turn: f64,
    turn_len: f64,
}

/// Kinematic state sampled at IMU rate.
struct Profile {
    u: Vec<f64>,
    v: Vec<f64>,
    w: Vec<f64>,
    yaw_rate: Vec<f64>,
}

fn plan_legs(spec: &FixtureSpec, rng: &mut crate::seed::Rng) -> Vec<Leg> {
    let mut legs = Vec::new();
    let mut t = 0.0;
    while t < spec.duration {
        let speed = spec.cruise_speeds[rng.random_range(0..spec.cruise_speeds.len())];
        let turn = match rng.random_range(0..3) {
            0 => 0.0,
            1 => spec.turn_rate,
            _ => -spec.turn_rate,
        };
        legs.push(Leg {
            start: t,
            speed,
            turn,
            turn_len: rng.random_range(10.0..30.0),
        });
        t += rng.random_range(spec.leg_duration.0..=spec.leg_duration.1);
    }
    legs
}

fn profile(spec: &FixtureSpec, legs: &[Leg], n: usize, rng: &mut crate::seed::Rng) -> Profile {
    let dt = 1.0 / spec.imu_rate;
    let sway = (rng.random_range(0.01..0.03), rng.random_range(40.0..90.0), rng.random_range(0.0..2.0 * PI));
    let heave = (rng.random_range(0.005..0.015), rng.random_range(30.0..70.0), rng.random_range(0.0..2.0 * PI));
    let mut p = Profile {
        u: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        w: Vec::with_capacity(n),
        yaw_rate: Vec::with_capacity(n),
    };
    let mut u = legs[0].speed;
    let mut leg = 0;
    for j in 0..n {
        let t = j as f64 * dt;
        while leg + 1 < legs.len() && legs[leg + 1].start <= t {
            leg += 1;
        }
        let l = &legs[leg];
        // rate-limited approach to the commanded speed
        let step = spec.max_accel * dt;
        u += (l.speed - u).clamp(-step, step);
        p.u.push(u);
        p.v.push(sway.0 * (2.0 * PI * t / sway.1 + sway.2).sin());
        p.w.push(heave.0 * (2.0 * PI * t / heave.1 + heave.2).sin());
        p.yaw_rate.push(if t - l.start < l.turn_len { l.turn } else { 0.0 });
    }
    p
}

fn derivative(x: &[f64], dt: f64) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            if b == a {
                0.0
            } else {
                (x[b] - x[a]) / ((b - a) as f64 * dt)
            }
        })
        .collect()
}

/// Generate fixture mission `index`. Every random choice derives from
/// `spec.seed` and the mission index.
pub fn generate_recorded_mission(spec: &FixtureSpec, index: usize, imu_errors: &ImuErrorParams) -> Result<MissionFile, SimError> {
    spec.validate()?;
    imu_errors.validate()?;
    let idx = index as u64;
    let mut plan_rng = component_rng(spec.seed, "fixture_plan", idx);
    let n_imu = (spec.duration * spec.imu_rate).round() as usize;
    let n_dvl = (spec.duration * spec.dvl_rate).round() as usize;
    let dt = 1.0 / spec.imu_rate;

    let legs = plan_legs(spec, &mut plan_rng);
    let prof = profile(spec, &legs, n_imu, &mut plan_rng);
    let prop_phase: f64 = plan_rng.random_range(0.0..2.0 * PI);

    let du = derivative(&prof.u, dt);
    let dv = derivative(&prof.v, dt);
    let dw = derivative(&prof.w, dt);
    let pitch: Vec<f64> = prof.u.iter().map(|&u| spec.trim_at_unit_speed / u.max(0.2)).collect();
    let dpitch = derivative(&pitch, dt);

    let mut noise_rng = rng_from_seed(derive_seed(imu_errors.seed, "fixture_imu", idx));
    let mut imu = ImuTable::default();
    let mut blade_phase = prop_phase;
    for j in 0..n_imu {
        let (u, v, w) = (prof.u[j], prof.v[j], prof.w[j]);
        let th = pitch[j];
        // body rates for roll = 0: p = −ψ̇ sin θ, q = θ̇, r = ψ̇ cos θ
        let psi_dot = prof.yaw_rate[j];
        let omega = [-psi_dot * th.sin(), dpitch[j], psi_dot * th.cos()];
        // transport term ω × v
        let cross = [
            omega[1] * w - omega[2] * v,
            omega[2] * u - omega[0] * w,
            omega[0] * v - omega[1] * u,
        ];
        // blade-pass vibration: frequency and amplitude grow with speed
        blade_phase += 2.0 * PI * 7.3 * u * dt;
        let vib = spec.vibration_gain * u * blade_phase.sin();
        let g = spec.gravity;
        let accel = [
            du[j] + cross[0] + g * th.sin() + vib,
            dv[j] + cross[1],
            dw[j] + cross[2] - g * th.cos() + 0.5 * vib,
        ];
        let (a, gy) = corrupt_imu(accel, omega, imu_errors, &mut noise_rng);
        imu.t.push(j as f64 / spec.imu_rate);
        imu.accel.push(a);
        imu.gyro.push(gy);
    }

    let ratio = (spec.imu_rate / spec.dvl_rate).round() as usize;
    let mut dvl = DvlTable::default();
    for k in 0..n_dvl {
        let j = (k * ratio).min(n_imu - 1);
        dvl.t.push(k as f64 / spec.dvl_rate);
        dvl.velocity.push(BodyVelocity([prof.u[j], prof.v[j], prof.w[j]]));
    }

    let mut meta = MissionMeta::new(&format!("fixture_{index:02}"), MissionKind::Recorded, spec.imu_rate, spec.dvl_rate);
    meta.notes = "synthetic recorded-style mission: straight legs, turns, speed changes".into();
    meta.extra = serde_json::json!({ "fixture": spec, "index": index, "imu_errors": imu_errors });
    Ok(MissionFile {
        meta,
        imu,
        dvl,
        warnings: Vec::new(),
    })
}

pub fn generate_fixture(spec: &FixtureSpec, imu_errors: &ImuErrorParams) -> Result<Vec<MissionFile>, SimError> {
    spec.validate()?;
    crate::par::map_indexed(spec.missions, |i| generate_recorded_mission(spec, i, imu_errors))
        .into_iter()
        .collect()
}
