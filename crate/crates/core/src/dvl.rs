//! Janus beam geometry, the beam error model and the least-squares
//! velocity estimator.
//!
//! Beam `i` (0-based here) points along
//! `[cos ψ_i sin α, sin ψ_i sin α, cos α]` with `ψ_i = i·π/2 + π/4`, so the
//! four transducers sit at 45°, 135°, 225° and 315° of yaw.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::seed::Rng;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DvlError {
    #[error("invalid beam geometry: pitch {0} rad is outside (0, π/2)")]
    InvalidGeometry(f64),
    #[error("beam geometry is rank deficient")]
    RankDeficient,
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("{0} must be positive, got {1}")]
    Domain(&'static str, f64),
    #[error("invalid error parameters: {0}")]
    InvalidParams(String),
}

/// Velocities along the four beam axes, m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BeamVector(pub [f64; 4]);

/// Vehicle velocity in the DVL body frame, m/s.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BodyVelocity(pub [f64; 3]);

impl BeamVector {
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl BodyVelocity {
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    pitch: f64,
    yaw: [f64; 4],
    h: [[f64; 3]; 4],
    h_pinv: [[f64; 4]; 3],
    /// (HᵀH)⁻¹, kept for covariance queries.
    normal_inv: [[f64; 3]; 3],
}

/// Default transducer pitch: 20°.
pub const DEFAULT_PITCH_DEG: f64 = 20.0;

impl BeamGeometry {
    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn yaw(&self) -> [f64; 4] {
        self.yaw
    }

    /// The 4×3 beam direction matrix.
    pub fn h(&self) -> &[[f64; 3]; 4] {
        &self.h
    }

    /// The 3×4 pseudo-inverse `(HᵀH)⁻¹Hᵀ`.
    pub fn h_pinv(&self) -> &[[f64; 4]; 3] {
        &self.h_pinv
    }

    /// Covariance of the LS estimate under i.i.d. beam noise of std `sigma`:
    /// `σ²(HᵀH)⁻¹`.
    pub fn ls_covariance(&self, sigma: f64) -> [[f64; 3]; 3] {
        let mut c = self.normal_inv;
        for row in c.iter_mut() {
            for x in row.iter_mut() {
                *x *= sigma * sigma;
            }
        }
        c
    }
}

impl Default for BeamGeometry {
    fn default() -> Self {
        build_geometry(DEFAULT_PITCH_DEG.to_radians()).expect("default pitch is valid")
    }
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if !det.is_finite() || det.abs() < 1e-12 {
        return None;
    }
    let inv_det = 1.0 / det;
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            // adjugate: cofactor of (j, i)
            let (r0, r1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            *x = sign * minor * inv_det;
        }
    }
    Some(out)
}

/// Build the Janus geometry for a common transducer pitch `alpha` (radians).
pub fn build_geometry(alpha: f64) -> Result<BeamGeometry, DvlError> {
    if !(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2) {
        return Err(DvlError::InvalidGeometry(alpha));
    }
    let mut yaw = [0.0; 4];
    let mut h = [[0.0; 3]; 4];
    for i in 0..4 {
        let psi = i as f64 * std::f64::consts::FRAC_PI_2 + std::f64::consts::FRAC_PI_4;
        yaw[i] = psi;
        h[i] = [psi.cos() * alpha.sin(), psi.sin() * alpha.sin(), alpha.cos()];
    }

    let mut hth = [[0.0; 3]; 3];
    for (r, row) in hth.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = (0..4).map(|k| h[k][r] * h[k][c]).sum();
        }
    }
    let normal_inv = invert3(&hth).ok_or(DvlError::RankDeficient)?;
    let mut h_pinv = [[0.0; 4]; 3];
    for (r, row) in h_pinv.iter_mut().enumerate() {
        for (k, x) in row.iter_mut().enumerate() {
            *x = (0..3).map(|c| normal_inv[r][c] * h[k][c]).sum();
        }
    }
    Ok(BeamGeometry {
        pitch: alpha,
        yaw,
        h,
        h_pinv,
        normal_inv,
    })
}

/// Noise-free beam velocities `H·v`.
pub fn beams_from_velocity(geom: &BeamGeometry, v: BodyVelocity) -> Result<BeamVector, DvlError> {
    if !v.is_finite() {
        return Err(DvlError::NonFinite("body velocity"));
    }
    Ok(BeamVector(project(geom, &v.0)))
}

#[inline]
fn project(geom: &BeamGeometry, v: &[f64; 3]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(geom.h.iter()) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

/// Per-beam bias, scale factor and white Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamErrorParams {
    /// m/s
    pub bias: [f64; 4],
    /// Fraction, e.g. 0.007 for 0.7 %.
    pub scale: [f64; 4],
    /// m/s
    pub noise_std: f64,
    pub seed: u64,
}

impl BeamErrorParams {
    /// 0.7 % scale factor, 0.0001 m/s bias and 0.042 m/s noise on every beam.
    pub fn reference(seed: u64) -> Self {
        Self {
            bias: [0.0001; 4],
            scale: [0.007; 4],
            noise_std: 0.042,
            seed,
        }
    }

    pub fn zero(seed: u64) -> Self {
        Self {
            bias: [0.0; 4],
            scale: [0.0; 4],
            noise_std: 0.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), DvlError> {
        if !(self.noise_std >= 0.0) || !self.noise_std.is_finite() {
            return Err(DvlError::InvalidParams(format!(
                "noise_std must be >= 0, got {}",
                self.noise_std
            )));
        }
        if let Some(s) = self.scale.iter().find(|s| !(**s > -1.0) || !s.is_finite()) {
            return Err(DvlError::InvalidParams(format!(
                "scale entries must be > -1, got {s}"
            )));
        }
        if self.bias.iter().any(|b| !b.is_finite()) {
            return Err(DvlError::InvalidParams("bias must be finite".into()));
        }
        Ok(())
    }
}

/// Apply the beam error model `y = (H·v)⊙(1 + s) + b + n`.
///
/// Always consumes four standard-normal draws from `rng`, even when
/// `noise_std` is zero, so stream positions do not depend on parameters.
pub fn corrupt_beams(
    geom: &BeamGeometry,
    v: BodyVelocity,
    p: &BeamErrorParams,
    rng: &mut Rng,
) -> BeamVector {
    corrupt_clean_beams(BeamVector(project(geom, &v.0)), p, rng)
}

/// The error model applied to beams that are already `H·v`.
pub fn corrupt_clean_beams(clean: BeamVector, p: &BeamErrorParams, rng: &mut Rng) -> BeamVector {
    let mut y = [0.0; 4];
    for (i, yi) in y.iter_mut().enumerate() {
        let n: f64 = StandardNormal.sample(rng);
        *yi = clean.0[i] * (1.0 + p.scale[i]) + p.bias[i] + p.noise_std * n;
    }
    BeamVector(y)
}

/// Least-squares velocity `(HᵀH)⁻¹Hᵀ·y`.
pub fn ls_estimate(geom: &BeamGeometry, y: BeamVector) -> BodyVelocity {
    let mut v = [0.0; 3];
    for (o, row) in v.iter_mut().zip(geom.h_pinv.iter()) {
        *o = row.iter().zip(y.0.iter()).map(|(a, b)| a * b).sum();
    }
    BodyVelocity(v)
}

/// Beam velocities from Doppler shifts: `(c / 2 f_t)·Δf`.
pub fn beam_velocity_from_freq_shift(
    delta_f: [f64; 4],
    f_t: f64,
    c: f64,
) -> Result<BeamVector, DvlError> {
    check_acoustic(f_t, c)?;
    let k = c / (2.0 * f_t);
    Ok(BeamVector(delta_f.map(|d| k * d)))
}

/// Inverse of [`beam_velocity_from_freq_shift`]: `Δf ≈ 2 f_t υ / c`.
pub fn freq_shift_from_beam(beams: BeamVector, f_t: f64, c: f64) -> Result<[f64; 4], DvlError> {
    check_acoustic(f_t, c)?;
    let k = 2.0 * f_t / c;
    Ok(beams.0.map(|v| k * v))
}

fn check_acoustic(f_t: f64, c: f64) -> Result<(), DvlError> {
    if !(f_t > 0.0) {
        return Err(DvlError::Domain("transmit frequency", f_t));
    }
    if !(c > 0.0) {
        return Err(DvlError::Domain("speed of sound", c));
    }
    Ok(())
}
