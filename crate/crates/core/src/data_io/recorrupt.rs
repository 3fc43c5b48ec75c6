//! Beam synthesis for recorded missions.
//!
//! A sea log only carries the DVL velocity solution. That velocity is taken
//! as ground truth, projected onto the beams and corrupted with the beam
//! error model, giving the network inputs a known truth to regress to.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{DataError, MissionFile};
use crate::dvl::{corrupt_beams, BeamErrorParams, BeamGeometry, BodyVelocity};
use crate::seed::component_rng;
use crate::sim::{build_dataset_from_missions, Dataset};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RecorruptOptions {
    /// Perturb the recorded velocity with white noise of this std (m/s)
    /// before projecting it onto the beams. The target stays the recorded
    /// velocity. Off by default.
    pub pre_noise_std: Option<f64>,
}

/// Replace the beam columns of `mission` with corrupted projections of its
/// recorded velocity. Mission `index` selects an independent noise stream.
pub fn recorrupt_mission(
    mission: &MissionFile,
    index: usize,
    geom: &BeamGeometry,
    p: &BeamErrorParams,
    opts: &RecorruptOptions,
) -> Result<MissionFile, DataError> {
    p.validate()?;
    if mission.dvl.velocity.is_empty() || mission.dvl.velocity.len() != mission.dvl.t.len() {
        return Err(DataError::MissingVelocity(mission.meta.mission_id.clone()));
    }
    if let Some(s) = opts.pre_noise_std {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(DataError::Metadata(format!("pre-noise std must be >= 0, got {s}")));
        }
    }
    let mut rng = component_rng(p.seed, "recorrupt", index as u64);
    let beams = mission
        .dvl
        .velocity
        .iter()
        .map(|v| {
            let mut v = *v;
            if let Some(s) = opts.pre_noise_std {
                for x in v.0.iter_mut() {
                    let n: f64 = StandardNormal.sample(&mut rng);
                    *x += s * n;
                }
            }
            corrupt_beams(geom, BodyVelocity(v.0), p, &mut rng)
        })
        .collect();
    let mut out = mission.clone();
    out.dvl.beams = Some(beams);
    Ok(out)
}

/// Re-corrupt every mission and build one dataset over the concatenation
/// with the chronological 75/25 split.
pub fn recorrupt_recorded(
    missions: &[MissionFile],
    geom: &BeamGeometry,
    p: &BeamErrorParams,
    opts: &RecorruptOptions,
    n_past: usize,
) -> Result<Dataset, DataError> {
    let corrupted = crate::par::map_indexed(missions.len(), |i| recorrupt_mission(&missions[i], i, geom, p, opts))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(build_dataset_from_missions(&corrupted, n_past)?)
}
