//! Majorana star lists.

use spincoh_core::{coherent_fit, ket_from_angles, majorana_constellation, DirectionAngles, Vec3, DEFAULT_FIT_TOLERANCE};

use crate::config::{StarsConfig, StateSpec};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Star {
    pub angles: DirectionAngles,
    pub point: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarList {
    pub stars: Vec<Star>,
    /// Direction of the state when it is coherent.
    pub coherent: Option<DirectionAngles>,
}

/// Stars sorted by `(theta, phi)`.
pub fn compute(cfg: &StarsConfig) -> Result<StarList, CliError> {
    let amplitudes = match &cfg.state {
        StateSpec::Angles(a) => ket_from_angles(cfg.label, *a).amplitudes().to_vec(),
        StateSpec::Amplitudes(a) => a.clone(),
    };
    let failed = |e| CliError::Failure(format!("star extraction failed: {e}"));
    let constellation = majorana_constellation(&amplitudes, cfg.label).map_err(failed)?;
    let coherent = coherent_fit(&amplitudes, cfg.label, DEFAULT_FIT_TOLERANCE).map_err(failed)?;
    let mut stars = constellation
        .stars()
        .iter()
        .map(|p| Ok(Star { angles: DirectionAngles::from_vector(p).map_err(failed)?, point: *p }))
        .collect::<Result<Vec<_>, CliError>>()?;
    stars.sort_by(|a, b| {
        a.angles.theta().total_cmp(&b.angles.theta()).then(a.angles.phi().total_cmp(&b.angles.phi()))
    });
    Ok(StarList { stars, coherent })
}
