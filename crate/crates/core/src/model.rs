//! Physical parameters and detector configuration.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::{self, PulseSequence};

/// Mass of a rubidium-87 atom in kg.
pub const RB87_MASS_KG: f64 = 86.909_180_527 * 1.660_539_066_60e-27;
/// Boltzmann constant in J/K.
pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;

/// Interferometer geometry family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Geometry {
    #[serde(rename = "sl")]
    SingleLoop,
    #[serde(rename = "ftl")]
    TripleLoop,
}

impl Geometry {
    pub fn tag(self) -> &'static str {
        match self {
            Geometry::SingleLoop => "sl",
            Geometry::TripleLoop => "ftl",
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sl" | "single-loop" | "single_loop" => Ok(Geometry::SingleLoop),
            "ftl" | "triple-loop" | "triple_loop" | "folded-triple-loop" => {
                Ok(Geometry::TripleLoop)
            }
            other => Err(Error::invalid(format!(
                "unknown geometry `{other}` (expected `sl` or `ftl`)"
            ))),
        }
    }
}

/// Environment constants, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub speed_of_light: f64,
    pub gravity: f64,
    /// Horizontal gravity-gradient component Γ, 1/s².
    pub gravity_gradient: f64,
    /// Projected Earth rotation rate Ω, rad/s.
    pub earth_rotation: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            speed_of_light: 299_792_458.0,
            gravity: 9.81,
            gravity_gradient: 1.5e-6,
            earth_rotation: 5.75e-5,
        }
    }
}

impl PhysicalConstants {
    fn check(&self, errs: &mut Vec<String>) {
        positive(errs, "speed_of_light_m_per_s", self.speed_of_light);
        positive(errs, "gravity_m_per_s2", self.gravity);
        positive(errs, "gravity_gradient_per_s2", self.gravity_gradient);
        positive(errs, "earth_rotation_rad_per_s", self.earth_rotation);
    }
}

/// Twin-lattice beam splitter: symmetric transfer of `photon_recoils` per side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterSpec {
    pub photon_recoils: f64,
    pub wavelength: f64,
}

impl Default for BeamSplitterSpec {
    fn default() -> Self {
        Self {
            photon_recoils: 1000.0,
            wavelength: 780e-9,
        }
    }
}

impl BeamSplitterSpec {
    /// Effective differential wave number, rad/m.
    ///
    /// Counts both directions of the symmetric transfer, so 1000 recoils per
    /// side give `2000 · 2π/λ`.
    pub fn wave_number(&self) -> f64 {
        2.0 * self.photon_recoils * std::f64::consts::TAU / self.wavelength
    }

    fn check(&self, errs: &mut Vec<String>) {
        positive(errs, "photon_recoils", self.photon_recoils);
        positive(errs, "wavelength_m", self.wavelength);
    }
}

/// Atomic source and launch parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSource {
    pub atoms_per_shot: f64,
    pub shot_rate: f64,
    pub initial_radius: f64,
    pub expansion_rate: f64,
    pub squeezing_db: f64,
    /// Vertical distance between source and beam-splitting zone, m.
    pub source_distance: f64,
    /// Upward launch velocity; `None` picks the geometry's nominal value.
    pub launch_velocity: Option<f64>,
}

impl Default for AtomSource {
    fn default() -> Self {
        Self {
            atoms_per_shot: 1e9,
            shot_rate: 10.0,
            initial_radius: 4.3e-5,
            expansion_rate: 1e-4,
            squeezing_db: 20.0,
            source_distance: 0.3,
            launch_velocity: None,
        }
    }
}

impl AtomSource {
    /// Launch velocity used for angle conversions: `gT` for the single loop,
    /// `gT/2` for the folded geometries.
    pub fn launch_velocity_for(&self, geometry: Geometry, gravity: f64, t: f64) -> f64 {
        self.launch_velocity.unwrap_or(match geometry {
            Geometry::SingleLoop => gravity * t,
            Geometry::TripleLoop => 0.5 * gravity * t,
        })
    }

    fn check(&self, errs: &mut Vec<String>) {
        if !(self.atoms_per_shot >= 1.0 && self.atoms_per_shot.is_finite()) {
            errs.push(format!("atoms_per_shot must be >= 1, got {}", self.atoms_per_shot));
        }
        positive(errs, "shot_rate_hz", self.shot_rate);
        positive(errs, "initial_radius_m", self.initial_radius);
        positive(errs, "expansion_rate_m_per_s", self.expansion_rate);
        if !(self.squeezing_db >= 0.0 && self.squeezing_db.is_finite()) {
            errs.push(format!("squeezing_db must be >= 0, got {}", self.squeezing_db));
        }
        positive(errs, "source_distance_m", self.source_distance);
        if let Some(v) = self.launch_velocity {
            positive(errs, "launch_velocity_m_per_s", v);
        }
    }
}

/// Full detector description.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub arm_length: f64,
    pub constants: PhysicalConstants,
    pub splitter: BeamSplitterSpec,
    pub source: AtomSource,
    pub sequence: PulseSequence,
    /// Pulse separations of the interleaved broadband channels, s.
    pub interleave_t: Vec<f64>,
    /// Share the atom flux between interleaved channels instead of running
    /// each at the full shot rate.
    pub split_flux: bool,
    /// Idle time between consecutive resonant-mode measurements, s.
    pub dead_time: f64,
    /// Apply the √2 uncorrelated-arms factor in requirement reports.
    pub differential_arms: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        let splitter = BeamSplitterSpec::default();
        Self {
            arm_length: 1e4,
            constants: PhysicalConstants::default(),
            splitter,
            source: AtomSource::default(),
            sequence: sequence::build_folded_triple_loop(0.26, &splitter)
                .expect("default pulse separation is positive"),
            interleave_t: vec![0.182, 0.234, 0.260],
            split_flux: false,
            dead_time: 0.1,
            differential_arms: true,
        }
    }
}

impl DetectorConfig {
    /// Collects every invariant violation instead of stopping at the first.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        positive(&mut errs, "arm_length_m", self.arm_length);
        self.constants.check(&mut errs);
        self.splitter.check(&mut errs);
        self.source.check(&mut errs);
        if self.interleave_t.is_empty() {
            errs.push("interleave_t_s must list at least one pulse separation".into());
        }
        for (i, t) in self.interleave_t.iter().enumerate() {
            if !(*t > 0.0 && t.is_finite()) {
                errs.push(format!("interleave_t_s[{i}] must be > 0, got {t}"));
            }
        }
        if !(self.dead_time >= 0.0 && self.dead_time.is_finite()) {
            errs.push(format!("dead_time_s must be >= 0, got {}", self.dead_time));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn wave_number(&self) -> f64 {
        self.splitter.wave_number()
    }

    pub fn geometry(&self) -> Geometry {
        self.sequence.geometry()
    }

    /// Rebuilds the sequence for another pulse separation, keeping its family.
    pub fn sequence_with_t(&self, t: f64) -> Result<PulseSequence> {
        self.sequence.kind.build(t, &self.splitter)
    }
}

fn positive(errs: &mut Vec<String>, name: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        errs.push(format!("{name} must be > 0, got {v}"));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_wave_number() {
        let k = BeamSplitterSpec::default().wave_number();
        let expected = 2000.0 * std::f64::consts::TAU / 780e-9;
        assert!(((k - expected) / expected).abs() < 1e-12);
        assert!(((k - 1.611e10) / 1.611e10).abs() < 1e-3);
    }

    #[test]
    fn default_config_is_valid() {
        let c = DetectorConfig::default();
        c.validate().unwrap();
        assert_eq!(c.arm_length, 1e4);
        assert_eq!(c.source.atoms_per_shot, 1e9);
        assert_eq!(c.constants.gravity_gradient, 1.5e-6);
        assert_eq!(c.sequence.pulse_separation, 0.26);
    }

    #[test]
    fn validation_aggregates() {
        let mut c = DetectorConfig::default();
        c.arm_length = -1.0;
        c.source.shot_rate = 0.0;
        c.interleave_t.clear();
        match c.validate() {
            Err(Error::Validation(v)) => assert_eq!(v.len(), 3, "{v:?}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn launch_velocity_defaults() {
        let s = AtomSource::default();
        assert_eq!(s.launch_velocity_for(Geometry::SingleLoop, 9.81, 0.26), 9.81 * 0.26);
        assert_eq!(s.launch_velocity_for(Geometry::TripleLoop, 9.81, 0.26), 0.5 * 9.81 * 0.26);
    }

    #[test]
    fn geometry_parse() {
        assert_eq!("SL".parse::<Geometry>().unwrap(), Geometry::SingleLoop);
        assert_eq!("ftl".parse::<Geometry>().unwrap(), Geometry::TripleLoop);
        assert!("mzi".parse::<Geometry>().is_err());
    }
}
