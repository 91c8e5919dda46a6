//! Spurious-phase couplings, their inversion into tolerances, and the
//! shot-noise statistics of the atomic source.
//!
//! Axis convention: `y` is the beam-splitting axis, `x` the horizontal
//! transverse axis. All couplings are linear in the quantity they constrain,
//! so inverting a phase floor is a single division.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DetectorConfig, Geometry, BOLTZMANN_J_PER_K, RB87_MASS_KG};

/// Relative gravity mismatch between the two interferometers of an arm.
pub const DEFAULT_RELATIVE_DELTA_G: f64 = 1e-7;
/// Averaging time the tolerances refer to, s.
pub const AVERAGING_TIME: f64 = 1.0;
/// Relative deviation from a reference value beyond which a warning is raised.
pub const REFERENCE_WARNING_THRESHOLD: f64 = 0.2;

/// Fixed parameters of every coupling formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetEnvironment {
    pub wave_number: f64,
    pub pulse_separation: f64,
    pub gravity: f64,
    pub gravity_gradient: f64,
    pub earth_rotation: f64,
    /// δg between the two interferometers, m/s².
    pub delta_g: f64,
    /// √2 for uncorrelated arms, 1 otherwise.
    pub differential_factor: f64,
}

impl BudgetEnvironment {
    pub fn from_config(config: &DetectorConfig) -> Self {
        let c = &config.constants;
        Self {
            wave_number: config.wave_number(),
            pulse_separation: config.sequence.pulse_separation,
            gravity: c.gravity,
            gravity_gradient: c.gravity_gradient,
            earth_rotation: c.earth_rotation,
            delta_g: DEFAULT_RELATIVE_DELTA_G * c.gravity,
            differential_factor: if config.differential_arms {
                std::f64::consts::SQRT_2
            } else {
                1.0
            },
        }
    }
}

impl Default for BudgetEnvironment {
    fn default() -> Self {
        Self::from_config(&DetectorConfig::default())
    }
}

/// Shot-to-shot deviations that couple into the phase. SI units, signed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceOffsets {
    /// Mean position along the beam axis, m.
    pub position_y: f64,
    /// Mean velocity along the beam axis, m/s.
    pub velocity_y: f64,
    /// Mean transverse velocity, m/s.
    pub velocity_x: f64,
    /// Relative relaunch pointing in the beam plane, rad.
    pub relaunch_tilt_y: f64,
    /// Relative relaunch pointing across the beam, rad.
    pub relaunch_tilt_x: f64,
    /// Beam-splitter angles: `[β, δβ₂, δβ₃, δβ₄, δβ₅]`, rad.
    pub splitter_tilts: [f64; 5],
    /// Initial-position lever arm δr of the splitter tilts, m.
    pub tilt_lever_position: f64,
    /// Initial-velocity lever arm δv of the splitter tilts, m/s.
    pub tilt_lever_velocity: f64,
}

type Prefactor = fn(&BudgetEnvironment) -> f64;

/// What a coupling's tolerance variable is and how it enters the phase.
#[derive(Debug, Clone, Copy)]
enum Law {
    /// `phase = prefactor · variable`
    Linear { prefactor: Prefactor, field: Field },
    /// `phase = prefactor · lever · Σ cᵢ βᵢ`; the variable is either the
    /// tilt scale (lever fixed) or the lever (tilts fixed at `tilt_scale`).
    Tilt {
        prefactor: Prefactor,
        coefficients: [f64; 5],
        ratios: [f64; 5],
        solve: TiltSolve,
    },
}

#[derive(Debug, Clone, Copy)]
enum TiltSolve {
    /// Solve the tilt scale with lever `δg` from the environment.
    Scale,
    /// Solve the position lever δr with tilts of the given scale.
    Position { tilt_scale: f64 },
    /// Solve the velocity lever δv with tilts of the given scale.
    Velocity { tilt_scale: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    PositionY,
    VelocityY,
    VelocityX,
    RelaunchTiltY,
    RelaunchTiltX,
}

/// Derived quantities attached to a tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Conversion {
    None,
    Position,
    Velocity,
    /// Ensemble size only; lever arms have no launch-angle meaning.
    PositionEnsemble,
    VelocityEnsemble,
}

/// One tabulated spurious-phase coupling.
#[derive(Debug, Clone)]
pub struct CouplingTerm {
    pub id: &'static str,
    pub name: &'static str,
    pub geometry: Geometry,
    pub variable: &'static str,
    pub units: &'static str,
    law: Law,
    conversion: Conversion,
    /// Reference tolerance (and, where listed, launch angle and source size)
    /// used only to flag discrepancies.
    reference: [Option<f64>; 3],
    /// Coefficient multiplier of an alternate convention worth reporting.
    alternate: Option<(f64, &'static str)>,
}

impl CouplingTerm {
    pub fn formula_id(&self) -> String {
        format!("{}.{}", self.geometry.tag(), self.id)
    }

    /// `∂φ/∂variable` at the term's fixed parameters, including the
    /// differential factor. Tilt combinations take the sign-aligned worst
    /// case of the stated ratio assignment.
    pub fn slope(&self, env: &BudgetEnvironment) -> f64 {
        env.differential_factor
            * match self.law {
                Law::Linear { prefactor, .. } => prefactor(env),
                Law::Tilt {
                    prefactor,
                    coefficients,
                    ratios,
                    solve,
                } => {
                    let aligned: f64 = coefficients.iter().zip(ratios).map(|(c, r)| (c * r).abs()).sum();
                    prefactor(env)
                        * aligned
                        * match solve {
                            TiltSolve::Scale => env.delta_g,
                            TiltSolve::Position { tilt_scale } | TiltSolve::Velocity { tilt_scale } => tilt_scale,
                        }
                }
            }
    }

    /// Slope with all involved tilts equal instead of the ratio assignment.
    fn uniform_slope(&self, env: &BudgetEnvironment) -> Option<f64> {
        match self.law {
            Law::Linear { .. } => None,
            Law::Tilt {
                coefficients,
                ratios,
                ..
            } => {
                let uniform = ratios.map(|r| if r != 0.0 { 1.0 } else { 0.0 });
                let t = CouplingTerm {
                    law: match self.law {
                        Law::Tilt { prefactor, solve, .. } => Law::Tilt {
                            prefactor,
                            coefficients,
                            ratios: uniform,
                            solve,
                        },
                        l => l,
                    },
                    ..self.clone()
                };
                Some(t.slope(env))
            }
        }
    }

    /// Offsets realising `value` of this term's variable in the worst-case
    /// sign pattern, everything else zero.
    pub fn offsets_for(&self, value: f64) -> SourceOffsets {
        let mut o = SourceOffsets::default();
        match self.law {
            Law::Linear { field, .. } => match field {
                Field::PositionY => o.position_y = value,
                Field::VelocityY => o.velocity_y = value,
                Field::VelocityX => o.velocity_x = value,
                Field::RelaunchTiltY => o.relaunch_tilt_y = value,
                Field::RelaunchTiltX => o.relaunch_tilt_x = value,
            },
            Law::Tilt {
                coefficients,
                ratios,
                solve,
                ..
            } => {
                let scale = match solve {
                    TiltSolve::Scale => value,
                    TiltSolve::Position { tilt_scale } => {
                        o.tilt_lever_position = value;
                        tilt_scale
                    }
                    TiltSolve::Velocity { tilt_scale } => {
                        o.tilt_lever_velocity = value;
                        tilt_scale
                    }
                };
                for i in 0..5 {
                    o.splitter_tilts[i] = coefficients[i].signum() * ratios[i] * scale;
                }
            }
        }
        o
    }
}

fn k_t(env: &BudgetEnvironment, p: i32) -> f64 {
    env.wave_number * env.pulse_separation.powi(p)
}

/// Signed single-loop coupling phases for the given offsets, rad.
pub fn sl_coupling_phases(env: &BudgetEnvironment, o: &SourceOffsets) -> BTreeMap<&'static str, f64> {
    let (gam, om) = (env.gravity_gradient, env.earth_rotation);
    let b = &o.splitter_tilts;
    let d = env.differential_factor;
    BTreeMap::from([
        ("gg_position", d * k_t(env, 2) * gam * o.position_y),
        ("gg_velocity", d * k_t(env, 3) * gam * o.velocity_y),
        ("sagnac_velocity", d * 2.0 * k_t(env, 2) * om * o.velocity_x),
        ("tilt_gravity", d * k_t(env, 2) * env.delta_g * (b[0] + b[1] + b[2])),
        ("tilt_position", d * env.wave_number * o.tilt_lever_position * (-b[1] + b[2])),
        ("tilt_velocity", d * 2.0 * k_t(env, 1) * o.tilt_lever_velocity * b[2]),
    ])
}

/// Signed folded-triple-loop coupling phases for the given offsets, rad.
pub fn ftl_coupling_phases(env: &BudgetEnvironment, o: &SourceOffsets) -> BTreeMap<&'static str, f64> {
    let (gam, om, g) = (env.gravity_gradient, env.earth_rotation, env.gravity);
    let b = &o.splitter_tilts;
    let d = env.differential_factor;
    BTreeMap::from([
        ("relaunch_gg", d * -(39.0 / 20.0) * k_t(env, 4) * gam * g * o.relaunch_tilt_y),
        ("relaunch_sagnac", d * 4.5 * k_t(env, 3) * g * om * o.relaunch_tilt_x),
        ("gg2_position", d * 3.75 * gam * gam * k_t(env, 4) * o.position_y),
        ("rot4_position", d * 11.25 * k_t(env, 4) * om.powi(4) * o.position_y),
        ("gg2_velocity", d * 11.25 * gam * gam * k_t(env, 5) * o.velocity_y),
        ("rot3_velocity", d * 15.0 * k_t(env, 4) * om.powi(3) * o.velocity_x),
        ("gg_rot_velocity", d * 3.75 * gam * k_t(env, 4) * om * o.velocity_x),
        (
            "tilt_gravity",
            d * 1.125 * k_t(env, 2) * env.delta_g * (b[2] - 9.0 * b[3] + 16.0 * b[4]),
        ),
        (
            "tilt_position",
            d * 0.25 * env.wave_number * o.tilt_lever_position * (-4.0 * b[1] + 5.0 * b[2] - 5.0 * b[3] + 4.0 * b[4]),
        ),
        (
            "tilt_velocity",
            d * 0.75 * k_t(env, 1) * o.tilt_lever_velocity * (3.0 * b[2] - 7.0 * b[3] - 8.0 * b[4]),
        ),
    ])
}

/// Coupling phases of either geometry.
pub fn coupling_phases(
    geometry: Geometry,
    env: &BudgetEnvironment,
    offsets: &SourceOffsets,
) -> BTreeMap<&'static str, f64> {
    match geometry {
        Geometry::SingleLoop => sl_coupling_phases(env, offsets),
        Geometry::TripleLoop => ftl_coupling_phases(env, offsets),
    }
}

const TILT_SCALE: f64 = 1e-10;

/// All tabulated couplings of a geometry.
pub fn coupling_terms(geometry: Geometry) -> Vec<CouplingTerm> {
    use Conversion as C;
    use Field as F;
    let lin = |prefactor: Prefactor, field| Law::Linear { prefactor, field };
    let term = |id, name, variable, units, law, conversion, reference| CouplingTerm {
        id,
        name,
        geometry,
        variable,
        units,
        law,
        conversion,
        reference,
        alternate: None,
    };
    match geometry {
        Geometry::SingleLoop => vec![
            term(
                "gg_position",
                "gravity gradient, mean position",
                "position_y",
                "m",
                lin(|e| k_t(e, 2) * e.gravity_gradient, F::PositionY),
                C::Position,
                [Some(4.3e-10), Some(1.4e-9), Some(4.3e-5)],
            ),
            term(
                "gg_velocity",
                "gravity gradient, mean velocity",
                "velocity_y",
                "m/s",
                lin(|e| k_t(e, 3) * e.gravity_gradient, F::VelocityY),
                C::Velocity,
                [Some(1.7e-9), Some(6.5e-10), Some(1.7e-4)],
            ),
            term(
                "sagnac_velocity",
                "Sagnac, transverse mean velocity",
                "velocity_x",
                "m/s",
                lin(|e| 2.0 * k_t(e, 2) * e.earth_rotation, F::VelocityX),
                C::Velocity,
                [Some(5.6e-12), Some(2.2e-12), Some(5.6e-7)],
            ),
            term(
                "tilt_gravity",
                "gravity mismatch, splitter pointing",
                "splitter_tilt",
                "rad",
                Law::Tilt {
                    prefactor: |e| k_t(e, 2),
                    coefficients: [1.0, 1.0, 1.0, 0.0, 0.0],
                    ratios: [1.0, 1.0, 1.0, 0.0, 0.0],
                    solve: TiltSolve::Scale,
                },
                C::None,
                [Some(1e-10), None, None],
            ),
            term(
                "tilt_position",
                "initial position, splitter pointing",
                "tilt_lever_position",
                "m",
                Law::Tilt {
                    prefactor: |e| e.wave_number,
                    coefficients: [0.0, -1.0, 1.0, 0.0, 0.0],
                    ratios: [0.0, 1.0, 1.0, 0.0, 0.0],
                    solve: TiltSolve::Position { tilt_scale: TILT_SCALE },
                },
                C::PositionEnsemble,
                [Some(3.1e-7), None, Some(9.8e-2)],
            ),
            term(
                "tilt_velocity",
                "initial velocity, splitter pointing",
                "tilt_lever_velocity",
                "m/s",
                Law::Tilt {
                    prefactor: |e| 2.0 * k_t(e, 1),
                    coefficients: [0.0, 0.0, 1.0, 0.0, 0.0],
                    ratios: [0.0, 0.0, 1.0, 0.0, 0.0],
                    solve: TiltSolve::Velocity { tilt_scale: TILT_SCALE },
                },
                C::VelocityEnsemble,
                [Some(8.4e-7), None, Some(2.7e-1)],
            ),
        ],
        Geometry::TripleLoop => {
            let mut relaunch_y = term(
                "relaunch_gg",
                "relaunch pointing, gravity gradient",
                "relaunch_tilt_y",
                "rad",
                lin(|e| -(39.0 / 20.0) * k_t(e, 4) * e.gravity_gradient * e.gravity, F::RelaunchTiltY),
                C::None,
                [Some(3.3e-10), None, None],
            );
            relaunch_y.alternate = Some((2.0, "both relaunches deviating by the full angle"));
            let mut relaunch_x = term(
                "relaunch_sagnac",
                "relaunch pointing, Sagnac",
                "relaunch_tilt_x",
                "rad",
                lin(|e| 4.5 * k_t(e, 3) * e.gravity * e.earth_rotation, F::RelaunchTiltX),
                C::None,
                [Some(1e-12), None, None],
            );
            relaunch_x.alternate = Some((2.0, "each relaunch deviating by the full angle in opposite senses"));
            vec![
                relaunch_y,
                relaunch_x,
                term(
                    "gg2_position",
                    "second-order gravity gradient, mean position",
                    "position_y",
                    "m",
                    lin(|e| 3.75 * e.gravity_gradient.powi(2) * k_t(e, 4), F::PositionY),
                    C::Position,
                    [Some(1.1e-3), Some(3.8e-3), Some(1.1e2)],
                ),
                term(
                    "rot4_position",
                    "fourth-order rotation, mean position",
                    "position_y",
                    "m",
                    lin(|e| 11.25 * k_t(e, 4) * e.earth_rotation.powi(4), F::PositionY),
                    C::Position,
                    [Some(7.8e1), Some(2.6e2), Some(7.8e6)],
                ),
                term(
                    "gg2_velocity",
                    "second-order gravity gradient, mean velocity",
                    "velocity_y",
                    "m/s",
                    lin(|e| 11.25 * e.gravity_gradient.powi(2) * k_t(e, 5), F::VelocityY),
                    C::Velocity,
                    [Some(1.5e-3), Some(1.1e-3), Some(1.5e2)],
                ),
                term(
                    "rot3_velocity",
                    "third-order rotation, transverse mean velocity",
                    "velocity_x",
                    "m/s",
                    lin(|e| 15.0 * k_t(e, 4) * e.earth_rotation.powi(3), F::VelocityX),
                    C::Velocity,
                    [Some(3.4e-3), Some(2.6e-3), Some(3.4e2)],
                ),
                term(
                    "gg_rot_velocity",
                    "gravity gradient and rotation, transverse mean velocity",
                    "velocity_x",
                    "m/s",
                    lin(|e| 3.75 * e.gravity_gradient * k_t(e, 4) * e.earth_rotation, F::VelocityX),
                    C::Velocity,
                    [Some(3e-5), Some(2.3e-5), Some(3.0)],
                ),
                term(
                    "tilt_gravity",
                    "gravity mismatch, splitter pointing",
                    "splitter_tilt",
                    "rad",
                    Law::Tilt {
                        prefactor: |e| 1.125 * k_t(e, 2),
                        coefficients: [0.0, 0.0, 1.0, -9.0, 16.0],
                        ratios: [0.0, 0.0, 16.0, 9.0, 1.0],
                        solve: TiltSolve::Scale,
                    },
                    C::None,
                    [Some(4.8e-11), None, None],
                ),
                term(
                    "tilt_position",
                    "initial position, splitter pointing",
                    "tilt_lever_position",
                    "m",
                    Law::Tilt {
                        prefactor: |e| 0.25 * e.wave_number,
                        coefficients: [0.0, -4.0, 5.0, -5.0, 4.0],
                        ratios: [0.0, 0.8, 1.0, 1.0, 0.8],
                        solve: TiltSolve::Position { tilt_scale: TILT_SCALE },
                    },
                    C::PositionEnsemble,
                    [Some(1.8e-7), None, Some(1.8e-2)],
                ),
                term(
                    "tilt_velocity",
                    "initial velocity, splitter pointing",
                    "tilt_lever_velocity",
                    "m/s",
                    Law::Tilt {
                        prefactor: |e| 0.75 * k_t(e, 1),
                        coefficients: [0.0, 0.0, 3.0, -7.0, -8.0],
                        ratios: [0.0, 0.0, 8.0 / 3.0, 8.0 / 7.0, 1.0],
                        solve: TiltSolve::Velocity { tilt_scale: TILT_SCALE },
                    },
                    C::VelocityEnsemble,
                    [Some(1.6e-7), None, Some(1.6e-2)],
                ),
            ]
        }
    }
}

/// Looks a coupling up by its short id (`gg_position`) or formula id (`sl.gg_position`).
pub fn coupling_term(geometry: Geometry, id: &str) -> Result<CouplingTerm> {
    coupling_terms(geometry)
        .into_iter()
        .find(|t| t.id == id || t.formula_id() == id)
        .ok_or_else(|| Error::invalid(format!("no {geometry} coupling `{id}`")))
}

/// Value of the term's variable at which `|φ|` equals `phase_floor`.
pub fn invert_requirement(term: &CouplingTerm, phase_floor: f64, env: &BudgetEnvironment) -> Result<f64> {
    if !(phase_floor > 0.0 && phase_floor.is_finite()) {
        return Err(Error::invalid(format!("phase floor must be > 0, got {phase_floor}")));
    }
    let slope = term.slope(env).abs();
    if !(slope > 0.0 && slope.is_finite()) {
        return Err(Error::DegenerateCoupling(term.formula_id()));
    }
    Ok(phase_floor / slope)
}

/// Shot-noise-limited instability of the ensemble's mean position and
/// velocity after `cycles` shots of `atoms` atoms each.
pub fn source_statistics(initial_radius: f64, expansion_rate: f64, atoms: f64, cycles: f64) -> Result<(f64, f64)> {
    if !(atoms >= 1.0 && cycles >= 1.0) {
        return Err(Error::invalid(format!(
            "need atoms >= 1 and cycles >= 1, got {atoms} and {cycles}"
        )));
    }
    let n = (atoms * cycles).sqrt();
    Ok((initial_radius / n, expansion_rate / n))
}

/// Detection-limited phase noise `10^(−dB/20) / √(N·rate)`, rad/√Hz.
pub fn detection_phase_asd(atoms: f64, rate: f64, squeezing_db: f64) -> Result<f64> {
    if !(atoms >= 1.0) {
        return Err(Error::invalid(format!("atom number must be >= 1, got {atoms}")));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::invalid(format!("shot rate must be > 0, got {rate}")));
    }
    if !(squeezing_db >= 0.0) {
        return Err(Error::invalid(format!("squeezing must be >= 0 dB, got {squeezing_db}")));
    }
    Ok(10f64.powf(-squeezing_db / 20.0) / atoms.sqrt() / rate.sqrt())
}

/// `m·σ_v²/k_B` for rubidium-87, K.
pub fn kinetic_temperature(expansion_rate: f64) -> f64 {
    RB87_MASS_KG * expansion_rate * expansion_rate / BOLTZMANN_J_PER_K
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    /// Directly inverted tolerance.
    Tolerance,
    /// Same coupling with all involved splitter tilts equal.
    UniformTilt,
    LaunchAngle,
    InitialRadius,
    ExpansionRate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequirementEntry {
    pub coupling: String,
    pub formula_id: String,
    pub kind: EntryKind,
    pub quantity: String,
    pub value: f64,
    pub units: String,
    pub phase_floor_rad: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl RequirementEntry {
    /// `value / reference`, if a reference exists.
    pub fn reference_ratio(&self) -> Option<f64> {
        self.reference.map(|r| self.value / r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequirementReport {
    pub geometry: Geometry,
    pub phase_floor_rad: f64,
    pub differential_factor: f64,
    pub cycles_per_average: f64,
    pub entries: Vec<RequirementEntry>,
    pub warnings: Vec<String>,
    pub footnotes: Vec<String>,
}

impl RequirementReport {
    pub fn find(&self, formula_id: &str, kind: EntryKind) -> Option<&RequirementEntry> {
        self.entries.iter().find(|e| e.formula_id == formula_id && e.kind == kind)
    }

    pub fn tolerance(&self, formula_id: &str) -> Option<f64> {
        self.find(formula_id, EntryKind::Tolerance).map(|e| e.value)
    }
}

/// Inverts every coupling of `geometry` at `phase_floor` and adds launch-angle
/// and source-size conversions.
pub fn full_requirement_report(
    config: &DetectorConfig,
    phase_floor: f64,
    geometry: Geometry,
) -> Result<RequirementReport> {
    config.validate()?;
    let env = BudgetEnvironment::from_config(config);
    let src = &config.source;
    let cycles = (src.shot_rate * AVERAGING_TIME).max(1.0);
    let ensemble = (cycles * src.atoms_per_shot).sqrt();
    let launch_velocity = src.launch_velocity_for(geometry, env.gravity, env.pulse_separation);

    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for term in coupling_terms(geometry) {
        let tol = invert_requirement(&term, phase_floor, &env)?;
        let fid = term.formula_id();
        let entry = |kind, quantity: &str, value: f64, units: &str, reference: Option<f64>| RequirementEntry {
            coupling: term.name.to_string(),
            formula_id: fid.clone(),
            kind,
            quantity: quantity.to_string(),
            value,
            units: units.to_string(),
            phase_floor_rad: phase_floor,
            reference,
            note: None,
        };
        let mut rows = vec![entry(EntryKind::Tolerance, term.variable, tol, term.units, term.reference[0])];

        if let Some(slope) = term.uniform_slope(&env) {
            rows.push(entry(
                EntryKind::UniformTilt,
                term.variable,
                phase_floor / slope.abs(),
                term.units,
                None,
            ));
        }
        match term.conversion {
            Conversion::Position => {
                rows.push(entry(
                    EntryKind::LaunchAngle,
                    "launch_angle",
                    tol / src.source_distance,
                    "rad",
                    term.reference[1],
                ));
                rows.push(entry(EntryKind::InitialRadius, "initial_radius", tol * ensemble, "m", term.reference[2]));
            }
            Conversion::Velocity => {
                rows.push(entry(
                    EntryKind::LaunchAngle,
                    "launch_angle",
                    tol / launch_velocity,
                    "rad",
                    term.reference[1],
                ));
                rows.push(entry(EntryKind::ExpansionRate, "expansion_rate", tol * ensemble, "m/s", term.reference[2]));
            }
            Conversion::PositionEnsemble => {
                rows.push(entry(EntryKind::InitialRadius, "initial_radius", tol * ensemble, "m", term.reference[2]));
            }
            Conversion::VelocityEnsemble => {
                rows.push(entry(EntryKind::ExpansionRate, "expansion_rate", tol * ensemble, "m/s", term.reference[2]));
            }
            Conversion::None => {}
        }
        for row in &mut rows {
            if row.kind == EntryKind::ExpansionRate {
                row.note = Some(format!("kinetic temperature {:.2e} K", kinetic_temperature(row.value)));
            }
        }

        if let Some((factor, convention)) = term.alternate {
            let alt = tol / factor;
            let msg = format!(
                "{fid}: with {convention} the coefficient is {factor}x larger and the tolerance becomes {alt:.2e} {}{}",
                term.units,
                term.reference[0]
                    .map(|r| format!(", a factor {:.2} from the reference {r:.1e}", (alt / r).max(r / alt)))
                    .unwrap_or_default()
            );
            rows[0].note = Some(format!("alternate convention: {alt:.2e} {}", term.units));
            warnings.push(msg);
        }
        for row in &rows {
            if let Some(ratio) = row.reference_ratio() {
                if (ratio - 1.0).abs() > REFERENCE_WARNING_THRESHOLD {
                    warnings.push(format!(
                        "{} {}: computed {:.3e} {} differs from reference {:.1e} by a factor {:.2}",
                        row.formula_id,
                        row.quantity,
                        row.value,
                        row.units,
                        row.reference.unwrap_or_default(),
                        ratio.max(1.0 / ratio)
                    ));
                }
            }
        }
        entries.extend(rows);
    }

    let footnotes = vec![
        format!(
            "tolerances refer to {AVERAGING_TIME} s of averaging ({cycles} cycles of {:.1e} atoms)",
            src.atoms_per_shot
        ),
        format!("gravity mismatch between interferometers: {DEFAULT_RELATIVE_DELTA_G:e} g"),
        "splitter-tilt couplings use the sign-aligned worst case of the stated angle ratios; \
         the uniform_tilt rows set all involved angles equal"
            .into(),
        "gravity-gradient compensation by wave-number adjustment (factors 100 to 1000) is not applied".into(),
        "density-shift (mean-field) phases scale as dN/sigma_r^3 and are not evaluated".into(),
        "beam-splitting fidelity fluctuations (~3e-5) have no closed phase law and are excluded".into(),
    ];

    Ok(RequirementReport {
        geometry,
        phase_floor_rad: phase_floor,
        differential_factor: env.differential_factor,
        cycles_per_average: cycles,
        entries,
        warnings,
        footnotes,
    })
}
