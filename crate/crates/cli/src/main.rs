//! `infrasound`: batch frontend emitting response curves, sensitivity
//! breakdowns, coupling budgets, requirement tables and trajectories.
//!
//! Exit status: 0 success, 1 usage error, 2 validation error, 3 I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use infrasound_core::budget::{coupling_phases, full_requirement_report, BudgetEnvironment, SourceOffsets};
use infrasound_core::io::{
    breakdown_metadata, breakdown_to_csv, curve_to_csv, phases_to_json, read_config, read_curve,
    report_to_json, report_to_text, response_to_csv,
};
use infrasound_core::response::strain_response_curve;
use infrasound_core::sensitivity::{
    effective_breakdown, resonance_frequency, resonant_rate, resonant_strain_asd,
};
use infrasound_core::sequence::SequenceKind;
use infrasound_core::trajectory::{build_mean_trajectory, ftl_phase_from_trajectory, timing_error_phase, RelaunchSpec};
use infrasound_core::{DetectorConfig, Error, Execution, FrequencyGrid, Geometry};

#[derive(Parser, Debug)]
#[command(name = "infrasound", version, about = "Atom-interferometric infrasound detector modeling. All quantities in SI units.")]
struct Cli {
    /// Detector config file (flat TOML, SI units); defaults apply to absent keys
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the data file here instead of standard output
    #[arg(long, short, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Zero the provenance timestamp in JSON metadata
    #[arg(long, global = true)]
    reproducible: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Strain response magnitude (rad per unit strain) and phase (rad) versus frequency (Hz)
    Response(ResponseArgs),
    /// Strain sensitivity breakdown (1/sqrt(Hz)) with optional mirror and Newtonian components
    Sensitivity(SensitivityArgs),
    /// Signed coupling phases (rad) for the offsets in a JSON parameter file
    Budget(BudgetArgs),
    /// Tolerances that keep each coupling at the phase floor
    Requirements(RequirementsArgs),
    /// Triple-loop mean trajectory y(t) (s, m) and its relaunch timing-error phase (rad)
    Trajectory(TrajectoryArgs),
    /// Resonant-mode strain sensitivity (1/sqrt(Hz)) and its resonance frequency (Hz)
    Resonant(ResonantArgs),
}

#[derive(Args, Debug, Clone)]
struct GridArgs {
    /// Lowest grid frequency, Hz
    #[arg(long, default_value_t = 0.01, value_name = "HZ")]
    f_min: f64,
    /// Highest grid frequency, Hz
    #[arg(long, default_value_t = 10.0, value_name = "HZ")]
    f_max: f64,
    /// Number of log-spaced grid points
    #[arg(long, default_value_t = 2000)]
    points: usize,
}

impl GridArgs {
    fn grid(&self) -> Result<FrequencyGrid, Error> {
        FrequencyGrid::log_spaced(self.f_min, self.f_max, self.points)
    }

    /// Grid cut at the sampling limit `shot_rate/2`.
    fn band_limited(&self, config: &DetectorConfig) -> Result<FrequencyGrid, Error> {
        self.grid()?.truncated(0.5 * config.source.shot_rate)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum GeometryArg {
    Sl,
    Ftl,
}

impl From<GeometryArg> for Geometry {
    fn from(g: GeometryArg) -> Self {
        match g {
            GeometryArg::Sl => Geometry::SingleLoop,
            GeometryArg::Ftl => Geometry::TripleLoop,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Default)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug)]
struct ResponseArgs {
    /// Geometry; defaults to the config's
    #[arg(long, value_enum)]
    geometry: Option<GeometryArg>,
    /// Triple-loop units (3n loops); ftl only
    #[arg(long, value_name = "N")]
    loops: Option<usize>,
    /// Pulse separation T, s; defaults to the config's
    #[arg(long = "pulse-separation", value_name = "S")]
    pulse_separation: Option<f64>,
    /// Evaluate at this single frequency, Hz, instead of a grid
    #[arg(long = "f", value_name = "HZ")]
    frequency: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct SensitivityArgs {
    /// Geometry; defaults to the config's
    #[arg(long, value_enum)]
    geometry: Option<GeometryArg>,
    /// Combine the config's interleaved pulse separations instead of using T alone
    #[arg(long)]
    interleave: bool,
    /// Residual mirror displacement curve, m/sqrt(Hz) (CSV)
    #[arg(long, value_name = "PATH")]
    isolation: Option<PathBuf>,
    /// Newtonian-noise strain curve, 1/sqrt(Hz) (CSV)
    #[arg(long, value_name = "PATH")]
    newtonian: Option<PathBuf>,
    /// Reference or signal curve carried along outside the sum (CSV); repeatable
    #[arg(long, value_name = "PATH")]
    overlay: Vec<PathBuf>,
    /// Write JSON metadata (config hash, labels, units) here
    #[arg(long, value_name = "PATH")]
    metadata: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Geometry; defaults to the config's
    #[arg(long, value_enum)]
    geometry: Option<GeometryArg>,
    /// JSON offsets: position_y (m), velocity_y and velocity_x (m/s),
    /// relaunch_tilt_y and relaunch_tilt_x (rad), splitter_tilts (5 x rad),
    /// tilt_lever_position (m), tilt_lever_velocity (m/s); absent fields are zero
    #[arg(long, value_name = "PATH")]
    offsets: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RequirementsArgs {
    /// Geometry; defaults to the config's
    #[arg(long, value_enum)]
    geometry: Option<GeometryArg>,
    /// Phase-noise floor each coupling may reach, rad
    #[arg(long, default_value_t = 1e-6, value_name = "RAD")]
    phase_floor: f64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct TrajectoryArgs {
    /// Initial position along the beam axis, m
    #[arg(long, default_value_t = 0.0, value_name = "M")]
    y0: f64,
    /// Initial velocity along the beam axis, m/s
    #[arg(long, default_value_t = 0.0, value_name = "M/S")]
    v0: f64,
    /// First relaunch tilt alpha_1, rad
    #[arg(long, default_value_t = 0.0, value_name = "RAD", allow_hyphen_values = true)]
    tilt1: f64,
    /// Second relaunch tilt alpha_2, rad
    #[arg(long, default_value_t = 1e-9, value_name = "RAD", allow_hyphen_values = true)]
    tilt2: f64,
    /// First relaunch timing offset, s
    #[arg(long, default_value_t = 0.0, value_name = "S", allow_hyphen_values = true)]
    offset1: f64,
    /// Second relaunch timing offset, s
    #[arg(long, default_value_t = 1e-8, value_name = "S", allow_hyphen_values = true)]
    offset2: f64,
    /// Relaunch duration tau, s
    #[arg(long, default_value_t = RelaunchSpec::NOMINAL_DURATION, value_name = "S")]
    duration: f64,
    /// Number of (t, y) samples over [0, 6T]
    #[arg(long, default_value_t = 601)]
    samples: usize,
}

#[derive(Args, Debug)]
struct ResonantArgs {
    /// Triple-loop units n (3n loops)
    #[arg(long, default_value_t = 3, value_name = "N")]
    loops: usize,
    /// Pulse separation T, s; defaults to the config's
    #[arg(long = "pulse-separation", value_name = "S")]
    pulse_separation: Option<f64>,
    /// Keep the single-unit measurement rate instead of scaling it with the sequence length
    #[arg(long)]
    no_rate_adjust: bool,
    #[command(flatten)]
    grid: GridArgs,
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(), Failure>;

fn emit(output: Option<&Path>, text: &str) -> Outcome {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })?;
        }
    }
    Ok(())
}

fn sequence_kind(geometry: Geometry, loops: Option<usize>) -> Result<SequenceKind, Failure> {
    match (geometry, loops) {
        (Geometry::SingleLoop, None | Some(1)) => Ok(SequenceKind::SingleLoop),
        (Geometry::SingleLoop, Some(_)) => Err(Failure::Usage("--loops applies to the ftl geometry only".into())),
        (Geometry::TripleLoop, None | Some(1)) => Ok(SequenceKind::FoldedTripleLoop),
        (Geometry::TripleLoop, Some(0)) => Err(Failure::Usage("--loops must be at least 1".into())),
        (Geometry::TripleLoop, Some(units)) => Ok(SequenceKind::Resonant { units }),
    }
}

fn run(cli: Cli) -> Outcome {
    let config = match &cli.config {
        Some(path) => read_config(path)?,
        None => DetectorConfig::default(),
    };
    let out = cli.output.as_deref();
    let exec = Execution::default();
    let pick = |g: Option<GeometryArg>| g.map(Geometry::from).unwrap_or_else(|| config.geometry());

    match cli.command {
        Command::Response(a) => {
            let geometry = pick(a.geometry);
            let loops = a.loops.or(match config.sequence.kind {
                SequenceKind::Resonant { units } if a.geometry.is_none() => Some(units),
                _ => None,
            });
            let t = a.pulse_separation.unwrap_or(config.sequence.pulse_separation);
            let seq = sequence_kind(geometry, loops)?.build(t, &config.splitter)?;
            let grid = match a.frequency {
                Some(f) => FrequencyGrid::new(vec![f])?,
                None => a.grid.grid()?,
            };
            emit(out, &response_to_csv(&strain_response_curve(&seq, config.arm_length, &grid, exec)))
        }
        Command::Sensitivity(a) => {
            let geometry = pick(a.geometry);
            let grid = a.grid.band_limited(&config)?;
            let isolation = a.isolation.as_deref().map(read_curve).transpose()?;
            let newtonian = a.newtonian.as_deref().map(read_curve).transpose()?;
            let overlays = a.overlay.iter().map(|p| read_curve(p)).collect::<Result<Vec<_>, _>>()?;
            let mut channels = config.clone();
            if !a.interleave {
                channels.interleave_t = vec![config.sequence.pulse_separation];
            }
            let breakdown =
                effective_breakdown(&channels, geometry, &grid, isolation.as_ref(), newtonian.as_ref(), overlays, exec)?;
            emit(out, &breakdown_to_csv(&breakdown)?)?;
            if let Some(stem) = out {
                for (i, o) in breakdown.overlays.iter().enumerate() {
                    let path = stem.with_extension(format!("overlay{}.csv", i + 1));
                    emit(Some(&path), &curve_to_csv(o, "overlay passthrough"))?;
                }
            }
            if let Some(path) = &a.metadata {
                let meta = breakdown_metadata(&config, &breakdown, cli.reproducible);
                let text = serde_json::to_string_pretty(&meta).map_err(Error::from)? + "\n";
                emit(Some(path), &text)?;
            }
            Ok(())
        }
        Command::Budget(a) => {
            let geometry = pick(a.geometry);
            let offsets: SourceOffsets = match &a.offsets {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    serde_json::from_str(&text).map_err(|e| Error::Parse {
                        path: path.display().to_string(),
                        line: e.line(),
                        message: e.to_string(),
                    })?
                }
                None => SourceOffsets::default(),
            };
            let env = BudgetEnvironment::from_config(&config);
            emit(out, &phases_to_json(geometry.tag(), &coupling_phases(geometry, &env, &offsets))?)
        }
        Command::Requirements(a) => {
            let report = full_requirement_report(&config, a.phase_floor, pick(a.geometry))?;
            let text = match a.format {
                Format::Text => report_to_text(&report),
                Format::Json => report_to_json(&report)?,
            };
            emit(out, &text)
        }
        Command::Trajectory(a) => {
            let t = config.sequence.pulse_separation;
            let g = config.constants.gravity;
            let k = config.wave_number();
            let base = RelaunchSpec {
                duration: a.duration,
                acceleration: 2.5 * g * t / a.duration,
                tilt: 0.0,
                timing_offset: 0.0,
            };
            let r1 = base.with_tilt(a.tilt1).with_offset(a.offset1);
            let r2 = base.with_tilt(a.tilt2).with_offset(a.offset2);
            let traj = build_mean_trajectory(a.y0, a.v0, (&r1, &r2), t)?;
            let numeric = ftl_phase_from_trajectory(&traj, k, t)?;
            let closed = timing_error_phase(
                k,
                base.acceleration,
                base.duration,
                a.offset2 + a.offset1,
                a.offset2 - a.offset1,
                a.tilt1,
                a.tilt2,
            )?;
            let mut text = format!(
                "# pulse_separation_s: {t:?}\n# trajectory_phase_rad: {numeric:.16e}\n# timing_error_phase_rad: {closed:.16e}\nt_s,y_m\n"
            );
            for (ti, y) in traj.sample(a.samples)? {
                text.push_str(&format!("{ti:.16e},{y:.16e}\n"));
            }
            emit(out, &text)
        }
        Command::Resonant(a) => {
            if a.loops == 0 {
                return Err(Failure::Usage("--loops must be at least 1".into()));
            }
            let t = a.pulse_separation.unwrap_or(config.sequence.pulse_separation);
            let grid = a.grid.band_limited(&config)?;
            let curve = resonant_strain_asd(t, a.loops, &config, &grid, !a.no_rate_adjust, exec)?;
            let seq = SequenceKind::Resonant { units: a.loops }.build(t, &config.splitter)?;
            let (f_res, gain) = resonance_frequency(&seq, grid.min(), grid.max())?;
            let rate = if a.no_rate_adjust {
                config.source.shot_rate
            } else {
                resonant_rate(config.source.shot_rate, t, a.loops, config.dead_time)
            };
            let mut text = format!(
                "# resonance_hz: {f_res:.16e}\n# kernel_peak: {gain:.16e}\n# measurement_rate_hz: {rate:.16e}\n"
            );
            text.push_str(&curve_to_csv(&curve, "resonant mode"));
            emit(out, &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Io { .. } => 3,
                _ => 2,
            })
        }
    }
}
