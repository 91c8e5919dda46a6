//! Strain amplitude spectral densities: shot-noise-limited curves per
//! geometry, interleaved and resonant operation, mirror vibrations and the
//! quadrature assembly of an effective sensitivity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::budget::detection_phase_asd;
use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::model::{DetectorConfig, Geometry};
use crate::par::{self, Execution};
use crate::response::{differential_arm_factor, WeightKernel};
use crate::sequence::{build_resonant_sequence, PulseSequence, SequenceKind};

/// Relative slack when checking that a curve covers a frequency.
const COVERAGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveUnits {
    #[serde(rename = "strain_per_rtHz")]
    Strain,
    #[serde(rename = "rad_per_rtHz")]
    Rad,
    #[serde(rename = "m_per_rtHz")]
    Meter,
    #[serde(rename = "m_per_s2_per_rtHz")]
    MeterPerS2,
}

impl CurveUnits {
    pub fn tag(self) -> &'static str {
        match self {
            CurveUnits::Strain => "strain_per_rtHz",
            CurveUnits::Rad => "rad_per_rtHz",
            CurveUnits::Meter => "m_per_rtHz",
            CurveUnits::MeterPerS2 => "m_per_s2_per_rtHz",
        }
    }
}

impl fmt::Display for CurveUnits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CurveUnits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [CurveUnits::Strain, CurveUnits::Rad, CurveUnits::Meter, CurveUnits::MeterPerS2]
            .into_iter()
            .find(|u| u.tag() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown units tag `{s}`")))
    }
}

/// One-sided amplitude spectral density on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseCurve {
    frequencies: Vec<f64>,
    asd: Vec<f64>,
    units: CurveUnits,
    label: String,
}

impl NoiseCurve {
    /// Values may be `+∞` (response zeros) but not negative or NaN.
    pub fn new(frequencies: Vec<f64>, asd: Vec<f64>, units: CurveUnits, label: impl Into<String>) -> Result<Self> {
        if frequencies.len() != asd.len() {
            return Err(Error::invalid(format!(
                "{} frequencies but {} values",
                frequencies.len(),
                asd.len()
            )));
        }
        if frequencies.is_empty() {
            return Err(Error::invalid("noise curve needs at least one point"));
        }
        FrequencyGrid::new(frequencies.clone())?;
        if let Some((i, v)) = asd.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::invalid(format!("ASD value {v} at index {i} is negative or NaN")));
        }
        Ok(Self {
            frequencies,
            asd,
            units,
            label: label.into(),
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn asd(&self) -> &[f64] {
        &self.asd
    }

    pub fn units(&self) -> CurveUnits {
        self.units
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Smallest finite value and its frequency.
    pub fn minimum(&self) -> Option<(f64, f64)> {
        self.frequencies
            .iter()
            .zip(&self.asd)
            .filter(|(_, v)| v.is_finite())
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(f, v)| (*f, *v))
    }

    /// Every element multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.frequencies.clone(),
            self.asd.iter().map(|v| v * factor).collect(),
            self.units,
            self.label.clone(),
        )
    }

    pub fn covers(&self, f: f64) -> bool {
        let (lo, hi) = (self.frequencies[0], self.frequencies[self.len() - 1]);
        f >= lo * (1.0 - COVERAGE_SLACK) && f <= hi * (1.0 + COVERAGE_SLACK)
    }

    /// Log-log interpolation; linear where a bracketing value is zero or
    /// infinite. Frequencies outside the sampled range are an error.
    pub fn value_at(&self, f: f64) -> Result<f64> {
        if !self.covers(f) {
            return Err(Error::Coverage {
                label: self.label.clone(),
                frequency: f,
                min: self.frequencies[0],
                max: self.frequencies[self.len() - 1],
            });
        }
        let fs = &self.frequencies;
        let i = fs.partition_point(|x| *x < f);
        if i < fs.len() && fs[i] == f {
            return Ok(self.asd[i]);
        }
        if i == 0 {
            return Ok(self.asd[0]);
        }
        if i == fs.len() {
            return Ok(self.asd[fs.len() - 1]);
        }
        let (f0, f1, a0, a1) = (fs[i - 1], fs[i], self.asd[i - 1], self.asd[i]);
        let usable = |a: f64| a > 0.0 && a.is_finite();
        if usable(a0) && usable(a1) {
            let s = (f / f0).ln() / (f1 / f0).ln();
            Ok((a0.ln() + s * (a1 / a0).ln()).exp())
        } else if a0.is_infinite() || a1.is_infinite() {
            Ok(f64::INFINITY)
        } else {
            Ok(a0 + (f - f0) / (f1 - f0) * (a1 - a0))
        }
    }

    /// Resamples onto `grid` by interpolation.
    pub fn resampled(&self, grid: &[f64]) -> Result<Self> {
        let asd = grid.iter().map(|f| self.value_at(*f)).collect::<Result<Vec<_>>>()?;
        Self::new(grid.to_vec(), asd, self.units, self.label.clone())
    }
}

fn check_band(grid: &FrequencyGrid, config: &DetectorConfig) -> Result<()> {
    let nyquist = 0.5 * config.source.shot_rate;
    if grid.max() > nyquist * (1.0 + COVERAGE_SLACK) {
        return Err(Error::invalid(format!(
            "grid reaches {} Hz, above the sampling limit {nyquist} Hz; truncate it first",
            grid.max()
        )));
    }
    Ok(())
}

fn shot_limited(
    seq: &PulseSequence,
    config: &DetectorConfig,
    rate: f64,
    grid: &FrequencyGrid,
    exec: Execution,
) -> Result<Vec<f64>> {
    let src = &config.source;
    let phase_asd = detection_phase_asd(src.atoms_per_shot, rate, src.squeezing_db)?;
    let kernel = WeightKernel::new(seq);
    let scale = seq.wave_number * config.arm_length;
    Ok(par::map(grid.points(), exec, |f| {
        let r = kernel.eval(f).norm() * scale;
        if r > 0.0 {
            phase_asd / r
        } else {
            f64::INFINITY
        }
    }))
}

/// Detection-limited phase noise divided by the strain response. Response
/// zeros yield `+∞`.
pub fn intrinsic_strain_asd(
    seq: &PulseSequence,
    config: &DetectorConfig,
    grid: &FrequencyGrid,
    exec: Execution,
) -> Result<NoiseCurve> {
    config.validate()?;
    check_band(grid, config)?;
    let asd = shot_limited(seq, config, config.source.shot_rate, grid, exec)?;
    NoiseCurve::new(grid.points().to_vec(), asd, CurveUnits::Strain, format!("intrinsic {}", seq.label))
}

/// Inverse-quadrature combination of independent channels, one per entry of
/// `config.interleave_t`, each of `geometry`.
pub fn interleaved_strain_asd(
    config: &DetectorConfig,
    geometry: Geometry,
    grid: &FrequencyGrid,
    exec: Execution,
) -> Result<NoiseCurve> {
    config.validate()?;
    check_band(grid, config)?;
    let ts = &config.interleave_t;
    if ts.is_empty() {
        return Err(Error::invalid("interleaving needs at least one pulse separation"));
    }
    let rate = if config.split_flux {
        config.source.shot_rate / ts.len() as f64
    } else {
        config.source.shot_rate
    };
    let kind = match geometry {
        Geometry::SingleLoop => SequenceKind::SingleLoop,
        Geometry::TripleLoop => SequenceKind::FoldedTripleLoop,
    };
    let mut inv_sq = vec![0.0; grid.len()];
    for &t in ts {
        let seq = kind.build(t, &config.splitter)?;
        for (acc, h) in inv_sq.iter_mut().zip(shot_limited(&seq, config, rate, grid, exec)?) {
            *acc += (1.0 / h).powi(2);
        }
    }
    let asd = inv_sq.into_iter().map(|s| 1.0 / s.sqrt()).collect();
    NoiseCurve::new(
        grid.points().to_vec(),
        asd,
        CurveUnits::Strain,
        format!("interleaved {geometry}"),
    )
}

/// Effective shot rate of an `n`-unit resonant sequence when the source
/// runs at `shot_rate` for single units.
pub fn resonant_rate(shot_rate: f64, t: f64, units: usize, dead_time: f64) -> f64 {
    shot_rate * (6.0 * t + dead_time) / (6.0 * units as f64 * t + dead_time)
}

/// Intrinsic ASD of the `n`-unit resonant sequence. With `adjust_rate` the
/// measurement rate drops with the longer sequence; without it the curve
/// isolates the response gain.
pub fn resonant_strain_asd(
    t: f64,
    units: usize,
    config: &DetectorConfig,
    grid: &FrequencyGrid,
    adjust_rate: bool,
    exec: Execution,
) -> Result<NoiseCurve> {
    config.validate()?;
    check_band(grid, config)?;
    let seq = build_resonant_sequence(t, units, &config.splitter)?;
    let rate = if adjust_rate {
        resonant_rate(config.source.shot_rate, t, units, config.dead_time)
    } else {
        config.source.shot_rate
    };
    let asd = shot_limited(&seq, config, rate, grid, exec)?;
    NoiseCurve::new(grid.points().to_vec(), asd, CurveUnits::Strain, format!("resonant n={units}"))
}

/// Frequency of maximum `|Σ w e^{iωt}|` in `[f_lo, f_hi]`; ties go to the
/// lower frequency.
pub fn resonance_frequency(seq: &PulseSequence, f_lo: f64, f_hi: f64) -> Result<(f64, f64)> {
    if !(f_lo > 0.0 && f_hi > f_lo && f_hi.is_finite()) {
        return Err(Error::invalid(format!("bad search band [{f_lo}, {f_hi}]")));
    }
    let kernel = WeightKernel::new(seq);
    let mag = |f: f64| kernel.eval(f).norm();
    const SCAN: usize = 8192;
    let step = (f_hi - f_lo) / SCAN as f64;
    let mut best = (f_lo, mag(f_lo));
    for i in 1..=SCAN {
        let f = f_lo + step * i as f64;
        let m = mag(f);
        if m > best.1 * (1.0 + 1e-12) {
            best = (f, m);
        }
    }
    // golden-section refinement in the bracketing cell
    let (mut a, mut b) = ((best.0 - step).max(f_lo), (best.0 + step).min(f_hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if mag(c) >= mag(d) {
            b = d;
        } else {
            a = c;
        }
        if b - a < 1e-13 * b {
            break;
        }
    }
    let f = 0.5 * (a + b);
    let m = mag(f);
    Ok(if m >= best.1 { (f, m) } else { best })
}

/// Strain-equivalent ASD of retro-mirror displacement noise `isolation`
/// (m/√Hz) in the differential signal of two interferometers.
pub fn mirror_vibration_strain_asd(
    seq: &PulseSequence,
    config: &DetectorConfig,
    isolation: &NoiseCurve,
    grid: &FrequencyGrid,
) -> Result<NoiseCurve> {
    config.validate()?;
    if isolation.units() != CurveUnits::Meter {
        return Err(Error::Unit {
            expected: CurveUnits::Meter.tag().into(),
            found: isolation.units().tag().into(),
        });
    }
    let kernel = WeightKernel::new(seq);
    let (l, c) = (config.arm_length, config.constants.speed_of_light);
    let mut asd = Vec::with_capacity(grid.len());
    for &f in grid.points() {
        let x = isolation.value_at(f)?;
        let delay = differential_arm_factor(f, l, c)?.norm();
        let w = kernel.eval(f).norm();
        let mirror = seq.wave_number * w;
        let strain = seq.wave_number * l * w;
        // the kernel cancels; its zeros leave the finite limit |1−e^{−iωτ}|·x/L
        asd.push(if strain > 0.0 { mirror * delay * x / strain } else { delay * x / l });
    }
    NoiseCurve::new(grid.points().to_vec(), asd, CurveUnits::Strain, "mirror_vibration")
}

/// Strain noise budget: components summed in quadrature, overlays carried
/// along unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityBreakdown {
    pub total: NoiseCurve,
    pub components: Vec<NoiseCurve>,
    pub overlays: Vec<NoiseCurve>,
    /// Components that were requested but unavailable.
    pub omitted: Vec<String>,
}

impl SensitivityBreakdown {
    pub fn component(&self, label: &str) -> Option<&NoiseCurve> {
        self.components.iter().find(|c| c.label() == label)
    }
}

fn quadrature(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(*v));
    if scale == 0.0 || scale.is_infinite() {
        return scale;
    }
    scale * values.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
}

/// Resamples every component onto the first one's grid and sums them in
/// quadrature.
pub fn assemble_breakdown(
    components: Vec<NoiseCurve>,
    overlays: Vec<NoiseCurve>,
    omitted: Vec<String>,
) -> Result<SensitivityBreakdown> {
    let Some(first) = components.first() else {
        return Err(Error::invalid("a breakdown needs at least one component"));
    };
    for c in &components {
        if c.units() != CurveUnits::Strain {
            return Err(Error::Unit {
                expected: CurveUnits::Strain.tag().into(),
                found: format!("{} ({})", c.units().tag(), c.label()),
            });
        }
    }
    for (i, c) in components.iter().enumerate() {
        if components[..i].iter().any(|d| d.label() == c.label()) {
            return Err(Error::invalid(format!("duplicate component label `{}`", c.label())));
        }
    }
    let grid = first.frequencies().to_vec();
    let components = components
        .iter()
        .map(|c| if c.frequencies() == grid.as_slice() { Ok(c.clone()) } else { c.resampled(&grid) })
        .collect::<Result<Vec<_>>>()?;
    let mut column = Vec::with_capacity(components.len());
    let total: Vec<f64> = (0..grid.len())
        .map(|i| {
            column.clear();
            column.extend(components.iter().map(|c| c.asd()[i]));
            quadrature(&column)
        })
        .collect();
    Ok(SensitivityBreakdown {
        total: NoiseCurve::new(grid, total, CurveUnits::Strain, "total")?,
        components,
        overlays,
        omitted,
    })
}

/// Interleaved intrinsic curve plus, when supplied, mirror vibrations and
/// an ingested Newtonian-noise strain curve. Missing inputs are recorded in
/// `omitted`.
pub fn effective_breakdown(
    config: &DetectorConfig,
    geometry: Geometry,
    grid: &FrequencyGrid,
    isolation: Option<&NoiseCurve>,
    newtonian: Option<&NoiseCurve>,
    overlays: Vec<NoiseCurve>,
    exec: Execution,
) -> Result<SensitivityBreakdown> {
    let mut components = vec![interleaved_strain_asd(config, geometry, grid, exec)?.with_label("intrinsic")];
    let mut omitted = Vec::new();
    match isolation {
        Some(iso) => {
            let seq = match geometry {
                Geometry::SingleLoop => SequenceKind::SingleLoop,
                Geometry::TripleLoop => SequenceKind::FoldedTripleLoop,
            }
            .build(config.sequence.pulse_separation, &config.splitter)?;
            components.push(mirror_vibration_strain_asd(&seq, config, iso, grid)?);
        }
        None => omitted.push("mirror_vibration".to_string()),
    }
    match newtonian {
        Some(nn) => components.push(nn.clone().with_label("newtonian")),
        None => omitted.push("newtonian".to_string()),
    }
    assemble_breakdown(components, overlays, omitted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::build_single_loop;

    fn band() -> FrequencyGrid {
        FrequencyGrid::log_spaced(0.3, 5.0, 400).unwrap()
    }

    fn curve(fs: &[f64], vs: &[f64], units: CurveUnits) -> NoiseCurve {
        NoiseCurve::new(fs.to_vec(), vs.to_vec(), units, "c").unwrap()
    }

    #[test]
    fn curve_validation() {
        assert!(NoiseCurve::new(vec![1.0, 2.0], vec![1.0], CurveUnits::Strain, "x").is_err());
        assert!(NoiseCurve::new(vec![2.0, 1.0], vec![1.0, 1.0], CurveUnits::Strain, "x").is_err());
        assert!(NoiseCurve::new(vec![1.0, 2.0], vec![1.0, -1.0], CurveUnits::Strain, "x").is_err());
        assert!(NoiseCurve::new(vec![1.0, 2.0], vec![1.0, f64::NAN], CurveUnits::Strain, "x").is_err());
    }

    #[test]
    fn log_log_interpolation() {
        let c = curve(&[1.0, 100.0], &[1.0, 1e-4], CurveUnits::Strain);
        assert!((c.value_at(10.0).unwrap() - 1e-2).abs() < 1e-15);
        assert!(matches!(c.value_at(0.5), Err(Error::Coverage { .. })));
        assert!(c.value_at(101.0).is_err());
        let z = curve(&[1.0, 3.0], &[0.0, 2.0], CurveUnits::Strain);
        assert!((z.value_at(2.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn units_round_trip() {
        for u in [CurveUnits::Strain, CurveUnits::Rad, CurveUnits::Meter, CurveUnits::MeterPerS2] {
            assert_eq!(u.tag().parse::<CurveUnits>().unwrap(), u);
        }
        assert!("furlongs".parse::<CurveUnits>().is_err());
    }

    #[test]
    fn intrinsic_band_values() {
        let c = DetectorConfig::default();
        // below the first response zero, where 8 cos x + 7 = 0
        let grid = FrequencyGrid::log_spaced(0.3, 1.5, 400).unwrap();
        let h = intrinsic_strain_asd(&c.sequence, &c, &grid, Execution::default()).unwrap();
        assert!(h.asd().iter().all(|v| *v > 1e-22 && *v < 1e-19));
    }

    #[test]
    fn response_zero_is_infinite() {
        let c = DetectorConfig::default();
        let seq = build_single_loop(0.25, &c.splitter).unwrap();
        let grid = FrequencyGrid::new(vec![1.0, 4.0]).unwrap();
        let h = intrinsic_strain_asd(&seq, &c, &grid, Execution::Sequential).unwrap();
        assert!(h.asd()[0].is_finite());
        assert!(h.asd()[1].is_infinite());
    }

    #[test]
    fn above_nyquist_rejected() {
        let c = DetectorConfig::default();
        let grid = FrequencyGrid::log_spaced(1.0, 6.0, 10).unwrap();
        assert!(intrinsic_strain_asd(&c.sequence, &c, &grid, Execution::Sequential).is_err());
    }

    #[test]
    fn doubling_arm_halves_asd() {
        let mut c = DetectorConfig::default();
        let a = intrinsic_strain_asd(&c.sequence, &c, &band(), Execution::Sequential).unwrap();
        c.arm_length *= 2.0;
        let b = intrinsic_strain_asd(&c.sequence, &c, &band(), Execution::Sequential).unwrap();
        for (x, y) in a.asd().iter().zip(b.asd()) {
            assert!((x / y - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_channel_interleave_is_intrinsic() {
        let mut c = DetectorConfig::default();
        c.interleave_t = vec![0.26];
        let i = interleaved_strain_asd(&c, Geometry::TripleLoop, &band(), Execution::Sequential).unwrap();
        let d = intrinsic_strain_asd(&c.sequence, &c, &band(), Execution::Sequential).unwrap();
        for (x, y) in i.asd().iter().zip(d.asd()) {
            assert!((x / y - 1.0).abs() < 1e-14);
        }
        c.interleave_t.clear();
        assert!(interleaved_strain_asd(&c, Geometry::TripleLoop, &band(), Execution::Sequential).is_err());
    }

    #[test]
    fn interleave_beats_every_channel() {
        let c = DetectorConfig::default();
        let comb = interleaved_strain_asd(&c, Geometry::TripleLoop, &band(), Execution::Sequential).unwrap();
        for &t in &c.interleave_t {
            let seq = c.sequence_with_t(t).unwrap();
            let one = intrinsic_strain_asd(&seq, &c, &band(), Execution::Sequential).unwrap();
            for (x, y) in comb.asd().iter().zip(one.asd()) {
                assert!(x <= y);
            }
        }
    }

    #[test]
    fn split_flux_costs_root_channels() {
        let mut c = DetectorConfig::default();
        let full = interleaved_strain_asd(&c, Geometry::TripleLoop, &band(), Execution::Sequential).unwrap();
        c.split_flux = true;
        let split = interleaved_strain_asd(&c, Geometry::TripleLoop, &band(), Execution::Sequential).unwrap();
        for (x, y) in full.asd().iter().zip(split.asd()) {
            assert!((y / x - 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_single_unit_matches_broadband() {
        let c = DetectorConfig::default();
        let r = resonant_strain_asd(0.26, 1, &c, &band(), true, Execution::Sequential).unwrap();
        let d = intrinsic_strain_asd(&c.sequence, &c, &band(), Execution::Sequential).unwrap();
        for (x, y) in r.asd().iter().zip(d.asd()) {
            assert!((x / y - 1.0).abs() < 1e-12);
        }
        assert!((resonant_rate(10.0, 0.26, 1, 0.1) - 10.0).abs() < 1e-12);
        assert!(resonant_rate(10.0, 0.26, 3, 0.1) < 10.0 / 2.5);
    }

    #[test]
    fn resonance_of_single_unit() {
        let c = DetectorConfig::default();
        let (f, m) = resonance_frequency(&c.sequence, 0.01, 5.0).unwrap();
        // |5 − 9cos2x + 4cos3x|/2 peaks at cos x = −1/4 with 125/16
        let x = (-0.25f64).acos();
        assert!((f - x / (std::f64::consts::TAU * 0.26)).abs() < 1e-6, "{f}");
        assert!((m - 7.8125).abs() < 1e-12);
    }

    #[test]
    fn mirror_contribution() {
        let c = DetectorConfig::default();
        let iso = curve(&[0.01, 10.0], &[1e-18, 1e-18], CurveUnits::Meter);
        let grid = FrequencyGrid::new(vec![1.0]).unwrap();
        let h = mirror_vibration_strain_asd(&c.sequence, &c, &iso, &grid).unwrap();
        let phi = std::f64::consts::TAU * 2e4 / c.constants.speed_of_light;
        let expect = 2.0 * (phi / 2.0).sin() * 1e-18 / 1e4;
        assert!((h.asd()[0] / expect - 1.0).abs() < 1e-12);
        assert!((h.asd()[0] - 4.19e-26).abs() < 0.01e-26);

        let zero = curve(&[0.01, 10.0], &[0.0, 0.0], CurveUnits::Meter);
        let z = mirror_vibration_strain_asd(&c.sequence, &c, &zero, &band()).unwrap();
        assert!(z.asd().iter().all(|v| *v == 0.0));

        let wrong = curve(&[0.01, 10.0], &[1.0, 1.0], CurveUnits::Strain);
        assert!(matches!(
            mirror_vibration_strain_asd(&c.sequence, &c, &wrong, &band()),
            Err(Error::Unit { .. })
        ));
        let short = curve(&[1.0, 2.0], &[1.0, 1.0], CurveUnits::Meter);
        assert!(matches!(
            mirror_vibration_strain_asd(&c.sequence, &c, &short, &band()),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn breakdown_quadrature() {
        let a = curve(&[1.0, 2.0, 4.0], &[3.0, 1.0, 0.0], CurveUnits::Strain).with_label("a");
        let single = assemble_breakdown(vec![a.clone()], vec![], vec![]).unwrap();
        assert_eq!(single.total.asd(), a.asd());
        let b = a.clone().with_label("b");
        let two = assemble_breakdown(vec![a.clone(), b], vec![], vec![]).unwrap();
        for (t, x) in two.total.asd().iter().zip(a.asd()) {
            assert!((t - 2f64.sqrt() * x).abs() <= 1e-15 * t);
        }
        assert!(assemble_breakdown(vec![], vec![], vec![]).is_err());
        let m = curve(&[1.0, 2.0, 4.0], &[1.0; 3], CurveUnits::Meter);
        assert!(matches!(
            assemble_breakdown(vec![a.clone(), m], vec![], vec![]),
            Err(Error::Unit { .. })
        ));
        assert!(assemble_breakdown(vec![a.clone(), a], vec![], vec![]).is_err());
    }

    #[test]
    fn missing_inputs_are_recorded() {
        let c = DetectorConfig::default();
        let b = effective_breakdown(&c, Geometry::TripleLoop, &band(), None, None, vec![], Execution::Sequential)
            .unwrap();
        assert_eq!(b.omitted, vec!["mirror_vibration", "newtonian"]);
        assert_eq!(b.components.len(), 1);
    }
}
