//! Frequency response of pulse sequences to strain and mirror motion.
//!
//! Everything goes through one kernel, `S(f) = Σⱼ wⱼ exp(i·2πf·tⱼ)`: the
//! strain response is `k·L·S`, the mirror-displacement response `k·S`. The
//! closed forms for the single and folded triple loop are kept as checked
//! conveniences.
//!
//! Sequences whose pulses sit on a lattice `tⱼ = mⱼT` (all built ones do)
//! are evaluated in `u = e^{i2πfT} − 1` near `u = 0`, where the vanishing
//! low-order moments would otherwise cancel catastrophically.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FrequencyGrid;
use crate::model::Geometry;
use crate::par::{self, Execution};
use crate::sequence::PulseSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseKind {
    /// rad per unit strain
    Strain,
    /// rad per metre of mirror displacement
    MirrorDisplacement,
}

/// Complex response sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseResponse {
    pub frequencies: Vec<f64>,
    pub values: Vec<Complex64>,
    pub kind: ResponseKind,
}

impl PhaseResponse {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Grid point of largest magnitude as `(frequency, magnitude)`.
    pub fn peak(&self) -> (f64, f64) {
        self.frequencies
            .iter()
            .zip(&self.values)
            .map(|(&f, v)| (f, v.norm()))
            .fold((f64::NAN, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            })
    }
}

/// Pulse lattice: `(time step m, weight in quarters q)` per event.
#[derive(Debug, Clone)]
struct Lattice {
    steps: Vec<(u64, i64)>,
    /// Binomial moments `Σ q·C(m, p) / 4` for `p = 0..=max m`.
    binomial_moments: Vec<f64>,
    max_step: u64,
}

impl Lattice {
    fn of(seq: &PulseSequence) -> Option<Self> {
        let t = seq.pulse_separation;
        if !(t > 0.0) {
            return None;
        }
        let mut steps = Vec::with_capacity(seq.events.len());
        for e in &seq.events {
            let m = (e.time / t).round();
            let q = (e.weight * 4.0).round();
            if m < 0.0 || (e.time - m * t).abs() > 1e-9 * t || (e.weight * 4.0 - q).abs() > 1e-9 {
                return None;
            }
            steps.push((m as u64, q as i64));
        }
        let max_step = steps.iter().map(|s| s.0).max().unwrap_or(0);
        if max_step > 120 {
            return None;
        }
        let binomial_moments = (0..=max_step)
            .map(|p| {
                let total: i128 = steps.iter().map(|&(m, q)| q as i128 * binomial(m, p)).sum();
                total as f64 / 4.0
            })
            .collect();
        Some(Self {
            steps,
            binomial_moments,
            max_step,
        })
    }

    /// `Σ wⱼ e^{i mⱼ x}` for `x = 2πfT`.
    fn kernel(&self, x: f64) -> Complex64 {
        let half = Complex64::from_polar(1.0, 0.5 * x);
        let u = Complex64::new(0.0, 2.0 * (0.5 * x).sin()) * half;
        if self.max_step as f64 * u.norm() <= 2.0 {
            // Horner in u; the zero moments drop out exactly
            self.binomial_moments
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * u + c)
        } else {
            let z = Complex64::from_polar(1.0, x);
            let mut pow = Complex64::new(1.0, 0.0);
            let mut at = 0u64;
            let mut sum = Complex64::new(0.0, 0.0);
            for &(m, q) in &self.steps {
                while at < m {
                    pow *= z;
                    at += 1;
                }
                sum += pow * (q as f64 / 4.0);
            }
            sum
        }
    }
}

fn binomial(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: i128 = 1;
    for i in 0..k {
        c = c * (n - i) as i128 / (i + 1) as i128;
    }
    c
}

fn check_frequency(f: f64) -> Result<()> {
    if f > 0.0 && f.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("frequency must be > 0, got {f}")))
    }
}

/// Evaluates `Σ wⱼ exp(i·2πf·tⱼ)` for one sequence at many frequencies.
#[derive(Debug, Clone)]
pub struct WeightKernel<'a> {
    seq: &'a PulseSequence,
    lattice: Option<Lattice>,
}

impl<'a> WeightKernel<'a> {
    pub fn new(seq: &'a PulseSequence) -> Self {
        Self {
            seq,
            lattice: Lattice::of(seq),
        }
    }

    pub fn eval(&self, f: f64) -> Complex64 {
        match &self.lattice {
            Some(l) => {
                // the lattice kernel has period 1/T in f; reducing first makes
                // integer fT an exact zero and keeps large fT accurate
                let ft = f * self.seq.pulse_separation;
                l.kernel(TAU * (ft - ft.round()))
            }
            None => self
                .seq
                .events
                .iter()
                .map(|e| Complex64::from_polar(e.weight, TAU * f * e.time))
                .sum(),
        }
    }
}

/// `Σ wⱼ exp(i·2πf·tⱼ)` (dimensionless).
pub fn weight_kernel(seq: &PulseSequence, f: f64) -> Complex64 {
    WeightKernel::new(seq).eval(f)
}

/// Phase per unit strain, `k·L·Σ wⱼ exp(i·2πf·tⱼ)`.
pub fn strain_response(seq: &PulseSequence, arm_length: f64, f: f64) -> Result<Complex64> {
    check_frequency(f)?;
    Ok(weight_kernel(seq, f) * (seq.wave_number * arm_length))
}

/// Phase per metre of retro-mirror displacement, `k·Σ wⱼ exp(i·2πf·tⱼ)`.
pub fn mirror_displacement_response(seq: &PulseSequence, f: f64) -> Result<Complex64> {
    check_frequency(f)?;
    Ok(weight_kernel(seq, f) * seq.wave_number)
}

/// Closed-form single-loop and triple-loop strain response (rad/strain).
///
/// `SL: 2kL(cos x − 1)`, `FTL: ½kL(5 − 9 cos 2x + 4 cos 3x)` with `x = 2πfT`,
/// evaluated in the equivalent forms `−4kL sin²(x/2)` and
/// `4kL sin⁴(x/2)(8 cos x + 7)` so small `x` keeps full relative precision.
pub fn strain_response_closed_form(
    geometry: Geometry,
    wave_number: f64,
    arm_length: f64,
    t: f64,
    f: f64,
) -> Result<f64> {
    check_frequency(f)?;
    // both forms have period 1/T in f
    let ft = f * t;
    let x = TAU * (ft - ft.round());
    let s = (0.5 * x).sin();
    let kl = wave_number * arm_length;
    Ok(match geometry {
        Geometry::SingleLoop => -4.0 * kl * s * s,
        Geometry::TripleLoop => 4.0 * kl * s.powi(4) * (8.0 * x.cos() + 7.0),
    })
}

/// Same as [`strain_response_closed_form`] with the geometry given by tag.
pub fn strain_response_closed_form_tagged(
    tag: &str,
    wave_number: f64,
    arm_length: f64,
    t: f64,
    f: f64,
) -> Result<f64> {
    strain_response_closed_form(tag.parse()?, wave_number, arm_length, t, f)
}

/// `1 − exp(−i·2πf·2L/c)`: differential signal of two interferometers
/// sharing a retro-mirror, offset by the light travel time.
pub fn differential_arm_factor(f: f64, arm_length: f64, speed_of_light: f64) -> Result<Complex64> {
    check_frequency(f)?;
    let phase = TAU * f * 2.0 * arm_length / speed_of_light;
    // 1 − e^{−iφ} = 2i sin(φ/2) e^{−iφ/2}
    Ok(Complex64::new(0.0, 2.0 * (0.5 * phase).sin()) * Complex64::from_polar(1.0, -0.5 * phase))
}

/// Strain response on a grid.
pub fn strain_response_curve(
    seq: &PulseSequence,
    arm_length: f64,
    grid: &FrequencyGrid,
    exec: Execution,
) -> PhaseResponse {
    let kernel = WeightKernel::new(seq);
    let scale = seq.wave_number * arm_length;
    PhaseResponse {
        frequencies: grid.points().to_vec(),
        values: par::map(grid.points(), exec, |f| kernel.eval(f) * scale),
        kind: ResponseKind::Strain,
    }
}

/// Mirror-displacement response on a grid.
pub fn mirror_response_curve(
    seq: &PulseSequence,
    grid: &FrequencyGrid,
    exec: Execution,
) -> PhaseResponse {
    let kernel = WeightKernel::new(seq);
    PhaseResponse {
        frequencies: grid.points().to_vec(),
        values: par::map(grid.points(), exec, |f| kernel.eval(f) * seq.wave_number),
        kind: ResponseKind::MirrorDisplacement,
    }
}
