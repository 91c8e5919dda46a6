//! Mean horizontal trajectory of the folded triple loop with tilted relaunches.
//!
//! The atoms move ballistically along the beam axis except inside the two
//! relaunch windows, where a tilt `α` of the relaunch vector projects a
//! constant acceleration `α·a` onto the axis. Segment laws are exact
//! quadratics; positions and boundaries are carried in double-double so the
//! five-pulse sum, which cancels everything but the timing-error term, keeps
//! full relative precision.

use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Relaunch pulse of the folded geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaunchSpec {
    /// τ, s
    pub duration: f64,
    /// a, m/s² along the relaunch vector
    pub acceleration: f64,
    /// α: deviation from orthogonality to the beam-splitting axis, rad
    pub tilt: f64,
    /// δτ: shift of the window centre from the trajectory crossing, s
    pub timing_offset: f64,
}

impl RelaunchSpec {
    /// Upward deflection time of the relaunch pulse.
    pub const NOMINAL_DURATION: f64 = 0.015;

    /// Untilted, centred relaunch with impulse `a·τ = (5/2)·g·T`.
    pub fn nominal(t: f64, gravity: f64) -> Self {
        let duration = Self::NOMINAL_DURATION;
        Self {
            duration,
            acceleration: 2.5 * gravity * t / duration,
            tilt: 0.0,
            timing_offset: 0.0,
        }
    }

    pub fn with_tilt(self, tilt: f64) -> Self {
        Self { tilt, ..self }
    }

    pub fn with_offset(self, timing_offset: f64) -> Self {
        Self {
            timing_offset,
            ..self
        }
    }

    /// `a·τ`
    pub fn impulse(&self) -> f64 {
        self.acceleration * self.duration
    }
}

/// One piece `y(t) = y₀ + v₀(t − t_s) + ½a(t − t_s)²` on `[t_s, t_e]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySegment {
    start: TwoFloat,
    end: TwoFloat,
    position: TwoFloat,
    velocity: TwoFloat,
    acceleration: f64,
}

impl TrajectorySegment {
    pub fn start_time(&self) -> f64 {
        self.start.into()
    }

    pub fn end_time(&self) -> f64 {
        self.end.into()
    }

    /// `(y, ẏ, ÿ)` at the segment start.
    pub fn coefficients(&self) -> [f64; 3] {
        [self.position.into(), self.velocity.into(), self.acceleration]
    }

    fn contains(&self, t: TwoFloat) -> bool {
        self.start <= t && t <= self.end
    }

    fn eval(&self, t: TwoFloat) -> TwoFloat {
        let dt = t - self.start;
        self.position + self.velocity * dt + dt * dt * (0.5 * self.acceleration)
    }

    fn velocity_at(&self, t: TwoFloat) -> TwoFloat {
        self.velocity + (t - self.start) * self.acceleration
    }

    pub fn position_at(&self, t: f64) -> f64 {
        self.eval(TwoFloat::from(t)).into()
    }
}

/// Piecewise mean trajectory tiling `[0, 6T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanTrajectory {
    segments: Vec<TrajectorySegment>,
}

impl MeanTrajectory {
    pub fn segments(&self) -> &[TrajectorySegment] {
        &self.segments
    }

    pub fn span(&self) -> (f64, f64) {
        (
            self.segments[0].start_time(),
            self.segments[self.segments.len() - 1].end_time(),
        )
    }

    fn eval(&self, t: TwoFloat) -> Result<TwoFloat> {
        self.segments
            .iter()
            .find(|s| s.contains(t))
            .map(|s| s.eval(t))
            .ok_or_else(|| {
                let (a, b) = self.span();
                Error::invalid(format!(
                    "trajectory spans [{a}, {b}] s and does not cover t = {} s",
                    f64::from(t)
                ))
            })
    }

    pub fn position_at(&self, t: f64) -> Result<f64> {
        self.eval(TwoFloat::from(t)).map(f64::from)
    }

    /// `points` evenly spaced `(t, y)` samples across the full span.
    pub fn sample(&self, points: usize) -> Result<Vec<(f64, f64)>> {
        if points < 2 {
            return Err(Error::invalid("need at least 2 trajectory samples"));
        }
        let (a, b) = self.span();
        (0..points)
            .map(|i| {
                let t = if i + 1 == points {
                    b
                } else {
                    a + (b - a) * i as f64 / (points - 1) as f64
                };
                self.position_at(t).map(|y| (t, y))
            })
            .collect()
    }
}

/// Builds the five-piece trajectory: free flight, first relaunch window,
/// free flight, second window, free flight up to `6T`.
///
/// Windows are `[9T/5 − τ₁/2 + δτ₁, 9T/5 + τ₁/2 + δτ₁]` and
/// `[21T/5 − τ₂/2 + δτ₂, 21T/5 + τ₂/2 + δτ₂]`; each adds `αᵢ·aᵢ·τᵢ` to the
/// horizontal velocity. Position and velocity are propagated across every
/// boundary, so the law is continuous by construction.
pub fn build_mean_trajectory(
    y0: f64,
    v0: f64,
    relaunches: (&RelaunchSpec, &RelaunchSpec),
    t: f64,
) -> Result<MeanTrajectory> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("pulse separation must be > 0, got {t}")));
    }
    let (r1, r2) = relaunches;
    for (i, r) in [r1, r2].iter().enumerate() {
        if !(r.duration > 0.0 && r.duration.is_finite()) {
            return Err(Error::invalid(format!(
                "relaunch {} duration must be > 0, got {}",
                i + 1,
                r.duration
            )));
        }
        if !(r.acceleration.is_finite() && r.tilt.is_finite() && r.timing_offset.is_finite()) {
            return Err(Error::invalid(format!("relaunch {} has non-finite parameters", i + 1)));
        }
    }

    let tt = TwoFloat::from(t);
    let window = |fifths: f64, r: &RelaunchSpec| {
        let centre = tt * fifths / 5.0 + r.timing_offset;
        (centre - 0.5 * r.duration, centre + 0.5 * r.duration)
    };
    let (t1, t2) = window(9.0, r1);
    let (t3, t4) = window(21.0, r2);
    let end = tt * 6.0;
    let zero = TwoFloat::from(0.0);
    if t1 < zero || t4 > end {
        return Err(Error::invalid("relaunch windows must lie inside [0, 6T]"));
    }
    if t2 > t3 {
        return Err(Error::invalid(format!(
            "relaunch windows overlap: first ends at {} s, second starts at {} s",
            f64::from(t2),
            f64::from(t3)
        )));
    }

    let pieces = [
        (zero, t1, 0.0),
        (t1, t2, r1.tilt * r1.acceleration),
        (t2, t3, 0.0),
        (t3, t4, r2.tilt * r2.acceleration),
        (t4, end, 0.0),
    ];
    let mut segments = Vec::with_capacity(pieces.len());
    let mut position = TwoFloat::from(y0);
    let mut velocity = TwoFloat::from(v0);
    for (start, stop, acceleration) in pieces {
        let seg = TrajectorySegment {
            start,
            end: stop,
            position,
            velocity,
            acceleration,
        };
        position = seg.eval(stop);
        velocity = seg.velocity_at(stop);
        segments.push(seg);
    }
    Ok(MeanTrajectory { segments })
}

/// `k[y(0) − (9/4)y(T) + (5/2)y(3T) − (9/4)y(5T) + y(6T)]`
pub fn ftl_phase_from_trajectory(traj: &MeanTrajectory, wave_number: f64, t: f64) -> Result<f64> {
    const TERMS: [(f64, f64); 5] = [(0.0, 1.0), (1.0, -2.25), (3.0, 2.5), (5.0, -2.25), (6.0, 1.0)];
    let tt = TwoFloat::from(t);
    let mut sum = TwoFloat::from(0.0);
    for (m, w) in TERMS {
        sum += traj.eval(tt * m)? * w;
    }
    Ok(f64::from(sum) * wave_number)
}

/// Relaunch timing-error phase
/// `(5/4)·k·a·τ·(Στ·(α₂ − α₁)/2 + Δτ·(α₂ + α₁)/2)`
/// with `Στ = δτ₂ + δτ₁` and `Δτ = δτ₂ − δτ₁`, for equal relaunches.
pub fn timing_error_phase(
    wave_number: f64,
    acceleration: f64,
    duration: f64,
    sum_offsets: f64,
    diff_offsets: f64,
    tilt1: f64,
    tilt2: f64,
) -> Result<f64> {
    if !(duration > 0.0) {
        return Err(Error::invalid(format!("relaunch duration must be > 0, got {duration}")));
    }
    Ok(1.25
        * wave_number
        * acceleration
        * duration
        * (sum_offsets * 0.5 * (tilt2 - tilt1) + diff_offsets * 0.5 * (tilt2 + tilt1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: f64 = 0.26;
    const G: f64 = 9.81;
    const K: f64 = 1.611e10;

    fn pair(a1: f64, a2: f64, d1: f64, d2: f64) -> (RelaunchSpec, RelaunchSpec) {
        let n = RelaunchSpec::nominal(T, G);
        (n.with_tilt(a1).with_offset(d1), n.with_tilt(a2).with_offset(d2))
    }

    #[test]
    fn untilted_is_a_straight_line() {
        let (r1, r2) = pair(0.0, 0.0, 3e-3, -2e-3);
        let tr = build_mean_trajectory(0.2, -0.05, (&r1, &r2), T).unwrap();
        for (t, y) in tr.sample(97).unwrap() {
            assert!((y - (0.2 - 0.05 * t)).abs() < 1e-15);
        }
        assert_eq!(tr.segments().len(), 5);
    }

    #[test]
    fn tilted_first_relaunch_slope() {
        let (r1, r2) = pair(1e-9, 0.0, 0.0, 0.0);
        let tr = build_mean_trajectory(0.0, 0.0, (&r1, &r2), T).unwrap();
        let [_, v, a] = tr.segments()[2].coefficients();
        assert_eq!(a, 0.0);
        let expected = 1e-9 * 2.5 * G * T;
        assert!((v - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn continuous_at_boundaries() {
        let (r1, r2) = pair(3e-7, -8e-7, 4e-4, -1e-4);
        let tr = build_mean_trajectory(0.01, 0.3, (&r1, &r2), T).unwrap();
        for w in tr.segments().windows(2) {
            let (a, b) = (&w[0], &w[1]);
            assert_eq!(a.end, b.start);
            let gap = f64::from(a.eval(a.end) - b.eval(b.start)).abs();
            assert!(gap < 1e-15);
        }
    }

    #[test]
    fn overlapping_windows_rejected() {
        let n = RelaunchSpec::nominal(T, G);
        let wide = RelaunchSpec {
            duration: 3.0 * T,
            acceleration: 2.5 * G * T / (3.0 * T),
            ..n
        };
        assert!(build_mean_trajectory(0.0, 0.0, (&wide, &wide), T).is_err());
        assert!(build_mean_trajectory(0.0, 0.0, (&n, &n), -1.0).is_err());
    }

    #[test]
    fn closure_annihilates_linear_motion() {
        let (r1, r2) = pair(0.0, 0.0, 0.0, 0.0);
        let tr = build_mean_trajectory(0.37, 1.9, (&r1, &r2), T).unwrap();
        assert!(ftl_phase_from_trajectory(&tr, K, T).unwrap().abs() < 1e-15);
    }

    #[test]
    fn centred_equal_tilts_give_no_phase() {
        let (r1, r2) = pair(4e-7, 4e-7, 0.0, 0.0);
        let tr = build_mean_trajectory(0.0, 0.0, (&r1, &r2), T).unwrap();
        assert!(ftl_phase_from_trajectory(&tr, K, T).unwrap().abs() < 1e-15);
    }

    #[test]
    fn single_offset_relaunch() {
        // only the second relaunch tilted and shifted: φ = (5/4)·k·α₂·a·τ·δτ₂
        let (r1, r2) = pair(0.0, 1e-9, 0.0, 1e-8);
        let tr = build_mean_trajectory(0.0, 0.0, (&r1, &r2), T).unwrap();
        let phi = ftl_phase_from_trajectory(&tr, K, T).unwrap();
        let expected = 1.25 * K * 1e-9 * 2.5 * G * T * 1e-8;
        assert!((phi - expected).abs() < 1e-10 * expected, "{phi} vs {expected}");
        assert!((expected - 1.284e-6).abs() < 1e-9);
        let closed = timing_error_phase(K, r2.acceleration, r2.duration, 1e-8, 1e-8, 0.0, 1e-9).unwrap();
        assert!((phi - closed).abs() < 1e-10 * expected);
    }

    #[test]
    fn timing_phase_symmetry() {
        let a = 2.5 * G * T / 0.015;
        assert_eq!(timing_error_phase(K, a, 0.015, 0.0, 0.0, 1e-9, 2e-9).unwrap(), 0.0);
        let common = timing_error_phase(K, a, 0.015, 1e-8, 0.0, 0.0, 1e-9).unwrap();
        let diff = timing_error_phase(K, a, 0.015, 0.0, 1e-8, 0.5e-9, 0.5e-9).unwrap();
        assert!((common - diff).abs() < 1e-15 * common.abs());
        assert!(timing_error_phase(K, a, 0.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn uncovered_time_is_an_error() {
        let (r1, r2) = pair(0.0, 0.0, 0.0, 0.0);
        let tr = build_mean_trajectory(0.0, 0.0, (&r1, &r2), T).unwrap();
        assert!(tr.position_at(7.0 * T).is_err());
        assert!(ftl_phase_from_trajectory(&tr, K, 2.0 * T).is_err());
    }
}
