//! Light-pulse sequences as weighted, instantaneous pulse events.
//!
//! A sequence is a list of pulses at times `tⱼ` with signed wave-number
//! weights `wⱼ` (multiples of the effective wave number `k`). The measured
//! phase is `k Σⱼ wⱼ y(tⱼ)` for the atoms' mean position `y` along the beam
//! axis, so every response in this crate derives from the weights alone.
//!
//! Weights are built from integer quarters, keeping the zeroth moment exact.

use crate::error::{Error, Result};
use crate::model::{BeamSplitterSpec, Geometry};

/// One instantaneous pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEvent {
    /// Seconds after the first pulse.
    pub time: f64,
    /// Signed multiplier of the effective wave number.
    pub weight: f64,
}

/// Which builder produced a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    SingleLoop,
    FoldedTripleLoop,
    /// `units` concatenated triple-loop units, i.e. `3·units` loops.
    Resonant { units: usize },
}

impl SequenceKind {
    pub fn build(self, t: f64, splitter: &BeamSplitterSpec) -> Result<PulseSequence> {
        match self {
            SequenceKind::SingleLoop => build_single_loop(t, splitter),
            SequenceKind::FoldedTripleLoop => build_folded_triple_loop(t, splitter),
            SequenceKind::Resonant { units } => build_resonant_sequence(t, units, splitter),
        }
    }

    /// Number of triple-loop units (1 for the plain folded sequence).
    pub fn units(self) -> usize {
        match self {
            SequenceKind::SingleLoop | SequenceKind::FoldedTripleLoop => 1,
            SequenceKind::Resonant { units } => units,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pub label: String,
    pub kind: SequenceKind,
    pub pulse_separation: f64,
    /// Effective wave number `k` the weights multiply, rad/m.
    pub wave_number: f64,
    pub events: Vec<PulseEvent>,
    /// Vertical relaunches; they do not enter the horizontal weight sums.
    pub relaunch_times: Vec<f64>,
}

// (time in units of T, weight in quarters)
const SINGLE_LOOP: [(u32, i64); 3] = [(0, 4), (1, -8), (2, 4)];
const TRIPLE_LOOP: [(u32, i64); 5] = [(0, 4), (1, -9), (3, 10), (5, -9), (6, 4)];
const TRIPLE_LOOP_SPAN: u32 = 6;
const RELAUNCH_FIFTHS: [u32; 2] = [9, 21];

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("pulse separation must be > 0, got {t}")))
    }
}

fn events_from(t: f64, table: &[(u32, i64)]) -> Vec<PulseEvent> {
    table
        .iter()
        .map(|&(m, q)| PulseEvent {
            time: m as f64 * t,
            weight: q as f64 / 4.0,
        })
        .collect()
}

/// Symmetric single loop: pulses at `0, T, 2T` with weights `1, −2, 1`.
pub fn build_single_loop(t: f64, splitter: &BeamSplitterSpec) -> Result<PulseSequence> {
    check_t(t)?;
    Ok(PulseSequence {
        label: format!("single-loop T={t} s"),
        kind: SequenceKind::SingleLoop,
        pulse_separation: t,
        wave_number: splitter.wave_number(),
        events: events_from(t, &SINGLE_LOOP),
        relaunch_times: Vec::new(),
    })
}

/// Folded triple loop: pulses at `0, T, 3T, 5T, 6T` with weights
/// `1, −9/4, 5/2, −9/4, 1` and relaunches at `9T/5` and `21T/5`.
pub fn build_folded_triple_loop(t: f64, splitter: &BeamSplitterSpec) -> Result<PulseSequence> {
    check_t(t)?;
    Ok(PulseSequence {
        label: format!("folded-triple-loop T={t} s"),
        kind: SequenceKind::FoldedTripleLoop,
        pulse_separation: t,
        wave_number: splitter.wave_number(),
        events: events_from(t, &TRIPLE_LOOP),
        relaunch_times: RELAUNCH_FIFTHS.iter().map(|&m| m as f64 / 5.0 * t).collect(),
    })
}

/// Narrow-band sequence of `units` triple-loop units (`3·units` loops).
///
/// Units of length `6T` are laid end to end; the closing pulse of one unit
/// and the opening pulse of the next coincide and their weights add. Each
/// unit keeps its own pair of relaunches.
pub fn build_resonant_sequence(
    t: f64,
    units: usize,
    splitter: &BeamSplitterSpec,
) -> Result<PulseSequence> {
    check_t(t)?;
    if units < 1 {
        return Err(Error::invalid("resonant sequence needs at least one unit"));
    }
    if units == 1 {
        return build_folded_triple_loop(t, splitter);
    }
    let mut table: Vec<(u32, i64)> = Vec::with_capacity(4 * units + 1);
    let mut relaunch_fifths = Vec::with_capacity(2 * units);
    for u in 0..units as u32 {
        let offset = u * TRIPLE_LOOP_SPAN;
        for (j, &(m, q)) in TRIPLE_LOOP.iter().enumerate() {
            match table.last_mut() {
                Some(last) if j == 0 && last.0 == offset + m => last.1 += q,
                _ => table.push((offset + m, q)),
            }
        }
        relaunch_fifths.extend(RELAUNCH_FIFTHS.iter().map(|&r| r + 5 * offset));
    }
    Ok(PulseSequence {
        label: format!("resonant {}-loop T={t} s", 3 * units),
        kind: SequenceKind::Resonant { units },
        pulse_separation: t,
        wave_number: splitter.wave_number(),
        events: events_from(t, &table),
        relaunch_times: relaunch_fifths.iter().map(|&m| m as f64 / 5.0 * t).collect(),
    })
}

impl PulseSequence {
    pub fn geometry(&self) -> Geometry {
        match self.kind {
            SequenceKind::SingleLoop => Geometry::SingleLoop,
            _ => Geometry::TripleLoop,
        }
    }

    /// Time of the final pulse.
    pub fn duration(&self) -> f64 {
        self.events.last().map_or(0.0, |e| e.time)
    }

    /// `Σⱼ wⱼ tⱼᵖ`.
    pub fn moment(&self, p: i32) -> f64 {
        self.events
            .iter()
            .map(|e| e.weight * if p == 0 { 1.0 } else { e.time.powi(p) })
            .sum()
    }

    /// Phase `k Σ wⱼ y(tⱼ)` for a mean trajectory `y`.
    pub fn phase_of(&self, y: impl Fn(f64) -> f64) -> f64 {
        self.wave_number * self.events.iter().map(|e| e.weight * y(e.time)).sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn splitter() -> BeamSplitterSpec {
        BeamSplitterSpec::default()
    }

    fn assert_closed(seq: &PulseSequence) {
        let t = seq.pulse_separation;
        assert!(seq.moment(0).abs() < 1e-12, "Σw = {}", seq.moment(0));
        assert!(seq.moment(1).abs() < 1e-12 * t, "Σwt = {}", seq.moment(1));
    }

    #[test]
    fn single_loop_layout() {
        let s = build_single_loop(0.26, &splitter()).unwrap();
        let times: Vec<f64> = s.events.iter().map(|e| e.time).collect();
        let weights: Vec<f64> = s.events.iter().map(|e| e.weight).collect();
        assert_eq!(times, vec![0.0, 0.26, 0.52]);
        assert_eq!(weights, vec![1.0, -2.0, 1.0]);
        assert!(s.relaunch_times.is_empty());
        assert_closed(&s);
    }

    #[test]
    fn triple_loop_layout() {
        let s = build_folded_triple_loop(0.26, &splitter()).unwrap();
        let times: Vec<f64> = s.events.iter().map(|e| e.time).collect();
        let expected = [0.0, 0.26, 0.78, 1.30, 1.56];
        for (a, b) in times.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let weights: Vec<f64> = s.events.iter().map(|e| e.weight).collect();
        assert_eq!(weights, vec![1.0, -2.25, 2.5, -2.25, 1.0]);
        assert!((s.relaunch_times[0] - 9.0 / 5.0 * 0.26).abs() < 1e-15);
        assert!((s.relaunch_times[1] - 21.0 / 5.0 * 0.26).abs() < 1e-15);
        assert_closed(&s);
        // second moment also vanishes, giving the f⁴ roll-off
        assert!(s.moment(2).abs() < 1e-12 * 0.26 * 0.26);
    }

    #[test]
    fn non_positive_t_rejected() {
        assert!(build_single_loop(0.0, &splitter()).is_err());
        assert!(build_folded_triple_loop(-1.0, &splitter()).is_err());
        assert!(build_resonant_sequence(f64::NAN, 2, &splitter()).is_err());
        assert!(build_resonant_sequence(0.26, 0, &splitter()).is_err());
    }

    #[test]
    fn resonant_base_case_matches_triple_loop() {
        let a = build_resonant_sequence(0.26, 1, &splitter()).unwrap();
        let b = build_folded_triple_loop(0.26, &splitter()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn resonant_two_units() {
        let s = build_resonant_sequence(0.26, 2, &splitter()).unwrap();
        assert_eq!(s.events.len(), 9);
        assert_eq!(s.events[4].weight, 2.0);
        assert!((s.duration() - 12.0 * 0.26).abs() < 1e-14);
        assert_eq!(s.relaunch_times.len(), 4);
        assert_closed(&s);
    }

    #[test]
    fn resonant_three_units_duration() {
        let s = build_resonant_sequence(0.26, 3, &splitter()).unwrap();
        assert!((s.duration() - 4.68).abs() < 1e-14);
        assert_eq!(s.events.len(), 13);
        assert_closed(&s);
    }

    proptest::proptest! {
        #[test]
        fn every_builder_is_closed(t in 1e-3f64..2.0, n in 1usize..12) {
            for s in [
                build_single_loop(t, &splitter()).unwrap(),
                build_folded_triple_loop(t, &splitter()).unwrap(),
                build_resonant_sequence(t, n, &splitter()).unwrap(),
            ] {
                let scale = s.duration().max(t);
                proptest::prop_assert!(s.moment(0).abs() < 1e-12);
                proptest::prop_assert!(s.moment(1).abs() < 1e-12 * scale);
                proptest::prop_assert!(s.events.windows(2).all(|w| w[1].time > w[0].time));
            }
        }
    }
}
