use infrasound_core::response::{strain_response, strain_response_curve};
use infrasound_core::sensitivity::{assemble_breakdown, resonance_frequency, CurveUnits, NoiseCurve};
use infrasound_core::sequence::{build_folded_triple_loop, build_resonant_sequence, build_single_loop};
use infrasound_core::trajectory::{build_mean_trajectory, ftl_phase_from_trajectory, RelaunchSpec};
use infrasound_core::{DetectorConfig, Execution, FrequencyGrid};
use proptest::prelude::*;

const T: f64 = 0.26;
const G: f64 = 9.81;

fn phase(y0: f64, v0: f64, a1: f64, a2: f64, d1: f64, d2: f64) -> f64 {
    let k = DetectorConfig::default().wave_number();
    let n = RelaunchSpec::nominal(T, G);
    let tr = build_mean_trajectory(y0, v0, (&n.with_tilt(a1).with_offset(d1), &n.with_tilt(a2).with_offset(d2)), T)
        .unwrap();
    ftl_phase_from_trajectory(&tr, k, T).unwrap()
}

proptest! {
    #[test]
    fn trajectory_phase_linear_in_each_parameter(
        a1 in -1e-6f64..1e-6, a2 in -1e-6f64..1e-6,
        d1 in -1e-6f64..1e-6, d2 in -1e-6f64..1e-6,
        step in 1e-8f64..1e-7,
    ) {
        let base = phase(0.0, 0.0, a1, a2, d1, d2);
        // φ is bilinear: the second difference in any single variable vanishes
        let checks = [
            (phase(0.0, 0.0, a1 + step, a2, d1, d2), phase(0.0, 0.0, a1 + 2.0 * step, a2, d1, d2)),
            (phase(0.0, 0.0, a1, a2 + step, d1, d2), phase(0.0, 0.0, a1, a2 + 2.0 * step, d1, d2)),
            (phase(0.0, 0.0, a1, a2, d1 + step, d2), phase(0.0, 0.0, a1, a2, d1 + 2.0 * step, d2)),
            (phase(0.0, 0.0, a1, a2, d1, d2 + step), phase(0.0, 0.0, a1, a2, d1, d2 + 2.0 * step)),
        ];
        for (p1, p2) in checks {
            let first = p1 - base;
            let second = p2 - 2.0 * p1 + base;
            prop_assert!(second.abs() <= 1e-9 * first.abs().max(1e-12), "{second} vs {first}");
        }
    }

    #[test]
    fn symmetric_relaunch_pair_is_rejected(
        a in -1e-6f64..1e-6, d in -1e-6f64..1e-6, y0 in -1.0f64..1.0, v0 in -1.0f64..1.0,
    ) {
        prop_assert!(phase(y0, v0, a, a, d, d).abs() < 1e-15);
    }

    #[test]
    fn trajectory_continuous(
        a1 in -1e-6f64..1e-6, a2 in -1e-6f64..1e-6,
        d1 in -1e-4f64..1e-4, d2 in -1e-4f64..1e-4,
        y0 in -1.0f64..1.0, v0 in -1.0f64..1.0,
    ) {
        let n = RelaunchSpec::nominal(T, G);
        let tr = build_mean_trajectory(y0, v0, (&n.with_tilt(a1).with_offset(d1), &n.with_tilt(a2).with_offset(d2)), T)
            .unwrap();
        for w in tr.segments().windows(2) {
            let b = w[0].end_time();
            prop_assert_eq!(b, w[1].start_time());
            prop_assert!((w[0].position_at(b) - w[1].position_at(b)).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_identity(values in prop::collection::vec(prop::collection::vec(0.0f64..1e-18, 8), 1..5)) {
        let fs: Vec<f64> = (1..=8).map(|i| i as f64).collect();
        let comps: Vec<NoiseCurve> = values
            .iter()
            .enumerate()
            .map(|(i, v)| NoiseCurve::new(fs.clone(), v.clone(), CurveUnits::Strain, format!("c{i}")).unwrap())
            .collect();
        let b = assemble_breakdown(comps, vec![], vec![]).unwrap();
        for (i, total) in b.total.asd().iter().enumerate() {
            let sum: f64 = values.iter().map(|v| v[i] * v[i]).sum();
            prop_assert!((total * total - sum).abs() <= 1e-12 * sum.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn resonant_peak_grows_with_units(n in 1usize..6) {
        let s = DetectorConfig::default().splitter;
        let one = resonance_frequency(&build_folded_triple_loop(T, &s).unwrap(), 0.01, 1.0 / T).unwrap().1;
        let many = resonance_frequency(&build_resonant_sequence(T, n, &s).unwrap(), 0.01, 1.0 / T).unwrap().1;
        prop_assert!(many >= 0.8 * n as f64 * one);
    }
}

#[test]
fn response_rolloff_exponents() {
    let c = DetectorConfig::default();
    for (seq, expected) in [
        (build_single_loop(T, &c.splitter).unwrap(), 2.0),
        (build_folded_triple_loop(T, &c.splitter).unwrap(), 4.0),
    ] {
        let (f1, f2) = (1e-4 / T, 1e-3 / T);
        let r1 = strain_response(&seq, c.arm_length, f1).unwrap().norm();
        let r2 = strain_response(&seq, c.arm_length, f2).unwrap().norm();
        let slope = (r2 / r1).ln() / (f2 / f1).ln();
        assert!((slope / expected - 1.0).abs() < 0.05, "{slope}");
    }
}

#[test]
fn execution_modes_agree_bitwise() {
    let c = DetectorConfig::default();
    let grid = FrequencyGrid::log_spaced(1e-3, 1e2, 5000).unwrap();
    let a = strain_response_curve(&c.sequence, c.arm_length, &grid, Execution::Sequential);
    let b = strain_response_curve(&c.sequence, c.arm_length, &grid, Execution::default());
    assert_eq!(a.values, b.values);
}
