use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::response::PhaseResponse;
use crate::sensitivity::{CurveUnits, NoiseCurve, SensitivityBreakdown};

use super::report::write_text;

const CURVE_HEADER: &str = "frequency_hz,asd";

/// Comment-line metadata of a curve file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveFileHeader {
    pub units: CurveUnits,
    pub label: String,
    pub source: String,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Curve file text. Seventeen significant digits make the round trip exact.
pub fn curve_to_csv(curve: &NoiseCurve, source: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# units: {}", curve.units().tag());
    let _ = writeln!(s, "# label: {}", curve.label());
    let _ = writeln!(s, "# source: {source}");
    s.push_str(CURVE_HEADER);
    s.push('\n');
    for (f, v) in curve.frequencies().iter().zip(curve.asd()) {
        let _ = writeln!(s, "{},{}", num(*f), num(*v));
    }
    s
}

pub fn write_curve(curve: &NoiseCurve, path: &Path) -> Result<()> {
    write_text(path, &curve_to_csv(curve, "infrasound"))
}

/// Parses curve text; `origin` names the input in errors.
pub fn parse_curve(text: &str, origin: &str) -> Result<(CurveFileHeader, NoiseCurve)> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut units = None;
    let mut label = String::new();
    let mut source = String::new();
    let mut seen_header = false;
    let (mut fs, mut vs) = (Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "units" => units = Some(value.parse::<CurveUnits>().map_err(|e| err(n, e.to_string()))?),
                    "label" => label = value.to_string(),
                    "source" => source = value.to_string(),
                    _ => {}
                }
            }
            continue;
        }
        if !seen_header {
            if line.replace(' ', "") != CURVE_HEADER {
                return Err(err(n, format!("expected header `{CURVE_HEADER}`, found `{line}`")));
            }
            seen_header = true;
            continue;
        }
        let mut cols = line.split(',');
        let (Some(a), Some(b), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(err(n, format!("expected two columns, found `{line}`")));
        };
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| err(n, format!("`{}`: {e}", s.trim())));
        let (f, v) = (parse(a)?, parse(b)?);
        if !(f > 0.0 && f.is_finite()) {
            return Err(err(n, format!("frequency must be positive and finite, got {f}")));
        }
        if let Some(prev) = fs.last() {
            if f <= *prev {
                return Err(err(n, format!("frequency {f} does not increase past {prev}")));
            }
        }
        if !(v >= 0.0) {
            return Err(err(n, format!("ASD must be non-negative, got {v}")));
        }
        fs.push(f);
        vs.push(v);
    }
    let units = units.ok_or_else(|| err(1, "missing `# units:` line".into()))?;
    if !seen_header {
        return Err(err(text.lines().count().max(1), format!("missing header `{CURVE_HEADER}`")));
    }
    if fs.is_empty() {
        return Err(err(text.lines().count().max(1), "no data rows".into()));
    }
    let curve = NoiseCurve::new(fs, vs, units, label.clone())?;
    Ok((CurveFileHeader { units, label, source }, curve))
}

pub fn read_curve_file(path: &Path) -> Result<(CurveFileHeader, NoiseCurve)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_curve(&text, &path.display().to_string())
}

pub fn read_curve(path: &Path) -> Result<NoiseCurve> {
    read_curve_file(path).map(|(_, c)| c)
}

/// Columns `frequency_hz`, one per component, then `total`.
pub fn breakdown_to_csv(b: &SensitivityBreakdown) -> Result<String> {
    if b.components.is_empty() {
        return Err(Error::invalid("a breakdown needs at least one component"));
    }
    let mut s = String::new();
    let _ = writeln!(s, "# units: {}", b.total.units().tag());
    if !b.omitted.is_empty() {
        let _ = writeln!(s, "# omitted: {}", b.omitted.join(","));
    }
    s.push_str("frequency_hz");
    for c in &b.components {
        let _ = write!(s, ",{}", c.label().replace(',', ";"));
    }
    s.push_str(",total\n");
    for (i, f) in b.total.frequencies().iter().enumerate() {
        s.push_str(&num(*f));
        for c in &b.components {
            let _ = write!(s, ",{}", num(c.asd()[i]));
        }
        let _ = writeln!(s, ",{}", num(b.total.asd()[i]));
    }
    Ok(s)
}

pub fn write_breakdown(b: &SensitivityBreakdown, path: &Path) -> Result<()> {
    write_text(path, &breakdown_to_csv(b)?)
}

/// Columns `frequency_hz,magnitude,phase_rad`.
pub fn response_to_csv(r: &PhaseResponse) -> String {
    let mut s = String::from("frequency_hz,magnitude,phase_rad\n");
    for (f, v) in r.frequencies.iter().zip(&r.values) {
        let _ = writeln!(s, "{},{},{}", num(*f), num(v.norm()), num(v.arg()));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> NoiseCurve {
        NoiseCurve::new(vec![1.0, 2.0], vec![1e-20, 2e-20], CurveUnits::Strain, "x").unwrap()
    }

    #[test]
    fn two_line_file() {
        let text = "# units: strain_per_rtHz\nfrequency_hz,asd\n1.0,1e-20\n2.0,2e-20\n";
        let (_, c) = parse_curve(text, "t").unwrap();
        assert_eq!(c, NoiseCurve::new(vec![1.0, 2.0], vec![1e-20, 2e-20], CurveUnits::Strain, "").unwrap());
    }

    #[test]
    fn errors_name_the_line() {
        let text = "# units: m_per_rtHz\nfrequency_hz,asd\n1.0,1e-20\n0.5,2e-20\n";
        match parse_curve(text, "t") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let neg = "# units: m_per_rtHz\nfrequency_hz,asd\n1.0,-1\n";
        assert!(matches!(parse_curve(neg, "t"), Err(Error::Parse { line: 3, .. })));
        let bad_units = "# units: volts\nfrequency_hz,asd\n1.0,1\n";
        assert!(matches!(parse_curve(bad_units, "t"), Err(Error::Parse { line: 1, .. })));
        let no_header = "# units: m_per_rtHz\n1.0,1\n";
        assert!(matches!(parse_curve(no_header, "t"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_curve("frequency_hz,asd\n1.0,1\n", "t").is_err());
    }

    #[test]
    fn output_is_deterministic() {
        assert_eq!(curve_to_csv(&sample(), "s"), curve_to_csv(&sample(), "s"));
    }

    #[test]
    fn breakdown_columns() {
        let a = sample().with_label("a");
        let b = crate::sensitivity::assemble_breakdown(
            vec![a.clone(), a.clone().with_label("b"), a.with_label("c")],
            vec![],
            vec![],
        )
        .unwrap();
        let csv = breakdown_to_csv(&b).unwrap();
        let header = csv.lines().find(|l| l.starts_with("frequency_hz")).unwrap();
        assert_eq!(header.split(',').count(), 5);
        assert!(csv.lines().last().unwrap().split(',').count() == 5);
    }

    proptest! {
        #[test]
        fn curve_round_trip(
            steps in prop::collection::vec(1e-3f64..10.0, 1..40),
            start in 1e-4f64..1.0,
            values in prop::collection::vec(0.0f64..1e-15, 40),
        ) {
            let mut f = start;
            let mut fs = Vec::new();
            for s in &steps {
                fs.push(f);
                f += s;
            }
            let vs = values[..fs.len()].to_vec();
            let c = NoiseCurve::new(fs, vs, CurveUnits::Rad, "p").unwrap();
            let (h, back) = parse_curve(&curve_to_csv(&c, "prop"), "mem").unwrap();
            prop_assert_eq!(back, c);
            prop_assert_eq!(h.source, "prop");
        }
    }
}
