use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::model::{DetectorConfig, Geometry};
use crate::sequence::SequenceKind;

use super::report::write_text;

/// Every accepted key with its unit and meaning, in file order.
pub const CONFIG_KEYS: &[(&str, &str)] = &[
    ("arm_length_m", "baseline L, m"),
    ("geometry", "`sl` or `ftl`"),
    ("pulse_separation_s", "pulse separation T, s"),
    ("loops_n", "triple-loop units in sequence (ftl only; >1 gives the resonant mode)"),
    ("interleave_t_s", "pulse separations of interleaved channels, s"),
    ("split_flux", "share the atom flux between interleaved channels"),
    ("dead_time_s", "idle time between resonant measurements, s"),
    ("differential_arms", "apply the sqrt(2) uncorrelated-arms factor to requirements"),
    ("speed_of_light_m_per_s", "speed of light, m/s"),
    ("gravity_m_per_s2", "local gravity g, m/s^2"),
    ("gravity_gradient_per_s2", "gravity gradient Gamma, 1/s^2"),
    ("earth_rotation_rad_per_s", "projected Earth rotation Omega, rad/s"),
    ("photon_recoils", "photon recoils per side of the beam splitter"),
    ("wavelength_m", "beam-splitter wavelength, m"),
    ("atoms_per_shot", "atoms per ensemble"),
    ("shot_rate_hz", "ensembles per second, Hz"),
    ("initial_radius_m", "initial cloud radius, m"),
    ("expansion_rate_m_per_s", "cloud expansion rate, m/s"),
    ("squeezing_db", "detection noise below shot noise, dB"),
    ("source_distance_m", "source to beam-splitter distance, m"),
    ("launch_velocity_m_per_s", "launch velocity, m/s (absent: gT for sl, gT/2 for ftl)"),
];

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Reader<'a> {
    table: &'a Table,
    errs: Vec<String>,
}

impl Reader<'_> {
    fn float(&mut self, key: &str, target: &mut f64) {
        match self.table.get(key) {
            None => {}
            Some(Value::Float(v)) => *target = *v,
            Some(Value::Integer(v)) => *target = *v as f64,
            Some(other) => self.errs.push(format!("{key}: expected a number, found {}", other.type_str())),
        }
    }

    fn boolean(&mut self, key: &str, target: &mut bool) {
        match self.table.get(key) {
            None => {}
            Some(Value::Boolean(v)) => *target = *v,
            Some(other) => self.errs.push(format!("{key}: expected true or false, found {}", other.type_str())),
        }
    }
}

/// Parses config text; absent keys keep their defaults, unknown keys and
/// invalid values are reported together.
pub fn config_from_str(text: &str, origin: &str) -> Result<DetectorConfig> {
    let table: Table = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;

    let mut r = Reader { table: &table, errs: Vec::new() };
    for key in table.keys() {
        if !CONFIG_KEYS.iter().any(|(k, _)| k == key) {
            r.errs.push(format!("unknown key `{key}`"));
        }
    }

    let mut c = DetectorConfig::default();
    r.float("arm_length_m", &mut c.arm_length);
    let mut t = c.sequence.pulse_separation;
    r.float("pulse_separation_s", &mut t);
    r.boolean("split_flux", &mut c.split_flux);
    r.float("dead_time_s", &mut c.dead_time);
    r.boolean("differential_arms", &mut c.differential_arms);
    r.float("speed_of_light_m_per_s", &mut c.constants.speed_of_light);
    r.float("gravity_m_per_s2", &mut c.constants.gravity);
    r.float("gravity_gradient_per_s2", &mut c.constants.gravity_gradient);
    r.float("earth_rotation_rad_per_s", &mut c.constants.earth_rotation);
    r.float("photon_recoils", &mut c.splitter.photon_recoils);
    r.float("wavelength_m", &mut c.splitter.wavelength);
    r.float("atoms_per_shot", &mut c.source.atoms_per_shot);
    r.float("shot_rate_hz", &mut c.source.shot_rate);
    r.float("initial_radius_m", &mut c.source.initial_radius);
    r.float("expansion_rate_m_per_s", &mut c.source.expansion_rate);
    r.float("squeezing_db", &mut c.source.squeezing_db);
    r.float("source_distance_m", &mut c.source.source_distance);
    if table.contains_key("launch_velocity_m_per_s") {
        let mut v = 0.0;
        r.float("launch_velocity_m_per_s", &mut v);
        c.source.launch_velocity = Some(v);
    }

    let geometry = match table.get("geometry") {
        None => Geometry::TripleLoop,
        Some(Value::String(s)) => s.parse().unwrap_or_else(|e: Error| {
            r.errs.push(format!("geometry: {e}"));
            Geometry::TripleLoop
        }),
        Some(other) => {
            r.errs.push(format!("geometry: expected a string, found {}", other.type_str()));
            Geometry::TripleLoop
        }
    };
    let loops = match table.get("loops_n") {
        None => 1,
        Some(Value::Integer(n)) if *n >= 1 => *n as usize,
        Some(other) => {
            r.errs.push(format!("loops_n: expected an integer >= 1, found {other}"));
            1
        }
    };
    if geometry == Geometry::SingleLoop && loops != 1 {
        r.errs.push(format!("loops_n = {loops} requires geometry = \"ftl\""));
    }
    match table.get("interleave_t_s") {
        None => {}
        Some(Value::Array(items)) => {
            let mut ts = Vec::with_capacity(items.len());
            for (i, v) in items.iter().enumerate() {
                match v {
                    Value::Float(x) => ts.push(*x),
                    Value::Integer(x) => ts.push(*x as f64),
                    other => r.errs.push(format!("interleave_t_s[{i}]: expected a number, found {}", other.type_str())),
                }
            }
            c.interleave_t = ts;
        }
        Some(other) => r.errs.push(format!("interleave_t_s: expected an array, found {}", other.type_str())),
    }

    let kind = match (geometry, loops) {
        (Geometry::SingleLoop, _) => SequenceKind::SingleLoop,
        (Geometry::TripleLoop, 1) => SequenceKind::FoldedTripleLoop,
        (Geometry::TripleLoop, units) => SequenceKind::Resonant { units },
    };
    match kind.build(t, &c.splitter) {
        Ok(seq) => c.sequence = seq,
        Err(e) => r.errs.push(format!("pulse_separation_s: {e}")),
    }
    match c.validate() {
        Ok(()) => {}
        Err(Error::Validation(more)) => r.errs.extend(more),
        Err(e) => r.errs.push(e.to_string()),
    }
    if r.errs.is_empty() {
        Ok(c)
    } else {
        Err(Error::Validation(r.errs))
    }
}

pub fn read_config(path: &Path) -> Result<DetectorConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    config_from_str(&text, &path.display().to_string())
}

/// Canonical config text with every key spelled out.
pub fn config_to_string(c: &DetectorConfig) -> String {
    let doc = |key: &str| CONFIG_KEYS.iter().find(|(k, _)| *k == key).map(|(_, d)| *d).unwrap_or("");
    let mut s = String::new();
    let mut put = |key: &str, value: String| {
        let _ = writeln!(s, "# {}\n{key} = {value}", doc(key));
    };
    let src = &c.source;
    put("arm_length_m", format!("{:?}", c.arm_length));
    put("geometry", format!("\"{}\"", c.geometry().tag()));
    put("pulse_separation_s", format!("{:?}", c.sequence.pulse_separation));
    put("loops_n", c.sequence.kind.units().to_string());
    put(
        "interleave_t_s",
        format!("[{}]", c.interleave_t.iter().map(|t| format!("{t:?}")).collect::<Vec<_>>().join(", ")),
    );
    put("split_flux", c.split_flux.to_string());
    put("dead_time_s", format!("{:?}", c.dead_time));
    put("differential_arms", c.differential_arms.to_string());
    put("speed_of_light_m_per_s", format!("{:?}", c.constants.speed_of_light));
    put("gravity_m_per_s2", format!("{:?}", c.constants.gravity));
    put("gravity_gradient_per_s2", format!("{:?}", c.constants.gravity_gradient));
    put("earth_rotation_rad_per_s", format!("{:?}", c.constants.earth_rotation));
    put("photon_recoils", format!("{:?}", c.splitter.photon_recoils));
    put("wavelength_m", format!("{:?}", c.splitter.wavelength));
    put("atoms_per_shot", format!("{:?}", src.atoms_per_shot));
    put("shot_rate_hz", format!("{:?}", src.shot_rate));
    put("initial_radius_m", format!("{:?}", src.initial_radius));
    put("expansion_rate_m_per_s", format!("{:?}", src.expansion_rate));
    put("squeezing_db", format!("{:?}", src.squeezing_db));
    put("source_distance_m", format!("{:?}", src.source_distance));
    if let Some(v) = src.launch_velocity {
        put("launch_velocity_m_per_s", format!("{v:?}"));
    }
    s
}

pub fn write_config(c: &DetectorConfig, path: &Path) -> Result<()> {
    write_text(path, &config_to_string(c))
}

/// SHA-256 of the canonical config text, hex.
pub fn config_hash(c: &DetectorConfig) -> String {
    hex::encode(Sha256::digest(config_to_string(c).as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = config_from_str("", "t").unwrap();
        assert_eq!(c, DetectorConfig::default());
        assert_eq!(c.arm_length, 1e4);
        assert_eq!(c.sequence.pulse_separation, 0.26);
        assert_eq!(c.source.atoms_per_shot, 1e9);
    }

    #[test]
    fn single_override_keeps_the_rest() {
        let c = config_from_str("pulse_separation_s = 0.2\n", "t").unwrap();
        let d = DetectorConfig::default();
        assert_eq!(c.sequence.pulse_separation, 0.2);
        assert_eq!(c.arm_length, d.arm_length);
        assert_eq!(c.source, d.source);
        assert_eq!(c.interleave_t, d.interleave_t);
    }

    #[test]
    fn errors_are_aggregated() {
        let err = config_from_str("arm_length_m = -1\nshot_rate_hz = 0\nbogus = 3\n", "t").unwrap_err();
        match err {
            Error::Validation(list) => {
                assert!(list.iter().any(|m| m.contains("bogus")));
                assert!(list.iter().any(|m| m.contains("arm_length_m")));
                assert!(list.iter().any(|m| m.contains("shot_rate_hz")));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_line() {
        match config_from_str("arm_length_m = 1\n= oops\n", "t") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let mut c = DetectorConfig::default();
        c.arm_length = 1234.5678901234567;
        c.interleave_t = vec![0.1, 0.2];
        c.source.launch_velocity = Some(1.5);
        c.sequence = SequenceKind::Resonant { units: 3 }.build(0.25, &c.splitter).unwrap();
        let back = config_from_str(&config_to_string(&c), "t").unwrap();
        assert_eq!(back, c);
        let sl = config_from_str("geometry = \"sl\"", "t").unwrap();
        assert_eq!(config_from_str(&config_to_string(&sl), "t").unwrap(), sl);
    }

    #[test]
    fn hash_tracks_content() {
        let a = DetectorConfig::default();
        let mut b = a.clone();
        assert_eq!(config_hash(&a), config_hash(&b));
        b.arm_length = 2e4;
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }

    #[test]
    fn geometry_and_loops_checked() {
        assert!(config_from_str("geometry = \"sl\"\nloops_n = 3\n", "t").is_err());
        assert!(config_from_str("geometry = \"hex\"\n", "t").is_err());
        let r = config_from_str("loops_n = 3\n", "t").unwrap();
        assert_eq!(r.sequence.kind, SequenceKind::Resonant { units: 3 });
    }
}
