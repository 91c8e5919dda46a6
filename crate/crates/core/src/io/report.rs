use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::budget::RequirementReport;
use crate::error::{Error, Result};
use crate::model::DetectorConfig;
use crate::sensitivity::SensitivityBreakdown;

use super::config::config_hash;

/// Version of every JSON document this crate emits.
pub const SCHEMA_VERSION: u32 = 1;

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Aligned plain-text table of a requirement report.
pub fn report_to_text(r: &RequirementReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "requirements for {} at phase floor {:.2e} rad (differential factor {:.4})",
        r.geometry, r.phase_floor_rad, r.differential_factor
    );
    let head = ["formula", "kind", "quantity", "value", "units", "reference"];
    let rows: Vec<[String; 6]> = r
        .entries
        .iter()
        .map(|e| {
            [
                e.formula_id.clone(),
                serde_json::to_value(e.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default(),
                e.quantity.clone(),
                format!("{:.3e}", e.value),
                e.units.clone(),
                e.reference.map(|v| format!("{v:.1e}")).unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    let mut width = head.map(str::len);
    for row in &rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut line = |cells: &[String]| {
        let parts: Vec<String> = cells.iter().zip(width).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(s, "{}", parts.join("  ").trim_end());
    };
    line(&head.map(String::from));
    line(&width.map(|w| "-".repeat(w)));
    for row in &rows {
        line(row);
    }
    for e in r.entries.iter().filter(|e| e.note.is_some()) {
        let _ = writeln!(s, "note {} {}: {}", e.formula_id, e.quantity, e.note.as_deref().unwrap_or(""));
    }
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    for f in &r.footnotes {
        let _ = writeln!(s, "assumption: {f}");
    }
    s
}

/// JSON document of a requirement report.
pub fn report_to_json(r: &RequirementReport) -> Result<String> {
    let mut v = serde_json::to_value(r)?;
    v["schema_version"] = json!(SCHEMA_VERSION);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// JSON document of signed coupling phases.
pub fn phases_to_json(geometry: &str, phases: &BTreeMap<&'static str, f64>) -> Result<String> {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "geometry": geometry,
        "units": "rad",
        "phases": phases,
    });
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveInfo {
    pub label: String,
    pub units: String,
    pub points: usize,
}

/// Provenance written next to a breakdown CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownMetadata {
    pub schema_version: u32,
    pub config_sha256: String,
    pub components: Vec<CurveInfo>,
    pub overlays: Vec<CurveInfo>,
    pub omitted: Vec<String>,
    /// Seconds since the Unix epoch; zero in reproducible mode.
    pub generated_unix_s: u64,
}

pub fn breakdown_metadata(
    config: &DetectorConfig,
    b: &SensitivityBreakdown,
    reproducible: bool,
) -> BreakdownMetadata {
    let info = |c: &crate::sensitivity::NoiseCurve| CurveInfo {
        label: c.label().to_string(),
        units: c.units().tag().to_string(),
        points: c.len(),
    };
    BreakdownMetadata {
        schema_version: SCHEMA_VERSION,
        config_sha256: config_hash(config),
        components: b.components.iter().map(info).collect(),
        overlays: b.overlays.iter().map(info).collect(),
        omitted: b.omitted.clone(),
        generated_unix_s: if reproducible {
            0
        } else {
            SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
        },
    }
}
