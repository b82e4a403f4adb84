//! Report serialization and the projector document.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;
use serde_json::{json, Value};

use crate::dirac_fock::{Projector, ProjectorSource};
use crate::error::{Error, Result};
use crate::radial::Channel;

pub const REPORT_FORMAT: &str = "dfatoms-report/1";
pub const PROJECTOR_FORMAT: &str = "dfatoms-projector/1";

/// JSON schema every report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

/// Writes `value` as JSON with every float printed to 17 significant digits.
/// Object keys come out sorted because `serde_json` maps are ordered.
pub fn to_json_string(value: &Value) -> String {
    let mut out = String::new();
    write_value(value, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| out.extend(std::iter::repeat("  ").take(d));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().expect("f64 number")));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            // numeric arrays stay on one line
            if a.iter().all(|x| x.is_number()) {
                out.push('[');
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, depth, out);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(depth + 1, out);
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(x, depth + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
    }
}

/// `{:.16e}`, which JSON accepts as a number.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Replaces non-finite floats, which JSON cannot carry, by `null`.
pub fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Projector document: each channel carries an orthonormal basis of the
/// range, stored column by column.
pub fn projectors_to_value(projectors: &[Projector]) -> Value {
    json!({
        "format": PROJECTOR_FORMAT,
        "projectors": projectors.iter().map(|p| json!({
            "channel": p.channel,
            "source": p.source,
            "rank": p.rank,
            "dimension": p.dim(),
            "basis": p.basis.columns().into_iter().map(|c| c.to_vec()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

/// Reads projectors from a projector document or from a report embedding
/// one under `results.projectors`. The bases are re-orthonormalized and the
/// source becomes `file`.
pub fn projectors_from_value(value: &Value) -> Result<Vec<Projector>> {
    let doc = if value.get("format").and_then(Value::as_str) == Some(REPORT_FORMAT) {
        value
            .pointer("/results/projectors")
            .ok_or_else(|| bad("results.projectors", "report carries no projectors"))?
    } else {
        value
    };
    if doc.get("format").and_then(Value::as_str) != Some(PROJECTOR_FORMAT) {
        return Err(bad("format", &format!("expected `{PROJECTOR_FORMAT}`")));
    }
    let list = doc
        .get("projectors")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("projectors", "expected an array"))?;
    let mut out = Vec::with_capacity(list.len());
    for (i, p) in list.iter().enumerate() {
        let at = |k: &str| format!("projectors[{i}].{k}");
        let channel: Channel = serde_json::from_value(p.get("channel").cloned().unwrap_or(Value::Null))
            .map_err(|e| bad(&at("channel"), &e.to_string()))?;
        let cols: Vec<Vec<f64>> = serde_json::from_value(p.get("basis").cloned().unwrap_or(Value::Null))
            .map_err(|e| bad(&at("basis"), &e.to_string()))?;
        let dim = cols.first().map(|c| c.len()).unwrap_or(0);
        if cols.iter().any(|c| c.len() != dim) {
            return Err(Error::Dimension(format!("{}: columns of unequal length", at("basis"))));
        }
        let basis = Array2::from_shape_fn((dim, cols.len()), |(r, c)| cols[c][r]);
        let basis = crate::linalg::dense::orthonormal_columns(&basis, 1e-10);
        if basis.ncols() != cols.len() {
            return Err(Error::Dimension(format!("{}: columns are linearly dependent", at("basis"))));
        }
        out.push(Projector::from_basis(channel, basis, ProjectorSource::File));
    }
    Ok(out)
}

fn bad(path: &str, message: &str) -> Error {
    Error::Config {
        path: format!("projector file: {path}"),
        message: message.to_string(),
    }
}
