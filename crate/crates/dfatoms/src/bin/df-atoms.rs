use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use dfatoms::io::{run_document, to_json_string, write_atomic, Format, Mode};

/// Dirac-Fock and Hartree-Fock runs for closed-shell atoms.
///
/// Exit codes: 0 converged, 1 I/O failure, 2 not converged, 3 invalid
/// configuration, 4 solver or domain error.
#[derive(Parser, Debug)]
#[command(name = "df-atoms", version)]
struct Cli {
    /// solve | hf | limit-study | projected | maxmin | fock-min |
    /// projector-iteration | oracle-sommerfeld
    mode: String,
    /// JSON configuration document (dfatoms-config/1).
    #[arg(long)]
    config: PathBuf,
    /// Report path; the report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write CSV tables next to the report.
    #[arg(long, value_enum)]
    format: Option<CliFormat>,
    /// Comma-separated c factors for limit-study, e.g. 1,2,4,8.
    #[arg(long, value_delimiter = ',')]
    c_factors: Option<Vec<f64>>,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum CliFormat {
    Json,
    Csv,
}

fn sidecar_path(out: &Path, name: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}.{name}.csv"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode: Mode = match cli.mode.parse() {
        Ok(m) => m,
        Err(e) => {
            eprintln!("df-atoms: {e}");
            return ExitCode::from(3);
        }
    };
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("df-atoms: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(1);
        }
    };
    // command-line options override the document
    let mut doc: serde_json::Value = match serde_json::from_str(&text) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("df-atoms: {}: invalid JSON: {e}", cli.config.display());
            return ExitCode::from(3);
        }
    };
    if let Some(obj) = doc.as_object_mut() {
        if let Some(f) = &cli.c_factors {
            obj.insert("c_factors".into(), serde_json::json!(f));
        }
        if let Some(f) = cli.format {
            let format = match f {
                CliFormat::Json => Format::Json,
                CliFormat::Csv => Format::Csv,
            };
            let output = obj.entry("output").or_insert_with(|| serde_json::json!({}));
            if let Some(o) = output.as_object_mut() {
                o.insert("format".into(), serde_json::to_value(format).expect("format serializes"));
            }
        }
    }
    let out = run_document(&doc.to_string(), Some(mode));
    let json = to_json_string(&out.report);
    let target = cli.out.or_else(|| {
        out.report
            .pointer("/config/output/path")
            .and_then(|p| p.as_str())
            .map(PathBuf::from)
    });
    match target {
        Some(path) => {
            if let Err(e) = write_atomic(&path, &json) {
                eprintln!("df-atoms: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            for (name, table) in &out.sidecars {
                let p = sidecar_path(&path, name);
                if let Err(e) = write_atomic(&p, table) {
                    eprintln!("df-atoms: cannot write {}: {e}", p.display());
                    return ExitCode::from(1);
                }
            }
        }
        None => print!("{json}"),
    }
    if let Some(err) = out.report.get("error") {
        eprintln!("df-atoms: {}", err["message"].as_str().unwrap_or("error"));
    }
    ExitCode::from(out.exit_code as u8)
}
