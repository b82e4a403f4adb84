//! Mode dispatch and report assembly.

use std::time::Instant;

use serde_json::{json, Map, Value};

use super::conditions::validate_conditions;
use super::config::{parse_config, Format, Mode, ProjectorChoice, RunConfig};
use super::oracle::{oracle_sommerfeld, oracle_sommerfeld_shifted};
use super::report::{finite, projectors_from_value, projectors_to_value, REPORT_FORMAT};
use crate::dirac_fock::{mean_field_matrix, scf_solve, spectral_projector, Configuration, Problem, Projector, ScfReport};
use crate::error::{Error, Result};
use crate::fock_space::{maxmin_projector_iteration, minimize_fc_fixed_projector, open_shell_experiment};
use crate::nonrel::{fmt17, hf_scf, limit_study};
use crate::projector::{free_positive_projector, maxmin_energy, projected_scf, PositiveProjectors};
use crate::radial::Channel;

/// Factors used by `limit-study` when the configuration gives none.
pub const DEFAULT_C_FACTORS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// A finished run: the report document, CSV sidecars keyed by table name,
/// and the process exit code.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Value,
    pub sidecars: Vec<(String, String)>,
    pub exit_code: i32,
}

/// 0 converged, 1 I/O, 2 not converged, 3 invalid configuration, 4 solver or
/// domain error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 1,
        Error::NotConverged { .. } => 2,
        Error::Config { .. } => 3,
        _ => 4,
    }
}

fn error_value(e: &Error) -> Value {
    let mut v = json!({ "code": e.code(), "message": e.to_string() });
    if let Error::Config { path, .. } = e {
        v["path"] = json!(path);
    }
    v
}

struct ModeOutput {
    results: Value,
    histories: Value,
    converged: bool,
    sidecars: Vec<(String, String)>,
}

/// Parses a configuration document and runs it. Parse failures produce an
/// error report with exit code 3.
pub fn run_document(document: &str, mode: Option<Mode>) -> RunOutput {
    match parse_config(document) {
        Ok(mut cfg) => {
            if mode.is_some() {
                cfg.mode = mode;
            }
            run(&cfg)
        }
        Err(e) => RunOutput {
            report: json!({
                "format": REPORT_FORMAT,
                "version": env!("CARGO_PKG_VERSION"),
                "status": "error",
                "converged": false,
                "error": error_value(&e),
                "wall_clock_seconds": 0.0,
            }),
            sidecars: Vec::new(),
            exit_code: exit_code(&e),
        },
    }
}

/// Runs the configured mode and assembles the report.
pub fn run(config: &RunConfig) -> RunOutput {
    let start = Instant::now();
    let mut report = Map::new();
    report.insert("format".into(), json!(REPORT_FORMAT));
    report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    report.insert("config".into(), serde_json::to_value(config).expect("configuration serializes"));
    let hypotheses = if config.z.fract() == 0.0 {
        validate_conditions(config.z as u32, config.electron_count() as u32, config.c)
            .map(|h| serde_json::to_value(h).expect("report serializes"))
            .unwrap_or(Value::Null)
    } else {
        Value::Null
    };
    report.insert("hypotheses".into(), hypotheses);

    let outcome = match config.mode {
        Some(mode) => {
            report.insert("mode".into(), json!(mode.name()));
            dispatch(config, mode)
        }
        None => Err(Error::Config {
            path: "mode".into(),
            message: "no mode given in the document or on the command line".into(),
        }),
    };
    let (exit, sidecars) = match outcome {
        Ok(out) => {
            report.insert("status".into(), json!(if out.converged { "converged" } else { "not_converged" }));
            report.insert("converged".into(), json!(out.converged));
            report.insert("results".into(), out.results);
            report.insert("histories".into(), out.histories);
            (if out.converged { 0 } else { 2 }, out.sidecars)
        }
        Err(e) => {
            report.insert("status".into(), json!("error"));
            report.insert("converged".into(), json!(false));
            report.insert("error".into(), error_value(&e));
            (exit_code(&e), Vec::new())
        }
    };
    report.insert("wall_clock_seconds".into(), json!(start.elapsed().as_secs_f64()));
    RunOutput {
        report: Value::Object(report),
        sidecars,
        exit_code: exit,
    }
}

fn dispatch(cfg: &RunConfig, mode: Mode) -> Result<ModeOutput> {
    let csv = cfg.output.format == Format::Csv;
    if cfg.open_shell && mode != Mode::ProjectorIteration {
        return Err(Error::Config {
            path: "open_shell".into(),
            message: format!("the open-shell experiment runs in projector-iteration mode, not {}", mode.name()),
        });
    }
    match mode {
        Mode::Solve => Ok(scf_output(&scf_solve(&cfg.dirac_problem()?)?, csv)),
        Mode::Hf => Ok(scf_output(&hf_scf(&cfg.schrodinger_problem()?)?, csv)),
        Mode::LimitStudy => {
            let factors = cfg.c_factors.clone().unwrap_or_else(|| DEFAULT_C_FACTORS.to_vec());
            let table = limit_study(&cfg.dirac_problem()?, &factors)?;
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            let iterations: Vec<usize> = table.rows.iter().map(|r| r.iterations).collect();
            Ok(ModeOutput {
                results: json!({
                    "limit_table": table,
                    "energy_gaps": table.energy_gaps(),
                }),
                histories: json!({ "iterations": iterations }),
                converged: true,
                sidecars: vec![("limit_table".into(), String::from_utf8(buf).expect("csv is UTF-8"))],
            })
        }
        Mode::Projected => {
            let problem = cfg.dirac_problem()?;
            let source = positive_projectors(cfg, &problem)?;
            let r = projected_scf(&problem, &source)?;
            let mut out = scf_output(&r.scf, csv);
            out.results["projector_source"] = json!(r.source);
            out.results["range_residuals"] = json!(r.range_residuals);
            if cfg.projector.export {
                let used = match &source {
                    PositiveProjectors::MeanField => mean_field_projectors(&r.scf.configuration)?,
                    _ => source_projectors(&source, &problem)?,
                };
                out.results["projectors"] = projectors_to_value(&used);
            }
            Ok(out)
        }
        Mode::Maxmin => {
            let problem = cfg.dirac_problem()?;
            let source = positive_projectors(cfg, &problem)?;
            let r = maxmin_energy(&problem, &source, cfg.maxmin)?;
            let mut results = serde_json::to_value(&r).expect("report serializes");
            for key in ["inner_sup_values", "outer_iterates", "outer_gradient_norms"] {
                results.as_object_mut().expect("object").remove(key);
            }
            let mut sidecars = Vec::new();
            if csv {
                let rows: Vec<Vec<String>> = r
                    .outer_iterates
                    .iter()
                    .zip(&r.outer_gradient_norms)
                    .enumerate()
                    .map(|(i, (e, g))| vec![i.to_string(), fmt17(*e), fmt17(*g)])
                    .collect();
                sidecars.push(("history".into(), csv_table(&["iteration", "e_sup_shifted", "gradient_norm"], &rows)?));
            }
            Ok(ModeOutput {
                histories: json!({
                    "inner_sup_values": r.inner_sup_values,
                    "outer_iterates": r.outer_iterates,
                    "outer_gradient_norms": r.outer_gradient_norms,
                }),
                converged: r.converged,
                results,
                sidecars,
            })
        }
        Mode::FockMin => {
            let problem = cfg.dirac_problem()?;
            let projectors = match cfg.projector.source {
                ProjectorChoice::MeanField => {
                    let scf = scf_solve(&problem)?;
                    if !scf.converged {
                        return Err(Error::NotConverged {
                            solver: "scf_solve",
                            iterations: scf.iterations,
                        });
                    }
                    mean_field_projectors(&scf.configuration)?
                }
                _ => source_projectors(&positive_projectors(cfg, &problem)?, &problem)?,
            };
            let r = minimize_fc_fixed_projector(&projectors, &problem)?;
            let mut results = json!({
                "energy_shifted": r.energy,
                "energy": r.energy + problem.electron_count() as f64 * problem.hamiltonian.rest_energy(),
                "certificate": r.certificate,
                "monotone": r.monotone,
                "worst_violation": r.worst_violation,
                "iterations": r.iterations,
                "density_matrix": r.gamma,
                "projector_source": cfg.projector.source,
            });
            if cfg.projector.export {
                results["projectors"] = projectors_to_value(&projectors);
            }
            let mut sidecars = Vec::new();
            if csv {
                let rows: Vec<Vec<String>> = r
                    .history
                    .iter()
                    .enumerate()
                    .map(|(i, f)| vec![i.to_string(), fmt17(*f)])
                    .collect();
                sidecars.push(("history".into(), csv_table(&["iteration", "fc_energy"], &rows)?));
            }
            Ok(ModeOutput {
                results,
                histories: json!({ "fc_energy": r.history, "steps": r.steps }),
                converged: r.converged,
                sidecars,
            })
        }
        Mode::ProjectorIteration if cfg.open_shell => {
            let problem = cfg.dirac_problem()?;
            let r = open_shell_experiment(&problem)?;
            let it = &r.iteration;
            Ok(ModeOutput {
                results: json!({
                    "energy_shifted": finite(it.energy),
                    "oscillating": it.oscillating,
                    "certificate": it.certificate,
                    "no_pair": r.no_pair,
                    "certified": r.certified,
                    "shells": shells_value(&it.configuration),
                }),
                histories: json!({ "steps": it.steps }),
                converged: it.converged,
                sidecars: Vec::new(),
            })
        }
        Mode::ProjectorIteration => {
            let problem = cfg.dirac_problem()?;
            let r = maxmin_projector_iteration(&problem, None)?;
            Ok(ModeOutput {
                results: json!({
                    "energy_shifted": finite(r.energy),
                    "oscillating": r.oscillating,
                    "certificate": r.certificate,
                    "shells": shells_value(&r.configuration),
                }),
                histories: json!({ "steps": r.steps }),
                converged: r.converged,
                sidecars: Vec::new(),
            })
        }
        Mode::OracleSommerfeld => {
            let kappa = cfg.kappa.ok_or_else(|| Error::Config {
                path: "kappa".into(),
                message: "oracle-sommerfeld needs kappa".into(),
            })?;
            let n = cfg.n.ok_or_else(|| Error::Config {
                path: "n".into(),
                message: "oracle-sommerfeld needs n".into(),
            })?;
            Ok(ModeOutput {
                results: json!({
                    "Z": cfg.z,
                    "kappa": kappa,
                    "n": n,
                    "c": cfg.c,
                    "energy": oracle_sommerfeld(cfg.z, kappa, n, cfg.c)?,
                    "energy_shifted": oracle_sommerfeld_shifted(cfg.z, kappa, n, cfg.c)?,
                }),
                histories: json!({}),
                converged: true,
                sidecars: Vec::new(),
            })
        }
    }
}

fn positive_projectors(cfg: &RunConfig, problem: &Problem) -> Result<PositiveProjectors> {
    Ok(match cfg.projector.source {
        ProjectorChoice::Free => PositiveProjectors::Free,
        ProjectorChoice::MeanField => PositiveProjectors::MeanField,
        ProjectorChoice::File => {
            let path = cfg.projector.path.as_deref().expect("checked at parse time");
            let text = std::fs::read_to_string(path)?;
            let value: Value = serde_json::from_str(&text).map_err(|e| Error::Config {
                path: "projector.path".into(),
                message: format!("{path}: {e}"),
            })?;
            let list = projectors_from_value(&value)?;
            let fixed = PositiveProjectors::Fixed(list);
            fixed.resolve(problem)?;
            fixed
        }
    })
}

fn source_projectors(source: &PositiveProjectors, problem: &Problem) -> Result<Vec<Projector>> {
    match source {
        PositiveProjectors::Free => {
            let c = problem.hamiltonian.c().expect("Dirac problem");
            problem
                .occupied_channels()
                .into_iter()
                .map(|ch| match ch {
                    Channel::Dirac(k) => free_positive_projector(k, c, &problem.grid),
                    Channel::Schrodinger(_) => Err(Error::UnsupportedChannel("free projector on a Schrödinger channel".into())),
                })
                .collect()
        }
        other => Ok(other.resolve(problem)?.unwrap_or_default()),
    }
}

fn mean_field_projectors(psi: &Configuration) -> Result<Vec<Projector>> {
    psi.problem
        .occupied_channels()
        .into_iter()
        .map(|ch| spectral_projector(&mean_field_matrix(psi, ch)?, 0.0))
        .collect()
}

fn shells_value(psi: &Configuration) -> Value {
    Value::Array(
        psi.shells
            .iter()
            .enumerate()
            .map(|(i, s)| {
                json!({
                    "label": s.label(),
                    "n": s.n,
                    "channel": s.channel,
                    "occupation": s.occupation,
                    "epsilon_shifted": s.binding,
                    "epsilon": psi.epsilon(i),
                })
            })
            .collect(),
    )
}

fn scf_output(r: &ScfReport, csv: bool) -> ModeOutput {
    let mut shells = shells_value(&r.configuration);
    for (i, s) in shells.as_array_mut().expect("array").iter_mut().enumerate() {
        s["residual"] = finite(r.orbital_residuals.get(i).copied().unwrap_or(f64::NAN));
        s["lambda_minus_residual"] = finite(r.lambda_minus_residuals.get(i).copied().unwrap_or(f64::NAN));
    }
    let mut sidecars = Vec::new();
    if csv {
        let rows: Vec<Vec<String>> = r
            .energy_history
            .iter()
            .zip(&r.residual_history)
            .enumerate()
            .map(|(i, (e, res))| vec![i.to_string(), fmt17(*e), fmt17(*res)])
            .collect();
        if let Ok(t) = csv_table(&["iteration", "energy_shifted", "max_residual"], &rows) {
            sidecars.push(("history".into(), t));
        }
    }
    ModeOutput {
        results: json!({
            "energy": r.energy,
            "iterations": r.iterations,
            "gram_error": r.configuration.gram_error(),
            "lambda_minus_method": r.lambda_minus_method,
            "shells": shells,
        }),
        histories: json!({
            "energy_shifted": r.energy_history,
            "max_residual": r.residual_history,
        }),
        converged: r.converged,
        sidecars,
    }
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(std::io::Error::other(e.to_string()));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv is UTF-8"))
}
