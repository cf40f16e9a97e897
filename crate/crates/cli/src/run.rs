//! Task dispatch and artifact emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pue_core::{
    approx_trace, check_superenvelope, is_almost_increasing, tail_variational_check, transfinite_sequence, ApproxOptions,
    Engine, LimsupEstimate, SubadditiveTrace, SuperenvelopeVerdict, TailMatrix, TailVariationalReport, TransfiniteTrace,
    Verdict, DEFAULT_BUDGET,
};
use serde::Serialize;
use serde_json::json;

use crate::spec::{Format, Partition, Resolved, RunSpec, System};
use crate::CliError;

/// Command-line overrides applied on top of a spec.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub format: Option<Format>,
    pub serial: bool,
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub a_n: f64,
    pub ratio: f64,
    pub inf_ratio: f64,
    pub diff: f64,
}

fn rows_from_values(values: &[f64]) -> Vec<TraceRow> {
    let mut inf = f64::INFINITY;
    let mut prev = 0.0;
    values
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let n = i + 1;
            let ratio = a / n as f64;
            inf = inf.min(ratio);
            let row = TraceRow { n, a_n: a, ratio, inf_ratio: inf, diff: a - prev };
            prev = a;
            row
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalRow {
    #[serde(flatten)]
    pub trace: TraceRow,
    pub a_n_error: f64,
    pub top_a_n: f64,
    pub top_error: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductRow {
    pub n: usize,
    pub a_x: f64,
    pub a_y: f64,
    pub a_xy: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub points: Vec<String>,
    pub almost_increasing: Vec<Verdict>,
    pub trace: TransfiniteTrace,
    pub superenvelopes: Vec<SuperenvelopeVerdict>,
    pub tail_variational: Option<TailVariationalReport>,
}

/// Result of one task, ready for serialization.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Trace {
        rows: Vec<TraceRow>,
        #[serde(skip_serializing_if = "Option::is_none")]
        limsup: Option<f64>,
    },
    Interval { rows: Vec<IntervalRow> },
    Tail { matrix: TailMatrix },
    Product { rows: Vec<ProductRow>, passed: bool },
    Structure(StructureReport),
}

fn engine_error(e: pue_core::Error) -> CliError {
    match e {
        pue_core::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    }
}

fn trace_report(trace: SubadditiveTrace) -> Report {
    Report::Trace { rows: rows_from_values(trace.values()), limsup: None }
}

fn limsup_report(est: LimsupEstimate) -> Report {
    Report::Trace { rows: rows_from_values(&est.values), limsup: Some(est.limsup) }
}

fn shift_partition(p: &Option<Partition>) -> &pue_core::PartitionOfUnity {
    match p {
        Some(Partition::Shift(p)) => p,
        _ => unreachable!("validated as a shift partition"),
    }
}

/// Runs a resolved spec.
pub fn execute(r: &Resolved, budget: u64, serial: bool, tolerance: Option<f64>) -> Result<Report, CliError> {
    let engine = Engine::new(budget, !serial);
    let n = r.horizon;
    match r.task.as_str() {
        "entropy" => match (&r.system, &r.partition) {
            (Some(System::Interval { map, .. }), Some(Partition::Interval(hats))) => {
                let options = ApproxOptions { budget, tolerance };
                let run = || approx_trace(map, hats, n, &options);
                let trace = if serial {
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(1)
                        .build()
                        .map_err(|e| CliError::Runtime(e.to_string()))?
                        .install(run)
                } else {
                    run()
                }
                .map_err(engine_error)?;
                let values: Vec<f64> = trace.levels.iter().map(|l| l.metric.value).collect();
                let rows = rows_from_values(&values)
                    .into_iter()
                    .zip(&trace.levels)
                    .map(|(row, l)| IntervalRow {
                        trace: row,
                        a_n_error: l.metric.error,
                        top_a_n: l.topological.value,
                        top_error: l.topological.error,
                        flagged: l.flagged,
                    })
                    .collect();
                Ok(Report::Interval { rows })
            }
            _ => {
                let phi = shift_partition(&r.partition);
                let trace = match &r.measure {
                    Some(mu) => engine.local_metric_entropy(mu, phi, n),
                    None => engine.local_topological_entropy(phi, n),
                };
                trace.map(trace_report).map_err(engine_error)
            }
        },
        "pressure" => {
            let phi = shift_partition(&r.partition);
            let g = r.potential.as_ref().expect("validated");
            let trace = match &r.measure {
                Some(mu) => engine.metric_pressure(mu, g, phi, n),
                None => engine.topological_pressure(g, phi, n),
            };
            trace.map(trace_report).map_err(engine_error)
        }
        "conditional" => {
            let phi = shift_partition(&r.partition);
            let psi = r.condition.as_ref().expect("validated");
            let est = match &r.potential {
                Some(g) => engine.conditional_topological_pressure(g, phi, psi, n),
                None => engine.conditional_topological_entropy(phi, psi, n),
            };
            est.map(limsup_report).map_err(engine_error)
        }
        "tail" => {
            let family = r.family.as_ref().expect("validated");
            let matrix = match &r.potential {
                Some(g) => engine.tail_pressure_estimate(g, family, n),
                None => engine.tail_entropy_estimate(family, n),
            };
            matrix.map(|matrix| Report::Tail { matrix }).map_err(engine_error)
        }
        "product-check" => {
            let check = engine
                .product_system_entropy_check(
                    r.measure.as_ref().expect("validated"),
                    shift_partition(&r.partition),
                    r.second_measure.as_ref().expect("validated"),
                    r.second_partition.as_ref().expect("validated"),
                    n,
                )
                .map_err(engine_error)?;
            let rows = (0..check.product.horizon())
                .map(|i| ProductRow {
                    n: i + 1,
                    a_x: check.first.values()[i],
                    a_y: check.second.values()[i],
                    a_xy: check.product.values()[i],
                    lower_holds: check.lower_holds[i],
                    upper_holds: check.upper_holds[i],
                })
                .collect();
            Ok(Report::Product { rows, passed: check.passed() })
        }
        "structure" => structure(r),
        other => Err(CliError::Validation(vec![format!("unknown task `{other}`")])),
    }
}

fn structure(r: &Resolved) -> Result<Report, CliError> {
    let spec = r.structure.as_ref().expect("validated");
    let (family, candidate) = spec.input.build().map_err(|e| CliError::Validation(vec![format!("structure: {e}")]))?;
    let almost_increasing = (0..candidate.points())
        .map(|x| is_almost_increasing(&candidate.at_point(x), &spec.gammas))
        .collect();
    let runtime = |e: pue_core::Error| CliError::Runtime(e.to_string());
    let trace = transfinite_sequence(&candidate, &family, spec.max_iter).map_err(runtime)?;
    let superenvelopes = spec
        .envelopes
        .iter()
        .map(|e| check_superenvelope(e, &candidate, &family))
        .collect::<Result<_, _>>()
        .map_err(runtime)?;
    let tail_variational = spec
        .h_star
        .map(|h| tail_variational_check(&candidate, &family, h))
        .transpose()
        .map_err(runtime)?;
    Ok(Report::Structure(StructureReport {
        points: family.points().to_vec(),
        almost_increasing,
        trace,
        superenvelopes,
        tail_variational,
    }))
}

fn csv_rows<R>(header: &str, rows: &[R], cells: impl Fn(&R) -> Vec<String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&cells(r).join(","));
        out.push('\n');
    }
    out
}

fn trace_cells(r: &TraceRow) -> Vec<String> {
    vec![r.n.to_string(), r.a_n.to_string(), r.ratio.to_string(), r.inf_ratio.to_string(), r.diff.to_string()]
}

const TRACE_HEADER: &str = "n,a_n,ratio,inf_ratio,diff";

/// Renders a report. CSV floats use the shortest round-trip representation.
pub fn render(task: &str, report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => serde_json::to_string_pretty(&json!({ "task": task, "report": report }))
            .map(|s| s + "\n")
            .map_err(|e| CliError::Runtime(e.to_string())),
        Format::Csv => Ok(match report {
            Report::Trace { rows, .. } => csv_rows(TRACE_HEADER, rows, trace_cells),
            Report::Interval { rows } => csv_rows(
                &format!("{TRACE_HEADER},a_n_error,top_a_n,top_error,flagged"),
                rows,
                |r| {
                    let mut c = trace_cells(&r.trace);
                    c.extend([r.a_n_error.to_string(), r.top_a_n.to_string(), r.top_error.to_string(), r.flagged.to_string()]);
                    c
                },
            ),
            Report::Tail { matrix } => {
                let mut out = String::from("n");
                for k in 1..=matrix.entries.len() {
                    let _ = write!(out, ",k{k}");
                }
                out.push('\n');
                for (i, row) in matrix.entries.iter().enumerate() {
                    let _ = write!(out, "{}", i + 1);
                    for v in row {
                        let _ = write!(out, ",{v}");
                    }
                    out.push('\n');
                }
                out
            }
            Report::Product { rows, .. } => csv_rows("n,a_x,a_y,a_xy,lower_holds,upper_holds", rows, |r| {
                vec![
                    r.n.to_string(),
                    r.a_x.to_string(),
                    r.a_y.to_string(),
                    r.a_xy.to_string(),
                    r.lower_holds.to_string(),
                    r.upper_holds.to_string(),
                ]
            }),
            Report::Structure(s) => {
                let mut out = String::from("alpha");
                for p in &s.points {
                    let _ = write!(out, ",{p}");
                }
                out.push('\n');
                for (alpha, u) in s.trace.u.iter().enumerate() {
                    let _ = write!(out, "{alpha}");
                    for v in u {
                        let _ = write!(out, ",{v}");
                    }
                    out.push('\n');
                }
                out
            }
        }),
    }
}

/// Picks `<task>_<timestamp>.<ext>` in `dir`, adding a counter on collision.
pub fn artifact_path(dir: &Path, task: &str, ext: &str) -> PathBuf {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%3fZ");
    let base = format!("{task}_{stamp}");
    let mut path = dir.join(format!("{base}.{ext}"));
    let mut i = 1;
    while path.exists() {
        path = dir.join(format!("{base}-{i}.{ext}"));
        i += 1;
    }
    path
}

/// Validates, computes and writes one artifact; returns its path.
pub fn run(spec: &RunSpec, out_dir: &Path, options: &RunOptions) -> Result<PathBuf, CliError> {
    let resolved = spec.resolve()?;
    let budget = options.budget.or(spec.budget).unwrap_or(DEFAULT_BUDGET);
    let format = options.format.or(spec.format).unwrap_or(Format::Csv);
    let report = execute(&resolved, budget, options.serial, spec.tolerance)?;
    let text = render(&spec.task, &report, format)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Runtime(format!("{}: {e}", out_dir.display())))?;
    let path = artifact_path(out_dir, &spec.task, format.extension());
    std::fs::write(&path, text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    Ok(path)
}
