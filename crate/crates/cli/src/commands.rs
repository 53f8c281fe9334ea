use std::fmt::Write as _;
use std::path::PathBuf;

use cliffordian::function::Evaluate;
use cliffordian::jacobi::{alternating_subset_sum_identity, JacobiFunction, JacobiKind};
use cliffordian::operators::{expand as expand_expr, OperatorExpr};
use cliffordian::verify::{run_suite, CheckRow, Suite, SuiteReport};
use cliffordian::zeta::ZetaFunction;
use cliffordian::{Error, Paravector, PeriodLattice};

use crate::config::{OutputFormat, RunConfig};
use crate::{CliError, Outcome};

fn lib_error(e: Error) -> CliError {
    match e {
        Error::Pole { .. } | Error::NotInvertible => CliError::Failure(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn describe(lattice: &PeriodLattice) -> String {
    format!("m={}, N={}", lattice.m(), lattice.rank())
}

fn join(coords: &[f64]) -> String {
    coords.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(";")
}

pub fn eval(cfg: &RunConfig, function: &str, at: &[f64]) -> Result<Outcome, CliError> {
    let lattice = cfg.lattice()?;
    let m = lattice.m();
    let x = match at {
        [x0] => Paravector::scalar(m, *x0),
        coords if coords.len() == lattice.dim() => Paravector::from_coords(m, coords).map_err(lib_error)?,
        coords => {
            return Err(CliError::Usage(format!(
                "--at takes {} coordinates (or one scalar) on this lattice, got {}",
                lattice.dim(),
                coords.len()
            )))
        }
    };
    let zeta = ZetaFunction::new(lattice.clone(), cfg.eval_config()?).map_err(lib_error)?;
    let value = if function == "zeta" {
        zeta.eval(&x)
    } else {
        let kind: JacobiKind = function.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
        JacobiFunction::build(kind, &zeta).map_err(lib_error)?.eval(&x)
    }
    .map_err(lib_error)?;
    let mut text = String::new();
    writeln!(text, "function: {function}").unwrap();
    writeln!(text, "lattice: {}", describe(&lattice)).unwrap();
    writeln!(text, "point: {}", join(x.coords())).unwrap();
    writeln!(text, "value: {}", value.value).unwrap();
    writeln!(text, "coefficients: {}", join(value.value.coeffs())).unwrap();
    writeln!(text, "radius_used: {}", value.radius_used).unwrap();
    writeln!(text, "tail_estimate: {:e}", value.tail_estimate).unwrap();
    Ok(Outcome { text, passed: true })
}

fn write_report(report: &SuiteReport, dir: &PathBuf, format: OutputFormat) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let io_err = |e: std::io::Error| CliError::Failure(format!("writing report: {e}"));
    match format {
        OutputFormat::Csv => {
            let path = dir.join(format!("{}.csv", report.suite));
            let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Failure(format!("writing report: {e}")))?;
            let csv_err = |e: csv::Error| CliError::Failure(format!("writing report: {e}"));
            w.write_record(CheckRow::HEADER).map_err(csv_err)?;
            for row in &report.rows {
                w.write_record(row.fields()).map_err(csv_err)?;
            }
            w.flush().map_err(io_err)?;
            Ok(path)
        }
        OutputFormat::Json => {
            let path = dir.join(format!("{}.json", report.suite));
            let rows: Vec<serde_json::Value> = report
                .rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "check_id": r.check_id,
                        "function": r.function,
                        "point": r.point,
                        "defect_norm": r.defect_norm,
                        "tail_estimate": r.tail_estimate,
                        "threshold": r.threshold,
                        "pass": r.pass,
                    })
                })
                .collect();
            let doc = serde_json::json!({ "suite": report.suite.name(), "rows": rows });
            let text = serde_json::to_string_pretty(&doc).expect("report serializes");
            std::fs::write(&path, text + "\n").map_err(io_err)?;
            Ok(path)
        }
    }
}

pub fn verify(cfg: &RunConfig, suite: &str) -> Result<Outcome, CliError> {
    let suite: Suite = suite.parse().map_err(|e: Error| CliError::Usage(e.to_string()))?;
    let lattice = cfg.lattice()?;
    let suite_cfg = cfg.suite_config(&lattice);
    let report = run_suite(suite, &lattice, &suite_cfg).map_err(lib_error)?;
    let path = write_report(&report, &cfg.output_dir(), cfg.output.unwrap_or_default())?;
    let failures: Vec<&CheckRow> = report.failures().collect();
    let mut text = String::new();
    writeln!(text, "suite: {suite}").unwrap();
    writeln!(text, "lattice: {}", describe(&lattice)).unwrap();
    writeln!(text, "radius: {}", suite_cfg.radius).unwrap();
    writeln!(text, "checks: {}", report.rows.len()).unwrap();
    writeln!(text, "failures: {}", failures.len()).unwrap();
    for r in &failures {
        writeln!(
            text,
            "FAIL {} {} at {}: defect {:e} > threshold {:e}",
            r.check_id,
            r.function,
            join(&r.point),
            r.defect_norm,
            r.threshold
        )
        .unwrap();
    }
    writeln!(text, "report: {}", path.display()).unwrap();
    Ok(Outcome {
        text,
        passed: failures.is_empty(),
    })
}

pub fn expand(expr: &str) -> Result<Outcome, CliError> {
    let parsed = OperatorExpr::parse(expr).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Outcome {
        text: format!("{}\n", expand_expr(&parsed)),
        passed: true,
    })
}

pub fn lemma(n: usize) -> Result<Outcome, CliError> {
    let report = alternating_subset_sum_identity(n).map_err(lib_error)?;
    let mut text = String::new();
    for (k, ok) in report.per_k.iter().enumerate() {
        writeln!(
            text,
            "k={}: subset sums = C({},{}) p: {}",
            k + 1,
            n - 1,
            k,
            if *ok { "ok" } else { "FAIL" }
        )
        .unwrap();
    }
    writeln!(
        text,
        "alternating sum = 0: {}",
        if report.alternating_zero { "ok" } else { "FAIL" }
    )
    .unwrap();
    Ok(Outcome {
        passed: report.holds(),
        text,
    })
}
