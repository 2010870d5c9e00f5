//! Rendering of reports as canonical JSON, CSV or short text.
//!
//! CSV headers, one row per record:
//!
//! | command    | header |
//! |------------|--------|
//! | check      | `predicate,verdict,lhs,rhs,margin` |
//! | crosscheck | `predicate,closed_form,series,residual,N,tolerance,passed` |
//! | threshold  | `predicate,outcome,m_star,bracket,evals` |
//! | grid       | `predicate,condition,max,argmax_re,argmax_im,violations,skipped` |
//! | identities | `kind,m,N,closed,partial,error,tolerance,passed` |
//! | suite      | `seed,name,trials,failures,worst,passed` |

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use poisson_gft::json::{format_f64, to_canonical_string};
use poisson_gft::suite::{IdentityRow, SuiteReport};
use poisson_gft::{Crosscheck, GridResult, Outcome, PredicateId, Report, Threshold};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

pub struct Rendered {
    json: Value,
    header: &'static [&'static str],
    rows: Vec<Vec<String>>,
    human: String,
    pub exit_code: u8,
}

impl Rendered {
    fn text(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => to_canonical_string(&self.json)
                .map(|s| s + "\n")
                .map_err(|e| e.to_string()),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(self.header).map_err(|e| e.to_string())?;
                for row in &self.rows {
                    w.write_record(row).map_err(|e| e.to_string())?;
                }
                let bytes = w.into_inner().map_err(|e| e.to_string())?;
                String::from_utf8(bytes).map_err(|e| e.to_string())
            }
            Format::Human => Ok(self.human.clone()),
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<(), String> {
        let text = self.text(format)?;
        match out {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
            }
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn num(x: f64) -> String {
    if x.is_finite() {
        format_f64(x)
    } else {
        x.to_string()
    }
}

fn to_json<S: serde::Serialize>(value: &S) -> Value {
    serde_json::to_value(value).expect("reports serialize to JSON")
}

pub fn check(report: &Report, exit_code: u8) -> Rendered {
    let predicate = report.predicate.to_string();
    let human = format!(
        "{predicate}: {} (lhs {} vs rhs {}, margin {:+e})\n",
        report.verdict.as_str(),
        report.lhs,
        report.rhs,
        report.margin
    );
    Rendered {
        json: to_json(report),
        header: &["predicate", "verdict", "lhs", "rhs", "margin"],
        rows: vec![vec![
            predicate,
            report.verdict.as_str().into(),
            num(report.lhs),
            num(report.rhs),
            num(report.margin),
        ]],
        human,
        exit_code,
    }
}

pub fn crosscheck(pid: PredicateId, x: &Crosscheck<f64>, tol: f64, exit_code: u8) -> Rendered {
    let passed = exit_code == 0;
    let human = format!(
        "{pid}: closed form {} vs series {} (N = {}), residual {:e} {} {tol:e}\n",
        x.closed_form,
        x.series,
        x.truncation_order,
        x.residual,
        if passed { "<" } else { ">=" },
    );
    Rendered {
        json: json!({
            "predicate": pid.as_str(),
            "closed_form": x.closed_form,
            "series": x.series,
            "residual": x.residual,
            "N": x.truncation_order,
            "tolerance": tol,
            "passed": passed,
        }),
        header: &[
            "predicate",
            "closed_form",
            "series",
            "residual",
            "N",
            "tolerance",
            "passed",
        ],
        rows: vec![vec![
            pid.as_str().into(),
            num(x.closed_form),
            num(x.series),
            num(x.residual),
            x.truncation_order.to_string(),
            num(tol),
            passed.to_string(),
        ]],
        human,
        exit_code,
    }
}

pub fn threshold(res: &Threshold) -> Rendered {
    let pid = res.predicate_id;
    let (outcome, m_star, bracket, human) = match res.outcome {
        Outcome::Finite {
            m_star,
            bracket_width,
        } => (
            "finite",
            num(m_star),
            num(bracket_width),
            format!(
                "{pid}: m* = {m_star:.12} (bracket {bracket_width:e}, {} evaluations)\n",
                res.evaluations
            ),
        ),
        Outcome::AlwaysHolds { scan_limit } => (
            "always_holds",
            String::new(),
            String::new(),
            format!("{pid}: holds for every m in (0, {scan_limit}]\n"),
        ),
    };
    Rendered {
        json: to_json(res),
        header: &["predicate", "outcome", "m_star", "bracket", "evals"],
        rows: vec![vec![
            pid.as_str().into(),
            outcome.into(),
            m_star,
            bracket,
            res.evaluations.to_string(),
        ]],
        human,
        exit_code: 0,
    }
}

pub fn grid(pid: PredicateId, report: &GridResult, exit_code: u8) -> Rendered {
    let mut json = to_json(report);
    json["predicate"] = pid.as_str().into();
    let z = report.argmax_z;
    let human = format!(
        "{pid} ({}): max {} at {}{:+}i, {} violations, {} skipped\n",
        report.condition_id.as_str(),
        report.max_value,
        z.re,
        z.im,
        report.violations,
        report.skipped
    );
    Rendered {
        json,
        header: &[
            "predicate",
            "condition",
            "max",
            "argmax_re",
            "argmax_im",
            "violations",
            "skipped",
        ],
        rows: vec![vec![
            pid.as_str().into(),
            report.condition_id.as_str().into(),
            num(report.max_value),
            num(z.re),
            num(z.im),
            report.violations.to_string(),
            report.skipped.to_string(),
        ]],
        human,
        exit_code,
    }
}

pub fn identities(m: f64, rows: &[IdentityRow]) -> Rendered {
    let mut human = String::new();
    for r in rows {
        let _ = writeln!(
            human,
            "{:<14} closed {:<24e} partial {:<24e} error {:.3e} {}",
            r.kind.as_str(),
            r.closed,
            r.partial,
            r.error,
            if r.passed() { "ok" } else { "FAIL" }
        );
    }
    let records: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "kind": r.kind.as_str(),
                "N": r.order,
                "closed": r.closed,
                "partial": r.partial,
                "error": r.error,
                "tolerance": r.tolerance,
                "passed": r.passed(),
            })
        })
        .collect();
    let table = rows
        .iter()
        .map(|r| {
            vec![
                r.kind.as_str().into(),
                num(m),
                r.order.to_string(),
                num(r.closed),
                num(r.partial),
                num(r.error),
                num(r.tolerance),
                r.passed().to_string(),
            ]
        })
        .collect();
    let passed = rows.iter().all(IdentityRow::passed);
    Rendered {
        json: json!({ "m": m, "rows": records, "passed": passed }),
        header: &[
            "kind",
            "m",
            "N",
            "closed",
            "partial",
            "error",
            "tolerance",
            "passed",
        ],
        rows: table,
        human,
        exit_code: if passed { 0 } else { 1 },
    }
}

pub fn suite(report: &SuiteReport) -> Rendered {
    let mut human = format!("seed {} eps {:e}\n", report.seed, report.eps);
    for c in &report.checks {
        let _ = writeln!(
            human,
            "{} {:<20} {}/{} failures, worst {:e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.failures,
            c.trials,
            c.worst
        );
    }
    Rendered {
        json: to_json(report),
        header: &["seed", "name", "trials", "failures", "worst", "passed"],
        rows: report
            .checks
            .iter()
            .map(|c| {
                vec![
                    report.seed.to_string(),
                    c.name.into(),
                    c.trials.to_string(),
                    c.failures.to_string(),
                    num(c.worst),
                    c.passed.to_string(),
                ]
            })
            .collect(),
        human,
        exit_code: if report.passed { 0 } else { 1 },
    }
}
