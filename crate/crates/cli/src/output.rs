//! Report rendering. All formats print the same numbers: floats use the
//! shortest representation that round-trips, and infinite bounds are written
//! as `inf` / `-inf` (JSON strings).

use mct_core::sim::SimReport;
use mct_core::{Dataset, TestReport};
use serde_json::{json, Value};

pub const JSON_SCHEMA: u32 = 1;

const COMPARISON_COLUMNS: [&str; 9] = [
    "comparison",
    "estimate",
    "stderr",
    "df",
    "statistic",
    "p_adjusted",
    "ci_low",
    "ci_high",
    "critical",
];

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn json_num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(num(x))
    }
}

fn comparison_cells(report: &TestReport) -> Vec<Vec<String>> {
    report
        .comparisons
        .iter()
        .map(|c| {
            std::iter::once(c.label.clone())
                .chain(
                    [
                        c.estimate,
                        c.stderr,
                        c.df,
                        c.statistic,
                        c.p_adjusted,
                        c.ci_low,
                        c.ci_high,
                        c.critical,
                    ]
                    .map(num),
                )
                .collect()
        })
        .collect()
}

/// Right-aligned columns; the first column is left-aligned.
fn align(header: &[&str], body: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|j| body.iter().map(|r| r[j].len()).chain([header[j].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(j, (c, w))| if j == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = line(&header.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    out.push('\n');
    for row in body {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}

pub fn report_table(report: &TestReport, ds: &Dataset, seed: u64) -> String {
    let mut out = String::new();
    let meta = [
        ("method", report.method.to_string()),
        ("alternative", report.alternative.to_string()),
        ("alpha", num(report.alpha)),
        ("control", ds.control().to_string()),
        ("seed", seed.to_string()),
        ("critical value", num(report.critical_value)),
        ("common df", opt(report.global_df)),
        ("pooled variance", opt(report.pooled_var)),
        ("max integration error", num(report.max_integration_error)),
    ];
    for (k, v) in meta {
        if !v.is_empty() {
            out.push_str(&format!("{k}: {v}\n"));
        }
    }
    out.push('\n');
    out.push_str(&align(&COMPARISON_COLUMNS, &comparison_cells(report)));
    out
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn report_csv(report: &TestReport, ds: &Dataset, seed: u64) -> String {
    let mut header = vec![
        "method",
        "alternative",
        "alpha",
        "control",
        "seed",
        "common_df",
        "pooled_var",
        "max_integration_error",
    ];
    header.extend(COMPARISON_COLUMNS);
    let meta = [
        report.method.to_string(),
        report.alternative.to_string(),
        num(report.alpha),
        ds.control().to_string(),
        seed.to_string(),
        opt(report.global_df),
        opt(report.pooled_var),
        num(report.max_integration_error),
    ];
    let rows: Vec<Vec<String>> = comparison_cells(report)
        .into_iter()
        .map(|cells| meta.iter().cloned().chain(cells).collect())
        .collect();
    csv_string(&header, &rows)
}

pub fn report_json(report: &TestReport, ds: &Dataset, seed: u64) -> String {
    let comparisons: Vec<Value> = report
        .comparisons
        .iter()
        .map(|c| {
            json!({
                "comparison": c.label,
                "estimate": json_num(c.estimate),
                "stderr": json_num(c.stderr),
                "df": json_num(c.df),
                "statistic": json_num(c.statistic),
                "p_adjusted": json_num(c.p_adjusted),
                "ci_low": json_num(c.ci_low),
                "ci_high": json_num(c.ci_high),
                "critical": json_num(c.critical),
            })
        })
        .collect();
    let v = json!({
        "schema": JSON_SCHEMA,
        "method": report.method,
        "alternative": report.alternative.to_string(),
        "alpha": report.alpha,
        "control": ds.control(),
        "seed": seed,
        "critical_value": json_num(report.critical_value),
        "common_df": report.global_df.map(json_num),
        "pooled_var": report.pooled_var.map(json_num),
        "max_integration_error": report.max_integration_error,
        "comparisons": comparisons,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("serializable report");
    s.push('\n');
    s
}

fn joined(xs: impl IntoIterator<Item = String>) -> String {
    xs.into_iter().collect::<Vec<_>>().join(";")
}

const SIM_COLUMNS: [&str; 14] = [
    "scenario",
    "method",
    "runs",
    "seed",
    "alpha",
    "alternative",
    "means",
    "sds",
    "ns",
    "anypairs",
    "mc_se",
    "elementary",
    "elementary_se",
    "failed_runs",
];

fn sim_rows(reports: &[(usize, SimReport)]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (i, r) in reports {
        let sc = &r.scenario;
        for m in &r.methods {
            rows.push(vec![
                i.to_string(),
                m.method.to_string(),
                m.runs_used.to_string(),
                sc.seed.to_string(),
                num(sc.alpha),
                sc.alternative.to_string(),
                joined(sc.means.iter().map(|&x| num(x))),
                joined(sc.sds.iter().map(|&x| num(x))),
                joined(sc.ns.iter().map(|n| n.to_string())),
                num(m.anypairs),
                num(m.mc_se),
                joined(m.elementary.iter().map(|&x| num(x))),
                joined(m.elementary_se.iter().map(|&x| num(x))),
                m.failed_runs.to_string(),
            ]);
        }
    }
    rows
}

pub fn sim_csv(reports: &[(usize, SimReport)]) -> String {
    csv_string(&SIM_COLUMNS, &sim_rows(reports))
}

pub fn sim_table(reports: &[(usize, SimReport)]) -> String {
    align(&SIM_COLUMNS, &sim_rows(reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 4.5004438955498216e-5, 1e-300, -2.5, 1e22, f64::INFINITY, f64::NEG_INFINITY] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(json_num(f64::INFINITY), json!("inf"));
        assert_eq!(json_num(0.5), json!(0.5));
    }

    #[test]
    fn csv_quotes_awkward_labels() {
        let s = csv_string(&["a", "b"], &[vec!["x,y".into(), "1".into()]]);
        assert_eq!(s, "a,b\n\"x,y\",1\n");
    }
}
