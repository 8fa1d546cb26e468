//! Table rendering for pipeline results: CSV or aligned text, numbers at
//! four decimals, significance stars at 10/5/1%.

use std::path::{Path, PathBuf};

use crate::ardl::{BoundLevel, BoundTestResult, Decision, LongRunEstimates};
use crate::error::{Error, Result};
use crate::pipeline::{AdfRow, DependentReport, FitStats, ReportBundle, ReportFormat};
use crate::regression::CoefInference;

pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.10 {
        "*"
    } else {
        ""
    }
}

/// Four decimals; negative zero prints as zero.
pub fn num(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// `estimate*** (se)`.
pub fn display(estimate: f64, std_error: f64, p: f64) -> String {
    format!("{}{} ({})", num(estimate), stars(p), num(std_error))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Self {
            title: title.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    /// Title line, then columns padded to their widest cell; the first
    /// column is left-aligned and the rest right-aligned.
    pub fn to_text(&self) -> String {
        let ncol = self.header.len();
        let mut width = vec![0; ncol];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |r: &[String]| -> String {
            let cells: Vec<String> = r
                .iter()
                .enumerate()
                .map(|(j, c)| if j == 0 { format!("{c:<w$}", w = width[0]) } else { format!("{c:>w$}", w = width[j]) })
                .collect();
            cells.join("  ").trim_end().to_string() + "\n"
        };
        let total: usize = width.iter().sum::<usize>() + 2 * ncol.saturating_sub(1);
        let mut out = format!("{}\n{}\n", self.title, "=".repeat(total.max(self.title.len())));
        out += &line(&self.header);
        out += &format!("{}\n", "-".repeat(total));
        for r in &self.rows {
            out += &line(r);
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Csv => self.to_csv(),
            ReportFormat::Text => self.to_text(),
        }
    }
}

pub fn adf_table(title: &str, rows: &[AdfRow]) -> Table {
    let mut t = Table::new(title, &["series", "transform", "prob", "lag", "maxlag", "n"]);
    for r in rows {
        t.push(vec![
            r.series.clone(),
            r.transform.clone(),
            num(r.result.p_value),
            r.result.chosen_lag.to_string(),
            r.result.max_lag.to_string(),
            r.result.nobs_effective.to_string(),
        ]);
    }
    t
}

const COEF_HEADER: [&str; 6] = ["term", "estimate", "std_error", "t_stat", "p_value", "display"];

fn coef_rows(t: &mut Table, coefs: &[CoefInference]) {
    for c in coefs {
        t.push(vec![
            c.name.clone(),
            num(c.estimate),
            num(c.std_error),
            num(c.t_stat),
            num(c.p_value),
            display(c.estimate, c.std_error, c.p_value),
        ]);
    }
}

fn stat_row(t: &mut Table, name: &str, value: f64) {
    t.push(vec![name.into(), num(value), String::new(), String::new(), String::new(), num(value)]);
}

fn stat_rows(t: &mut Table, s: &FitStats) {
    stat_row(t, "R-squared", s.r_squared);
    stat_row(t, "Adj. R-squared", s.adj_r_squared);
    if let Some(dw) = s.durbin_watson {
        stat_row(t, "Durbin-Watson", dw);
    }
    // diagnostic rows carry the statistic and its p-value
    for (name, test) in [(format!("BG LM({})", s.bg_lags), &s.bg), ("BPG".to_string(), &s.bpg)] {
        if let Some(lm) = test {
            t.push(vec![
                name,
                num(lm.statistic),
                String::new(),
                String::new(),
                num(lm.p_value),
                num(lm.p_value),
            ]);
        }
    }
    stat_row(t, "SIC", s.sic);
    t.push(vec![
        "N".into(),
        s.nobs.to_string(),
        String::new(),
        String::new(),
        String::new(),
        s.nobs.to_string(),
    ]);
}

pub fn ardl_table(r: &DependentReport) -> Table {
    let mut t = Table::new(
        format!("{}: {} case {} (HAC standard errors)", r.dep, r.label, r.case),
        &COEF_HEADER,
    );
    coef_rows(&mut t, &r.coefficients);
    stat_rows(&mut t, &r.stats);
    t
}

pub fn ecm_table(r: &DependentReport) -> Table {
    let mut t = Table::new(format!("{}: restricted error-correction model", r.dep), &COEF_HEADER);
    coef_rows(&mut t, &r.ecm.coefficients);
    stat_rows(&mut t, &r.ecm.stats);
    t
}

fn bound_stars(b: &BoundTestResult) -> &'static str {
    let ok = |l| b.at(l).decision == Decision::Cointegrated;
    if ok(BoundLevel::One) {
        "***"
    } else if ok(BoundLevel::Five) {
        "**"
    } else if ok(BoundLevel::Ten) {
        "*"
    } else {
        ""
    }
}

pub fn bounds_table(dep: &str, b: &BoundTestResult) -> Table {
    let mut t = Table::new(
        format!("{dep}: bound test F = {}{} (case {}, k = {})", num(b.f_stat), bound_stars(b), b.case, b.k),
        &["case", "k", "level", "lower", "upper", "f_stat", "decision"],
    );
    for d in &b.decisions {
        t.push(vec![
            b.case.to_string(),
            b.k.to_string(),
            d.level.label().into(),
            format!("{:.2}", d.lower),
            format!("{:.2}", d.upper),
            num(b.f_stat),
            d.decision.name().into(),
        ]);
    }
    t
}

pub fn longrun_table(dep: &str, lr: &LongRunEstimates) -> Table {
    let mut t = Table::new(
        format!("{dep}: long-run multipliers -phi_i/phi_1"),
        &["term", "multiplier", "std_error", "t_stat", "p_value", "display"],
    );
    for c in lr.coefs.iter().chain(&lr.intercept).chain(&lr.trend) {
        t.push(vec![
            c.name.clone(),
            num(c.multiplier),
            num(c.std_error),
            num(c.t_stat),
            num(c.p_value),
            display(c.multiplier, c.std_error, c.p_value),
        ]);
    }
    t
}

fn ext(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Csv => "csv",
        ReportFormat::Text => "txt",
    }
}

/// Names safe for file names: anything outside `[A-Za-z0-9_-]` becomes `_`.
fn stem(dep: &str) -> String {
    dep.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// `(file name, contents)` pairs for one dependent variable.
pub fn render_dependent(r: &DependentReport, format: ReportFormat) -> Result<Vec<(String, String)>> {
    let s = stem(&r.dep);
    let e = ext(format);
    let mut cusum = Vec::new();
    r.cusum.write_csv(&mut cusum)?;
    let mut files = vec![
        (format!("{s}_adf.{e}"), adf_table(&format!("{}: ADF unit-root tests", r.dep), &r.adf).render(format)),
        (format!("{s}_ardl.{e}"), ardl_table(r).render(format)),
        (format!("{s}_bounds.{e}"), bounds_table(&r.dep, &r.bounds).render(format)),
        (format!("{s}_longrun.{e}"), longrun_table(&r.dep, &r.long_run).render(format)),
        (format!("{s}_ecm.{e}"), ecm_table(r).render(format)),
        (format!("{s}_cusum.csv"), String::from_utf8(cusum).expect("csv is utf-8")),
    ];
    if !r.warnings.is_empty() {
        files.push((format!("{s}_warnings.txt"), r.warnings.join("\n") + "\n"));
    }
    Ok(files)
}

/// Writes every table plus `summary.json`; returns the paths in write order.
pub fn emit_report(bundle: &ReportBundle, format: ReportFormat, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut write = |name: &str, body: &str| -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    for r in &bundle.reports {
        for (name, body) in render_dependent(r, format)? {
            write(&name, &body)?;
        }
    }
    write("summary.json", &(bundle.to_json()? + "\n"))?;
    Ok(written)
}
