//! ARDL models in conditional error-correction form:
//!
//! ```text
//! dP_t = [c] + [d t] + sum_{i=1..m} g_i dP_{t-i}
//!        + sum_j sum_{i=0..n_j} b_ji dX_{j,t-i}
//!        + phi_1 P_{t-1} + sum_j phi_j X_{j,t-1} + u_t
//! ```
//!
//! Submodules cover lag selection, the bound test, long-run multipliers,
//! the restricted error-correction model and the choice of deterministic
//! case.

mod bounds;
mod case;
mod ecm;
mod longrun;
mod search;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::PanelDataset;
use crate::regression::{self, CovarianceEstimate, Design, OlsFit};

pub use bounds::{
    bound_test, classify, classify_f, BoundDecision, BoundLevel, BoundTestResult, BoundsTable,
    Decision,
};
pub use case::{choose_case, CaseEvidence};
pub use ecm::{build_ect, ect_from_long_run, fit_recm, EcmFit};
pub use longrun::{delta_method_se, long_run, long_run_multiplier, LongRunCoef, LongRunEstimates};
pub use search::{select_spec, Candidate, Search, Selection};

/// Default maximum lag for the specification search.
pub const DEFAULT_MAX_LAG: usize = 4;

/// Deterministic terms in the Pesaran-Shin-Smith taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Case {
    /// No intercept, no trend.
    I,
    /// Restricted intercept (enters the long-run relation only).
    II,
    /// Unrestricted intercept.
    III,
    /// Unrestricted intercept, restricted trend.
    IV,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::I, Case::II, Case::III, Case::IV];

    pub fn has_intercept(self) -> bool {
        self != Case::I
    }

    pub fn has_trend(self) -> bool {
        self == Case::IV
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
            Case::IV => "IV",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Case::I),
            "II" | "2" => Ok(Case::II),
            "III" | "3" => Ok(Case::III),
            "IV" | "4" => Ok(Case::IV),
            other => Err(Error::InvalidArgument(format!("unknown case `{other}`"))),
        }
    }
}

/// Lag orders and deterministic case of one ARDL model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArdlSpec {
    pub dep: String,
    pub x_vars: Vec<String>,
    pub z_vars: Vec<String>,
    /// Number of lagged differences of the dependent variable, at least 1.
    pub dep_lags: usize,
    /// Lagged differences per regressor beyond the contemporaneous one, in
    /// `x_vars` then `z_vars` order.
    pub reg_lags: Vec<usize>,
    pub case: Case,
    pub max_lag: usize,
}

impl ArdlSpec {
    pub fn regressors(&self) -> impl Iterator<Item = &str> {
        self.x_vars.iter().chain(&self.z_vars).map(String::as_str)
    }

    pub fn k(&self) -> usize {
        self.x_vars.len() + self.z_vars.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.reg_lags.len() != self.k() {
            return Err(Error::InvalidArgument(format!(
                "{} lag orders for {} regressors",
                self.reg_lags.len(),
                self.k()
            )));
        }
        if self.dep_lags == 0 {
            return Err(Error::InvalidArgument("dependent lag order starts at 1".into()));
        }
        if self.dep_lags > self.max_lag || self.reg_lags.iter().any(|&n| n > self.max_lag) {
            return Err(Error::InvalidArgument(format!(
                "lag orders {:?} exceed the maximum lag {}",
                self.lag_vector(),
                self.max_lag
            )));
        }
        Ok(())
    }

    /// `(m, n_1, .., n_k)`.
    pub fn lag_vector(&self) -> Vec<usize> {
        std::iter::once(self.dep_lags)
            .chain(self.reg_lags.iter().copied())
            .collect()
    }

    /// Number of columns of the unrestricted design.
    pub fn design_width(&self) -> usize {
        deterministic_count(self.case)
            + self.dep_lags
            + self.reg_lags.iter().map(|n| n + 1).sum::<usize>()
            + 1
            + self.k()
    }

    /// EViews-style label, e.g. `ARDL(3,1,1,0)`.
    pub fn label(&self) -> String {
        let lags: Vec<String> = self.lag_vector().iter().map(|l| l.to_string()).collect();
        format!("ARDL({})", lags.join(","))
    }
}

fn deterministic_count(case: Case) -> usize {
    usize::from(case.has_intercept()) + usize::from(case.has_trend())
}

/// Dependent variable and regressors in levels, aligned on a common sample.
#[derive(Debug, Clone)]
pub struct ArdlData {
    pub dep_name: String,
    pub reg_names: Vec<String>,
    pub dep: Vec<f64>,
    pub regs: Vec<Vec<f64>>,
}

impl ArdlData {
    pub fn from_panel(panel: &PanelDataset, dep: &str, regressors: &[&str]) -> Result<Self> {
        let mut names = vec![dep];
        names.extend_from_slice(regressors);
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidArgument(format!("variable `{n}` listed twice")));
            }
        }
        let sel = panel.select(&names)?;
        Ok(Self {
            dep_name: dep.to_string(),
            reg_names: regressors.iter().map(|s| s.to_string()).collect(),
            dep: sel.series(dep)?.to_vec(),
            regs: regressors
                .iter()
                .map(|r| sel.series(r).map(<[f64]>::to_vec))
                .collect::<Result<_>>()?,
        })
    }

    pub fn len(&self) -> usize {
        self.dep.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dep.is_empty()
    }

    pub fn k(&self) -> usize {
        self.regs.len()
    }

    /// First row of the estimation sample once `max_lag` lags are trimmed.
    pub fn first_row(max_lag: usize) -> usize {
        max_lag + 1
    }

    /// Rows left for estimation under `max_lag`.
    pub fn effective_len(&self, max_lag: usize) -> usize {
        self.len().saturating_sub(Self::first_row(max_lag))
    }

    fn check_spec(&self, spec: &ArdlSpec) -> Result<()> {
        spec.validate()?;
        if spec.dep != self.dep_name || !spec.regressors().eq(self.reg_names.iter().map(String::as_str)) {
            return Err(Error::InvalidArgument(
                "specification variables do not match the data".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn diff_name(var: &str, lag: usize) -> String {
    if lag == 0 {
        format!("D({var})")
    } else {
        format!("D({var}(-{lag}))")
    }
}

pub(crate) fn level_name(var: &str) -> String {
    format!("{var}(-1)")
}

pub const INTERCEPT: &str = "C";
pub const TREND: &str = "@TREND";
pub const ECT: &str = "ECT(-1)";

/// Columns shared by the unrestricted ARDL and the restricted ECM, for a
/// given set of deterministics and the short-run lag orders.
pub(crate) fn short_run_columns(
    data: &ArdlData,
    dep_lags: usize,
    reg_lags: &[usize],
    intercept: bool,
    trend: bool,
    max_lag: usize,
) -> Vec<(String, Vec<f64>)> {
    let rows = ArdlData::first_row(max_lag)..data.len();
    let diff = |s: &[f64], lag: usize| -> Vec<f64> {
        rows.clone().map(|t| s[t - lag] - s[t - lag - 1]).collect()
    };
    let mut cols = Vec::new();
    if intercept {
        cols.push((INTERCEPT.to_string(), vec![1.0; rows.len()]));
    }
    if trend {
        cols.push((TREND.to_string(), rows.clone().map(|t| t as f64).collect()));
    }
    for i in 1..=dep_lags {
        cols.push((diff_name(&data.dep_name, i), diff(&data.dep, i)));
    }
    for (j, &n) in reg_lags.iter().enumerate() {
        for i in 0..=n {
            cols.push((diff_name(&data.reg_names[j], i), diff(&data.regs[j], i)));
        }
    }
    cols
}

pub(crate) fn level_columns(data: &ArdlData, max_lag: usize) -> Vec<(String, Vec<f64>)> {
    let rows = ArdlData::first_row(max_lag)..data.len();
    let lag1 = |s: &[f64]| -> Vec<f64> { rows.clone().map(|t| s[t - 1]).collect() };
    std::iter::once((level_name(&data.dep_name), lag1(&data.dep)))
        .chain(
            data.reg_names
                .iter()
                .zip(&data.regs)
                .map(|(n, s)| (level_name(n), lag1(s))),
        )
        .collect()
}

/// `dP_t` over the estimation sample.
pub(crate) fn response(data: &ArdlData, max_lag: usize) -> Vec<f64> {
    (ArdlData::first_row(max_lag)..data.len())
        .map(|t| data.dep[t] - data.dep[t - 1])
        .collect()
}

/// Unrestricted design for `spec`.
pub fn unrestricted_design(data: &ArdlData, spec: &ArdlSpec) -> Result<Design> {
    let mut cols = short_run_columns(
        data,
        spec.dep_lags,
        &spec.reg_lags,
        spec.case.has_intercept(),
        spec.case.has_trend(),
        spec.max_lag,
    );
    cols.extend(level_columns(data, spec.max_lag));
    Design::from_columns(cols)
}

/// Fitted unrestricted ARDL model.
#[derive(Debug, Clone)]
pub struct ArdlFit {
    pub spec: ArdlSpec,
    pub design: Design,
    pub response: Vec<f64>,
    pub fit: OlsFit,
    pub hac: CovarianceEstimate,
}

impl ArdlFit {
    fn col(&self, name: &str) -> Option<usize> {
        self.design.column_index(name)
    }

    /// Column index of `P_{t-1}`.
    pub fn dep_level_index(&self) -> usize {
        self.col(&level_name(&self.spec.dep)).expect("design has the dependent level")
    }

    /// Column indices of `X_{j,t-1}` in regressor order.
    pub fn reg_level_indices(&self) -> Vec<usize> {
        self.spec
            .regressors()
            .map(|r| self.col(&level_name(r)).expect("design has every regressor level"))
            .collect()
    }

    pub fn level_indices(&self) -> Vec<usize> {
        std::iter::once(self.dep_level_index())
            .chain(self.reg_level_indices())
            .collect()
    }

    pub fn phi1(&self) -> f64 {
        self.fit.coefficients[self.dep_level_index()]
    }

    /// Level coefficients `phi_j` of the regressors.
    pub fn phi(&self) -> Vec<f64> {
        self.reg_level_indices()
            .iter()
            .map(|&j| self.fit.coefficients[j])
            .collect()
    }

    pub fn intercept_index(&self) -> Option<usize> {
        self.col(INTERCEPT)
    }

    pub fn trend_index(&self) -> Option<usize> {
        self.col(TREND)
    }

    pub fn intercept(&self) -> Option<f64> {
        self.intercept_index().map(|j| self.fit.coefficients[j])
    }

    /// Short-run coefficients (lagged differences) with their names.
    pub fn short_run(&self) -> Vec<(&str, f64)> {
        let skip: Vec<usize> = self
            .level_indices()
            .into_iter()
            .chain(self.intercept_index())
            .chain(self.trend_index())
            .collect();
        self.design
            .names
            .iter()
            .enumerate()
            .filter(|(j, _)| !skip.contains(j))
            .map(|(j, n)| (n.as_str(), self.fit.coefficients[j]))
            .collect()
    }

    pub fn inference(&self) -> Vec<regression::CoefInference> {
        regression::inference(&self.fit, &self.hac)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.design.x
    }
}

/// OLS estimate of the unrestricted model with Newey-West standard errors.
pub fn fit_unrestricted(data: &ArdlData, spec: &ArdlSpec, hac_bandwidth: usize) -> Result<ArdlFit> {
    data.check_spec(spec)?;
    let n_eff = data.effective_len(spec.max_lag);
    if n_eff <= spec.design_width() {
        return Err(Error::InsufficientData(format!(
            "{n_eff} observations for {} parameters",
            spec.design_width()
        )));
    }
    let design = unrestricted_design(data, spec)?;
    let y = response(data, spec.max_lag);
    let fit = regression::ols_fit(&y, &design)?;
    let hac = regression::newey_west_cov(&fit, &design.x, hac_bandwidth)?;
    Ok(ArdlFit {
        spec: spec.clone(),
        design,
        response: y,
        fit,
        hac,
    })
}

#[cfg(test)]
mod tests;
