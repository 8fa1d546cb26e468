//! Data-driven choice between Cases I to IV.

use serde::{Deserialize, Serialize};

use super::{ect_from_long_run, fit_recm, fit_unrestricted, long_run, ArdlData, ArdlSpec, Case, INTERCEPT, TREND};
use crate::error::Result;

/// Significance level for keeping a deterministic term.
pub const CASE_LEVEL: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseEvidence {
    pub case: Case,
    /// p-value of the long-run intercept `-c/phi_1`.
    pub long_run_intercept_p: f64,
    /// p-value of the intercept in the error-correction equation built on
    /// the restricted-intercept ECT.
    pub short_run_intercept_p: f64,
    /// HAC p-value of the trend in the Case IV levels equation; only
    /// examined once an intercept is kept.
    pub trend_p: Option<f64>,
}

fn p_of(inf: &[crate::regression::CoefInference], name: &str) -> f64 {
    inf.iter().find(|c| c.name == name).map_or(1.0, |c| c.p_value)
}

/// An intercept significant in the short-run equation is unrestricted
/// (III), one significant only in the long-run relation is restricted (II),
/// and neither gives Case I. With an intercept kept, a trend significant in
/// the levels equation moves to Case IV. The lag orders of `spec` are held
/// fixed.
pub fn choose_case(data: &ArdlData, spec: &ArdlSpec, hac_bandwidth: usize) -> Result<CaseEvidence> {
    let with = |case| ArdlSpec { case, ..spec.clone() };
    let lr_fit = fit_unrestricted(data, &with(Case::II), hac_bandwidth)?;
    let lr = long_run(&lr_fit)?;
    let lr_p = lr.intercept.as_ref().map_or(1.0, |c| c.p_value);
    let ect = ect_from_long_run(data, Case::II, &lr)?;
    let ecm = fit_recm(data, &with(Case::III), &ect, hac_bandwidth)?;
    let sr_p = p_of(&ecm.inference(), INTERCEPT);
    let mut evidence = CaseEvidence {
        case: Case::I,
        long_run_intercept_p: lr_p,
        short_run_intercept_p: sr_p,
        trend_p: None,
    };
    if sr_p >= CASE_LEVEL && lr_p >= CASE_LEVEL {
        return Ok(evidence);
    }
    let iv = fit_unrestricted(data, &with(Case::IV), hac_bandwidth)?;
    let trend_p = p_of(&iv.inference(), TREND);
    evidence.trend_p = Some(trend_p);
    evidence.case = if trend_p < CASE_LEVEL {
        Case::IV
    } else if sr_p < CASE_LEVEL {
        Case::III
    } else {
        Case::II
    };
    Ok(evidence)
}
