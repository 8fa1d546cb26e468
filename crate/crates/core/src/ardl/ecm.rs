//! Error-correction term and the restricted error-correction model.

use super::{long_run, response, short_run_columns, ArdlData, ArdlFit, ArdlSpec, Case, LongRunEstimates, ECT};
use crate::error::{Error, Result};
use crate::regression::{self, CoefInference, CovarianceEstimate, Design, OlsFit};

/// `ECT_t = P_t - (c + d t + sum_j theta_j X_{j,t})` over the whole sample,
/// where `c` enters only under a restricted intercept (Case II) and `d t`
/// only under a restricted trend (Case IV).
pub fn ect_from_long_run(data: &ArdlData, case: Case, lr: &LongRunEstimates) -> Result<Vec<f64>> {
    if lr.coefs.len() != data.k() {
        return Err(Error::Dimension(format!(
            "{} long-run coefficients for {} regressors",
            lr.coefs.len(),
            data.k()
        )));
    }
    let c = match (case, &lr.intercept) {
        (Case::II, Some(c)) => c.multiplier,
        _ => 0.0,
    };
    let d = match (case, &lr.trend) {
        (Case::IV, Some(d)) => d.multiplier,
        _ => 0.0,
    };
    Ok((0..data.len())
        .map(|t| {
            let fitted: f64 = lr
                .coefs
                .iter()
                .zip(&data.regs)
                .map(|(coef, x)| coef.multiplier * x[t])
                .sum();
            data.dep[t] - c - d * t as f64 - fitted
        })
        .collect())
}

/// ECT implied by a fitted unrestricted model.
pub fn build_ect(data: &ArdlData, fit: &ArdlFit) -> Result<Vec<f64>> {
    ect_from_long_run(data, fit.spec.case, &long_run(fit)?)
}

#[derive(Debug, Clone)]
pub struct EcmFit {
    pub spec: ArdlSpec,
    pub design: Design,
    pub response: Vec<f64>,
    pub fit: OlsFit,
    pub hac: CovarianceEstimate,
    /// Full-sample ECT in levels; the regression uses its first lag.
    pub ect: Vec<f64>,
    pub lambda: f64,
    pub warning: Option<String>,
}

impl EcmFit {
    pub fn ect_index(&self) -> usize {
        self.design.column_index(ECT).expect("ECM design has the ECT column")
    }

    pub fn inference(&self) -> Vec<CoefInference> {
        regression::inference(&self.fit, &self.hac)
    }

    pub fn lambda_inference(&self) -> CoefInference {
        self.inference().swap_remove(self.ect_index())
    }
}

/// OLS of `dP_t` on the short-run blocks of `spec` and `ECT_{t-1}`, with an
/// intercept under Cases III and IV; Newey-West standard errors.
pub fn fit_recm(data: &ArdlData, spec: &ArdlSpec, ect: &[f64], hac_bandwidth: usize) -> Result<EcmFit> {
    data.check_spec(spec)?;
    if ect.len() != data.len() {
        return Err(Error::Dimension(format!(
            "ECT has {} values for a sample of {}",
            ect.len(),
            data.len()
        )));
    }
    let intercept = matches!(spec.case, Case::III | Case::IV);
    let mut cols = short_run_columns(data, spec.dep_lags, &spec.reg_lags, intercept, false, spec.max_lag);
    let rows = ArdlData::first_row(spec.max_lag)..data.len();
    cols.push((ECT.to_string(), rows.map(|t| ect[t - 1]).collect()));
    let design = Design::from_columns(cols)?;
    if design.nrows() <= design.ncols() {
        return Err(Error::InsufficientData(format!(
            "{} observations for {} parameters",
            design.nrows(),
            design.ncols()
        )));
    }
    let y = response(data, spec.max_lag);
    let fit = regression::ols_fit(&y, &design)?;
    let hac = regression::newey_west_cov(&fit, &design.x, hac_bandwidth)?;
    let lambda = fit.coefficients[design.ncols() - 1];
    let warning = (!(lambda > -1.0 && lambda < 0.0)).then(|| {
        format!("ECT coefficient {lambda:.4} outside (-1, 0): adjustment is not stable")
    });
    Ok(EcmFit {
        spec: spec.clone(),
        design,
        response: y,
        fit,
        hac,
        ect: ect.to_vec(),
        lambda,
        warning,
    })
}
