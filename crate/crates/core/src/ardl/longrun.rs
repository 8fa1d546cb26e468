//! Long-run multipliers `-phi_i / phi_1` with delta-method standard errors.

use serde::{Deserialize, Serialize};

use super::{ArdlFit, INTERCEPT, TREND};
use crate::dist;
use crate::error::{Error, Result};

/// Below this `|phi_1|` the level relationship is treated as absent.
pub const PHI1_TOL: f64 = 1e-12;

pub fn long_run_multiplier(phi_i: f64, phi1: f64) -> Result<f64> {
    if !(phi1.abs() > PHI1_TOL) {
        return Err(Error::NoLevelRelationship(phi1));
    }
    Ok(-phi_i / phi1)
}

/// First-order delta method with gradient `(phi_i/phi_1^2, -1/phi_1)` over
/// the covariance of `(phi_1, phi_i)`.
pub fn delta_method_se(phi1: f64, phi_i: f64, var_phi1: f64, var_phi_i: f64, cov: f64) -> f64 {
    let g1 = phi_i / (phi1 * phi1);
    let g2 = -1.0 / phi1;
    (g1 * g1 * var_phi1 + g2 * g2 * var_phi_i + 2.0 * g1 * g2 * cov)
        .max(0.0)
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRunCoef {
    pub name: String,
    pub multiplier: f64,
    pub std_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongRunEstimates {
    pub phi1: f64,
    /// One entry per regressor, in specification order.
    pub coefs: Vec<LongRunCoef>,
    /// `-c / phi_1`, for every case with an intercept.
    pub intercept: Option<LongRunCoef>,
    /// `-d / phi_1`, Case IV only.
    pub trend: Option<LongRunCoef>,
    pub warning: Option<String>,
}

impl LongRunEstimates {
    pub fn get(&self, name: &str) -> Option<&LongRunCoef> {
        self.coefs.iter().find(|c| c.name == name)
    }

    pub fn multipliers(&self) -> Vec<f64> {
        self.coefs.iter().map(|c| c.multiplier).collect()
    }
}

pub fn long_run(fit: &ArdlFit) -> Result<LongRunEstimates> {
    let j1 = fit.dep_level_index();
    let phi1 = fit.fit.coefficients[j1];
    if !(phi1.abs() > PHI1_TOL) {
        return Err(Error::NoLevelRelationship(phi1));
    }
    let cov = &fit.hac.matrix;
    let df = (fit.fit.nobs - fit.fit.nparams) as f64;
    let coef = |name: &str, j: usize| -> Result<LongRunCoef> {
        let phi = fit.fit.coefficients[j];
        let multiplier = long_run_multiplier(phi, phi1)?;
        let std_error = delta_method_se(phi1, phi, cov[(j1, j1)], cov[(j, j)], cov[(j1, j)]);
        let t_stat = if std_error > 0.0 { multiplier / std_error } else { 0.0 };
        Ok(LongRunCoef {
            name: name.to_string(),
            multiplier,
            std_error,
            t_stat,
            p_value: if std_error > 0.0 { dist::t_two_sided(t_stat, df) } else { 1.0 },
        })
    };
    let coefs = fit
        .spec
        .regressors()
        .zip(fit.reg_level_indices())
        .map(|(name, j)| coef(name, j))
        .collect::<Result<_>>()?;
    Ok(LongRunEstimates {
        phi1,
        coefs,
        intercept: fit.intercept_index().map(|j| coef(INTERCEPT, j)).transpose()?,
        trend: fit.trend_index().map(|j| coef(TREND, j)).transpose()?,
        warning: (phi1 >= 0.0).then(|| {
            format!("lagged level coefficient {phi1:.4} is not negative: no error-correction interpretation")
        }),
    })
}
